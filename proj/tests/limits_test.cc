// Copyright 2026 The hbac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hbac/limits.hpp"
#include "oracles.hpp"

namespace hbac {
namespace {

TEST(RoundExponent, FirstRound) {
    EXPECT_EQ(round_exponent(1, 1, 5), 4u);
    EXPECT_EQ(round_exponent(1, 3, 5), 2u);
    EXPECT_EQ(round_exponent(1, 4, 5), 1u);
    EXPECT_EQ(round_exponent(1, 5, 5), 1u);
}

TEST(RoundExponent, LaterRoundsByHand) {
    // n = 4: round 2 head gets f(1,2) + 2 = 2 + 2.
    EXPECT_EQ(round_exponent(2, 1, 4), 4u);
    EXPECT_EQ(round_exponent(2, 2, 4), round_exponent(1, 2, 4));
    // n = 5, round 3 head: f(2,2) + 2 + f(1,3) with f(2,2) = f(1,3) + 2 = 4.
    EXPECT_EQ(round_exponent(3, 1, 5), 8u);
}

TEST(RoundExponent, MatchesPlainRecursion) {
    for (std::size_t n = 3; n <= 14; ++n) {
        const RoundExponents table(n);
        for (std::size_t r = 1; r <= n - 2; ++r) {
            for (std::size_t k = 1; k <= n; ++k) {
                ASSERT_EQ(table(r, k), oracle::exponent(r, k, n)) << r << "," << k << "," << n;
            }
        }
    }
}

TEST(RoundExponent, FinalHeadIsPowerOfTwo) {
    for (std::size_t n = 3; n <= 40; ++n) {
        EXPECT_EQ(round_exponent(n - 2, 1, n), std::uint64_t{1} << (n - 2)) << n;
    }
}

TEST(RoundExponent, RangeChecks) {
    EXPECT_THROW(round_exponent(0, 1, 5), std::out_of_range);
    EXPECT_THROW(round_exponent(4, 1, 5), std::out_of_range);
    EXPECT_THROW(round_exponent(1, 6, 5), std::out_of_range);
    EXPECT_THROW(RoundExponents(2), std::invalid_argument);
}

TEST(SingleRoundLimit, Examples) {
    EXPECT_DOUBLE_EQ(single_round_limit(Bias(0.3), 1), 0.3);
    EXPECT_NEAR(single_round_limit(Bias(0.5), 2), 0.8, 1e-15);
    EXPECT_NEAR(single_round_limit(Bias(0.1), 2), 0.198019801980198, 1e-12);
    EXPECT_NEAR(single_round_limit(Bias(0.3), 200), 1.0, 1e-9);
    EXPECT_THROW(single_round_limit(Bias(0.3), 0), std::invalid_argument);
}

TEST(SingleRoundLimit, BisectionFixedPoint) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double e = u(rng);
        const unsigned m = 1 + trial % 30;
        ASSERT_NEAR(single_round_limit(Bias(e), m), oracle::single_round_fixed_point(e, m), 1e-12);
    }
}

TEST(SingleRoundLimit, IteratedThreeQubitCooling) {
    for (double e : {0.01, 0.1, 0.4, 0.8}) {
        EXPECT_NEAR(single_round_limit(Bias(e), 2), oracle::three_qubit_cooling_limit(e), 1e-12);
    }
}

TEST(AnalyticLimit, Examples) {
    EXPECT_NEAR(analytic_limit(2, 1, 4, Bias(0.1)), std::tanh(4 * std::atanh(0.1)), 1e-15);
    EXPECT_NEAR(analytic_limit(2, 1, 4, Bias(0.1)), 0.381096, 1e-6);
    EXPECT_NEAR(analytic_limit(6, 1, 8, Bias(1e-5)), 6.4e-4, 6.4e-7);
    EXPECT_EQ(analytic_limit(3, 2, 6, Bias(0.0)), 0.0);
    EXPECT_EQ(analytic_limit(3, 2, 6, Bias(1.0)), 1.0);
}

TEST(AnalyticLimit, ExponentTwoAtHalf) { EXPECT_NEAR(detail::exponent_limit(0.5, 2), 0.8, 1e-15); }

TEST(AnalyticLimit, LargeExponentsSaturate) {
    EXPECT_EQ(analytic_limit(38, 1, 40, Bias(0.5)), 1.0);
    EXPECT_GT(analytic_limit(38, 1, 40, Bias(1e-12)), 0.0);
    EXPECT_LT(analytic_limit(38, 1, 40, Bias(1e-12)), 1.0);
}

TEST(NumericalLimits, MatchesAnalyticOnEqualBiases) {
    for (std::size_t n = 3; n <= 7; ++n) {
        for (double e : {1e-5, 0.1, 0.5}) {
            const auto m = numerical_limits(RegisterBiases::uniform(n, e), n - 2, 1e-9);
            for (std::size_t r = 1; r <= n - 2; ++r) {
                for (std::size_t k = 1; k <= n; ++k) {
                    const double a = analytic_limit(r, k, n, Bias(e));
                    ASSERT_NEAR(m.at(r - 1, k - 1), a, 1e-6 * a) << n << " " << e << " " << r << " " << k;
                }
            }
        }
    }
}

TEST(NumericalLimits, ThreeQubitsSingleRound) {
    const auto m = numerical_limits(RegisterBiases::uniform(3, 0.1), 1, 1e-12);
    EXPECT_NEAR(m.at(0, 0), single_round_limit(Bias(0.1), 2), 1e-10);
}

TEST(NumericalLimits, ZeroBiasesGiveZeroMatrix) {
    const auto m = numerical_limits(RegisterBiases::uniform(3, 0.0), 1);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(m.at(0, k), 0.0);
    }
}

TEST(NumericalLimits, UnequalBiasesStayAboveDefaults) {
    const RegisterBiases reg({0.05, 0.2, 0.1, 0.3, 0.1});
    const auto m = numerical_limits(reg, 3);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t k = 0; k < 5; ++k) {
            EXPECT_GE(m.at(r, k), reg[k].value());
            if (r > 0) {
                EXPECT_GE(m.at(r, k), m.at(r - 1, k));
            }
        }
    }
}

TEST(NumericalLimits, Errors) {
    EXPECT_THROW(numerical_limits(RegisterBiases::uniform(3, 0.1), 2), std::invalid_argument);
    EXPECT_THROW(numerical_limits(RegisterBiases::uniform(4, 0.1), 1, 0.0), std::invalid_argument);
    EXPECT_THROW(numerical_limits(RegisterBiases::uniform(6, 1e-5), 4, 1e-15, 3), DivergenceError);
}

TEST(Bounds, ClosedSystem) {
    EXPECT_EQ(shannon_bound(7, Bias(1.0)), 7.0);
    EXPECT_NEAR(shannon_bound(7, Bias(0.0)), 0.0, 1e-15);
    EXPECT_NEAR(sqrt_bound(4, Bias(0.01)), 0.02, 1e-15);
    EXPECT_NEAR(binary_entropy(0.5), 1.0, 1e-15);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
}

TEST(SortBound, EqualsOptswapMarginalOnProductStates) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> b(1 + trial % 10);
        for (auto& x : b) {
            x = u(rng);
        }
        const auto d = probamps(RegisterBiases(b));
        const std::vector<double> p(d.values().begin(), d.values().end());
        ASSERT_NEAR(sort_bound(d), oracle::sorted_half_gap(p), 1e-13);
    }
}

}  // namespace
}  // namespace hbac
