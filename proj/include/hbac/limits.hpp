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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbac/compress.hpp"
#include "hbac/errors.hpp"
#include "hbac/regstate.hpp"

namespace hbac {

inline constexpr double kDefaultPrecision = 1e-9;
inline constexpr std::uint64_t kDefaultMaxIterations = 1'000'000;

/// Per-round cooling limits. Row r (0-based) holds round r+1; column k (0-based) holds qubit k+1.
class LimitMatrix {
   public:
    LimitMatrix() = default;
    LimitMatrix(std::size_t rounds, std::size_t qubits)
        : rounds_(rounds), qubits_(qubits), data_(rounds * qubits, 0.0) {}

    std::size_t rounds() const { return rounds_; }
    std::size_t qubits() const { return qubits_; }

    double& at(std::size_t r, std::size_t k) { return data_.at(r * qubits_ + k); }
    double at(std::size_t r, std::size_t k) const { return data_.at(r * qubits_ + k); }

    std::span<double> row(std::size_t r) { return std::span<double>(data_).subspan(r * qubits_, qubits_); }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data_).subspan(r * qubits_, qubits_);
    }

    friend bool operator==(const LimitMatrix&, const LimitMatrix&) = default;

   private:
    std::size_t rounds_ = 0;
    std::size_t qubits_ = 0;
    std::vector<double> data_;
};

/// Memoized table of the round exponent f(r, k, n) for one register size n.
///
/// f(r, k, n) is the number of default-bias ancilla equivalents behind qubit k at the end of
/// limiting round r, so that its limit is tanh(f * atanh(eps)). Rounds run 1..n-2, qubits 1..n.
class RoundExponents {
   public:
    explicit RoundExponents(std::size_t n) : n_(n) {
        if (n < 3 || n > 64) {
            throw std::invalid_argument("round exponents need 3 <= n <= 64, got " + std::to_string(n));
        }
        const std::size_t rounds = n - 2;
        table_.assign(rounds * n, 0);
        for (std::size_t k = 1; k <= n; ++k) {
            set(1, k, k < n - 1 ? n - k : 1);
        }
        for (std::size_t r = 2; r <= rounds; ++r) {
            for (std::size_t k = 1; k <= n; ++k) {
                if (k >= n - r) {
                    set(r, k, get(r - 1, k));
                    continue;
                }
                std::uint64_t f = 2;
                for (std::size_t i = k + 1; i <= n - r; ++i) {
                    f += get(r - 1, i);
                }
                for (std::size_t j = 1; r > 2 && j <= r - 2; ++j) {
                    f += get(j, n - j - 1);
                }
                set(r, k, f);
            }
        }
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t max_round() const { return n_ - 2; }

    std::uint64_t operator()(std::size_t r, std::size_t k) const {
        if (r < 1 || r > n_ - 2) {
            throw std::out_of_range("round " + std::to_string(r) + " outside 1.." + std::to_string(n_ - 2));
        }
        if (k < 1 || k > n_) {
            throw std::out_of_range("qubit " + std::to_string(k) + " outside 1.." + std::to_string(n_));
        }
        return get(r, k);
    }

   private:
    std::uint64_t get(std::size_t r, std::size_t k) const { return table_[(r - 1) * n_ + (k - 1)]; }
    void set(std::size_t r, std::size_t k, std::uint64_t v) { table_[(r - 1) * n_ + (k - 1)] = v; }

    std::size_t n_;
    std::vector<std::uint64_t> table_;
};

inline std::uint64_t round_exponent(std::size_t r, std::size_t k, std::size_t n) {
    return RoundExponents(n)(r, k);
}

namespace detail {

/// [(1+e)^f - (1-e)^f] / [(1+e)^f + (1-e)^f]; switches to tanh(f atanh e) once f*e > 30.
inline double exponent_limit(double epsilon, double f) {
    if (f * epsilon > 30.0) {
        return std::tanh(f * std::atanh(epsilon));
    }
    const double up = std::pow(1.0 + epsilon, f);
    const double down = std::pow(1.0 - epsilon, f);
    return (up - down) / (up + down);
}

/// Convergence of a purity-increase ratio current/previous to 1. A zero denominator converges only
/// if the numerator is also zero.
inline bool ratio_converged(double current, double previous, double precision) {
    if (previous == 0.0) {
        return current == 0.0;
    }
    return std::abs(current / previous - 1.0) <= precision;
}

}  // namespace detail

/// Limit of qubit k in round r for a register of n qubits that all default to `epsilon`.
inline double analytic_limit(std::size_t r, std::size_t k, std::size_t n, Bias epsilon) {
    return detail::exponent_limit(epsilon.value(), static_cast<double>(round_exponent(r, k, n)));
}

/// Fixed point of the limiting swap for one target against m ancillas at `epsilon`.
inline double single_round_limit(Bias epsilon, std::uint64_t m) {
    if (m < 1) {
        throw std::invalid_argument("single_round_limit needs at least one ancilla");
    }
    return detail::exponent_limit(epsilon.value(), static_cast<double>(m));
}

/// Iterative round limits for arbitrary default biases.
///
/// Within round r each qubit v <= n-r-1 is repeatedly compressed by optswaps against the qubits
/// below it, whose biases stay at the seeds of that round (the previous round's limits, or the
/// defaults in round 1). Qubits past n-r-1 carry the previous round's value forward.
inline LimitMatrix numerical_limits(const RegisterBiases& biases, std::size_t rounds, double precision = kDefaultPrecision,
                                    std::uint64_t max_iterations = kDefaultMaxIterations) {
    const std::size_t n = biases.size();
    if (n < 3 || rounds < 1 || rounds > n - 2) {
        throw std::invalid_argument("numerical_limits needs n >= 3 and 1 <= rounds <= n-2");
    }
    if (!(precision > 0.0)) {
        throw std::invalid_argument("precision must be positive");
    }
    detail::check_qubit_cap(n, kDefaultMaxQubits);

    const auto defaults = biases.values();
    LimitMatrix limits(rounds, n);
    std::vector<double> seeds(defaults.begin(), defaults.end());
    std::vector<double> sub;
    std::vector<double> dist;

    for (std::size_t r = 0; r < rounds; ++r) {
        if (r > 0) {
            auto prev = limits.row(r - 1);
            seeds.assign(prev.begin(), prev.end());
        }
        // Qubits 1..n-r-1 (1-based round r) are compressed; the rest keep their seeds.
        const std::size_t compressed = n - r - 2;
        for (std::size_t v = 0; v < compressed; ++v) {
            sub.assign(seeds.begin() + static_cast<std::ptrdiff_t>(v), seeds.end());
            double target = sub[0];
            for (std::uint64_t iteration = 0;; ++iteration) {
                if (iteration >= max_iterations) {
                    throw DivergenceError("numerical_limits: round " + std::to_string(r + 1) + ", qubit " +
                                          std::to_string(v + 1) + " did not converge in " +
                                          std::to_string(max_iterations) + " iterations (bias " +
                                          std::to_string(target) + ")");
                }
                sub[0] = target;
                detail::product_distribution(sub, dist);
                detail::apply_optswaps_inplace(dist);
                const double increased = detail::head_marginal(dist);
                const bool done = detail::ratio_converged(increased, target, precision);
                target = increased;
                if (done) {
                    break;
                }
            }
            limits.at(r, v) = target;
        }
        for (std::size_t q = compressed; q < n; ++q) {
            limits.at(r, q) = r == 0 ? defaults[q] : limits.at(r - 1, q);
        }
    }
    return limits;
}

/// Largest target bias reachable by any permutation of the diagonal: top half minus bottom half after sorting.
inline double sort_bound(const DiagDist& dist) {
    std::vector<double> sorted(dist.values().begin(), dist.values().end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    detail::CompensatedSum acc;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        acc.add(j < dist.half() ? sorted[j] : -sorted[j]);
    }
    return acc.value();
}

/// Base-2 entropy of a coin with probability `p`.
inline double binary_entropy(double p) {
    auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
    return term(p) + term(1.0 - p);
}

/// Closed-system bound on the number of qubits that can be made pure: n (1 - H((1+eps)/2)).
inline double shannon_bound(std::size_t n, Bias epsilon) {
    return static_cast<double>(n) * (1.0 - binary_entropy(epsilon.plus()));
}

/// Purity-conservation bound sqrt(n) * eps on a single target's bias.
inline double sqrt_bound(std::size_t n, Bias epsilon) {
    return std::sqrt(static_cast<double>(n)) * epsilon.value();
}

}  // namespace hbac
