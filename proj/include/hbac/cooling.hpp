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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hbac/compress.hpp"
#include "hbac/errors.hpp"
#include "hbac/limits.hpp"
#include "hbac/regstate.hpp"

namespace hbac {

inline constexpr std::uint64_t kDefaultMaxInvocations = 10'000'000;

enum class CompressionMode {
    full,  // every Definition-1 optswap of the subspace
    lim,   // only the limiting swap |011..1> <-> |100..0>
};

/// One pair exchange performed during a cooling run. Rounds and qubits are 1-based.
struct Exchange {
    std::size_t round;
    std::size_t sub_head;  // first qubit of the compressed sub-register
    std::uint64_t index;   // 0T member within the sub-register
};

/// State after one compression pass (one iteration of the while loop) of a sub-register.
struct PassRecord {
    std::size_t round;
    std::size_t head;      // subspace head x of the invocation
    std::size_t sub_head;  // v
    bool reentry;          // z
    std::uint64_t swaps;
    std::span<const double> biases;  // floored biases of qubits v..n
};

/// Optional observers; used by tests to audit swap counts and reset floors.
struct CoolingHooks {
    std::function<void(const Exchange&)> on_exchange;
    std::function<void(const PassRecord&)> on_pass;
};

struct HbacConfig {
    HbacConfig(RegisterBiases defaults_, std::size_t rounds_) : defaults(std::move(defaults_)), rounds(rounds_) {}

    RegisterBiases defaults;
    std::size_t rounds;
    double precision = kDefaultPrecision;
    CompressionMode mode = CompressionMode::full;
    std::uint64_t max_iterations = kDefaultMaxIterations;  // while-loop passes per sub-register
    std::uint64_t max_invocations = kDefaultMaxInvocations;
    CoolingHooks hooks;

    void validate() const {
        const std::size_t n = defaults.size();
        if (n < 3 || rounds < 1 || rounds > n - 2) {
            throw std::invalid_argument("cooling needs n >= 3 and 1 <= rounds <= n-2");
        }
        if (!(precision > 0.0)) {
            throw std::invalid_argument("precision must be positive");
        }
        detail::check_qubit_cap(n, kDefaultMaxQubits);
    }
};

struct CoolingReport {
    std::uint64_t complexity = 0;  // pair exchanges over the whole run
    LimitMatrix round_limits;      // RL
    LimitMatrix targets;           // numerical_limits of the defaults
    std::vector<std::uint64_t> per_round_swaps;
    std::uint64_t passes = 0;       // compression passes (full NB-MaxComp applications)
    std::uint64_t invocations = 0;  // subspace compressions, re-entries included
};

/// Mutable state shared by the subspace compressions of one register-compression run.
class CompressionState {
   public:
    explicit CompressionState(const HbacConfig& config)
        : config_(config),
          n_(config.defaults.size()),
          targets_(numerical_limits(config.defaults, config.rounds, config.precision, config.max_iterations)),
          round_limits_(config.rounds, config.defaults.size()) {
        config.validate();
        auto seed = round_limits_.row(0);
        std::copy(config.defaults.values().begin(), config.defaults.values().end(), seed.begin());
    }

    const HbacConfig& config() const { return config_; }
    std::size_t num_qubits() const { return n_; }
    const LimitMatrix& targets() const { return targets_; }
    LimitMatrix& round_limits() { return round_limits_; }
    const LimitMatrix& round_limits() const { return round_limits_; }
    std::uint64_t passes() const { return passes_; }
    std::uint64_t invocations() const { return invocations_; }

    /// Compresses the sub-register headed by qubit `x` (0-based) for round `r` (0-based) and returns
    /// the RL row together with whether it changed. Counts swaps into `swaps`.
    struct PassOutcome {
        std::vector<double> alpha;
        bool changed;
    };

    PassOutcome run_pass(std::size_t r, std::size_t x, bool reentry, std::uint64_t& swaps) {
        if (++invocations_ > config_.max_invocations) {
            throw DivergenceError(diagnostic("subspace compression exceeded " +
                                                 std::to_string(config_.max_invocations) + " invocations",
                                             r, x, x));
        }
        auto row = round_limits_.row(r);
        std::vector<double> alpha(row.begin(), row.end());
        const std::vector<double> before = alpha;
        for (std::size_t v = x; v + 1 < n_; ++v) {
            if (alpha[v] < targets_.at(r, v)) {
                std::vector<double> beta(alpha.begin() + static_cast<std::ptrdiff_t>(v), alpha.end());
                auto gamma = compress_until_stable(r, x, v, reentry, std::move(beta), swaps);
                std::copy(gamma.begin(), gamma.end(), alpha.begin() + static_cast<std::ptrdiff_t>(v));
            }
            std::copy(alpha.begin() + static_cast<std::ptrdiff_t>(v), alpha.end(),
                      row.begin() + static_cast<std::ptrdiff_t>(v));
        }
        const bool changed = !std::equal(before.begin(), before.end(), row.begin());
        return {std::move(alpha), changed};
    }

   private:
    /// Break conditions evaluated before each candidate exchange.
    bool capped(std::size_t r, std::size_t x, std::size_t v, bool reentry, double head_bias) const {
        if (!reentry && r > 0 && v > x && head_bias >= targets_.at(r - 1, v)) {
            return true;
        }
        if (reentry && r > 0 && head_bias >= targets_.at(r - 1, v)) {
            return true;
        }
        return !reentry && v == x && head_bias >= targets_.at(r, v);
    }

    /// Repeated optswap passes on qubits v..n with heat-bath flooring until the head's bias stops rising.
    std::vector<double> compress_until_stable(std::size_t r, std::size_t x, std::size_t v, bool reentry,
                                              std::vector<double> beta, std::uint64_t& swaps) {
        const auto defaults = config_.defaults.values();
        const std::size_t width = n_ - v;
        const double head_floor = defaults[v];
        std::vector<double> gamma;

        for (std::uint64_t iteration = 0;; ++iteration) {
            if (iteration >= config_.max_iterations) {
                throw DivergenceError(diagnostic("subspace did not converge in " +
                                                     std::to_string(config_.max_iterations) + " passes",
                                                 r, x, v, beta));
            }
            detail::product_distribution(beta, dist_);
            gamma = beta;
            const double head_before = gamma[0];
            const std::size_t size = dist_.size();
            double running = detail::head_marginal(dist_);
            double head_bias = head_before;
            std::uint64_t pass_swaps = 0;

            auto try_exchange = [&](std::size_t k) {
                const std::size_t c = size - 1 - k;
                if (!detail::beneficial(dist_[k], dist_[c])) {
                    return;
                }
                running += 2.0 * (dist_[c] - dist_[k]);
                std::swap(dist_[k], dist_[c]);
                ++pass_swaps;
                head_bias = std::max(running, head_floor);
                if (config_.hooks.on_exchange) {
                    config_.hooks.on_exchange({r + 1, v + 1, k});
                }
            };

            if (config_.mode == CompressionMode::full) {
                for (std::size_t k = 0; k < size / 2; ++k) {
                    if (capped(r, x, v, reentry, head_bias)) {
                        break;
                    }
                    try_exchange(k);
                }
            } else if (!capped(r, x, v, reentry, head_bias)) {
                try_exchange(size / 2 - 1);
            }

            if (pass_swaps > 0) {
                for (std::size_t i = 0; i < width; ++i) {
                    const double marginal = detail::signed_mask_sum(dist_, detail::qubit_mask(width, i + 1));
                    gamma[i] = std::max(marginal, defaults[v + i]);
                }
            }
            swaps += pass_swaps;
            ++passes_;
            if (config_.hooks.on_pass) {
                config_.hooks.on_pass({r + 1, x + 1, v + 1, reentry, pass_swaps, gamma});
            }
            const bool done = detail::ratio_converged(gamma[0], head_before, config_.precision);
            beta = gamma;
            if (done) {
                return gamma;
            }
        }
    }

    std::string diagnostic(const std::string& what, std::size_t r, std::size_t x, std::size_t v,
                           std::span<const double> biases = {}) const {
        std::ostringstream out;
        out.precision(17);
        out << what << " (round " << r + 1 << ", head " << x + 1 << ", sub-head " << v + 1;
        if (!biases.empty()) {
            out << ", biases";
            for (double b : biases) {
                out << ' ' << b;
            }
        }
        out << ')';
        return out.str();
    }

    const HbacConfig& config_;
    std::size_t n_;
    LimitMatrix targets_;
    LimitMatrix round_limits_;
    std::vector<double> dist_;
    std::uint64_t passes_ = 0;
    std::uint64_t invocations_ = 0;
};

/// Brings qubits head..n to their round-`round` limits (both 1-based), re-entering itself while the
/// head is short of its target or any lower qubit is short of its previous-round target and the
/// RL row still changes. Returns the number of pair exchanges performed, re-entries included.
///
/// Re-entries run from an explicit frame stack in the same order as nested calls would; each frame
/// keeps the alpha row it computed, so conditions are checked against that frame's snapshot.
inline std::uint64_t subspace_compression(CompressionState& state, std::size_t round, std::size_t head,
                                          bool reentry = false) {
    const std::size_t n = state.num_qubits();
    if (round < 1 || round > state.targets().rounds()) {
        throw std::out_of_range("round " + std::to_string(round) + " outside the configured rounds");
    }
    if (head < 1 || head + 1 > n) {
        throw std::out_of_range("subspace head " + std::to_string(head) + " outside 1.." + std::to_string(n - 1));
    }
    const std::size_t r = round - 1;
    const auto& targets = state.targets();

    struct Frame {
        std::size_t x;
        std::vector<double> alpha;
        bool changed;
        bool head_checked = false;
        std::size_t next_i;
    };

    std::uint64_t swaps = 0;
    std::vector<Frame> stack;
    auto enter = [&](std::size_t x, bool z) {
        auto outcome = state.run_pass(r, x, z, swaps);
        stack.push_back({x, std::move(outcome.alpha), outcome.changed, false, x + 1});
    };

    enter(head - 1, reentry);
    while (!stack.empty()) {
        Frame& frame = stack.back();
        if (!frame.changed) {
            stack.pop_back();
            continue;
        }
        if (!frame.head_checked) {
            frame.head_checked = true;
            if (frame.alpha[frame.x] < targets.at(r, frame.x)) {
                enter(frame.x, false);
                continue;
            }
        }
        bool descended = false;
        while (frame.next_i + 1 < n) {
            const std::size_t i = frame.next_i++;
            if (r > 0 && frame.alpha[i] < targets.at(r - 1, i)) {
                enter(i, true);
                descended = true;
                break;
            }
        }
        if (!descended) {
            stack.pop_back();
        }
    }
    return swaps;
}

/// Cools every qubit of the register to its round limits, round by round, counting pair exchanges.
inline CoolingReport register_compression(const HbacConfig& config) {
    CompressionState state(config);
    const std::size_t n = config.defaults.size();
    CoolingReport report;
    for (std::size_t r = 0; r < config.rounds; ++r) {
        std::uint64_t round_swaps = 0;
        for (std::size_t x = 0; x + r + 2 <= n - 1; ++x) {
            round_swaps += subspace_compression(state, r + 1, x + 1, false);
        }
        if (r + 1 < config.rounds) {
            auto src = state.round_limits().row(r);
            auto dst = state.round_limits().row(r + 1);
            std::copy(src.begin(), src.end(), dst.begin());
        }
        report.per_round_swaps.push_back(round_swaps);
        report.complexity += round_swaps;
    }
    report.round_limits = state.round_limits();
    report.targets = state.targets();
    report.passes = state.passes();
    report.invocations = state.invocations();
    return report;
}

struct SweepRow {
    std::size_t n;
    double epsilon;
    std::uint64_t complexity;
    std::uint64_t passes;
};

/// Complexity to reach the final-round limits (rounds = n-2) of an equal-bias register of size n.
inline SweepRow complexity_point(std::size_t n, double epsilon, double precision = kDefaultPrecision,
                                 CompressionMode mode = CompressionMode::full) {
    HbacConfig config(RegisterBiases::uniform(n, epsilon), n - 2);
    config.precision = precision;
    config.mode = mode;
    const auto report = register_compression(config);
    return {n, epsilon, report.complexity, report.passes};
}

inline std::vector<SweepRow> complexity_sweep(std::span<const std::size_t> sizes, double epsilon,
                                              double precision = kDefaultPrecision,
                                              CompressionMode mode = CompressionMode::full) {
    std::vector<SweepRow> rows;
    for (std::size_t n : sizes) {
        rows.push_back(complexity_point(n, epsilon, precision, mode));
    }
    return rows;
}

inline std::vector<SweepRow> complexity_sweep(std::size_t n, std::span<const double> epsilons,
                                              double precision = kDefaultPrecision,
                                              CompressionMode mode = CompressionMode::full) {
    std::vector<SweepRow> rows;
    for (double eps : epsilons) {
        rows.push_back(complexity_point(n, eps, precision, mode));
    }
    return rows;
}

struct GrowthFit {
    double rate;       // lambda in complexity ~ exp(lambda n)
    double intercept;
    double r_squared;
};

/// Least-squares line through (n, ln complexity). Rows with zero complexity are rejected.
inline GrowthFit fit_exponential_growth(std::span<const SweepRow> rows) {
    if (rows.size() < 2) {
        throw std::invalid_argument("growth fit needs at least two rows");
    }
    double sx = 0, sy = 0;
    for (const auto& row : rows) {
        if (row.complexity == 0) {
            throw std::invalid_argument("growth fit needs positive complexities");
        }
        sx += static_cast<double>(row.n);
        sy += std::log(static_cast<double>(row.complexity));
    }
    const double m = static_cast<double>(rows.size());
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& row : rows) {
        const double dx = static_cast<double>(row.n) - mx;
        const double dy = std::log(static_cast<double>(row.complexity)) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double rate = sxy / sxx;
    const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return {rate, my - rate * mx, r2};
}

}  // namespace hbac
