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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbac/errors.hpp"
#include "hbac/regstate.hpp"

namespace hbac {

/// Complementary pairs closer than this (relative to the larger entry) are treated as equal and never swapped.
inline constexpr double kTieTolerance = 1e-12;

/// Pair-grid cap for verify_optimality; the check is O(4^(n-1)).
inline constexpr std::size_t kDefaultVerifyMaxQubits = 14;

namespace detail {

/// Whether moving `hi` (1T member) into the slot holding `lo` (0T member) strictly helps.
constexpr bool beneficial(double lo, double hi) {
    return lo < hi && (hi - lo) > kTieTolerance * hi;
}

/// Applies Definition-1 exchanges in place over a raw 2^m distribution; returns the number performed.
inline std::uint64_t apply_optswaps_inplace(std::vector<double>& p) {
    const std::size_t size = p.size();
    std::uint64_t count = 0;
    for (std::size_t k = 0; k < size / 2; ++k) {
        const std::size_t c = size - 1 - k;
        if (beneficial(p[k], p[c])) {
            std::swap(p[k], p[c]);
            ++count;
        }
    }
    return count;
}

}  // namespace detail

/// Exchanges j <-> 2^n-1-j, each listed once by its 0T member j < 2^(n-1).
class SwapSet {
   public:
    SwapSet(std::size_t num_qubits, std::vector<std::uint64_t> indices)
        : n_(num_qubits), indices_(std::move(indices)) {
        if (n_ < 1 || n_ > 63) {
            throw std::invalid_argument("swap set qubit count must be in 1..63");
        }
        std::sort(indices_.begin(), indices_.end());
        indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
        const std::uint64_t half = std::uint64_t{1} << (n_ - 1);
        if (!indices_.empty() && indices_.back() >= half) {
            throw std::out_of_range("swap index " + std::to_string(indices_.back()) +
                                    " is not in the 0T half [0, " + std::to_string(half) + ")");
        }
    }

    std::size_t num_qubits() const { return n_; }
    std::uint64_t complement(std::uint64_t j) const { return ((std::uint64_t{1} << n_) - 1) ^ j; }
    std::span<const std::uint64_t> indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(std::uint64_t j) const { return std::binary_search(indices_.begin(), indices_.end(), j); }

    friend bool operator==(const SwapSet&, const SwapSet&) = default;

   private:
    std::size_t n_;
    std::vector<std::uint64_t> indices_;
};

inline SwapSet find_optswaps(const DiagDist& dist) {
    std::vector<std::uint64_t> picked;
    for (std::size_t k = 0; k < dist.half(); ++k) {
        if (detail::beneficial(dist[k], dist[dist.complement(k)])) {
            picked.push_back(k);
        }
    }
    return SwapSet(dist.num_qubits(), std::move(picked));
}

inline DiagDist apply_swaps(const DiagDist& dist, const SwapSet& swaps) {
    if (swaps.num_qubits() != dist.num_qubits()) {
        throw std::invalid_argument("swap set is for " + std::to_string(swaps.num_qubits()) +
                                    " qubits, distribution has " + std::to_string(dist.num_qubits()));
    }
    std::vector<double> p(dist.values().begin(), dist.values().end());
    for (std::uint64_t j : swaps.indices()) {
        std::swap(p[j], p[dist.complement(j)]);
    }
    return DiagDist(std::move(p));
}

/// Target-bias increase X_n = 2 * sum over swaps of (R_1T - R_0T).
inline double bias_gain(const DiagDist& dist, const SwapSet& swaps) {
    if (swaps.num_qubits() != dist.num_qubits()) {
        throw std::invalid_argument("swap set and distribution disagree on qubit count");
    }
    detail::CompensatedSum acc;
    for (std::uint64_t j : swaps.indices()) {
        acc.add(dist[dist.complement(j)]);
        acc.add(-dist[j]);
    }
    return 2.0 * acc.value();
}

struct Counterexample {
    int condition;  // 1, 2 or 3
    std::uint64_t k;
    std::uint64_t l;
    double magnitude;  // how far the inequality is violated
};

/// Outcome of the exhaustive optimality check. Conditions not applicable to the swap count stay empty.
struct OptimalityReport {
    std::uint64_t swaps_performed = 0;
    std::optional<bool> case1_passed;
    std::optional<bool> case2_passed;
    std::optional<bool> case3_passed;
    std::uint64_t violations = 0;
    std::vector<Counterexample> counterexamples;  // first kMaxRecorded, ordered by (k, l)

    static constexpr std::size_t kMaxRecorded = 64;

    bool all_passed() const {
        return case1_passed.value_or(true) && case2_passed.value_or(true) && case3_passed.value_or(true);
    }
};

/// Exhaustively checks that no non-complementary exchange beats the optswaps of `dist`.
///
/// With optswaps present, every performed swap k (gain v = p[~k] - p[k]) is compared against every
/// non-swapped l (condition 1: p[~l] - p[k] <= v) and every other performed swap l (condition 2:
/// p[~l] - p[k] <= v + v_l). Without optswaps, condition 3 requires p[k] >= p[~l] for all k, l
/// in the 0T half. The grid is 4^(n-1) comparisons, so n is capped at `max_qubits`.
inline OptimalityReport verify_optimality(const DiagDist& dist, std::size_t max_qubits = kDefaultVerifyMaxQubits) {
    detail::check_qubit_cap(dist.num_qubits(), max_qubits);
    const std::size_t half = dist.half();
    const auto p = dist.values();
    const std::size_t last = dist.size() - 1;

    std::vector<char> performed(half, 0);
    OptimalityReport report;
    for (std::size_t k = 0; k < half; ++k) {
        performed[k] = detail::beneficial(p[k], p[last - k]);
        report.swaps_performed += performed[k];
    }

    auto record = [&](int condition, std::size_t k, std::size_t l, double magnitude) {
        ++report.violations;
        if (report.counterexamples.size() < OptimalityReport::kMaxRecorded) {
            report.counterexamples.push_back({condition, k, l, magnitude});
        }
    };

    if (report.swaps_performed > 0) {
        bool ok1 = true;
        bool ok2 = true;
        for (std::size_t k = 0; k < half; ++k) {
            if (!performed[k]) {
                continue;
            }
            const double v = p[last - k] - p[k];
            for (std::size_t l = 0; l < half; ++l) {
                const double cross = p[last - l] - p[k];
                if (!performed[l]) {
                    const double excess = cross - v;
                    if (excess > kTieTolerance * std::max(p[last - l], p[last - k])) {
                        ok1 = false;
                        record(1, k, l, excess);
                    }
                } else if (l != k) {
                    const double excess = cross - (v + (p[last - l] - p[l]));
                    if (excess > kTieTolerance * std::max(p[last - l], p[last - k])) {
                        ok2 = false;
                        record(2, k, l, excess);
                    }
                }
            }
        }
        report.case1_passed = ok1;
        report.case2_passed = ok2;
    } else {
        bool ok3 = true;
        for (std::size_t k = 0; k < half; ++k) {
            for (std::size_t l = 0; l < half; ++l) {
                const double excess = p[last - l] - p[k];
                if (excess > kTieTolerance * p[last - l]) {
                    ok3 = false;
                    record(3, k, l, excess);
                }
            }
        }
        report.case3_passed = ok3;
    }
    return report;
}

}  // namespace hbac
