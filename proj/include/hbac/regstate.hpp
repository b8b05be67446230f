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

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hbac/errors.hpp"

namespace hbac {

/// Full 2^n materialization is refused above this many qubits unless the caller raises the cap.
inline constexpr std::size_t kDefaultMaxQubits = 26;

/// Allowed deviation of a distribution's total from 1.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Polarization of one qubit toward |0>, diag((1+e)/2, (1-e)/2).
class Bias {
   public:
    constexpr Bias() = default;
    explicit Bias(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw std::invalid_argument("bias must lie in [0, 1], got " + std::to_string(value));
        }
    }

    constexpr double value() const { return value_; }
    constexpr double plus() const { return (1.0 + value_) / 2.0; }
    constexpr double minus() const { return (1.0 - value_) / 2.0; }

    friend constexpr bool operator==(Bias, Bias) = default;

   private:
    double value_ = 0.0;
};

/// Per-qubit biases of a product state. Position 0 is qubit 1, the most significant bit of a basis index.
class RegisterBiases {
   public:
    explicit RegisterBiases(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) {
            throw std::invalid_argument("a register needs at least one qubit");
        }
        for (double v : values_) {
            (void)Bias(v);
        }
    }

    static RegisterBiases uniform(std::size_t n, double epsilon) {
        return RegisterBiases(std::vector<double>(n, epsilon));
    }

    std::size_t size() const { return values_.size(); }
    Bias operator[](std::size_t index) const { return Bias(values_.at(index)); }
    std::span<const double> values() const { return values_; }

    /// Exchange qubit 1 and qubit `m` (1-based) so that qubit m becomes the compression target.
    RegisterBiases with_target(std::size_t m) const {
        if (m < 1 || m > values_.size()) {
            throw std::out_of_range("target qubit " + std::to_string(m) + " outside 1.." +
                                    std::to_string(values_.size()));
        }
        auto copy = values_;
        std::swap(copy[0], copy[m - 1]);
        return RegisterBiases(std::move(copy));
    }

    friend bool operator==(const RegisterBiases&, const RegisterBiases&) = default;

   private:
    std::vector<double> values_;
};

/// Diagonal of an n-qubit density matrix, indexed by basis state.
class DiagDist {
   public:
    explicit DiagDist(std::vector<double> probamps) : p_(std::move(probamps)) {
        if (p_.size() < 2 || !std::has_single_bit(p_.size())) {
            throw std::invalid_argument("distribution length must be 2^n with n >= 1");
        }
        n_ = static_cast<std::size_t>(std::countr_zero(p_.size()));
        double total = 0.0;
        for (double x : p_) {
            if (!(x >= 0.0) || !std::isfinite(x)) {
                throw std::invalid_argument("probamps must be finite and non-negative");
            }
            total += x;
        }
        if (std::abs(total - 1.0) > kNormalizationTolerance) {
            throw std::invalid_argument("probamps must sum to 1, got " + std::to_string(total));
        }
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t size() const { return p_.size(); }
    std::size_t half() const { return p_.size() / 2; }
    std::size_t complement(std::size_t j) const { return p_.size() - 1 - j; }
    double operator[](std::size_t j) const { return p_[j]; }
    std::span<const double> values() const { return p_; }

    friend bool operator==(const DiagDist&, const DiagDist&) = default;

   private:
    std::vector<double> p_;
    std::size_t n_ = 0;
};

namespace detail {

/// Mask selecting qubit `qubit` (1-based, MSB first) in an n-qubit basis index.
constexpr std::uint64_t qubit_mask(std::size_t n, std::size_t qubit) {
    return std::uint64_t{1} << (n - qubit);
}

/// Writes the product distribution of `biases` into `out`; entry products are formed in qubit order 1..n.
inline void product_distribution(std::span<const double> biases, std::vector<double>& out) {
    out.assign(std::size_t{1} << biases.size(), 0.0);
    out[0] = 1.0;
    std::size_t filled = 1;
    for (double e : biases) {
        const double plus = (1.0 + e) / 2.0;
        const double minus = (1.0 - e) / 2.0;
        for (std::size_t idx = filled; idx-- > 0;) {
            const double base = out[idx];
            out[2 * idx + 1] = base * minus;
            out[2 * idx] = base * plus;
        }
        filled *= 2;
    }
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
   public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

   private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Sum of +p[j] over entries with (j & mask) == 0 and -p[j] otherwise.
inline double signed_mask_sum(std::span<const double> p, std::uint64_t mask) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < p.size(); ++j) {
        acc.add((j & mask) ? -p[j] : p[j]);
    }
    return acc.value();
}

/// Bias of the most significant qubit of a raw 2^m distribution.
inline double head_marginal(std::span<const double> p) {
    return signed_mask_sum(p, p.size() / 2);
}

inline void check_qubit_cap(std::size_t n, std::size_t max_qubits) {
    if (n > max_qubits) {
        throw ResourceError("register of " + std::to_string(n) + " qubits exceeds the cap of " +
                            std::to_string(max_qubits));
    }
}

}  // namespace detail

/// Diagonal of the product state: entry j multiplies plus(e_i) for each 0 bit and minus(e_i) for each 1 bit.
inline DiagDist probamps(const RegisterBiases& reg, std::size_t max_qubits = kDefaultMaxQubits) {
    detail::check_qubit_cap(reg.size(), max_qubits);
    std::vector<double> out;
    detail::product_distribution(reg.values(), out);
    return DiagDist(std::move(out));
}

/// Population difference of qubit `qubit` (1-based). Not clamped; swapped states can go negative.
inline double marginal_bias(const DiagDist& dist, std::size_t qubit) {
    const std::size_t n = dist.num_qubits();
    if (qubit < 1 || qubit > n) {
        throw std::out_of_range("qubit " + std::to_string(qubit) + " outside 1.." + std::to_string(n));
    }
    return detail::signed_mask_sum(dist.values(), detail::qubit_mask(n, qubit));
}

inline std::vector<double> marginal_register(const DiagDist& dist) {
    std::vector<double> out(dist.num_qubits());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = marginal_bias(dist, i + 1);
    }
    return out;
}

}  // namespace hbac
