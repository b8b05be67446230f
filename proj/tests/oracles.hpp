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

// Slow, direct reference implementations used to cross-check the library. None of these share code
// with include/hbac beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hbac/circuits.hpp"

namespace hbac::oracle {

/// Binary string of `j` on `n` characters, qubit 1 first.
inline std::string bit_string(std::uint64_t j, std::size_t n) {
    std::string s;
    for (std::size_t q = 0; q < n; ++q) {
        s.push_back(((j >> (n - 1 - q)) & 1U) ? '1' : '0');
    }
    return s;
}

/// Product of per-qubit populations read off the bit string of every basis index.
inline std::vector<double> probamps(const std::vector<double>& biases) {
    const std::size_t n = biases.size();
    std::vector<double> p(std::size_t{1} << n);
    for (std::uint64_t j = 0; j < p.size(); ++j) {
        const std::string s = bit_string(j, n);
        double v = 1.0;
        for (std::size_t q = 0; q < n; ++q) {
            v *= s[q] == '0' ? (1.0 + biases[q]) / 2.0 : (1.0 - biases[q]) / 2.0;
        }
        p[j] = v;
    }
    return p;
}

/// Marginal bias of qubit i (1-based) as alternating block sums: blocks of 2^(n-i) entries, even blocks
/// count as |0>, odd blocks as |1>.
inline double marginal(const std::vector<double>& p, std::size_t i) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < p.size()) {
        ++n;
    }
    const std::size_t block = std::size_t{1} << (n - i);
    long double zero = 0, one = 0;
    for (std::size_t b = 0; b * block < p.size(); ++b) {
        long double s = 0;
        for (std::size_t t = 0; t < block; ++t) {
            s += p[b * block + t];
        }
        (b % 2 == 0 ? zero : one) += s;
    }
    return static_cast<double>(zero - one);
}

/// Largest-half minus smallest-half of the sorted entries, summed in long double.
inline double sorted_half_gap(std::vector<double> p) {
    std::sort(p.begin(), p.end(), std::greater<>());
    long double top = 0, bottom = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        (j < p.size() / 2 ? top : bottom) += p[j];
    }
    return static_cast<double>(top - bottom);
}

/// Runs each basis state through the gates as an explicit wire array.
inline std::vector<std::uint64_t> simulate(const Circuit& c) {
    const std::size_t n = c.wires();
    std::vector<std::uint64_t> perm(std::size_t{1} << n);
    for (std::uint64_t j = 0; j < perm.size(); ++j) {
        std::vector<int> wire(n + 1, 0);
        for (std::size_t w = 1; w <= n; ++w) {
            wire[w] = static_cast<int>((j >> (n - w)) & 1U);
        }
        for (const auto& g : c.gates()) {
            bool fire = true;
            for (const auto& ctl : g.controls) {
                fire = fire && (wire[ctl.wire] == (ctl.on_one ? 1 : 0));
            }
            if (fire) {
                wire[g.target] ^= 1;
            }
        }
        std::uint64_t out = 0;
        for (std::size_t w = 1; w <= n; ++w) {
            out = (out << 1) | static_cast<std::uint64_t>(wire[w]);
        }
        perm[j] = out;
    }
    return perm;
}

/// Identity permutation with the given index pairs exchanged.
inline std::vector<std::uint64_t> transpositions(std::size_t n, const std::vector<std::uint64_t>& lows) {
    std::vector<std::uint64_t> perm(std::size_t{1} << n);
    for (std::uint64_t j = 0; j < perm.size(); ++j) {
        perm[j] = j;
    }
    for (auto j : lows) {
        const std::uint64_t partner = perm.size() - 1 - j;
        perm[j] = partner;
        perm[partner] = j;
    }
    return perm;
}

/// Limiting-swap fixed point by bisection on g(x) = plus(x) minus(e)^m - minus(x) plus(e)^m.
inline double single_round_fixed_point(double e, unsigned m) {
    const long double ep = (1.0L + e) / 2, em = (1.0L - e) / 2;
    auto g = [&](long double x) {
        return (1 + x) / 2 * std::pow(em, static_cast<long double>(m)) -
               (1 - x) / 2 * std::pow(ep, static_cast<long double>(m));
    };
    long double lo = 0, hi = 1;
    for (int it = 0; it < 200; ++it) {
        const long double mid = (lo + hi) / 2;
        (g(mid) < 0 ? lo : hi) = mid;
    }
    return static_cast<double>((lo + hi) / 2);
}

/// Round exponent written as the plain recursion, no tabulation.
inline std::uint64_t exponent(std::size_t r, std::size_t k, std::size_t n) {
    if (r == 1) {
        return k < n - 1 ? n - k : 1;
    }
    if (k >= n - r) {
        return exponent(r - 1, k, n);
    }
    std::uint64_t f = 2;
    for (std::size_t i = k + 1; i <= n - r; ++i) {
        f += exponent(r - 1, i, n);
    }
    if (r > 2) {
        for (std::size_t j = 1; j <= r - 2; ++j) {
            f += exponent(j, n - j - 1, n);
        }
    }
    return f;
}

/// Iterates the three-qubit limiting swap with both ancillas reset to `e` after every compression.
inline double three_qubit_cooling_limit(double e, double precision = 1e-15) {
    double target = e;
    for (int it = 0; it < 1'000'000; ++it) {
        auto p = probamps({target, e, e});
        std::swap(p[3], p[4]);
        const double next = marginal(p, 1);
        if (std::fabs(next - target) <= precision) {
            return next;
        }
        target = next;
    }
    return target;
}

}  // namespace hbac::oracle
