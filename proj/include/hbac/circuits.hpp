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
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hbac/compress.hpp"
#include "hbac/errors.hpp"
#include "hbac/regstate.hpp"

namespace hbac {

/// Enumerating a circuit's permutation is refused above this many wires.
inline constexpr std::size_t kDefaultPermutationMaxWires = 20;

struct Control {
    std::size_t wire;  // 1-based; wire 1 is the most significant bit of a basis index
    bool on_one;       // fires on |1> (true) or on |0> (false)

    friend bool operator==(const Control&, const Control&) = default;
};

/// Multi-controlled NOT with mixed-polarity controls. Zero controls is a plain NOT.
struct Gate {
    std::vector<Control> controls;
    std::size_t target;

    friend bool operator==(const Gate&, const Gate&) = default;
};

class Circuit {
   public:
    explicit Circuit(std::size_t wires) : wires_(wires) {
        if (wires < 1 || wires > 63) {
            throw std::invalid_argument("circuit wire count must be in 1..63");
        }
    }

    void append(Gate gate) {
        check_wire(gate.target);
        for (const auto& c : gate.controls) {
            check_wire(c.wire);
            if (c.wire == gate.target) {
                throw std::invalid_argument("gate target " + std::to_string(gate.target) + " is also a control");
            }
            for (const auto& other : gate.controls) {
                if (&other != &c && other.wire == c.wire) {
                    throw std::invalid_argument("duplicate control wire " + std::to_string(c.wire));
                }
            }
        }
        std::sort(gate.controls.begin(), gate.controls.end(),
                  [](const Control& a, const Control& b) { return a.wire < b.wire; });
        gates_.push_back(std::move(gate));
    }

    std::size_t wires() const { return wires_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }

    friend bool operator==(const Circuit&, const Circuit&) = default;

   private:
    void check_wire(std::size_t wire) const {
        if (wire < 1 || wire > wires_) {
            throw std::out_of_range("wire " + std::to_string(wire) + " outside 1.." + std::to_string(wires_));
        }
    }

    std::size_t wires_;
    std::vector<Gate> gates_;
};

namespace detail {

inline std::uint64_t wire_bit(std::size_t wires, std::size_t wire) {
    return std::uint64_t{1} << (wires - wire);
}

/// Appends the compute-flip-uncompute gate set exchanging |j> and |~j> (j in the 0T half).
inline void append_pair_exchange(Circuit& circuit, std::uint64_t j) {
    const std::size_t n = circuit.wires();
    // Stage (a): while wire 1 is |0>, complement wires 2..n. |j> then matches |~j> on wires 2..n.
    for (std::size_t w = 2; w <= n; ++w) {
        circuit.append({{{1, false}}, w});
    }
    // Stage (b): flip wire 1 on the shared pattern, which is ~j restricted to wires 2..n.
    Gate flip{{}, 1};
    const std::uint64_t partner = ((std::uint64_t{1} << n) - 1) ^ j;
    for (std::size_t w = 2; w <= n; ++w) {
        flip.controls.push_back({w, (partner & wire_bit(n, w)) != 0});
    }
    circuit.append(std::move(flip));
    // Stage (c): undo stage (a).
    for (std::size_t w = n; w >= 2; --w) {
        circuit.append({{{1, false}}, w});
    }
}

struct CompiledGate {
    std::uint64_t mask;
    std::uint64_t value;
    std::uint64_t flip;
};

inline std::vector<CompiledGate> compile(const Circuit& circuit) {
    std::vector<CompiledGate> out;
    out.reserve(circuit.size());
    for (const auto& gate : circuit.gates()) {
        CompiledGate g{0, 0, wire_bit(circuit.wires(), gate.target)};
        for (const auto& c : gate.controls) {
            const auto bit = wire_bit(circuit.wires(), c.wire);
            g.mask |= bit;
            if (c.on_one) {
                g.value |= bit;
            }
        }
        out.push_back(g);
    }
    return out;
}

}  // namespace detail

/// NB-MaxComp: one exchange gate set per swap, realizing the product of the transpositions j <-> ~j.
inline Circuit nb_maxcomp(const SwapSet& swaps) {
    Circuit circuit(swaps.num_qubits());
    for (std::uint64_t j : swaps.indices()) {
        detail::append_pair_exchange(circuit, j);
    }
    return circuit;
}

/// LIM-Comp: the single limiting exchange |011..1> <-> |100..0>.
inline Circuit lim_comp(std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("LIM-Comp needs at least two wires");
    }
    return nb_maxcomp(SwapSet(n, {(std::uint64_t{1} << (n - 1)) - 1}));
}

/// Gates in reverse order; every gate is its own inverse.
inline Circuit inverse(const Circuit& circuit) {
    Circuit out(circuit.wires());
    for (auto it = circuit.gates().rbegin(); it != circuit.gates().rend(); ++it) {
        out.append(*it);
    }
    return out;
}

/// Image of every basis index under the circuit, as a classical reversible map.
inline std::vector<std::uint64_t> circuit_permutation(const Circuit& circuit,
                                                      std::size_t max_wires = kDefaultPermutationMaxWires) {
    detail::check_qubit_cap(circuit.wires(), max_wires);
    const auto gates = detail::compile(circuit);
    std::vector<std::uint64_t> perm(std::size_t{1} << circuit.wires());
    for (std::uint64_t y = 0; y < perm.size(); ++y) {
        std::uint64_t state = y;
        for (const auto& g : gates) {
            if ((state & g.mask) == g.value) {
                state ^= g.flip;
            }
        }
        perm[y] = state;
    }
    return perm;
}

/// Moves probamp j to basis state circuit(j).
inline DiagDist apply_circuit(const DiagDist& dist, const Circuit& circuit) {
    if (circuit.wires() != dist.num_qubits()) {
        throw std::invalid_argument("circuit and distribution disagree on qubit count");
    }
    const auto perm = circuit_permutation(circuit, kDefaultMaxQubits);
    std::vector<double> out(dist.size());
    for (std::size_t j = 0; j < dist.size(); ++j) {
        out[perm[j]] = dist[j];
    }
    return DiagDist(std::move(out));
}

/// `WIRES <n>` then one `MCX t=<target> c0=[...] c1=[...]` line per gate, wires ascending and 1-based.
inline std::string export_text(const Circuit& circuit) {
    std::string out = "WIRES " + std::to_string(circuit.wires()) + "\n";
    auto list = [](const Gate& g, bool on_one) {
        std::string s = "[";
        bool first = true;
        for (const auto& c : g.controls) {
            if (c.on_one != on_one) {
                continue;
            }
            if (!first) {
                s += ',';
            }
            s += std::to_string(c.wire);
            first = false;
        }
        return s + "]";
    };
    for (const auto& g : circuit.gates()) {
        out += "MCX t=" + std::to_string(g.target) + " c0=" + list(g, false) + " c1=" + list(g, true) + "\n";
    }
    return out;
}

namespace detail {

inline std::size_t parse_wire(std::string_view token, std::size_t line) {
    if (token.empty() || token.size() > 3 || token.find_first_not_of("0123456789") != std::string_view::npos) {
        throw ParseError("line " + std::to_string(line) + ": bad wire '" + std::string(token) + "'");
    }
    return static_cast<std::size_t>(std::stoul(std::string(token)));
}

inline std::vector<std::size_t> parse_wire_list(std::string_view field, std::string_view key, std::size_t line) {
    if (field.substr(0, key.size()) != key || field.size() < key.size() + 2 || field[key.size()] != '[' ||
        field.back() != ']') {
        throw ParseError("line " + std::to_string(line) + ": expected " + std::string(key) + "[...]");
    }
    auto body = field.substr(key.size() + 1, field.size() - key.size() - 2);
    std::vector<std::size_t> wires;
    while (!body.empty()) {
        const auto comma = body.find(',');
        wires.push_back(parse_wire(body.substr(0, comma), line));
        if (comma == std::string_view::npos) {
            break;
        }
        body.remove_prefix(comma + 1);
        if (body.empty()) {
            throw ParseError("line " + std::to_string(line) + ": trailing comma");
        }
    }
    return wires;
}

}  // namespace detail

/// Reads the format written by export_text.
inline Circuit parse_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    std::optional<Circuit> circuit;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string head;
        fields >> head;
        if (!circuit) {
            std::string count;
            fields >> count;
            if (head != "WIRES" || count.empty()) {
                throw ParseError("line " + std::to_string(number) + ": expected 'WIRES <n>' header");
            }
            circuit.emplace(detail::parse_wire(count, number));
            continue;
        }
        std::string t, c0, c1, extra;
        fields >> t >> c0 >> c1;
        if (head != "MCX" || t.rfind("t=", 0) != 0 || (fields >> extra)) {
            throw ParseError("line " + std::to_string(number) + ": expected 'MCX t=<w> c0=[..] c1=[..]'");
        }
        Gate gate{{}, detail::parse_wire(std::string_view(t).substr(2), number)};
        for (auto w : detail::parse_wire_list(c0, "c0=", number)) {
            gate.controls.push_back({w, false});
        }
        for (auto w : detail::parse_wire_list(c1, "c1=", number)) {
            gate.controls.push_back({w, true});
        }
        try {
            circuit->append(std::move(gate));
        } catch (const std::logic_error& e) {
            throw ParseError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    if (!circuit) {
        throw ParseError("missing 'WIRES <n>' header");
    }
    return std::move(*circuit);
}

}  // namespace hbac
