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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hbac/hbac.hpp"
#include "json.hpp"

namespace hbac::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kResource = 3,
    kNonConvergence = 4,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed command line for one invocation.
struct RunSpec {
    std::string command;
    std::optional<std::string> biases;
    std::optional<std::size_t> n;
    std::optional<double> epsilon;
    std::optional<std::size_t> rounds;
    double precision = kDefaultPrecision;
    std::string mode = "full";
    bool verify = false;
    bool analytic = false;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::size_t target = 1;
    std::optional<std::size_t> lim;
    bool from_biases = false;
    std::optional<std::string> ns;
    std::optional<std::string> epsilons;
    std::optional<std::size_t> qubit;
    std::uint64_t max_iterations = kDefaultMaxIterations;
};

struct CommandResult {
    int exit_code = kOk;
    std::string output;
    std::string error;
};

namespace detail {

using nlohmann::json;

inline double parse_real(const std::string& token) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + token + "'");
    }
    if (used != token.size()) {
        throw UsageError("not a number: '" + token + "'");
    }
    return value;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        parts.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    if (parts.empty() || (!text.empty() && text.back() == sep)) {
        parts.emplace_back();
    }
    return parts;
}

inline std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> values;
    for (const auto& token : split(text, ',')) {
        if (token.empty()) {
            throw UsageError("empty entry in list '" + text + "'");
        }
        values.push_back(parse_real(token));
    }
    return values;
}

/// Accepts `3,4,5` or the inclusive range `3:7`.
inline std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> values;
    auto to_size = [&](const std::string& token) {
        if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
            throw UsageError("not a register size: '" + token + "'");
        }
        return static_cast<std::size_t>(std::stoul(token));
    };
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        const auto lo = to_size(text.substr(0, colon));
        const auto hi = to_size(text.substr(colon + 1));
        if (lo > hi) {
            throw UsageError("empty range '" + text + "'");
        }
        for (auto v = lo; v <= hi; ++v) {
            values.push_back(v);
        }
        return values;
    }
    for (const auto& token : split(text, ',')) {
        values.push_back(to_size(token));
    }
    return values;
}

inline RegisterBiases resolve_biases(const RunSpec& spec) {
    const bool shorthand = spec.n.has_value() || spec.epsilon.has_value();
    if (spec.biases && shorthand) {
        throw UsageError("--biases and --n/--epsilon are mutually exclusive");
    }
    try {
        if (spec.biases) {
            return RegisterBiases(parse_real_list(*spec.biases));
        }
        if (spec.n && spec.epsilon) {
            if (*spec.n > kDefaultMaxQubits) {
                throw ResourceError("register of " + std::to_string(*spec.n) + " qubits exceeds the cap of " +
                                    std::to_string(kDefaultMaxQubits));
            }
            return RegisterBiases::uniform(*spec.n, *spec.epsilon);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    throw UsageError("give either --biases or both --n and --epsilon");
}

inline std::string format_of(const RunSpec& spec, const char* fallback) {
    const std::string f = spec.format.value_or(fallback);
    if (f != "json" && f != "csv") {
        throw UsageError("--format must be json or csv");
    }
    return f;
}

inline CompressionMode mode_of(const RunSpec& spec) {
    if (spec.mode == "full") {
        return CompressionMode::full;
    }
    if (spec.mode == "lim") {
        return CompressionMode::lim;
    }
    throw UsageError("--mode must be full or lim");
}

inline std::string real_text(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string bits(std::uint64_t value, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) {
        if (value & (std::uint64_t{1} << (n - 1 - i))) {
            s[i] = '1';
        }
    }
    return s;
}

inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

inline json matrix_json(const LimitMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rounds(); ++r) {
        auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

inline std::string matrix_csv(const LimitMatrix& m, const LimitMatrix* targets = nullptr) {
    std::string out = targets ? "round,qubit,limit,target\n" : "round,qubit,limit\n";
    for (std::size_t r = 0; r < m.rounds(); ++r) {
        for (std::size_t k = 0; k < m.qubits(); ++k) {
            out += std::to_string(r + 1) + "," + std::to_string(k + 1) + "," + real_text(m.at(r, k));
            if (targets) {
                out += "," + real_text(targets->at(r, k));
            }
            out += "\n";
        }
    }
    return out;
}

inline std::size_t rounds_of(const RunSpec& spec, std::size_t n) {
    if (n < 3) {
        throw UsageError("limiting rounds need at least 3 qubits");
    }
    const std::size_t rounds = spec.rounds.value_or(n - 2);
    if (rounds < 1 || rounds > n - 2) {
        throw UsageError("--rounds must be in 1.." + std::to_string(n - 2));
    }
    return rounds;
}

inline std::string cmd_optswaps(const RunSpec& spec) {
    const auto reg = resolve_biases(spec).with_target(spec.target);
    const auto dist = probamps(reg);
    const auto swaps = find_optswaps(dist);
    const double gain = bias_gain(dist, swaps);
    const std::size_t n = reg.size();
    const double initial = reg[0].value();
    const double final_bias = marginal_bias(apply_swaps(dist, swaps), 1);

    std::optional<OptimalityReport> verification;
    if (spec.verify) {
        verification = verify_optimality(dist);
    }

    if (format_of(spec, "json") == "csv") {
        std::string out = "index,partner,index_bits,partner_bits\n";
        for (auto j : swaps.indices()) {
            out += std::to_string(j) + "," + std::to_string(swaps.complement(j)) + "," + bits(j, n) + "," +
                   bits(swaps.complement(j), n) + "\n";
        }
        return out;
    }

    json doc;
    doc["schema"] = 1;
    doc["command"] = "optswaps";
    doc["n"] = n;
    doc["target_qubit"] = spec.target;
    doc["biases"] = std::vector<double>(reg.values().begin(), reg.values().end());
    json list = json::array();
    for (auto j : swaps.indices()) {
        list.push_back({{"index", j},
                        {"partner", swaps.complement(j)},
                        {"index_bits", bits(j, n)},
                        {"partner_bits", bits(swaps.complement(j), n)}});
    }
    doc["swaps"] = std::move(list);
    doc["swap_count"] = swaps.size();
    doc["gain"] = gain;
    doc["initial_target_bias"] = initial;
    doc["final_target_bias"] = final_bias;
    if (verification) {
        auto opt = [](const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); };
        json ce = json::array();
        for (const auto& c : verification->counterexamples) {
            ce.push_back({{"condition", c.condition}, {"k", c.k}, {"l", c.l}, {"magnitude", c.magnitude}});
        }
        doc["verification"] = {{"swaps_performed", verification->swaps_performed},
                               {"case1_passed", opt(verification->case1_passed)},
                               {"case2_passed", opt(verification->case2_passed)},
                               {"case3_passed", opt(verification->case3_passed)},
                               {"violations", verification->violations},
                               {"counterexamples", std::move(ce)},
                               {"optimal", verification->all_passed()}};
    }
    return dump(doc);
}

inline std::string cmd_limits(const RunSpec& spec) {
    const auto reg = resolve_biases(spec);
    const std::size_t n = reg.size();
    const std::size_t rounds = rounds_of(spec, n);
    const std::string format = format_of(spec, "json");

    LimitMatrix limits;
    if (spec.analytic) {
        const auto values = reg.values();
        for (double v : values) {
            if (v != values[0]) {
                throw UsageError("--analytic needs equal default biases");
            }
        }
        limits = LimitMatrix(rounds, n);
        for (std::size_t r = 1; r <= rounds; ++r) {
            for (std::size_t k = 1; k <= n; ++k) {
                limits.at(r - 1, k - 1) = analytic_limit(r, k, n, reg[0]);
            }
        }
    } else {
        if (!(spec.precision > 0.0)) {
            throw UsageError("--precision must be positive");
        }
        limits = numerical_limits(reg, rounds, spec.precision, spec.max_iterations);
    }

    if (format == "csv") {
        return matrix_csv(limits);
    }
    json doc;
    doc["schema"] = 1;
    doc["command"] = "limits";
    doc["method"] = spec.analytic ? "analytic" : "numerical";
    doc["n"] = n;
    doc["rounds"] = rounds;
    if (!spec.analytic) {
        doc["precision"] = spec.precision;
    }
    doc["biases"] = std::vector<double>(reg.values().begin(), reg.values().end());
    doc["limits"] = matrix_json(limits);
    return dump(doc);
}

inline std::string cmd_cool(const RunSpec& spec) {
    const auto reg = resolve_biases(spec);
    const std::size_t n = reg.size();
    HbacConfig config(reg, rounds_of(spec, n));
    config.precision = spec.precision;
    config.mode = mode_of(spec);
    config.max_iterations = spec.max_iterations;
    if (!(config.precision > 0.0)) {
        throw UsageError("--precision must be positive");
    }
    const auto report = register_compression(config);

    if (format_of(spec, "json") == "csv") {
        return matrix_csv(report.round_limits, &report.targets);
    }
    json doc;
    doc["schema"] = 1;
    doc["command"] = "cool";
    doc["n"] = n;
    doc["rounds"] = config.rounds;
    doc["precision"] = config.precision;
    doc["mode"] = spec.mode;
    doc["biases"] = std::vector<double>(reg.values().begin(), reg.values().end());
    doc["complexity"] = report.complexity;
    doc["per_round_swaps"] = report.per_round_swaps;
    doc["passes"] = report.passes;
    doc["invocations"] = report.invocations;
    doc["round_limits"] = matrix_json(report.round_limits);
    doc["targets"] = matrix_json(report.targets);
    return dump(doc);
}

inline std::string cmd_circuit(const RunSpec& spec) {
    if (spec.lim.has_value() == spec.from_biases) {
        throw UsageError("give exactly one of --lim N or --from-biases");
    }
    if (spec.lim) {
        if (*spec.lim > kDefaultMaxQubits) {
            throw ResourceError("LIM-Comp of " + std::to_string(*spec.lim) + " wires exceeds the cap");
        }
        try {
            return export_text(lim_comp(*spec.lim));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    const auto reg = resolve_biases(spec).with_target(spec.target);
    return export_text(nb_maxcomp(find_optswaps(probamps(reg))));
}

inline std::string cmd_sweep(const RunSpec& spec) {
    if (!spec.ns) {
        throw UsageError("sweep needs --ns (e.g. 3:7 or 3,4,5)");
    }
    if (spec.epsilon && spec.epsilons) {
        throw UsageError("--epsilon and --epsilons are mutually exclusive");
    }
    const auto sizes = parse_size_list(*spec.ns);
    std::vector<double> epsilons;
    if (spec.epsilons) {
        epsilons = parse_real_list(*spec.epsilons);
    } else if (spec.epsilon) {
        epsilons = {*spec.epsilon};
    } else {
        throw UsageError("sweep needs --epsilon or --epsilons");
    }
    const auto mode = mode_of(spec);
    std::vector<SweepRow> rows;
    for (auto n : sizes) {
        if (n < 3) {
            throw UsageError("sweep sizes must be at least 3");
        }
        if (n > kDefaultMaxQubits) {
            throw ResourceError("sweep size " + std::to_string(n) + " exceeds the cap");
        }
        for (double eps : epsilons) {
            (void)Bias(eps);
            HbacConfig config(RegisterBiases::uniform(n, eps), n - 2);
            config.precision = spec.precision;
            config.mode = mode;
            config.max_iterations = spec.max_iterations;
            const auto report = register_compression(config);
            rows.push_back({n, eps, report.complexity, report.passes});
        }
    }
    if (format_of(spec, "csv") == "csv") {
        std::string out = "n,epsilon,complexity,passes\n";
        for (const auto& row : rows) {
            out += std::to_string(row.n) + "," + real_text(row.epsilon) + "," + std::to_string(row.complexity) +
                   "," + std::to_string(row.passes) + "\n";
        }
        return out;
    }
    json doc;
    doc["schema"] = 1;
    doc["command"] = "sweep";
    doc["precision"] = spec.precision;
    doc["mode"] = spec.mode;
    json list = json::array();
    for (const auto& row : rows) {
        list.push_back({{"n", row.n}, {"epsilon", row.epsilon}, {"complexity", row.complexity}, {"passes", row.passes}});
    }
    doc["rows"] = std::move(list);
    return dump(doc);
}

inline std::string cmd_bounds(const RunSpec& spec) {
    if (!spec.n || !spec.epsilon) {
        throw UsageError("bounds needs --n and --epsilon");
    }
    const std::size_t n = *spec.n;
    const Bias eps(*spec.epsilon);
    json doc;
    doc["schema"] = 1;
    doc["command"] = "bounds";
    doc["n"] = n;
    doc["epsilon"] = eps.value();
    doc["shannon_bound"] = shannon_bound(n, eps);
    doc["sqrt_bound"] = sqrt_bound(n, eps);
    if (n >= 3) {
        const std::size_t r = spec.rounds.value_or(n - 2);
        const std::size_t k = spec.qubit.value_or(1);
        doc["round"] = r;
        doc["qubit"] = k;
        doc["analytic_limit"] = analytic_limit(r, k, n, eps);
    } else {
        doc["analytic_limit"] = nullptr;
    }
    return dump(doc);
}

}  // namespace detail

/// Runs one parsed command, mapping failures onto exit codes.
inline CommandResult run_command(const RunSpec& spec) {
    CommandResult result;
    try {
        if (spec.command == "optswaps") {
            result.output = detail::cmd_optswaps(spec);
        } else if (spec.command == "limits") {
            result.output = detail::cmd_limits(spec);
        } else if (spec.command == "cool") {
            result.output = detail::cmd_cool(spec);
        } else if (spec.command == "circuit") {
            result.output = detail::cmd_circuit(spec);
        } else if (spec.command == "sweep") {
            result.output = detail::cmd_sweep(spec);
        } else if (spec.command == "bounds") {
            result.output = detail::cmd_bounds(spec);
        } else {
            throw UsageError("unknown command '" + spec.command + "'");
        }
    } catch (const ResourceError& e) {
        result = {kResource, "", e.what()};
    } catch (const DivergenceError& e) {
        result = {kNonConvergence, "", e.what()};
    } catch (const UsageError& e) {
        result = {kUsage, "", e.what()};
    } catch (const ParseError& e) {
        result = {kUsage, "", e.what()};
    } catch (const std::logic_error& e) {
        result = {kUsage, "", e.what()};
    }
    return result;
}

inline constexpr const char* kCsvColumns =
    "CSV columns:\n"
    "  optswaps  index,partner,index_bits,partner_bits\n"
    "  limits    round,qubit,limit\n"
    "  cool      round,qubit,limit,target\n"
    "  sweep     n,epsilon,complexity,passes\n"
    "Exit codes: 0 ok, 2 usage/parse, 3 size cap, 4 non-convergence.";

/// Parses argv, runs the command and writes its output (to --out when given).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal entropy compression and heat-bath algorithmic cooling of qubit registers", "hbac"};
    app.footer(kCsvColumns);
    app.require_subcommand(1);
    RunSpec spec;

    auto add_register = [&](CLI::App* sub) {
        auto* b = sub->add_option("--biases", spec.biases, "Comma-separated default biases, qubit 1 first");
        auto* n = sub->add_option("--n", spec.n, "Register size (with --epsilon)");
        sub->add_option("--epsilon", spec.epsilon, "Equal default bias (with --n)");
        b->excludes(n);
    };
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", spec.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", spec.out, "Write output to PATH instead of stdout");
    };

    auto* optswaps = app.add_subcommand("optswaps", "Optimal swaps for one target qubit");
    add_register(optswaps);
    add_common(optswaps);
    optswaps->add_option("--target", spec.target, "Qubit to cool (1-based)");
    optswaps->add_flag("--verify", spec.verify, "Exhaustively check optimality of the swaps");

    auto* limits = app.add_subcommand("limits", "Per-round cooling limits");
    add_register(limits);
    add_common(limits);
    limits->add_option("--rounds", spec.rounds, "Limiting rounds (default n-2)");
    limits->add_option("--max-iterations", spec.max_iterations, "Cap on fixed-point iterations per qubit");
    limits->add_option("--precision", spec.precision, "Convergence precision of the purity-increase ratio");
    limits->add_flag("--analytic", spec.analytic, "Closed-form limits (equal biases only)");

    auto* cool = app.add_subcommand("cool", "Full register compression with heat-bath resets");
    add_register(cool);
    add_common(cool);
    cool->add_option("--rounds", spec.rounds, "Limiting rounds (default n-2)");
    cool->add_option("--max-iterations", spec.max_iterations, "Cap on fixed-point iterations per qubit");
    cool->add_option("--precision", spec.precision, "Convergence precision of the purity-increase ratio");
    cool->add_option("--mode", spec.mode, "full (all optswaps) or lim (limiting swap only)")
        ->check(CLI::IsMember({"full", "lim"}));

    auto* circuit = app.add_subcommand("circuit", "Emit an NB-MaxComp or LIM-Comp circuit (.nbmc text)");
    add_register(circuit);
    circuit->add_option("--out", spec.out, "Write the circuit to PATH");
    circuit->add_option("--target", spec.target, "Qubit to cool (1-based)");
    circuit->add_option("--lim", spec.lim, "LIM-Comp on N wires");
    circuit->add_flag("--from-biases", spec.from_biases, "NB-MaxComp of the optswaps of the given register");

    auto* sweep = app.add_subcommand("sweep", "Complexity of reaching the final-round limits");
    add_common(sweep);
    sweep->add_option("--ns", spec.ns, "Register sizes: 3:7 or 3,4,5");
    sweep->add_option("--epsilon", spec.epsilon, "Equal default bias");
    sweep->add_option("--epsilons", spec.epsilons, "Comma-separated default biases");
    sweep->add_option("--max-iterations", spec.max_iterations, "Cap on fixed-point iterations per qubit");
    sweep->add_option("--precision", spec.precision, "Convergence precision");
    sweep->add_option("--mode", spec.mode, "full or lim")->check(CLI::IsMember({"full", "lim"}));

    auto* bounds = app.add_subcommand("bounds", "Closed-system bounds and the analytic limit");
    bounds->add_option("--n", spec.n, "Register size")->required();
    bounds->add_option("--epsilon", spec.epsilon, "Default bias")->required();
    bounds->add_option("--rounds", spec.rounds, "Round for the analytic limit (default n-2)");
    bounds->add_option("--qubit", spec.qubit, "Qubit for the analytic limit (default 1)");
    add_common(bounds);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    for (auto* sub : app.get_subcommands()) {
        spec.command = sub->get_name();
    }

    const auto result = run_command(spec);
    if (result.exit_code != kOk) {
        err << "error: " << result.error << "\n";
        return result.exit_code;
    }
    if (spec.out) {
        std::ofstream file(*spec.out, std::ios::binary);
        if (!file) {
            err << "error: cannot write " << *spec.out << "\n";
            return kUsage;
        }
        file << result.output;
    } else {
        out << result.output;
    }
    return kOk;
}

}  // namespace hbac::cli
