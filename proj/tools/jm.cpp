// Copyright 2026 The jointmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jointmeas/verify.hpp"

using namespace jointmeas;

namespace {

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + out + "'");
    f << text;
}

std::string render_verify(const nlohmann::json& rep, OutputFormat fmt) {
    if (fmt == OutputFormat::kJson) return rep.dump(2) + "\n";
    std::ostringstream os;
    if (fmt == OutputFormat::kCsv) os << "criterion,name,passed,metric,threshold\n";
    for (const auto& c : rep["checks"]) {
        const bool ok = c["passed"].get<bool>();
        if (fmt == OutputFormat::kCsv) {
            os << c["criterion"].get<int>() << ',' << c["name"].get<std::string>() << ',' << (ok ? "true" : "false")
               << ',' << format_double(c["metric"].get<double>()) << ','
               << format_double(c["threshold"].get<double>()) << '\n';
        } else {
            os << (ok ? "PASS" : "FAIL") << "  [" << c["criterion"].get<int>() << "] "
               << c["name"].get<std::string>() << ": " << c["detail"].get<std::string>() << '\n';
        }
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint measurement of Majorana observables: verification, estimation and variance tables"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string scheme = "physical4", coeffs = "opt", blocks = "auto", state = "ground", format, out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
        sub->add_option("--out", out, "Output path (default stdout)");
        sub->add_option("--format", format, "Output format: json|csv|text");
    };
    auto add_family = [&](CLI::App* sub) {
        sub->add_option("--scheme", scheme, "Setting family: pairs2|quad7|rand9|physical4")->capture_default_str();
        sub->add_option("--blocks", blocks, "Flat block family: hadamard|aij|auto")->capture_default_str();
        sub->add_option("--partitions", cfg.random_count, "Number of random partitions for rand9")->capture_default_str();
    };

    auto* verify = app.add_subcommand("verify", "Run the verification suites");
    add_common(verify);
    verify->add_option("--criteria", cfg.criteria, "Criteria to run (default all)");
    verify->add_option("--max-modes", cfg.verify_max_modes, "Largest N used by enumeration suites")->capture_default_str();
    verify->add_option("--data-dir", cfg.data_dir, "Directory with the vendored Hamiltonians");
    verify->add_option("--threads", cfg.threads, "Worker threads (default JM_THREADS or all cores)");
    bool flip = false;
    verify->add_flag("--test-flip-pfaffian-sign", flip, "Test hook: negate every Pfaffian ground truth");

    auto* estimate = app.add_subcommand("estimate", "Estimate an energy by Monte Carlo");
    add_common(estimate);
    add_family(estimate);
    std::string hamiltonian;
    estimate->add_option("--hamiltonian", hamiltonian, "Hamiltonian file")->required();
    estimate->add_option("--shots", cfg.shots, "Samples; each uses one state copy per round")->capture_default_str();
    estimate->add_option("--coeffs", coeffs, "Coefficients: uniform|opt")->capture_default_str();
    estimate->add_option("--state", state, "State source: ground|gaussian|fock")->capture_default_str();
    estimate->add_option("--occupations", cfg.occupations, "Fock occupations for --state fock");
    estimate->add_option("--epsilon", cfg.epsilon, "Target accuracy for the shot budget")->capture_default_str();
    estimate->add_option("--delta", cfg.delta, "Failure probability for the shot budget")->capture_default_str();
    estimate->add_option("--threads", cfg.threads, "Worker threads (default JM_THREADS or all cores)");

    auto* table = app.add_subcommand("table", "Tabulate analytic variances on molecular ground states");
    add_common(table);
    add_family(table);
    table->add_option("--hamiltonian", cfg.hamiltonians, "Hamiltonian files, one row each")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.scheme = parse_scheme_kind(scheme);
        cfg.blocks = parse_block_family(blocks);
        cfg.coeffs = parse_coefficient_mode(coeffs);
        cfg.state = parse_state_kind(state);
        if (verify->parsed()) {
            cfg.format = parse_output_format(format.empty() ? "text" : format);
            cfg.pfaffian_sign = flip ? -1.0 : 1.0;
            const auto rep = cmd_verify(cfg);
            emit(render_verify(rep, cfg.format), out);
            return rep["passed"].get<bool>() ? 0 : 1;
        }
        if (estimate->parsed()) {
            cfg.format = parse_output_format(format.empty() ? "json" : format);
            cfg.hamiltonians = {hamiltonian};
            emit(render_estimate(cmd_estimate(cfg), cfg.format), out);
            return 0;
        }
        cfg.format = parse_output_format(format.empty() ? "text" : format);
        emit(render_table(cmd_table(cfg), cfg, cfg.format), out);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "jm: error: " << e.what() << '\n';
        return 2;
    }
}
