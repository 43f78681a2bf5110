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


// Command implementations behind the jm tool: estimate and table reports.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointmeas/estimation.hpp"
#include "jointmeas/hamiltonian_io.hpp"
#include "jointmeas/schemes.hpp"

namespace jointmeas {

enum class CoefficientMode { kUniform, kOptimized };
enum class StateKind { kGround, kGaussian, kFock };
enum class OutputFormat { kJson, kCsv, kText };

inline CoefficientMode parse_coefficient_mode(const std::string& s) {
    if (s == "uniform") return CoefficientMode::kUniform;
    if (s == "opt") return CoefficientMode::kOptimized;
    throw std::invalid_argument("unknown coefficient mode '" + s + "' (expected uniform|opt)");
}
inline std::string to_string(CoefficientMode m) { return m == CoefficientMode::kUniform ? "uniform" : "opt"; }

inline StateKind parse_state_kind(const std::string& s) {
    if (s == "ground") return StateKind::kGround;
    if (s == "gaussian") return StateKind::kGaussian;
    if (s == "fock") return StateKind::kFock;
    throw std::invalid_argument("unknown state source '" + s + "' (expected ground|gaussian|fock)");
}
inline std::string to_string(StateKind k) {
    switch (k) {
        case StateKind::kGround: return "ground";
        case StateKind::kGaussian: return "gaussian";
        case StateKind::kFock: return "fock";
    }
    return "?";
}

inline OutputFormat parse_output_format(const std::string& s) {
    if (s == "json") return OutputFormat::kJson;
    if (s == "csv") return OutputFormat::kCsv;
    if (s == "text") return OutputFormat::kText;
    throw std::invalid_argument("unknown format '" + s + "' (expected json|csv|text)");
}

struct RunConfig {
    std::vector<std::string> hamiltonians;
    SchemeKind scheme = SchemeKind::kPhysical4;
    std::size_t shots = 10000;
    std::uint64_t seed = 1;
    double epsilon = 0.1;
    double delta = 0.01;
    CoefficientMode coeffs = CoefficientMode::kOptimized;
    BlockFamily blocks = BlockFamily::kAuto;
    StateKind state = StateKind::kGround;
    std::vector<int> occupations;
    int random_count = 9;
    OutputFormat format = OutputFormat::kJson;
    int threads = 0;
    std::string data_dir;
    /// Criteria run by verify; empty means all.
    std::vector<int> criteria;
    /// Largest N used by the enumeration suites of verify.
    int verify_max_modes = 4;
    /// Test hook: multiplies every Pfaffian ground truth used by verify.
    double pfaffian_sign = 1.0;

    void validate() const {
        if (shots == 0) throw std::invalid_argument("--shots must be positive");
        if (!(epsilon > 0.0)) throw std::invalid_argument("--epsilon must be positive");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("--delta must lie in (0, 1)");
        if (random_count < 1) throw std::invalid_argument("random family needs at least one partition");
    }
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

/// Covariance of a Gaussian state on `total` modes: `phys` followed by vacuum modes.
inline GaussianState pad_with_vacuum(const GaussianState& phys, ModeCount total) {
    Eigen::MatrixXd g = init_fock(std::vector<int>(total.fermionic(), 0)).cov();
    const Eigen::Index p = phys.cov().rows();
    g.topLeftCorner(p, p) = phys.cov();
    return GaussianState(std::move(g));
}

inline double state_energy(const HamiltonianSpec& h, const ExpectationOracle& oracle) {
    double e = h.constant;
    for (const auto& [a, c] : h.terms) e += c * oracle.expectation(a);
    return e;
}

inline std::uint64_t sample_budget(const TermList& terms, const VisibilityCache& cache, double epsilon, double delta,
                                   double& eta_min) {
    eta_min = 1.0;
    for (const auto& a : terms.sets) {
        double best = 0.0;
        for (int r = 1; r <= cache.rounds(); ++r)
            if (const auto* e = cache.find(r, a)) best = std::max(best, e->eta());
        eta_min = std::min(eta_min, best);
    }
    return sample_complexity(eta_min, epsilon, delta, std::max<std::size_t>(1, terms.size()));
}

}  // namespace detail

/// Builds the family, visibilities and coefficients, runs the Monte Carlo estimate
/// and returns the full report. Identical configs give identical reports.
inline nlohmann::json cmd_estimate(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.hamiltonians.size() != 1) throw std::invalid_argument("estimate needs exactly one --hamiltonian");
    const std::string& path = cfg.hamiltonians.front();
    const HamiltonianSpec h = parse_hamiltonian_file(path);
    FamilyOptions fo;
    fo.blocks = cfg.blocks;
    fo.seed = derive_seed(cfg.seed, 1);
    fo.random_count = cfg.random_count;
    const SettingFamily family = build_family(cfg.scheme, h.n, fo);
    check_cap(family.modes, kMatrixFreeCap, "estimate");
    const TermList terms = TermList::from(h);
    const VisibilityCache cache(family, terms.sets);
    require_covered(terms, cache);

    std::unique_ptr<ExpectationOracle> oracle;
    std::unique_ptr<StateSource> source;
    double reference = 0.0;
    switch (cfg.state) {
        case StateKind::kGround: {
            const GroundState gs = ground_state(h);
            reference = gs.energy;
            source = std::make_unique<DenseSource>(extend_with_vacuum(gs.state, family.modes), family);
            oracle = std::make_unique<DenseOracle>(gs.state, family.modes);
            break;
        }
        case StateKind::kGaussian: {
            Rng rng(derive_seed(cfg.seed, 2));
            const GaussianState st = detail::pad_with_vacuum(random_gaussian_state(h.n, rng), family.modes);
            source = std::make_unique<GaussianSource>(st, family);
            oracle = std::make_unique<GaussianOracle>(st);
            reference = detail::state_energy(h, *oracle);
            break;
        }
        case StateKind::kFock: {
            std::vector<int> occ = cfg.occupations;
            if (occ.empty()) occ.assign(h.n.fermionic(), 0);
            if (static_cast<int>(occ.size()) != h.n.fermionic()) {
                throw std::invalid_argument("--occupations must list one bit per fermionic mode");
            }
            occ.resize(family.modes.fermionic(), 0);
            const GaussianState st = init_fock(occ);
            source = std::make_unique<GaussianSource>(st, family);
            oracle = std::make_unique<GaussianOracle>(st);
            reference = detail::state_energy(h, *oracle);
            break;
        }
    }

    CoefficientTable table = cfg.coeffs == CoefficientMode::kUniform ? uniform_coefficients(terms, cache)
                                                                      : optimize_coefficients(terms, family, cache, *oracle);
    const double analytic = analytic_variance(terms, family, cache, table, *oracle);
    const double uniform_var = cfg.coeffs == CoefficientMode::kUniform
                                   ? analytic
                                   : analytic_variance(terms, family, cache, uniform_coefficients(terms, cache), *oracle);
    const int threads = cfg.threads > 0 ? cfg.threads : configured_threads();
    const HamiltonianEstimate est =
        run_experiment(*source, family, cache, terms, table, h.constant, cfg.shots, derive_seed(cfg.seed, 3), threads);

    const int groups = std::max(1, std::min<int>(static_cast<int>(cfg.shots),
                                                 static_cast<int>(std::ceil(8.0 * std::log(1.0 / cfg.delta)))));
    double eta_min = 0.0;
    const std::uint64_t budget = detail::sample_budget(terms, cache, cfg.epsilon, cfg.delta, eta_min);

    nlohmann::json rep;
    rep["command"] = "estimate";
    rep["hamiltonian"] = path;
    rep["molecule"] = hamiltonian_name(h);
    rep["scheme"] = to_string(cfg.scheme);
    rep["blocks"] = to_string(cfg.blocks);
    rep["coefficients"] = to_string(cfg.coeffs);
    rep["state_source"] = to_string(cfg.state);
    rep["seed"] = cfg.seed;
    rep["shots"] = cfg.shots;
    rep["state_copies"] = cfg.shots * family.settings.size();
    rep["rounds"] = family.settings.size();
    rep["modes"] = {{"physical", h.n.fermionic()}, {"embedded", family.modes.fermionic()}};
    rep["chemistry"] = h.chemistry;
    rep["energy"] = {{"exact", reference},
                     {"estimate", est.mean},
                     {"standard_error", est.mean_standard_error},
                     {"median_of_means", median_of_means(est.values, groups)},
                     {"median_of_means_groups", groups}};
    if (h.reference_energy) rep["energy"]["file_reference"] = *h.reference_energy;
    rep["variance"] = {{"analytic", analytic},
                       {"analytic_uniform", uniform_var},
                       {"empirical", est.variance},
                       {"empirical_standard_error", est.variance_standard_error},
                       {"units", "Ha^2"}};
    rep["shot_budget"] = {{"epsilon", cfg.epsilon},
                          {"delta", cfg.delta},
                          {"observables", terms.size()},
                          {"min_visibility", eta_min},
                          {"shots", budget}};
    rep["flags"] = {{"pseudo_inverse_used", table.pseudo_inverse_used},
                    {"fell_back_to_uniform", table.fell_back_to_uniform}};
    nlohmann::json jt = nlohmann::json::array();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        nlohmann::json eta = nlohmann::json::array(), alpha = nlohmann::json::array();
        for (int r = 1; r <= cache.rounds(); ++r) {
            const auto* e = cache.find(r, terms.sets[t]);
            eta.push_back(e ? e->eta() : 0.0);
            alpha.push_back(table.at(r, t));
        }
        jt.push_back({{"indices", terms.sets[t].indices()},
                      {"coeff", terms.coeffs[t]},
                      {"exact", oracle->expectation(terms.sets[t])},
                      {"estimate", est.term_estimates[t]},
                      {"eta", eta},
                      {"alpha", alpha}});
    }
    rep["terms"] = std::move(jt);
    return rep;
}

inline std::string render_estimate(const nlohmann::json& rep, OutputFormat fmt) {
    if (fmt == OutputFormat::kJson) return rep.dump(2) + "\n";
    const std::vector<std::pair<std::string, double>> rows{
        {"exact_energy", rep["energy"]["exact"].get<double>()},
        {"estimated_energy", rep["energy"]["estimate"].get<double>()},
        {"standard_error", rep["energy"]["standard_error"].get<double>()},
        {"median_of_means", rep["energy"]["median_of_means"].get<double>()},
        {"analytic_variance", rep["variance"]["analytic"].get<double>()},
        {"empirical_variance", rep["variance"]["empirical"].get<double>()},
        {"empirical_variance_standard_error", rep["variance"]["empirical_standard_error"].get<double>()},
        {"shot_budget", static_cast<double>(rep["shot_budget"]["shots"].get<std::uint64_t>())}};
    std::ostringstream os;
    if (fmt == OutputFormat::kCsv) {
        os << "quantity,value\n";
        for (const auto& [k, v] : rows) os << k << ',' << format_double(v) << '\n';
    } else {
        os << rep["molecule"].get<std::string>() << "  scheme=" << rep["scheme"].get<std::string>()
           << "  coefficients=" << rep["coefficients"].get<std::string>()
           << "  shots=" << rep["shots"].get<std::size_t>() << '\n';
        for (const auto& [k, v] : rows) os << std::left << std::setw(36) << k << format_double(v) << '\n';
    }
    return os.str();
}

struct TableRow {
    std::string molecule;
    int qubits = 0;
    int embedded_qubits = 0;
    std::size_t terms = 0;
    double ground_energy = 0.0;
    double uniform_variance = 0.0;
    double optimized_variance = 0.0;
};

/// Analytic variances on each molecule's ground state under uniform and optimized coefficients.
inline std::vector<TableRow> cmd_table(const RunConfig& cfg) {
    if (cfg.hamiltonians.empty()) throw std::invalid_argument("table needs at least one --hamiltonian");
    std::vector<TableRow> rows;
    for (const auto& path : cfg.hamiltonians) {
        const HamiltonianSpec h = parse_hamiltonian_file(path);
        FamilyOptions fo;
        fo.blocks = cfg.blocks;
        fo.seed = derive_seed(cfg.seed, 1);
        fo.random_count = cfg.random_count;
        const SettingFamily family = build_family(cfg.scheme, h.n, fo);
        const TermList terms = TermList::from(h);
        const VisibilityCache cache(family, terms.sets);
        const GroundState gs = ground_state(h);
        const DenseOracle oracle(gs.state, family.modes);
        TableRow row;
        row.molecule = hamiltonian_name(h, path);
        row.qubits = h.n.fermionic();
        row.embedded_qubits = family.modes.fermionic();
        row.terms = terms.size();
        row.ground_energy = gs.energy;
        row.uniform_variance = analytic_variance(terms, family, cache, uniform_coefficients(terms, cache), oracle);
        row.optimized_variance =
            analytic_variance(terms, family, cache, optimize_coefficients(terms, family, cache, oracle), oracle);
        rows.push_back(row);
    }
    return rows;
}

inline std::string render_table(const std::vector<TableRow>& rows, const RunConfig& cfg, OutputFormat fmt) {
    std::ostringstream os;
    if (fmt == OutputFormat::kJson) {
        nlohmann::json j;
        j["command"] = "table";
        j["scheme"] = to_string(cfg.scheme);
        j["blocks"] = to_string(cfg.blocks);
        j["units"] = "Ha^2";
        j["rows"] = nlohmann::json::array();
        for (const auto& r : rows) {
            j["rows"].push_back({{"molecule", r.molecule},
                                 {"qubits", r.qubits},
                                 {"embedded_qubits", r.embedded_qubits},
                                 {"terms", r.terms},
                                 {"ground_energy", r.ground_energy},
                                 {"uniform_variance", r.uniform_variance},
                                 {"optimized_variance", r.optimized_variance}});
        }
        os << j.dump(2) << '\n';
    } else if (fmt == OutputFormat::kCsv) {
        os << "molecule,qubits,embedded_qubits,terms,ground_energy,uniform_variance,optimized_variance\n";
        for (const auto& r : rows) {
            os << r.molecule << ',' << r.qubits << ',' << r.embedded_qubits << ',' << r.terms << ','
               << format_double(r.ground_energy) << ',' << format_double(r.uniform_variance) << ','
               << format_double(r.optimized_variance) << '\n';
        }
    } else {
        os << "Variance of the energy estimator (Ha^2), scheme " << to_string(cfg.scheme) << ", blocks "
           << to_string(cfg.blocks) << "\n";
        os << std::left << std::setw(12) << "molecule" << std::right << std::setw(8) << "qubits" << std::setw(10)
           << "embedded" << std::setw(8) << "terms" << std::setw(16) << "uniform" << std::setw(16) << "optimized" << '\n';
        for (const auto& r : rows) {
            os << std::left << std::setw(12) << r.molecule << std::right << std::setw(8) << r.qubits << std::setw(10)
               << r.embedded_qubits << std::setw(8) << r.terms << std::fixed << std::setprecision(2) << std::setw(16)
               << r.uniform_variance << std::setw(16) << r.optimized_variance << '\n';
            os.unsetf(std::ios::fixed);
        }
    }
    return os.str();
}

}  // namespace jointmeas
