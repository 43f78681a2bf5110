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


// Verification suites behind `jm verify` and the acceptance binary.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointmeas/commands.hpp"

#ifndef JM_DEFAULT_DATA_DIR
#define JM_DEFAULT_DATA_DIR "data/hamiltonians"
#endif

namespace jointmeas {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double metric = 0.0;
    double threshold = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 20240611;
    int max_modes = 4;
    double pfaffian_sign = 1.0;
    std::string data_dir = JM_DEFAULT_DATA_DIR;
    int threads = 0;
    int prop1_triples = 50;
    int sign_states = 20;
    std::size_t pair_shots = 1000000;
    std::size_t variance_samples = 100000;
    int random_specs = 20;

    int thread_count() const { return threads > 0 ? threads : configured_threads(); }
    std::string hamiltonian_path(const std::string& name) const {
        return (std::filesystem::path(data_dir) / (name + ".json")).string();
    }
};

inline constexpr double kProp1Tolerance = 1e-10;
inline constexpr double kSignTolerance = 1e-9;
inline constexpr double kPairSigmas = 5.0;
inline constexpr double kExactVarianceTolerance = 1e-9;
inline constexpr double kVarianceSigmas = 3.0;
inline constexpr double kDominanceSlack = 1e-9;
inline constexpr double kResidualTolerance = 1e-10;
inline constexpr double kTableRelativeTolerance = 0.15;
inline constexpr double kTableUniformTarget = 63.3;
inline constexpr double kTableOptimizedTarget = 49.5;
inline constexpr std::uint64_t kBudgetTarget = 1060;

inline const std::vector<std::string>& vendored_hamiltonians() {
    static const std::vector<std::string> names{"h2", "lih", "beh2", "h2o"};
    return names;
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline std::vector<MajoranaIndexSet> even_sets(int n_majorana, std::size_t max_size) {
    std::vector<MajoranaIndexSet> out;
    for (unsigned long long m = 1; m < (1ULL << n_majorana); ++m) {
        auto s = MajoranaIndexSet::from_mask(m);
        if (s.even() && s.size() <= max_size) out.push_back(std::move(s));
    }
    return out;
}

/// A Fock state rotated by a Haar-random R, built both as a covariance and as a state vector.
inline std::pair<GaussianState, StateVector> random_gaussian_pair(ModeCount n, Rng& rng) {
    std::vector<int> occ(n.fermionic());
    for (auto& o : occ) o = rng.coin() ? 1 : 0;
    const auto r = random_orthogonal(n.majorana(), rng);
    return {apply_orthogonal(init_fock(occ), r), StateVector(n, FloCircuit(n, r).apply(StateVector::fock(occ).amp))};
}

inline HamiltonianSpec random_measurable_spec(ModeCount n, const std::vector<MajoranaIndexSet>& candidates,
                                              const SettingFamily& family, Rng& rng, int max_terms) {
    const VisibilityCache cache(family, candidates);
    HamiltonianSpec h;
    h.n = n;
    h.constant = rng.normal();
    for (const auto& a : candidates) {
        if (static_cast<int>(h.terms.size()) >= max_terms) break;
        if (cache.multiplicity(a) > 0 && rng.uniform() < 0.6) h.terms[a] = rng.normal();
    }
    return h;
}

inline void check_modes(const VerifyOptions& opt) {
    if (opt.max_modes < 2 || opt.max_modes > kProtocolEnumerationCap) {
        throw std::invalid_argument("verify: mode cap " + std::to_string(opt.max_modes) + " outside [2, " +
                                    std::to_string(kProtocolEnumerationCap) + "]");
    }
}

}  // namespace detail

/// Enumerated protocol statistics against 1/2 (1 + x eta_A tr(rho gamma_A)) on random Gaussian states.
inline CheckResult check_prop1(const VerifyOptions& opt) {
    detail::check_modes(opt);
    CheckResult res{1, "single-shot distribution", false, "", 0.0, kProp1Tolerance};
    Rng rng(derive_seed(opt.seed, 101));
    std::vector<int> sizes;
    for (int nf : {2, 3})
        if (nf <= opt.max_modes) sizes.push_back(nf);
    int count = 0;
    for (int t = 0; t < opt.prop1_triples; ++t) {
        const ModeCount n(sizes[t % sizes.size()]);
        const auto r = random_orthogonal(n.majorana(), rng);
        const auto [g, psi] = detail::random_gaussian_pair(n, rng);
        const auto sets = detail::even_sets(n.majorana(), n.majorana());
        const MajoranaIndexSet a = sets[rng.below(sets.size())];
        std::vector<int> pairs(n.fermionic());
        std::iota(pairs.begin(), pairs.end(), 1);
        rng.shuffle(pairs);
        std::vector<int> bv;
        for (std::size_t k = 0; k < a.size() / 2; ++k) {
            bv.push_back(2 * pairs[k] - 1);
            bv.push_back(2 * pairs[k]);
        }
        const MajoranaIndexSet b(bv);
        const double truth = opt.pfaffian_sign * expectation(g, a);
        const auto d = exact_protocol_distribution(r, psi, a, b);
        const double mean = visibility(r, a, b) * truth;
        res.metric = std::max({res.metric, std::abs(d.p_plus - 0.5 * (1.0 + mean)),
                               std::abs(d.p_minus - 0.5 * (1.0 - mean))});
        ++count;
    }
    res.passed = res.metric < res.threshold;
    res.detail = std::to_string(count) + " triples at N in {2,3}, max deviation " + detail::fmt(res.metric);
    return res;
}

/// Exhaustive coverage of pairs, quadruples and chemistry sets by the three deterministic families.
inline CheckResult check_coverage(const VerifyOptions&) {
    CheckResult res{2, "coverage", true, "", 0.0, 0.0};
    std::ostringstream os;
    auto record = [&](const std::string& label, const CoverageReport& rep, bool need_nonzero, std::size_t expected) {
        const bool ok = rep.passed() && (!need_nonzero || rep.zero_visibility.empty()) &&
                        (expected == 0 || rep.n_targets == expected);
        res.metric += static_cast<double>(rep.uncovered.size());
        res.passed = res.passed && ok;
        os << label << ": " << rep.n_targets << " targets, " << rep.uncovered.size() << " uncovered"
           << (ok ? "" : " FAIL") << "; ";
    };
    for (int l : {2, 4, 6}) {
        const int nm = l * (l + 1);
        record("pairs L=" + std::to_string(l), coverage_check(build_pair_scheme(ModeCount::from_majorana(nm)), CoverageTarget::kPairs),
               true, static_cast<std::size_t>(nm * (nm - 1) / 2));
    }
    record("quadruples l=7 k=4", coverage_check(build_quadruple_scheme_prime(7, 4), CoverageTarget::kQuadruples), false,
           20475);
    for (int l : {3, 4, 5}) {
        record("chemistry L=" + std::to_string(l),
               coverage_check(build_physical_scheme(ModeCount(l * l)), CoverageTarget::kChemistry), true, 0);
    }
    res.detail = os.str();
    res.detail.resize(res.detail.size() - 2);
    return res;
}

/// Covariance-matrix expectations, conjugations and rotations against the state-vector oracle.
inline CheckResult check_sign_conventions(const VerifyOptions& opt) {
    detail::check_modes(opt);
    CheckResult res{3, "sign conventions", false, "", 0.0, kSignTolerance};
    Rng rng(derive_seed(opt.seed, 103));
    for (int t = 0; t < opt.sign_states; ++t) {
        const ModeCount n(1 + t % opt.max_modes);
        const auto [g, psi] = detail::random_gaussian_pair(n, rng);
        const auto sets = detail::even_sets(n.majorana(), n.majorana());
        const auto x = MajoranaIndexSet::from_mask(rng.below(1ULL << n.majorana()));
        const auto gx = conjugate_monomial(g, x);
        const StateVector px(n, ordered_product(n, x).dagger().apply(psi.amp));
        const auto r = random_orthogonal(n.majorana(), rng);
        const FloCircuit u(n, r);
        const auto gr = apply_orthogonal(g, r);
        const StateVector pr(n, u.apply(psi.amp));
        const auto ga = apply_orthogonal_adjoint(g, r);
        const StateVector pa(n, u.apply_adjoint(psi.amp));
        for (const auto& a : sets) {
            const double s = opt.pfaffian_sign;
            res.metric = std::max({res.metric, std::abs(s * expectation(g, a) - expectation(psi, a)),
                                   std::abs(s * expectation(gx, a) - expectation(px, a)),
                                   std::abs(s * expectation(gr, a) - expectation(pr, a)),
                                   std::abs(s * expectation(ga, a) - expectation(pa, a))});
        }
    }
    res.passed = res.metric <= res.threshold;
    res.detail = std::to_string(opt.sign_states) + " states at N <= " + std::to_string(opt.max_modes) +
                 ", max deviation " + detail::fmt(res.metric);
    return res;
}

/// All 190 pair estimates at 2N = 20 from one shared run of the two-setting scheme.
inline CheckResult check_pair_unbiasedness(const VerifyOptions& opt) {
    CheckResult res{4, "pair estimates at 2N = 20", false, "", 0.0, kPairSigmas};
    Rng rng(derive_seed(opt.seed, 104));
    const ModeCount n(10);
    const auto family = build_pair_scheme(n);
    const auto st = random_gaussian_state(n, rng);
    std::vector<MajoranaIndexSet> pairs;
    for (int a = 1; a <= n.majorana(); ++a)
        for (int b = a + 1; b <= n.majorana(); ++b) pairs.push_back({a, b});
    const VisibilityCache cache(family, pairs);
    const GaussianSource source(st, family);
    const auto est = run_experiment(source, family, cache, pairs, opt.pair_shots, derive_seed(opt.seed, 204),
                                    opt.thread_count());
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const double z = std::abs(est.estimate[t] - opt.pfaffian_sign * expectation(st, pairs[t])) / est.standard_error[t];
        res.metric = std::isfinite(z) ? std::max(res.metric, z) : std::numeric_limits<double>::infinity();
    }
    res.passed = res.metric < res.threshold;
    res.detail = std::to_string(pairs.size()) + " pairs, " + std::to_string(opt.pair_shots) +
                 " shots, max |z| " + detail::fmt(res.metric);
    return res;
}

/// Analytic variance against exact enumeration at small N, and against Monte Carlo on the H2 ground state.
inline CheckResult check_variance_formula(const VerifyOptions& opt) {
    detail::check_modes(opt);
    CheckResult res{5, "variance formula", true, "", 0.0, kExactVarianceTolerance};
    Rng rng(derive_seed(opt.seed, 105));
    std::vector<int> sizes{3};
    if (opt.max_modes >= 4) sizes.push_back(4);
    double exact_dev = 0.0;
    for (int nf : sizes) {
        const ModeCount n(nf);
        const auto family = nf == 3 ? build_pair_scheme(n) : build_physical_scheme(n);
        for (int trial = 0; trial < 3; ++trial) {
            const auto h = detail::random_measurable_spec(n, detail::even_sets(n.majorana(), 4), family, rng, 25);
            const auto terms = TermList::from(h);
            const VisibilityCache cache(family, terms.sets);
            const auto psi = StateVector::random(n, rng);
            const DenseOracle oracle(psi);
            double energy = h.constant;
            for (const auto& [a, c] : h.terms) energy += c * expectation(psi, a);
            for (const auto& table :
                 {uniform_coefficients(terms, cache), optimize_coefficients(terms, family, cache, oracle)}) {
                const auto exact = exact_estimator_moments(family, psi, terms, cache, table);
                exact_dev = std::max({exact_dev, std::abs(analytic_variance(terms, family, cache, table, oracle) - exact.variance),
                                      std::abs(exact.mean + h.constant - energy)});
            }
        }
    }
    res.metric = exact_dev;
    const bool exact_ok = exact_dev <= kExactVarianceTolerance;

    const HamiltonianSpec h = parse_hamiltonian_file(opt.hamiltonian_path("h2"));
    const SettingFamily family = build_family(SchemeKind::kPhysical4, h.n);
    const TermList terms = TermList::from(h);
    const VisibilityCache cache(family, terms.sets);
    const GroundState gs = ground_state(h);
    const DenseOracle oracle(gs.state, family.modes);
    const auto table = uniform_coefficients(terms, cache);
    const double analytic = analytic_variance(terms, family, cache, table, oracle);
    const DenseSource source(extend_with_vacuum(gs.state, family.modes), family);
    const auto est = run_experiment(source, family, cache, terms, table, h.constant, opt.variance_samples,
                                    derive_seed(opt.seed, 205), opt.thread_count());
    const double z = std::abs(est.variance - analytic) / est.variance_standard_error;
    const bool mc_ok = opt.variance_samples >= 100000 && z <= kVarianceSigmas;
    res.passed = exact_ok && mc_ok;
    res.detail = "exact enumeration at N in {3,4}: max deviation " + detail::fmt(exact_dev) + "; H2 " +
                 std::to_string(opt.variance_samples) + " samples: empirical " + detail::fmt(est.variance) + " +- " +
                 detail::fmt(est.variance_standard_error) + " vs analytic " + detail::fmt(analytic) + " (" +
                 detail::fmt(z) + " sigma, limit 3)";
    return res;
}

/// Optimized coefficients never lose to uniform ones and satisfy the unbiasedness constraint.
inline CheckResult check_optimization_dominance(const VerifyOptions& opt) {
    CheckResult res{6, "optimized <= uniform", true, "", 0.0, kDominanceSlack};
    std::ostringstream os;
    double worst_gap = -std::numeric_limits<double>::infinity(), worst_residual = 0.0;
    auto compare = [&](const TermList& terms, const SettingFamily& family, const VisibilityCache& cache,
                       const ExpectationOracle& oracle) {
        const auto u = uniform_coefficients(terms, cache);
        const auto o = optimize_coefficients(terms, family, cache, oracle);
        const double vu = analytic_variance(terms, family, cache, u, oracle);
        const double vo = analytic_variance(terms, family, cache, o, oracle);
        worst_gap = std::max(worst_gap, vo - vu);
        worst_residual = std::max(worst_residual, constraint_residual(o, terms, cache));
        return std::make_pair(vu, vo);
    };
    for (const auto& name : vendored_hamiltonians()) {
        const HamiltonianSpec h = parse_hamiltonian_file(opt.hamiltonian_path(name));
        const SettingFamily family = build_family(SchemeKind::kPhysical4, h.n);
        const TermList terms = TermList::from(h);
        const VisibilityCache cache(family, terms.sets);
        const DenseOracle oracle(ground_state(h).state, family.modes);
        const auto [vu, vo] = compare(terms, family, cache, oracle);
        os << name << " " << detail::fmt(vu) << " -> " << detail::fmt(vo) << "; ";
    }
    Rng rng(derive_seed(opt.seed, 106));
    for (int t = 0; t < opt.random_specs; ++t) {
        const ModeCount n(4);
        const auto family = build_physical_scheme(n);
        const auto h = detail::random_measurable_spec(n, chemistry_targets(n.majorana()), family, rng, 40);
        const auto terms = TermList::from(h);
        const VisibilityCache cache(family, terms.sets);
        const DenseOracle oracle(StateVector::random(n, rng));
        compare(terms, family, cache, oracle);
    }
    res.metric = worst_gap;
    res.passed = worst_gap <= kDominanceSlack && worst_residual < kResidualTolerance;
    os << opt.random_specs << " random specs; worst gap " << detail::fmt(worst_gap) << ", worst residual "
       << detail::fmt(worst_residual);
    res.detail = os.str();
    return res;
}

/// H2 ground-state variances with 3 x 3 almost-Hadamard blocks against 63.3 and 49.5 Ha^2.
inline CheckResult check_h2_table(const VerifyOptions& opt) {
    CheckResult res{7, "H2 variance table", false, "", 0.0, kTableRelativeTolerance};
    RunConfig cfg;
    cfg.hamiltonians = {opt.hamiltonian_path("h2")};
    cfg.scheme = SchemeKind::kPhysical4;
    cfg.blocks = BlockFamily::kAuto;
    const auto rows = cmd_table(cfg);
    const TableRow& r = rows.front();
    const double du = std::abs(r.uniform_variance / kTableUniformTarget - 1.0);
    const double dopt = std::abs(r.optimized_variance / kTableOptimizedTarget - 1.0);
    res.metric = std::max(du, dopt);
    res.passed = res.metric <= res.threshold;
    res.detail = "uniform " + detail::fmt(r.uniform_variance) + " vs 63.3, optimized " +
                 detail::fmt(r.optimized_variance) + " vs 49.5 (Ha^2)";
    return res;
}

inline CheckResult check_sample_budget(const VerifyOptions&) {
    CheckResult res{8, "shot budget", false, "", 0.0, static_cast<double>(kBudgetTarget)};
    const std::uint64_t s = sample_complexity(1.0, 0.1, 0.01, 1);
    res.metric = static_cast<double>(s);
    res.passed = s == kBudgetTarget;
    res.detail = "S(eta=1, eps=0.1, delta=0.01, |S|=1) = " + std::to_string(s);
    return res;
}

/// Two estimate runs with the same seed, on different thread counts, give identical reports.
inline CheckResult check_determinism(const VerifyOptions& opt) {
    CheckResult res{9, "determinism", false, "", 0.0, 0.0};
    RunConfig cfg;
    cfg.hamiltonians = {opt.hamiltonian_path("h2")};
    cfg.shots = 5000;
    cfg.seed = opt.seed;
    cfg.threads = 1;
    const std::string a = cmd_estimate(cfg).dump(2);
    cfg.threads = 4;
    const std::string b = cmd_estimate(cfg).dump(2);
    res.passed = a == b;
    res.metric = res.passed ? 0.0 : 1.0;
    res.detail = "two H2 reports of " + std::to_string(a.size()) + " bytes " + (res.passed ? "identical" : "differ");
    return res;
}

inline const std::vector<std::function<CheckResult(const VerifyOptions&)>>& verification_suites() {
    static const std::vector<std::function<CheckResult(const VerifyOptions&)>> suites{
        check_prop1,          check_coverage,     check_sign_conventions,
        check_pair_unbiasedness, check_variance_formula, check_optimization_dominance,
        check_h2_table,       check_sample_budget, check_determinism};
    return suites;
}

/// Runs the requested criteria (all when empty). A suite that throws counts as failed.
inline std::vector<CheckResult> run_verification(const VerifyOptions& opt, const std::vector<int>& criteria = {}) {
    detail::check_modes(opt);
    const auto& suites = verification_suites();
    std::vector<int> which = criteria;
    if (which.empty())
        for (int c = 1; c <= static_cast<int>(suites.size()); ++c) which.push_back(c);
    std::vector<CheckResult> out;
    for (int c : which) {
        if (c < 1 || c > static_cast<int>(suites.size())) {
            throw std::invalid_argument("verify: no criterion " + std::to_string(c));
        }
        try {
            out.push_back(suites[c - 1](opt));
        } catch (const std::exception& e) {
            out.push_back({c, "criterion " + std::to_string(c), false, std::string("error: ") + e.what(), 0.0, 0.0});
        }
    }
    return out;
}

inline VerifyOptions verify_options(const RunConfig& cfg) {
    VerifyOptions opt;
    opt.seed = cfg.seed;
    opt.max_modes = cfg.verify_max_modes;
    opt.pfaffian_sign = cfg.pfaffian_sign;
    opt.threads = cfg.threads;
    if (!cfg.data_dir.empty()) opt.data_dir = cfg.data_dir;
    return opt;
}

inline nlohmann::json verification_report(const std::vector<CheckResult>& results) {
    nlohmann::json j;
    j["command"] = "verify";
    j["checks"] = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        j["checks"].push_back({{"criterion", r.criterion},
                               {"name", r.name},
                               {"passed", r.passed},
                               {"metric", r.metric},
                               {"threshold", r.threshold},
                               {"detail", r.detail}});
    }
    j["passed"] = all;
    return j;
}

/// Report of the selected suites; check "passed" for the exit status.
inline nlohmann::json cmd_verify(const RunConfig& cfg) {
    return verification_report(run_verification(verify_options(cfg), cfg.criteria));
}

}  // namespace jointmeas
