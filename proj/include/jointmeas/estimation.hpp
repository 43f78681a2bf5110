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


// Post-processing, estimators, variances and coefficient optimization.

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "jointmeas/dense.hpp"
#include "jointmeas/gaussian.hpp"
#include "jointmeas/hamiltonian.hpp"
#include "jointmeas/majorana.hpp"
#include "jointmeas/random.hpp"
#include "jointmeas/schemes.hpp"

namespace jointmeas {

/// One protocol run: the round (1-based), the sampled X and the outcomes q.
struct ShotRecord {
    int round = 1;
    std::uint64_t x_mask = 0;
    /// Bit i-1 set iff q_i = +1.
    std::uint64_t q_plus = 0;

    MajoranaIndexSet x() const { return MajoranaIndexSet::from_mask(x_mask); }
    int q(int i) const { return (q_plus >> (i - 1)) & 1 ? 1 : -1; }
};

struct TermEntry {
    MajoranaIndexSet pairs;
    double nu = 0.0;
    std::uint64_t a_mask = 0;
    std::uint64_t pair_mask = 0;

    double eta() const { return std::abs(nu); }
};

/// nu, eta and f(A) for every (round, A) that the round can read out.
class VisibilityCache {
  public:
    VisibilityCache() = default;

    VisibilityCache(const SettingFamily& family, const std::vector<MajoranaIndexSet>& targets) {
        if (family.modes.majorana() > 64) throw std::invalid_argument("VisibilityCache: at most 64 Majorana modes");
        per_round_.resize(family.settings.size());
        for (std::size_t r = 0; r < family.settings.size(); ++r) {
            for (const auto& a : targets) {
                const auto t = best_target(family.settings[r], a);
                if (!t || t->nu == 0.0) continue;
                per_round_[r].emplace(a, TermEntry{t->pairs, t->nu, a.mask(), standard_pair_mask(t->pairs)});
            }
        }
    }

    int rounds() const { return static_cast<int>(per_round_.size()); }

    /// Entry for round r (1-based), or nullptr when A is not in M^(r).
    const TermEntry* find(int round, const MajoranaIndexSet& a) const {
        const auto& m = per_round_.at(round - 1);
        auto it = m.find(a);
        return it == m.end() ? nullptr : &it->second;
    }

    const TermEntry& at(int round, const MajoranaIndexSet& a) const {
        const TermEntry* e = find(round, a);
        if (!e) {
            throw std::out_of_range("VisibilityCache: no entry for " + a.to_string() + " in round " +
                                    std::to_string(round));
        }
        return *e;
    }

    bool measurable(int round, const MajoranaIndexSet& a) const { return find(round, a) != nullptr; }

    int multiplicity(const MajoranaIndexSet& a) const {
        int f = 0;
        for (int r = 1; r <= rounds(); ++r) f += measurable(r, a) ? 1 : 0;
        return f;
    }

    /// Visibility when each shot uses one uniformly random round and unreadable rounds coin-flip.
    double effective_eta(const MajoranaIndexSet& a) const {
        double s = 0.0;
        for (int r = 1; r <= rounds(); ++r)
            if (const auto* e = find(r, a)) s += e->eta();
        return s / rounds();
    }

  private:
    std::vector<std::map<MajoranaIndexSet, TermEntry>> per_round_;
};

/// e_A for one shot; a fair coin from `rng` when A is not in M^(r).
inline int postprocess(const ShotRecord& shot, const MeasurementSetting& setting, const MajoranaIndexSet& a,
                       const VisibilityCache& cache, Rng& rng) {
    if (!a.even()) throw std::invalid_argument("postprocess: odd observable " + a.to_string());
    if (shot.round != setting.round_index) throw std::invalid_argument("postprocess: shot belongs to another round");
    const TermEntry* e = cache.find(shot.round, a);
    if (!e) {
        if (consistent(setting, a) && best_target(setting, a)) {
            throw std::out_of_range("postprocess: missing cache entry for " + a.to_string());
        }
        return rng.coin() ? 1 : -1;
    }
    return protocol_output(e->a_mask, e->pair_mask, e->nu, shot.x_mask, shot.q_plus);
}

inline double gamma_estimate(int e, double eta) {
    if (!(eta > 0.0 && eta <= 1.0 + 1e-12)) throw std::invalid_argument("gamma_estimate: eta must lie in (0, 1]");
    return e / eta;
}

// ---------------------------------------------------------------------------
// Coefficients

/// Nonzero terms of H in a fixed order; the index used by every coefficient table.
struct TermList {
    std::vector<MajoranaIndexSet> sets;
    std::vector<double> coeffs;

    std::size_t size() const { return sets.size(); }

    static TermList from(const HamiltonianSpec& h) {
        TermList t;
        for (const auto& [a, c] : h.terms) {
            if (c == 0.0) continue;
            t.sets.push_back(a);
            t.coeffs.push_back(c);
        }
        return t;
    }
};

struct CoefficientTable {
    /// alpha[r - 1][t] for round r and term t of the TermList.
    std::vector<std::vector<double>> alpha;
    bool pseudo_inverse_used = false;
    bool fell_back_to_uniform = false;

    double at(int round, std::size_t term) const { return alpha.at(round - 1).at(term); }
};

/// max_A |sum_r alpha_A^(r) - 1|, also counting weight placed outside M^(r).
inline double constraint_residual(const CoefficientTable& table, const TermList& terms, const VisibilityCache& cache) {
    double worst = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        double s = 0.0;
        for (int r = 1; r <= cache.rounds(); ++r) {
            const double a = table.at(r, t);
            if (!cache.measurable(r, terms.sets[t])) worst = std::max(worst, std::abs(a));
            s += a;
        }
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

inline void require_covered(const TermList& terms, const VisibilityCache& cache) {
    for (const auto& a : terms.sets) {
        if (cache.multiplicity(a) == 0) {
            throw std::invalid_argument("term " + a.to_string() +
                                        " is not measured by any round of the family (see coverage_check)");
        }
    }
}

/// alpha_A^(r) = 1 / f_A on the rounds that measure A.
inline CoefficientTable uniform_coefficients(const TermList& terms, const VisibilityCache& cache) {
    require_covered(terms, cache);
    CoefficientTable table;
    table.alpha.assign(cache.rounds(), std::vector<double>(terms.size(), 0.0));
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const int f = cache.multiplicity(terms.sets[t]);
        for (int r = 1; r <= cache.rounds(); ++r)
            if (cache.measurable(r, terms.sets[t])) table.alpha[r - 1][t] = 1.0 / f;
    }
    return table;
}

// ---------------------------------------------------------------------------
// Expectation oracles

class ExpectationOracle {
  public:
    virtual ~ExpectationOracle() = default;
    virtual ModeCount modes() const = 0;
    virtual double expectation(const MajoranaIndexSet& a) const = 0;
};

class GaussianOracle final : public ExpectationOracle {
  public:
    explicit GaussianOracle(GaussianState st) : st_(std::move(st)) {}
    ModeCount modes() const override { return st_.modes(); }
    double expectation(const MajoranaIndexSet& a) const override { return jointmeas::expectation(st_, a); }
    const GaussianState& state() const { return st_; }

  private:
    GaussianState st_;
};

/// Pure state on the physical modes, padded with vacuum modes up to `total`.
class DenseOracle final : public ExpectationOracle {
  public:
    DenseOracle(StateVector psi, ModeCount total) : psi_(std::move(psi)), total_(total) {
        if (total_ < psi_.n) throw std::invalid_argument("DenseOracle: total smaller than the state");
    }
    explicit DenseOracle(StateVector psi) : DenseOracle(psi, psi.n) {}

    ModeCount modes() const override { return total_; }
    const StateVector& state() const { return psi_; }

    double expectation(const MajoranaIndexSet& a) const override {
        a.check_range(total_);
        if (!a.even()) throw std::invalid_argument("DenseOracle: odd observable");
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(a);
        if (it != memo_.end()) return it->second;
        const double v = compute(a);
        memo_.emplace(a, v);
        return v;
    }

  private:
    double compute(const MajoranaIndexSet& a) const {
        const int phys = psi_.n.majorana();
        std::vector<int> p, q;
        for (int i : a) (i <= phys ? p : q).push_back(i);
        if (q.empty()) return jointmeas::expectation(psi_, a);
        if (p.size() % 2) return 0.0;
        // gamma_A = gamma_P gamma_Q and the vacuum gives <gamma_Q> = (-1)^{#pairs} on unions of standard pairs.
        for (std::size_t k = 0; k < q.size(); k += 2)
            if (q[k] % 2 != 1 || q[k + 1] != q[k] + 1) return 0.0;
        const double vac = (q.size() / 2) % 2 ? -1.0 : 1.0;
        return vac * jointmeas::expectation(psi_, MajoranaIndexSet::from_sorted(std::move(p)));
    }

    StateVector psi_;
    ModeCount total_;
    mutable std::mutex mu_;
    mutable std::unordered_map<MajoranaIndexSet, double, MajoranaIndexSetHash> memo_;
};

// ---------------------------------------------------------------------------
// Variance

/// E[g_A g_A'] - <g_A><g_A'> for the single-round estimators g = e / eta.
inline double covariance_entry(const MeasurementSetting& setting, const MajoranaIndexSet& a,
                               const MajoranaIndexSet& a2, const VisibilityCache& cache,
                               const ExpectationOracle& oracle) {
    const TermEntry& ea = cache.at(setting.round_index, a);
    const TermEntry& eb = cache.at(setting.round_index, a2);
    const double mean = oracle.expectation(a) * oracle.expectation(a2);
    if (a == a2) return 1.0 / (ea.nu * ea.nu) - mean;
    const MajoranaIndexSet c = symmetric_difference(a, a2);
    const MajoranaIndexSet f = symmetric_difference(ea.pairs, eb.pairs);
    if (c.size() != f.size()) return -mean;
    const double nu_c = submatrix_det(setting.composed, c, f);
    if (nu_c == 0.0) return -mean;
    return nu_c / (ea.nu * eb.nu) * oracle.expectation(c) - mean;
}

/// Covariance matrix of (h_A g_A) over the given members of M^(r).
inline Eigen::MatrixXd weighted_round_covariance(const MeasurementSetting& setting,
                                                 const std::vector<std::size_t>& members, const TermList& terms,
                                                 const VisibilityCache& cache, const ExpectationOracle& oracle) {
    const Eigen::Index m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            const auto ti = members[i], tj = members[j];
            const double v = terms.coeffs[ti] * terms.coeffs[tj] *
                             covariance_entry(setting, terms.sets[ti], terms.sets[tj], cache, oracle);
            c(i, j) = c(j, i) = v;
        }
    }
    return c;
}

inline std::vector<std::size_t> round_members(int round, const TermList& terms, const VisibilityCache& cache) {
    std::vector<std::size_t> m;
    for (std::size_t t = 0; t < terms.size(); ++t)
        if (cache.measurable(round, terms.sets[t])) m.push_back(t);
    return m;
}

/// Var of the all-rounds estimator: sum_r alpha^(r)T C^(r) alpha^(r).
inline double analytic_variance(const TermList& terms, const SettingFamily& family, const VisibilityCache& cache,
                                const CoefficientTable& table, const ExpectationOracle& oracle) {
    double var = 0.0;
    for (const auto& s : family.settings) {
        const auto members = round_members(s.round_index, terms, cache);
        std::vector<std::size_t> active;
        for (auto t : members)
            if (table.at(s.round_index, t) != 0.0) active.push_back(t);
        if (active.empty()) continue;
        const Eigen::MatrixXd c = weighted_round_covariance(s, active, terms, cache, oracle);
        Eigen::VectorXd w(static_cast<Eigen::Index>(active.size()));
        for (std::size_t k = 0; k < active.size(); ++k) w[k] = table.at(s.round_index, active[k]);
        var += w.dot(c * w);
    }
    return var;
}

namespace detail {

/// Inverse of a symmetric PSD matrix; falls back to the pseudo-inverse when the condition number exceeds 1e12.
inline Eigen::MatrixXd psd_inverse(const Eigen::MatrixXd& c, bool& pseudo) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    const double bottom = ev.minCoeff();
    Eigen::VectorXd inv(ev.size());
    const bool ill = !(bottom > 0.0) || top / bottom > 1e12;
    pseudo = pseudo || ill;
    for (Eigen::Index k = 0; k < ev.size(); ++k) inv[k] = (ill && ev[k] <= 1e-12 * top) ? 0.0 : 1.0 / ev[k];
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// Minimizes the analytic variance under sum_r alpha_A^(r) = 1. The linear solve is refined
/// iteratively and the result projected back onto the constraint to remove round-off.
inline CoefficientTable optimize_coefficients(const TermList& terms, const SettingFamily& family,
                                              const VisibilityCache& cache, const ExpectationOracle& oracle) {
    require_covered(terms, cache);
    const Eigen::Index n = static_cast<Eigen::Index>(terms.size());
    CoefficientTable table;
    table.alpha.assign(cache.rounds(), std::vector<double>(terms.size(), 0.0));
    if (n == 0) return table;

    std::vector<Eigen::MatrixXd> d(family.settings.size(), Eigen::MatrixXd::Zero(n, n));
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (const auto& s : family.settings) {
        const auto members = round_members(s.round_index, terms, cache);
        if (members.empty()) continue;
        const Eigen::MatrixXd inv =
            0.5 * detail::psd_inverse(weighted_round_covariance(s, members, terms, cache, oracle), table.pseudo_inverse_used);
        auto& dr = d[s.round_index - 1];
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = 0; j < members.size(); ++j) dr(members[i], members[j]) = inv(i, j);
        sum += dr;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (!(ev.minCoeff() > 1e-14 * ev.cwiseAbs().maxCoeff())) {
        CoefficientTable u = uniform_coefficients(terms, cache);
        u.fell_back_to_uniform = true;
        u.pseudo_inverse_used = table.pseudo_inverse_used;
        return u;
    }
    auto solve = [&](const Eigen::VectorXd& rhs) {
        return Eigen::VectorXd(es.eigenvectors() * (es.eigenvectors().transpose() * rhs).cwiseQuotient(ev));
    };
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd lambda = solve(ones);
    for (int it = 0; it < 3; ++it) lambda += solve(ones - sum * lambda);
    for (int r = 1; r <= cache.rounds(); ++r) {
        const Eigen::VectorXd a = d[r - 1] * lambda;
        for (Eigen::Index t = 0; t < n; ++t) table.alpha[r - 1][t] = cache.measurable(r, terms.sets[t]) ? a[t] : 0.0;
    }
    for (Eigen::Index t = 0; t < n; ++t) {
        double s = 0.0;
        for (int r = 1; r <= cache.rounds(); ++r) s += table.alpha[r - 1][t];
        const double shift = (1.0 - s) / cache.multiplicity(terms.sets[t]);
        for (int r = 1; r <= cache.rounds(); ++r)
            if (cache.measurable(r, terms.sets[t])) table.alpha[r - 1][t] += shift;
    }
    return table;
}

// ---------------------------------------------------------------------------
// Single-shot estimators

/// sum_r sum_{A in M^(r)} h_A alpha_A^(r) e_A^(r) / eta_A^(r); shots[r - 1] is the run of round r.
inline double hamiltonian_single_shot(const std::vector<ShotRecord>& shots, const TermList& terms,
                                      const VisibilityCache& cache, const CoefficientTable& table,
                                      double constant = 0.0) {
    if (static_cast<int>(shots.size()) != cache.rounds()) {
        throw std::invalid_argument("hamiltonian_single_shot: need one shot per round");
    }
    double total = constant;
    for (const auto& shot : shots) {
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const double alpha = table.at(shot.round, t);
            const TermEntry* e = cache.find(shot.round, terms.sets[t]);
            if (!e) {
                if (alpha != 0.0) throw std::invalid_argument("hamiltonian_single_shot: weight on an unmeasured term");
                continue;
            }
            if (alpha == 0.0) continue;
            const int v = protocol_output(e->a_mask, e->pair_mask, e->nu, shot.x_mask, shot.q_plus);
            total += terms.coeffs[t] * alpha * v / e->eta();
        }
    }
    return total;
}

inline std::uint64_t sample_complexity(double eta, double epsilon, double delta, std::uint64_t set_size) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("sample_complexity: eta must lie in (0, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("sample_complexity: epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("sample_complexity: delta must lie in (0, 1)");
    if (set_size < 1) throw std::invalid_argument("sample_complexity: need at least one observable");
    const double s = 2.0 / (eta * eta * epsilon * epsilon) * std::log(2.0 * static_cast<double>(set_size) / delta);
    return static_cast<std::uint64_t>(std::ceil(s));
}

/// Median of the means of `groups` contiguous equal chunks; trailing samples that do not fill a chunk are dropped.
inline double median_of_means(const std::vector<double>& samples, int groups) {
    if (samples.empty()) throw std::invalid_argument("median_of_means: no samples");
    if (groups < 1) throw std::invalid_argument("median_of_means: need at least one group");
    if (static_cast<std::size_t>(groups) > samples.size()) throw std::invalid_argument("median_of_means: more groups than samples");
    const std::size_t chunk = samples.size() / groups;
    std::vector<double> means(groups);
    for (int g = 0; g < groups; ++g) {
        double s = 0.0;
        for (std::size_t k = 0; k < chunk; ++k) s += samples[g * chunk + k];
        means[g] = s / chunk;
    }
    std::sort(means.begin(), means.end());
    return groups % 2 ? means[groups / 2] : 0.5 * (means[groups / 2 - 1] + means[groups / 2]);
}

// ---------------------------------------------------------------------------
// Exact enumeration (small N)

struct EstimatorMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Exact mean and variance of the all-rounds Hamiltonian estimator by enumerating every (X, q) of every round.
inline EstimatorMoments exact_estimator_moments(const SettingFamily& family, const StateVector& psi,
                                                const TermList& terms, const VisibilityCache& cache,
                                                const CoefficientTable& table) {
    if (psi.n != family.modes) throw std::invalid_argument("exact_estimator_moments: state and family sizes differ");
    EstimatorMoments total;
    for (const auto& s : family.settings) {
        const FloCircuit circuit(family.modes, s.composed);
        double m1 = 0.0, m2 = 0.0;
        enumerate_protocol(circuit, psi, [&](std::uint64_t x, std::uint64_t q, double p) {
            double v = 0.0;
            for (std::size_t t = 0; t < terms.size(); ++t) {
                const double alpha = table.at(s.round_index, t);
                if (alpha == 0.0) continue;
                const TermEntry& e = cache.at(s.round_index, terms.sets[t]);
                v += terms.coeffs[t] * alpha * protocol_output(e.a_mask, e.pair_mask, e.nu, x, q) / e.eta();
            }
            m1 += p * v;
            m2 += p * v * v;
        });
        total.mean += m1;
        total.variance += m2 - m1 * m1;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Prepares shots of the protocol, steps (i)-(iii), for a fixed state.
class StateSource {
  public:
    virtual ~StateSource() = default;
    virtual ShotRecord sample(int round, Rng& rng) const = 0;
};

class GaussianSource final : public StateSource {
  public:
    GaussianSource(const GaussianState& st, const SettingFamily& family) : st_(st) {
        if (st.modes() != family.modes) throw std::invalid_argument("GaussianSource: state and family sizes differ");
        for (const auto& s : family.settings) rot_.push_back(s.composed.matrix());
    }

    ShotRecord sample(int round, Rng& rng) const override {
        const Eigen::Index dim = st_.cov().rows();
        ShotRecord shot;
        shot.round = round;
        shot.x_mask = dim == 64 ? rng.next() : rng.next() & ((std::uint64_t{1} << dim) - 1);
        const int parity = std::popcount(shot.x_mask) % 2;
        Eigen::VectorXd s(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            const int in = static_cast<int>((shot.x_mask >> j) & 1);
            s[j] = (parity + in) % 2 ? -1.0 : 1.0;
        }
        const Eigen::MatrixXd& r = rot_.at(round - 1);
        Eigen::MatrixXd g = r.transpose() * (s.asDiagonal() * st_.cov() * s.asDiagonal()) * r;
        shot.q_plus = detail::sample_pairs_in_place(g, rng);
        return shot;
    }

  private:
    GaussianState st_;
    std::vector<Eigen::MatrixXd> rot_;
};

class DenseSource final : public StateSource {
  public:
    DenseSource(const StateVector& psi, const SettingFamily& family) : psi_(psi) {
        if (psi.n != family.modes) throw std::invalid_argument("DenseSource: state and family sizes differ");
        for (const auto& s : family.settings) circuits_.emplace_back(family.modes, s.composed);
    }

    ShotRecord sample(int round, Rng& rng) const override {
        const int dim = psi_.n.majorana();
        ShotRecord shot;
        shot.round = round;
        shot.x_mask = dim == 64 ? rng.next() : rng.next() & ((std::uint64_t{1} << dim) - 1);
        const PauliString gx = ordered_product(psi_.n, MajoranaIndexSet::from_mask(shot.x_mask));
        const Eigen::VectorXcd phi = circuits_.at(round - 1).apply_adjoint(gx.dagger().apply(psi_.amp));
        double u = rng.uniform() * phi.squaredNorm();
        Eigen::Index b = 0;
        for (; b + 1 < phi.size(); ++b) {
            u -= std::norm(phi[b]);
            if (u < 0.0) break;
        }
        shot.q_plus = occupation_mask(static_cast<std::uint64_t>(b), psi_.n.fermionic());
        return shot;
    }

  private:
    StateVector psi_;
    std::vector<FloCircuit> circuits_;
};

/// Worker count: JM_THREADS if set, else the hardware concurrency.
inline int configured_threads() {
    int t = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("JM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) t = v;
    }
    return std::max(1, t);
}

inline constexpr std::size_t kShotBatch = 4096;

namespace detail {

/// Runs fn(batch_index, begin, end) over fixed-size batches on up to `threads` workers.
inline void for_each_batch(std::size_t total, int threads, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    const std::size_t batches = (total + kShotBatch - 1) / kShotBatch;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t b = next++; b < batches; b = next++) fn(b, b * kShotBatch, std::min(total, (b + 1) * kShotBatch));
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(batches)));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

}  // namespace detail

struct TargetEstimates {
    std::vector<MajoranaIndexSet> targets;
    std::vector<double> eta;
    std::vector<double> estimate;
    std::vector<double> standard_error;
    std::size_t shots = 0;
};

/// Each shot uses one uniformly random round; every target is post-processed from that same shot.
inline TargetEstimates run_experiment(const StateSource& source, const SettingFamily& family,
                                      const VisibilityCache& cache, const std::vector<MajoranaIndexSet>& targets,
                                      std::size_t shots, std::uint64_t seed, int threads = configured_threads()) {
    if (shots == 0) throw std::invalid_argument("run_experiment: zero shots");
    const std::size_t nt = targets.size();
    const std::size_t batches = (shots + kShotBatch - 1) / kShotBatch;
    std::vector<std::vector<double>> partial(batches);
    detail::for_each_batch(shots, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
        Rng rng(derive_seed(seed, b));
        std::vector<double> sum(nt, 0.0);
        for (std::size_t k = begin; k < end; ++k) {
            const int round = 1 + static_cast<int>(rng.below(family.settings.size()));
            const ShotRecord shot = source.sample(round, rng);
            for (std::size_t t = 0; t < nt; ++t) sum[t] += postprocess(shot, family.settings[round - 1], targets[t], cache, rng);
        }
        partial[b] = std::move(sum);
    });
    TargetEstimates out;
    out.targets = targets;
    out.shots = shots;
    for (std::size_t t = 0; t < nt; ++t) {
        double s = 0.0;
        for (const auto& p : partial) s += p[t];
        const double mean_e = s / static_cast<double>(shots);
        const double eta = cache.effective_eta(targets[t]);
        out.eta.push_back(eta);
        if (eta == 0.0) {
            out.estimate.push_back(std::numeric_limits<double>::quiet_NaN());
            out.standard_error.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        out.estimate.push_back(mean_e / eta);
        out.standard_error.push_back(std::sqrt(std::max(0.0, 1.0 - mean_e * mean_e) / static_cast<double>(shots)) / eta);
    }
    return out;
}

struct HamiltonianEstimate {
    std::size_t samples = 0;
    double mean = 0.0;
    double mean_standard_error = 0.0;
    double variance = 0.0;
    /// Standard error of the sample variance, sqrt((m4 - s^4) / n).
    double variance_standard_error = 0.0;
    std::vector<double> term_estimates;
    std::vector<double> values;
};

/// All rounds per sample (one state copy per round); returns the sample statistics of the single-shot estimator.
inline HamiltonianEstimate run_experiment(const StateSource& source, const SettingFamily& family,
                                          const VisibilityCache& cache, const TermList& terms,
                                          const CoefficientTable& table, double constant, std::size_t samples,
                                          std::uint64_t seed, int threads = configured_threads()) {
    if (samples == 0) throw std::invalid_argument("run_experiment: zero shots");
    const std::size_t batches = (samples + kShotBatch - 1) / kShotBatch;
    std::vector<std::vector<double>> values(batches), term_sums(batches);
    detail::for_each_batch(samples, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
        Rng rng(derive_seed(seed, b));
        std::vector<double> v;
        std::vector<double> ts(terms.size(), 0.0);
        std::vector<ShotRecord> shots(family.settings.size());
        for (std::size_t k = begin; k < end; ++k) {
            for (const auto& s : family.settings) shots[s.round_index - 1] = source.sample(s.round_index, rng);
            v.push_back(hamiltonian_single_shot(shots, terms, cache, table, constant));
            for (const auto& shot : shots) {
                for (std::size_t t = 0; t < terms.size(); ++t) {
                    const double alpha = table.at(shot.round, t);
                    if (alpha == 0.0) continue;
                    const TermEntry& e = cache.at(shot.round, terms.sets[t]);
                    ts[t] += alpha * protocol_output(e.a_mask, e.pair_mask, e.nu, shot.x_mask, shot.q_plus) / e.eta();
                }
            }
        }
        values[b] = std::move(v);
        term_sums[b] = std::move(ts);
    });
    HamiltonianEstimate out;
    out.samples = samples;
    out.term_estimates.assign(terms.size(), 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        out.values.insert(out.values.end(), values[b].begin(), values[b].end());
        for (std::size_t t = 0; t < terms.size(); ++t) out.term_estimates[t] += term_sums[b][t];
    }
    const double n = static_cast<double>(samples);
    for (auto& t : out.term_estimates) t /= n;
    double s = 0.0;
    for (double v : out.values) s += v;
    out.mean = s / n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : out.values) {
        const double d = (v - out.mean) * (v - out.mean);
        m2 += d;
        m4 += d * d;
    }
    out.variance = samples > 1 ? m2 / (n - 1.0) : 0.0;
    m2 /= n;
    m4 /= n;
    out.variance_standard_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    out.mean_standard_error = std::sqrt(out.variance / n);
    return out;
}

}  // namespace jointmeas
