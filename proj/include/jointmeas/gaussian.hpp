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


// Fermionic Gaussian states as covariance matrices
// Gamma_jk = (i/2) tr(rho [gamma_j, gamma_k]), so <gamma_{j,k}> = Gamma_jk for j < k.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "jointmeas/flo.hpp"
#include "jointmeas/majorana.hpp"
#include "jointmeas/pfaffian.hpp"
#include "jointmeas/random.hpp"

namespace jointmeas {

inline constexpr double kProbabilityClamp = 1e-9;

/// q_i in {+1, -1} for each standard pair (2i-1, 2i).
using PairOutcomes = std::vector<int>;

class GaussianState {
  public:
    GaussianState() = default;
    explicit GaussianState(Eigen::MatrixXd cov) : cov_(std::move(cov)) {
        if (cov_.rows() != cov_.cols() || cov_.rows() % 2 != 0 || cov_.rows() == 0) {
            throw std::invalid_argument("GaussianState: covariance must be 2N x 2N");
        }
        if (antisymmetry_residual(cov_) > kAntisymmetryTolerance) {
            throw std::invalid_argument("GaussianState: covariance is not antisymmetric");
        }
    }

    /// Gamma = 0: the maximally mixed state.
    static GaussianState maximally_mixed(ModeCount n) {
        return GaussianState(Eigen::MatrixXd::Zero(n.majorana(), n.majorana()));
    }

    ModeCount modes() const { return ModeCount::from_majorana(static_cast<int>(cov_.rows())); }
    const Eigen::MatrixXd& cov() const { return cov_; }
    Eigen::MatrixXd& mutable_cov() { return cov_; }

    /// Largest singular value of Gamma minus one; <= 0 for a physical state.
    double physicality_excess() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_.transpose() * cov_);
        return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())) - 1.0;
    }

  private:
    Eigen::MatrixXd cov_;
};

/// |n_1, ..., n_N> with <gamma_{2i-1,2i}> = 2 n_i - 1.
inline GaussianState init_fock(const std::vector<int>& occupations) {
    if (occupations.empty()) throw std::invalid_argument("init_fock: need at least one mode");
    const int n = static_cast<int>(occupations.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        if (occupations[i] != 0 && occupations[i] != 1) throw std::invalid_argument("init_fock: occupations are bits");
        const double v = 2.0 * occupations[i] - 1.0;
        g(2 * i, 2 * i + 1) = v;
        g(2 * i + 1, 2 * i) = -v;
    }
    return GaussianState(std::move(g));
}

/// State after U_R: Gamma -> R Gamma R^T.
inline GaussianState apply_orthogonal(const GaussianState& s, const OrthogonalMatrix& r) {
    if (r.dim() != s.cov().rows()) throw std::invalid_argument("apply_orthogonal: dimension mismatch");
    Eigen::MatrixXd g = r.matrix() * s.cov() * r.matrix().transpose();
    g = 0.5 * (g - g.transpose());
    return GaussianState(std::move(g));
}

/// State after U_R^dag: Gamma -> R^T Gamma R.
inline GaussianState apply_orthogonal_adjoint(const GaussianState& s, const OrthogonalMatrix& r) {
    if (r.dim() != s.cov().rows()) throw std::invalid_argument("apply_orthogonal_adjoint: dimension mismatch");
    Eigen::MatrixXd g = r.matrix().transpose() * s.cov() * r.matrix();
    g = 0.5 * (g - g.transpose());
    return GaussianState(std::move(g));
}

/// Signs s_j with gamma_X^dag gamma_j gamma_X = s_j gamma_j.
inline Eigen::VectorXd conjugation_signs(int n_majorana, const MajoranaIndexSet& x) {
    Eigen::VectorXd s(n_majorana);
    const int size = static_cast<int>(x.size());
    for (int j = 1; j <= n_majorana; ++j) s(j - 1) = ((size - (x.contains(j) ? 1 : 0)) % 2 == 0) ? 1.0 : -1.0;
    return s;
}

/// rho -> gamma_X^dag rho gamma_X.
inline GaussianState conjugate_monomial(const GaussianState& st, const MajoranaIndexSet& x) {
    x.check_range(st.modes());
    const Eigen::VectorXd s = conjugation_signs(static_cast<int>(st.cov().rows()), x);
    return GaussianState(s.asDiagonal() * st.cov() * s.asDiagonal());
}

/// tr(rho gamma_A) = Pf(Gamma restricted to A).
inline double expectation(const GaussianState& st, const MajoranaIndexSet& a) {
    if (!a.even()) throw std::invalid_argument("expectation: odd observable " + a.to_string());
    a.check_range(st.modes());
    const Eigen::Index k = static_cast<Eigen::Index>(a.size());
    if (k == 0) return 1.0;
    if (k == 2) return st.cov()(a[0] - 1, a[1] - 1);
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = st.cov()(a[i] - 1, a[j] - 1);
    return pfaffian(std::move(sub));
}

namespace detail {

/// Measures the standard pairs in order on `g` in place; bit i-1 of the result is set iff q_i = +1.
inline std::uint64_t sample_pairs_in_place(Eigen::MatrixXd& g, Rng& rng) {
    const Eigen::Index dim = g.rows();
    std::uint64_t plus = 0;
    for (Eigen::Index a = 0; a + 1 < dim; a += 2) {
        const Eigen::Index b = a + 1;
        const double gab = g(a, b);
        double p = 0.5 * (1.0 + gab);
        if (p < -kProbabilityClamp || p > 1.0 + kProbabilityClamp) {
            throw std::runtime_error("sample_pair_outcomes: probability " + std::to_string(p) +
                                     " outside [0, 1]; state is unphysical");
        }
        p = std::clamp(p, 0.0, 1.0);
        const int q = rng.uniform() < p ? 1 : -1;
        if (q == 1) plus |= std::uint64_t{1} << (a / 2);
        const double denom = 1.0 + q * gab;
        const Eigen::Index rest = dim - b - 1;
        if (rest > 0 && denom > 1e-12 && 1.0 - std::abs(gab) > 1e-12) {
            const Eigen::VectorXd ca = g.col(a).tail(rest);
            const Eigen::VectorXd cb = g.col(b).tail(rest);
            // Gamma'_jk = Gamma_jk + q (Gamma_jb Gamma_ka - Gamma_ja Gamma_kb) / (1 + q Gamma_ab)
            g.bottomRightCorner(rest, rest).noalias() += (q / denom) * (cb * ca.transpose() - ca * cb.transpose());
        }
        g.row(a).setZero();
        g.row(b).setZero();
        g.col(a).setZero();
        g.col(b).setZero();
        g(a, b) = q;
        g(b, a) = -q;
    }
    return plus;
}

}  // namespace detail

/// Samples q from the joint distribution of the N standard pair parities and
/// returns the post-measurement state.
inline std::pair<PairOutcomes, GaussianState> sample_pair_outcomes(const GaussianState& st, Rng& rng) {
    Eigen::MatrixXd g = st.cov();
    const std::uint64_t plus = detail::sample_pairs_in_place(g, rng);
    PairOutcomes q(g.rows() / 2);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = (plus >> i) & 1 ? 1 : -1;
    return {std::move(q), GaussianState(std::move(g))};
}

/// U_R applied to a Fock state, with R Haar-random on O(2N).
inline GaussianState random_gaussian_state(ModeCount n, Rng& rng) {
    std::vector<int> occ(n.fermionic());
    for (auto& o : occ) o = rng.coin() ? 1 : 0;
    return apply_orthogonal(init_fock(occ), random_orthogonal(n.majorana(), rng));
}

}  // namespace jointmeas
