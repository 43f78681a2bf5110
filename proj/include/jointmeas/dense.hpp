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


// Exact small-N reference simulator.
//
// Qubit j (1-based) is bit N - j of a basis index, so qubit 1 is the most
// significant bit and dense operators follow the usual kron ordering. Under
// Jordan-Wigner, gamma_{2j-1} = Z..Z X_j and gamma_{2j} = Z..Z Y_j.

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "jointmeas/flo.hpp"
#include "jointmeas/gaussian.hpp"
#include "jointmeas/hamiltonian.hpp"
#include "jointmeas/majorana.hpp"
#include "jointmeas/schemes.hpp"

namespace jointmeas {

using cplx = std::complex<double>;

inline constexpr int kDenseOperatorCap = 8;
inline constexpr int kMatrixFreeCap = 16;
inline constexpr int kDenseFloCap = 5;
inline constexpr int kProtocolEnumerationCap = 4;

inline void check_cap(ModeCount n, int cap, const char* what) {
    if (n.fermionic() > cap) {
        throw std::invalid_argument(std::string(what) + ": N = " + std::to_string(n.fermionic()) +
                                    " exceeds the cap of " + std::to_string(cap));
    }
}

inline cplx phase_value(Phase p) {
    static const cplx values[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return values[p.power()];
}

/// phase * X^x Z^z on N qubits (bit k of x, z acts on qubit N - k).
struct PauliString {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    Phase phase = Phase::one();

    PauliString operator*(const PauliString& o) const {
        PauliString r;
        r.x = x ^ o.x;
        r.z = z ^ o.z;
        r.phase = phase * o.phase;
        if (std::popcount(z & o.x) % 2) r.phase = r.phase * Phase::minus_one();
        return r;
    }

    PauliString dagger() const {
        PauliString r{x, z, phase.conj()};
        if (std::popcount(x & z) % 2) r.phase = r.phase * Phase::minus_one();
        return r;
    }

    /// out += coeff * P in.
    void apply_add(const Eigen::VectorXcd& in, Eigen::VectorXcd& out, cplx coeff = 1.0) const {
        const cplx c = coeff * phase_value(phase);
        const std::uint64_t dim = static_cast<std::uint64_t>(in.size());
        for (std::uint64_t b = 0; b < dim; ++b) {
            const cplx v = std::popcount(z & b) % 2 ? -in[b] : in[b];
            out[b ^ x] += c * v;
        }
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
        apply_add(in, out);
        return out;
    }

    Eigen::MatrixXcd to_dense(ModeCount n) const {
        const Eigen::Index dim = Eigen::Index{1} << n.fermionic();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        const cplx c = phase_value(phase);
        for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
            m(b ^ x, b) = std::popcount(z & b) % 2 ? -c : c;
        }
        return m;
    }
};

inline PauliString jw_pauli(ModeCount n, int i) {
    if (i < 1 || i > n.majorana()) throw std::out_of_range("jw_pauli: index " + std::to_string(i) + " out of range");
    const int nq = n.fermionic();
    const int qubit = (i + 1) / 2;
    PauliString p;
    p.x = std::uint64_t{1} << (nq - qubit);
    for (int k = 1; k < qubit; ++k) p.z |= std::uint64_t{1} << (nq - k);
    if (i % 2 == 0) {
        // Y = i X Z
        p.z |= p.x;
        p.phase = Phase::i();
    }
    return p;
}

/// Plain ordered product gamma_{a_1} ... gamma_{a_k} (no i^{k/2} prefactor); any size.
inline PauliString ordered_product(ModeCount n, const MajoranaIndexSet& a) {
    PauliString p;
    for (int i : a) p = p * jw_pauli(n, i);
    return p;
}

/// gamma_A = i^{|A|/2} prod_{i in A} gamma_i.
inline PauliString monomial_pauli(ModeCount n, const MajoranaIndexSet& a) {
    if (!a.even()) throw std::invalid_argument("monomial_pauli: odd set " + a.to_string());
    PauliString p = ordered_product(n, a);
    p.phase = p.phase * Phase(static_cast<int>(a.size() / 2));
    return p;
}

inline Eigen::MatrixXcd jw_gamma(ModeCount n, int i) {
    check_cap(n, kDenseOperatorCap, "jw_gamma");
    return jw_pauli(n, i).to_dense(n);
}

inline Eigen::MatrixXcd dense_monomial(ModeCount n, const MajoranaIndexSet& a) {
    check_cap(n, kDenseOperatorCap, "dense_monomial");
    a.check_range(n);
    return monomial_pauli(n, a).to_dense(n);
}

// ---------------------------------------------------------------------------
// State vectors

struct StateVector {
    ModeCount n;
    Eigen::VectorXcd amp;

    StateVector() = default;
    StateVector(ModeCount modes, Eigen::VectorXcd amplitudes) : n(modes), amp(std::move(amplitudes)) {
        if (amp.size() != (Eigen::Index{1} << n.fermionic())) throw std::invalid_argument("StateVector: size is not 2^N");
        if (std::abs(amp.norm() - 1.0) > 1e-10) throw std::invalid_argument("StateVector: not normalized");
    }

    static StateVector basis(ModeCount modes, std::uint64_t index) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << modes.fermionic());
        v[static_cast<Eigen::Index>(index)] = 1.0;
        return StateVector(modes, std::move(v));
    }

    /// Fock state with occupation n_j on qubit j.
    static StateVector fock(const std::vector<int>& occupations) {
        const ModeCount modes(static_cast<int>(occupations.size()));
        std::uint64_t idx = 0;
        for (int j = 1; j <= modes.fermionic(); ++j)
            if (occupations[j - 1]) idx |= std::uint64_t{1} << (modes.fermionic() - j);
        return basis(modes, idx);
    }

    static StateVector random(ModeCount modes, Rng& rng) {
        check_cap(modes, kMatrixFreeCap, "StateVector::random");
        Eigen::VectorXcd v(Eigen::Index{1} << modes.fermionic());
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = cplx(rng.normal(), rng.normal());
        v.normalize();
        return StateVector(modes, std::move(v));
    }
};

/// <psi| gamma_A |psi>.
inline double expectation(const StateVector& psi, const MajoranaIndexSet& a) {
    a.check_range(psi.n);
    const PauliString p = monomial_pauli(psi.n, a);
    const cplx c = phase_value(p.phase);
    cplx acc = 0.0;
    const std::uint64_t dim = static_cast<std::uint64_t>(psi.amp.size());
    for (std::uint64_t b = 0; b < dim; ++b) {
        const cplx v = std::popcount(p.z & b) % 2 ? -psi.amp[b] : psi.amp[b];
        acc += std::conj(psi.amp[b ^ p.x]) * v;
    }
    return (c * acc).real();
}

/// psi tensor |0...0> on `total` modes; the added qubits are the trailing ones.
inline StateVector extend_with_vacuum(const StateVector& psi, ModeCount total) {
    if (total < psi.n) throw std::invalid_argument("extend_with_vacuum: target smaller than state");
    check_cap(total, kMatrixFreeCap, "extend_with_vacuum");
    const int shift = total.fermionic() - psi.n.fermionic();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << total.fermionic());
    for (Eigen::Index b = 0; b < psi.amp.size(); ++b) v[b << shift] = psi.amp[b];
    return StateVector(total, std::move(v));
}

// ---------------------------------------------------------------------------
// FLO unitaries

/// U_R = U_{G_1} ... U_{G_k} U_D, with U_G = cos(phi) + sin(phi) gamma_a gamma_b.
class FloCircuit {
  public:
    struct Rotation {
        int a = 0;
        int b = 0;
        double cos_phi = 1.0;
        double sin_phi = 0.0;
        PauliString pair;
    };

    FloCircuit() = default;

    FloCircuit(ModeCount n, const OrthogonalMatrix& r) : n_(n) {
        check_cap(n, kMatrixFreeCap, "FloCircuit");
        if (r.dim() != n.majorana()) throw std::invalid_argument("FloCircuit: dimension mismatch");
        Eigen::MatrixXd m = r.matrix();
        const Eigen::Index dim = m.rows();
        for (Eigen::Index j = 0; j < dim; ++j) {
            for (Eigen::Index i = j + 1; i < dim; ++i) {
                if (m(i, j) == 0.0) continue;
                const double rad = std::hypot(m(j, j), m(i, j));
                const double c = m(j, j) / rad;
                const double s = m(i, j) / rad;
                const Eigen::RowVectorXd rj = m.row(j);
                m.row(j) = c * rj + s * m.row(i);
                m.row(i) = -s * rj + c * m.row(i);
                const double phi = -0.5 * std::atan2(s, c);
                Rotation rot;
                rot.a = static_cast<int>(j) + 1;
                rot.b = static_cast<int>(i) + 1;
                rot.cos_phi = std::cos(phi);
                rot.sin_phi = std::sin(phi);
                rot.pair = jw_pauli(n, rot.a) * jw_pauli(n, rot.b);
                rotations_.push_back(rot);
            }
        }
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (m(j, j) > 0.0) continue;
            std::vector<int> others;
            for (int k = 1; k <= n.majorana(); ++k)
                if (k != j + 1) others.push_back(k);
            parity_ = parity_ * ordered_product(n, MajoranaIndexSet::from_sorted(std::move(others)));
        }
    }

    ModeCount modes() const { return n_; }
    const std::vector<Rotation>& rotations() const { return rotations_; }

    /// U psi.
    Eigen::VectorXcd apply(Eigen::VectorXcd psi) const {
        psi = parity_.apply(psi);
        for (auto it = rotations_.rbegin(); it != rotations_.rend(); ++it) psi = rotate(*it, psi, +1.0);
        return psi;
    }

    /// U^dag psi.
    Eigen::VectorXcd apply_adjoint(Eigen::VectorXcd psi) const {
        for (const auto& rot : rotations_) psi = rotate(rot, psi, -1.0);
        return parity_.dagger().apply(psi);
    }

    Eigen::MatrixXcd to_dense() const {
        const Eigen::Index dim = Eigen::Index{1} << n_.fermionic();
        Eigen::MatrixXcd u(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) u.col(k) = apply(Eigen::VectorXcd::Unit(dim, k));
        return u;
    }

  private:
    static Eigen::VectorXcd rotate(const Rotation& rot, const Eigen::VectorXcd& psi, double sign) {
        Eigen::VectorXcd out = rot.cos_phi * psi;
        rot.pair.apply_add(psi, out, sign * rot.sin_phi);
        return out;
    }

    ModeCount n_;
    std::vector<Rotation> rotations_;
    PauliString parity_;
};

/// Dense U with U gamma_i U^dag = sum_j R_ji gamma_j; global phase unspecified.
inline Eigen::MatrixXcd dense_flo(ModeCount n, const OrthogonalMatrix& r) {
    check_cap(n, kDenseFloCap, "dense_flo");
    return FloCircuit(n, r).to_dense();
}

// ---------------------------------------------------------------------------
// Hamiltonians and ground states

/// Matrix-free sum of Pauli strings with complex weights.
struct PauliSum {
    ModeCount n;
    std::vector<std::pair<cplx, PauliString>> terms;
    double constant = 0.0;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out = constant * v;
        for (const auto& [c, p] : terms) p.apply_add(v, out, c);
        return out;
    }
};

inline PauliSum to_pauli_sum(const HamiltonianSpec& h) {
    check_cap(h.n, kMatrixFreeCap, "to_pauli_sum");
    PauliSum s{h.n, {}, h.constant};
    for (const auto& [a, c] : h.terms) s.terms.emplace_back(c, monomial_pauli(h.n, a));
    return s;
}

struct GroundState {
    double energy = 0.0;
    StateVector state;
    double residual = 0.0;
};

namespace detail {

inline GroundState lanczos_ground_state(const PauliSum& op, std::uint64_t seed) {
    const Eigen::Index dim = Eigen::Index{1} << op.n.fermionic();
    const Eigen::Index krylov = std::min<Eigen::Index>(dim, 120);
    Rng rng(seed);
    Eigen::VectorXcd v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = cplx(rng.normal(), rng.normal());
    v.normalize();

    GroundState best;
    for (int restart = 0; restart < 50; ++restart) {
        Eigen::MatrixXcd basis(dim, krylov);
        Eigen::VectorXd alpha(krylov), beta(krylov);
        basis.col(0) = v;
        Eigen::Index m = 0;
        for (; m < krylov; ++m) {
            Eigen::VectorXcd w = op.apply(basis.col(m));
            alpha[m] = basis.col(m).dot(w).real();
            // Full reorthogonalization, applied twice for stability.
            for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).adjoint() * w);
            beta[m] = w.norm();
            if (m + 1 == krylov || beta[m] < 1e-12) {
                ++m;
                break;
            }
            basis.col(m + 1) = w / beta[m];
        }
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index k = 0; k < m; ++k) {
            t(k, k) = alpha[k];
            if (k + 1 < m) t(k, k + 1) = t(k + 1, k) = beta[k];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        v = basis.leftCols(m) * es.eigenvectors().col(0).cast<cplx>();
        v.normalize();
        const Eigen::VectorXcd hv = op.apply(v);
        const double e = v.dot(hv).real();
        best.energy = e;
        best.residual = (hv - e * v).norm();
        if (best.residual < 1e-10) break;
    }
    best.state = StateVector(op.n, v);
    return best;
}

}  // namespace detail

/// Lowest eigenpair of H: dense diagonalization for N <= 8, Lanczos up to N = 16.
inline GroundState ground_state(const HamiltonianSpec& h) {
    validate(h);
    check_cap(h.n, kMatrixFreeCap, "ground_state");
    const PauliSum op = to_pauli_sum(h);
    GroundState gs;
    if (h.n.fermionic() <= kDenseOperatorCap) {
        const Eigen::Index dim = Eigen::Index{1} << h.n.fermionic();
        Eigen::MatrixXcd m(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) m.col(k) = op.apply(Eigen::VectorXcd::Unit(dim, k));
        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (herm > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
            throw std::runtime_error("ground_state: assembled Hamiltonian is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        gs.energy = es.eigenvalues()[0];
        Eigen::VectorXcd v = es.eigenvectors().col(0);
        // Fix the global phase so the largest amplitude is real and positive.
        Eigen::Index k;
        v.cwiseAbs().maxCoeff(&k);
        v *= std::abs(v[k]) / v[k];
        v.normalize();
        gs.residual = (m * v - gs.energy * v).norm();
        gs.state = StateVector(h.n, std::move(v));
    } else {
        gs = detail::lanczos_ground_state(op, 0x5eed);
    }
    if (gs.residual > 1e-8) {
        throw std::runtime_error("ground_state: eigen-residual " + std::to_string(gs.residual) + " above 1e-8");
    }
    return gs;
}

// ---------------------------------------------------------------------------
// Exact protocol enumeration

struct OutcomeDistribution {
    double p_plus = 0.0;
    double p_minus = 0.0;

    double mean() const { return p_plus - p_minus; }
};

/// Mask of standard pairs i (bit i-1) with {2i-1, 2i} inside `b`; `b` must be a union of standard pairs.
inline std::uint64_t standard_pair_mask(const MajoranaIndexSet& b) {
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < b.size(); k += 2) {
        if (b[k] % 2 != 1 || k + 1 >= b.size() || b[k + 1] != b[k] + 1) {
            throw std::invalid_argument("standard_pair_mask: " + b.to_string() + " is not a union of standard pairs");
        }
        m |= std::uint64_t{1} << ((b[k] - 1) / 2);
    }
    return m;
}

/// Bit i-1 set iff qubit i is occupied (q_i = +1) in basis index `b`.
inline std::uint64_t occupation_mask(std::uint64_t b, int n_qubits) {
    std::uint64_t m = 0;
    for (int i = 1; i <= n_qubits; ++i)
        if ((b >> (n_qubits - i)) & 1) m |= std::uint64_t{1} << (i - 1);
    return m;
}

/// Calls visit(x_mask, q_plus_mask, probability) for every X subset of [2N] and
/// every outcome q of steps (i)-(iii), with X uniform.
inline void enumerate_protocol(const FloCircuit& circuit, const StateVector& psi,
                               const std::function<void(std::uint64_t, std::uint64_t, double)>& visit) {
    const ModeCount n = psi.n;
    check_cap(n, kProtocolEnumerationCap, "enumerate_protocol");
    const std::uint64_t n_x = std::uint64_t{1} << n.majorana();
    const double weight = 1.0 / static_cast<double>(n_x);
    for (std::uint64_t x = 0; x < n_x; ++x) {
        const PauliString gx = ordered_product(n, MajoranaIndexSet::from_mask(x));
        const Eigen::VectorXcd phi = circuit.apply_adjoint(gx.dagger().apply(psi.amp));
        for (Eigen::Index b = 0; b < phi.size(); ++b) {
            const double p = std::norm(phi[b]);
            if (p > 0.0) visit(x, occupation_mask(static_cast<std::uint64_t>(b), n.fermionic()), weight * p);
        }
    }
}

/// e_A = s (-1)^{|A cap X|} prod_{i in B'} q_i with s = sign det R_{A,B}.
inline int protocol_output(std::uint64_t a_mask, std::uint64_t pair_mask, double nu, std::uint64_t x_mask,
                           std::uint64_t q_plus_mask) {
    int e = nu < 0.0 ? -1 : 1;
    if (std::popcount(a_mask & x_mask) % 2) e = -e;
    if (std::popcount(pair_mask & ~q_plus_mask) % 2) e = -e;
    return e;
}

/// Exact distribution of e_A for target pairs B under the rotation R, by enumeration.
inline OutcomeDistribution exact_protocol_distribution(const OrthogonalMatrix& r, const StateVector& psi,
                                                       const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    check_cap(psi.n, kProtocolEnumerationCap, "exact_protocol_distribution");
    if (!a.even() || a.size() != b.size()) throw std::invalid_argument("exact_protocol_distribution: bad A or B");
    a.check_range(psi.n);
    b.check_range(psi.n);
    const FloCircuit circuit(psi.n, r);
    const double nu = submatrix_det(r, a, b);
    const std::uint64_t am = a.mask(), pm = standard_pair_mask(b);
    OutcomeDistribution d;
    enumerate_protocol(circuit, psi, [&](std::uint64_t x, std::uint64_t q, double p) {
        (protocol_output(am, pm, nu, x, q) > 0 ? d.p_plus : d.p_minus) += p;
    });
    return d;
}

/// Gaussian route: E[prod_{B'} q] under the rotated, conjugated state is Pf(Gamma''_B).
inline OutcomeDistribution exact_protocol_distribution(const OrthogonalMatrix& r, const GaussianState& st,
                                                       const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    const ModeCount n = st.modes();
    check_cap(n, kProtocolEnumerationCap, "exact_protocol_distribution");
    if (!a.even() || a.size() != b.size()) throw std::invalid_argument("exact_protocol_distribution: bad A or B");
    a.check_range(n);
    b.check_range(n);
    standard_pair_mask(b);
    const double nu = submatrix_det(r, a, b);
    const std::uint64_t n_x = std::uint64_t{1} << n.majorana();
    OutcomeDistribution d;
    for (std::uint64_t x = 0; x < n_x; ++x) {
        const auto xs = MajoranaIndexSet::from_mask(x);
        const double qb = expectation(apply_orthogonal_adjoint(conjugate_monomial(st, xs), r), b);
        double mean = (nu < 0.0 ? -1.0 : 1.0) * qb;
        if (intersection_size(a, xs) % 2) mean = -mean;
        d.p_plus += 0.5 * (1.0 + mean) / static_cast<double>(n_x);
        d.p_minus += 0.5 * (1.0 - mean) / static_cast<double>(n_x);
    }
    return d;
}

/// Distribution of e_A in one round; e_A is a fair coin when the round cannot read A out.
template <typename State>
OutcomeDistribution exact_protocol_distribution(const MeasurementSetting& setting, const State& rho,
                                                const MajoranaIndexSet& a) {
    const auto target = best_target(setting, a);
    if (!target || target->nu == 0.0) return {0.5, 0.5};
    return exact_protocol_distribution(setting.composed, rho, a, target->pairs);
}

}  // namespace jointmeas
