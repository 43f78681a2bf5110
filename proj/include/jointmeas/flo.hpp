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

// Orthogonal-matrix picture of fermionic linear optics.
//
// An orthogonal R acts by columns: U_R gamma_i U_R^dag = sum_j R(j, i) gamma_j,
// so U_{R1} U_{R2} = U_{R1 R2} and the matrix of a product of unitaries is the
// product of matrices in the same order.

#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jointmeas/majorana.hpp"
#include "jointmeas/random.hpp"

namespace jointmeas {

inline constexpr double kOrthogonalityTolerance = 1e-10;

class OrthogonalMatrix {
  public:
    OrthogonalMatrix() = default;
    explicit OrthogonalMatrix(Eigen::MatrixXd entries, double tol = kOrthogonalityTolerance) : m_(std::move(entries)) {
        if (m_.rows() != m_.cols()) {
            throw std::invalid_argument("OrthogonalMatrix: matrix must be square");
        }
        const double residual = orthogonality_residual(m_);
        if (!(residual <= tol)) {
            throw std::invalid_argument("OrthogonalMatrix: R^T R deviates from identity by " +
                                        std::to_string(residual));
        }
    }

    static OrthogonalMatrix identity(int dim) { return OrthogonalMatrix(Eigen::MatrixXd::Identity(dim, dim)); }

    static double orthogonality_residual(const Eigen::MatrixXd& m) {
        if (m.size() == 0) return 0.0;
        return (m.transpose() * m - Eigen::MatrixXd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    /// 1-based element access matching Majorana labels.
    double at(int row, int col) const { return m_(row - 1, col - 1); }

    OrthogonalMatrix transpose() const { return OrthogonalMatrix(m_.transpose()); }

    OrthogonalMatrix operator*(const OrthogonalMatrix& o) const {
        if (dim() != o.dim()) throw std::invalid_argument("OrthogonalMatrix: dimension mismatch");
        return OrthogonalMatrix(m_ * o.m_);
    }

  private:
    Eigen::MatrixXd m_;
};

/// Bijection on [1, size]; p(i) = image[i - 1].
class ModePermutation {
  public:
    ModePermutation() = default;
    explicit ModePermutation(std::vector<int> image) : image_(std::move(image)) {
        std::vector<bool> seen(image_.size(), false);
        for (int v : image_) {
            if (v < 1 || v > static_cast<int>(image_.size()) || seen[v - 1]) {
                throw std::invalid_argument("ModePermutation: mapping is not a bijection");
            }
            seen[v - 1] = true;
        }
    }

    static ModePermutation identity(int size) {
        std::vector<int> v(size);
        std::iota(v.begin(), v.end(), 1);
        return ModePermutation(std::move(v));
    }

    int size() const { return static_cast<int>(image_.size()); }
    int operator()(int i) const { return image_.at(i - 1); }
    const std::vector<int>& image() const { return image_; }

    ModePermutation inverse() const {
        std::vector<int> inv(image_.size());
        for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i] - 1] = static_cast<int>(i) + 1;
        return ModePermutation(std::move(inv));
    }

    /// (p * q)(i) = p(q(i)).
    ModePermutation operator*(const ModePermutation& q) const {
        if (size() != q.size()) throw std::invalid_argument("ModePermutation: size mismatch");
        std::vector<int> out(image_.size());
        for (int i = 1; i <= size(); ++i) out[i - 1] = (*this)(q(i));
        return ModePermutation(std::move(out));
    }

    MajoranaIndexSet apply(const MajoranaIndexSet& s) const {
        std::vector<int> out;
        out.reserve(s.size());
        for (int i : s) out.push_back((*this)(i));
        return MajoranaIndexSet(std::move(out));
    }

    bool operator==(const ModePermutation&) const = default;

  private:
    std::vector<int> image_;
};

/// R with R(p(i), i) = 1, so that U_R gamma_i U_R^dag = gamma_{p(i)}.
inline OrthogonalMatrix permutation_to_orthogonal(const ModePermutation& p) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p.size(), p.size());
    for (int i = 1; i <= p.size(); ++i) m(p(i) - 1, i - 1) = 1.0;
    return OrthogonalMatrix(std::move(m));
}

/// Matrix of U_resh U_sup U_pair.
inline OrthogonalMatrix compose_setting(const ModePermutation& resh, const OrthogonalMatrix& sup,
                                        const ModePermutation& pair) {
    if (resh.size() != sup.dim() || pair.size() != sup.dim()) {
        throw std::invalid_argument("compose_setting: dimension mismatch");
    }
    return permutation_to_orthogonal(resh) * sup * permutation_to_orthogonal(pair);
}

/// det of the submatrix with the given rows and columns, both in increasing order.
/// The empty minor has determinant 1.
inline double submatrix_det(const Eigen::MatrixXd& r, const MajoranaIndexSet& rows, const MajoranaIndexSet& cols) {
    if (rows.size() != cols.size()) {
        throw std::invalid_argument("submatrix_det: row and column sets differ in size");
    }
    if (rows.max() > r.rows() || cols.max() > r.cols()) {
        throw std::out_of_range("submatrix_det: index exceeds matrix dimension");
    }
    const auto k = static_cast<Eigen::Index>(rows.size());
    switch (k) {
        case 0:
            return 1.0;
        case 1:
            return r(rows[0] - 1, cols[0] - 1);
        case 2:
            return r(rows[0] - 1, cols[0] - 1) * r(rows[1] - 1, cols[1] - 1) -
                   r(rows[0] - 1, cols[1] - 1) * r(rows[1] - 1, cols[0] - 1);
        default:
            break;
    }
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = r(rows[a] - 1, cols[b] - 1);
    }
    return Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
}

inline double submatrix_det(const OrthogonalMatrix& r, const MajoranaIndexSet& rows, const MajoranaIndexSet& cols) {
    return submatrix_det(r.matrix(), rows, cols);
}

/// |det R_{A,B}|: the visibility with which gamma_A is sampled when pairs B are read out.
inline double visibility(const OrthogonalMatrix& r, const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    return std::abs(submatrix_det(r, a, b));
}

enum class BlockFamily { kAuto, kHadamard, kAij };

inline BlockFamily parse_block_family(const std::string& s) {
    if (s == "auto") return BlockFamily::kAuto;
    if (s == "hadamard") return BlockFamily::kHadamard;
    if (s == "aij") return BlockFamily::kAij;
    throw std::invalid_argument("unknown block family '" + s + "' (expected hadamard|aij|auto)");
}

inline std::string to_string(BlockFamily f) {
    switch (f) {
        case BlockFamily::kAuto: return "auto";
        case BlockFamily::kHadamard: return "hadamard";
        case BlockFamily::kAij: return "aij";
    }
    return "?";
}

/// Orthogonal L x L matrix used to superpose the modes of one cluster.
struct FlatBlock {
    int size = 0;
    Eigen::MatrixXd entries;
    double min_abs_entry = 0.0;
    std::string construction;
};

namespace detail {

inline bool is_power_of_two(int l) { return l > 0 && (l & (l - 1)) == 0; }

inline Eigen::MatrixXd sylvester_block(int l) {
    const double h = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd rot(2, 2);
    rot << h, -h, h, h;
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
    while (m.rows() < l) {
        Eigen::MatrixXd next(2 * m.rows(), 2 * m.cols());
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = rot(a, b) * m;
        }
        m = std::move(next);
    }
    return m;
}

/// Diagonal -(L-2)/L, off-diagonal 2/L; equals -(I - (2/L) 11^T).
inline Eigen::MatrixXd reflection_block(int l) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(l, l, 2.0 / l);
    m.diagonal().array() = -static_cast<double>(l - 2) / l;
    return m;
}

}  // namespace detail

inline FlatBlock build_flat_block(int l, BlockFamily family = BlockFamily::kAuto) {
    if (l < 1) throw std::invalid_argument("build_flat_block: size must be positive");
    FlatBlock b;
    b.size = l;
    if (l == 1) {
        b.entries = Eigen::MatrixXd::Ones(1, 1);
        b.construction = "trivial";
    } else if (family != BlockFamily::kAij && detail::is_power_of_two(l)) {
        b.entries = detail::sylvester_block(l);
        b.construction = "sylvester";
    } else if (family == BlockFamily::kHadamard && l != 3) {
        throw std::invalid_argument("build_flat_block: no Hadamard-type block of size " + std::to_string(l));
    } else {
        b.entries = detail::reflection_block(l);
        b.construction = l == 3 ? "almost-hadamard" : "reflection";
    }
    if (OrthogonalMatrix::orthogonality_residual(b.entries) > kOrthogonalityTolerance) {
        throw std::logic_error("build_flat_block: constructed block is not orthogonal");
    }
    b.min_abs_entry = b.entries.cwiseAbs().minCoeff();
    return b;
}

/// Haar-random orthogonal matrix via QR of a Gaussian matrix with sign fix.
inline OrthogonalMatrix random_orthogonal(int dim, Rng& rng) {
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return OrthogonalMatrix(std::move(q), 1e-9);
}

inline ModePermutation random_permutation(int size, Rng& rng) {
    std::vector<int> v(size);
    std::iota(v.begin(), v.end(), 1);
    rng.shuffle(v);
    return ModePermutation(std::move(v));
}

}  // namespace jointmeas
