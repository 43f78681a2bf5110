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


#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace jointmeas {

inline constexpr double kAntisymmetryTolerance = 1e-10;

inline double antisymmetry_residual(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return (m + m.transpose()).cwiseAbs().maxCoeff();
}

/// Pfaffian of a real antisymmetric matrix by Parlett-Reid reduction with
/// partial pivoting. The 0 x 0 matrix has Pfaffian 1.
inline double pfaffian(Eigen::MatrixXd a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("pfaffian: matrix must be square");
    const Eigen::Index n = a.rows();
    if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension " + std::to_string(n));
    if (antisymmetry_residual(a) > kAntisymmetryTolerance) {
        throw std::invalid_argument("pfaffian: matrix is not antisymmetric");
    }
    double pf = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index kp;
        a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
        kp += k + 1;
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        if (a(k + 1, k) == 0.0) return 0.0;
        pf *= a(k, k + 1);
        if (k + 2 < n) {
            const Eigen::Index m = n - k - 2;
            const Eigen::VectorXd tau = a.row(k).tail(m).transpose() / a(k, k + 1);
            const Eigen::VectorXd col = a.col(k + 1).tail(m);
            a.bottomRightCorner(m, m).noalias() += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

}  // namespace jointmeas
