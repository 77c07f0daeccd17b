// Copyright (c) 2026 The phonrich Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phonrich/nnls.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace phonrich {

namespace {

// Minimum-norm least-squares solution restricted to the columns flagged in
// `in_set`; entries outside the set are zero.
Eigen::VectorXd SolveOnSet(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const std::vector<bool>& in_set) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (in_set[j]) cols.push_back(j);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  if (cols.empty()) return x;
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = a.col(cols[k]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  Eigen::VectorXd z = cod.solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) x(cols[k]) = z(k);
  return x;
}

// Lawson-Hanson active set iterations.
NnlsResult LawsonHanson(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        int max_iterations, double tol) {
  const Eigen::Index n = a.cols();
  const double eps = std::numeric_limits<double>::epsilon();
  NnlsResult result;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  // Columns that failed to enter the passive set since x last changed.
  std::vector<bool> rejected(n, false);
  Eigen::VectorXd w = a.transpose() * (b - a * x);

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && !rejected[j] && w(j) > best_w) {
        best = j;
        best_w = w(j);
      }
    }
    if (best < 0) {
      result.converged = true;
      break;
    }
    passive[best] = true;

    bool first_pass = true;
    bool moved = false;
    while (true) {
      Eigen::VectorXd z = SolveOnSet(a, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        x = z;
        moved = true;
        break;
      }
      if (first_pass && z(best) <= 0.0) {
        // Rounding made the entering column useless; do not cycle on it.
        passive[best] = false;
        rejected[best] = true;
        break;
      }
      first_pass = false;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) {
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
        }
      }
      x += alpha * (z - x);
      moved = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] &&
            x(j) <= eps * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
          passive[j] = false;
          x(j) = 0.0;
        }
      }
      if (std::none_of(passive.begin(), passive.end(),
                       [](bool p) { return p; })) {
        break;
      }
    }
    if (moved) std::fill(rejected.begin(), rejected.end(), false);
    w = a.transpose() * (b - a * x);
  }
  result.iterations = iter;
  result.x = x;
  return result;
}

double DefaultTolerance(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const double eps = std::numeric_limits<double>::epsilon();
  return 10.0 * eps * std::max<double>(1.0, a.norm()) *
         std::max<double>(1.0, b.norm()) *
         static_cast<double>(std::max(a.rows(), a.cols()));
}

// Among all optima of the NNLS problem, returns the one of minimum norm.
// Every optimum has the same fit A x = c and is zero wherever the gradient at
// x is strictly negative, so the optima form {x >= 0 on face F, A_F x = c}.
// Writing x = x0 + N y with x0 = pinv(A_F) c and N an orthonormal null-space
// basis turns this into the least-distance problem min |y| s.t. N y >= -x0,
// which is solved as an NNLS problem in its own right.
Eigen::VectorXd MinimumNormOptimum(const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& gradient,
                                   double tol) {
  const Eigen::Index n = a.cols();
  std::vector<Eigen::Index> face;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (a.col(j).squaredNorm() == 0.0) continue;
    if (x(j) > 0.0 || std::abs(gradient(j)) <= tol) face.push_back(j);
  }
  if (face.empty()) return Eigen::VectorXd::Zero(n);
  const auto k = static_cast<Eigen::Index>(face.size());
  Eigen::MatrixXd af(a.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) af.col(i) = a.col(face[i]);
  const Eigen::VectorXd c = a * x;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(af,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = std::numeric_limits<double>::epsilon() *
                        static_cast<double>(std::max(af.rows(), k)) *
                        (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(k);
  for (Eigen::Index r = 0; r < rank; ++r) {
    x0 += svd.matrixV().col(r) * (svd.matrixU().col(r).dot(c) / sv(r));
  }
  Eigen::VectorXd xf = x0;
  if (rank < k && x0.minCoeff() < 0.0) {
    const Eigen::MatrixXd null = svd.matrixV().rightCols(k - rank);
    // Least distance: min |y| s.t. G y >= h with G = null, h = -x0. With u
    // the NNLS solution of [G^T; h^T] u ~ e_last and r its residual,
    // y = -r_head / r_last.
    Eigen::MatrixXd e(k - rank + 1, k);
    e.topRows(k - rank) = null.transpose();
    e.bottomRows(1) = -x0.transpose();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(k - rank + 1);
    f(k - rank) = 1.0;
    NnlsResult ldp = LawsonHanson(e, f, static_cast<int>(3 * k) + 3,
                                  DefaultTolerance(e, f));
    Eigen::VectorXd r = e * ldp.x - f;
    if (std::abs(r(k - rank)) > 0.0) {
      Eigen::VectorXd y = -r.head(k - rank) / r(k - rank);
      xf = x0 + null * y;
    } else {
      // Numerically infeasible; keep the active-set optimum.
      for (Eigen::Index i = 0; i < k; ++i) xf(i) = x(face[i]);
    }
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < k; ++i) out(face[i]) = std::max(0.0, xf(i));
  return out;
}

}  // namespace

NnlsResult SolveNnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_iterations) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("NNLS: row count of A does not match b");
  }
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * a.cols()) + 3;
  const double tol = DefaultTolerance(a, b);
  NnlsResult result = LawsonHanson(a, b, max_iterations, tol);

  const Eigen::VectorXd gradient = a.transpose() * (b - a * result.x);
  Eigen::VectorXd refined = MinimumNormOptimum(a, result.x, gradient, tol);
  const double old_obj = (a * result.x - b).squaredNorm();
  const double new_obj = (a * refined - b).squaredNorm();
  if (new_obj <= old_obj + 1e-12 * (1.0 + old_obj) &&
      refined.squaredNorm() <= result.x.squaredNorm()) {
    result.x = refined;
  }
  result.residual_norm = (a * result.x - b).norm();
  return result;
}

}  // namespace phonrich
