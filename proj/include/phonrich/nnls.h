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

#ifndef PHONRICH_NNLS_H_
#define PHONRICH_NNLS_H_

#include <Eigen/Dense>

namespace phonrich {

struct NnlsResult {
  Eigen::VectorXd x;
  // ||Ax - b||_2 at the returned x.
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Lawson-Hanson active-set solver for min ||Ax - b||_2 subject to x >= 0.
//
// Each passive-set subproblem is solved with a complete orthogonal
// decomposition, so rank-deficient passive sets get their minimum-norm
// least-squares solution. After convergence, columns whose KKT multiplier is
// zero are pooled with the passive set and the minimum-norm solution over
// that face is taken when it stays feasible and optimal; this picks the
// minimum-norm point among tied optima (e.g. identical columns share
// weight equally instead of the first one taking all of it).
//
// `max_iterations` <= 0 means 3 * cols.
NnlsResult SolveNnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_iterations = 0);

}  // namespace phonrich

#endif  // PHONRICH_NNLS_H_
