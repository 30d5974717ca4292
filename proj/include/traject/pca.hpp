// Copyright (c) 2026, The traject Authors
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
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "traject/types.hpp"

namespace traject {

struct PcaProjection {
  std::size_t components = 0;
  std::vector<double> coords;             // L x components, row-major
  std::vector<double> explained_variance; // per component, descending
  bool degenerate = false;                // no variance at all (constant trajectory)

  double at(std::size_t layer, std::size_t c) const { return coords[layer * components + c]; }
};

/// Projects the trajectory onto its top principal components. Lossy; meant
/// for plotting only.
///
/// The eigenproblem is solved on the L x L Gram matrix of the centered
/// points, which shares its nonzero spectrum with the D x D covariance and
/// stays small when D is large. Each principal axis is sign-fixed so its
/// largest-magnitude coordinate is positive (first such coordinate on ties).
/// Components with no variance project to zero.
inline PcaProjection pca_project(const Trajectory& traj, std::size_t components = 2) {
  const std::size_t L = traj.size();
  const std::size_t D = traj.dim();
  Eigen::MatrixXd X(L, D);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t d = 0; d < D; ++d) X(l, d) = traj[l][d];
  X.rowwise() -= X.colwise().mean();

  const Eigen::MatrixXd gram = X * X.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const double tiny = 1e-12 * std::max(1.0, gram.trace());

  PcaProjection p;
  p.components = components;
  p.coords.assign(L * components, 0.0);
  p.explained_variance.assign(components, 0.0);
  p.degenerate = !(gram.trace() > tiny);

  for (std::size_t c = 0; c < components && c < L; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(L - 1 - c);
    const double lambda = values(col);
    if (!(lambda > tiny)) break;
    Eigen::VectorXd axis = X.transpose() * solver.eigenvectors().col(col);
    axis /= axis.norm();
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < axis.size(); ++i)
      if (std::abs(axis(i)) > std::abs(axis(big))) big = i;
    if (axis(big) < 0) axis = -axis;
    const Eigen::VectorXd scores = X * axis;
    for (std::size_t l = 0; l < L; ++l) p.coords[l * components + c] = scores(static_cast<Eigen::Index>(l));
    p.explained_variance[c] = lambda / static_cast<double>(L > 1 ? L - 1 : 1);
  }
  return p;
}

}  // namespace traject
