//
// Copyright 2026 The RDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef RDP_EIGENFEATURES_H_
#define RDP_EIGENFEATURES_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdp/image_store.h"

namespace rdp {

// Thin SVD of an m x n matrix (m >= n) by one-sided Jacobi rotations.
// Singular values are sorted non-increasing.
struct SvdResult {
  Eigen::MatrixXd u;  // m x n, orthonormal columns where sigma > 0
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;  // n x n
  int sweeps = 0;
};

inline constexpr double kJacobiTolerance = 1e-10;
inline constexpr int kJacobiMaxSweeps = 100;

SvdResult JacobiSvd(const Eigen::MatrixXd& a, double tol = kJacobiTolerance,
                    int max_sweeps = kJacobiMaxSweeps);

struct EigenBasis {
  int side = 0;
  Eigen::VectorXd mean_face;        // M_P
  Eigen::MatrixXd basis;            // M_F x M_P, orthonormal rows
  Eigen::VectorXd singular_values;  // M_F

  int m_f() const { return static_cast<int>(basis.rows()); }
  int m_p() const { return static_cast<int>(basis.cols()); }
};

// Eigenfaces are the top right singular vectors of the mean-centred gallery
// (rows = images). Each row's largest-magnitude entry is made positive.
EigenBasis FitEigenbasis(const std::vector<GrayImage>& gallery, int m_f);

Eigen::VectorXd Project(const EigenBasis& basis, const GrayImage& img);
Eigen::VectorXd ProjectFlat(const EigenBasis& basis,
                            const Eigen::VectorXd& pixels);

struct SensitivityProfile {
  Eigen::VectorXd deltas;  // per-element sensitivity
  Eigen::VectorXd radii;   // identification radii
};

struct SensitivityOptions {
  double radius_slack = 1.1;
  double sensitivity_slack = 1.0;
};

// Empirical sensitivity over subject x impostor pairs, and radii from the
// subject images around the standard face.
SensitivityProfile EstimateSensitivity(
    const EigenBasis& basis, const std::vector<GrayImage>& subjects,
    const std::vector<GrayImage>& impostors, const GrayImage& standard,
    const SensitivityOptions& options = {});

// Radius matcher: |f_i - s_i| <= r_i for every i.
bool Matches(const Eigen::VectorXd& f, const Eigen::VectorXd& standard,
             const Eigen::VectorXd& radii);

inline constexpr double kEuclideanThreshold = 0.975;

// Both vectors are scaled to unit L2 norm, then compared with '<'.
bool MatchesEuclidean(const Eigen::VectorXd& f,
                      const Eigen::VectorXd& standard,
                      double threshold = kEuclideanThreshold);

// Little-endian file: "RDPB", u32 version, u32 side, u32 m_f, then mean,
// singular values and basis rows as f64.
void SaveEigenbasis(const EigenBasis& basis, const std::string& path);
EigenBasis LoadEigenbasis(const std::string& path);

}  // namespace rdp

#endif  // RDP_EIGENFEATURES_H_
