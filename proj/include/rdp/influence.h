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

#ifndef RDP_INFLUENCE_H_
#define RDP_INFLUENCE_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdp/eigenfeatures.h"
#include "rdp/transforms.h"

namespace rdp {

enum class RankingKey { kWeightEnergy, kAmplitude };

const char* RankingKeyName(RankingKey key);
RankingKey ParseRankingKey(const std::string& name);

// Jacobian columns and the ranking that produced their order. rank_perm[k]
// is the original coefficient index of ranked slot k (0-based).
struct InfluenceWeights {
  Eigen::MatrixXd w;  // M_F x M_P, ranked order
  std::vector<int> rank_perm;
};

struct RankedCoeffs {
  Eigen::VectorXd values;
  std::vector<int> perm;
};

// basis * G with G = BuildOperator(plan, kind). Original coefficient order.
Eigen::MatrixXd Jacobian(const EigenBasis& basis, const WaveletPlan& plan,
                         TransformKind kind);

// Same matrix without materializing G: G is orthogonal, so row i of
// basis * G is the forward transform of eigenface i. Rows run in parallel.
Eigen::MatrixXd JacobianOperatorFree(const EigenBasis& basis,
                                     const WaveletPlan& plan,
                                     TransformKind kind);

namespace serial {
Eigen::MatrixXd JacobianOperatorFree(const EigenBasis& basis,
                                     const WaveletPlan& plan,
                                     TransformKind kind);
}  // namespace serial

// Descending sort key per column; ties go to the lower original index.
// coeffs is only read for kAmplitude.
std::vector<int> RankPermutation(const Eigen::MatrixXd& jac,
                                 const Eigen::VectorXd& coeffs,
                                 RankingKey key);

struct Ranking {
  RankedCoeffs coeffs;
  InfluenceWeights weights;
};

Ranking RankCoefficients(const Eigen::MatrixXd& jac,
                         const Eigen::VectorXd& coeffs, RankingKey key);

// ranked[k] = values[perm[k]] and its inverse.
Eigen::VectorXd ApplyRanking(const Eigen::VectorXd& values,
                             const std::vector<int>& perm);
Eigen::VectorXd UndoRanking(const Eigen::VectorXd& ranked,
                            const std::vector<int>& perm);
Eigen::MatrixXd RankColumns(const Eigen::MatrixXd& jac,
                            const std::vector<int>& perm);

}  // namespace rdp

#endif  // RDP_INFLUENCE_H_
