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

#include "rdp/influence.h"

#include <algorithm>
#include <numeric>

#include "rdp/error.h"

namespace rdp {
namespace {

void CheckBasisPlan(const EigenBasis& basis, const WaveletPlan& plan) {
  if (basis.m_p() != plan.side * plan.side) {
    throw Error(ErrorCode::kDimensionMismatch,
                "basis has " + std::to_string(basis.m_p()) +
                    " pixels, plan side " + std::to_string(plan.side));
  }
}

}  // namespace

const char* RankingKeyName(RankingKey key) {
  return key == RankingKey::kWeightEnergy ? "weight_energy" : "amplitude";
}

RankingKey ParseRankingKey(const std::string& name) {
  if (name == "weight_energy") return RankingKey::kWeightEnergy;
  if (name == "amplitude") return RankingKey::kAmplitude;
  throw Error(ErrorCode::kConfig, "unknown ranking key " + name);
}

Eigen::MatrixXd Jacobian(const EigenBasis& basis, const WaveletPlan& plan,
                         TransformKind kind) {
  CheckBasisPlan(basis, plan);
  return basis.basis * BuildOperator(plan, kind);
}

Eigen::MatrixXd JacobianOperatorFree(const EigenBasis& basis,
                                     const WaveletPlan& plan,
                                     TransformKind kind) {
  CheckBasisPlan(basis, plan);
  const int m_f = basis.m_f();
  Eigen::MatrixXd w(m_f, basis.m_p());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m_f; ++i) {
    const Eigen::VectorXd row = basis.basis.row(i).transpose();
    w.row(i) = Forward(kind, row, plan).transpose();
  }
  return w;
}

namespace serial {

Eigen::MatrixXd JacobianOperatorFree(const EigenBasis& basis,
                                     const WaveletPlan& plan,
                                     TransformKind kind) {
  CheckBasisPlan(basis, plan);
  Eigen::MatrixXd w(basis.m_f(), basis.m_p());
  for (int i = 0; i < basis.m_f(); ++i) {
    const Eigen::VectorXd row = basis.basis.row(i).transpose();
    w.row(i) = Forward(kind, row, plan).transpose();
  }
  return w;
}

}  // namespace serial

std::vector<int> RankPermutation(const Eigen::MatrixXd& jac,
                                 const Eigen::VectorXd& coeffs,
                                 RankingKey key) {
  Eigen::VectorXd score;
  if (key == RankingKey::kWeightEnergy) {
    score = jac.colwise().squaredNorm().transpose();
  } else {
    if (coeffs.size() != jac.cols()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "coefficient length differs from Jacobian columns");
    }
    score = coeffs.cwiseAbs();
  }
  std::vector<int> perm(score.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&score](int a, int b) { return score[a] > score[b]; });
  return perm;
}

Ranking RankCoefficients(const Eigen::MatrixXd& jac,
                         const Eigen::VectorXd& coeffs, RankingKey key) {
  if (coeffs.size() != jac.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "coefficient length differs from Jacobian columns");
  }
  Ranking out;
  const std::vector<int> perm = RankPermutation(jac, coeffs, key);
  out.coeffs.values = ApplyRanking(coeffs, perm);
  out.coeffs.perm = perm;
  out.weights.w = RankColumns(jac, perm);
  out.weights.rank_perm = perm;
  return out;
}

Eigen::VectorXd ApplyRanking(const Eigen::VectorXd& values,
                             const std::vector<int>& perm) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(perm.size()));
  for (size_t k = 0; k < perm.size(); ++k) out[k] = values[perm[k]];
  return out;
}

Eigen::VectorXd UndoRanking(const Eigen::VectorXd& ranked,
                            const std::vector<int>& perm) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(perm.size()));
  for (size_t k = 0; k < perm.size(); ++k) out[perm[k]] = ranked[k];
  return out;
}

Eigen::MatrixXd RankColumns(const Eigen::MatrixXd& jac,
                            const std::vector<int>& perm) {
  Eigen::MatrixXd out(jac.rows(), static_cast<Eigen::Index>(perm.size()));
  for (size_t k = 0; k < perm.size(); ++k) out.col(k) = jac.col(perm[k]);
  return out;
}

}  // namespace rdp
