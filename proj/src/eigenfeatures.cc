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

#include "rdp/eigenfeatures.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rdp/binary_io.h"
#include "rdp/error.h"

namespace rdp {
namespace {

// Singular values below this fraction of the largest count as zero.
constexpr double kRankTolerance = 1e-9;

constexpr uint32_t kBasisVersion = 1;

void CheckDims(const EigenBasis& basis, Eigen::Index n) {
  if (basis.mean_face.size() != n || basis.basis.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image has " + std::to_string(n) + " pixels, basis expects " +
                    std::to_string(basis.basis.cols()));
  }
}

void CheckSameLength(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature lengths differ");
  }
}

}  // namespace

SvdResult JacobiSvd(const Eigen::MatrixXd& a, double tol, int max_sweeps) {
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd u = a;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  // Columns at rounding level carry no rank; rotating them never settles.
  const double scale = std::numeric_limits<double>::epsilon() * a.norm();
  const double negligible = scale * scale;

  int sweep = 0;
  bool rotated = true;
  while (rotated) {
    if (sweep == max_sweeps) {
      throw Error(ErrorCode::kNonConvergence,
                  "Jacobi SVD did not converge in " +
                      std::to_string(max_sweeps) + " sweeps");
    }
    ++sweep;
    rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = u.col(p).squaredNorm();
        const double beta = u.col(q).squaredNorm();
        const double gamma = u.col(p).dot(u.col(q));
        if (alpha <= negligible || beta <= negligible) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::MatrixXd* m : {&u, &v}) {
          const Eigen::VectorXd mp = m->col(p);
          m->col(p) = c * mp - s * m->col(q);
          m->col(q) = s * mp + c * m->col(q);
        }
      }
    }
  }

  Eigen::VectorXd sigma(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sigma[j] = u.col(j).norm();
    if (sigma[j] > 0.0) u.col(j) /= sigma[j];
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&sigma](Eigen::Index x, Eigen::Index y) {
                     return sigma[x] > sigma[y];
                   });
  SvdResult out;
  out.u.resize(a.rows(), n);
  out.v.resize(n, n);
  out.sigma.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.u.col(j) = u.col(order[j]);
    out.v.col(j) = v.col(order[j]);
    out.sigma[j] = sigma[order[j]];
  }
  out.sweeps = sweep;
  return out;
}

EigenBasis FitEigenbasis(const std::vector<GrayImage>& gallery, int m_f) {
  if (gallery.size() < 2) {
    throw Error(ErrorCode::kGalleryTooSmall,
                "need at least 2 images, got " +
                    std::to_string(gallery.size()));
  }
  const int side = gallery.front().side;
  const Eigen::Index m_p = static_cast<Eigen::Index>(side) * side;
  const Eigen::Index n = static_cast<Eigen::Index>(gallery.size());
  if (m_f < 1 || m_f > std::min<Eigen::Index>(n - 1, m_p)) {
    throw Error(ErrorCode::kInvalidArgument,
                "m_f=" + std::to_string(m_f) + " outside [1, " +
                    std::to_string(std::min<Eigen::Index>(n - 1, m_p)) + "]");
  }

  // Columns are images, so the left singular vectors are the eigenfaces.
  Eigen::MatrixXd cols(m_p, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (gallery[j].side != side) {
      throw Error(ErrorCode::kDimensionMismatch, "gallery sides differ");
    }
    cols.col(j) = Flatten(gallery[j]);
  }
  EigenBasis out;
  out.side = side;
  out.mean_face = cols.rowwise().mean();
  cols.colwise() -= out.mean_face;

  const SvdResult svd = JacobiSvd(cols);
  const double top = svd.sigma.size() > 0 ? svd.sigma[0] : 0.0;
  int nonzero = 0;
  for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) {
    if (top > 0.0 && svd.sigma[j] > kRankTolerance * top) ++nonzero;
  }
  if (nonzero < m_f) {
    throw Error(ErrorCode::kRankDeficient,
                std::to_string(nonzero) + " nonzero singular values, m_f=" +
                    std::to_string(m_f));
  }

  out.basis.resize(m_f, m_p);
  out.singular_values = svd.sigma.head(m_f);
  for (int i = 0; i < m_f; ++i) {
    Eigen::VectorXd row = svd.u.col(i);
    Eigen::Index arg = 0;
    row.cwiseAbs().maxCoeff(&arg);
    if (row[arg] < 0.0) row = -row;
    out.basis.row(i) = row.transpose();
  }
  return out;
}

Eigen::VectorXd ProjectFlat(const EigenBasis& basis,
                            const Eigen::VectorXd& pixels) {
  CheckDims(basis, pixels.size());
  return basis.basis * (pixels - basis.mean_face);
}

Eigen::VectorXd Project(const EigenBasis& basis, const GrayImage& img) {
  return ProjectFlat(basis, Flatten(img));
}

SensitivityProfile EstimateSensitivity(
    const EigenBasis& basis, const std::vector<GrayImage>& subjects,
    const std::vector<GrayImage>& impostors, const GrayImage& standard,
    const SensitivityOptions& options) {
  if (subjects.empty() || impostors.empty()) {
    throw Error(ErrorCode::kEmptyClass,
                "need at least one subject and one impostor image");
  }
  const int m_f = basis.m_f();
  std::vector<Eigen::VectorXd> fs, fi;
  for (const auto& img : subjects) fs.push_back(Project(basis, img));
  for (const auto& img : impostors) fi.push_back(Project(basis, img));
  const Eigen::VectorXd f_std = Project(basis, standard);

  SensitivityProfile out;
  out.deltas = Eigen::VectorXd::Zero(m_f);
  out.radii = Eigen::VectorXd::Zero(m_f);
  for (const auto& a : fs) {
    for (const auto& b : fi) {
      out.deltas = out.deltas.cwiseMax((a - b).cwiseAbs());
    }
    out.radii = out.radii.cwiseMax((a - f_std).cwiseAbs());
  }
  out.deltas *= options.sensitivity_slack;
  out.radii *= options.radius_slack;
  for (int i = 0; i < m_f; ++i) {
    if (!(out.deltas[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "zero sensitivity for feature " + std::to_string(i));
    }
    if (!(out.radii[i] > 0.0)) {
      throw Error(ErrorCode::kDegenerateRadius,
                  "zero radius for feature " + std::to_string(i));
    }
  }
  return out;
}

bool Matches(const Eigen::VectorXd& f, const Eigen::VectorXd& standard,
             const Eigen::VectorXd& radii) {
  CheckSameLength(f, standard);
  CheckSameLength(f, radii);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (std::abs(f[i] - standard[i]) > radii[i]) return false;
  }
  return true;
}

bool MatchesEuclidean(const Eigen::VectorXd& f,
                      const Eigen::VectorXd& standard, double threshold) {
  CheckSameLength(f, standard);
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  }
  const double nf = f.norm();
  const double ns = standard.norm();
  if (nf == 0.0 || ns == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a zero feature");
  }
  return (f / nf - standard / ns).norm() < threshold;
}

void SaveEigenbasis(const EigenBasis& basis, const std::string& path) {
  BinaryWriter out(path);
  out.Magic("RDPB");
  out.U32(kBasisVersion);
  out.U32(static_cast<uint32_t>(basis.side));
  out.U32(static_cast<uint32_t>(basis.m_f()));
  out.F64s(basis.mean_face.data(), basis.mean_face.size());
  out.F64s(basis.singular_values.data(), basis.singular_values.size());
  for (int i = 0; i < basis.m_f(); ++i) {
    const Eigen::VectorXd row = basis.basis.row(i).transpose();
    out.F64s(row.data(), row.size());
  }
  out.Close();
}

EigenBasis LoadEigenbasis(const std::string& path) {
  BinaryReader in(path);
  in.ExpectMagic("RDPB");
  if (in.U32() != kBasisVersion) {
    throw Error(ErrorCode::kMalformedHeader, path + ": basis version");
  }
  EigenBasis out;
  out.side = static_cast<int>(in.U32());
  const int m_f = static_cast<int>(in.U32());
  if (!IsPowerOfTwo(out.side) || out.side > 4096 || m_f < 1) {
    throw Error(ErrorCode::kMalformedHeader, path + ": basis header");
  }
  const Eigen::Index m_p = static_cast<Eigen::Index>(out.side) * out.side;
  out.mean_face.resize(m_p);
  in.F64s(out.mean_face.data(), m_p);
  out.singular_values.resize(m_f);
  in.F64s(out.singular_values.data(), m_f);
  out.basis.resize(m_f, m_p);
  Eigen::VectorXd row(m_p);
  for (int i = 0; i < m_f; ++i) {
    in.F64s(row.data(), m_p);
    out.basis.row(i) = row.transpose();
  }
  return out;
}

}  // namespace rdp
