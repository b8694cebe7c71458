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

#include "rdp/metrics.h"

#include <cmath>
#include <limits>

#include "rdp/budget_optim.h"
#include "rdp/eigenfeatures.h"
#include "rdp/error.h"

namespace rdp {
namespace {

void CheckSameSide(const GrayImage& a, const GrayImage& b) {
  if (a.side != b.side) {
    throw Error(ErrorCode::kDimensionMismatch,
                "sides " + std::to_string(a.side) + " and " +
                    std::to_string(b.side));
  }
}

}  // namespace

double TheoreticalVariance(const Eigen::VectorXd& scales, int k_drawn) {
  if (k_drawn < 0 || k_drawn > scales.size()) {
    throw Error(ErrorCode::kInvalidArgument, "K outside [0, M_P]");
  }
  KahanSum s;
  for (int k = 0; k < k_drawn; ++k) s.Add(scales[k] * scales[k]);
  return 2.0 * s.value();
}

double RealVariance(const GrayImage& orig, const GrayImage& noisy) {
  CheckSameSide(orig, noisy);
  KahanSum s;
  const double* a = orig.pixels.data();
  const double* b = noisy.pixels.data();
  for (Eigen::Index i = 0; i < orig.pixels.size(); ++i) {
    const double d = b[i] - a[i];
    s.Add(d * d);
  }
  return s.value();
}

const char* PsnrModeName(PsnrMode mode) {
  return mode == PsnrMode::kMse ? "mse" : "sum";
}

PsnrMode ParsePsnrMode(const std::string& name) {
  if (name == "mse") return PsnrMode::kMse;
  if (name == "sum") return PsnrMode::kSum;
  throw Error(ErrorCode::kConfig, "unknown psnr mode " + name);
}

double Psnr(const GrayImage& orig, const GrayImage& noisy, PsnrMode mode) {
  const double sr = RealVariance(orig, noisy);
  if (sr == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = noisy.pixels.maxCoeff();
  const double denom =
      mode == PsnrMode::kMse ? sr / static_cast<double>(noisy.pixels.size())
                             : sr;
  return 10.0 * std::log10(peak * peak / denom);
}

double Ssim(const GrayImage& a, const GrayImage& b) {
  CheckSameSide(a, b);
  const double n = static_cast<double>(a.pixels.size());
  const double mu_a = a.pixels.mean();
  const double mu_b = b.pixels.mean();
  const Eigen::ArrayXXd da = a.pixels.array() - mu_a;
  const Eigen::ArrayXXd db = b.pixels.array() - mu_b;
  const double var_a = da.square().sum() / n;
  const double var_b = db.square().sum() / n;
  const double cov = (da * db).sum() / n;
  return ((2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2)) /
         ((mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2));
}

const char* MatcherName(Matcher m) {
  return m == Matcher::kRadius ? "radius" : "euclidean";
}

double Fnr(const std::vector<SanitizeResult>& results,
           const Eigen::VectorXd& standard, Matcher matcher,
           const Eigen::VectorXd& param) {
  if (results.empty()) throw Error(ErrorCode::kEmptyInput, "no results");
  int misses = 0;
  for (const auto& r : results) {
    const bool ok = matcher == Matcher::kRadius
                        ? Matches(r.noisy_features, standard, param)
                        : MatchesEuclidean(r.noisy_features, standard,
                                           param[0]);
    if (!ok) ++misses;
  }
  return static_cast<double>(misses) / static_cast<double>(results.size());
}

double NormalizedVarianceDeviation(double mean_sigma_r_sq,
                                   double mean_sigma_t_sq) {
  if (!(mean_sigma_t_sq > 0.0)) {
    throw Error(ErrorCode::kZeroDenominator, "theoretical variance is zero");
  }
  return std::abs(mean_sigma_r_sq - mean_sigma_t_sq) / mean_sigma_t_sq;
}

}  // namespace rdp
