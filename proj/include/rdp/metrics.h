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

#ifndef RDP_METRICS_H_
#define RDP_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdp/image_store.h"
#include "rdp/mechanism.h"

namespace rdp {

struct MetricReport {
  double sigma_t_sq = 0.0;
  double sigma_r_sq = 0.0;
  double norm_var_dev = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::optional<double> fnr;
};

// 2 * sum_{k <= K} b_k^2 (ranked order). K = 0 gives 0.
double TheoreticalVariance(const Eigen::VectorXd& scales, int k_drawn);

// Sum (not mean) of squared pixel deviations.
double RealVariance(const GrayImage& orig, const GrayImage& noisy);

enum class PsnrMode { kMse, kSum };

const char* PsnrModeName(PsnrMode mode);
PsnrMode ParsePsnrMode(const std::string& name);

// Peak is max of the noisy pixel vector. kMse divides the squared peak by
// sigma_r^2 / M_P, kSum by sigma_r^2. Identical images give +infinity.
double Psnr(const GrayImage& orig, const GrayImage& noisy,
            PsnrMode mode = PsnrMode::kMse);

inline constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
inline constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);

// Single-window SSIM over the whole image (population moments).
double Ssim(const GrayImage& a, const GrayImage& b);

enum class Matcher { kRadius, kEuclidean };

const char* MatcherName(Matcher m);

// Fraction of results whose noisy features fail the matcher. `param` holds
// the radii for kRadius; for kEuclidean its first entry is the threshold.
double Fnr(const std::vector<SanitizeResult>& results,
           const Eigen::VectorXd& standard, Matcher matcher,
           const Eigen::VectorXd& param);

// |sigma_r - sigma_t| / sigma_t for batch means.
double NormalizedVarianceDeviation(double mean_sigma_r_sq,
                                   double mean_sigma_t_sq);

}  // namespace rdp

#endif  // RDP_METRICS_H_
