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

#ifndef RDP_HARNESS_H_
#define RDP_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdp/budget_optim.h"
#include "rdp/eigenfeatures.h"
#include "rdp/image_store.h"
#include "rdp/influence.h"
#include "rdp/mechanism.h"
#include "rdp/metrics.h"
#include "rdp/transforms.h"

namespace rdp {

struct RunConfig {
  std::string manifest_path;
  int levels = 0;  // 0 selects WaveletPlan::Default
  int m_f = 8;
  RankingKey ranking = RankingKey::kWeightEnergy;
  Method method = Method::kRdpLmgd;
  std::vector<double> epsilon0_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  // Budget for calibrate / sanitize; NaN means the first grid value.
  double epsilon0 = std::numeric_limits<double>::quiet_NaN();
  double p = 0.02;
  double eta = 0.05;
  double delta = 1e-3;
  int max_iters = 50000;
  uint64_t seed = 1;
  int repeats = 200;
  std::string output_dir = "rdp_out";
  double radius_slack = 1.1;
  double sensitivity_slack = 1.0;
  double tau_w = kWeightClampTau;
  double active_mass = kActiveMass;
  double euclidean_threshold = kEuclideanThreshold;
  PsnrMode psnr_mode = PsnrMode::kMse;
  GeometricMode geometric_mode = GeometricMode::kZeroAtom;
  LmgdUpdate lmgd_update = LmgdUpdate::kMultiplicative;
  bool write_trace = true;

  // Throws kConfig for unknown keys or unparsable values.
  void Set(const std::string& key, const std::string& value);
  void Validate() const;
  double CalibrationEpsilon() const;
  MechanismParams Params(double epsilon0) const;
  CalibrationOptions CalOptions() const;
};

// Flat "key = value" file; '#' starts a comment line.
RunConfig LoadConfig(const std::string& path);
void ApplyOverride(RunConfig* config, const std::string& assignment);
std::string DumpConfig(const RunConfig& config);

struct LoadedManifest {
  DatasetManifest manifest;
  std::vector<GrayImage> images;  // distinct images, manifest order
  std::vector<std::string> ids;   // file stems
  std::vector<bool> is_subject;
  std::vector<GrayImage> subjects;
  std::vector<GrayImage> impostors;
  GrayImage standard;
};

LoadedManifest LoadManifestImages(const std::string& manifest_path);

struct CalibrationBundle {
  WaveletPlan plan;
  EigenBasis basis;
  SensitivityProfile sensitivity;
  Eigen::VectorXd standard_features;
};

CalibrationBundle BuildBundle(const RunConfig& config,
                              const LoadedManifest& data);
void SaveBundle(const CalibrationBundle& bundle, const std::string& dir);
CalibrationBundle LoadBundle(const std::string& dir);

// Per-cell outcome of the evaluation grid.
struct GridRow {
  int image = 0;
  int method = 0;  // index into GridSpec::methods
  int eps = 0;     // index into GridSpec::epsilon0_grid
  int repeat = 0;
  int k = 0;
  double sigma_t_sq = 0.0;
  double sigma_r_sq = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  bool match_radius = false;
  bool match_euclidean = false;
};

struct GridSpec {
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<double> epsilon0_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  int repeats = 200;
  uint64_t seed = 1;
  PsnrMode psnr_mode = PsnrMode::kMse;
  double euclidean_threshold = kEuclideanThreshold;
};

struct SummaryRow {
  Method method = Method::kRdpNa;
  double epsilon0 = 0.0;
  int n = 0;
  double mean_k = 0.0;
  double mean_sigma_t_sq = 0.0;
  double mean_sigma_r_sq = 0.0;
  // Deviation of the pooled batch means over all images and draws.
  double norm_var_dev = 0.0;
  // Mean over images of each image's batch-mean deviation.
  double norm_var_dev_per_image = 0.0;
  // Mean over draws with finite PSNR (K = 0 draws are noiseless).
  double mean_psnr_db = 0.0;
  int finite_psnr = 0;
  double mean_ssim = 0.0;
  double fnr_radius = 0.0;
  double fnr_euclidean = 0.0;
  double achieved_epsilon = 0.0;
  double cost = 0.0;
  bool converged = true;
};

struct GridOutput {
  std::vector<MechanismPlan> plans;  // eps-major, then method
  std::vector<GridRow> rows;         // sorted (eps, method, image, repeat)
  std::vector<SummaryRow> summary;   // (eps, method)
};

// Calibrates every (epsilon0, method) pair, then sanitizes every image
// `repeats` times per pair. Cell streams derive from the cell key only, so
// output does not depend on scheduling. FNR uses the subject images; the
// radius matcher compares against the standard face, the distance matcher
// against the image's own unperturbed features.
GridOutput RunGrid(const CalibrationBundle& bundle,
                   const std::vector<GrayImage>& images,
                   const std::vector<bool>& is_subject, const GridSpec& spec,
                   const MechanismParams& base,
                   const CalibrationOptions& options);

namespace serial {
GridOutput RunGrid(const CalibrationBundle& bundle,
                   const std::vector<GrayImage>& images,
                   const std::vector<bool>& is_subject, const GridSpec& spec,
                   const MechanismParams& base,
                   const CalibrationOptions& options);
}  // namespace serial

// Reference values published for the LFW / PubFig83 experiments. NaN marks
// a missing field. Used for side-by-side reporting only.
struct PublishedRow {
  const char* dataset;
  const char* method;
  double epsilon0;
  double ssim;
  double fnr;
};

const std::vector<PublishedRow>& PublishedReferences();

void WriteRowsCsv(const GridOutput& grid, const GridSpec& spec,
                  const std::vector<std::string>& ids, double p,
                  const std::string& path);
void WriteSummaryCsv(const GridOutput& grid, const std::string& path);

// Operator-free Jacobian and NA solve timings over sides 16, 32, 64.
struct ComplexityPoint {
  int side = 0;
  int m_p = 0;
  double jacobian_seconds = 0.0;
  double solve_seconds = 0.0;
};

std::vector<ComplexityPoint> ComplexitySmoke(int m_f = 8);

// Growth factor per doubling of M_P between consecutive points.
double GrowthPerDoubling(const ComplexityPoint& a, const ComplexityPoint& b,
                         bool jacobian);

// CLI entry points. Return the process exit status.
int CmdCalibrate(const RunConfig& config, std::ostream& out);
int CmdSanitize(const RunConfig& config, const std::string& image_path,
                const std::string& output_path, std::ostream& out);
int CmdEvaluate(const RunConfig& config, std::ostream& out);
int CmdAttack(const RunConfig& config, std::ostream& out);
int CmdSelftest(std::ostream& out);
int CmdComplexity(std::ostream& out);

}  // namespace rdp

#endif  // RDP_HARNESS_H_
