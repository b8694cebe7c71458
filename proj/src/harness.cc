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

#include "rdp/harness.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "rdp/error.h"
#include "rdp/synthetic_gallery.h"

namespace rdp {
namespace {

namespace fs = std::filesystem;

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || errno == ERANGE) {
    throw Error(ErrorCode::kConfig, key + ": not a number: '" + value + "'");
  }
  return v;
}

long long ParseInt(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0' || errno == ERANGE) {
    throw Error(ErrorCode::kConfig, key + ": not an integer: '" + value + "'");
  }
  return v;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw Error(ErrorCode::kConfig, key + ": expected true/false");
}

std::vector<double> ParseList(const std::string& key,
                              const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseDouble(key, Trim(item)));
  return out;
}

std::string ListString(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + Fmt(v[i]);
  return s;
}

std::string Stem(const std::string& path) {
  return fs::path(path).stem().string();
}

std::string BundlePath(const RunConfig& config, const std::string& name) {
  return (fs::path(config.output_dir) / name).string();
}

std::string PlanFile(Method m) {
  return std::string("plan_") + MethodName(m) + ".bin";
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir);
}

std::ofstream OpenText(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  return out;
}

GridSpec SpecFor(const RunConfig& config) {
  GridSpec spec;
  spec.epsilon0_grid = config.epsilon0_grid;
  spec.repeats = config.repeats;
  spec.seed = config.seed;
  spec.psnr_mode = config.psnr_mode;
  spec.euclidean_threshold = config.euclidean_threshold;
  return spec;
}

void CheckBundleMatches(const CalibrationBundle& bundle,
                        const LoadedManifest& data) {
  if (data.standard.side != bundle.basis.side) {
    throw Error(ErrorCode::kCalibrationMismatch,
                "calibration side " + std::to_string(bundle.basis.side) +
                    " but images have side " +
                    std::to_string(data.standard.side));
  }
}

}  // namespace

void RunConfig::Set(const std::string& key, const std::string& value) {
  if (key == "manifest") {
    manifest_path = value;
  } else if (key == "levels") {
    levels = static_cast<int>(ParseInt(key, value));
  } else if (key == "m_f") {
    m_f = static_cast<int>(ParseInt(key, value));
  } else if (key == "ranking") {
    ranking = ParseRankingKey(value);
  } else if (key == "method") {
    method = ParseMethod(value);
  } else if (key == "epsilon0_grid") {
    epsilon0_grid = ParseList(key, value);
  } else if (key == "epsilon0") {
    epsilon0 = ParseDouble(key, value);
  } else if (key == "p") {
    p = ParseDouble(key, value);
  } else if (key == "eta") {
    eta = ParseDouble(key, value);
  } else if (key == "delta") {
    delta = ParseDouble(key, value);
  } else if (key == "max_iters") {
    max_iters = static_cast<int>(ParseInt(key, value));
  } else if (key == "seed") {
    seed = static_cast<uint64_t>(ParseInt(key, value));
  } else if (key == "repeats") {
    repeats = static_cast<int>(ParseInt(key, value));
  } else if (key == "output_dir") {
    output_dir = value;
  } else if (key == "radius_slack") {
    radius_slack = ParseDouble(key, value);
  } else if (key == "sensitivity_slack") {
    sensitivity_slack = ParseDouble(key, value);
  } else if (key == "tau_w") {
    tau_w = ParseDouble(key, value);
  } else if (key == "active_mass") {
    active_mass = ParseDouble(key, value);
  } else if (key == "euclidean_threshold") {
    euclidean_threshold = ParseDouble(key, value);
  } else if (key == "psnr_mode") {
    psnr_mode = ParsePsnrMode(value);
  } else if (key == "geometric_mode") {
    geometric_mode = ParseGeometricMode(value);
  } else if (key == "lmgd_update") {
    lmgd_update = ParseLmgdUpdate(value);
  } else if (key == "trace") {
    write_trace = ParseBool(key, value);
  } else {
    throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  }
}

void RunConfig::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kConfig, msg);
  };
  if (manifest_path.empty()) fail("manifest is not set");
  if (m_f < 1) fail("m_f must be >= 1");
  if (levels < 0) fail("levels must be >= 0");
  if (epsilon0_grid.empty()) fail("epsilon0_grid is empty");
  for (double e : epsilon0_grid) {
    if (!(e > 0.0) || !std::isfinite(e)) fail("epsilon0_grid entries must be positive");
  }
  if (!std::isnan(epsilon0) && !(epsilon0 > 0.0)) fail("epsilon0 must be > 0");
  if (!(p > 0.0 && p < 1.0)) fail("p must lie in (0, 1)");
  if (!(eta >= 0.001 && eta <= 1.0)) fail("eta must lie in [0.001, 1]");
  if (!(delta > 0.0)) fail("delta must be > 0");
  if (max_iters < 1) fail("max_iters must be >= 1");
  if (repeats < 1) fail("repeats must be >= 1");
  if (output_dir.empty()) fail("output_dir is empty");
  if (!(radius_slack > 0.0) || !(sensitivity_slack > 0.0)) {
    fail("slack factors must be > 0");
  }
  if (!(tau_w >= 0.0)) fail("tau_w must be >= 0");
  if (!(active_mass > 0.0 && active_mass <= 1.0)) {
    fail("active_mass must lie in (0, 1]");
  }
  if (!(euclidean_threshold > 0.0)) fail("euclidean_threshold must be > 0");
}

double RunConfig::CalibrationEpsilon() const {
  return std::isnan(epsilon0) ? epsilon0_grid.front() : epsilon0;
}

MechanismParams RunConfig::Params(double eps) const {
  MechanismParams params;
  params.epsilon0 = eps;
  params.p = p;
  params.eta = eta;
  params.delta = delta;
  params.max_iters = max_iters;
  params.seed = seed;
  return params;
}

CalibrationOptions RunConfig::CalOptions() const {
  CalibrationOptions opts;
  opts.ranking = ranking;
  opts.mode = geometric_mode;
  opts.lmgd.update = lmgd_update;
  opts.lmgd.record_trace = write_trace;
  opts.tau_w = tau_w;
  opts.active_mass = active_mass;
  return opts;
}

void ApplyOverride(RunConfig* config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::kConfig, "expected key=value, got '" + assignment + "'");
  }
  config->Set(Trim(assignment.substr(0, eq)), Trim(assignment.substr(eq + 1)));
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config " + path);
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      ApplyOverride(&config, t);
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  // Relative manifest paths are taken relative to the config file.
  if (!config.manifest_path.empty() &&
      fs::path(config.manifest_path).is_relative()) {
    config.manifest_path =
        (fs::path(path).parent_path() / config.manifest_path).string();
  }
  return config;
}

std::string DumpConfig(const RunConfig& c) {
  std::ostringstream out;
  out << "manifest=" << c.manifest_path << "\n"
      << "levels=" << c.levels << "\n"
      << "m_f=" << c.m_f << "\n"
      << "ranking=" << RankingKeyName(c.ranking) << "\n"
      << "method=" << MethodName(c.method) << "\n"
      << "epsilon0_grid=" << ListString(c.epsilon0_grid) << "\n"
      << "epsilon0=" << Fmt(c.CalibrationEpsilon()) << "\n"
      << "p=" << Fmt(c.p) << "\n"
      << "eta=" << Fmt(c.eta) << "\n"
      << "delta=" << Fmt(c.delta) << "\n"
      << "max_iters=" << c.max_iters << "\n"
      << "seed=" << c.seed << "\n"
      << "repeats=" << c.repeats << "\n"
      << "output_dir=" << c.output_dir << "\n"
      << "radius_slack=" << Fmt(c.radius_slack) << "\n"
      << "sensitivity_slack=" << Fmt(c.sensitivity_slack) << "\n"
      << "tau_w=" << Fmt(c.tau_w) << "\n"
      << "active_mass=" << Fmt(c.active_mass) << "\n"
      << "euclidean_threshold=" << Fmt(c.euclidean_threshold) << "\n"
      << "psnr_mode=" << PsnrModeName(c.psnr_mode) << "\n"
      << "geometric_mode=" << GeometricModeName(c.geometric_mode) << "\n"
      << "lmgd_update=" << LmgdUpdateName(c.lmgd_update) << "\n"
      << "trace=" << (c.write_trace ? "true" : "false") << "\n";
  return out.str();
}

LoadedManifest LoadManifestImages(const std::string& manifest_path) {
  LoadedManifest out;
  out.manifest = LoadManifest(manifest_path);
  const DatasetManifest& m = out.manifest;
  std::map<std::string, GrayImage> cache;
  auto load = [&cache](const std::string& path) -> const GrayImage& {
    auto it = cache.find(path);
    if (it == cache.end()) it = cache.emplace(path, LoadImage(path)).first;
    return it->second;
  };
  for (const auto& p : m.subject_images) out.subjects.push_back(load(p));
  for (const auto& p : m.impostor_images) out.impostors.push_back(load(p));
  out.standard = load(m.standard_image);

  std::set<std::string> seen;
  std::set<std::string> subject_set(m.subject_images.begin(),
                                    m.subject_images.end());
  std::vector<std::string> order(m.subject_images);
  order.insert(order.end(), m.impostor_images.begin(), m.impostor_images.end());
  order.push_back(m.standard_image);
  for (const auto& p : order) {
    if (!seen.insert(p).second) continue;
    const GrayImage& img = load(p);
    if (img.side != out.standard.side) {
      throw Error(ErrorCode::kDimensionMismatch,
                  p + " has side " + std::to_string(img.side) +
                      ", standard has " + std::to_string(out.standard.side));
    }
    out.images.push_back(img);
    out.ids.push_back(Stem(p));
    out.is_subject.push_back(subject_set.count(p) > 0);
  }
  return out;
}

CalibrationBundle BuildBundle(const RunConfig& config,
                              const LoadedManifest& data) {
  CalibrationBundle b;
  const int side = data.standard.side;
  b.plan = config.levels > 0 ? WaveletPlan{side, config.levels}
                             : WaveletPlan::Default(side);
  b.plan.Validate();
  b.basis = FitEigenbasis(data.images, config.m_f);
  SensitivityOptions sopts;
  sopts.radius_slack = config.radius_slack;
  sopts.sensitivity_slack = config.sensitivity_slack;
  b.sensitivity = EstimateSensitivity(b.basis, data.subjects, data.impostors,
                                      data.standard, sopts);
  b.standard_features = Project(b.basis, data.standard);
  return b;
}

void SaveBundle(const CalibrationBundle& bundle, const std::string& dir) {
  EnsureDir(dir);
  SaveEigenbasis(bundle.basis, (fs::path(dir) / "basis.bin").string());
  const std::string sens_path = (fs::path(dir) / "sensitivity.csv").string();
  std::ofstream out = OpenText(sens_path);
  out << "# side=" << bundle.plan.side << " levels=" << bundle.plan.levels
      << "\n";
  out << "i,delta,radius,standard_feature\n";
  for (Eigen::Index i = 0; i < bundle.sensitivity.deltas.size(); ++i) {
    out << i << "," << Fmt(bundle.sensitivity.deltas[i]) << ","
        << Fmt(bundle.sensitivity.radii[i]) << ","
        << Fmt(bundle.standard_features[i]) << "\n";
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + sens_path);
}

CalibrationBundle LoadBundle(const std::string& dir) {
  const std::string basis_path = (fs::path(dir) / "basis.bin").string();
  if (!fs::exists(basis_path)) {
    throw Error(ErrorCode::kCalibrationMissing,
                basis_path + " (run calibrate first)");
  }
  CalibrationBundle b;
  b.basis = LoadEigenbasis(basis_path);
  const std::string sens_path = (fs::path(dir) / "sensitivity.csv").string();
  std::ifstream in(sens_path);
  if (!in) throw Error(ErrorCode::kCalibrationMissing, sens_path);
  std::string line;
  auto malformed = [&sens_path]() {
    return Error(ErrorCode::kMalformedHeader, sens_path);
  };
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "# side=%d levels=%d", &b.plan.side,
                  &b.plan.levels) != 2) {
    throw malformed();
  }
  b.plan.Validate();
  if (!std::getline(in, line)) throw malformed();
  const int m_f = b.basis.m_f();
  b.sensitivity.deltas.resize(m_f);
  b.sensitivity.radii.resize(m_f);
  b.standard_features.resize(m_f);
  for (int i = 0; i < m_f; ++i) {
    if (!std::getline(in, line)) throw malformed();
    std::stringstream ss(line);
    std::string f[4];
    for (auto& s : f) {
      if (!std::getline(ss, s, ',')) throw malformed();
    }
    b.sensitivity.deltas[i] = ParseDouble("delta", f[1]);
    b.sensitivity.radii[i] = ParseDouble("radius", f[2]);
    b.standard_features[i] = ParseDouble("standard_feature", f[3]);
  }
  if (b.plan.side != b.basis.side) {
    throw Error(ErrorCode::kCalibrationMismatch, "bundle side disagreement");
  }
  return b;
}

int CmdCalibrate(const RunConfig& config, std::ostream& out) {
  config.Validate();
  if (!fs::exists(config.manifest_path)) {
    throw Error(ErrorCode::kConfig,
                "manifest not found: " + config.manifest_path);
  }
  const LoadedManifest data = LoadManifestImages(config.manifest_path);
  const CalibrationBundle bundle = BuildBundle(config, data);
  SaveBundle(bundle, config.output_dir);

  const double eps = config.CalibrationEpsilon();
  const MechanismParams params = config.Params(eps);
  const CalibrationOptions opts = config.CalOptions();
  out << "side=" << bundle.plan.side << " levels=" << bundle.plan.levels
      << " m_f=" << bundle.basis.m_f() << " m_p=" << bundle.basis.m_p()
      << " images=" << data.images.size() << "\n";

  std::ofstream summary = OpenText(BundlePath(config, "calibration.txt"));
  summary << DumpConfig(config);
  bool selected_converged = true;
  for (Method m : kAllMethods) {
    const MechanismPlan plan = Calibrate(m, bundle.basis,
                                         bundle.sensitivity.deltas,
                                         bundle.plan, params, opts);
    SaveMechanismPlan(plan, BundlePath(config, PlanFile(m)));
    std::ostringstream line;
    line << "method=" << MethodName(m) << " epsilon0=" << Fmt(eps)
         << " achieved_epsilon=" << Fmt(plan.achieved_epsilon)
         << " cost=" << Fmt(plan.cost);
    if (m == Method::kRdpLmgd && !std::isinf(eps)) {
      line << " converged=" << (plan.converged ? 1 : 0)
           << " iterations=" << plan.iterations << " F1=" << Fmt(plan.f1)
           << " F2=" << Fmt(plan.f2) << " F=" << Fmt(plan.f1 + plan.f2);
      if (config.write_trace) {
        LmgdResult trace;
        trace.trace = plan.trace;
        WriteTraceCsv(trace, BundlePath(config, "lmgd_trace.csv"));
      }
    }
    if (m == config.method) selected_converged = plan.converged;
    out << line.str() << "\n";
    summary << line.str() << "\n";
  }
  if (!summary) throw Error(ErrorCode::kIoFailure, "calibration.txt");
  if (!selected_converged) {
    out << "error: LMGD did not reach F < delta within max_iters\n";
    return 3;
  }
  return 0;
}

int CmdSanitize(const RunConfig& config, const std::string& image_path,
                const std::string& output_path, std::ostream& out) {
  const CalibrationBundle bundle = LoadBundle(config.output_dir);
  const std::string plan_path = BundlePath(config, PlanFile(config.method));
  if (!fs::exists(plan_path)) {
    throw Error(ErrorCode::kCalibrationMissing, plan_path);
  }
  const MechanismPlan mplan = LoadMechanismPlan(plan_path);
  const double eps = config.CalibrationEpsilon();
  if (!(mplan.epsilon0 == eps) || mplan.p != config.p ||
      mplan.mode != config.geometric_mode) {
    throw Error(ErrorCode::kCalibrationMismatch,
                "stored plan was calibrated with different parameters; "
                "rerun calibrate");
  }
  const GrayImage img = LoadImage(image_path);
  const std::string dest =
      output_path.empty()
          ? BundlePath(config, Stem(image_path) + "_sanitized.pgm")
          : output_path;
  const SanitizeResult res = Sanitize(img, bundle.basis, mplan, config.seed, 0);
  SaveImage(res.noisy_image, dest);

  // Features of the file as written (after clamping and rounding).
  const Eigen::VectorXd saved = Project(bundle.basis, LoadImage(dest));
  const std::string sidecar = dest + ".txt";
  WriteSidecar(res, mplan, sidecar);
  std::ofstream side_out(sidecar, std::ios::app);
  side_out << "saved_features=";
  for (Eigen::Index i = 0; i < saved.size(); ++i) {
    side_out << (i ? "," : "") << Fmt(saved[i]);
  }
  side_out << "\n";
  if (!side_out) throw Error(ErrorCode::kIoFailure, "write failed: " + sidecar);
  out << "wrote " << dest << " K=" << res.k_drawn << "\n";
  return 0;
}

int CmdEvaluate(const RunConfig& config, std::ostream& out) {
  config.Validate();
  const CalibrationBundle bundle = LoadBundle(config.output_dir);
  const LoadedManifest data = LoadManifestImages(config.manifest_path);
  CheckBundleMatches(bundle, data);
  const GridSpec spec = SpecFor(config);
  const GridOutput grid =
      RunGrid(bundle, data.images, data.is_subject, spec,
              config.Params(spec.epsilon0_grid.front()), config.CalOptions());
  WriteRowsCsv(grid, spec, data.ids, config.p,
               BundlePath(config, "eval_rows.csv"));
  WriteSummaryCsv(grid, BundlePath(config, "eval_summary.csv"));
  char buf[256];
  out << "method       eps0   mean_psnr_db  mean_ssim  norm_var_dev  "
         "fnr_radius\n";
  for (const SummaryRow& s : grid.summary) {
    std::snprintf(buf, sizeof buf, "%-12s %-6.3g %12.4f %10.6f %13.5f %11.4f\n",
                  MethodName(s.method), s.epsilon0, s.mean_psnr_db,
                  s.mean_ssim, s.norm_var_dev, s.fnr_radius);
    out << buf;
  }
  return 0;
}

int CmdAttack(const RunConfig& config, std::ostream& out) {
  config.Validate();
  const CalibrationBundle bundle = LoadBundle(config.output_dir);
  const LoadedManifest data = LoadManifestImages(config.manifest_path);
  CheckBundleMatches(bundle, data);
  std::vector<bool> all_subject(data.subjects.size(), true);
  const GridSpec spec = SpecFor(config);
  const GridOutput grid =
      RunGrid(bundle, data.subjects, all_subject, spec,
              config.Params(spec.epsilon0_grid.front()), config.CalOptions());

  const std::string path = BundlePath(config, "attack.csv");
  std::ofstream csv = OpenText(path);
  csv << "source,dataset,method,epsilon0,matcher,n,fnr,mean_psnr_db,check\n";
  // Zero-noise control: unperturbed subject features. The distance matcher
  // pairs each image with itself.
  const Eigen::VectorXd thr =
      Eigen::VectorXd::Constant(1, config.euclidean_threshold);
  int miss_r = 0, miss_e = 0;
  for (const GrayImage& img : data.subjects) {
    const Eigen::VectorXd f = Project(bundle.basis, img);
    if (!Matches(f, bundle.standard_features, bundle.sensitivity.radii)) ++miss_r;
    if (!MatchesEuclidean(f, f, thr[0])) ++miss_e;
  }
  const double ns = static_cast<double>(data.subjects.size());
  csv << "control,desk,none,inf,radius," << data.subjects.size() << ","
      << Fmt(miss_r / ns) << ",inf,\n";
  csv << "control,desk,none,inf,euclidean," << data.subjects.size() << ","
      << Fmt(miss_e / ns) << ",inf,\n";
  for (const SummaryRow& s : grid.summary) {
    for (int matcher = 0; matcher < 2; ++matcher) {
      csv << "desk,desk," << MethodName(s.method) << "," << Fmt(s.epsilon0)
          << "," << (matcher ? "euclidean" : "radius") << "," << s.n << ","
          << Fmt(matcher ? s.fnr_euclidean : s.fnr_radius) << ","
          << Fmt(s.mean_psnr_db) << ",\n";
    }
  }
  for (const PublishedRow& r : PublishedReferences()) {
    if (std::isnan(r.fnr)) continue;
    char fnr[32];
    std::snprintf(fnr, sizeof fnr, "%.10g", r.fnr);
    csv << "published," << r.dataset << "," << r.method << ",,face_recognition,,"
        << fnr << ",,\n";
  }

  // Direction check: lmgd >= na >= every baseline at each budget.
  const int nm = static_cast<int>(spec.methods.size());
  bool all_pass = true;
  for (size_t e = 0; e < spec.epsilon0_grid.size(); ++e) {
    for (int matcher = 0; matcher < 2; ++matcher) {
      double na = 0, lmgd = 0, base = 0;
      for (int m = 0; m < nm; ++m) {
        const SummaryRow& s = grid.summary[e * nm + m];
        const double f = matcher ? s.fnr_euclidean : s.fnr_radius;
        if (s.method == Method::kRdpNa) na = f;
        else if (s.method == Method::kRdpLmgd) lmgd = f;
        else base = std::max(base, f);
      }
      const bool pass = lmgd >= na && na >= base;
      all_pass = all_pass && pass;
      csv << "check,desk,lmgd>=na>=baselines," << Fmt(spec.epsilon0_grid[e])
          << "," << (matcher ? "euclidean" : "radius") << ",,,,"
          << (pass ? "pass" : "fail") << "\n";
    }
  }
  if (!csv) throw Error(ErrorCode::kIoFailure, "write failed: " + path);
  out << "wrote " << path << " ordering_check=" << (all_pass ? "pass" : "fail")
      << "\n";
  return 0;
}

int CmdSelftest(std::ostream& out) {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    const Gallery g = MakeGallery({16, 4, 2, 2, 7});
    const WaveletPlan plan = WaveletPlan::Default(16);
    double err = 0.0;
    for (const GrayImage& img : g.All()) {
      const Eigen::VectorXd x = Flatten(img);
      err = std::max(err, (HaarInverseFlat(HaarForward(x, plan), plan) - x)
                              .cwiseAbs()
                              .maxCoeff());
      err = std::max(
          err, (DctInverseFlat(DctForward(x, 16), 16) - x).cwiseAbs().maxCoeff());
    }
    check("transform round trip", err < 1e-9);
  }
  {
    const GeomEnvelope env = Envelope(1, 0.5);
    MechanismParams params;
    params.epsilon0 = 2.0;
    params.p = 0.5;
    const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
    const Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd b = SolveNa(w, d, params, 1, env);
    check("symmetric NA anchor",
          std::abs(b[0] - 1.0) < 1e-9 &&
              std::abs(EpsilonOfScales(w, d, b, env) - 2.0) < 1e-9);
  }
  {
    CounterRng rng(1, 2);
    KahanSum s;
    constexpr int kDraws = 200000;
    for (int i = 0; i < kDraws; ++i) s.Add(std::abs(SampleLaplace(1.0, rng)));
    check("Laplace mean absolute deviation",
          std::abs(s.value() / kDraws - 1.0) < 0.01);
  }
  {
    const Gallery toy = MakeSymmetricToy();
    const EigenBasis basis = FitEigenbasis(toy.All(), 1);
    const SensitivityProfile sens = EstimateSensitivity(
        basis, toy.subjects, toy.impostors, toy.standard);
    MechanismParams params;
    params.epsilon0 = 1.0;
    const MechanismPlan plan = Calibrate(Method::kRdpNa, basis, sens.deltas,
                                         WaveletPlan::Default(4), params);
    check("toy calibration meets budget",
          std::abs(plan.achieved_epsilon - 1.0) < 1e-6);
  }
  out << (failures == 0 ? "selftest ok\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

int CmdComplexity(std::ostream& out) {
  const std::vector<ComplexityPoint> pts = ComplexitySmoke();
  char buf[160];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "side=%d m_p=%d jacobian_s=%.6g solve_s=%.6g\n",
                  p.side, p.m_p, p.jacobian_seconds, p.solve_seconds);
    out << buf;
  }
  bool ok = true;
  for (size_t i = 1; i < pts.size(); ++i) {
    const double gj = GrowthPerDoubling(pts[i - 1], pts[i], true);
    const double gs = GrowthPerDoubling(pts[i - 1], pts[i], false);
    std::snprintf(buf, sizeof buf,
                  "m_p %d->%d growth_per_doubling jacobian=%.3f solve=%.3f\n",
                  pts[i - 1].m_p, pts[i].m_p, gj, gs);
    out << buf;
    ok = ok && gj <= 3.0;
  }
  out << "complexity " << (ok ? "within" : "outside") << " 3x envelope\n";
  return 0;
}

}  // namespace rdp
