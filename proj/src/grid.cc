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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>

#include "rdp/error.h"
#include "rdp/harness.h"
#include "rdp/synthetic_gallery.h"

namespace rdp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Holds the first exception thrown inside a parallel region.
class ExceptionSlot {
 public:
  void Capture() {
#pragma omp critical(rdp_grid_exception)
    if (!error_) error_ = std::current_exception();
  }
  void Rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

struct CellContext {
  const CalibrationBundle* bundle;
  const std::vector<GrayImage>* images;
  const GridSpec* spec;
  const std::vector<MechanismPlan>* plans;
  const std::vector<Eigen::VectorXd>* clean_features;  // per image
};

GridRow RunCell(const CellContext& ctx, int e, int m, int j, int r) {
  const int nm = static_cast<int>(ctx.spec->methods.size());
  const MechanismPlan& mplan = (*ctx.plans)[e * nm + m];
  const GrayImage& img = (*ctx.images)[j];
  const uint64_t stream = StreamId({static_cast<uint64_t>(e),
                                    static_cast<uint64_t>(m),
                                    static_cast<uint64_t>(j),
                                    static_cast<uint64_t>(r)});
  const SanitizeResult res =
      Sanitize(img, ctx.bundle->basis, mplan, ctx.spec->seed, stream);
  GridRow row;
  row.image = j;
  row.method = m;
  row.eps = e;
  row.repeat = r;
  row.k = res.k_drawn;
  row.sigma_t_sq = TheoreticalVariance(mplan.scales, res.k_drawn);
  row.sigma_r_sq = RealVariance(img, res.noisy_image);
  row.psnr_db = Psnr(img, res.noisy_image, ctx.spec->psnr_mode);
  row.ssim = Ssim(img, res.noisy_image);
  row.match_radius = Matches(res.noisy_features, ctx.bundle->standard_features,
                             ctx.bundle->sensitivity.radii);
  // The distance matcher compares a noisy image with its own original.
  row.match_euclidean =
      MatchesEuclidean(res.noisy_features, (*ctx.clean_features)[j],
                       ctx.spec->euclidean_threshold);
  return row;
}

double Deviation(double sr, double st) {
  if (st == 0.0) return sr == 0.0 ? 0.0 : kNaN;
  return NormalizedVarianceDeviation(sr, st);
}

std::vector<SummaryRow> Summarize(const GridOutput& grid, const GridSpec& spec,
                                  const std::vector<bool>& is_subject,
                                  int n_images) {
  const int ne = static_cast<int>(spec.epsilon0_grid.size());
  const int nm = static_cast<int>(spec.methods.size());
  const int nr = spec.repeats;
  std::vector<SummaryRow> out;
  for (int e = 0; e < ne; ++e) {
    for (int m = 0; m < nm; ++m) {
      const MechanismPlan& mplan = grid.plans[e * nm + m];
      SummaryRow s;
      s.method = spec.methods[m];
      s.epsilon0 = spec.epsilon0_grid[e];
      s.achieved_epsilon = mplan.achieved_epsilon;
      s.cost = mplan.cost;
      s.converged = mplan.converged;
      KahanSum k_sum, st_sum, sr_sum, psnr_sum, ssim_sum, dev_sum;
      int subjects = 0, miss_radius = 0, miss_euclid = 0, dev_images = 0;
      for (int j = 0; j < n_images; ++j) {
        KahanSum st_img, sr_img;
        for (int r = 0; r < nr; ++r) {
          const size_t idx =
              ((static_cast<size_t>(e) * nm + m) * n_images + j) * nr + r;
          const GridRow& row = grid.rows[idx];
          ++s.n;
          k_sum.Add(row.k);
          st_sum.Add(row.sigma_t_sq);
          sr_sum.Add(row.sigma_r_sq);
          st_img.Add(row.sigma_t_sq);
          sr_img.Add(row.sigma_r_sq);
          ssim_sum.Add(row.ssim);
          if (std::isfinite(row.psnr_db)) {
            psnr_sum.Add(row.psnr_db);
            ++s.finite_psnr;
          }
          if (is_subject[j]) {
            ++subjects;
            if (!row.match_radius) ++miss_radius;
            if (!row.match_euclidean) ++miss_euclid;
          }
        }
        const double d = Deviation(sr_img.value() / nr, st_img.value() / nr);
        if (!std::isnan(d)) {
          dev_sum.Add(d);
          ++dev_images;
        }
      }
      const double n = s.n;
      s.mean_k = k_sum.value() / n;
      s.mean_sigma_t_sq = st_sum.value() / n;
      s.mean_sigma_r_sq = sr_sum.value() / n;
      s.norm_var_dev = Deviation(s.mean_sigma_r_sq, s.mean_sigma_t_sq);
      s.norm_var_dev_per_image =
          dev_images > 0 ? dev_sum.value() / dev_images : kNaN;
      s.mean_psnr_db =
          s.finite_psnr > 0 ? psnr_sum.value() / s.finite_psnr : kNaN;
      s.mean_ssim = ssim_sum.value() / n;
      s.fnr_radius = subjects > 0 ? double(miss_radius) / subjects : kNaN;
      s.fnr_euclidean = subjects > 0 ? double(miss_euclid) / subjects : kNaN;
      out.push_back(s);
    }
  }
  return out;
}

GridOutput RunGridImpl(const CalibrationBundle& bundle,
                       const std::vector<GrayImage>& images,
                       const std::vector<bool>& is_subject,
                       const GridSpec& spec, const MechanismParams& base,
                       const CalibrationOptions& options, bool parallel) {
  if (images.empty()) throw Error(ErrorCode::kEmptyInput, "no images");
  if (is_subject.size() != images.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "is_subject length");
  }
  if (spec.methods.empty() || spec.epsilon0_grid.empty() || spec.repeats < 1) {
    throw Error(ErrorCode::kConfig, "empty evaluation grid");
  }
  const int ne = static_cast<int>(spec.epsilon0_grid.size());
  const int nm = static_cast<int>(spec.methods.size());
  const int ni = static_cast<int>(images.size());
  const int nr = spec.repeats;

  CalibrationOptions opts = options;
  opts.lmgd.record_trace = false;

  GridOutput out;
  out.plans.resize(static_cast<size_t>(ne) * nm);
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int c = 0; c < ne * nm; ++c) {
    try {
      MechanismParams params = base;
      params.epsilon0 = spec.epsilon0_grid[c / nm];
      out.plans[c] = Calibrate(spec.methods[c % nm], bundle.basis,
                               bundle.sensitivity.deltas, bundle.plan, params,
                               opts);
    } catch (...) {
      slot.Capture();
    }
  }
  slot.Rethrow();

  // Rows land at their key's index, so the output is already sorted by
  // (eps, method, image, repeat) whatever the schedule.
  const long long total = static_cast<long long>(ne) * nm * ni * nr;
  out.rows.resize(static_cast<size_t>(total));
  std::vector<Eigen::VectorXd> clean(images.size());
  for (size_t j = 0; j < images.size(); ++j) {
    clean[j] = Project(bundle.basis, images[j]);
  }
  const CellContext ctx{&bundle, &images, &spec, &out.plans, &clean};
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (long long idx = 0; idx < total; ++idx) {
    try {
      const int r = static_cast<int>(idx % nr);
      const int j = static_cast<int>((idx / nr) % ni);
      const int m = static_cast<int>((idx / nr / ni) % nm);
      const int e = static_cast<int>(idx / nr / ni / nm);
      out.rows[idx] = RunCell(ctx, e, m, j, r);
    } catch (...) {
      slot.Capture();
    }
  }
  slot.Rethrow();
  out.summary = Summarize(out, spec, is_subject, ni);
  return out;
}

void WriteNumber(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

void WriteOptional(std::FILE* f, double v) {
  if (!std::isnan(v)) WriteNumber(f, v);
}

// Published values carry at most four significant decimals.
void WriteReference(std::FILE* f, double v) {
  if (!std::isnan(v)) std::fprintf(f, "%.10g", v);
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File OpenForWrite(const std::string& path) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  return f;
}

void CloseChecked(File f, const std::string& path) {
  const bool bad = std::ferror(f.get()) != 0;
  if (std::fclose(f.release()) != 0 || bad) {
    throw Error(ErrorCode::kIoFailure, "write failed: " + path);
  }
}

}  // namespace

GridOutput RunGrid(const CalibrationBundle& bundle,
                   const std::vector<GrayImage>& images,
                   const std::vector<bool>& is_subject, const GridSpec& spec,
                   const MechanismParams& base,
                   const CalibrationOptions& options) {
  return RunGridImpl(bundle, images, is_subject, spec, base, options, true);
}

namespace serial {
GridOutput RunGrid(const CalibrationBundle& bundle,
                   const std::vector<GrayImage>& images,
                   const std::vector<bool>& is_subject, const GridSpec& spec,
                   const MechanismParams& base,
                   const CalibrationOptions& options) {
  return RunGridImpl(bundle, images, is_subject, spec, base, options, false);
}
}  // namespace serial

const std::vector<PublishedRow>& PublishedReferences() {
  static const std::vector<PublishedRow> rows = [] {
    std::vector<PublishedRow> v;
    const double grid[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    struct SsimLine {
      const char* dataset;
      const char* method;
      double ssim[5];
    };
    const SsimLine table[] = {
        {"LFW", "dct_dp", {0.9767, 0.9908, 0.9937, 0.9956, 0.9965}},
        {"LFW", "pixel_dp", {0.9826, 0.9918, 0.9953, 0.9962, 0.9972}},
        {"LFW", "rdp_uniform", {0.9844, 0.9926, 0.9953, 0.9963, 0.9973}},
        {"LFW", "rdp_na", {0.9954, 0.9980, 0.9988, 0.9992, 0.9994}},
        {"LFW", "rdp_lmgd", {0.9955, 0.9983, 0.9991, 0.9993, 0.9994}},
        {"PubFig83", "dct_dp", {0.9728, 0.9882, 0.9931, 0.9947, 0.9958}},
        {"PubFig83", "pixel_dp", {0.9836, 0.9923, 0.9951, 0.9964, 0.9971}},
        {"PubFig83", "rdp_uniform", {0.9815, 0.9905, 0.9940, 0.9960, 0.9969}},
        {"PubFig83", "rdp_na", {0.9968, 0.9985, 0.9989, 0.9992, 0.9994}},
        {"PubFig83", "rdp_lmgd", {0.9967, 0.9986, 0.9991, 0.9993, 0.9994}},
    };
    for (const auto& line : table) {
      for (int e = 0; e < 5; ++e) {
        v.push_back({line.dataset, line.method, grid[e], line.ssim[e], kNaN});
      }
    }
    // FNR at "the same utility setting"; no budget is given.
    v.push_back({"LFW", "dct_dp", kNaN, kNaN, 0.3775});
    v.push_back({"LFW", "pixel_dp", kNaN, kNaN, 0.3944});
    v.push_back({"LFW", "rdp_uniform", kNaN, kNaN, 0.4005});
    v.push_back({"LFW", "rdp_na", kNaN, kNaN, 0.7718});
    v.push_back({"LFW", "rdp_lmgd", kNaN, kNaN, 0.8138});
    return v;
  }();
  return rows;
}

void WriteRowsCsv(const GridOutput& grid, const GridSpec& spec,
                  const std::vector<std::string>& ids, double p,
                  const std::string& path) {
  File f = OpenForWrite(path);
  std::fputs(
      "image_id,method,epsilon0,p,seed,repeat,K,sigma_t_sq,sigma_r_sq,"
      "norm_var_dev,psnr_db,ssim,matched\n",
      f.get());
  for (const GridRow& row : grid.rows) {
    std::fprintf(f.get(), "%s,%s,", ids.at(row.image).c_str(),
                 MethodName(spec.methods[row.method]));
    WriteNumber(f.get(), spec.epsilon0_grid[row.eps]);
    std::fputc(',', f.get());
    WriteNumber(f.get(), p);
    std::fprintf(f.get(), ",%llu,%d,%d,",
                 static_cast<unsigned long long>(spec.seed), row.repeat,
                 row.k);
    WriteNumber(f.get(), row.sigma_t_sq);
    std::fputc(',', f.get());
    WriteNumber(f.get(), row.sigma_r_sq);
    std::fputc(',', f.get());
    WriteOptional(f.get(), Deviation(row.sigma_r_sq, row.sigma_t_sq));
    std::fputc(',', f.get());
    WriteNumber(f.get(), row.psnr_db);
    std::fputc(',', f.get());
    WriteNumber(f.get(), row.ssim);
    std::fprintf(f.get(), ",%d\n", row.match_radius ? 1 : 0);
  }
  CloseChecked(std::move(f), path);
}

void WriteSummaryCsv(const GridOutput& grid, const std::string& path) {
  File f = OpenForWrite(path);
  std::fputs(
      "source,dataset,method,epsilon0,n,mean_K,mean_sigma_t_sq,"
      "mean_sigma_r_sq,norm_var_dev,norm_var_dev_per_image,mean_psnr_db,"
      "mean_ssim,fnr_radius,fnr_euclidean,achieved_epsilon,cost,converged\n",
      f.get());
  for (const SummaryRow& s : grid.summary) {
    std::fprintf(f.get(), "desk,desk,%s,", MethodName(s.method));
    const double fields[] = {s.epsilon0,
                             static_cast<double>(s.n),
                             s.mean_k,
                             s.mean_sigma_t_sq,
                             s.mean_sigma_r_sq,
                             s.norm_var_dev,
                             s.norm_var_dev_per_image,
                             s.mean_psnr_db,
                             s.mean_ssim,
                             s.fnr_radius,
                             s.fnr_euclidean,
                             s.achieved_epsilon,
                             s.cost};
    for (double v : fields) {
      WriteOptional(f.get(), v);
      std::fputc(',', f.get());
    }
    std::fprintf(f.get(), "%d\n", s.converged ? 1 : 0);
  }
  for (const PublishedRow& r : PublishedReferences()) {
    std::fprintf(f.get(), "published,%s,%s,", r.dataset, r.method);
    WriteReference(f.get(), r.epsilon0);
    std::fputs(",,,,,,,,", f.get());
    WriteReference(f.get(), r.ssim);
    std::fputc(',', f.get());
    std::fputc(',', f.get());
    WriteReference(f.get(), r.fnr);
    std::fputs(",,,\n", f.get());
  }
  CloseChecked(std::move(f), path);
}

std::vector<ComplexityPoint> ComplexitySmoke(int m_f) {
  using Clock = std::chrono::steady_clock;
  constexpr double kMinSeconds = 0.05;
  constexpr int kTrials = 5;
  std::vector<ComplexityPoint> out;
  for (int side : {16, 32, 64}) {
    GalleryOptions gopts;
    gopts.side = side;
    const Gallery gallery = MakeGallery(gopts);
    const EigenBasis basis = FitEigenbasis(gallery.All(), m_f);
    const WaveletPlan plan = WaveletPlan::Default(side);
    const GeomEnvelope env = Envelope(basis.m_p(), 0.02);
    const Eigen::VectorXd deltas = Eigen::VectorXd::Ones(m_f);
    MechanismParams params;
    const int k_active = DefaultActiveCount(env);

    // Best of several trials, each looping until kMinSeconds has elapsed.
    auto time_it = [&](auto&& fn) {
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < kTrials; ++t) {
        int reps = 0;
        const auto start = Clock::now();
        double elapsed = 0.0;
        do {
          fn();
          ++reps;
          elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        } while (elapsed < kMinSeconds);
        best = std::min(best, elapsed / reps);
      }
      return best;
    };

    Eigen::MatrixXd jac;
    ComplexityPoint pt;
    pt.side = side;
    pt.m_p = basis.m_p();
    pt.jacobian_seconds = time_it(
        [&] { jac = serial::JacobianOperatorFree(basis, plan,
                                                 TransformKind::kHaar); });
    const Eigen::MatrixXd w =
        RankColumns(jac, RankPermutation(jac, {}, RankingKey::kWeightEnergy));
    pt.solve_seconds =
        time_it([&] { SolveNa(w, deltas, params, k_active, env); });
    out.push_back(pt);
  }
  return out;
}

double GrowthPerDoubling(const ComplexityPoint& a, const ComplexityPoint& b,
                         bool jacobian) {
  const double ta = jacobian ? a.jacobian_seconds : a.solve_seconds;
  const double tb = jacobian ? b.jacobian_seconds : b.solve_seconds;
  const double doublings = std::log2(double(b.m_p) / double(a.m_p));
  return std::pow(tb / ta, 1.0 / doublings);
}

}  // namespace rdp
