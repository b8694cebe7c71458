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

// Serial reference kernels against their OpenMP counterparts. Set
// RDP_WORKERS to choose the thread count.

#include <benchmark/benchmark.h>

#include "rdp/harness.h"
#include "rdp/parallel.h"
#include "rdp/synthetic_gallery.h"

namespace {

struct Fixture {
  rdp::Gallery gallery;
  rdp::EigenBasis basis;
  rdp::WaveletPlan plan;
  rdp::CalibrationBundle bundle;
  rdp::MechanismPlan mplan;

  explicit Fixture(int side) {
    rdp::GalleryOptions gopts;
    gopts.side = side;
    gallery = rdp::MakeGallery(gopts);
    basis = rdp::FitEigenbasis(gallery.All(), 8);
    plan = rdp::WaveletPlan::Default(side);
    bundle.plan = plan;
    bundle.basis = basis;
    bundle.sensitivity = rdp::EstimateSensitivity(
        basis, gallery.subjects, gallery.impostors, gallery.standard);
    bundle.standard_features = rdp::Project(basis, gallery.standard);
    rdp::MechanismParams params;
    params.epsilon0 = 0.5;
    mplan = rdp::Calibrate(rdp::Method::kRdpUniform, basis,
                           bundle.sensitivity.deltas, plan, params);
  }
};

const Fixture& Get(int side) {
  static const Fixture f16(16), f32(32), f64(64);
  return side == 16 ? f16 : side == 32 ? f32 : f64;
}

template <bool kParallel>
void BM_Jacobian(benchmark::State& state) {
  const Fixture& f = Get(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Eigen::MatrixXd jac =
        kParallel ? rdp::JacobianOperatorFree(f.basis, f.plan,
                                              rdp::TransformKind::kDct)
                  : rdp::serial::JacobianOperatorFree(f.basis, f.plan,
                                                      rdp::TransformKind::kDct);
    benchmark::DoNotOptimize(jac.data());
  }
}

template <bool kParallel>
void BM_SanitizeBatch(benchmark::State& state) {
  const Fixture& f = Get(static_cast<int>(state.range(0)));
  const std::vector<rdp::GrayImage> imgs = f.gallery.All();
  for (auto _ : state) {
    auto out = kParallel
                   ? rdp::SanitizeBatch(imgs, f.basis, f.mplan, 1)
                   : rdp::serial::SanitizeBatch(imgs, f.basis, f.mplan, 1);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * imgs.size());
}

template <bool kParallel>
void BM_Grid(benchmark::State& state) {
  const Fixture& f = Get(static_cast<int>(state.range(0)));
  const std::vector<rdp::GrayImage> imgs = f.gallery.All();
  std::vector<bool> is_subject(imgs.size(), false);
  for (size_t i = 0; i < f.gallery.subjects.size(); ++i) is_subject[i] = true;
  rdp::GridSpec spec;
  spec.methods = {rdp::Method::kRdpNa, rdp::Method::kRdpUniform,
                  rdp::Method::kPixelDp};
  spec.epsilon0_grid = {0.2, 1.0};
  spec.repeats = 10;
  rdp::MechanismParams params;
  for (auto _ : state) {
    auto out = kParallel ? rdp::RunGrid(f.bundle, imgs, is_subject, spec,
                                        params, {})
                         : rdp::serial::RunGrid(f.bundle, imgs, is_subject,
                                                spec, params, {});
    benchmark::DoNotOptimize(out.rows.data());
  }
}

BENCHMARK(BM_Jacobian<false>)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Jacobian<true>)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SanitizeBatch<false>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SanitizeBatch<true>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Grid<false>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Grid<true>)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  rdp::ApplyWorkerCountFromEnv();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
