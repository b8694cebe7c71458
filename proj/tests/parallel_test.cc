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


#include "rdp/parallel.h"

#include <cstdlib>

#include <gtest/gtest.h>

#include "rdp/error.h"
#include "rdp/harness.h"
#include "rdp/influence.h"
#include "rdp/synthetic_gallery.h"

namespace rdp {
namespace {

class WorkerEnvTest : public ::testing::Test {
 protected:
  void SetUp() override { saved_ = WorkerCount(); }
  void TearDown() override {
    unsetenv(kWorkersEnv);
    SetWorkerCount(saved_);
  }
  int saved_ = 1;
};

TEST_F(WorkerEnvTest, SetAndRead) {
  SetWorkerCount(3);
  EXPECT_EQ(WorkerCount(), 3);
  EXPECT_THROW(SetWorkerCount(0), Error);
}

TEST_F(WorkerEnvTest, EnvironmentOverride) {
  SetWorkerCount(1);
  unsetenv(kWorkersEnv);
  EXPECT_EQ(ApplyWorkerCountFromEnv(), 1);
  setenv(kWorkersEnv, "5", 1);
  EXPECT_EQ(ApplyWorkerCountFromEnv(), 5);
  EXPECT_EQ(WorkerCount(), 5);
  for (const char* bad : {"0", "-2", "four", "3x"}) {
    setenv(kWorkersEnv, bad, 1);
    try {
      ApplyWorkerCountFromEnv();
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig) << bad;
    }
  }
}

// Kernels must give bit-identical results for any worker count.
TEST_F(WorkerEnvTest, ResultsIndependentOfWorkerCount) {
  GalleryOptions opts;
  opts.side = 16;
  opts.subject_shots = 3;
  opts.impostor_identities = 2;
  opts.impostor_shots = 1;
  const Gallery g = MakeGallery(opts);
  const std::vector<GrayImage> imgs = g.All();
  const EigenBasis basis = FitEigenbasis(imgs, 3);
  const WaveletPlan plan = WaveletPlan::Default(16);
  const SensitivityProfile sens =
      EstimateSensitivity(basis, g.subjects, g.impostors, g.standard);
  CalibrationBundle bundle{plan, basis, sens, Project(basis, g.standard)};
  std::vector<bool> is_subject(imgs.size(), false);
  for (size_t j = 0; j < g.subjects.size(); ++j) is_subject[j] = true;
  GridSpec spec;
  spec.epsilon0_grid = {0.4, 0.8};
  spec.repeats = 5;
  MechanismParams base;
  base.p = 0.05;

  std::vector<GridOutput> grids;
  std::vector<Eigen::MatrixXd> jacs;
  for (int workers : {1, 2, 4}) {
    SetWorkerCount(workers);
    grids.push_back(RunGrid(bundle, imgs, is_subject, spec, base, {}));
    jacs.push_back(JacobianOperatorFree(basis, plan, TransformKind::kDct));
  }
  for (size_t w = 1; w < grids.size(); ++w) {
    EXPECT_EQ(jacs[w], jacs[0]);
    ASSERT_EQ(grids[w].rows.size(), grids[0].rows.size());
    for (size_t i = 0; i < grids[0].rows.size(); ++i) {
      ASSERT_EQ(grids[w].rows[i].k, grids[0].rows[i].k);
      ASSERT_EQ(grids[w].rows[i].sigma_r_sq, grids[0].rows[i].sigma_r_sq);
      ASSERT_EQ(grids[w].rows[i].psnr_db, grids[0].rows[i].psnr_db);
    }
    for (size_t s = 0; s < grids[0].summary.size(); ++s) {
      EXPECT_EQ(grids[w].summary[s].cost, grids[0].summary[s].cost);
      EXPECT_EQ(grids[w].summary[s].mean_ssim, grids[0].summary[s].mean_ssim);
    }
  }
}

}  // namespace
}  // namespace rdp
