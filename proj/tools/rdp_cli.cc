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

// Command-line front end: calibrate, sanitize, evaluate, attack, selftest,
// plus a gallery generator for the bundled desk data.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdp/error.h"
#include "rdp/harness.h"
#include "rdp/parallel.h"
#include "rdp/synthetic_gallery.h"

namespace {

rdp::RunConfig BuildConfig(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
  rdp::RunConfig config =
      config_path.empty() ? rdp::RunConfig{} : rdp::LoadConfig(config_path);
  for (const auto& kv : overrides) rdp::ApplyOverride(&config, kv);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranked differential privacy for grayscale face images"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "key=value config file");
    sub->add_option("-s,--set", overrides, "override a config key (key=value)");
  };

  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "fit the eigenbasis and noise scales, write the bundle");
  add_config(calibrate);

  std::string input, output;
  CLI::App* sanitize =
      app.add_subcommand("sanitize", "perturb one image with a stored plan");
  add_config(sanitize);
  sanitize->add_option("-i,--input", input, "input PGM")->required();
  sanitize->add_option("-o,--output", output, "output PGM");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "run the epsilon0 x method x repeat grid, write CSVs");
  add_config(evaluate);

  CLI::App* attack =
      app.add_subcommand("attack", "false negative rates per method");
  add_config(attack);

  bool complexity = false;
  CLI::App* selftest = app.add_subcommand("selftest", "quick internal checks");
  selftest->add_flag("--complexity", complexity)->group("");

  std::string gallery_dir;
  bool toy = false;
  rdp::GalleryOptions gopts;
  CLI::App* gallery =
      app.add_subcommand("gallery", "write a synthetic desk gallery");
  gallery->add_option("-o,--out", gallery_dir, "output directory")->required();
  gallery->add_flag("--toy", toy, "two-image 4x4 symmetric instance");
  gallery->add_option("--side", gopts.side, "image side");
  gallery->add_option("--seed", gopts.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    rdp::ApplyWorkerCountFromEnv();
    if (*calibrate) {
      return rdp::CmdCalibrate(BuildConfig(config_path, overrides), std::cout);
    }
    if (*sanitize) {
      return rdp::CmdSanitize(BuildConfig(config_path, overrides), input,
                              output, std::cout);
    }
    if (*evaluate) {
      return rdp::CmdEvaluate(BuildConfig(config_path, overrides), std::cout);
    }
    if (*attack) {
      return rdp::CmdAttack(BuildConfig(config_path, overrides), std::cout);
    }
    if (*selftest) {
      return complexity ? rdp::CmdComplexity(std::cout)
                        : rdp::CmdSelftest(std::cout);
    }
    if (*gallery) {
      const rdp::Gallery g =
          toy ? rdp::MakeSymmetricToy() : rdp::MakeGallery(gopts);
      std::cout << rdp::WriteGallery(g, gallery_dir) << "\n";
      return 0;
    }
  } catch (const rdp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rdp::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
