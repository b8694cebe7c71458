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

#include "rdp/synthetic_gallery.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rdp/error.h"
#include "rdp/mechanism.h"
#include "rdp/transforms.h"

namespace rdp {
namespace {

struct Identity {
  double head_w, head_h, skin;
  double eye_sep, eye_y, eye_depth;
  double mouth_w, mouth_y;
};

struct Shot {
  std::array<double, 5> jitter{};  // dx, dy, exposure, light x, light y
};

double Uniform(CounterRng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.Uniform();
}

Identity MakeIdentity(CounterRng& rng) {
  Identity id;
  id.head_w = Uniform(rng, 0.28, 0.36);
  id.head_h = Uniform(rng, 0.36, 0.44);
  id.skin = Uniform(rng, 140, 200);
  id.eye_sep = Uniform(rng, 0.10, 0.15);
  id.eye_y = Uniform(rng, 0.06, 0.12);
  id.eye_depth = Uniform(rng, 60, 100);
  id.mouth_w = Uniform(rng, 0.06, 0.10);
  id.mouth_y = Uniform(rng, 0.15, 0.22);
  return id;
}

Shot MakeShot(CounterRng& rng) {
  Shot s;
  for (double& j : s.jitter) j = rng.Normal();
  return s;
}

double Blob(double x, double y, double cx, double cy, double sx, double sy) {
  const double u = (x - cx) / sx;
  const double v = (y - cy) / sy;
  return std::exp(-(u * u + v * v));
}

GrayImage Render(const Identity& id, const Shot& shot, int side,
                 CounterRng& noise) {
  GrayImage img(side);
  const auto& j = shot.jitter;
  const double cx = 0.5 + 0.015 * j[0];
  const double cy = 0.5 + 0.015 * j[1];
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double x = (c + 0.5) / side;
      const double y = (r + 0.5) / side;
      const double u = (x - cx) / id.head_w;
      const double v = (y - cy) / id.head_h;
      const double rad = std::sqrt(u * u + v * v);
      const double inside = 1.0 / (1.0 + std::exp(-(1.0 - rad) / 0.06));
      double val = 30.0 + (id.skin + 6.0 * j[2] - 30.0) * inside;
      for (double sx : {-1.0, 1.0}) {
        val -= id.eye_depth *
               Blob(x, y, cx + sx * id.eye_sep, cy - id.eye_y, 0.05, 0.025);
      }
      val -= 40.0 * Blob(x, y, cx, cy + id.mouth_y, id.mouth_w, 0.02);
      val += 15.0 * Blob(x, y, cx, cy + 0.03, 0.025, 0.07);
      val *= 1.0 + 0.08 * j[3] * (x - 0.5) + 0.05 * j[4] * (y - 0.5);
      val += noise.Normal();
      img.pixels(r, c) = QuantizePixel(val);
    }
  }
  return img;
}

}  // namespace

std::vector<GrayImage> Gallery::All() const {
  std::vector<GrayImage> out(subjects);
  out.insert(out.end(), impostors.begin(), impostors.end());
  out.push_back(standard);
  return out;
}

Gallery MakeGallery(const GalleryOptions& options) {
  if (!IsPowerOfTwo(options.side) || options.side < 4) {
    throw Error(ErrorCode::kInvalidArgument, "gallery side");
  }
  CounterRng params(options.seed, 0);
  CounterRng noise(options.seed, 1);
  const Identity subject = MakeIdentity(params);
  std::vector<Identity> others;
  for (int i = 0; i < options.impostor_identities; ++i) {
    others.push_back(MakeIdentity(params));
  }

  Gallery g;
  for (int s = 0; s < options.subject_shots; ++s) {
    g.subjects.push_back(Render(subject, MakeShot(params), options.side,
                                noise));
  }
  for (int s = 0; s < options.impostor_shots; ++s) {
    for (int i = 0; i < options.impostor_identities; ++i) {
      g.impostors.push_back(Render(others[i], MakeShot(params), options.side,
                                   noise));
    }
  }
  g.standard = Render(subject, Shot{}, options.side, noise);
  return g;
}

std::string WriteGallery(const Gallery& gallery, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir);
  DatasetManifest manifest;
  char name[64];
  for (size_t i = 0; i < gallery.subjects.size(); ++i) {
    std::snprintf(name, sizeof name, "subject_%02zu.pgm", i);
    SaveImage(gallery.subjects[i], (fs::path(dir) / name).string());
    manifest.subject_images.push_back(name);
  }
  for (size_t i = 0; i < gallery.impostors.size(); ++i) {
    std::snprintf(name, sizeof name, "impostor_%02zu.pgm", i);
    SaveImage(gallery.impostors[i], (fs::path(dir) / name).string());
    manifest.impostor_images.push_back(name);
  }
  SaveImage(gallery.standard, (fs::path(dir) / "standard.pgm").string());
  manifest.standard_image = "standard.pgm";
  const std::string path = (fs::path(dir) / "manifest.txt").string();
  SaveManifest(manifest, path);
  return path;
}

Gallery MakeSymmetricToy() {
  const WaveletPlan plan = WaveletPlan::Default(4);
  Eigen::VectorXd c(16);
  for (int k = 0; k < 16; ++k) c[k] = (std::popcount(unsigned(k)) % 2) ? -1 : 1;
  // Every single-level synthesis vector is +-1/2 on one 2x2 block, so d is
  // integer valued.
  const Eigen::VectorXd d = HaarInverseFlat(c, plan);
  auto line = [&](double t) {
    GrayImage img(4);
    for (int i = 0; i < 16; ++i) {
      img.pixels.data()[i] = QuantizePixel(128.0 + t * d[i]);
    }
    return img;
  };
  Gallery g;
  g.subjects.push_back(line(10.0));
  g.impostors.push_back(line(-10.0));
  g.standard = line(8.0);
  return g;
}

}  // namespace rdp
