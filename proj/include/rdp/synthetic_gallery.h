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

// Deterministic face-like test gallery: soft-edged head, eyes, nose and
// mouth with per-identity geometry and per-shot pose, exposure and lighting
// jitter plus mild sensor noise. Pixels are quantized exactly as SaveImage
// writes them, so in-memory and on-disk galleries agree.

#ifndef RDP_SYNTHETIC_GALLERY_H_
#define RDP_SYNTHETIC_GALLERY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rdp/image_store.h"

namespace rdp {

struct GalleryOptions {
  int side = 64;
  int subject_shots = 8;
  int impostor_identities = 4;
  int impostor_shots = 3;
  uint64_t seed = 2026;
};

struct Gallery {
  std::vector<GrayImage> subjects;
  std::vector<GrayImage> impostors;
  GrayImage standard;

  // Subjects, impostors, standard, in that order.
  std::vector<GrayImage> All() const;
};

Gallery MakeGallery(const GalleryOptions& options = {});

// Writes PGMs plus manifest.txt into dir and returns the manifest path.
std::string WriteGallery(const Gallery& gallery, const std::string& dir);

// Two 4x4 images whose difference has equal-magnitude Haar coefficients, so
// a one-feature basis has |w_k| constant and NA meets epsilon0 exactly.
// The standard is a third image on the same line.
Gallery MakeSymmetricToy();

}  // namespace rdp

#endif  // RDP_SYNTHETIC_GALLERY_H_
