// Copyright 2026 The SAFF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "saff/pnm.hpp"
#include "saff/tensor_io.hpp"

namespace saff {

/// SplitMix64. Integer-only state update, so sequences are identical across
/// platforms and compilers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }

 private:
  std::uint64_t state_;
};

struct SynthParams {
  std::uint32_t height = 96;
  std::uint32_t width = 96;
  std::uint32_t channels = 8;
  double noise = 0.25;
  // Rejection bounds on the foreground area fraction.
  double min_fg_fraction = 0.05;
  double max_fg_fraction = 0.6;
};

/// A scene with known ground truth and stand-ins for the three feature
/// extractors.
///
/// Noise model (noise = n, u ~ U[0,1) drawn per use):
///  - 1..3 ellipse/rectangle foreground blobs; with n > 0 one background
///    distractor blob (salient and edged, but semantically silent) and one
///    "context" channel carrying a semantic bump away from the objects.
///  - semantic: each blob drives 1..3 primary channels at 1 - n*u inside,
///    falling off linearly over ~6% of the short side outside; the other
///    channels respond at 0.3..0.6 of that level. Every channel gets
///    0.5*n*u additive noise.
///  - saliency: 2-px box blur of the foreground (plus the distractor at
///    0.7..1.0 strength) with 0.5*n*u additive noise.
///  - edge: object and distractor boundaries dilated by 1 px at 1 - n*u,
///    plus salt noise with probability 0.5*n.
struct SynthScene {
  ImageRGB image;
  Tensor gt;        // HxW uint8, 0/255
  Tensor semantic;  // HxWxD real32 in [0,1]
  Tensor saliency;  // HxW real32 in [0,1]
  Tensor edge;      // HxW real32 in [0,1]
  std::uint64_t seed = 0;
};

SynthScene generate_scene(std::uint64_t seed, const SynthParams& params);

enum class BaselineMode { SemanticOnly, SaliencyOnly };

/// Per-pixel max over min-max normalized semantic channels.
Tensor semantic_baseline(const Tensor& semantic);
/// Saliency clamped to [0,1].
Tensor saliency_baseline(const Tensor& saliency);
Tensor baseline_scores(const SynthScene& scene, BaselineMode mode);

/// Writes image.ppm, gt.pgm, semantic.sft, saliency.sft, edge.sft into dir.
void write_scene(const SynthScene& scene, const std::filesystem::path& dir);

}  // namespace saff
