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

#include "saff/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "saff/encoding.hpp"
#include "saff/error.hpp"

namespace saff {

namespace {

struct Blob {
  bool ellipse = true;
  double cy = 0, cx = 0, ry = 1, rx = 1;

  bool contains(double y, double x) const {
    const double dy = (y - cy) / ry, dx = (x - cx) / rx;
    return ellipse ? dy * dy + dx * dx <= 1.0 : std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
  }
};

Blob random_blob(SplitMix64& rng, std::uint32_t h, std::uint32_t w, double lo, double hi) {
  const double short_side = std::min(h, w);
  Blob b;
  b.ellipse = rng.below(2) == 0;
  b.cy = rng.uniform(0.15, 0.85) * h;
  b.cx = rng.uniform(0.15, 0.85) * w;
  b.ry = rng.uniform(lo, hi) * short_side;
  b.rx = rng.uniform(lo, hi) * short_side;
  return b;
}

std::vector<std::uint8_t> rasterize(const Blob& b, std::uint32_t h, std::uint32_t w) {
  std::vector<std::uint8_t> m(std::size_t{h} * w, 0);
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = 0; x < w; ++x) m[std::size_t{y} * w + x] = b.contains(y, x) ? 1 : 0;
  return m;
}

// 4-connected BFS distance to the nearest set pixel, capped at `cap`.
std::vector<int> distance_to(const std::vector<std::uint8_t>& mask, std::uint32_t h,
                             std::uint32_t w, int cap) {
  std::vector<int> d(mask.size(), cap);
  std::deque<std::size_t> queue;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (mask[p]) {
      d[p] = 0;
      queue.push_back(p);
    }
  }
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    if (d[p] + 1 >= cap) continue;
    const std::uint32_t y = static_cast<std::uint32_t>(p / w), x = static_cast<std::uint32_t>(p % w);
    const auto relax = [&](std::size_t q) {
      if (d[q] > d[p] + 1) {
        d[q] = d[p] + 1;
        queue.push_back(q);
      }
    };
    if (x > 0) relax(p - 1);
    if (x + 1 < w) relax(p + 1);
    if (y > 0) relax(p - w);
    if (y + 1 < h) relax(p + w);
  }
  return d;
}

std::vector<double> box_blur(const std::vector<double>& in, std::uint32_t h, std::uint32_t w,
                             int radius) {
  std::vector<double> out(in.size());
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      double s = 0.0;
      int n = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int yy = static_cast<int>(y) + dy, xx = static_cast<int>(x) + dx;
          if (yy < 0 || xx < 0 || yy >= static_cast<int>(h) || xx >= static_cast<int>(w)) continue;
          s += in[static_cast<std::size_t>(yy) * w + xx];
          ++n;
        }
      }
      out[std::size_t{y} * w + x] = s / n;
    }
  }
  return out;
}

// Pixels on either side of a mask boundary, dilated by one pixel.
std::vector<std::uint8_t> boundary_band(const std::vector<std::uint8_t>& mask, std::uint32_t h,
                                        std::uint32_t w) {
  std::vector<std::uint8_t> edge(mask.size(), 0);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t p = std::size_t{y} * w + x;
      const bool right = x + 1 < w && mask[p] != mask[p + 1];
      const bool down = y + 1 < h && mask[p] != mask[p + w];
      if (right) edge[p] = edge[p + 1] = 1;
      if (down) edge[p] = edge[p + w] = 1;
    }
  }
  std::vector<std::uint8_t> out = edge;
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t p = std::size_t{y} * w + x;
      if (!edge[p]) continue;
      if (x > 0) out[p - 1] = 1;
      if (x + 1 < w) out[p + 1] = 1;
      if (y > 0) out[p - w] = 1;
      if (y + 1 < h) out[p + w] = 1;
    }
  }
  return out;
}

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

std::array<double, 3> contrasting_color(SplitMix64& rng, const std::array<double, 3>& base) {
  std::array<double, 3> c{};
  for (int k = 0; k < 3; ++k) {
    const double offset = 60.0 + rng.uniform() * 70.0;
    const double up = base[k] + offset, down = base[k] - offset;
    c[k] = (rng.below(2) == 0 && up <= 255.0) || down < 0.0 ? std::min(up, 255.0) : down;
  }
  return c;
}

}  // namespace

SynthScene generate_scene(std::uint64_t seed, const SynthParams& params) {
  const std::uint32_t h = params.height, w = params.width, depth = params.channels;
  if (h < 32 || w < 32) throw Error(ErrorCode::InvalidArgument, "synthetic scenes need H,W >= 32");
  if (depth < 2) throw Error(ErrorCode::InvalidArgument, "synthetic scenes need >= 2 channels");
  if (!(params.noise >= 0.0 && params.noise < 1.0))
    throw Error(ErrorCode::InvalidArgument, "noise must lie in [0,1)");
  if (!(params.min_fg_fraction < params.max_fg_fraction) || params.max_fg_fraction > 1.0 ||
      params.min_fg_fraction < 0.0)
    throw Error(ErrorCode::InvalidArgument, "invalid foreground fraction bounds");

  const std::size_t n = std::size_t{h} * w;
  const double noise = params.noise;
  SplitMix64 rng(seed);

  // Foreground blobs, resampled until the area fraction is in range.
  std::vector<Blob> blobs;
  std::vector<int> owner(n, -1);
  std::size_t fg_area = 0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000)
      throw Error(ErrorCode::InvalidArgument, "foreground fraction bounds cannot be met");
    blobs.clear();
    const std::uint32_t count = 1 + rng.below(3);
    for (std::uint32_t i = 0; i < count; ++i) blobs.push_back(random_blob(rng, h, w, 0.08, 0.3));
    std::fill(owner.begin(), owner.end(), -1);
    fg_area = 0;
    for (std::uint32_t y = 0; y < h; ++y) {
      for (std::uint32_t x = 0; x < w; ++x) {
        for (std::size_t b = 0; b < blobs.size(); ++b) {
          if (blobs[b].contains(y, x)) {
            owner[std::size_t{y} * w + x] = static_cast<int>(b);
            ++fg_area;
            break;
          }
        }
      }
    }
    const double frac = static_cast<double>(fg_area) / n;
    if (fg_area > 0 && fg_area < n && frac >= params.min_fg_fraction &&
        frac <= params.max_fg_fraction)
      break;
  }
  std::vector<std::uint8_t> fg(n);
  for (std::size_t p = 0; p < n; ++p) fg[p] = owner[p] >= 0 ? 1 : 0;

  // Distractor blob and context bump live in the background only.
  std::vector<std::uint8_t> distractor(n, 0);
  std::vector<double> bump(n, 0.0);
  std::uint32_t context_channel = 0;
  double distractor_strength = 0.0;
  if (noise > 0.0) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const Blob b = random_blob(rng, h, w, 0.06, 0.15);
      auto m = rasterize(b, h, w);
      bool overlaps = false;
      for (std::size_t p = 0; p < n && !overlaps; ++p) overlaps = m[p] && fg[p];
      if (!overlaps) {
        distractor = std::move(m);
        break;
      }
    }
    distractor_strength = 0.7 + 0.3 * rng.uniform();
    context_channel = rng.below(depth);
    const Blob c = random_blob(rng, h, w, 0.08, 0.18);
    const double amp = std::min(1.0, 2.0 * noise);
    for (std::uint32_t y = 0; y < h; ++y) {
      for (std::uint32_t x = 0; x < w; ++x) {
        const std::size_t p = std::size_t{y} * w + x;
        if (fg[p]) continue;
        const double dy = (y - c.cy) / c.ry, dx = (x - c.cx) / c.rx;
        const double r2 = dy * dy + dx * dx;
        if (r2 < 1.0) bump[p] = amp * (1.0 - r2) * (1.0 - r2);
      }
    }
  }

  SynthScene scene;
  scene.seed = seed;

  // Image: flat background, one colour per blob, small per-pixel noise.
  std::array<double, 3> bg_color{};
  for (auto& c : bg_color) c = 40.0 + rng.uniform() * 175.0;
  std::vector<std::array<double, 3>> blob_color;
  for (std::size_t b = 0; b < blobs.size(); ++b) blob_color.push_back(contrasting_color(rng, bg_color));
  const auto distractor_color = contrasting_color(rng, bg_color);
  scene.image.width = w;
  scene.image.height = h;
  scene.image.rgb.resize(3 * n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& base = owner[p] >= 0 ? blob_color[owner[p]]
                                     : (distractor[p] ? distractor_color : bg_color);
    for (int k = 0; k < 3; ++k)
      scene.image.rgb[3 * p + k] = clamp_byte(base[k] + (rng.uniform() - 0.5) * 60.0 * noise);
  }

  // Semantic responses.
  const int falloff = std::max(2, static_cast<int>(std::lround(0.06 * std::min(h, w))));
  std::vector<std::vector<double>> level(blobs.size(), std::vector<double>(n, 0.0));
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    std::vector<std::uint8_t> mask(n);
    for (std::size_t p = 0; p < n; ++p) mask[p] = owner[p] == static_cast<int>(b) ? 1 : 0;
    const auto dist = distance_to(mask, h, w, falloff + 1);
    for (std::size_t p = 0; p < n; ++p) {
      if (mask[p]) level[b][p] = 1.0 - noise * rng.uniform();
      else level[b][p] = std::max(0.0, 1.0 - static_cast<double>(dist[p]) / falloff);
    }
  }
  // gain[b][c]: 1 for the blob's primary channels, 0.3..0.6 otherwise.
  std::vector<std::vector<double>> gain(blobs.size(), std::vector<double>(depth));
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    for (auto& g : gain[b]) g = 0.3 + 0.3 * rng.uniform();
    const std::uint32_t primaries = 1 + rng.below(3);
    for (std::uint32_t i = 0; i < primaries; ++i) gain[b][rng.below(depth)] = 1.0;
  }
  std::vector<float> semantic(n * depth);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::uint32_t c = 0; c < depth; ++c) {
      double v = 0.0;
      for (std::size_t b = 0; b < blobs.size(); ++b) v = std::max(v, gain[b][c] * level[b][p]);
      if (c == context_channel) v = std::max(v, bump[p]);
      v += 0.5 * noise * rng.uniform();
      semantic[p * depth + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }

  // Saliency.
  std::vector<double> sal_src(n);
  for (std::size_t p = 0; p < n; ++p)
    sal_src[p] = fg[p] ? 1.0 : (distractor[p] ? distractor_strength : 0.0);
  const auto blurred = box_blur(sal_src, h, w, 2);
  std::vector<float> saliency(n);
  for (std::size_t p = 0; p < n; ++p)
    saliency[p] = static_cast<float>(std::clamp(blurred[p] + 0.5 * noise * rng.uniform(), 0.0, 1.0));

  // Edges.
  std::vector<std::uint8_t> objects(n);
  for (std::size_t p = 0; p < n; ++p) objects[p] = fg[p] ? 1 : (distractor[p] ? 2 : 0);
  const auto band = boundary_band(objects, h, w);
  std::vector<float> edge(n);
  for (std::size_t p = 0; p < n; ++p) {
    double v = band[p] ? 1.0 - noise * rng.uniform() : 0.0;
    if (rng.uniform() < 0.5 * noise) v = std::max(v, rng.uniform());
    edge[p] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }

  std::vector<std::uint8_t> gt(n);
  for (std::size_t p = 0; p < n; ++p) gt[p] = fg[p] ? 255 : 0;
  scene.gt = Tensor::uint8({h, w}, std::move(gt));
  scene.semantic = Tensor::real32({h, w, depth}, std::move(semantic));
  scene.saliency = Tensor::real32({h, w}, std::move(saliency));
  scene.edge = Tensor::real32({h, w}, std::move(edge));
  return scene;
}

Tensor semantic_baseline(const Tensor& semantic) {
  const Tensor norm = normalize_semantic(semantic);
  const std::uint32_t depth = norm.rank() == 3 ? norm.dim(2) : 1;
  const auto v = norm.values<float>();
  std::vector<float> out(v.size() / depth);
  for (std::size_t p = 0; p < out.size(); ++p) {
    float m = 0.0f;
    for (std::uint32_t c = 0; c < depth; ++c) m = std::max(m, v[p * depth + c]);
    out[p] = m;
  }
  return Tensor::real32({norm.dim(0), norm.dim(1)}, std::move(out));
}

Tensor saliency_baseline(const Tensor& saliency) {
  if (saliency.rank() != 2) throw Error(ErrorCode::Shape, "saliency map must be HxW");
  const auto v = saliency.values<float>();
  std::vector<float> out(v.size());
  for (std::size_t p = 0; p < v.size(); ++p) out[p] = std::clamp(v[p], 0.0f, 1.0f);
  return Tensor::real32(saliency.dims(), std::move(out));
}

Tensor baseline_scores(const SynthScene& scene, BaselineMode mode) {
  return mode == BaselineMode::SemanticOnly ? semantic_baseline(scene.semantic)
                                            : saliency_baseline(scene.saliency);
}

void write_scene(const SynthScene& scene, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string());
  write_ppm(scene.image, dir / "image.ppm");
  write_pgm(scene.gt, dir / "gt.pgm");
  write_tensor(scene.semantic, dir / "semantic.sft");
  write_tensor(scene.saliency, dir / "saliency.sft");
  write_tensor(scene.edge, dir / "edge.sft");
}

}  // namespace saff
