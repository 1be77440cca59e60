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

#include "saff/superpixel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "saff/error.hpp"

namespace saff {

namespace {

struct Lab {
  double l, a, b;
};

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double eps = 216.0 / 24389.0;
  constexpr double kappa = 24389.0 / 27.0;
  return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

// sRGB (D65) to CIELAB.
std::vector<Lab> to_lab(const ImageRGB& image) {
  std::array<double, 256> lin{};
  for (int i = 0; i < 256; ++i) lin[i] = srgb_to_linear(i / 255.0);
  std::vector<Lab> out(std::size_t{image.width} * image.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = lin[image.rgb[3 * i]];
    const double g = lin[image.rgb[3 * i + 1]];
    const double b = lin[image.rgb[3 * i + 2]];
    const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
    const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
    out[i] = {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
  }
  return out;
}

struct Grid {
  std::uint32_t nx = 1;
  std::uint32_t ny = 1;
};

// Picks a seed grid whose cell count is close to k and whose cells are close
// to square. Ties favour more columns.
Grid choose_grid(std::uint32_t width, std::uint32_t height, std::uint32_t k) {
  Grid best;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::uint32_t nx = 1; nx <= std::min(k, width); ++nx) {
    const auto ny = std::clamp<std::uint32_t>(
        static_cast<std::uint32_t>(std::lround(static_cast<double>(k) / nx)), 1, height);
    const double count = static_cast<double>(nx) * ny;
    if (count < k / 2.0 || count > 2.0 * k) continue;
    const double aspect = (static_cast<double>(width) / nx) / (static_cast<double>(height) / ny);
    const double score = 2.0 * std::abs(std::log(count / k)) + std::abs(std::log(aspect));
    if (score < best_score - 1e-12 || (std::abs(score - best_score) <= 1e-12 && nx > best.nx)) {
      best_score = score;
      best = {nx, ny};
    }
  }
  return best;
}

struct Center {
  double l, a, b, y, x;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }
  std::uint32_t find(std::uint32_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void attach(std::uint32_t child, std::uint32_t root) { parent_[child] = root; }

 private:
  std::vector<std::uint32_t> parent_;
};

// Splits a cluster assignment into 4-connected components. Returns the
// component id per pixel and the component count.
std::uint32_t connected_components(std::uint32_t h, std::uint32_t w,
                                   const std::vector<std::uint32_t>& labels,
                                   std::vector<std::uint32_t>& comp) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  comp.assign(labels.size(), kUnset);
  std::vector<std::uint32_t> stack;
  std::uint32_t next = 0;
  for (std::uint32_t start = 0; start < labels.size(); ++start) {
    if (comp[start] != kUnset) continue;
    comp[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::uint32_t p = stack.back();
      stack.pop_back();
      const std::uint32_t y = p / w, x = p % w;
      const auto visit = [&](std::uint32_t q) {
        if (comp[q] == kUnset && labels[q] == labels[p]) {
          comp[q] = next;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    ++next;
  }
  return next;
}

// Merges components smaller than min_size (and, while more than max_count
// remain, the smallest ones) into their largest adjacent component.
void merge_orphans(std::uint32_t h, std::uint32_t w, std::vector<std::uint32_t>& comp,
                   std::uint32_t n, std::size_t min_size, std::size_t max_count) {
  std::vector<std::size_t> size(n, 0);
  for (auto c : comp) ++size[c];
  std::vector<std::set<std::uint32_t>> adj(n);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t p = std::size_t{y} * w + x;
      if (x + 1 < w && comp[p] != comp[p + 1]) {
        adj[comp[p]].insert(comp[p + 1]);
        adj[comp[p + 1]].insert(comp[p]);
      }
      if (y + 1 < h && comp[p] != comp[p + w]) {
        adj[comp[p]].insert(comp[p + w]);
        adj[comp[p + w]].insert(comp[p]);
      }
    }
  }
  std::set<std::pair<std::size_t, std::uint32_t>> by_size;
  for (std::uint32_t c = 0; c < n; ++c) by_size.emplace(size[c], c);

  UnionFind uf(n);
  while (by_size.size() > 1) {
    const auto [s, small] = *by_size.begin();
    if (s >= min_size && by_size.size() <= max_count) break;
    std::uint32_t target = small;
    std::size_t target_size = 0;
    for (auto nb : adj[small]) {
      if (size[nb] > target_size) {
        target_size = size[nb];
        target = nb;
      }
    }
    if (target == small) break;
    by_size.erase(by_size.begin());
    by_size.erase({size[target], target});
    size[target] += size[small];
    by_size.emplace(size[target], target);
    for (auto nb : adj[small]) {
      adj[nb].erase(small);
      if (nb != target) {
        adj[nb].insert(target);
        adj[target].insert(nb);
      }
    }
    adj[small].clear();
    uf.attach(small, target);
  }
  for (auto& c : comp) c = uf.find(c);
}

// Renumbers labels to 0..K-1 in raster order of first appearance.
std::uint32_t compact_labels(std::vector<std::uint32_t>& labels) {
  std::map<std::uint32_t, std::uint32_t> remap;
  for (auto& l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<std::uint32_t>(remap.size()));
    l = it->second;
  }
  return static_cast<std::uint32_t>(remap.size());
}

}  // namespace

Tensor SuperpixelLabeling::to_tensor() const {
  return Tensor::uint32({height, width}, labels);
}

SuperpixelLabeling SuperpixelLabeling::from_tensor(const Tensor& tensor) {
  if (tensor.rank() != 2) throw Error(ErrorCode::Shape, "labeling must be an HxW tensor");
  SuperpixelLabeling out;
  out.height = tensor.dim(0);
  out.width = tensor.dim(1);
  const auto v = tensor.values<std::uint32_t>();
  out.labels.assign(v.begin(), v.end());
  out.count = out.labels.empty() ? 0 : *std::max_element(out.labels.begin(), out.labels.end()) + 1;
  if (!is_valid_labeling(out))
    throw Error(ErrorCode::Format, "labeling does not cover 0..K-1 with connected segments");
  return out;
}

bool is_valid_labeling(const SuperpixelLabeling& labeling) {
  const std::size_t n = std::size_t{labeling.height} * labeling.width;
  if (n == 0 || labeling.labels.size() != n || labeling.count == 0) return false;
  std::vector<std::size_t> per_label(labeling.count, 0);
  for (auto l : labeling.labels) {
    if (l >= labeling.count) return false;
    ++per_label[l];
  }
  if (std::find(per_label.begin(), per_label.end(), 0u) != per_label.end()) return false;
  std::vector<std::uint32_t> comp;
  const auto components =
      connected_components(labeling.height, labeling.width, labeling.labels, comp);
  return components == labeling.count;
}

SuperpixelLabeling slic_segment(const ImageRGB& image, const SlicParams& params) {
  const std::uint32_t w = image.width, h = image.height;
  if (w < 8 || h < 8)
    throw Error(ErrorCode::InvalidArgument, "image must be at least 8x8 for segmentation");
  if (image.rgb.size() != std::size_t{w} * h * 3)
    throw Error(ErrorCode::Shape, "RGB buffer does not match image extents");
  if (params.k_target < 2) throw Error(ErrorCode::InvalidArgument, "k_target must be >= 2");
  const std::size_t area = std::size_t{w} * h;
  if (params.k_target > area)
    throw Error(ErrorCode::InvalidArgument, "k_target " + std::to_string(params.k_target) +
                                                " exceeds pixel count " + std::to_string(area));
  if (!(params.compactness > 0.0))
    throw Error(ErrorCode::InvalidArgument, "compactness must be positive");

  const auto lab = to_lab(image);
  const Grid grid = choose_grid(w, h, params.k_target);
  const double step_x = static_cast<double>(w) / grid.nx;
  const double step_y = static_cast<double>(h) / grid.ny;

  const auto gradient = [&](std::int64_t y, std::int64_t x) {
    const auto at = [&](std::int64_t yy, std::int64_t xx) -> const Lab& {
      yy = std::clamp<std::int64_t>(yy, 0, h - 1);
      xx = std::clamp<std::int64_t>(xx, 0, w - 1);
      return lab[static_cast<std::size_t>(yy) * w + xx];
    };
    const auto sq = [](const Lab& p, const Lab& q) {
      return (p.l - q.l) * (p.l - q.l) + (p.a - q.a) * (p.a - q.a) + (p.b - q.b) * (p.b - q.b);
    };
    return sq(at(y, x + 1), at(y, x - 1)) + sq(at(y + 1, x), at(y - 1, x));
  };

  std::vector<Center> centers;
  centers.reserve(std::size_t{grid.nx} * grid.ny);
  for (std::uint32_t gy = 0; gy < grid.ny; ++gy) {
    for (std::uint32_t gx = 0; gx < grid.nx; ++gx) {
      double cy = (gy + 0.5) * step_y - 0.5;
      double cx = (gx + 0.5) * step_x - 0.5;
      const auto py = static_cast<std::int64_t>(std::lround(std::max(0.0, cy)));
      const auto px = static_cast<std::int64_t>(std::lround(std::max(0.0, cx)));
      // Move to the lowest-gradient pixel of the 3x3 neighbourhood; stay put
      // unless a strictly lower value exists.
      double best = gradient(py, px);
      std::int64_t by = py, bx = px;
      bool moved = false;
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          const std::int64_t yy = py + dy, xx = px + dx;
          if (yy < 0 || xx < 0 || yy >= h || xx >= w) continue;
          const double g = gradient(yy, xx);
          if (g < best) {
            best = g;
            by = yy;
            bx = xx;
            moved = true;
          }
        }
      }
      if (moved) {
        cy = static_cast<double>(by);
        cx = static_cast<double>(bx);
      }
      const Lab& c = lab[static_cast<std::size_t>(by) * w + bx];
      centers.push_back({c.l, c.a, c.b, cy, cx});
    }
  }

  const double spacing = std::sqrt(static_cast<double>(area) / centers.size());
  const double spatial = (params.compactness / spacing) * (params.compactness / spacing);
  const double radius = std::max(step_x, step_y);
  std::vector<std::uint32_t> assign(area, 0);
  std::vector<double> dist(area);

  const auto distance = [&](const Center& c, std::size_t p, std::uint32_t y, std::uint32_t x) {
    const double dl = lab[p].l - c.l, da = lab[p].a - c.a, db = lab[p].b - c.b;
    const double dy = y - c.y, dx = x - c.x;
    return dl * dl + da * da + db * db + spatial * (dy * dy + dx * dx);
  };

  for (std::uint32_t iter = 0; iter < std::max(1u, params.iterations); ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (std::uint32_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      const auto y0 = static_cast<std::uint32_t>(std::max(0.0, std::floor(c.y - radius)));
      const auto y1 = static_cast<std::uint32_t>(std::min<double>(h - 1, std::ceil(c.y + radius)));
      const auto x0 = static_cast<std::uint32_t>(std::max(0.0, std::floor(c.x - radius)));
      const auto x1 = static_cast<std::uint32_t>(std::min<double>(w - 1, std::ceil(c.x + radius)));
      for (std::uint32_t y = y0; y <= y1; ++y) {
        for (std::uint32_t x = x0; x <= x1; ++x) {
          const std::size_t p = std::size_t{y} * w + x;
          const double d = distance(c, p, y, x);
          if (d < dist[p]) {
            dist[p] = d;
            assign[p] = k;
          }
        }
      }
    }
    // Pixels outside every search window fall back to the global nearest.
    for (std::size_t p = 0; p < area; ++p) {
      if (!std::isinf(dist[p])) continue;
      const auto y = static_cast<std::uint32_t>(p / w), x = static_cast<std::uint32_t>(p % w);
      for (std::uint32_t k = 0; k < centers.size(); ++k) {
        const double d = distance(centers[k], p, y, x);
        if (d < dist[p]) {
          dist[p] = d;
          assign[p] = k;
        }
      }
    }

    std::vector<std::array<double, 6>> sums(centers.size(), std::array<double, 6>{});
    for (std::size_t p = 0; p < area; ++p) {
      auto& s = sums[assign[p]];
      s[0] += lab[p].l;
      s[1] += lab[p].a;
      s[2] += lab[p].b;
      s[3] += static_cast<double>(p / w);
      s[4] += static_cast<double>(p % w);
      s[5] += 1.0;
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const auto& s = sums[k];
      if (s[5] == 0.0) continue;
      centers[k] = {s[0] / s[5], s[1] / s[5], s[2] / s[5], s[3] / s[5], s[4] / s[5]};
    }
  }

  std::vector<std::uint32_t> comp;
  const std::uint32_t n_comp = connected_components(h, w, assign, comp);
  const std::size_t min_size = std::max<std::size_t>(1, area / centers.size() / 4);
  merge_orphans(h, w, comp, n_comp, min_size, std::size_t{2} * params.k_target);

  SuperpixelLabeling out;
  out.height = h;
  out.width = w;
  out.labels = std::move(comp);
  out.count = compact_labels(out.labels);
  return out;
}

Eigen::MatrixXd aggregate_mean(const SuperpixelLabeling& labeling, const Tensor& map) {
  if (map.rank() < 2 || map.dim(0) != labeling.height || map.dim(1) != labeling.width)
    throw Error(ErrorCode::Shape, "feature map extents do not match the labeling");
  const std::uint32_t depth = map.rank() == 3 ? map.dim(2) : 1;
  const auto v = map.values<float>();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(labeling.count, depth);
  std::vector<std::size_t> counts(labeling.count, 0);
  for (std::size_t p = 0; p < labeling.labels.size(); ++p) {
    const auto l = labeling.labels[p];
    ++counts[l];
    for (std::uint32_t c = 0; c < depth; ++c) sums(l, c) += v[p * depth + c];
  }
  for (std::uint32_t l = 0; l < labeling.count; ++l) {
    if (counts[l] == 0) continue;
    sums.row(l) /= static_cast<double>(counts[l]);
  }
  return sums;
}

std::vector<BoundaryEdge> boundary_edge_strengths(const SuperpixelLabeling& labeling,
                                                  const Tensor& edge_map) {
  if (edge_map.rank() != 2 || edge_map.dim(0) != labeling.height ||
      edge_map.dim(1) != labeling.width)
    throw Error(ErrorCode::Shape, "edge map extents do not match the labeling");
  const auto e = edge_map.values<float>();
  if (std::any_of(e.begin(), e.end(), [](float v) { return v < 0.0f; }))
    throw Error(ErrorCode::InvalidArgument, "edge map contains negative values");
  const std::uint32_t h = labeling.height, w = labeling.width;
  const auto& lab = labeling.labels;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, std::size_t>> acc;
  const auto add = [&](std::size_t p, std::size_t q) {
    if (lab[p] == lab[q]) return;
    auto key = std::minmax(lab[p], lab[q]);
    auto& slot = acc[{key.first, key.second}];
    slot.first += 0.5 * (static_cast<double>(e[p]) + static_cast<double>(e[q]));
    ++slot.second;
  };
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t p = std::size_t{y} * w + x;
      if (x + 1 < w) add(p, p + 1);
      if (y + 1 < h) add(p, p + w);
    }
  }
  std::vector<BoundaryEdge> out;
  out.reserve(acc.size());
  for (const auto& [key, slot] : acc)
    out.push_back({key.first, key.second, slot.first / static_cast<double>(slot.second)});
  return out;
}

}  // namespace saff
