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

#include <map>

#include <doctest.h>

#include "oracles.hpp"
#include "saff/error.hpp"
#include "saff/superpixel.hpp"

using namespace saff;

namespace {

ImageRGB flat_image(std::uint32_t h, std::uint32_t w, std::uint8_t r, std::uint8_t g,
                    std::uint8_t b) {
  ImageRGB img;
  img.width = w;
  img.height = h;
  for (std::size_t i = 0; i < std::size_t{w} * h; ++i) img.rgb.insert(img.rgb.end(), {r, g, b});
  return img;
}

std::vector<std::size_t> segment_areas(const SuperpixelLabeling& l) {
  std::vector<std::size_t> area(l.count, 0);
  for (auto v : l.labels) ++area[v];
  return area;
}

}  // namespace

TEST_CASE("uniform 64x64 image with k=4 gives four near-equal segments") {
  // No colour gradient: assignment is the spatial Voronoi of the 2x2 seed
  // grid at (15.5, 15.5), (15.5, 47.5), ... whose cells are 32x32 = 1024 px.
  const auto l = slic_segment(flat_image(64, 64, 120, 80, 200), {4, 10.0, 10});
  REQUIRE(l.count == 4);
  CHECK(is_valid_labeling(l));
  for (auto a : segment_areas(l)) {
    CHECK(a >= 1024 * 0.9);
    CHECK(a <= 1024 * 1.1);
  }
}

TEST_CASE("k_target above the pixel count is rejected") {
  CHECK_THROWS_AS(slic_segment(flat_image(8, 8, 0, 0, 0), {65, 10.0, 10}), Error);
  CHECK_NOTHROW(slic_segment(flat_image(8, 8, 0, 0, 0), {64, 10.0, 10}));
  CHECK_THROWS_AS(slic_segment(flat_image(8, 8, 0, 0, 0), {1, 10.0, 10}), Error);
  CHECK_THROWS_AS(slic_segment(flat_image(7, 8, 0, 0, 0), {4, 10.0, 10}), Error);
}

TEST_CASE("two-tone image splits at the tone boundary") {
  // Left of column 29 black, right white. Black and white differ by 100 in
  // CIELAB lightness with a = b = 0.
  const std::uint32_t h = 64, w = 64, edge = 29;
  ImageRGB img = flat_image(h, w, 0, 0, 0);
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = edge; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.rgb[3 * (y * w + x) + c] = 255;
  const auto l = slic_segment(img, {2, 10.0, 10});
  REQUIRE(l.count == 2);

  // Oracle: nearest of the two tone-region centres under the SLIC distance
  // d^2 = dlab^2 + (m/S)^2 dxy^2 with S = sqrt(N/2).
  const double s = std::sqrt(h * w / 2.0);
  const double spatial = (10.0 / s) * (10.0 / s);
  const double cy = (h - 1) / 2.0;
  const double cx_dark = (edge - 1) / 2.0, cx_light = (edge + w - 1) / 2.0;
  std::map<std::uint32_t, int> vote;  // label -> which oracle side it matches
  std::size_t mismatched = 0;
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const bool light = x >= edge;
      const double d_dark = (light ? 100.0 * 100.0 : 0.0) +
                            spatial * ((y - cy) * (y - cy) + (x - cx_dark) * (x - cx_dark));
      const double d_light = (light ? 0.0 : 100.0 * 100.0) +
                             spatial * ((y - cy) * (y - cy) + (x - cx_light) * (x - cx_light));
      const int side = d_light < d_dark ? 1 : 0;
      const auto label = l.labels[y * w + x];
      auto [it, inserted] = vote.try_emplace(label, side);
      const bool near_boundary = x + 1 >= edge && x <= edge;
      if (it->second != side && !near_boundary) ++mismatched;
    }
  }
  CHECK(mismatched == 0);
  CHECK(vote.size() == 2);
}

TEST_CASE("random images give valid, bounded and deterministic labelings") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const std::uint32_t h = 8 + rng.below(57), w = 8 + rng.below(57);
    const std::uint32_t k = 2 + rng.below(std::min<std::uint32_t>(h * w / 4, 300));
    const ImageRGB img = saff::testing::random_image(rng, h, w);
    const SlicParams params{k, 1.0 + rng.uniform() * 30.0, 10};
    const auto a = slic_segment(img, params);
    const auto b = slic_segment(img, params);
    CAPTURE(h);
    CAPTURE(w);
    CAPTURE(k);
    CHECK(is_valid_labeling(a));
    CHECK(a.count >= k / 2);
    CHECK(a.count <= 2 * k);
    CHECK(a.labels == b.labels);
  }
}

TEST_CASE("labeling tensors validate cover and connectivity") {
  SuperpixelLabeling ok{2, 2, 2, {0, 0, 1, 1}};
  CHECK(SuperpixelLabeling::from_tensor(ok.to_tensor()).labels == ok.labels);
  // Label 0 split into two components.
  CHECK_THROWS_AS(SuperpixelLabeling::from_tensor(Tensor::uint32({2, 2}, {0, 1, 1, 0})), Error);
  // Label 1 missing from 0..2.
  CHECK_THROWS_AS(SuperpixelLabeling::from_tensor(Tensor::uint32({2, 2}, {0, 0, 2, 2})), Error);
}

TEST_CASE("aggregate_mean of a constant map is constant") {
  SplitMix64 rng(5);
  const auto l = slic_segment(saff::testing::random_image(rng, 20, 20), {10, 10.0, 10});
  const Tensor map = Tensor::real32({20, 20, 3}, std::vector<float>(1200, 0.625f));
  const auto m = aggregate_mean(l, map);
  CHECK(m.rows() == l.count);
  CHECK(m.cols() == 3);
  CHECK((m.array() == 0.625).all());
}

TEST_CASE("aggregate_mean of a two-pixel segment") {
  const SuperpixelLabeling l{2, 2, 2, {0, 0, 1, 1}};
  const auto m = aggregate_mean(l, Tensor::real32({2, 2}, {0.2f, 0.8f, 1.0f, 1.0f}));
  CHECK(m(0, 0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(m(1, 0) == 1.0);
}

TEST_CASE("aggregate_mean equals the brute-force accumulation") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t k = 1 + rng.below(12), d = 1 + rng.below(4);
    SuperpixelLabeling l{16, 16, k, std::vector<std::uint32_t>(256)};
    for (std::uint32_t i = 0; i < k; ++i) l.labels[i] = i;  // every label used
    for (std::size_t p = k; p < 256; ++p) l.labels[p] = rng.below(k);
    const Tensor map = saff::testing::random_map(rng, {16, 16, d});
    const auto v = map.values<float>();
    const Eigen::MatrixXd oracle =
        saff::testing::mean_oracle(l.labels, k, std::vector<float>(v.begin(), v.end()), d);
    CHECK(aggregate_mean(l, map) == oracle);
  }
}

TEST_CASE("aggregate_mean and boundary strengths reject mismatched extents") {
  const SuperpixelLabeling l{2, 2, 2, {0, 0, 1, 1}};
  CHECK_THROWS_AS(aggregate_mean(l, Tensor::real32({2, 3}, std::vector<float>(6))), Error);
  CHECK_THROWS_AS(boundary_edge_strengths(l, Tensor::real32({3, 2}, std::vector<float>(6))), Error);
  CHECK_THROWS_AS(boundary_edge_strengths(l, Tensor::real32({2, 2}, {0, -1, 0, 0})), Error);
}

TEST_CASE("boundary strengths on a zero edge map are zero") {
  SplitMix64 rng(8);
  const auto l = slic_segment(saff::testing::random_image(rng, 24, 24), {12, 10.0, 10});
  const auto edges = boundary_edge_strengths(l, Tensor::real32({24, 24}, std::vector<float>(576)));
  CHECK(!edges.empty());
  for (const auto& e : edges) {
    CHECK(e.a < e.b);
    CHECK(e.weight == 0.0);
  }
}

TEST_CASE("a one-pixel edge line between two segments weighs 0.5") {
  // Columns 0..3 are segment 0, 4..7 segment 1; the line sits on column 3.
  // Every straddling pair is (1.0, 0.0), whose pair mean is 0.5.
  SuperpixelLabeling l{8, 8, 2, std::vector<std::uint32_t>(64)};
  std::vector<float> edge(64, 0.0f);
  for (std::uint32_t y = 0; y < 8; ++y) {
    for (std::uint32_t x = 0; x < 8; ++x) l.labels[y * 8 + x] = x < 4 ? 0 : 1;
    edge[y * 8 + 3] = 1.0f;
  }
  const auto edges = boundary_edge_strengths(l, Tensor::real32({8, 8}, edge));
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].a == 0);
  CHECK(edges[0].b == 1);
  CHECK(edges[0].weight == 0.5);
}

TEST_CASE("non-adjacent segments have no boundary entry") {
  SuperpixelLabeling l{4, 9, 3, std::vector<std::uint32_t>(36)};
  for (std::uint32_t y = 0; y < 4; ++y)
    for (std::uint32_t x = 0; x < 9; ++x) l.labels[y * 9 + x] = x / 3;
  const auto edges = boundary_edge_strengths(l, Tensor::real32({4, 9}, std::vector<float>(36, 0.3f)));
  REQUIRE(edges.size() == 2);
  CHECK((edges[0].a == 0 && edges[0].b == 1));
  CHECK((edges[1].a == 1 && edges[1].b == 2));
  CHECK(edges[0].weight == doctest::Approx(0.3));
}
