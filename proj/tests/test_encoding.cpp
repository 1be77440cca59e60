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

#include <cmath>
#include <numeric>

#include <doctest.h>

#include "oracles.hpp"
#include "saff/encoding.hpp"
#include "saff/error.hpp"
#include "saff/synth.hpp"

using namespace saff;
using doctest::Approx;

TEST_CASE("semantic channels are min-max normalized per channel") {
  // 1x3 image, three channels: channel 0 spans [2, 6], channel 1 is
  // constant, channel 2 already spans [0, 1].
  const Tensor map = Tensor::real32({1, 3, 3}, {2, 5, 0, 4, 5, 0.25f, 6, 5, 1});
  const Tensor norm = normalize_semantic(map);
  const auto v = norm.values<float>();
  CHECK(v[0] == 0.0f);
  CHECK(v[3] == 0.5f);  // (4 - 2) / (6 - 2)
  CHECK(v[6] == 1.0f);
  CHECK(v[1] == 0.0f);
  CHECK(v[4] == 0.0f);
  CHECK(v[7] == 0.0f);
  CHECK(v[2] == 0.0f);
  CHECK(v[5] == 0.25f);
  CHECK(v[8] == 1.0f);
}

TEST_CASE("unary features: max response, clamped saliency, L1 histogram") {
  Eigen::MatrixXd means(3, 3);
  means << 0.1, 0.7, 0.3, 0, 0, 0, 0.2, 0.2, 0.2;
  Eigen::VectorXd sal(3);
  sal << 0.5, 1.2, -0.1;
  const auto u = unary_features(means, sal);
  CHECK(u.semantic[0] == 0.7);
  CHECK(u.histogram(0, 0) == Approx(1.0 / 11));
  CHECK(u.histogram(0, 1) == Approx(7.0 / 11));
  CHECK(u.histogram(0, 2) == Approx(3.0 / 11));
  CHECK(u.semantic[1] == 0.0);
  CHECK(u.histogram.row(1).isZero());
  CHECK(u.apparent[0] == 0.5);
  CHECK(u.apparent[1] == 1.0);
  CHECK(u.apparent[2] == 0.0);

  Eigen::MatrixXd single(1, 1);
  single << 0.4;
  const auto s = unary_features(single, Eigen::VectorXd::Zero(1));
  CHECK(s.semantic[0] == 0.4);
  CHECK(s.histogram(0, 0) == 1.0);
}

TEST_CASE("histogram intersection examples") {
  Eigen::MatrixXd h(4, 2);
  h << 0.2, 0.8, 0.5, 0.5, 1.0, 0.0, 0.0, 1.0;
  const auto m = semantic_affinity(h);
  CHECK(m(0, 1) == Approx(0.7));  // min(.2,.5) + min(.8,.5)
  CHECK(m(2, 3) == 0.0);          // disjoint support
  for (int i = 0; i < 4; ++i) CHECK(m(i, i) == Approx(1.0).epsilon(1e-12));
  CHECK(m == m.transpose());
}

TEST_CASE("semantic affinity equals the elementwise-min oracle") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(30)), d = 1 + static_cast<int>(rng.below(20));
    Eigen::MatrixXd means(k, d);
    for (int i = 0; i < k; ++i)
      for (int c = 0; c < d; ++c) means(i, c) = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    const auto u = unary_features(means, Eigen::VectorXd::Zero(k));
    const auto m = semantic_affinity(u.histogram);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        CHECK(m(i, j) == saff::testing::intersection_oracle(u.histogram, i, j));
        CHECK(m(i, j) >= 0.0);
        CHECK(m(i, j) <= 1.0);
      }
      if (u.histogram.row(i).sum() > 0) CHECK(m(i, i) == Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("apparent affinity is exp(-w_e * E)") {
  Eigen::MatrixXd e(1, 3);
  e << 0.0, 1.0, 2.0;
  const auto m = apparent_affinity(e, 3.5);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == Approx(0.0301974).epsilon(1e-6));
  CHECK(m(0, 1) > m(0, 2));
  CHECK(m(0, 2) > 0.0);
  CHECK_THROWS_AS(apparent_affinity(e, 0.0), Error);
  CHECK_THROWS_AS(apparent_affinity(e, -1.0), Error);
}

TEST_CASE("geodesic edge matrix on small graphs") {
  const std::vector<BoundaryEdge> single{{0, 1, 0.4}};
  const auto e1 = geodesic_edge_matrix(single, 2);
  CHECK(e1(0, 1) == 0.4);
  CHECK(e1(1, 0) == 0.4);
  CHECK(e1(0, 0) == 0.0);

  // Path 0 - 2 - 1 with weights 0.2 and 0.3 and no direct edge.
  const std::vector<BoundaryEdge> path{{0, 2, 0.2}, {1, 2, 0.3}};
  const auto e2 = geodesic_edge_matrix(path, 3);
  CHECK(e2(0, 1) == Approx(0.5));

  const std::vector<BoundaryEdge> zero{{0, 1, 0.0}, {1, 2, 0.0}, {2, 3, 0.0}};
  const auto ma = apparent_affinity(geodesic_edge_matrix(zero, 4), 3.5);
  CHECK((ma.array() == 1.0).all());
}

TEST_CASE("geodesic edge matrix matches Floyd-Warshall and the triangle inequality") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const std::uint32_t k = 2 + rng.below(20);
    const auto edges = saff::testing::random_connected_graph(rng, k, rng.below(3 * k));
    const auto e = geodesic_edge_matrix(edges, k);
    const auto oracle = saff::testing::floyd_warshall(edges, k);
    CHECK(e.isApprox(oracle, 1e-12));
    CHECK(e == e.transpose());
    CHECK(e.diagonal().isZero());
    for (std::uint32_t i = 0; i < k; ++i)
      for (std::uint32_t j = 0; j < k; ++j)
        for (std::uint32_t m = 0; m < k; ++m) CHECK(e(i, j) <= e(i, m) + e(m, j) + 1e-12);
  }
}

TEST_CASE("normalize_affinity zeroes the diagonal and makes rows stochastic") {
  const auto m = normalize_affinity(Eigen::MatrixXd::Ones(3, 3));
  Eigen::Matrix3d expected;
  expected << 0, .5, .5, .5, 0, .5, .5, .5, 0;
  CHECK(m.isApprox(expected));

  Eigen::MatrixXd isolated = Eigen::MatrixXd::Ones(4, 4);
  isolated.row(2).setZero();
  isolated(2, 2) = 1.0;
  const auto n = normalize_affinity(isolated);
  for (int j = 0; j < 4; ++j) CHECK(n(2, j) == (j == 2 ? 0.0 : 1.0 / 3.0));

  SplitMix64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(40));
    Eigen::MatrixXd a(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    const auto r = normalize_affinity(a);
    CHECK(r.diagonal().isZero());
    for (int i = 0; i < k; ++i) CHECK(std::abs(r.row(i).sum() - 1.0) <= 1e-9);
  }

  CHECK_THROWS_AS(normalize_affinity(Eigen::MatrixXd::Ones(1, 1)), Error);
}

TEST_CASE("context features use crossed affinities") {
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  Eigen::VectorXd s_s(2), s_a(2);
  s_s << 0.1, 0.2;
  s_a << 0.3, 0.9;
  const auto uniform = normalize_affinity(Eigen::MatrixXd::Ones(2, 2));
  const auto ctx = context_features(swap, uniform, s_s, s_a);
  CHECK(ctx.apparent[0] == 0.9);
  CHECK(ctx.apparent[1] == 0.3);

  // Constant apparent unary -> constant apparent context.
  SplitMix64 rng(4);
  const int k = 7;
  Eigen::MatrixXd ms(k, k), ma(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      ms(i, j) = rng.uniform();
      ma(i, j) = rng.uniform();
    }
  const auto ms_n = normalize_affinity(ms), ma_n = normalize_affinity(ma);
  Eigen::VectorXd ss(k);
  for (int i = 0; i < k; ++i) ss[i] = rng.uniform();
  const auto c1 = context_features(ms_n, ma_n, ss, Eigen::VectorXd::Constant(k, 0.42));
  for (int i = 0; i < k; ++i) CHECK(c1.apparent[i] == Approx(0.42).epsilon(1e-12));

  // Permuting the apparent affinity changes only the semantic context.
  Eigen::VectorXd sa(k);
  for (int i = 0; i < k; ++i) sa[i] = rng.uniform();
  const auto base = context_features(ms_n, ma_n, ss, sa);
  Eigen::MatrixXd ma_perm = ma_n;
  ma_perm.row(0).swap(ma_perm.row(1));
  const auto perm = context_features(ms_n, ma_perm, ss, sa);
  CHECK(perm.apparent == base.apparent);
  CHECK(perm.semantic != base.semantic);

  CHECK_THROWS_AS(context_features(ms_n, ma_n, ss, Eigen::VectorXd::Zero(k - 1)), Error);
}

TEST_CASE("context features stay inside the unary ranges") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(30));
    Eigen::MatrixXd ms(k, k), ma(k, k);
    Eigen::VectorXd ss(k), sa(k);
    for (int i = 0; i < k; ++i) {
      ss[i] = rng.uniform();
      sa[i] = rng.uniform();
      for (int j = 0; j < k; ++j) {
        ms(i, j) = rng.uniform();
        ma(i, j) = rng.uniform();
      }
    }
    const auto ctx = context_features(normalize_affinity(ms), normalize_affinity(ma), ss, sa);
    CHECK(ctx.apparent.minCoeff() >= sa.minCoeff() - 1e-12);
    CHECK(ctx.apparent.maxCoeff() <= sa.maxCoeff() + 1e-12);
    CHECK(ctx.semantic.minCoeff() >= ss.minCoeff() - 1e-12);
    CHECK(ctx.semantic.maxCoeff() <= ss.maxCoeff() + 1e-12);
  }
}

TEST_CASE("full encoding of a synthetic scene") {
  const auto scene = generate_scene(9, SynthParams{64, 64, 6, 0.25});
  const auto labeling = slic_segment(scene.image, {64, 10.0, 10});
  const Tensor semantic = normalize_semantic(scene.semantic);
  const auto enc = encode({labeling, semantic, scene.saliency, scene.edge}, 3.5);
  CHECK(enc.table.rows() == labeling.count);
  CHECK(enc.table.minCoeff() >= 0.0);
  CHECK(enc.table.maxCoeff() <= 1.0);
  const auto& a = enc.affinities;
  for (const auto* m : {&a.semantic_norm, &a.apparent_norm}) {
    CHECK(m->diagonal().isZero());
    for (Eigen::Index i = 0; i < m->rows(); ++i) CHECK(std::abs(m->row(i).sum() - 1.0) <= 1e-9);
  }
  CHECK(a.semantic == a.semantic.transpose());
  CHECK(a.apparent == a.apparent.transpose());
  CHECK(a.edge_distance.minCoeff() >= 0.0);
  CHECK(a.apparent.minCoeff() > 0.0);
  CHECK(a.apparent.maxCoeff() <= 1.0);
}
