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

#include <doctest.h>

#include "oracles.hpp"
#include "saff/error.hpp"
#include "saff/fusion.hpp"

using namespace saff;
using doctest::Approx;

namespace {

Eigen::MatrixX4d random_features(SplitMix64& rng, Eigen::Index n) {
  Eigen::MatrixX4d f(n, 4);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 4; ++c) f(i, c) = rng.uniform();
  return f;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("geometric prior") {
  const auto g = geometric_prior(vec({0.9, 0.0, 0.36}), vec({0.4, 0.8, 0.36}));
  CHECK(g[0] == Approx(0.6));
  CHECK(g[1] == 0.0);
  CHECK(g[2] == Approx(0.36));
  CHECK_THROWS_AS(geometric_prior(vec({0.1}), vec({0.1, 0.2})), Error);
}

TEST_CASE("pseudo-label selection uses strict thresholds") {
  const auto p = select_pseudo_labels(vec({0.05, 0.5, 0.95, 0.2, 0.6}), 0.2, 0.6);
  CHECK(p.background == std::vector<std::uint32_t>{0});
  CHECK(p.foreground == std::vector<std::uint32_t>{2});
  CHECK(p.labeled() == 2);
  CHECK(p.foreground_weights == std::vector<double>{1.0});
  CHECK_THROWS_AS(select_pseudo_labels(vec({0.5}), 0.6, 0.2), Error);
}

TEST_CASE("balancing weights the minority class") {
  PseudoLabelSet p;
  p.foreground = {0, 1};
  p.background = {2, 3, 4, 5, 6, 7};
  p.foreground_weights.assign(2, 1.0);
  p.background_weights.assign(6, 1.0);
  const auto b = balance_samples(p);
  CHECK(b.foreground_weights == std::vector<double>{3.0, 3.0});
  CHECK(b.background_weights == std::vector<double>(6, 1.0));

  p.foreground = {0, 1, 8, 9, 10, 11};
  p.foreground_weights.assign(6, 1.0);
  const auto eq = balance_samples(p);
  CHECK(eq.foreground_weights == std::vector<double>(6, 1.0));

  p.foreground.clear();
  p.foreground_weights.clear();
  CHECK_THROWS_AS(balance_samples(p), Error);
}

TEST_CASE("fit_weighted recovers an exact linear model") {
  SplitMix64 rng(77);
  const std::array<double, 4> w{0.3, -0.2, 0.5, 0.1};
  const double bias = 0.05;
  const auto f = random_features(rng, 40);
  Eigen::VectorXd y(40), wt(40);
  for (int i = 0; i < 40; ++i) {
    y[i] = bias;
    for (int c = 0; c < 4; ++c) y[i] += w[c] * f(i, c);
    wt[i] = rng.uniform(0.5, 2.0);
  }
  const auto m = fit_weighted(f, y, wt);
  for (int c = 0; c < 4; ++c) CHECK(std::abs(m.weights[c] - w[c]) < 1e-6);
  CHECK(std::abs(m.bias - bias) < 1e-6);
  CHECK_FALSE(m.fallback_used);
}

TEST_CASE("fit_weighted with constant targets gives a pure bias") {
  SplitMix64 rng(5);
  const auto f = random_features(rng, 12);
  const auto m = fit_weighted(f, Eigen::VectorXd::Constant(12, 0.5), Eigen::VectorXd::Ones(12));
  CHECK(m.bias == Approx(0.5).epsilon(1e-9));
  for (double w : m.weights) CHECK(std::abs(w) < 1e-9);
}

TEST_CASE("fit_weighted satisfies the weighted normal equations") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 5 + rng.below(60);
    const auto f = random_features(rng, n);
    Eigen::VectorXd y(n), wt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
      wt[i] = rng.uniform(0.1, 5.0);
    }
    const auto m = fit_weighted(f, y, wt);
    CHECK(testing::normal_equation_residual(f, y, wt, m.weights, m.bias) < 1e-8);
  }
}

TEST_CASE("integer weights equal sample replication") {
  SplitMix64 rng(8);
  const auto f = random_features(rng, 7);
  // Row 0 is the only foreground sample; balancing gives it weight 6.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(7), wt = Eigen::VectorXd::Ones(7);
  y[0] = 1.0;
  wt[0] = 6.0;
  const auto weighted = fit_weighted(f, y, wt);

  Eigen::MatrixX4d rep(12, 4);
  Eigen::VectorXd ry = Eigen::VectorXd::Zero(12);
  for (int i = 0; i < 6; ++i) {
    rep.row(i) = f.row(0);
    ry[i] = 1.0;
  }
  rep.bottomRows(6) = f.bottomRows(6);
  const auto replicated = fit_weighted(rep, ry, Eigen::VectorXd::Ones(12));
  for (int c = 0; c < 4; ++c) CHECK(std::abs(weighted.weights[c] - replicated.weights[c]) < 1e-9);
  CHECK(std::abs(weighted.bias - replicated.bias) < 1e-9);
}

TEST_CASE("rank-deficient systems take the minimum-norm solution") {
  SplitMix64 rng(3);
  auto f = random_features(rng, 20);
  f.col(1) = f.col(0);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = 0.4 * f(i, 0) + 0.2 * f(i, 2) - 0.1 * f(i, 3) + 0.1;
  const auto m = fit_weighted(f, y, Eigen::VectorXd::Ones(20));
  CHECK(m.weights[0] == Approx(0.2).epsilon(1e-8));
  CHECK(m.weights[1] == Approx(0.2).epsilon(1e-8));
  CHECK(m.weights[2] == Approx(0.2).epsilon(1e-8));
  CHECK(m.weights[3] == Approx(-0.1).epsilon(1e-8));
  CHECK(m.bias == Approx(0.1).epsilon(1e-8));
}

TEST_CASE("adaptive fit falls back on thin or one-sided labels") {
  SplitMix64 rng(10);
  const auto f = random_features(rng, 10);
  PseudoLabelSet p;
  p.foreground = {0, 1};
  p.background = {2, 3};
  p.foreground_weights.assign(2, 1.0);
  p.background_weights.assign(2, 1.0);
  CHECK(fit_adaptive_weights(f, p).fallback_used);  // 4 < 5 samples

  p.foreground.clear();
  p.foreground_weights.clear();
  p.background = {2, 3, 4, 5, 6, 7};
  p.background_weights.assign(6, 1.0);
  const auto m = fit_adaptive_weights(f, p);
  CHECK(m.fallback_used);
  CHECK(m.weights == std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
  CHECK(m.bias == 0.0);

  p.foreground = {0};
  p.foreground_weights = {1.0};
  CHECK_FALSE(fit_adaptive_weights(f, p).fallback_used);
}

TEST_CASE("adaptive fit only sees labeled rows") {
  SplitMix64 rng(11);
  auto f = random_features(rng, 12);
  PseudoLabelSet p;
  p.foreground = {0, 1, 2};
  p.background = {3, 4, 5, 6};
  p.foreground_weights.assign(3, 1.0);
  p.background_weights.assign(4, 1.0);
  const auto a = fit_adaptive_weights(f, p);
  f.bottomRows(5).setConstant(0.77);
  const auto b = fit_adaptive_weights(f, p);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
}

TEST_CASE("inference clamps to [0,1]") {
  Eigen::MatrixX4d f(3, 4);
  f << 1, 1, 1, 1, 0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5;
  FusionModel m{{0.5, 0.3, 0.3, 0.2}, 0.0, false};
  auto s = infer_scores(m, f);
  CHECK(s[0] == 1.0);  // 1.3
  m.bias = -0.2;
  s = infer_scores(m, f);
  CHECK(s[1] == 0.0);  // -0.2
  CHECK(s[2] == Approx(0.45));
  const auto fb = infer_scores(FusionModel::fallback(), f);
  CHECK(fb[2] == Approx(0.5));
}

TEST_CASE("scores_to_map paints superpixels") {
  SuperpixelLabeling l{2, 3, 2, {0, 0, 1, 0, 1, 1}};
  const Tensor map = scores_to_map(l, vec({0.25, 0.75}));
  CHECK(map.dims() == Tensor::Dims{2, 3});
  const auto v = map.values<float>();
  CHECK(std::vector<float>(v.begin(), v.end()) == std::vector<float>{0.25f, 0.25f, 0.75f, 0.25f, 0.75f, 0.75f});
  CHECK_THROWS_AS(scores_to_map(l, vec({0.5})), Error);
}

TEST_CASE("binarize at the 0.5 threshold") {
  const Tensor c = Tensor::real32({1, 4}, {0.5f, 0.49f, 1.0f, 0.0f});
  const Tensor b = binarize(c);
  const auto v = b.values<std::uint8_t>();
  CHECK(b.dtype() == DType::UInt8);
  CHECK(std::vector<std::uint8_t>(v.begin(), v.end()) == std::vector<std::uint8_t>{255, 0, 255, 0});

  const Tensor zero = binarize(Tensor::zeros(DType::Real32, {3, 3}));
  for (auto x : zero.values<std::uint8_t>()) CHECK(x == 0);

  SplitMix64 rng(6);
  const Tensor r = testing::random_map(rng, {8, 8});
  const Tensor rb = binarize(r, 0.3);
  const auto rv = r.values<float>();
  const auto bv = rb.values<std::uint8_t>();
  for (std::size_t i = 0; i < rv.size(); ++i) CHECK(bv[i] == (rv[i] >= 0.3f ? 255 : 0));
}
