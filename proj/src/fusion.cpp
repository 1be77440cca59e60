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

#include "saff/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "saff/error.hpp"

namespace saff {

Eigen::VectorXd geometric_prior(const Eigen::VectorXd& semantic, const Eigen::VectorXd& apparent) {
  if (semantic.size() != apparent.size())
    throw Error(ErrorCode::Shape, "unary feature vectors disagree on K");
  return semantic.cwiseMax(0.0).cwiseProduct(apparent.cwiseMax(0.0)).cwiseSqrt().cwiseMin(1.0);
}

PseudoLabelSet select_pseudo_labels(const Eigen::VectorXd& prior, double th_bg, double th_fg) {
  if (!(th_bg >= 0.0 && th_bg < th_fg && th_fg <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "thresholds must satisfy 0 <= th_bg < th_fg <= 1");
  PseudoLabelSet out;
  for (Eigen::Index i = 0; i < prior.size(); ++i) {
    const auto idx = static_cast<std::uint32_t>(i);
    if (prior[i] < th_bg) out.background.push_back(idx);
    else if (prior[i] > th_fg) out.foreground.push_back(idx);
  }
  out.foreground_weights.assign(out.foreground.size(), 1.0);
  out.background_weights.assign(out.background.size(), 1.0);
  return out;
}

PseudoLabelSet balance_samples(const PseudoLabelSet& labels) {
  if (labels.foreground.empty() || labels.background.empty())
    throw Error(ErrorCode::Empty, "cannot balance pseudo labels with an empty class");
  PseudoLabelSet out = labels;
  const double n_fg = static_cast<double>(labels.foreground.size());
  const double n_bg = static_cast<double>(labels.background.size());
  const double target = std::max(n_fg, n_bg);
  out.foreground_weights.assign(labels.foreground.size(), target / n_fg);
  out.background_weights.assign(labels.background.size(), target / n_bg);
  return out;
}

FusionModel fit_weighted(const Eigen::MatrixX4d& features, const Eigen::VectorXd& targets,
                         const Eigen::VectorXd& weights) {
  const Eigen::Index n = features.rows();
  if (targets.size() != n || weights.size() != n)
    throw Error(ErrorCode::Shape, "least-squares inputs disagree on sample count");
  if (n == 0) throw Error(ErrorCode::Empty, "least squares needs at least one sample");
  if ((weights.array() <= 0.0).any() || !weights.allFinite())
    throw Error(ErrorCode::InvalidArgument, "sample weights must be positive");

  // Minimize ||sqrt(W)(Ax - y)|| with A = [features, 1]. The complete
  // orthogonal decomposition yields the minimum-norm minimizer when A is rank
  // deficient.
  const Eigen::VectorXd sqrt_w = weights.cwiseSqrt();
  Eigen::MatrixXd a(n, 5);
  a.leftCols<4>() = sqrt_w.asDiagonal() * features;
  a.col(4) = sqrt_w;
  const Eigen::VectorXd b = sqrt_w.cwiseProduct(targets);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  Eigen::VectorXd x = cod.solve(b);
  // One refinement step; the correction lies in the row space, so x stays
  // minimum-norm.
  x += cod.solve(b - a * x);

  FusionModel model;
  for (int c = 0; c < 4; ++c) model.weights[c] = x[c];
  model.bias = x[4];
  model.fallback_used = false;
  return model;
}

FusionModel fit_adaptive_weights(const Eigen::MatrixX4d& features, const PseudoLabelSet& labels) {
  if (labels.foreground.empty() || labels.background.empty() ||
      labels.labeled() < kMinLabeledSamples)
    return FusionModel::fallback();
  if (labels.foreground_weights.size() != labels.foreground.size() ||
      labels.background_weights.size() != labels.background.size())
    throw Error(ErrorCode::Shape, "pseudo label weights do not match sample lists");

  const auto n = static_cast<Eigen::Index>(labels.labeled());
  Eigen::MatrixX4d rows(n, 4);
  Eigen::VectorXd target(n), weight(n);
  Eigen::Index row = 0;
  const auto add = [&](std::uint32_t idx, double w, double y) {
    if (idx >= features.rows()) throw Error(ErrorCode::Shape, "pseudo label index out of range");
    rows.row(row) = features.row(idx);
    target[row] = y;
    weight[row] = w;
    ++row;
  };
  for (std::size_t i = 0; i < labels.foreground.size(); ++i)
    add(labels.foreground[i], labels.foreground_weights[i], 1.0);
  for (std::size_t i = 0; i < labels.background.size(); ++i)
    add(labels.background[i], labels.background_weights[i], 0.0);

  FusionModel model = fit_weighted(rows, target, weight);
  const bool finite = std::all_of(model.weights.begin(), model.weights.end(),
                                  [](double v) { return std::isfinite(v); }) &&
                      std::isfinite(model.bias);
  return finite ? model : FusionModel::fallback();
}

Eigen::VectorXd infer_scores(const FusionModel& model, const Eigen::MatrixX4d& features) {
  const Eigen::Vector4d w(model.weights[0], model.weights[1], model.weights[2], model.weights[3]);
  if (!w.allFinite() || !std::isfinite(model.bias))
    throw Error(ErrorCode::InvalidArgument, "fusion model is not finite");
  Eigen::VectorXd raw = features * w;
  raw.array() += model.bias;
  return raw.cwiseMax(0.0).cwiseMin(1.0);
}

Tensor scores_to_map(const SuperpixelLabeling& labeling, const Eigen::VectorXd& scores) {
  if (scores.size() != static_cast<Eigen::Index>(labeling.count))
    throw Error(ErrorCode::Shape, "score count " + std::to_string(scores.size()) +
                                      " does not match K=" + std::to_string(labeling.count));
  std::vector<float> out(labeling.labels.size());
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p] = static_cast<float>(scores[labeling.labels[p]]);
  return Tensor::real32({labeling.height, labeling.width}, std::move(out));
}

Tensor binarize(const Tensor& confidence, double threshold) {
  if (confidence.rank() != 2) throw Error(ErrorCode::Shape, "confidence map must be HxW");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(ErrorCode::InvalidArgument, "binarize threshold must lie in (0,1)");
  const auto v = confidence.values<float>();
  std::vector<std::uint8_t> mask(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    mask[i] = static_cast<double>(v[i]) >= threshold ? 255 : 0;
  return Tensor::uint8(confidence.dims(), std::move(mask));
}

}  // namespace saff
