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

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "saff/superpixel.hpp"
#include "saff/tensor_io.hpp"

namespace saff {

inline constexpr double kDefaultBackgroundThreshold = 0.2;
inline constexpr double kDefaultForegroundThreshold = 0.6;
inline constexpr double kDefaultBinarizeThreshold = 0.5;
inline constexpr std::size_t kMinLabeledSamples = 5;

/// Linear scoring model over the four encoded features plus a bias.
struct FusionModel {
  std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
  double bias = 0.0;
  bool fallback_used = false;

  static FusionModel fallback() { return FusionModel{{0.25, 0.25, 0.25, 0.25}, 0.0, true}; }
};

struct PseudoLabelSet {
  std::vector<std::uint32_t> foreground;  // target 1
  std::vector<std::uint32_t> background;  // target 0
  std::vector<double> foreground_weights;
  std::vector<double> background_weights;

  std::size_t labeled() const { return foreground.size() + background.size(); }
};

/// sqrt(S_s * S_a) per superpixel.
Eigen::VectorXd geometric_prior(const Eigen::VectorXd& semantic, const Eigen::VectorXd& apparent);

/// g < th_bg -> background, g > th_fg -> foreground, anything else unlabeled.
/// All weights start at 1.
PseudoLabelSet select_pseudo_labels(const Eigen::VectorXd& prior, double th_bg, double th_fg);

/// Weights the minority class so both classes carry max(n_fg, n_bg) total
/// weight. Throws Error(Empty) when either class is empty.
PseudoLabelSet balance_samples(const PseudoLabelSet& labels);

/// Minimizes sum_i weight_i * (features_i . w + bias - target_i)^2 and
/// returns the minimum-norm minimizer. No fallback logic.
FusionModel fit_weighted(const Eigen::MatrixX4d& features, const Eigen::VectorXd& targets,
                         const Eigen::VectorXd& weights);

/// Weighted least squares for (w, bias) on the pseudo-labelled rows. Falls back to the uniform model when
/// a class is empty or fewer than kMinLabeledSamples are labeled. Rank
/// deficient systems take the minimum-norm solution.
FusionModel fit_adaptive_weights(const Eigen::MatrixX4d& features, const PseudoLabelSet& labels);

/// clamp(features * w + bias, 0, 1).
Eigen::VectorXd infer_scores(const FusionModel& model, const Eigen::MatrixX4d& features);

/// Paints each pixel with its superpixel's score. HxW real32.
Tensor scores_to_map(const SuperpixelLabeling& labeling, const Eigen::VectorXd& scores);

/// 255 where value >= threshold, else 0. HxW uint8.
Tensor binarize(const Tensor& confidence, double threshold = kDefaultBinarizeThreshold);

}  // namespace saff
