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
#include <span>

#include <Eigen/Core>

#include "saff/superpixel.hpp"
#include "saff/tensor_io.hpp"

namespace saff {

/// Min-max normalizes each channel of an HxW or HxWxD real32 map to [0,1]
/// over the image. Constant channels become all-zero.
Tensor normalize_semantic(const Tensor& map);

struct UnaryFeatures {
  Eigen::VectorXd semantic;   // S_s: max over channels of the superpixel mean
  Eigen::VectorXd apparent;   // S_a: saliency mean clamped to [0,1]
  Eigen::MatrixXd histogram;  // semantic rows scaled to unit L1 norm (zero rows stay zero)
};

UnaryFeatures unary_features(const Eigen::MatrixXd& semantic_means,
                             const Eigen::VectorXd& saliency_means);

/// Histogram intersection between every pair of L1-normalized rows.
Eigen::MatrixXd semantic_affinity(const Eigen::MatrixXd& histogram);

/// exp(-w_e * E) elementwise. Throws for w_e <= 0.
Eigen::MatrixXd apparent_affinity(const Eigen::MatrixXd& edge_distance, double w_e);

/// All-pairs shortest path over the superpixel adjacency graph with boundary
/// weights as edge costs. Unreachable pairs are +inf (their apparent affinity
/// is then 0).
Eigen::MatrixXd geodesic_edge_matrix(std::span<const BoundaryEdge> edges, std::uint32_t count);

/// Zeroes the diagonal and scales each row to sum 1. Rows with no
/// off-diagonal mass become uniform 1/(K-1). Throws for K < 2.
Eigen::MatrixXd normalize_affinity(const Eigen::MatrixXd& affinity);

struct ContextFeatures {
  Eigen::VectorXd semantic;  // S_sctx = M_a' * S_s
  Eigen::VectorXd apparent;  // S_actx = M_s' * S_a
};

/// Cross inference: the semantic affinity propagates the apparent unary
/// feature and the apparent affinity propagates the semantic one.
ContextFeatures context_features(const Eigen::MatrixXd& semantic_affinity_norm,
                                 const Eigen::MatrixXd& apparent_affinity_norm,
                                 const Eigen::VectorXd& semantic_unary,
                                 const Eigen::VectorXd& apparent_unary);

struct AffinitySet {
  Eigen::MatrixXd semantic;        // M_s
  Eigen::MatrixXd apparent;        // M_a
  Eigen::MatrixXd semantic_norm;   // M_s'
  Eigen::MatrixXd apparent_norm;   // M_a'
  Eigen::MatrixXd edge_distance;   // E
};

// Feature table column order.
enum FeatureColumn : int { kSemantic = 0, kSemanticContext = 1, kApparent = 2, kApparentContext = 3 };

struct EncodedFeatures {
  Eigen::MatrixX4d table;  // K x [S_s, S_sctx, S_a, S_actx]
  AffinitySet affinities;
};

struct EncodeInputs {
  const SuperpixelLabeling& labeling;
  const Tensor& semantic;  // already normalized to [0,1], image resolution
  const Tensor& saliency;  // HxW
  const Tensor& edges;     // HxW, non-negative
};

EncodedFeatures encode(const EncodeInputs& in, double w_e);

}  // namespace saff
