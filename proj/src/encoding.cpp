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

#include "saff/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "saff/error.hpp"

namespace saff {

Tensor normalize_semantic(const Tensor& map) {
  if (map.rank() < 2) throw Error(ErrorCode::Shape, "semantic map must be HxW or HxWxD");
  const std::uint32_t depth = map.rank() == 3 ? map.dim(2) : 1;
  const auto in = map.values<float>();
  const std::size_t pixels = in.size() / depth;
  std::vector<float> out(in.size(), 0.0f);
  for (std::uint32_t c = 0; c < depth; ++c) {
    float lo = std::numeric_limits<float>::infinity();
    float hi = -lo;
    for (std::size_t p = 0; p < pixels; ++p) {
      lo = std::min(lo, in[p * depth + c]);
      hi = std::max(hi, in[p * depth + c]);
    }
    if (!(hi > lo)) continue;  // constant channel -> zeros
    const double range = static_cast<double>(hi) - lo;
    for (std::size_t p = 0; p < pixels; ++p) {
      const double v = (static_cast<double>(in[p * depth + c]) - lo) / range;
      out[p * depth + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return Tensor::real32(map.dims(), std::move(out));
}

UnaryFeatures unary_features(const Eigen::MatrixXd& semantic_means,
                             const Eigen::VectorXd& saliency_means) {
  if (semantic_means.rows() != saliency_means.size())
    throw Error(ErrorCode::Shape, "semantic and saliency tables disagree on K");
  if (semantic_means.cols() < 1) throw Error(ErrorCode::Shape, "semantic table has no channels");
  const Eigen::Index k = semantic_means.rows();
  UnaryFeatures u;
  u.semantic = semantic_means.rowwise().maxCoeff();
  u.apparent = saliency_means.cwiseMax(0.0).cwiseMin(1.0);
  u.histogram = semantic_means;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double l1 = semantic_means.row(i).cwiseAbs().sum();
    if (l1 > 0.0) u.histogram.row(i) /= l1;
    else u.histogram.row(i).setZero();
  }
  return u;
}

Eigen::MatrixXd semantic_affinity(const Eigen::MatrixXd& histogram) {
  const Eigen::Index k = histogram.rows(), d = histogram.cols();
  // Row-major copy keeps each descriptor contiguous for the pairwise loop.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> h = histogram;
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double* hi = h.data() + i * d;
    for (Eigen::Index j = i; j < k; ++j) {
      const double* hj = h.data() + j * d;
      double s = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) s += std::min(hi[c], hj[c]);
      s = std::clamp(s, 0.0, 1.0);
      m(i, j) = s;
      m(j, i) = s;
    }
  }
  return m;
}

Eigen::MatrixXd apparent_affinity(const Eigen::MatrixXd& edge_distance, double w_e) {
  if (!(w_e > 0.0) || !std::isfinite(w_e))
    throw Error(ErrorCode::InvalidArgument, "w_e must be a positive finite number");
  return (-w_e * edge_distance.array()).exp().matrix();
}

Eigen::MatrixXd geodesic_edge_matrix(std::span<const BoundaryEdge> edges, std::uint32_t count) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(count);
  for (const auto& e : edges) {
    if (e.a >= count || e.b >= count)
      throw Error(ErrorCode::Shape, "boundary edge references a segment outside 0..K-1");
    if (!(e.weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "boundary weight must be >= 0");
    adj[e.a].emplace_back(e.b, e.weight);
    adj[e.b].emplace_back(e.a, e.weight);
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(count, count, kInf);
  using Item = std::pair<double, std::uint32_t>;
  std::vector<double> d(count);
  for (std::uint32_t src = 0; src < count; ++src) {
    std::fill(d.begin(), d.end(), kInf);
    d[src] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    queue.emplace(0.0, src);
    while (!queue.empty()) {
      const auto [du, u] = queue.top();
      queue.pop();
      if (du > d[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        const double alt = du + w;
        if (alt < d[v]) {
          d[v] = alt;
          queue.emplace(alt, v);
        }
      }
    }
    // Upper triangle from this source, mirrored for exact symmetry.
    dist(src, src) = 0.0;
    for (std::uint32_t j = src + 1; j < count; ++j) {
      dist(src, j) = d[j];
      dist(j, src) = d[j];
    }
  }
  return dist;
}

Eigen::MatrixXd normalize_affinity(const Eigen::MatrixXd& affinity) {
  const Eigen::Index k = affinity.rows();
  if (affinity.cols() != k) throw Error(ErrorCode::Shape, "affinity matrix must be square");
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "affinity normalization needs K >= 2");
  if ((affinity.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "affinity entries must be non-negative");
  Eigen::MatrixXd m = affinity;
  m.diagonal().setZero();
  for (Eigen::Index i = 0; i < k; ++i) {
    const double s = m.row(i).sum();
    if (s > 0.0 && std::isfinite(s)) {
      m.row(i) /= s;
    } else {
      m.row(i).setConstant(1.0 / static_cast<double>(k - 1));
      m(i, i) = 0.0;
    }
  }
  return m;
}

ContextFeatures context_features(const Eigen::MatrixXd& semantic_affinity_norm,
                                 const Eigen::MatrixXd& apparent_affinity_norm,
                                 const Eigen::VectorXd& semantic_unary,
                                 const Eigen::VectorXd& apparent_unary) {
  const Eigen::Index k = semantic_unary.size();
  if (apparent_unary.size() != k || semantic_affinity_norm.rows() != k ||
      semantic_affinity_norm.cols() != k || apparent_affinity_norm.rows() != k ||
      apparent_affinity_norm.cols() != k)
    throw Error(ErrorCode::Shape, "context feature inputs disagree on K");
  ContextFeatures ctx;
  ctx.semantic = (apparent_affinity_norm * semantic_unary).cwiseMax(0.0).cwiseMin(1.0);
  ctx.apparent = (semantic_affinity_norm * apparent_unary).cwiseMax(0.0).cwiseMin(1.0);
  return ctx;
}

EncodedFeatures encode(const EncodeInputs& in, double w_e) {
  if (in.labeling.count < 2)
    throw Error(ErrorCode::InvalidArgument, "encoding needs at least two superpixels");
  const Eigen::MatrixXd semantic_means = aggregate_mean(in.labeling, in.semantic);
  const Eigen::VectorXd saliency_means = aggregate_mean(in.labeling, in.saliency).col(0);
  const UnaryFeatures unary = unary_features(semantic_means, saliency_means);

  EncodedFeatures out;
  auto& aff = out.affinities;
  aff.semantic = semantic_affinity(unary.histogram);
  const auto edges = boundary_edge_strengths(in.labeling, in.edges);
  aff.edge_distance = geodesic_edge_matrix(edges, in.labeling.count);
  aff.apparent = apparent_affinity(aff.edge_distance, w_e);
  aff.semantic_norm = normalize_affinity(aff.semantic);
  aff.apparent_norm = normalize_affinity(aff.apparent);

  const ContextFeatures ctx =
      context_features(aff.semantic_norm, aff.apparent_norm, unary.semantic, unary.apparent);
  out.table.resize(in.labeling.count, 4);
  out.table.col(kSemantic) = unary.semantic.cwiseMax(0.0).cwiseMin(1.0);
  out.table.col(kSemanticContext) = ctx.semantic;
  out.table.col(kApparent) = unary.apparent;
  out.table.col(kApparentContext) = ctx.apparent;
  return out;
}

}  // namespace saff
