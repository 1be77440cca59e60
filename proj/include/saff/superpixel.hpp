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
#include <vector>

#include <Eigen/Core>

#include "saff/pnm.hpp"
#include "saff/tensor_io.hpp"

namespace saff {

/// Per-pixel segment indices covering {0..count-1}; every segment is
/// 4-connected.
struct SuperpixelLabeling {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t count = 0;
  std::vector<std::uint32_t> labels;

  Tensor to_tensor() const;
  // Validates cover and connectivity; throws Error(Format) otherwise.
  static SuperpixelLabeling from_tensor(const Tensor& tensor);
};

/// True when labels cover exactly 0..count-1 and each segment is 4-connected.
bool is_valid_labeling(const SuperpixelLabeling& labeling);

struct SlicParams {
  std::uint32_t k_target = 256;
  double compactness = 10.0;
  std::uint32_t iterations = 10;
};

/// SLIC in CIELAB with grid seeding, 3x3 lowest-gradient seed perturbation
/// and orphan merging. The result count lies in [k_target/2, 2*k_target]
/// for non-degenerate inputs.
SuperpixelLabeling slic_segment(const ImageRGB& image, const SlicParams& params);

/// Row i holds the per-channel mean of the map over segment i. The map may be
/// HxW (one column) or HxWxD.
Eigen::MatrixXd aggregate_mean(const SuperpixelLabeling& labeling, const Tensor& map);

struct BoundaryEdge {
  std::uint32_t a = 0;  // a < b
  std::uint32_t b = 0;
  double weight = 0.0;
};

/// For every pair of 4-adjacent segments, the mean over straddling pixel
/// pairs of the pair-average edge value. Sorted by (a, b).
std::vector<BoundaryEdge> boundary_edge_strengths(const SuperpixelLabeling& labeling,
                                                  const Tensor& edge_map);

}  // namespace saff
