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
#include <filesystem>
#include <vector>

#include "saff/tensor_io.hpp"

namespace saff {

struct ImageRGB {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> rgb;  // interleaved, row-major

  const std::uint8_t* pixel(std::uint32_t y, std::uint32_t x) const {
    return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  bool operator==(const ImageRGB&) const = default;
};

// Binary PNM with maxval 255 only: P6 for RGB, P5 for grayscale. Grayscale
// images are returned as HxW uint8 tensors.
ImageRGB read_ppm(const std::filesystem::path& path);
void write_ppm(const ImageRGB& image, const std::filesystem::path& path);
Tensor read_pgm(const std::filesystem::path& path);
void write_pgm(const Tensor& gray, const std::filesystem::path& path);

ImageRGB decode_ppm(std::span<const std::uint8_t> bytes);
Tensor decode_pgm(std::span<const std::uint8_t> bytes);

}  // namespace saff
