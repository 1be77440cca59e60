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
#include <span>
#include <variant>
#include <vector>

namespace saff {

enum class DType : std::uint8_t { Real32 = 0, UInt8 = 1, UInt32 = 2 };

/// Dense row-major array with 1 to 3 axes. Real32 tensors hold feature maps
/// (semantic responses, saliency, edges, confidence), UInt8 tensors hold
/// masks and UInt32 tensors hold superpixel labelings.
class Tensor {
 public:
  using Dims = std::vector<std::uint32_t>;

  Tensor() = default;

  static Tensor real32(Dims dims, std::vector<float> data);
  static Tensor uint8(Dims dims, std::vector<std::uint8_t> data);
  static Tensor uint32(Dims dims, std::vector<std::uint32_t> data);
  static Tensor zeros(DType dtype, Dims dims);

  DType dtype() const noexcept { return static_cast<DType>(data_.index()); }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::uint32_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t size() const noexcept;

  // Throws Error(Shape) when T does not match dtype().
  template <class T>
  std::span<const T> values() const;
  template <class T>
  std::span<T> values();

  bool operator==(const Tensor& other) const = default;

 private:
  Tensor(Dims dims, std::variant<std::vector<float>, std::vector<std::uint8_t>,
                                 std::vector<std::uint32_t>> data);

  Dims dims_;
  std::variant<std::vector<float>, std::vector<std::uint8_t>,
               std::vector<std::uint32_t>>
      data_;
};

// SFT container: "SFT1", u8 dtype, u8 ndim, ndim x u32 extents, payload.
// All multi-byte values little-endian.
std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& tensor, const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Align-corners bilinear resampling of an H'xW' or H'xW'xD real32 map to
/// height x width. The channel axis (if any) is preserved.
Tensor resample_bilinear(const Tensor& src, std::uint32_t height,
                         std::uint32_t width);

}  // namespace saff
