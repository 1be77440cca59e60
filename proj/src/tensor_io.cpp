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

#include "saff/tensor_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "saff/error.hpp"

namespace saff {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'T', '1'};
// Payloads above 16 GiB are treated as corrupt headers.
constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 34;

std::size_t element_size(DType dtype) {
  switch (dtype) {
    case DType::Real32:
    case DType::UInt32:
      return 4;
    case DType::UInt8:
      return 1;
  }
  throw Error(ErrorCode::Format, "unknown dtype");
}

std::size_t checked_count(const Tensor::Dims& dims) {
  if (dims.empty() || dims.size() > 3)
    throw Error(ErrorCode::Shape,
                "tensor rank must be 1..3, got " + std::to_string(dims.size()));
  std::size_t n = 1;
  for (auto d : dims) {
    if (d == 0) throw Error(ErrorCode::Shape, "tensor extent must be positive");
    n *= d;
  }
  return n;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

}  // namespace

Tensor::Tensor(Dims dims,
               std::variant<std::vector<float>, std::vector<std::uint8_t>,
                            std::vector<std::uint32_t>>
                   data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  const std::size_t n = checked_count(dims_);
  const std::size_t have = std::visit([](const auto& v) { return v.size(); }, data_);
  if (n != have)
    throw Error(ErrorCode::Shape, "tensor data length " + std::to_string(have) +
                                      " does not match extents (" +
                                      std::to_string(n) + ")");
}

Tensor Tensor::real32(Dims dims, std::vector<float> data) {
  return Tensor(std::move(dims), std::move(data));
}
Tensor Tensor::uint8(Dims dims, std::vector<std::uint8_t> data) {
  return Tensor(std::move(dims), std::move(data));
}
Tensor Tensor::uint32(Dims dims, std::vector<std::uint32_t> data) {
  return Tensor(std::move(dims), std::move(data));
}

Tensor Tensor::zeros(DType dtype, Dims dims) {
  const std::size_t n = checked_count(dims);
  switch (dtype) {
    case DType::Real32: return real32(std::move(dims), std::vector<float>(n));
    case DType::UInt8: return uint8(std::move(dims), std::vector<std::uint8_t>(n));
    case DType::UInt32: return uint32(std::move(dims), std::vector<std::uint32_t>(n));
  }
  throw Error(ErrorCode::Format, "unknown dtype");
}

std::size_t Tensor::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

template <class T>
std::span<const T> Tensor::values() const {
  const auto* v = std::get_if<std::vector<T>>(&data_);
  if (!v) throw Error(ErrorCode::Shape, "tensor dtype mismatch");
  return {v->data(), v->size()};
}

template <class T>
std::span<T> Tensor::values() {
  auto* v = std::get_if<std::vector<T>>(&data_);
  if (!v) throw Error(ErrorCode::Shape, "tensor dtype mismatch");
  return {v->data(), v->size()};
}

template std::span<const float> Tensor::values<float>() const;
template std::span<const std::uint8_t> Tensor::values<std::uint8_t>() const;
template std::span<const std::uint32_t> Tensor::values<std::uint32_t>() const;
template std::span<float> Tensor::values<float>();
template std::span<std::uint8_t> Tensor::values<std::uint8_t>();
template std::span<std::uint32_t> Tensor::values<std::uint32_t>();

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(static_cast<std::uint8_t>(tensor.dtype()));
  out.push_back(static_cast<std::uint8_t>(tensor.rank()));
  for (auto d : tensor.dims()) put_u32(out, d);
  out.reserve(out.size() + tensor.size() * element_size(tensor.dtype()));
  switch (tensor.dtype()) {
    case DType::Real32:
      for (float f : tensor.values<float>()) {
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
      }
      break;
    case DType::UInt8: {
      auto v = tensor.values<std::uint8_t>();
      out.insert(out.end(), v.begin(), v.end());
      break;
    }
    case DType::UInt32:
      for (auto u : tensor.values<std::uint32_t>()) put_u32(out, u);
      break;
  }
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0)
      throw Error(ErrorCode::BadMagic, "not an SFT file (bad magic)");
    throw Error(ErrorCode::Truncated, "SFT header truncated");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::BadMagic, "not an SFT file (bad magic)");
  const std::uint8_t code = bytes[4];
  if (code > 2) throw Error(ErrorCode::Format, "unknown SFT dtype code " + std::to_string(code));
  const auto dtype = static_cast<DType>(code);
  const std::size_t ndim = bytes[5];
  if (ndim < 1 || ndim > 3)
    throw Error(ErrorCode::Format, "SFT rank must be 1..3, got " + std::to_string(ndim));
  if (bytes.size() < 6 + 4 * ndim) throw Error(ErrorCode::Truncated, "SFT extents truncated");

  Tensor::Dims dims(ndim);
  std::uint64_t payload = element_size(dtype);
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = get_u32(bytes.data() + 6 + 4 * i);
    if (dims[i] == 0) throw Error(ErrorCode::Format, "SFT extent must be positive");
    if (dims[i] > kMaxPayloadBytes / payload)
      throw Error(ErrorCode::DimOverflow, "SFT extents overflow the payload limit");
    payload *= dims[i];
  }
  const std::size_t offset = 6 + 4 * ndim;
  const std::size_t available = bytes.size() - offset;
  if (available < payload) throw Error(ErrorCode::Truncated, "SFT payload truncated");
  if (available > payload) throw Error(ErrorCode::Format, "trailing bytes after SFT payload");

  const std::uint8_t* p = bytes.data() + offset;
  const std::size_t n = payload / element_size(dtype);
  switch (dtype) {
    case DType::Real32: {
      std::vector<float> data(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t bits = get_u32(p + 4 * i);
        std::memcpy(&data[i], &bits, 4);
        if (!std::isfinite(data[i]))
          throw Error(ErrorCode::NonFinite, "SFT real32 payload contains NaN/Inf at index " +
                                                std::to_string(i));
      }
      return Tensor::real32(std::move(dims), std::move(data));
    }
    case DType::UInt8:
      return Tensor::uint8(std::move(dims), std::vector<std::uint8_t>(p, p + n));
    case DType::UInt32: {
      std::vector<std::uint32_t> data(n);
      for (std::size_t i = 0; i < n; ++i) data[i] = get_u32(p + 4 * i);
      return Tensor::uint32(std::move(dims), std::move(data));
    }
  }
  throw Error(ErrorCode::Format, "unknown dtype");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move file into place: " + path.string());
  }
}

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_tensor(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  write_file_atomic(path, encode_tensor(tensor));
}

Tensor resample_bilinear(const Tensor& src, std::uint32_t height, std::uint32_t width) {
  if (height == 0 || width == 0)
    throw Error(ErrorCode::InvalidArgument, "resample target extent must be positive");
  if (src.rank() < 2)
    throw Error(ErrorCode::Shape, "resample expects an HxW or HxWxD map");
  const std::uint32_t sh = src.dim(0), sw = src.dim(1);
  const std::uint32_t depth = src.rank() == 3 ? src.dim(2) : 1;
  const auto in = src.values<float>();

  Tensor::Dims dims{height, width};
  if (src.rank() == 3) dims.push_back(depth);
  std::vector<float> out(static_cast<std::size_t>(height) * width * depth);

  // Align-corners: target corners map exactly onto source corners.
  const auto coord = [](std::uint32_t i, std::uint32_t n_out, std::uint32_t n_in) {
    if (n_out == 1 || n_in == 1) return 0.0;
    return static_cast<double>(i) * (n_in - 1) / (n_out - 1);
  };
  for (std::uint32_t y = 0; y < height; ++y) {
    const double fy = coord(y, height, sh);
    const std::uint32_t y0 = std::min(static_cast<std::uint32_t>(fy), sh - 1);
    const std::uint32_t y1 = std::min(y0 + 1, sh - 1);
    const double ty = fy - y0;
    for (std::uint32_t x = 0; x < width; ++x) {
      const double fx = coord(x, width, sw);
      const std::uint32_t x0 = std::min(static_cast<std::uint32_t>(fx), sw - 1);
      const std::uint32_t x1 = std::min(x0 + 1, sw - 1);
      const double tx = fx - x0;
      for (std::uint32_t c = 0; c < depth; ++c) {
        const auto at = [&](std::uint32_t yy, std::uint32_t xx) {
          return static_cast<double>(in[(static_cast<std::size_t>(yy) * sw + xx) * depth + c]);
        };
        const double top = at(y0, x0) + tx * (at(y0, x1) - at(y0, x0));
        const double bottom = at(y1, x0) + tx * (at(y1, x1) - at(y1, x0));
        double v = top + ty * (bottom - top);
        // Keep the result inside the local sample range despite rounding.
        const double lo = std::min({at(y0, x0), at(y0, x1), at(y1, x0), at(y1, x1)});
        const double hi = std::max({at(y0, x0), at(y0, x1), at(y1, x0), at(y1, x1)});
        v = std::clamp(v, lo, hi);
        out[(static_cast<std::size_t>(y) * width + x) * depth + c] = static_cast<float>(v);
      }
    }
  }
  return Tensor::real32(std::move(dims), std::move(out));
}

}  // namespace saff
