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

#include "saff/pnm.hpp"

#include <string>

#include "saff/error.hpp"

namespace saff {

namespace {

struct PnmHeader {
  char kind = 0;  // '5' or '6'
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::size_t payload_offset = 0;
};

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = static_cast<char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::uint32_t read_uint() {
    skip_space_and_comments();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 0xFFFFFFFFull) throw Error(ErrorCode::DimOverflow, "PNM header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::Format, "malformed PNM header");
    return static_cast<std::uint32_t>(v);
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

PnmHeader parse_header(std::span<const std::uint8_t> bytes, char expected) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw Error(ErrorCode::BadMagic, "not a binary PNM (P5/P6) file");
  if (bytes[1] != expected)
    throw Error(ErrorCode::Format, std::string("expected P") + expected + " PNM, got P" +
                                       static_cast<char>(bytes[1]));
  HeaderReader r(bytes);
  PnmHeader h;
  h.kind = expected;
  h.width = r.read_uint();
  h.height = r.read_uint();
  const std::uint32_t maxval = r.read_uint();
  if (maxval != 255) throw Error(ErrorCode::Format, "only maxval 255 PNM is supported");
  if (h.width == 0 || h.height == 0) throw Error(ErrorCode::Format, "PNM has zero extent");
  // Exactly one whitespace byte separates the header from the raster.
  if (r.at_end()) throw Error(ErrorCode::Truncated, "PNM header truncated");
  r.advance();
  h.payload_offset = r.pos();
  const std::uint64_t channels = expected == '6' ? 3 : 1;
  const std::uint64_t need = std::uint64_t{h.width} * h.height * channels;
  if (bytes.size() - h.payload_offset < need) throw Error(ErrorCode::Truncated, "PNM raster truncated");
  return h;
}

std::vector<std::uint8_t> header_bytes(char kind, std::uint32_t w, std::uint32_t h) {
  const std::string s = std::string("P") + kind + "\n" + std::to_string(w) + " " +
                        std::to_string(h) + "\n255\n";
  return {s.begin(), s.end()};
}

}  // namespace

ImageRGB decode_ppm(std::span<const std::uint8_t> bytes) {
  const auto h = parse_header(bytes, '6');
  ImageRGB img;
  img.width = h.width;
  img.height = h.height;
  const auto* p = bytes.data() + h.payload_offset;
  img.rgb.assign(p, p + std::size_t{h.width} * h.height * 3);
  return img;
}

Tensor decode_pgm(std::span<const std::uint8_t> bytes) {
  const auto h = parse_header(bytes, '5');
  const auto* p = bytes.data() + h.payload_offset;
  return Tensor::uint8({h.height, h.width},
                       std::vector<std::uint8_t>(p, p + std::size_t{h.width} * h.height));
}

ImageRGB read_ppm(const std::filesystem::path& path) {
  try {
    return decode_ppm(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Tensor read_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_ppm(const ImageRGB& image, const std::filesystem::path& path) {
  if (image.rgb.size() != std::size_t{image.width} * image.height * 3 || image.width == 0 ||
      image.height == 0)
    throw Error(ErrorCode::Shape, "RGB buffer does not match image extents");
  auto bytes = header_bytes('6', image.width, image.height);
  bytes.insert(bytes.end(), image.rgb.begin(), image.rgb.end());
  write_file_atomic(path, bytes);
}

void write_pgm(const Tensor& gray, const std::filesystem::path& path) {
  if (gray.rank() != 2) throw Error(ErrorCode::Shape, "PGM expects an HxW tensor");
  const auto v = gray.values<std::uint8_t>();
  auto bytes = header_bytes('5', gray.dim(1), gray.dim(0));
  bytes.insert(bytes.end(), v.begin(), v.end());
  write_file_atomic(path, bytes);
}

}  // namespace saff
