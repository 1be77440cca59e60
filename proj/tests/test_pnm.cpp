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

#include <string>

#include <doctest.h>

#include "oracles.hpp"
#include "saff/error.hpp"
#include "saff/pnm.hpp"

using namespace saff;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

ErrorCode pgm_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_pgm(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode_pgm accepted malformed input");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("P6 and P5 files round-trip bit-exactly") {
  saff::testing::TempDir dir("pnm");
  SplitMix64 rng(3);
  const ImageRGB img = saff::testing::random_image(rng, 9, 13);
  write_ppm(img, dir.path() / "a.ppm");
  const auto ppm_bytes = read_file(dir.path() / "a.ppm");
  CHECK(read_ppm(dir.path() / "a.ppm") == img);
  write_ppm(read_ppm(dir.path() / "a.ppm"), dir.path() / "b.ppm");
  CHECK(read_file(dir.path() / "b.ppm") == ppm_bytes);

  std::vector<std::uint8_t> gray(5 * 4);
  for (auto& g : gray) g = static_cast<std::uint8_t>(rng.below(256));
  const Tensor mask = Tensor::uint8({5, 4}, gray);
  write_pgm(mask, dir.path() / "m.pgm");
  CHECK(read_pgm(dir.path() / "m.pgm") == mask);
  const auto pgm_bytes = read_file(dir.path() / "m.pgm");
  const std::string header = "P5\n4 5\n255\n";
  CHECK(std::equal(header.begin(), header.end(), pgm_bytes.begin()));
  CHECK(pgm_bytes.size() == header.size() + 20);
}

TEST_CASE("PNM headers may carry comments and arbitrary whitespace") {
  auto bytes = bytes_of("P5 # a comment\n  2\t# width done\n1\n255\n");
  bytes.push_back(7);
  bytes.push_back(9);
  const Tensor t = decode_pgm(bytes);
  CHECK(t.dims() == Tensor::Dims{1, 2});
  CHECK(t.values<std::uint8_t>()[1] == 9);
}

TEST_CASE("malformed PNM inputs are rejected") {
  CHECK(pgm_error(bytes_of("P2\n1 1\n255\n0")) == ErrorCode::BadMagic);
  CHECK(pgm_error(bytes_of("P6\n1 1\n255\n000")) == ErrorCode::Format);
  CHECK(pgm_error(bytes_of("P5\n1 1\n65535\n00")) == ErrorCode::Format);
  CHECK(pgm_error(bytes_of("P5\n2 2\n255\n000")) == ErrorCode::Truncated);
  CHECK(pgm_error(bytes_of("P5\nx 2\n255\n0000")) == ErrorCode::Format);
  CHECK(pgm_error(bytes_of("P5\n0 2\n255\n")) == ErrorCode::Format);
}
