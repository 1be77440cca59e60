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

#include "saff/evaluation.hpp"

#include <cmath>
#include <cstdio>

#include "saff/error.hpp"

namespace saff {

Tensor quantize(const Tensor& confidence) {
  if (confidence.rank() != 2) throw Error(ErrorCode::Shape, "confidence map must be HxW");
  const auto v = confidence.values<float>();
  std::vector<std::uint8_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = std::floor(static_cast<double>(v[i]) * 255.0 + 0.5);
    out[i] = static_cast<std::uint8_t>(x < 0.0 ? 0.0 : (x > 255.0 ? 255.0 : x));
  }
  return Tensor::uint8(confidence.dims(), std::move(out));
}

PrPoints pr_at_thresholds(const Tensor& quantized, const Tensor& gt) {
  if (quantized.dims() != gt.dims() || quantized.rank() != 2)
    throw Error(ErrorCode::Shape, "prediction and ground truth extents differ");
  const auto pred = quantized.values<std::uint8_t>();
  const auto truth = gt.values<std::uint8_t>();
  std::array<std::uint64_t, kThresholdCount> fg_hist{}, bg_hist{};
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] != 0) {
      ++fg_hist[pred[i]];
      ++positives;
    } else {
      ++bg_hist[pred[i]];
    }
  }
  if (positives == 0) throw Error(ErrorCode::Empty, "ground truth has no foreground pixels");

  PrPoints out;
  std::uint64_t tp = 0, fp = 0;
  for (int t = kThresholdCount - 1; t >= 0; --t) {
    tp += fg_hist[t];
    fp += bg_hist[t];
    auto& pt = out[t];
    pt.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    pt.recall = static_cast<double>(tp) / static_cast<double>(positives);
  }
  return out;
}

double f_measure(double precision, double recall, double beta_sq) {
  const double denom = beta_sq * precision + recall;
  if (denom <= 0.0) return 0.0;
  return (1.0 + beta_sq) * precision * recall / denom;
}

PrCurve aggregate(std::span<const PrPoints> per_image, double beta_sq) {
  if (per_image.empty()) throw Error(ErrorCode::Empty, "no images to aggregate");
  PrCurve curve;
  const double n = static_cast<double>(per_image.size());
  curve.max_f = -1.0;
  for (int t = 0; t < kThresholdCount; ++t) {
    double p = 0.0, r = 0.0;
    for (const auto& img : per_image) {
      p += img[t].precision;
      r += img[t].recall;
    }
    curve.points[t] = {p / n, r / n};
    curve.f[t] = f_measure(curve.points[t].precision, curve.points[t].recall, beta_sq);
    if (curve.f[t] > curve.max_f) {
      curve.max_f = curve.f[t];
      curve.best_threshold = t;
    }
  }
  return curve;
}

std::string curve_to_csv(const PrCurve& curve) {
  std::string out = "threshold,precision,recall,f_measure\n";
  char line[128];
  for (int t = 0; t < kThresholdCount; ++t) {
    std::snprintf(line, sizeof line, "%d,%.9f,%.9f,%.9f\n", t, curve.points[t].precision,
                  curve.points[t].recall, curve.f[t]);
    out += line;
  }
  std::snprintf(line, sizeof line, "max_f,%.9f\n", curve.max_f);
  out += line;
  return out;
}

}  // namespace saff
