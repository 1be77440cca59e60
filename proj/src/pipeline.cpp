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

#include "saff/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "saff/error.hpp"

namespace saff {

void RunConfig::validate() const {
  if (slic.k_target < 2) throw Error(ErrorCode::InvalidArgument, "--superpixels must be >= 2");
  if (!(slic.compactness > 0.0)) throw Error(ErrorCode::InvalidArgument, "--compactness must be > 0");
  if (!(w_e > 0.0) || !std::isfinite(w_e)) throw Error(ErrorCode::InvalidArgument, "--we must be > 0");
  if (!(th_bg >= 0.0 && th_bg < th_fg && th_fg <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "thresholds must satisfy 0 <= th_bg < th_fg <= 1");
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0))
    throw Error(ErrorCode::InvalidArgument, "--binarize must lie in (0,1)");
}

SegmentResult segment(const SegmentInputs& in, const RunConfig& config) {
  config.validate();
  const std::uint32_t h = in.image.height, w = in.image.width;
  const auto require_plane = [&](const Tensor& t, const char* name) {
    if (t.rank() != 2 || t.dim(0) != h || t.dim(1) != w)
      throw Error(ErrorCode::Shape, std::string(name) + " map must be " + std::to_string(h) +
                                        "x" + std::to_string(w));
    if (t.dtype() != DType::Real32) throw Error(ErrorCode::Shape, std::string(name) + " map must be real32");
  };
  require_plane(in.saliency, "saliency");
  require_plane(in.edge, "edge");
  if (in.semantic.rank() < 2 || in.semantic.dtype() != DType::Real32)
    throw Error(ErrorCode::Shape, "semantic map must be a real32 HxW or HxWxD tensor");

  SegmentResult r;
  r.labeling = slic_segment(in.image, config.slic);

  Tensor semantic = (in.semantic.dim(0) == h && in.semantic.dim(1) == w)
                        ? in.semantic
                        : resample_bilinear(in.semantic, h, w);
  semantic = normalize_semantic(semantic);

  r.features = encode({r.labeling, semantic, in.saliency, in.edge}, config.w_e);
  const auto& table = r.features.table;
  const Eigen::VectorXd prior = geometric_prior(table.col(kSemantic), table.col(kApparent));
  r.pseudo_labels = select_pseudo_labels(prior, config.th_bg, config.th_fg);
  if (config.balance && !r.pseudo_labels.foreground.empty() && !r.pseudo_labels.background.empty())
    r.pseudo_labels = balance_samples(r.pseudo_labels);
  r.model = fit_adaptive_weights(table, r.pseudo_labels);
  r.scores = infer_scores(r.model, table);
  r.confidence = scores_to_map(r.labeling, r.scores);
  return r;
}

std::string model_to_json(const FusionModel& model) {
  nlohmann::ordered_json j;
  j["w"] = model.weights;
  j["bias"] = model.bias;
  j["fallback_used"] = model.fallback_used;
  return j.dump() + "\n";
}

namespace {

Tensor matrix_to_tensor(const Eigen::MatrixXd& m) {
  std::vector<float> data(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      // Unreachable geodesic distances are stored as float max.
      data[static_cast<std::size_t>(i * m.cols() + j)] =
          std::isfinite(v) ? static_cast<float>(v) : std::numeric_limits<float>::max();
    }
  return Tensor::real32({static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())},
                        std::move(data));
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const std::string& suffix) {
  auto p = prefix;
  p += suffix;
  return p;
}

}  // namespace

void dump_intermediates(const SegmentResult& result, const std::filesystem::path& prefix) {
  const auto& a = result.features.affinities;
  if (prefix.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(prefix.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + prefix.parent_path().string());
  }
  write_tensor(result.labeling.to_tensor(), with_suffix(prefix, ".labels.sft"));
  write_tensor(matrix_to_tensor(result.features.table), with_suffix(prefix, ".features.sft"));
  write_tensor(matrix_to_tensor(a.semantic), with_suffix(prefix, ".Ms.sft"));
  write_tensor(matrix_to_tensor(a.apparent), with_suffix(prefix, ".Ma.sft"));
  write_tensor(matrix_to_tensor(a.semantic_norm), with_suffix(prefix, ".Ms_norm.sft"));
  write_tensor(matrix_to_tensor(a.apparent_norm), with_suffix(prefix, ".Ma_norm.sft"));
  write_tensor(matrix_to_tensor(a.edge_distance), with_suffix(prefix, ".E.sft"));
  const auto json = model_to_json(result.model);
  write_file_atomic(with_suffix(prefix, ".model.json"),
                    std::span(reinterpret_cast<const std::uint8_t*>(json.data()), json.size()));
}

EvaluationResult evaluate_maps(std::span<const Tensor> confidence, std::span<const Tensor> gt,
                               double beta_sq) {
  if (confidence.size() != gt.size())
    throw Error(ErrorCode::Shape, "prediction and ground-truth counts differ");
  EvaluationResult out;
  std::vector<PrPoints> curves;
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    const auto gv = gt[i].values<std::uint8_t>();
    if (std::none_of(gv.begin(), gv.end(), [](std::uint8_t v) { return v != 0; })) {
      ++out.excluded;
      continue;
    }
    curves.push_back(pr_at_thresholds(quantize(confidence[i]), gt[i]));
  }
  if (curves.empty()) throw Error(ErrorCode::Empty, "no image with a non-empty ground truth");
  out.images = curves.size();
  out.curve = aggregate(curves, beta_sq);
  return out;
}

EvaluationResult evaluate_directories(const std::filesystem::path& pred_dir,
                                      const std::filesystem::path& gt_dir, double beta_sq) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(pred_dir, ec)) throw Error(ErrorCode::Io, "not a directory: " + pred_dir.string());
  if (!fs::is_directory(gt_dir, ec)) throw Error(ErrorCode::Io, "not a directory: " + gt_dir.string());
  std::map<std::string, fs::path> preds;
  for (const auto& entry : fs::directory_iterator(pred_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sft")
      preds.emplace(entry.path().stem().string(), entry.path());
  }
  if (preds.empty()) throw Error(ErrorCode::Unmatched, "no .sft predictions in " + pred_dir.string());

  std::vector<Tensor> maps, truths;
  for (const auto& [stem, path] : preds) {
    fs::path gt_path = gt_dir / (stem + ".pgm");
    if (!fs::is_regular_file(gt_path, ec)) gt_path = gt_dir / stem / "gt.pgm";
    if (!fs::is_regular_file(gt_path, ec))
      throw Error(ErrorCode::Unmatched, "no ground truth for prediction '" + stem + "'");
    Tensor pred = read_tensor(path);
    Tensor truth = read_pgm(gt_path);
    if (pred.dtype() != DType::Real32 || pred.rank() != 2 || pred.dims() != truth.dims())
      throw Error(ErrorCode::Shape, "prediction '" + stem + "' does not match its ground truth extents");
    maps.push_back(std::move(pred));
    truths.push_back(std::move(truth));
  }
  return evaluate_maps(maps, truths, beta_sq);
}

}  // namespace saff
