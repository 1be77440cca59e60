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

// saff: command-line driver over the C API in saff/saff.h.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "saff/saff.h"

namespace fs = std::filesystem;

namespace {

// SAFF_LOG=error|info|debug, default info. Logs go to stderr.
void init_logging() {
  auto logger = spdlog::stderr_logger_mt("saff");
  logger->set_pattern("[saff] %v");
  const char* env = std::getenv("SAFF_LOG");
  logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
  spdlog::set_default_logger(logger);
}

// Carries a C API status out of nested helpers.
struct Failure : std::runtime_error {
  Failure(saff_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  saff_status status;
};

void check(saff_status s) {
  if (s != SAFF_OK) throw Failure(s, saff_last_error());
}

int exit_code(saff_status s) {
  switch (s) {
    case SAFF_OK: return 0;
    case SAFF_E_IO: return 2;
    case SAFF_E_UNMATCHED: return 3;
    default: return 1;
  }
}

int report(const Failure& f) {
  std::fprintf(stderr, "error %s: %s\n", saff_status_tag(f.status), f.what());
  return exit_code(f.status);
}

struct ResultHandle {
  saff_result* ptr = nullptr;
  ~ResultHandle() { saff_result_free(ptr); }
};

struct PipelineFlags {
  saff_config config{};
  bool balance = true;
  bool dump = false;
  bool keep_going = false;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  saff_config_default(&f.config);
  cmd->add_option("--superpixels", f.config.k_target, "Target superpixel count")->capture_default_str();
  cmd->add_option("--compactness", f.config.compactness, "SLIC compactness")->capture_default_str();
  cmd->add_option("--we", f.config.w_e, "Edge weight w_e in exp(-w_e*E)")->capture_default_str();
  cmd->add_option("--th-bg", f.config.th_bg, "Background prior threshold")->capture_default_str();
  cmd->add_option("--th-fg", f.config.th_fg, "Foreground prior threshold")->capture_default_str();
  cmd->add_option("--binarize", f.config.binarize_threshold, "Pseudo-label threshold")
      ->capture_default_str();
  cmd->add_flag("--balance,!--no-balance", f.balance, "Balance pseudo-label classes");
  cmd->add_flag("--dump-intermediates", f.dump, "Write affinities, features and model dumps");
  cmd->add_option("--seed", f.seed, "Seed (recorded; the pipeline itself is deterministic)");
}

struct SceneFiles {
  std::string stem;
  fs::path image, semantic, saliency, edge;
};

SceneFiles scene_in(const fs::path& dir) {
  return {dir.filename().string(), dir / "image.ppm", dir / "semantic.sft", dir / "saliency.sft",
          dir / "edge.sft"};
}

std::vector<SceneFiles> list_scenes(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Failure(SAFF_E_IO, "not a directory: " + root.string());
  std::vector<SceneFiles> scenes;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "image.ppm"))
      scenes.push_back(scene_in(entry.path()));
  }
  std::sort(scenes.begin(), scenes.end(),
            [](const SceneFiles& a, const SceneFiles& b) { return a.stem < b.stem; });
  if (scenes.empty()) throw Failure(SAFF_E_UNMATCHED, "no scene directories under " + root.string());
  return scenes;
}

void segment_one(const PipelineFlags& flags, const SceneFiles& s, const fs::path& out,
                 const fs::path& mask, const fs::path& dump_prefix) {
  ResultHandle r;
  check(saff_segment_files(&flags.config, s.image.c_str(), s.semantic.c_str(), s.saliency.c_str(),
                           s.edge.c_str(), &r.ptr));
  check(saff_result_write_confidence(r.ptr, out.c_str()));
  if (!mask.empty()) check(saff_result_write_mask(r.ptr, mask.c_str()));
  if (flags.dump) check(saff_result_dump(r.ptr, dump_prefix.c_str()));
  double w[4], bias;
  int fallback;
  std::size_t n_fg, n_bg;
  saff_result_model(r.ptr, w, &bias, &fallback);
  saff_result_pseudo_label_counts(r.ptr, &n_fg, &n_bg);
  spdlog::debug("{}: K={} fg={} bg={} w=[{:.4f} {:.4f} {:.4f} {:.4f}] bias={:.4f}{}", s.stem,
      saff_result_superpixels(r.ptr), n_fg, n_bg, w[0], w[1], w[2], w[3], bias,
      fallback ? " (fallback)" : "");
}

// Runs fn(i) for i in [0, n) on `jobs` threads. Fail-fast unless keep_going;
// returns the first failure status (SAFF_OK when all succeeded).
template <class Fn>
saff_status parallel_for(std::size_t n, unsigned jobs, bool keep_going, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  saff_status first = SAFF_OK;
  const auto worker = [&] {
    for (;;) {
      if (stop) return;
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        fn(i);
      } catch (const Failure& f) {
        report(f);
        std::lock_guard lock(mu);
        if (first == SAFF_OK) first = f.status;
        if (!keep_going) stop = true;
      }
    }
  };
  jobs = std::max(1u, jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return first;
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure(SAFF_E_IO, "cannot create " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw Failure(SAFF_E_IO, "cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Failure(SAFF_E_IO, "cannot write " + path.string());
}

int run_batch(const PipelineFlags& flags, const fs::path& scenes_dir, const fs::path& out_dir,
              const fs::path& mask_dir) {
  const auto scenes = list_scenes(scenes_dir);
  make_dirs(out_dir);
  if (!mask_dir.empty()) make_dirs(mask_dir);
  const fs::path dump_dir = out_dir / "intermediates";
  if (flags.dump) make_dirs(dump_dir);
  const saff_status status =
      parallel_for(scenes.size(), flags.jobs, flags.keep_going, [&](std::size_t i) {
        const auto& s = scenes[i];
        const fs::path mask = mask_dir.empty() ? fs::path{} : mask_dir / (s.stem + ".pgm");
        segment_one(flags, s, out_dir / (s.stem + ".sft"), mask, dump_dir / s.stem);
      });
  if (!mask_dir.empty()) {
    std::string manifest = "image,mask,split\n";
    for (const auto& s : scenes)
      manifest += fs::absolute(s.image).string() + "," +
                  fs::absolute(mask_dir / (s.stem + ".pgm")).string() + ",train\n";
    write_text(mask_dir / "pseudo_labels.csv", manifest);
  }
  spdlog::info("segmented {} scene(s) into {}", scenes.size(), out_dir.string());
  return exit_code(status);
}

int run_baseline(const fs::path& scenes_dir, const std::string& mode, const fs::path& out_dir,
                 unsigned jobs, bool keep_going) {
  const auto scenes = list_scenes(scenes_dir);
  make_dirs(out_dir);
  const saff_baseline which = mode == "semantic" ? SAFF_BASELINE_SEMANTIC : SAFF_BASELINE_SALIENCY;
  const saff_status status = parallel_for(scenes.size(), jobs, keep_going, [&](std::size_t i) {
    const auto& s = scenes[i];
    const fs::path& src = which == SAFF_BASELINE_SEMANTIC ? s.semantic : s.saliency;
    check(saff_baseline_file(which, src.c_str(), (out_dir / (s.stem + ".sft")).c_str()));
  });
  return exit_code(status);
}

struct SynthFlags {
  std::uint64_t seed = 1;
  std::uint32_t count = 1;
  std::uint32_t height = 96, width = 96, channels = 8;
  double noise = 0.25;
  double min_fg = 0.05, max_fg = 0.6;
};

void run_synth(const SynthFlags& f, const fs::path& out_dir) {
  make_dirs(out_dir);
  std::string index = "id,seed,height,width,channels,noise\n";
  for (std::uint32_t i = 0; i < f.count; ++i) {
    const std::uint64_t seed = f.seed + i;
    char id[32];
    std::snprintf(id, sizeof id, "scene_%05u", i);
    check(saff_synth_scene(seed, f.height, f.width, f.channels, f.noise, f.min_fg, f.max_fg,
                           (out_dir / id).c_str()));
    index += std::string(id) + "," + std::to_string(seed) + "," + std::to_string(f.height) + "," +
             std::to_string(f.width) + "," + std::to_string(f.channels) + "," +
             std::to_string(f.noise) + "\n";
  }
  write_text(out_dir / "index.csv", index);
  spdlog::info("wrote {} scene(s) to {}", f.count, out_dir.string());
}

double evaluate(const fs::path& pred, const fs::path& gt, const fs::path& csv, double beta_sq) {
  double max_f = 0.0;
  std::size_t images = 0;
  check(saff_evaluate_dirs(pred.c_str(), gt.c_str(), csv.empty() ? nullptr : csv.c_str(), beta_sq,
                           &max_f, &images));
  spdlog::info("evaluated {} image(s)", images);
  return max_f;
}

void print_table_header() {
  std::printf("%-16s %-8s %s\n", "Method", "Balance", "F-measure");
}

void print_table_row(const std::string& method, bool balance, double f) {
  std::printf("%-16s %-8s %.4f\n", method.c_str(), balance ? "yes" : "", f);
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"SAFF: unsupervised foreground segmentation by semantic-apparent feature fusion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(saff_version()));

  // segment: one image.
  PipelineFlags seg_flags;
  std::string seg_image, seg_semantic, seg_saliency, seg_edge, seg_out, seg_mask;
  auto* seg = app.add_subcommand("segment", "Segment one image from its feature files");
  seg->add_option("--image", seg_image, "RGB image (P6 PPM)")->required();
  seg->add_option("--semantic", seg_semantic, "Semantic response map (SFT, HxWxD)")->required();
  seg->add_option("--saliency", seg_saliency, "Saliency map (SFT, HxW)")->required();
  seg->add_option("--edge", seg_edge, "Edge map (SFT, HxW)")->required();
  seg->add_option("--out", seg_out, "Output confidence map (SFT)")->required();
  seg->add_option("--mask", seg_mask, "Also write the binarized pseudo-label mask (P5 PGM)");
  add_pipeline_flags(seg, seg_flags);

  // batch: every scene directory under --scenes.
  PipelineFlags batch_flags;
  std::string batch_scenes, batch_out, batch_masks;
  auto* batch = app.add_subcommand("batch", "Segment every <stem>/ scene directory");
  batch->add_option("--scenes", batch_scenes, "Directory of <stem>/{image.ppm,*.sft}")->required();
  batch->add_option("--out", batch_out, "Output directory for <stem>.sft")->required();
  batch->add_option("--masks", batch_masks, "Write <stem>.pgm pseudo labels + pseudo_labels.csv");
  batch->add_option("--jobs", batch_flags.jobs, "Worker threads")->capture_default_str();
  batch->add_flag("--keep-going", batch_flags.keep_going, "Continue past failing images");
  add_pipeline_flags(batch, batch_flags);

  // evaluate.
  std::string eval_pred, eval_gt, eval_out, eval_label = "prediction";
  double eval_beta = 0.3;
  auto* ev = app.add_subcommand("evaluate", "PR curve and max F-measure over a prediction dir");
  ev->add_option("--pred", eval_pred, "Directory of <stem>.sft confidence maps")->required();
  ev->add_option("--gt", eval_gt, "Directory of <stem>.pgm or <stem>/gt.pgm masks")->required();
  ev->add_option("--out", eval_out, "CSV output path")->required();
  ev->add_option("--beta-sq", eval_beta, "beta^2 of the F-measure")->capture_default_str();
  ev->add_option("--label", eval_label, "Method name for the report line");

  // synth.
  SynthFlags synth_flags;
  std::string synth_out;
  auto* syn = app.add_subcommand("synth", "Generate synthetic scenes with known ground truth");
  syn->add_option("--seed", synth_flags.seed, "First scene seed")->capture_default_str();
  syn->add_option("--count", synth_flags.count, "Number of scenes")->capture_default_str();
  syn->add_option("--height", synth_flags.height)->capture_default_str();
  syn->add_option("--width", synth_flags.width)->capture_default_str();
  syn->add_option("--channels", synth_flags.channels, "Semantic channels D")->capture_default_str();
  syn->add_option("--noise", synth_flags.noise, "Noise level in [0,1)")->capture_default_str();
  syn->add_option("--min-fg", synth_flags.min_fg, "Minimum foreground area fraction")
      ->capture_default_str();
  syn->add_option("--max-fg", synth_flags.max_fg, "Maximum foreground area fraction")
      ->capture_default_str();
  syn->add_option("--out", synth_out, "Output directory")->required();

  // baseline.
  std::string base_scenes, base_mode = "semantic", base_out;
  unsigned base_jobs = 1;
  bool base_keep_going = false;
  auto* base = app.add_subcommand("baseline", "Single-feature baseline confidence maps");
  base->add_option("--scenes", base_scenes, "Directory of scene subdirectories")->required();
  base->add_option("--mode", base_mode, "semantic | saliency")
      ->check(CLI::IsMember({"semantic", "saliency"}));
  base->add_option("--out", base_out, "Output directory for <stem>.sft")->required();
  base->add_option("--jobs", base_jobs)->capture_default_str();
  base->add_flag("--keep-going", base_keep_going);

  // bench: synthetic comparison table.
  PipelineFlags bench_flags;
  SynthFlags bench_synth;
  bench_synth.count = 20;
  std::string bench_work;
  auto* bench = app.add_subcommand("bench", "Synthetic comparison of SAFF against baselines");
  bench->add_option("--work", bench_work, "Scratch directory")->required();
  bench->add_option("--scene-seed", bench_synth.seed, "First scene seed")->capture_default_str();
  bench->add_option("--count", bench_synth.count, "Scenes")->capture_default_str();
  bench->add_option("--noise", bench_synth.noise)->capture_default_str();
  bench->add_option("--jobs", bench_flags.jobs)->capture_default_str();
  add_pipeline_flags(bench, bench_flags);

  CLI11_PARSE(app, argc, argv);
  for (auto* f : {&seg_flags, &batch_flags, &bench_flags}) f->config.balance = f->balance ? 1 : 0;

  try {
    if (*seg) {
      SceneFiles s{fs::path(seg_out).stem().string(), seg_image, seg_semantic, seg_saliency, seg_edge};
      fs::path prefix = seg_out;
      prefix.replace_extension();
      segment_one(seg_flags, s, seg_out, seg_mask, prefix);
      return 0;
    }
    if (*batch) return run_batch(batch_flags, batch_scenes, batch_out, batch_masks);
    if (*ev) {
      const double f = evaluate(eval_pred, eval_gt, eval_out, eval_beta);
      print_table_header();
      print_table_row(eval_label, false, f);
      return 0;
    }
    if (*syn) {
      run_synth(synth_flags, synth_out);
      return 0;
    }
    if (*base) return run_baseline(base_scenes, base_mode, base_out, base_jobs, base_keep_going);
    if (*bench) {
      const fs::path work = bench_work;
      run_synth(bench_synth, work / "scenes");
      int rc = run_baseline(work / "scenes", "saliency", work / "saliency", bench_flags.jobs, false);
      rc = rc ? rc : run_baseline(work / "scenes", "semantic", work / "semantic", bench_flags.jobs, false);
      PipelineFlags unbalanced = bench_flags;
      unbalanced.config.balance = 0;
      PipelineFlags balanced = bench_flags;
      balanced.config.balance = 1;
      rc = rc ? rc : run_batch(unbalanced, work / "scenes", work / "saff", {});
      rc = rc ? rc : run_batch(balanced, work / "scenes", work / "saff_balanced", {});
      if (rc) return rc;
      print_table_header();
      print_table_row("saliency-only", false, evaluate(work / "saliency", work / "scenes", work / "saliency.csv", 0.3));
      print_table_row("semantic-only", false, evaluate(work / "semantic", work / "scenes", work / "semantic.csv", 0.3));
      print_table_row("SAFF", false, evaluate(work / "saff", work / "scenes", work / "saff.csv", 0.3));
      print_table_row("SAFF", true, evaluate(work / "saff_balanced", work / "scenes", work / "saff_balanced.csv", 0.3));
      return 0;
    }
  } catch (const Failure& f) {
    return report(f);
  } catch (const std::exception& e) {
    return report(Failure(SAFF_E_INTERNAL, e.what()));
  }
  return 0;
}
