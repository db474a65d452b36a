#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "textworld/error.hpp"
#include "textworld/log.hpp"
#include "textworld/pipeline.hpp"
#include "textworld/procedural.hpp"

using namespace textworld;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kPartialFailure = 2 };

int cmd_generate(const std::string& config_path, const std::string& output,
    std::size_t limit, int threads, std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_run_config(config_path);
  if (!output.empty()) cfg.output_dir = output;
  if (seed) cfg.seed = seed;
  if (threads > 0) cfg.threads = threads;
  cfg.max_new_samples = limit;
  cfg.validate();
  RunStats stats;
  Manifest m = run_dataset(cfg, &stats);
  std::printf("images %zu, words %zu, failed %zu, generated now %zu, skipped %zu\n", m.images,
      m.words, m.failed, stats.generated, stats.skipped_existing);
  if (stats.generated > 0)
    std::printf("mean seconds per generated image: %.3f\n", stats.seconds / stats.generated);
  for (const auto& s : m.scenes)
    if (!s.error.empty()) std::fprintf(stderr, "scene %s failed: %s\n", s.source.c_str(), s.error.c_str());
  return m.partial_failure() ? kPartialFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scene-text image generator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  auto* gen = app.add_subcommand("generate", "Generate a dataset from a config file");
  std::string config_path, output;
  std::size_t limit = 0;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  gen->add_option("config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  gen->add_option("-o,--output", output, "Output directory (overrides config and environment)");
  gen->add_option("--limit", limit, "Stop after generating this many new images");
  gen->add_option("-j,--threads", threads, "Worker threads (default: all cores)");
  gen->add_option("--seed", seed, "Override the master seed");

  auto* preview = app.add_subcommand("preview", "Render text-free stills from scene anchors");
  std::string scene_src, anchors_path, out_dir = "preview";
  int yaws = 4;
  CameraIntrinsics intr;
  double fov_deg = 60;
  preview->add_option("scene", scene_src, "builtin:<name> or an .obj path")->required();
  preview->add_option("--anchors", anchors_path, "Anchor file replacing the scene's anchors");
  preview->add_option("-o,--output", out_dir, "Output directory");
  preview->add_option("--yaws", yaws, "Headings per anchor")->check(CLI::PositiveNumber);
  preview->add_option("--width", intr.width);
  preview->add_option("--height", intr.height);
  preview->add_option("--fov", fov_deg, "Vertical field of view, degrees");

  auto* crops = app.add_subcommand("crops", "Export word crops for recognizer training");
  std::string dataset, crop_out;
  int min_width = 32, margin = 4;
  crops->add_option("dataset", dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  crops->add_option("-o,--output", crop_out, "Output directory (default: <dataset>/crops)");
  crops->add_option("--min-width", min_width, "Drop crops narrower than this");
  crops->add_option("--margin", margin, "Pixels added around each word box");

  auto* icdar = app.add_subcommand("icdar", "Write ICDAR-style ground-truth text files");
  std::string icdar_out;
  icdar->add_option("dataset", dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  icdar->add_option("-o,--output", icdar_out, "Output directory (default: <dataset>/icdar)");

  auto* validate = app.add_subcommand("validate", "Check annotation soundness of a dataset");
  validate->add_option("dataset", dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);

  auto* export_scene = app.add_subcommand("export-scene", "Write a builtin scene as .obj + .meta");
  std::string export_name, export_path;
  export_scene->add_option("name", export_name, "Builtin scene name")->required();
  export_scene->add_option("output", export_path, "Destination .obj path")->required();

  app.add_subcommand("scenes", "List builtin scenes");

  CLI11_PARSE(app, argc, argv);
  set_log_level(verbose ? LogLevel::info : LogLevel::warning);

  try {
    if (*gen) return cmd_generate(config_path, output, limit, threads, seed);
    if (*preview) {
      intr.vertical_fov = radians(fov_deg);
      intr.validate();
      SceneSpec spec{scene_src, anchors_path};
      if (spec.source.rfind("builtin:", 0) != 0 && !std::filesystem::exists(spec.source))
        spec.source = "builtin:" + spec.source;
      Scene scene = load_scene_spec(spec);
      std::size_t n = render_previews(scene, intr, out_dir, yaws);
      std::printf("%zu previews written to %s\n", n, out_dir.c_str());
      return kOk;
    }
    if (*crops) {
      auto out = crop_out.empty() ? std::filesystem::path(dataset) / "crops" : std::filesystem::path(crop_out);
      CropStats s = export_word_crops(dataset, out, min_width, margin);
      std::printf("words %zu, crops %zu, narrow %zu, ignored %zu\n", s.words, s.written,
          s.dropped_narrow, s.dropped_ignored);
      return kOk;
    }
    if (*icdar) {
      auto out = icdar_out.empty() ? std::filesystem::path(dataset) / "icdar" : std::filesystem::path(icdar_out);
      std::printf("%zu files written\n", export_icdar(dataset, out));
      return kOk;
    }
    if (*validate) {
      auto issues = validate_dataset(dataset);
      for (const auto& i : issues) std::printf("%s\n", i.c_str());
      std::printf("%zu issues\n", issues.size());
      return issues.empty() ? kOk : kPartialFailure;
    }
    if (*export_scene) {
      write_obj_scene(make_builtin_scene(export_name), export_path);
      return kOk;
    }
    for (const auto& n : builtin_scene_names()) std::printf("%s\n", n.c_str());
    return kOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kPartialFailure;
  }
}
