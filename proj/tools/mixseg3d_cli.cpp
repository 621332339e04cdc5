// Command-line front end: synthetic scenes, LaserMix/PolarMix mixing with
// replayable plans, the voxel-majority stand-in model, TTA, evaluation and
// benchmarks.
//
// Exit codes: 0 success, 2 validation error, 3 I/O or format error, 4 degenerate input.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mixseg3d/ablation.hpp"
#include "mixseg3d/bench.hpp"
#include "mixseg3d/config.hpp"
#include "mixseg3d/io.hpp"
#include "mixseg3d/pipeline.hpp"
#include "mixseg3d/report.hpp"
#include "mixseg3d/scene.hpp"
#include "mixseg3d/tta.hpp"
#include "mixseg3d/voxel_model.hpp"

namespace fs = std::filesystem;
using namespace mixseg3d;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string classmap_path;
  int jobs = 1;

  RunConfig config() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    cfg.validate();
    return cfg;
  }

  ClassMap classmap() const {
    if (!classmap_path.empty()) return ClassMap::load(classmap_path);
    const RunConfig cfg = config();
    if (cfg.classmap) return ClassMap::load(*cfg.classmap);
    return ClassMap::standard();
  }
};

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure by index.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string scene_name(const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu", i);
  return prefix + buf;
}

void write_labeled(const Cloud& cloud, const fs::path& scan, const fs::path& labels) {
  write_scan(cloud, scan);
  write_labels(*cloud.labels, labels);
}

void write_prediction(const ScoreMap& scores, const fs::path& labels, const std::optional<fs::path>& score_path) {
  write_labels(argmax_labels(scores), labels);
  if (score_path) write_scores(scores, *score_path);
}

std::vector<RigidAugmentation<double>> views_for(int count, bool random, std::uint64_t seed) {
  return random ? random_views(count, seed) : canonical_views(count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR scene mixing, test-time augmentation and segmentation evaluation"};
  app.set_version_flag("--version", std::string(MIXSEG3D_VERSION));
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--classmap", g.classmap_path, "Class map file (index<TAB>name)");
  app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // genscene
  auto* genscene = app.add_subcommand("genscene", "Write labeled synthetic street scenes and a manifest");
  std::string gen_out;
  std::string gen_prefix = "scene";
  int gen_count = 1;
  std::int64_t gen_points = 100000;
  genscene->add_option("--out-dir", gen_out, "Output directory")->required();
  genscene->add_option("--count", gen_count, "Number of scenes")->capture_default_str()->check(CLI::PositiveNumber);
  genscene->add_option("--points", gen_points, "Points per scene")->capture_default_str()->check(CLI::NonNegativeNumber);
  genscene->add_option("--prefix", gen_prefix, "File name prefix")->capture_default_str();

  // mix
  auto* mixcmd = app.add_subcommand("mix", "Mix scans with LaserMix and/or PolarMix, writing replayable plans");
  std::string strategy_name = "both";
  std::string scan_a, labels_a, scan_b, labels_b, out_scan, out_labels, plan_out, mix_manifest, mix_out_dir;
  mixcmd->add_option("--strategy", strategy_name, "lasermix | polarmix | both")
      ->capture_default_str()
      ->check(CLI::IsMember({"lasermix", "polarmix", "both"}));
  mixcmd->add_option("--scan-a", scan_a);
  mixcmd->add_option("--labels-a", labels_a);
  mixcmd->add_option("--scan-b", scan_b);
  mixcmd->add_option("--labels-b", labels_b);
  mixcmd->add_option("--out-scan", out_scan);
  mixcmd->add_option("--out-labels", out_labels);
  mixcmd->add_option("--plan-out", plan_out, "Plan record path (default: <out-scan>.plan.json)");
  mixcmd->add_option("--manifest", mix_manifest, "Mix every manifest entry with random partners");
  mixcmd->add_option("--out-dir", mix_out_dir, "Output directory for --manifest mode");

  // replay
  auto* replaycmd = app.add_subcommand("replay", "Re-run a recorded mix plan");
  std::string replay_plan, rp_scan_a, rp_labels_a, rp_lm_scan, rp_lm_labels, rp_pm_scan, rp_pm_labels, rp_out_scan,
      rp_out_labels;
  replaycmd->add_option("--plan", replay_plan)->required();
  replaycmd->add_option("--scan-a", rp_scan_a, "Override the recorded first scan");
  replaycmd->add_option("--labels-a", rp_labels_a);
  replaycmd->add_option("--lasermix-scan", rp_lm_scan);
  replaycmd->add_option("--lasermix-labels", rp_lm_labels);
  replaycmd->add_option("--polarmix-scan", rp_pm_scan);
  replaycmd->add_option("--polarmix-labels", rp_pm_labels);
  replaycmd->add_option("--out-scan", rp_out_scan)->required();
  replaycmd->add_option("--out-labels", rp_out_labels)->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the voxel-majority stand-in model");
  std::string fit_manifest, fit_out;
  std::optional<double> fit_voxel;
  int fit_radius = 2;
  fit->add_option("--manifest", fit_manifest)->required();
  fit->add_option("--voxel-size", fit_voxel, "Voxel edge in meters (default from config)");
  fit->add_option("--search-radius", fit_radius, "Fallback search radius in voxels")->capture_default_str();
  fit->add_option("--out", fit_out)->required();

  // predict
  auto* predict = app.add_subcommand("predict", "Predict per-point labels and scores");
  std::string pr_model, pr_scan, pr_labels, pr_scores;
  predict->add_option("--model", pr_model)->required();
  predict->add_option("--scan", pr_scan)->required();
  predict->add_option("--out-labels", pr_labels)->required();
  predict->add_option("--out-scores", pr_scores);

  // tta
  auto* ttacmd = app.add_subcommand("tta", "Predict with test-time augmentation");
  std::string tta_model, tta_scan, tta_labels, tta_scores, tta_manifest, tta_out_dir;
  std::optional<int> tta_views;
  bool tta_random = false;
  ttacmd->add_option("--model", tta_model)->required();
  ttacmd->add_option("--scan", tta_scan);
  ttacmd->add_option("--out-labels", tta_labels);
  ttacmd->add_option("--out-scores", tta_scores);
  ttacmd->add_option("--manifest", tta_manifest, "Predict every manifest scan into --out-dir");
  ttacmd->add_option("--out-dir", tta_out_dir);
  ttacmd->add_option("--views", tta_views, "1, 2, 4, 8 or 16 (default from config)");
  ttacmd->add_flag("--random-views", tta_random, "Seeded random views instead of the canonical grid");

  // eval
  auto* eval = app.add_subcommand("eval", "Class-wise IoU and mIoU over paired label directories");
  std::string ev_gt, ev_pred, ev_report;
  eval->add_option("--gt", ev_gt)->required();
  eval->add_option("--pred", ev_pred)->required();
  eval->add_option("--report", ev_report, "Write the JSON report here");

  // bench
  auto* bench = app.add_subcommand("bench", "Time LaserMix and PolarMix");
  std::int64_t bench_points = 150000;
  int bench_repeats = 20;
  bench->add_option("--points", bench_points)->capture_default_str();
  bench->add_option("--repeats", bench_repeats)->capture_default_str();

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Run the backbone x augmentation x TTA grid with the stand-in model");
  AblationSpec ab;
  ablate->add_option("--train", ab.train_scenes)->capture_default_str();
  ablate->add_option("--val", ab.val_scenes)->capture_default_str();
  ablate->add_option("--points", ab.points)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    g.config();  // a bad --config fails every subcommand, not only those that read it
    if (*genscene) {
      fs::create_directories(gen_out);
      std::vector<ManifestEntry> entries(static_cast<std::size_t>(gen_count));
      parallel_for(entries.size(), g.jobs, [&](std::size_t i) {
        SceneSpec spec;
        spec.seed = derive_seed(g.seed, i);
        spec.points = gen_points;
        const std::string name = scene_name(gen_prefix, i);
        entries[i] = {fs::path(gen_out) / (name + ".bin"), fs::path(gen_out) / (name + ".label"),
                      static_cast<std::size_t>(gen_points)};
        write_labeled(generate_scene(spec), entries[i].scan, entries[i].labels);
      });
      write_manifest(fs::path(gen_out) / "manifest.txt", entries);
      write_text(fs::path(gen_out) / "classmap.tsv", ClassMap::standard().serialize());
      std::cout << "wrote " << gen_count << " scene(s) to " << gen_out << "\n";
      return 0;
    }

    if (*mixcmd) {
      const RunConfig cfg = g.config();
      const Strategy strategy = parse_strategy(strategy_name);
      const int classes = g.classmap().size();
      if (!mix_manifest.empty()) {
        if (mix_out_dir.empty()) throw Error(ErrorKind::kValidation, "--manifest requires --out-dir");
        const auto entries = load_manifest(mix_manifest);
        if (entries.empty()) throw Error(ErrorKind::kDegenerateInput, "manifest lists no scans");
        fs::create_directories(mix_out_dir);
        std::vector<ManifestEntry> outputs(entries.size());
        parallel_for(entries.size(), g.jobs, [&](std::size_t i) {
          const std::uint64_t pair_seed = derive_seed(g.seed, i);
          Rng partner_rng(derive_seed(pair_seed, 0));
          const std::size_t lp = choose_partner(partner_rng, entries.size(), i);
          const std::size_t pp = choose_partner(partner_rng, entries.size(), i);
          const Cloud a = read_labeled_scan(entries[i].scan, entries[i].labels, classes);
          const Cloud lm = read_labeled_scan(entries[lp].scan, entries[lp].labels, classes);
          const Cloud pm = read_labeled_scan(entries[pp].scan, entries[pp].labels, classes);
          MixResult result = mix(a, lm, pm, strategy, cfg, pair_seed);
          result.record.scan_a = entries[i].scan.string();
          result.record.labels_a = entries[i].labels.string();
          result.record.lasermix_partner_scan = entries[lp].scan.string();
          result.record.lasermix_partner_labels = entries[lp].labels.string();
          result.record.polarmix_partner_scan = entries[pp].scan.string();
          result.record.polarmix_partner_labels = entries[pp].labels.string();
          const std::string stem = entries[i].scan.stem().string();
          outputs[i] = {fs::path(mix_out_dir) / (stem + ".bin"), fs::path(mix_out_dir) / (stem + ".label"),
                        static_cast<std::size_t>(result.cloud.size())};
          write_labeled(result.cloud, outputs[i].scan, outputs[i].labels);
          write_text(fs::path(mix_out_dir) / (stem + ".plan.json"), serialize_record(result.record));
        });
        write_manifest(fs::path(mix_out_dir) / "manifest.txt", outputs);
        std::cout << "mixed " << entries.size() << " scan(s) into " << mix_out_dir << "\n";
        return 0;
      }
      for (const auto* required : {&scan_a, &labels_a, &scan_b, &labels_b, &out_scan, &out_labels}) {
        if (required->empty()) {
          throw Error(ErrorKind::kValidation,
                      "mix needs --scan-a --labels-a --scan-b --labels-b --out-scan --out-labels (or --manifest)");
        }
      }
      const Cloud a = read_labeled_scan(scan_a, labels_a, classes);
      const Cloud b = read_labeled_scan(scan_b, labels_b, classes);
      MixResult result = mix(a, b, b, strategy, cfg, g.seed);
      result.record.scan_a = scan_a;
      result.record.labels_a = labels_a;
      result.record.lasermix_partner_scan = result.record.polarmix_partner_scan = scan_b;
      result.record.lasermix_partner_labels = result.record.polarmix_partner_labels = labels_b;
      write_labeled(result.cloud, out_scan, out_labels);
      const std::string plan_path = plan_out.empty() ? out_scan + ".plan.json" : plan_out;
      write_text(plan_path, serialize_record(result.record));
      std::cout << "lasermix: " << (result.record.lasermix_triggered ? "applied" : "skipped")
                << ", polarmix: " << (result.record.polarmix_triggered ? "applied" : "skipped") << ", points: "
                << result.cloud.size() << "\n";
      return 0;
    }

    if (*replaycmd) {
      const auto bytes = read_file(replay_plan);
      const MixRecord rec = parse_record(std::string(bytes.begin(), bytes.end()), replay_plan);
      const int classes = g.classmap().size();
      auto pick = [](const std::string& override_path, const std::string& recorded) {
        return override_path.empty() ? recorded : override_path;
      };
      auto load = [&](const std::string& scan, const std::string& labels) {
        if (scan.empty() || labels.empty()) {
          throw Error(ErrorKind::kValidation, "replay needs every input scan, recorded or given on the command line");
        }
        return read_labeled_scan(scan, labels, classes);
      };
      const Cloud a = load(pick(rp_scan_a, rec.scan_a), pick(rp_labels_a, rec.labels_a));
      const Cloud lm = rec.lasermix_triggered
                           ? load(pick(rp_lm_scan, rec.lasermix_partner_scan), pick(rp_lm_labels, rec.lasermix_partner_labels))
                           : Cloud{};
      const Cloud pm = rec.polarmix_triggered
                           ? load(pick(rp_pm_scan, rec.polarmix_partner_scan), pick(rp_pm_labels, rec.polarmix_partner_labels))
                           : Cloud{};
      write_labeled(replay(a, lm, pm, rec), rp_out_scan, rp_out_labels);
      return 0;
    }

    if (*fit) {
      const RunConfig cfg = g.config();
      const int classes = g.classmap().size();
      const auto entries = load_manifest(fit_manifest);
      if (entries.empty()) throw Error(ErrorKind::kDegenerateInput, "manifest lists no scans to fit on");
      VoxelMajorityModel model(fit_voxel.value_or(cfg.voxel_size), classes, fit_radius);
      for (const auto& e : entries) model.fit(read_labeled_scan(e.scan, e.labels, classes));
      if (model.empty()) throw Error(ErrorKind::kDegenerateInput, "manifest contains no labeled (non-IGNORE) points");
      model.save(fit_out);
      std::cout << "fitted " << model.voxel_count() << " voxels from " << entries.size() << " scan(s)\n";
      return 0;
    }

    if (*predict) {
      const auto model = VoxelMajorityModel::load(pr_model);
      const Cloud cloud = read_scan(pr_scan);
      const ScoreMap scores = model.predict(cloud);
      check_score_map(scores, cloud.size(), model.class_count());
      write_prediction(scores, pr_labels, pr_scores.empty() ? std::nullopt : std::optional<fs::path>(pr_scores));
      return 0;
    }

    if (*ttacmd) {
      const RunConfig cfg = g.config();
      const auto model = VoxelMajorityModel::load(tta_model);
      const int count = tta_views.value_or(cfg.tta_views);
      const bool random = tta_random || cfg.tta_random;
      const auto views = views_for(count, random, g.seed);
      CountingPredictor counter(model);
      if (!tta_manifest.empty()) {
        if (tta_out_dir.empty()) throw Error(ErrorKind::kValidation, "--manifest requires --out-dir");
        const auto entries = load_manifest(tta_manifest);
        fs::create_directories(tta_out_dir);
        for (const auto& e : entries) {
          const ScoreMap scores = tta_predict(counter, read_scan(e.scan), views, g.jobs);
          write_prediction(scores, fs::path(tta_out_dir) / e.labels.filename(), std::nullopt);
        }
      } else {
        if (tta_scan.empty() || tta_labels.empty()) {
          throw Error(ErrorKind::kValidation, "tta needs --scan and --out-labels (or --manifest and --out-dir)");
        }
        const ScoreMap scores = tta_predict(counter, read_scan(tta_scan), views, g.jobs);
        write_prediction(scores, tta_labels, tta_scores.empty() ? std::nullopt : std::optional<fs::path>(tta_scores));
      }
      std::cout << "views: " << views.size() << "\ninference_calls: " << counter.calls() << "\n";
      return 0;
    }

    if (*eval) {
      const ClassMap classmap = g.classmap();
      std::vector<std::string> files;
      const ConfusionMatrix matrix = evaluate_directories(ev_gt, ev_pred, classmap, &files);
      const EvalReport report = make_report(matrix, classmap, files);
      std::cout << report_text(report);
      if (!ev_report.empty()) write_text(ev_report, report_json(report));
      return 0;
    }

    if (*bench) {
      std::cout << format_bench(run_mix_bench(bench_points, bench_repeats, g.seed), bench_points);
      return 0;
    }

    if (*ablate) {
      ab.seed = g.seed;
      ab.config = g.config();
      std::cout << format_ablation(run_ablation(ab));
      std::cout << "reference: published mIoU of the original network; stand-in: voxel-majority model on synthetic "
                   "scenes\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (I/O error): " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
