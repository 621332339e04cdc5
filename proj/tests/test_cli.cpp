#include "cli_runner.hpp"
#include "doctest.h"
#include "mixseg3d/io.hpp"
#include "test_support.hpp"

using testing::quote;
using testing::run_cli;
using testing::slurp;

namespace {

/// genscene + fit into a fresh directory; returns the directory.
std::filesystem::path fitted(const std::string& name) {
  const auto dir = testing::temp_dir(name);
  REQUIRE(run_cli("--seed 3 genscene --out-dir " + quote(dir / "scenes") + " --count 2 --points 4000").exit_code == 0);
  REQUIRE(run_cli("fit --manifest " + quote(dir / "scenes" / "manifest.txt") + " --out " + quote(dir / "m.model"))
              .exit_code == 0);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("fit --manifest").exit_code == 2);
  const auto dir = testing::temp_dir("cli_usage");
  mixseg3d::write_text(dir / "bad.json", R"({"p1": 1.5})");
  const auto r = run_cli("--config " + quote(dir / "bad.json") + " genscene --out-dir " + quote(dir / "x"));
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("p1") != std::string::npos);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("data errors exit with 3 and degenerate input with 4") {
  const auto dir = fitted("cli_errors");
  const auto r = run_cli("predict --model " + quote(dir / "m.model") + " --scan " + quote(dir / "missing.bin") +
                         " --out-labels " + quote(dir / "p.label"));
  CHECK(r.exit_code == 3);

  std::vector<std::uint8_t> truncated(20, 0);
  mixseg3d::write_file(dir / "t.bin", truncated);
  CHECK(run_cli("predict --model " + quote(dir / "m.model") + " --scan " + quote(dir / "t.bin") + " --out-labels " +
                quote(dir / "p.label"))
            .exit_code == 3);

  std::filesystem::create_directories(dir / "empty_gt");
  std::filesystem::create_directories(dir / "empty_pred");
  CHECK(run_cli("eval --gt " + quote(dir / "empty_gt") + " --pred " + quote(dir / "empty_pred")).exit_code == 4);

  std::filesystem::create_directories(dir / "gt");
  std::filesystem::create_directories(dir / "pred");
  mixseg3d::write_labels(std::vector<mixseg3d::ClassId>{1}, dir / "gt" / "a.label");
  mixseg3d::write_labels(std::vector<mixseg3d::ClassId>{1}, dir / "pred" / "b.label");
  const auto unpaired = run_cli("eval --gt " + quote(dir / "gt") + " --pred " + quote(dir / "pred"));
  CHECK(unpaired.exit_code == 3);
  CHECK(unpaired.output.find("a.label") != std::string::npos);
}

TEST_CASE("single-view tta equals plain prediction") {
  const auto dir = fitted("cli_tta1");
  const auto scan = quote(dir / "scenes" / "scene_000.bin");
  const auto model = quote(dir / "m.model");
  REQUIRE(run_cli("predict --model " + model + " --scan " + scan + " --out-labels " + quote(dir / "p.label") +
                  " --out-scores " + quote(dir / "p.scores"))
              .exit_code == 0);
  const auto r = run_cli("tta --views 1 --model " + model + " --scan " + scan + " --out-labels " +
                         quote(dir / "t.label") + " --out-scores " + quote(dir / "t.scores"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("inference_calls: 1") != std::string::npos);
  CHECK(slurp(dir / "p.label") == slurp(dir / "t.label"));
  CHECK(slurp(dir / "p.scores") == slurp(dir / "t.scores"));
}

TEST_CASE("eight-view tta is deterministic and calls the model eight times") {
  const auto dir = fitted("cli_tta8");
  const std::string base =
      "tta --views 8 --model " + quote(dir / "m.model") + " --scan " + quote(dir / "scenes" / "scene_000.bin");
  const auto first = run_cli(base + " --out-labels " + quote(dir / "a.label") + " --out-scores " + quote(dir / "a.s"));
  REQUIRE(first.exit_code == 0);
  CHECK(first.output.find("views: 8") != std::string::npos);
  CHECK(first.output.find("inference_calls: 8") != std::string::npos);
  const auto second = run_cli("--jobs 4 " + base + " --out-labels " + quote(dir / "b.label") + " --out-scores " +
                              quote(dir / "b.s"));
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(dir / "a.label") == slurp(dir / "b.label"));
  CHECK(slurp(dir / "a.s") == slurp(dir / "b.s"));
  CHECK(run_cli("tta --views 3 --model " + quote(dir / "m.model") + " --scan " +
                quote(dir / "scenes" / "scene_000.bin") + " --out-labels " + quote(dir / "c.label"))
            .exit_code == 2);
}

TEST_CASE("mix, replay and self-evaluation") {
  const auto dir = testing::temp_dir("cli_mix");
  REQUIRE(run_cli("--seed 9 genscene --out-dir " + quote(dir / "s") + " --count 3 --points 3000").exit_code == 0);
  REQUIRE(run_cli("--seed 9 mix --manifest " + quote(dir / "s" / "manifest.txt") + " --out-dir " + quote(dir / "m"))
              .exit_code == 0);
  const auto m0 = dir / "m" / "scene_000";
  CHECK(std::filesystem::exists(m0.string() + ".plan.json"));
  REQUIRE(run_cli("replay --plan " + quote(m0.string() + ".plan.json") + " --out-scan " + quote(dir / "r.bin") +
                  " --out-labels " + quote(dir / "r.label"))
              .exit_code == 0);
  CHECK(slurp(m0.string() + ".bin") == slurp(dir / "r.bin"));
  CHECK(slurp(m0.string() + ".label") == slurp(dir / "r.label"));

  const auto self = run_cli("eval --gt " + quote(dir / "m") + " --pred " + quote(dir / "m") + " --report " +
                            quote(dir / "report.json"));
  REQUIRE(self.exit_code == 0);
  CHECK(self.output.find("100.00") != std::string::npos);
  CHECK(slurp(dir / "report.json").find("\"miou\"") != std::string::npos);

  const auto pair = run_cli("--seed 4 mix --strategy polarmix --scan-a " + quote(dir / "s" / "scene_000.bin") +
                            " --labels-a " + quote(dir / "s" / "scene_000.label") + " --scan-b " +
                            quote(dir / "s" / "scene_001.bin") + " --labels-b " + quote(dir / "s" / "scene_001.label") +
                            " --out-scan " + quote(dir / "p.bin") + " --out-labels " + quote(dir / "p.label"));
  CHECK(pair.exit_code == 0);
  CHECK(std::filesystem::exists(dir / "p.bin.plan.json"));
}
