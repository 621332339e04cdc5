#include <fstream>

#include "doctest.h"
#include "mixseg3d/config.hpp"
#include "mixseg3d/io.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mixseg3d;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("scan encoding is little-endian float32") {
  Cloud one(1);
  one.coords.row(0) << 1.0, 2.0, 3.0;
  one.intensity(0) = 0.5;
  const auto bytes = encode_scan(one);
  // 1.0f = 0x3F800000, 2.0f = 0x40000000, 3.0f = 0x40400000, 0.5f = 0x3F000000
  const std::vector<std::uint8_t> expected{0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0x40,
                                           0x00, 0x00, 0x40, 0x40, 0x00, 0x00, 0x00, 0x3F};
  CHECK(bytes == expected);
  std::vector<std::uint8_t> via_oracle;
  for (float v : {1.0f, 2.0f, 3.0f, 0.5f}) {
    const auto b = oracle::float_bytes(v);
    via_oracle.insert(via_oracle.end(), b.begin(), b.end());
  }
  CHECK(bytes == via_oracle);
  CHECK(decode_scan(expected) == one);
}

TEST_CASE("scan files") {
  const auto dir = testing::temp_dir("io_scan");

  SUBCASE("empty file is an empty cloud") {
    write_file(dir / "empty.bin", std::vector<std::uint8_t>{});
    CHECK(read_scan(dir / "empty.bin").size() == 0);
  }

  SUBCASE("random round trip is bit-identical") {
    Rng rng(1);
    Cloud c = testing::random_cloud(rng, 10000, 80.0);
    c.labels.reset();
    c = c.cast<float>().cast<double>();  // representable values
    write_scan(c, dir / "r.bin");
    CHECK(std::filesystem::file_size(dir / "r.bin") == 160000);
    const Cloud back = read_scan(dir / "r.bin");
    CHECK(back == c);
    write_scan(back, dir / "r2.bin");
    CHECK(read_file(dir / "r.bin") == read_file(dir / "r2.bin"));
  }

  SUBCASE("truncated file names the offset") {
    std::vector<std::uint8_t> bytes(37, 0);
    write_file(dir / "t.bin", bytes);
    try {
      read_scan(dir / "t.bin");
      FAIL("expected format error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kFormat);
      CHECK(std::string(e.what()).find("offset 32") != std::string::npos);
    }
  }

  SUBCASE("non-finite values are data errors") {
    Cloud c(1);
    auto bytes = encode_scan(c);
    const auto nan = oracle::float_bytes(std::numeric_limits<float>::quiet_NaN());
    std::copy(nan.begin(), nan.end(), bytes.begin() + 4);
    CHECK(kind_of([&] { decode_scan(bytes); }) == ErrorKind::kData);
    Cloud huge(1);
    huge.coords(0, 0) = 1e300;
    CHECK(kind_of([&] { encode_scan(huge); }) == ErrorKind::kData);
  }

  SUBCASE("missing file is an I/O error") { CHECK(kind_of([&] { read_scan(dir / "nope.bin"); }) == ErrorKind::kIo); }
}

TEST_CASE("label files") {
  const auto dir = testing::temp_dir("io_labels");
  const std::vector<ClassId> labels{0, 21, 255};
  CHECK(encode_labels(labels) == std::vector<std::uint8_t>{0, 0, 0, 0, 21, 0, 0, 0, 255, 0, 0, 0});
  write_labels(labels, dir / "l.label");
  CHECK(read_labels(dir / "l.label", 3) == labels);

  try {
    read_labels(dir / "l.label", 4);
    FAIL("expected pairing error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kPairing);
    const std::string msg = e.what();
    CHECK(msg.find('3') != std::string::npos);
    CHECK(msg.find('4') != std::string::npos);
  }

  write_labels(std::vector<ClassId>{0, 22}, dir / "bad.label");
  CHECK(kind_of([&] { read_labels(dir / "bad.label"); }) == ErrorKind::kData);
  CHECK(read_labels(dir / "bad.label", std::nullopt, 30).size() == 2);

  Rng rng(2);
  std::vector<ClassId> many(5000);
  for (auto& l : many) l = rng.bernoulli(0.1) ? kIgnore : static_cast<ClassId>(rng.below(22));
  write_labels(many, dir / "many.label");
  CHECK(read_labels(dir / "many.label", many.size()) == many);
}

TEST_CASE("score files") {
  const auto dir = testing::temp_dir("io_scores");
  ScoreMap s(3, 2);
  s << 0.25, 0.75, 1.0, 0.0, 0.5, 0.5;
  write_scores(s, dir / "s.scores");
  CHECK(read_scores(dir / "s.scores") == s);
  write_file(dir / "junk.scores", std::vector<std::uint8_t>{1, 2, 3});
  CHECK(kind_of([&] { read_scores(dir / "junk.scores"); }) == ErrorKind::kFormat);
}

TEST_CASE("class map") {
  const auto standard = ClassMap::standard();
  REQUIRE(standard.size() == 22);
  CHECK(standard.names.front() == "Car");
  CHECK(standard.names[10] == "Construction Cone");
  CHECK(standard.names.back() == "Sidewalk");
  const std::string text = standard.serialize();
  CHECK(text.find("0\tCar\n") != std::string::npos);
  CHECK(text.find("21\tSidewalk\n") != std::string::npos);
  CHECK(text.find("255\tIGNORE\n") != std::string::npos);
  const auto parsed = ClassMap::parse(text);
  CHECK(parsed.names == standard.names);
  CHECK(parsed.ignore == kIgnore);
  CHECK(parsed.valid(255));
  CHECK_FALSE(parsed.valid(22));
  CHECK(*parsed.find("Road") == 17);

  CHECK(kind_of([] { ClassMap::parse("0\tCar\n2\tBus\n"); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { ClassMap::parse("0 Car\n"); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { ClassMap::parse(""); }) == ErrorKind::kFormat);
}

TEST_CASE("config defaults and validation") {
  const RunConfig defaults = parse_config("");
  CHECK(defaults.p1 == 0.8);
  CHECK(defaults.p2 == 1.0);
  CHECK(defaults.tta_views == 8);
  CHECK(defaults.bin_choices == std::vector<int>{3, 4, 5, 6});
  CHECK(parse_config("{}") == defaults);
  CHECK(parse_config("  \n") == defaults);

  CHECK(kind_of([] { parse_config(R"({"p1": 1.5})"); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { parse_config(R"({"p2": -0.1})"); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { parse_config(R"({"tta": {"views": 3}})"); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { parse_config(R"({"voxel_size": 0})"); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { parse_config(R"({"lasermix": {"bins": [3]}})"); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { parse_config(R"({"p1": "high"})"); }) == ErrorKind::kValidation);

  try {
    parse_config("{\n  \"p1\": 0.5,\n  \"p2\": ,\n}");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFormat);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("config round trip") {
  RunConfig cfg;
  cfg.p1 = 0.3;
  cfg.p2 = 0.65;
  cfg.bin_choices = {2, 8};
  cfg.inclination_range_deg = std::array{-25.0, 3.0};
  cfg.sector_width_deg = {45.0, 90.0};
  cfg.instance_classes = {0, 6};
  cfg.paste_count = 3;
  cfg.augment = true;
  cfg.augment_scale = {0.9, 1.1};
  cfg.augment_flip_probability = 0.25;
  cfg.augment_shift_m = {0.1, 0.2, 0.05};
  cfg.tta_views = 16;
  cfg.tta_seed = 1234567890123ULL;
  cfg.tta_random = true;
  cfg.voxel_size = 0.123;
  cfg.classmap = "classes.tsv";
  const auto dir = testing::temp_dir("io_config");
  save_config(cfg, dir / "c.json");
  CHECK(load_config(dir / "c.json") == cfg);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});

  const auto lm = cfg.lasermix_options();
  CHECK(lm.range->first == doctest::Approx(-25.0 * oracle::kPi / 180.0));
  const auto pm = cfg.polarmix_options();
  CHECK(pm.width_min == doctest::Approx(oracle::kPi / 4));
  CHECK(pm.width_max == doctest::Approx(oracle::kPi / 2));
}

TEST_CASE("manifest validation is eager") {
  const auto dir = testing::temp_dir("io_manifest");
  Cloud c(4, true);
  write_scan(c, dir / "a.bin");
  write_labels(*c.labels, dir / "a.label");
  write_labels(std::vector<ClassId>{1, 2, 3}, dir / "short.label");
  write_text(dir / "good.txt", "# comment\na.bin a.label\n\n");
  const auto entries = load_manifest(dir / "good.txt");
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].points == 4);
  CHECK(entries[0].scan == dir / "a.bin");

  write_text(dir / "missing.txt", "a.bin a.label\nb.bin b.label\n");
  CHECK(kind_of([&] { load_manifest(dir / "missing.txt"); }) == ErrorKind::kIo);
  write_text(dir / "mismatch.txt", "a.bin short.label\n");
  CHECK(kind_of([&] { load_manifest(dir / "mismatch.txt"); }) == ErrorKind::kPairing);
  write_text(dir / "bad.txt", "a.bin\n");
  CHECK(kind_of([&] { load_manifest(dir / "bad.txt"); }) == ErrorKind::kFormat);

  write_manifest(dir / "rewritten.txt", entries);
  CHECK(load_manifest(dir / "rewritten.txt")[0].scan == entries[0].scan);
}
