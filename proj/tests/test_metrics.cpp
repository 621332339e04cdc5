#include "doctest.h"
#include "mixseg3d/metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mixseg3d;

namespace {

using testing::kPublishedIou;

std::vector<ClassId> random_labels(Rng& rng, std::size_t n, int classes, bool with_ignore) {
  std::vector<ClassId> v(n);
  for (auto& l : v) {
    l = static_cast<ClassId>(rng.below(static_cast<std::uint64_t>(classes)));
    if (with_ignore && rng.bernoulli(0.05)) l = kIgnore;
  }
  return v;
}

}  // namespace

TEST_CASE("accumulate examples") {
  ConfusionMatrix m;
  const std::vector<ClassId> gt{0, 1, 2};
  m.accumulate(gt, gt);
  CHECK(m.counts()(0, 0) == 1);
  CHECK(m.counts()(1, 1) == 1);
  CHECK(m.counts()(2, 2) == 1);
  CHECK(m.total() == 3);

  ConfusionMatrix ig;
  ig.accumulate(std::vector<ClassId>{kIgnore, 3}, std::vector<ClassId>{5, 3});
  CHECK(ig.total() == 1);
  CHECK(ig.counts()(3, 3) == 1);
}

TEST_CASE("accumulate errors") {
  ConfusionMatrix m;
  try {
    m.accumulate(std::vector<ClassId>{0, 1}, std::vector<ClassId>{0, 22});
    FAIL("expected invalid label");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidLabel);
  }
  CHECK(m.total() == 0);
  CHECK_THROWS_AS(m.accumulate(std::vector<ClassId>{0}, std::vector<ClassId>{kIgnore}), Error);
  CHECK_THROWS_AS(m.accumulate(std::vector<ClassId>{0, 1}, std::vector<ClassId>{0}), Error);
  CHECK_THROWS_AS(m.accumulate(std::vector<ClassId>{40}, std::vector<ClassId>{0}), Error);
  CHECK_THROWS_AS(ConfusionMatrix(0), Error);
  CHECK_THROWS_AS(ConfusionMatrix(300), Error);
}

TEST_CASE("accumulate matches the nested-loop tally") {
  Rng rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const auto gt = random_labels(rng, 10000, kNumClasses, true);
    const auto pred = random_labels(rng, 10000, kNumClasses, false);
    ConfusionMatrix m;
    m.accumulate(gt, pred);
    const auto ref = oracle::tally(gt, pred, kNumClasses, kIgnore);
    for (int g = 0; g < kNumClasses; ++g) {
      for (int p = 0; p < kNumClasses; ++p) CHECK(m.counts()(g, p) == ref[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)]);
    }
    const auto ious = iou_per_class(m);
    const auto ref_iou = oracle::iou(gt, pred, kNumClasses, kIgnore);
    for (int c = 0; c < kNumClasses; ++c) {
      REQUIRE(ious[static_cast<std::size_t>(c)].has_value() == ref_iou[static_cast<std::size_t>(c)].has_value());
      CHECK(*ious[static_cast<std::size_t>(c)] == doctest::Approx(*ref_iou[static_cast<std::size_t>(c)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("iou_per_class examples") {
  ConfusionMatrix::Counts diag = ConfusionMatrix::Counts::Zero(4, 4);
  diag(0, 0) = 5;
  diag(2, 2) = 7;
  const auto perfect = iou_per_class(ConfusionMatrix::from_counts(diag));
  CHECK(*perfect[0] == 1.0);
  CHECK(*perfect[2] == 1.0);
  CHECK_FALSE(perfect[1].has_value());
  CHECK_FALSE(perfect[3].has_value());

  ConfusionMatrix::Counts two(2, 2);
  two << 3, 1, 2, 4;
  const auto ious = iou_per_class(ConfusionMatrix::from_counts(two));
  // class 0: TP 3, FN 1, FP 2 -> 3/6; class 1: TP 4, FN 2, FP 1 -> 4/7
  CHECK(*ious[0] == 0.5);
  CHECK(*ious[1] == 4.0 / 7.0);
}

TEST_CASE("mean_iou") {
  std::vector<std::optional<double>> table;
  for (double v : kPublishedIou) table.emplace_back(v / 100.0);
  CHECK(std::abs(mean_iou(table) * 100.0 - 69.83) < 0.01);

  CHECK(mean_iou({1.0, std::nullopt, 1.0}) == 1.0);
  CHECK(mean_iou({0.5, std::nullopt, 4.0 / 7.0}) == (0.5 + 4.0 / 7.0) / 2.0);
  try {
    mean_iou({std::nullopt, std::nullopt});
    FAIL("expected undefined metric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUndefinedMetric);
  }
}

TEST_CASE("chunked accumulation equals one pass") {
  Rng rng(11);
  const auto gt = random_labels(rng, 5000, kNumClasses, true);
  const auto pred = random_labels(rng, 5000, kNumClasses, false);
  ConfusionMatrix whole;
  whole.accumulate(gt, pred);

  ConfusionMatrix forward, backward;
  std::vector<std::size_t> cuts{0, 17, 900, 901, 3000, 5000};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    forward.accumulate(std::span(gt).subspan(cuts[k], cuts[k + 1] - cuts[k]),
                       std::span(pred).subspan(cuts[k], cuts[k + 1] - cuts[k]));
  }
  for (std::size_t k = cuts.size() - 1; k > 0; --k) {
    ConfusionMatrix shard;
    shard.accumulate(std::span(gt).subspan(cuts[k - 1], cuts[k] - cuts[k - 1]),
                     std::span(pred).subspan(cuts[k - 1], cuts[k] - cuts[k - 1]));
    backward = shard + backward;
  }
  CHECK(forward == whole);
  CHECK(backward == whole);
}

TEST_CASE("swapping ground truth and prediction transposes the matrix") {
  Rng rng(12);
  const auto a = random_labels(rng, 3000, kNumClasses, false);
  const auto b = random_labels(rng, 3000, kNumClasses, false);
  ConfusionMatrix ab, ba;
  ab.accumulate(a, b);
  ba.accumulate(b, a);
  CHECK(ab.counts() == ba.counts().transpose());
  const auto i1 = iou_per_class(ab), i2 = iou_per_class(ba);
  for (std::size_t c = 0; c < i1.size(); ++c) {
    CHECK(i1[c] == i2[c]);
    if (i1[c]) {
      CHECK(*i1[c] >= 0.0);
      CHECK(*i1[c] <= 1.0);
    }
  }
}
