#include <doctest.h>

#include <optional>
#include <vector>

#include "oracles.hpp"
#include "storycut/interval.hpp"
#include "storycut/rng.hpp"
#include "storycut/supervision.hpp"

using namespace storycut;
using namespace storycut::testing;

TEST_CASE("iou basics") {
  CHECK(iou({0, 10}, {0, 10}) == doctest::Approx(1.0));
  CHECK(iou({0, 10}, {20, 30}) == 0.0);
  CHECK(iou({0, 10}, {10, 20}) == 0.0);  // half-open: touching is disjoint
  CHECK(iou({0, 10}, {5, 15}) == doctest::Approx(5.0 / 15.0));
  CHECK(iou({3, 4}, {3, 4}) == doctest::Approx(1.0));
}

TEST_CASE("iou matches frame-count oracle on random pairs") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s1 = index_t(rng.uniform_index(50));
    const auto l1 = 1 + index_t(rng.uniform_index(30));
    const auto s2 = index_t(rng.uniform_index(50));
    const auto l2 = 1 + index_t(rng.uniform_index(30));
    const Interval a{s1, s1 + l1}, b{s2, s2 + l2};
    CHECK(iou(a, b) == doctest::Approx(oracle_iou(a, b)).epsilon(1e-12));
    CHECK(iou(a, b) == iou(b, a));
  }
}

TEST_CASE("dilated merge rules") {
  CHECK(dilated_merge({}) == std::vector<Interval>{});
  CHECK(dilated_merge({{3, 9}}) == std::vector<Interval>{{3, 9}});
  CHECK(dilated_merge({{0, 10}, {14, 20}}) == std::vector<Interval>{{0, 20}});   // gap 4
  CHECK(dilated_merge({{0, 10}, {16, 20}}) == std::vector<Interval>{{0, 10}, {16, 20}});  // gap 6
  CHECK(dilated_merge({{0, 5}, {8, 12}, {15, 30}}) == std::vector<Interval>{{0, 30}});  // chain
  CHECK(dilated_merge({{0, 5}, {5, 9}}, 0) == std::vector<Interval>{{0, 9}});  // touching, gap 0
  CHECK(dilated_merge({{0, 5}, {6, 9}}, 0) == std::vector<Interval>{{0, 5}, {6, 9}});
}

TEST_CASE("dilated merge is idempotent and rejects unsorted input") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto runs = random_stories(rng, 80, 6);
    const auto gap = index_t(rng.uniform_index(8));
    const auto once = dilated_merge(runs, gap);
    CHECK(dilated_merge(once, gap) == once);
  }
  CHECK_THROWS_AS(dilated_merge({{10, 20}, {0, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(dilated_merge({{0, 10}, {5, 15}}), std::invalid_argument);  // overlap
}

TEST_CASE("nms hand cases") {
  const std::vector<ScoredInterval> single{{{5, 15}, 0.7}};
  CHECK(nms(single, 0.5) == single);

  // identical intervals: only the best survives at any threshold
  const auto kept = nms({{{0, 10}, 0.4}, {{0, 10}, 0.9}}, 0.99);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].score == 0.9);

  // strictly-above semantics: IoU exactly at the threshold survives
  const auto at = nms({{{0, 10}, 0.9}, {{0, 5}, 0.8}}, 0.5);
  CHECK(at.size() == 2);
  const auto above = nms({{{0, 10}, 0.9}, {{0, 6}, 0.8}}, 0.5);
  CHECK(above.size() == 1);

  // equal scores: earlier start wins, then shorter length
  const auto tie = nms({{{5, 15}, 0.5}, {{4, 14}, 0.5}}, 0.3);
  REQUIRE(tie.size() == 1);
  CHECK(tie[0].interval == Interval{4, 14});
  const auto tie2 = nms({{{4, 16}, 0.5}, {{4, 14}, 0.5}}, 0.3);
  REQUIRE(tie2.size() == 1);
  CHECK(tie2[0].interval == Interval{4, 14});
}

TEST_CASE("nms matches brute-force oracle on random candidate sets") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cands = random_scored(rng, 60, 1 + index_t(rng.uniform_index(50)));
    const double thresh = 0.2 + 0.75 * rng.uniform();
    const auto got = nms(cands, thresh);
    const auto want = oracle_nms(cands, thresh);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].interval == want[i].interval);
      CHECK(got[i].score == want[i].score);
    }
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].score >= got[i].score);
  }
}

TEST_CASE("frame targets hand case") {
  CHECK(frame_targets(10, {}) == std::vector<FrameLabel>(10, FrameLabel::Background));

  const auto labels = frame_targets(12, {{3, 9}}, 1);
  const std::vector<FrameLabel> want{
      FrameLabel::Background,    FrameLabel::Background,    FrameLabel::BeginBoundary,
      FrameLabel::BeginBoundary, FrameLabel::BeginBoundary, FrameLabel::WithinStory,
      FrameLabel::WithinStory,   FrameLabel::EndBoundary,   FrameLabel::EndBoundary,
      FrameLabel::EndBoundary,   FrameLabel::Background,    FrameLabel::Background};
  CHECK(labels == want);
}

TEST_CASE("frame targets clip at video edges") {
  const auto labels = frame_targets(6, {{0, 6}}, 1);
  CHECK(labels[0] == FrameLabel::BeginBoundary);
  CHECK(labels[1] == FrameLabel::BeginBoundary);
  CHECK(labels[4] == FrameLabel::EndBoundary);
  CHECK(labels[5] == FrameLabel::EndBoundary);
  CHECK(labels[2] == FrameLabel::WithinStory);
  CHECK(labels[3] == FrameLabel::WithinStory);
}

TEST_CASE("frame targets resolve begin/end collisions toward the start") {
  // story [5,7): begin window {4,5,6} and end window {5,6,7} collide
  const auto labels = frame_targets(12, {{5, 7}}, 1);
  CHECK(labels[4] == FrameLabel::BeginBoundary);   // closer to start
  CHECK(labels[5] == FrameLabel::BeginBoundary);   // tie -> begin
  CHECK(labels[6] == FrameLabel::EndBoundary);     // closer to end
  CHECK(labels[7] == FrameLabel::EndBoundary);
  CHECK(labels[3] == FrameLabel::Background);
  CHECK(labels[8] == FrameLabel::Background);
}

TEST_CASE("frame targets label every frame exactly once on random layouts") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const index_t T = 10 + index_t(rng.uniform_index(90));
    const auto stories = random_stories(rng, T, 5);
    const auto hw = index_t(rng.uniform_index(3));
    const auto labels = frame_targets(T, stories, hw);
    REQUIRE(index_t(labels.size()) == T);
    // frames outside every story and boundary band are Background
    for (index_t t = 0; t < T; ++t) {
      bool near_any = false;
      for (const auto& s : stories)
        near_any = near_any || (t >= s.start - hw && t < s.end + hw);
      if (!near_any) CHECK(labels[std::size_t(t)] == FrameLabel::Background);
    }
  }
  CHECK_THROWS_AS(frame_targets(20, {{0, 10}, {5, 15}}), std::invalid_argument);
}

TEST_CASE("proposal labeling band") {
  const std::vector<Interval> gt{{10, 20}};

  auto labeled = assign_proposal_labels({{10, 20}, {40, 50}, {0, 10}}, gt);
  REQUIRE(labeled.size() == 3);
  CHECK(labeled[0].label == ProposalLabel::Positive);
  CHECK(labeled[0].matched_gt == Interval{10, 20});
  CHECK(labeled[0].targets == BoundaryOffsets{0.0, 0.0});
  CHECK(labeled[1].label == ProposalLabel::Negative);
  CHECK(!labeled[1].matched_gt.has_value());
  CHECK(labeled[2].label == ProposalLabel::Negative);  // IoU 0 (half-open touch)

  // IoU 1/3 falls inside [0.3, 0.7] -> Ignore
  const auto band = assign_proposal_labels({{0, 10}}, {{5, 15}});
  CHECK(band[0].label == ProposalLabel::Ignore);
  CHECK(!band[0].targets.has_value());

  // boundary values: max IoU must exceed hi strictly / fall below lo strictly
  const auto at_hi = assign_proposal_labels({{0, 7}}, {{0, 10}}, 0.7, 0.3);
  CHECK(at_hi[0].label == ProposalLabel::Ignore);  // IoU exactly 0.7
  const auto at_lo = assign_proposal_labels({{0, 3}}, {{0, 10}}, 0.7, 0.3);
  CHECK(at_lo[0].label == ProposalLabel::Ignore);  // IoU exactly 0.3

  CHECK(assign_proposal_labels({{0, 10}}, {})[0].label == ProposalLabel::Negative);
}

TEST_CASE("proposal labeling argmax ties take the earliest gt") {
  // proposal overlaps both stories with equal IoU; lowered band makes it Positive
  const std::vector<Interval> gt{{0, 10}, {10, 20}};
  const auto labeled = assign_proposal_labels({{0, 20}}, gt, 0.4, 0.2);
  REQUIRE(labeled[0].label == ProposalLabel::Positive);
  CHECK(labeled[0].matched_gt == Interval{0, 10});
}

TEST_CASE("regression targets") {
  CHECK(regression_targets({10, 20}, {10, 20}) == BoundaryOffsets{0.0, 0.0});
  const auto t = regression_targets({10, 20}, {12, 22});
  CHECK(t.start == doctest::Approx(0.2));
  CHECK(t.end == doctest::Approx(0.2));
  const auto n = regression_targets({10, 20}, {8, 19});
  CHECK(n.start == doctest::Approx(-0.2));
  CHECK(n.end == doctest::Approx(-0.1));
}

TEST_CASE("positive proposals carry targets consistent with regression_targets") {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gt = random_stories(rng, 100, 4);
    const auto props = random_stories(rng, 100, 4);
    for (const auto& lp : assign_proposal_labels(props, gt)) {
      if (lp.label == ProposalLabel::Positive) {
        REQUIRE(lp.matched_gt.has_value());
        REQUIRE(lp.targets.has_value());
        const auto want = regression_targets(lp.proposal, *lp.matched_gt);
        CHECK(lp.targets->start == doctest::Approx(want.start));
        CHECK(lp.targets->end == doctest::Approx(want.end));
      } else {
        CHECK(!lp.matched_gt.has_value());
        CHECK(!lp.targets.has_value());
      }
    }
  }
}
