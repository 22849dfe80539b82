#include <random>

#include "doctest.h"
#include "stimnet/common.hpp"
#include "stimnet/costim/cascade.hpp"

using namespace stimnet;
using namespace stimnet::costim;

namespace {

// Each vector carries its scripted stage outcome in element 0.
int scripted(std::span<const double> v) { return static_cast<int>(v[0]); }

}  // namespace

TEST_CASE("decisions follow the two-stage truth table") {
  const CascadeClassifier c{scripted, scripted, 0};
  // (stage1 says, stage2 says) -> (suspicious, invoked, label)
  struct Row {
    int s1, s2;
    bool suspicious, invoked;
    int label;
  };
  const Row table[] = {
      {0, 0, false, false, 0}, {0, 1, false, false, 0}, {0, 2, false, false, 0}, {1, 0, true, true, 0},
      {1, 1, true, true, 1},   {1, 3, true, true, 3},   {2, 0, true, true, 0},  {3, 2, true, true, 2},
  };
  for (const auto& r : table) {
    const std::vector<double> f2{static_cast<double>(r.s1)};
    const auto d = cascade_classify(c, &f2, [&] { return std::optional(std::vector<double>{double(r.s2)}); });
    CHECK(d.suspicious == r.suspicious);
    CHECK(d.stage2_invoked == r.invoked);
    CHECK(d.label == r.label);
    CHECK(d.status == DecisionStatus::decided);
    if (d.confirmed(0)) CHECK((d.suspicious && d.stage2_invoked));
  }
}

TEST_CASE("missing inputs are never read as normal") {
  const CascadeClassifier c{scripted, scripted, 0};
  const std::vector<double> flag{1};
  auto none = [] { return std::optional<std::vector<double>>{}; };
  auto d = cascade_classify(c, &flag, none);
  CHECK(d.status == DecisionStatus::inconclusive);
  CHECK(d.stage2_invoked);
  CHECK_FALSE(d.confirmed(0));

  d = cascade_classify(c, nullptr, none);
  CHECK(d.status == DecisionStatus::awaiting_report);
  CHECK_FALSE(d.stage2_invoked);

  d = cascade_classify(c, nullptr, [] { return std::optional(std::vector<double>{2}); }, true);
  CHECK(d.status == DecisionStatus::decided);
  CHECK(d.suspicious);
  CHECK(d.label == 2);
}

TEST_CASE("report timeout counts silent windows") {
  LinkMonitor m(2);
  CHECK_FALSE(m.end_window(false));
  CHECK(m.end_window(false));
  CHECK(m.end_window(false));
  CHECK_FALSE(m.end_window(true));
  CHECK(m.missing() == 0);
  CHECK_FALSE(m.end_window(false));
}

TEST_CASE("degenerate cascades") {
  std::mt19937_64 rng(1);
  std::vector<std::vector<double>> f2, f0;
  std::vector<int> truth;
  for (int i = 0; i < 200; ++i) {
    const int y = static_cast<int>(rng() % 4);
    truth.push_back(y);
    f2.push_back({static_cast<double>(rng() % 4)});
    f0.push_back({static_cast<double>(y)});
  }
  SUBCASE("stage 1 never fires") {
    const CascadeClassifier c{[](std::span<const double>) { return 0; }, scripted, 0};
    const auto ev = cascade_evaluate(c, f2, f0, truth, 4);
    CHECK(ev.stage2_invocations == 0);
    const auto m = ev.metrics(0);
    CHECK(*m.any_misbehavior.detection_rate == 0.0);
    CHECK(m.any_misbehavior.fp_rate == 0.0);
  }
  SUBCASE("stage 1 flags everything, stage 2 is exact") {
    const CascadeClassifier c{[](std::span<const double>) { return 1; }, scripted, 0};
    const auto ev = cascade_evaluate(c, f2, f0, truth, 4);
    CHECK(ev.stage2_invocation_rate() == 1.0);
    const auto m = ev.metrics(0);
    for (int k = 0; k < 4; ++k) CHECK(m.per_class[k].fp_rate == 0.0);
  }
  CHECK_THROWS_AS(cascade_evaluate({scripted, scripted, 0}, f2, {}, truth, 4), DataError);
}

TEST_CASE("a better second stage never adds false positives") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> f2, worse, better;
    std::vector<int> truth;
    for (int i = 0; i < 100; ++i) {
      const int y = static_cast<int>(rng() % 3);
      truth.push_back(y);
      f2.push_back({static_cast<double>(rng() % 3)});
      const int noisy = rng() % 4 == 0 ? static_cast<int>(rng() % 3) : y;
      worse.push_back({static_cast<double>(noisy)});
      // Fix some of the wrong answers, keep everything else.
      better.push_back({static_cast<double>(noisy != y && rng() % 2 ? y : noisy)});
    }
    const CascadeClassifier c{scripted, scripted, 0};
    const auto a = cascade_evaluate(c, f2, worse, truth, 3).confusion;
    const auto b = cascade_evaluate(c, f2, better, truth, 3).confusion;
    for (int k = 0; k < 3; ++k) CHECK(b.false_positives(k) <= a.false_positives(k));
  }
}
