#include <sstream>

#include "doctest.h"
#include "stimnet/features/dataset_io.hpp"
#include "stimnet/features/extractor.hpp"
#include "stimnet/features/labeling.hpp"
#include "stimnet/features/monitor.hpp"

using namespace stimnet;
using namespace stimnet::features;
using netsim::EventKind;
using netsim::TraceEvent;

namespace {

TraceEvent ev(double t, NodeId obs, EventKind k, PacketId id, NodeId src, NodeId dst, int seq = 0, int size = 0) {
  return {from_seconds(t), obs, k, id, 0, src, dst, seq, size};
}

// Flow 0 -> 1 -> 2 -> 3, seen mostly from node 1; two 10 s windows.
struct Fixture {
  std::vector<netsim::Connection> conns;
  netsim::EventTrace trace;

  Fixture() {
    netsim::Connection c;
    c.source = 0;
    c.destination = 3;
    conns.push_back(c);
    trace.events = {
        ev(1.0, 1, EventKind::receive, 100, 0, 1, 1, 124),
        ev(1.1, 1, EventKind::rts, 100, 1, 2),
        ev(1.1, 1, EventKind::backoff, 100, 1, 2),
        ev(1.15, 1, EventKind::rts, 100, 1, 2),
        ev(1.15, 1, EventKind::ack, 100, 2, 1),
        ev(1.2, 1, EventKind::send, 100, 1, 2, 1, 124),
        ev(1.2, 2, EventKind::receive, 100, 1, 2, 1, 124),
        ev(1.5, 2, EventKind::send, 100, 2, 3, 1, 124),
        ev(1.5, 1, EventKind::overhear, 100, 2, 3, 1, 124),
        ev(1.5, 3, EventKind::receive, 100, 2, 3, 1, 124),
        ev(2.9, 1, EventKind::receive, 101, 0, 1, 2, 124),
        ev(3.0, 1, EventKind::rts, 101, 1, 2),
        ev(3.0, 1, EventKind::ack, 101, 2, 1),
        ev(3.1, 1, EventKind::send, 101, 1, 2, 2, 124),
        ev(3.1, 2, EventKind::receive, 101, 1, 2, 2, 124),
        ev(11.9, 1, EventKind::receive, 102, 0, 1, 4, 124),
        ev(12.0, 1, EventKind::rts, 102, 1, 2),
        ev(12.0, 1, EventKind::ack, 102, 2, 1),
        ev(12.1, 1, EventKind::send, 102, 1, 2, 4, 124),
        ev(12.1, 2, EventKind::receive, 102, 1, 2, 4, 124),
        ev(12.5, 2, EventKind::send, 102, 2, 3, 4, 124),
        ev(12.5, 1, EventKind::overhear, 102, 2, 3, 4, 124),
        ev(12.5, 3, EventKind::receive, 102, 2, 3, 4, 124),
    };
  }
};

}  // namespace

TEST_CASE("window arithmetic") {
  CHECK(WindowSpec{500, 0, 4 * 3600}.count() == 28);
  CHECK(WindowSpec{50, 0, 3600}.count() == 72);
  const WindowSpec w{10, 0, 25};
  CHECK(w.count() == 2);
  CHECK(w.index_of(from_seconds(9.999999)) == 0);
  CHECK(w.index_of(from_seconds(10)) == 1);
  CHECK(w.index_of(from_seconds(20)) == -1);
  CHECK(w.index_of(from_seconds(-1)) == -1);
}

TEST_CASE("feature subsets") {
  CHECK(features_of(FeatureSetId::f0).size() == 24);
  CHECK(features_of(FeatureSetId::f1).size() == 17);
  CHECK(features_of(FeatureSetId::f2).size() == 16);
  for (auto f : features_of(FeatureSetId::f2)) CHECK(f != Feature::M1);
  CHECK(composite_names(FeatureSetId::f2).size() == 32);
  CHECK(composite_names(FeatureSetId::f0).front() == "M1_L");
  CHECK(composite_names(FeatureSetId::f0)[24] == "M1_R");
  CHECK(parse_feature("T5") == Feature::T5);
  CHECK_FALSE(parse_feature("X9").has_value());
}

TEST_CASE("composition needs a matching remote report") {
  LocalFeatureSample a, b;
  a.values[0] = 1;
  b.values[0] = 2;
  const auto v = compose(a, &b, FeatureSetId::f0);
  CHECK(v.values.size() == 48);
  CHECK(v.values[0] == 1);
  CHECK(v.values[24] == 2);
  CHECK_THROWS_AS(compose(a, nullptr, FeatureSetId::f2), MissingRemoteError);
  b.window_index = 3;
  CHECK_THROWS(compose(a, &b, FeatureSetId::f2));
}

TEST_CASE("link and node features from a hand-built trace") {
  const Fixture fx;
  const FeatureExtractor x(fx.trace, fx.conns, {10, 0, 20});
  const auto s = x.extract(1, 2);
  REQUIRE(s.size() == 2);

  CHECK(s[0].traffic_present);
  CHECK(s[0][Feature::M1] == doctest::Approx((0.5 + 1.0) / 2));
  CHECK(s[0][Feature::M2] == doctest::Approx(0.5));
  CHECK(s[0][Feature::M3] == doctest::Approx(0.5));
  CHECK(s[0][Feature::M4] == doctest::Approx(0.3));
  CHECK(s[0][Feature::M5] == doctest::Approx(2 * 124 * 8 / 10.0));
  CHECK(s[0][Feature::M6] == 2);
  CHECK(s[0][Feature::T1] == 0);
  CHECK(s[0][Feature::T2] == doctest::Approx(1.9));
  CHECK_FALSE(s[0].has(Feature::T3));

  CHECK(s[1][Feature::M3] == doctest::Approx(1.0));
  CHECK(s[1][Feature::M4] == doctest::Approx(0.4));
  CHECK(s[1][Feature::T1] == doctest::Approx(0.1));
  CHECK(s[1][Feature::T2] == doctest::Approx(9.0));

  CHECK(x.data_successors(1) == std::vector<NodeId>{2});
  CHECK(x.next_hops(2, 1) == std::vector<NodeId>{3, 3});
  const auto fwd = x.forwarded_counts();
  CHECK(fwd[1] == 3);
  CHECK(fwd[2] == 2);
  CHECK(fwd[0] == 0);
}

TEST_CASE("extractor rejects bad traces") {
  Fixture fx;
  auto unsorted = fx.trace;
  std::swap(unsorted.events[0], unsorted.events[5]);
  CHECK_THROWS_AS(FeatureExtractor(unsorted, fx.conns, {10, 0, 20}), DataError);
  auto unknown = fx.trace;
  unknown.events[0].connection_id = 4;
  CHECK_THROWS_AS(FeatureExtractor(unknown, fx.conns, {10, 0, 20}), DataError);
}

TEST_CASE("labels and paired samples") {
  netsim::MisbehaviorPlan plan;
  plan.kind = netsim::MisbehaviorKind::dropping;
  plan.affected_nodes = {2};
  CHECK(label_for(plan, 2) == Label::dropping);
  CHECK(label_for(plan, 1) == Label::none);
  netsim::MisbehaviorPlan worm;
  worm.kind = netsim::MisbehaviorKind::wormhole;
  worm.wormholes = {{4, 9, 0}};
  CHECK(label_for(worm, 4) == Label::wormhole);
  CHECK(label_for(worm, 9) == Label::wormhole);

  const Fixture fx;
  const FeatureExtractor x(fx.trace, fx.conns, {10, 0, 20});
  ExclusionCounts excluded;
  const auto rows = paired_samples(x, plan, 1, &excluded);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.label == Label::dropping);
    CHECK(r.local.neighbor == 2);
    CHECK(r.remote.observer == 3);
    CHECK(r.remote.window_index == r.local.window_index);
  }
  CHECK(excluded.total() == 0);
  // Node 2 sends without any RTS/ACK exchange, so no window has MAC records.
  paired_samples(x, plan, 2, &excluded);
  CHECK(excluded.no_traffic == 2);
  CHECK(excluded.total() == 2);
}

TEST_CASE("dataset tables") {
  const Fixture fx;
  const FeatureExtractor x(fx.trace, fx.conns, {10, 0, 20});
  netsim::MisbehaviorPlan plan;
  const auto rows = paired_samples(x, plan, 1);
  const auto f2 = make_table(rows, DatasetKind::F2);
  const auto f0 = make_table(rows, DatasetKind::f0);
  CHECK(f2.feature_names.size() == 32);
  CHECK(f0.feature_names.size() == 24);
  REQUIRE(f2.rows.size() == f0.rows.size());
  CHECK(f0.rows[1].values[2] == doctest::Approx(1.0));

  std::stringstream ss;
  write_dataset(ss, f2);
  const auto back = read_dataset(ss);
  CHECK(back.feature_names == f2.feature_names);
  REQUIRE(back.rows.size() == f2.rows.size());
  CHECK(back.rows[0].values == f2.rows[0].values);
  CHECK(back.rows[1].label == f2.rows[1].label);

  std::string text = ss.str();
  std::stringstream broken(text.substr(0, text.rfind('\t')) + "\tsleepy\n");
  try {
    read_dataset(broken);
    FAIL("expected a parse error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(parse_dataset_kind("F1") == DatasetKind::F1);
  CHECK_THROWS(parse_dataset_kind("F3"));
}

TEST_CASE("monitor selection") {
  std::vector<std::string> warnings;
  CHECK(select_monitor_nodes({5, 5, 5, 0}, {2, 2, 3, 1}, 2) == std::vector<NodeId>{0, 2});
  CHECK(select_monitor_nodes({1, 9, 4}, {1, 1, 1}, 2) == std::vector<NodeId>{1, 2});
  CHECK(select_monitor_nodes({5, 5, 5, 0}, {2, 2, 3, 1}, 4, &warnings).size() == 3);
  CHECK_FALSE(warnings.empty());
}
