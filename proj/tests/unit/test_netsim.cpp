#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "stimnet/netsim/simulator.hpp"

using namespace stimnet;
using namespace stimnet::netsim;

namespace {

Topology line(int n, double spacing = 80.0) {
  std::vector<NodePosition> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({i, i * spacing, 0.0});
  return Topology(nodes, 100.0, n * spacing, 10.0);
}

std::vector<Connection> one_flow(NodeId s, NodeId d, double duration, double interval = 2.0) {
  Connection c;
  c.id = 0;
  c.source = s;
  c.destination = d;
  c.duration = duration;
  c.injection_interval = interval;
  return {c};
}

std::int64_t count(const EventTrace& t, EventKind k) {
  return std::count_if(t.events.begin(), t.events.end(), [&](const TraceEvent& e) { return e.kind == k; });
}

}  // namespace

TEST_CASE("unit-disk topology") {
  const auto t = line(4);
  CHECK(t.neighbors(1) == std::vector<NodeId>{0, 2});
  CHECK(t.adjacent(0, 1));
  CHECK_FALSE(t.adjacent(0, 2));
  CHECK(t.hop_distances(0) == std::vector<int>{0, 1, 2, 3});
  CHECK(t.shortest_path(0, 3) == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(t.edge_count() == 3);
  CHECK(t.mean_degree() == doctest::Approx(1.5));

  const Topology split({{0, 0, 0}, {1, 50, 0}, {2, 500, 0}}, 100, 600, 10);
  CHECK(split.hop_distances(0)[2] == -1);
  CHECK(split.shortest_path(0, 2).empty());
  CHECK(split.components().front().size() == 2);
}

TEST_CASE("random topologies are reproducible and connected enough") {
  TopologyParams p;
  const auto a = build_topology(p, 4);
  const auto b = build_topology(p, 4);
  CHECK(a.size() == 200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.node(i).x == b.node(i).x);
    CHECK(a.node(i).x >= 0);
    CHECK(a.node(i).x <= p.area_width);
  }
  CHECK(a.components().front().size() >= p.min_component_size);
}

TEST_CASE("connection schedule") {
  CHECK(connection_duration(900, 300, 0.0) == 900);
  CHECK(connection_duration(900, 300, 1.0) == 1200);
  CHECK_THROWS(connection_duration(900, 300, 1.5));

  const auto topo = build_topology({}, 1);
  TrafficSpec spec;
  const auto conns = plan_connections(topo, spec, 3600, 9);
  REQUIRE(conns.size() >= 10);
  std::set<NodeId> sources;
  for (const auto& c : conns) {
    CHECK(topo.hop_distances(c.source)[static_cast<std::size_t>(c.destination)] == 7);
    CHECK(c.duration >= 900);
    CHECK(c.duration <= 1200);
    sources.insert(c.source);
  }
  CHECK(sources.size() == conns.size());
  CHECK(plan_connections(topo, spec, 3600, 9).size() == conns.size());
}

TEST_CASE("misbehavior plans") {
  const auto topo = build_topology({}, 1);
  MisbehaviorSpec spec;
  spec.kind = MisbehaviorKind::dropping;
  const auto p = plan_misbehavior(topo, spec, 3);
  CHECK(p.affected_nodes.size() == 27);
  CHECK(std::is_sorted(p.affected_nodes.begin(), p.affected_nodes.end()));
  CHECK(p.affects(p.affected_nodes.front()));
  CHECK(p.probability == 0.3);

  spec.kind = MisbehaviorKind::wormhole;
  spec.min_hop_separation = 8;
  const auto w = plan_misbehavior(topo, spec, 3);
  REQUIRE(w.wormholes.size() == 3);
  std::set<NodeId> ends;
  for (const auto& h : w.wormholes) {
    CHECK(topo.hop_distances(h.entry)[static_cast<std::size_t>(h.exit)] >= 8);
    ends.insert(h.entry);
    ends.insert(h.exit);
    CHECK(w.wormhole_partner(h.entry) == h.exit);
  }
  CHECK(ends.size() == 6);

  spec.min_hop_separation = 500;
  CHECK_THROWS_AS(plan_misbehavior(topo, spec, 3), InfeasibleWormholeError);

  CHECK(parse_misbehavior_kind("normal") == MisbehaviorKind::none);
  CHECK(to_string(MisbehaviorKind::delaying) == "delaying");
  CHECK_THROWS_AS(parse_misbehavior_kind("sleeping"), ConfigError);
}

TEST_CASE("trace text round trip") {
  EventTrace t;
  t.events.push_back({SimTime{1}, 0, EventKind::send, 7, 0, 0, 1, 3, 124});
  t.events.push_back({SimTime{1500000}, 1, EventKind::rrep, 9, 0, 2, 1, 2, 40});
  std::stringstream ss;
  write_trace(ss, t);
  const auto back = read_trace(ss);
  CHECK(back.events == t.events);

  std::stringstream bad(std::string(kTraceHeader) + "\n0.000001\t0\tsend\t7\t0\t0\t1\n");
  try {
    read_trace(bad);
    FAIL("expected a parse error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("a clean line delivers everything") {
  const auto topo = line(3);
  const auto conns = one_flow(0, 2, 100);
  const auto r = run_simulation(topo, conns, {}, 100, 1);
  CHECK(r.stats[0].injected == 50);
  CHECK(r.stats[0].delivered == 50);
  CHECK(r.connections[0].path == std::vector<NodeId>{0, 1, 2});
  CHECK(check_trace_invariants(r.trace, topo, r.connections).empty());
  // Node 0 overhears node 1 relaying each packet.
  std::int64_t overheard = 0;
  for (const auto& e : r.trace.events)
    overheard += e.kind == EventKind::overhear && e.observer == 0 && e.src == 1;
  CHECK(overheard == 50);
}

TEST_CASE("dropping, delaying and wormhole behaviour on a line") {
  const auto topo = line(3);
  const auto conns = one_flow(0, 2, 400);
  MisbehaviorPlan drop;
  drop.kind = MisbehaviorKind::dropping;
  drop.affected_nodes = {1};
  const auto r = run_simulation(topo, conns, drop, 400, 5);
  const double ratio = static_cast<double>(r.stats[0].delivered) / static_cast<double>(r.stats[0].injected);
  CHECK(ratio > 0.55);
  CHECK(ratio < 0.85);
  CHECK(r.stats[0].dropped() + r.stats[0].delivered == r.stats[0].injected);
  CHECK(r.stats[0].dropped_misbehavior > r.stats[0].dropped_route);

  MisbehaviorPlan worm;
  worm.kind = MisbehaviorKind::wormhole;
  worm.wormholes = {{0, 2, 0}};
  const auto w = run_simulation(topo, conns, worm, 400, 5);
  CHECK(w.stats[0].delivered == w.stats[0].injected);
  CHECK(count(w.trace, EventKind::overhear) == 0);
  CHECK(check_trace_invariants(w.trace, topo, w.connections).empty());
}

TEST_CASE("simulation is deterministic and accounts for every packet") {
  TopologyParams tp;
  tp.node_count = 80;
  tp.area_width = tp.area_height = 600;
  const auto topo = build_topology(tp, 2);
  TrafficSpec ts;
  ts.concurrent = 4;
  ts.hops = 4;
  const auto conns = plan_connections(topo, ts, 300, 3);
  MisbehaviorSpec ms;
  ms.kind = MisbehaviorKind::delaying;
  ms.node_count = 8;
  const auto plan = plan_misbehavior(topo, ms, 4);
  const auto a = run_simulation(topo, conns, plan, 300, 6);
  const auto b = run_simulation(topo, conns, plan, 300, 6);
  CHECK(a.trace.events == b.trace.events);
  CHECK(check_trace_invariants(a.trace, topo, a.connections).empty());
  for (const auto& s : a.stats) CHECK(s.delivered + s.dropped() == s.injected);
  const auto c = run_simulation(topo, conns, plan, 300, 7);
  CHECK_FALSE(c.trace.events == a.trace.events);
}

TEST_CASE("invariant checker catches broken traces") {
  const auto topo = line(3);
  const auto r = run_simulation(topo, one_flow(0, 2, 20), {}, 20, 1);
  auto t = r.trace;
  std::swap(t.events.front(), t.events.back());
  CHECK_FALSE(check_trace_invariants(t, topo, r.connections).empty());
}
