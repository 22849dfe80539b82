#include "stimnet/experiment/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stimnet::experiment {

using json = nlohmann::json;
using netsim::MisbehaviorKind;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) bad(where.empty() ? k : where + "." + k, "unknown key");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw std::runtime_error("x");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw std::runtime_error("x");
      if constexpr (std::is_unsigned_v<T>)
        if (v.get<long long>() < 0) throw std::runtime_error("x");
    }
    return v.get<T>();
  } catch (...) {
    bad(path.empty() ? key : path + "." + key, "has the wrong type");
  }
}

double positive(double v, const std::string& key) {
  if (!(v > 0.0)) bad(key, "must be positive");
  return v;
}

std::uint64_t seed_of(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(key, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Config default_config() {
  Config c;
  for (std::uint64_t s = 1; s <= 20; ++s) c.experiment.seeds.push_back(s);
  c.hash = fnv1a64("{}");
  return c;
}

Config parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "",
             {"seed", "sim_duration", "node_count", "area", "radio_radius", "nodes", "connections", "hops",
              "injection_interval", "packet_size", "delta", "lambda", "misbehavior", "experiment", "mac"});
  Config c = default_config();
  c.hash = fnv1a64(text);
  auto& s = c.scenario;

  if (root.contains("seed")) s.seed = seed_of(root["seed"], "seed");
  s.sim_duration = positive(get(root, "sim_duration", "", s.sim_duration), "sim_duration");
  s.topology.node_count = get<std::size_t>(root, "node_count", "", s.topology.node_count);
  if (s.topology.node_count < 2) bad("node_count", "must be at least 2");
  if (root.contains("area")) {
    const auto& a = root["area"];
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
      bad("area", "expected [width, height] in meters");
    s.topology.area_width = positive(a[0].get<double>(), "area");
    s.topology.area_height = positive(a[1].get<double>(), "area");
  }
  s.topology.radio_radius = positive(get(root, "radio_radius", "", s.topology.radio_radius), "radio_radius");
  if (root.contains("nodes")) {
    const auto& n = root["nodes"];
    if (!n.is_array()) bad("nodes", "expected a list of [x, y] positions");
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!n[i].is_array() || n[i].size() != 2 || !n[i][0].is_number() || !n[i][1].is_number())
        bad("nodes[" + std::to_string(i) + "]", "expected [x, y]");
      s.positions.push_back({static_cast<NodeId>(i), n[i][0].get<double>(), n[i][1].get<double>()});
    }
    s.topology.node_count = s.positions.size();
    s.topology.min_component_size = std::min<std::size_t>(s.topology.min_component_size, s.positions.size());
  }

  auto& t = s.traffic;
  if (root.contains("connections")) {
    const auto& cn = root["connections"];
    if (cn.is_number_integer()) {
      t.concurrent = cn.get<int>();
      if (t.concurrent < 0) bad("connections", "must be non-negative");
    } else if (cn.is_array()) {
      for (std::size_t i = 0; i < cn.size(); ++i) {
        const std::string path = "connections[" + std::to_string(i) + "]";
        check_keys(cn[i], path, {"source", "destination", "start", "duration"});
        netsim::ExplicitConnection e;
        if (!cn[i].contains("source") || !cn[i].contains("destination"))
          bad(path, "needs source and destination");
        e.source = get<NodeId>(cn[i], "source", path, kNoNode);
        e.destination = get<NodeId>(cn[i], "destination", path, kNoNode);
        e.start_time = get(cn[i], "start", path, 0.0);
        e.duration = positive(get(cn[i], "duration", path, s.sim_duration), path + ".duration");
        t.explicit_connections.push_back(e);
      }
    } else {
      bad("connections", "expected a count or a list of connections");
    }
  }
  t.hops = get(root, "hops", "", t.hops);
  t.injection_interval = positive(get(root, "injection_interval", "", t.injection_interval), "injection_interval");
  t.packet_size = get(root, "packet_size", "", t.packet_size);
  if (t.packet_size <= 0) bad("packet_size", "must be positive");
  t.delta = get(root, "delta", "", t.delta);
  t.lambda = get(root, "lambda", "", t.lambda);
  if (t.delta < 0) bad("delta", "must be non-negative");
  if (t.lambda < 0) bad("lambda", "must be non-negative");

  if (root.contains("mac")) {
    const auto& m = root["mac"];
    check_keys(m, "mac", {"bandwidth", "rts_retry_limit", "queue_capacity", "route_lifetime"});
    auto& p = s.simulation;
    p.bandwidth_bps = positive(get(m, "bandwidth", "mac", p.bandwidth_bps), "mac.bandwidth");
    p.rts_retry_limit = get(m, "rts_retry_limit", "mac", p.rts_retry_limit);
    if (p.rts_retry_limit < 1) bad("mac.rts_retry_limit", "must be at least 1");
    p.queue_capacity = get<std::size_t>(m, "queue_capacity", "mac", p.queue_capacity);
    p.route_lifetime = positive(get(m, "route_lifetime", "mac", p.route_lifetime), "mac.route_lifetime");
  }

  if (root.contains("misbehavior")) {
    const auto& m = root["misbehavior"];
    check_keys(m, "misbehavior",
               {"kinds", "node_count", "nodes", "probability", "delay", "wormhole_count", "wormhole_separation",
                "wormholes"});
    auto& mc = s.misbehavior;
    if (m.contains("kinds")) {
      if (!m["kinds"].is_array() || m["kinds"].empty()) bad("misbehavior.kinds", "expected a non-empty list");
      mc.kinds.clear();
      for (const auto& k : m["kinds"]) {
        if (!k.is_string()) bad("misbehavior.kinds", "expected kind names");
        try {
          mc.kinds.push_back(netsim::parse_misbehavior_kind(k.get<std::string>()));
        } catch (const ConfigError&) {
          bad("misbehavior.kinds", "unknown kind '" + k.get<std::string>() + "'");
        }
      }
    }
    mc.node_count = get(m, "node_count", "misbehavior", mc.node_count);
    if (mc.node_count < 0) bad("misbehavior.node_count", "must be non-negative");
    if (m.contains("nodes")) mc.nodes = get<std::vector<NodeId>>(m, "nodes", "misbehavior", {});
    mc.probability = get(m, "probability", "misbehavior", mc.probability);
    if (!(mc.probability >= 0.0 && mc.probability <= 1.0)) bad("misbehavior.probability", "must lie in [0, 1]");
    mc.delay = get(m, "delay", "misbehavior", mc.delay);
    if (mc.delay < 0) bad("misbehavior.delay", "must be non-negative");
    mc.wormhole_count = get(m, "wormhole_count", "misbehavior", mc.wormhole_count);
    mc.wormhole_separation = get(m, "wormhole_separation", "misbehavior", mc.wormhole_separation);
    if (m.contains("wormholes")) {
      const auto& w = m["wormholes"];
      if (!w.is_array()) bad("misbehavior.wormholes", "expected a list of [entry, exit] pairs");
      for (const auto& pair : w) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
          bad("misbehavior.wormholes", "expected [entry, exit]");
        mc.wormholes.push_back({pair[0].get<NodeId>(), pair[1].get<NodeId>(), 0});
      }
    }
  }

  if (root.contains("experiment")) {
    const auto& e = root["experiment"];
    check_keys(e, "experiment",
               {"window_sizes", "monitor_count", "n_folds", "seeds", "min_class_samples", "min_leaf", "max_depth"});
    auto& x = c.experiment;
    if (e.contains("window_sizes")) {
      x.window_sizes = get<std::vector<double>>(e, "window_sizes", "experiment", {});
      if (x.window_sizes.empty()) bad("experiment.window_sizes", "must not be empty");
      for (double w : x.window_sizes) positive(w, "experiment.window_sizes");
    }
    x.monitor_count = get<std::size_t>(e, "monitor_count", "experiment", x.monitor_count);
    if (x.monitor_count == 0) bad("experiment.monitor_count", "must be at least 1");
    x.n_folds = get(e, "n_folds", "experiment", x.n_folds);
    if (x.n_folds < 2) bad("experiment.n_folds", "must be at least 2");
    if (e.contains("seeds")) {
      if (!e["seeds"].is_array() || e["seeds"].empty()) bad("experiment.seeds", "expected a non-empty list");
      x.seeds.clear();
      for (const auto& v : e["seeds"]) x.seeds.push_back(seed_of(v, "experiment.seeds"));
    }
    x.min_class_samples = get<std::size_t>(e, "min_class_samples", "experiment", x.min_class_samples);
    x.tree.min_leaf = get<std::size_t>(e, "min_leaf", "experiment", x.tree.min_leaf);
    x.tree.max_depth = get<std::size_t>(e, "max_depth", "experiment", x.tree.max_depth);
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = text.substr(start, comma - start);
    const auto dash = item.find('-');
    auto num = [&](std::string_view s) {
      auto v = parse_integer(s);
      if (!v || *v < 0) throw ConfigError("bad seed '" + std::string(s) + "' in --seeds");
      return static_cast<std::uint64_t>(*v);
    };
    if (dash == std::string_view::npos) {
      out.push_back(num(item));
    } else {
      const auto lo = num(item.substr(0, dash));
      const auto hi = num(item.substr(dash + 1));
      if (hi < lo) throw ConfigError("bad seed range '" + std::string(item) + "'");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    }
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("seed list is empty");
  return out;
}

std::vector<double> parse_window_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = text.substr(start, comma - start);
    auto v = parse_double(item);
    if (!v || !(*v > 0)) throw ConfigError("bad window size '" + std::string(item) + "'");
    out.push_back(*v);
    start = comma + 1;
  }
  return out;
}

std::shared_ptr<const netsim::Topology> make_topology(const Scenario& s) {
  if (!s.positions.empty())
    return std::make_shared<netsim::Topology>(s.positions, s.topology.radio_radius, s.topology.area_width,
                                              s.topology.area_height);
  return std::make_shared<netsim::Topology>(netsim::build_topology(s.topology, s.seed));
}

netsim::MisbehaviorPlan make_plan(const Scenario& s, const netsim::Topology& topology, MisbehaviorKind kind,
                                  std::uint64_t run_seed) {
  const auto& mc = s.misbehavior;
  netsim::MisbehaviorSpec spec;
  spec.kind = kind;
  spec.node_count = mc.node_count;
  spec.probability = mc.probability;
  spec.delay = mc.delay;
  spec.wormhole_count = mc.wormhole_count;
  spec.min_hop_separation = mc.wormhole_separation;

  const bool fixed_nodes = (kind == MisbehaviorKind::dropping || kind == MisbehaviorKind::delaying) && !mc.nodes.empty();
  const bool fixed_wormholes = kind == MisbehaviorKind::wormhole && !mc.wormholes.empty();
  if (!fixed_nodes && !fixed_wormholes)
    return netsim::plan_misbehavior(topology, spec, mix_seed(run_seed, 0x20 + static_cast<std::uint64_t>(kind)));

  netsim::MisbehaviorPlan plan;
  plan.kind = kind;
  plan.probability = mc.probability;
  plan.delay = mc.delay;
  if (fixed_nodes) {
    std::set<NodeId> nodes(mc.nodes.begin(), mc.nodes.end());
    plan.affected_nodes.assign(nodes.begin(), nodes.end());
  } else {
    plan.wormholes = mc.wormholes;
  }
  plan.validate(topology);
  return plan;
}

std::vector<netsim::Connection> make_connections(const Scenario& s, const netsim::Topology& topology,
                                                 std::uint64_t run_seed) {
  return netsim::plan_connections(topology, s.traffic, s.sim_duration, mix_seed(run_seed, 0x10));
}

}  // namespace stimnet::experiment
