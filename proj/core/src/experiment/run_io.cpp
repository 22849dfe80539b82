#include "stimnet/experiment/run_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stimnet::experiment {

namespace fs = std::filesystem;
using json = nlohmann::json;
using netsim::MisbehaviorKind;

std::string run_stem(MisbehaviorKind kind, std::uint64_t seed) {
  return std::string(netsim::to_string(kind)) + "_seed" + std::to_string(seed);
}

fs::path trace_path(const fs::path& dir, MisbehaviorKind kind, std::uint64_t seed) {
  return dir / ("trace_" + run_stem(kind, seed) + ".tsv");
}

fs::path meta_path(const fs::path& dir, MisbehaviorKind kind, std::uint64_t seed) {
  return dir / ("trace_" + run_stem(kind, seed) + ".json");
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_run(const fs::path& dir, const RunData& run, const std::string& config_hash) {
  json meta;
  meta["kind"] = std::string(netsim::to_string(run.kind));
  meta["seed"] = run.seed;
  meta["config_hash"] = config_hash;
  meta["sim_duration"] = run.sim_duration;
  const auto& t = *run.topology;
  meta["radio_radius"] = t.radio_radius();
  meta["area"] = {t.area_width(), t.area_height()};
  json nodes = json::array();
  for (const auto& n : t.nodes()) nodes.push_back({n.x, n.y});
  meta["nodes"] = std::move(nodes);

  json conns = json::array();
  for (std::size_t i = 0; i < run.connections.size(); ++i) {
    const auto& c = run.connections[i];
    json j{{"id", c.id},
           {"source", c.source},
           {"destination", c.destination},
           {"path", c.path},
           {"start", c.start_time},
           {"duration", c.duration},
           {"injection_interval", c.injection_interval},
           {"packet_size", c.packet_size}};
    if (i < run.stats.size()) {
      const auto& s = run.stats[i];
      j["stats"] = {{"injected", s.injected},         {"delivered", s.delivered},
                    {"dropped_misbehavior", s.dropped_misbehavior}, {"dropped_queue", s.dropped_queue},
                    {"dropped_route", s.dropped_route}, {"dropped_mac", s.dropped_mac}};
    }
    conns.push_back(std::move(j));
  }
  meta["connections"] = std::move(conns);

  json plan{{"kind", std::string(netsim::to_string(run.plan.kind))},
            {"affected_nodes", run.plan.affected_nodes},
            {"probability", run.plan.probability},
            {"delay", run.plan.delay}};
  json worms = json::array();
  for (const auto& w : run.plan.wormholes) worms.push_back({w.entry, w.exit, w.min_hop_separation});
  plan["wormholes"] = std::move(worms);
  meta["plan"] = std::move(plan);
  meta["forwarded"] = run.forwarded;

  std::ostringstream trace;
  netsim::write_trace(trace, run.trace);
  write_text_file(trace_path(dir, run.kind, run.seed), trace.str());
  write_text_file(meta_path(dir, run.kind, run.seed), meta.dump(1) + "\n");
}

RunData read_run_meta(const fs::path& dir, MisbehaviorKind kind, std::uint64_t seed, std::string* config_hash) {
  const auto path = meta_path(dir, kind, seed);
  RunData run;
  try {
    const json meta = json::parse(read_text_file(path));
    run.kind = netsim::parse_misbehavior_kind(meta.at("kind").get<std::string>());
    run.seed = meta.at("seed").get<std::uint64_t>();
    if (run.kind != kind || run.seed != seed) throw DataError("sidecar describes a different run");
    run.sim_duration = meta.at("sim_duration").get<double>();
    if (config_hash) *config_hash = meta.at("config_hash").get<std::string>();
    std::vector<netsim::NodePosition> nodes;
    for (const auto& n : meta.at("nodes"))
      nodes.push_back({static_cast<NodeId>(nodes.size()), n.at(0).get<double>(), n.at(1).get<double>()});
    run.topology = std::make_shared<netsim::Topology>(std::move(nodes), meta.at("radio_radius").get<double>(),
                                                      meta.at("area").at(0).get<double>(),
                                                      meta.at("area").at(1).get<double>());
    for (const auto& j : meta.at("connections")) {
      netsim::Connection c;
      c.id = j.at("id").get<ConnectionId>();
      c.source = j.at("source").get<NodeId>();
      c.destination = j.at("destination").get<NodeId>();
      c.path = j.at("path").get<std::vector<NodeId>>();
      c.start_time = j.at("start").get<double>();
      c.duration = j.at("duration").get<double>();
      c.injection_interval = j.at("injection_interval").get<double>();
      c.packet_size = j.at("packet_size").get<int>();
      run.connections.push_back(std::move(c));
      netsim::ConnectionStats s;
      if (j.contains("stats")) {
        const auto& js = j["stats"];
        s.injected = js.at("injected").get<std::int64_t>();
        s.delivered = js.at("delivered").get<std::int64_t>();
        s.dropped_misbehavior = js.at("dropped_misbehavior").get<std::int64_t>();
        s.dropped_queue = js.at("dropped_queue").get<std::int64_t>();
        s.dropped_route = js.at("dropped_route").get<std::int64_t>();
        s.dropped_mac = js.at("dropped_mac").get<std::int64_t>();
      }
      run.stats.push_back(s);
    }
    const auto& p = meta.at("plan");
    run.plan.kind = netsim::parse_misbehavior_kind(p.at("kind").get<std::string>());
    run.plan.affected_nodes = p.at("affected_nodes").get<std::vector<NodeId>>();
    run.plan.probability = p.at("probability").get<double>();
    run.plan.delay = p.at("delay").get<double>();
    for (const auto& w : p.at("wormholes"))
      run.plan.wormholes.push_back({w.at(0).get<NodeId>(), w.at(1).get<NodeId>(), w.at(2).get<int>()});
    run.forwarded = meta.at("forwarded").get<std::vector<std::int64_t>>();
  } catch (const json::exception& e) {
    throw DataError("malformed run metadata '" + path.string() + "': " + e.what());
  } catch (const ConfigError& e) {
    throw DataError("malformed run metadata '" + path.string() + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (run.forwarded.size() != run.topology->size())
    throw DataError("malformed run metadata '" + path.string() + "': forwarded counts do not match node count");
  return run;
}

RunData read_run(const fs::path& dir, MisbehaviorKind kind, std::uint64_t seed, std::string* config_hash) {
  RunData run = read_run_meta(dir, kind, seed, config_hash);
  const auto path = trace_path(dir, kind, seed);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open trace '" + path.string() + "'");
  try {
    run.trace = netsim::read_trace(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return run;
}

}  // namespace stimnet::experiment
