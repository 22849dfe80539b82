#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "stimnet/netsim/connection.hpp"
#include "stimnet/netsim/misbehavior.hpp"
#include "stimnet/netsim/simulator.hpp"
#include "stimnet/netsim/topology.hpp"
#include "stimnet/netsim/trace.hpp"

namespace stimnet::experiment {

/// Everything a later stage needs to know about one simulation run.
struct RunData {
  netsim::MisbehaviorKind kind = netsim::MisbehaviorKind::none;
  std::uint64_t seed = 0;
  double sim_duration = 0.0;
  std::shared_ptr<const netsim::Topology> topology;
  std::vector<netsim::Connection> connections;
  netsim::MisbehaviorPlan plan;
  std::vector<netsim::ConnectionStats> stats;
  std::vector<std::int64_t> forwarded;  // data packets relayed per node
  netsim::EventTrace trace;
};

std::string run_stem(netsim::MisbehaviorKind kind, std::uint64_t seed);
std::filesystem::path trace_path(const std::filesystem::path& dir, netsim::MisbehaviorKind kind, std::uint64_t seed);
std::filesystem::path meta_path(const std::filesystem::path& dir, netsim::MisbehaviorKind kind, std::uint64_t seed);

/// Writes the trace TSV and its JSON sidecar.
void write_run(const std::filesystem::path& dir, const RunData& run, const std::string& config_hash);
/// Sidecar only; `trace` stays empty.
RunData read_run_meta(const std::filesystem::path& dir, netsim::MisbehaviorKind kind, std::uint64_t seed,
                      std::string* config_hash = nullptr);
/// Sidecar plus trace. Throws DataError on missing or malformed files.
RunData read_run(const std::filesystem::path& dir, netsim::MisbehaviorKind kind, std::uint64_t seed,
                 std::string* config_hash = nullptr);

/// Writes through a temporary file so a crash never leaves a half file behind.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace stimnet::experiment
