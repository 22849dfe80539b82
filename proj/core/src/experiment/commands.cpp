#include "stimnet/experiment/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "stimnet/experiment/pipeline.hpp"
#include "stimnet/experiment/reports.hpp"
#include "stimnet/experiment/run_io.hpp"
#include "stimnet/experiment/scenario.hpp"
#include "stimnet/learn/decision_tree.hpp"

namespace stimnet::experiment {

namespace fs = std::filesystem;
using json = nlohmann::json;
using features::DatasetKind;

namespace {

Config config_of(const CommandOptions& opt) {
  Config c = opt.config_path.empty() ? default_config() : load_config(opt.config_path);
  if (!opt.seeds.empty()) c.experiment.seeds = parse_seed_list(opt.seeds);
  if (opt.window) {
    if (!(*opt.window > 0)) throw ConfigError("--window must be positive");
    c.experiment.window_sizes = {*opt.window};
  }
  return c;
}

fs::path traces_dir(const CommandOptions& o) { return fs::path(o.out) / "traces"; }
fs::path reports_dir(const CommandOptions& o) { return fs::path(o.out) / "reports"; }
fs::path window_dir(const CommandOptions& o, double w) {
  return fs::path(o.out) / "datasets" / ("w" + format_double(w));
}

json read_json(const fs::path& path, const std::string& produced_by) {
  if (!fs::exists(path)) throw DataError("'" + path.string() + "' not found; run '" + produced_by + "' first");
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError("malformed '" + path.string() + "': " + e.what());
  }
}

/// Seeds recorded by an earlier stage, after checking the config matches.
std::vector<std::uint64_t> stage_seeds(const json& manifest, const Config& c, const fs::path& path) {
  try {
    const auto hash = manifest.at("config_hash").get<std::string>();
    if (hash != c.hash_hex())
      throw ConfigError("config hash " + c.hash_hex() + " differs from " + hash + " recorded in '" + path.string() + "'");
    return manifest.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw DataError("malformed '" + path.string() + "': " + e.what());
  }
}

std::vector<netsim::MisbehaviorKind> manifest_kinds(const json& manifest, const fs::path& path) {
  std::vector<netsim::MisbehaviorKind> out;
  try {
    for (const auto& k : manifest.at("kinds")) out.push_back(netsim::parse_misbehavior_kind(k.get<std::string>()));
  } catch (const std::exception& e) {
    throw DataError("malformed '" + path.string() + "': " + e.what());
  }
  return out;
}

features::DatasetTable load_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  try {
    return features::read_dataset(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string table_name(NodeId node, DatasetKind kind) {
  return "node" + std::to_string(node) + "_" + std::string(features::to_string(kind)) + ".tsv";
}

struct Extracted {
  std::vector<std::uint64_t> seeds;
  std::vector<NodeId> monitors;
};

Extracted read_extract_manifest(const CommandOptions& opt, const Config& c, double w) {
  const auto path = window_dir(opt, w) / "extract.json";
  const auto m = read_json(path, "extract");
  Extracted e;
  e.seeds = stage_seeds(m, c, path);
  try {
    e.monitors = m.at("monitors").get<std::vector<NodeId>>();
  } catch (const json::exception& ex) {
    throw DataError("malformed '" + path.string() + "': " + ex.what());
  }
  return e;
}

void warn_all(std::ostream& log, std::string& report, NodeId node, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) {
    log << "warning: node " << node << ": " << w << '\n';
    report += "# warning node " + std::to_string(node) + ": " + w + "\n";
  }
}

void write_model(const fs::path& path, const features::DatasetTable& table, const learn::SelectionResult& sel,
                 const ExperimentConfig& x) {
  const auto keep = usable_rows(table_labels(table), x.min_class_samples);
  const auto data = to_dataset(table, keep);
  const learn::PresortedDataset sorted(data);
  const auto tree = learn::train_tree(sorted, std::vector<char>(data.rows(), 1), sel.selected, x.tree);
  std::ostringstream out;
  tree.write(out);
  write_text_file(path, out.str());
}

}  // namespace

void cmd_simulate(const CommandOptions& opt, std::ostream& log) {
  const Config c = config_of(opt);
  const auto topology = make_topology(c.scenario);
  const auto dir = traces_dir(opt);
  json kinds = json::array();
  for (auto k : c.scenario.misbehavior.kinds) kinds.push_back(std::string(netsim::to_string(k)));
  for (auto seed : c.experiment.seeds) {
    for (auto kind : c.scenario.misbehavior.kinds) {
      const auto run = simulate_run(c, topology, kind, seed);
      write_run(dir, run, c.hash_hex());
      std::int64_t injected = 0, delivered = 0;
      for (const auto& s : run.stats) {
        injected += s.injected;
        delivered += s.delivered;
      }
      log << "simulate: " << run_stem(kind, seed) << " events=" << run.trace.events.size()
          << " delivered=" << delivered << "/" << injected << '\n';
    }
  }
  json manifest{{"config_hash", c.hash_hex()}, {"seeds", c.experiment.seeds}, {"kinds", kinds}};
  write_text_file(fs::path(opt.out) / "manifest.json", manifest.dump(1) + "\n");
}

void cmd_extract(const CommandOptions& opt, std::ostream& log) {
  Config c = config_of(opt);
  const auto mpath = fs::path(opt.out) / "manifest.json";
  const auto manifest = read_json(mpath, "simulate");
  const auto recorded = stage_seeds(manifest, c, mpath);
  if (opt.seeds.empty()) c.experiment.seeds = recorded;
  const auto kinds = manifest_kinds(manifest, mpath);
  const auto dir = traces_dir(opt);

  std::vector<std::int64_t> forwarded;
  std::shared_ptr<const netsim::Topology> topology;
  for (auto seed : c.experiment.seeds)
    for (auto kind : kinds) {
      const auto meta = read_run_meta(dir, kind, seed);
      if (!topology) topology = meta.topology;
      forwarded.resize(meta.forwarded.size(), 0);
      for (std::size_t i = 0; i < meta.forwarded.size(); ++i) forwarded[i] += meta.forwarded[i];
    }
  std::vector<std::string> warnings;
  const auto monitors = choose_monitors(forwarded, *topology, c.experiment.monitor_count, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << '\n';

  const std::vector<DatasetKind> table_kinds = {DatasetKind::f0, DatasetKind::F0, DatasetKind::F1, DatasetKind::F2};
  std::vector<WindowData> windows;
  for (double w : c.experiment.window_sizes) windows.push_back({w, {}});
  for (auto seed : c.experiment.seeds)
    for (auto kind : kinds) {
      const auto run = read_run(dir, kind, seed);
      for (auto& wd : windows) extract_run(c, run, monitors, table_kinds, wd);
      log << "extract: " << run_stem(kind, seed) << '\n';
    }

  for (const auto& wd : windows) {
    const auto wdir = window_dir(opt, wd.window);
    std::string mon = "node\tforwarded\tdegree\n";
    std::string exc = "node\tno_traffic\tno_watchdog\tno_downstream\trows\n";
    for (const auto& nt : wd.nodes) {
      mon += std::to_string(nt.node) + '\t' + std::to_string(forwarded[static_cast<std::size_t>(nt.node)]) + '\t' +
             std::to_string(topology->degree(nt.node)) + '\n';
      exc += std::to_string(nt.node) + '\t' + std::to_string(nt.excluded.no_traffic) + '\t' +
             std::to_string(nt.excluded.no_watchdog) + '\t' + std::to_string(nt.excluded.no_downstream) + '\t' +
             std::to_string(nt.tables.at(DatasetKind::f0).rows.size()) + '\n';
      for (const auto& [kind, table] : nt.tables) {
        std::ostringstream out;
        features::write_dataset(out, table);
        write_text_file(wdir / table_name(nt.node, kind), out.str());
      }
    }
    write_text_file(wdir / "monitors.tsv", mon);
    write_text_file(wdir / "exclusions.tsv", exc);
    json m{{"config_hash", c.hash_hex()}, {"seeds", c.experiment.seeds}, {"window", wd.window}, {"monitors", monitors}};
    write_text_file(wdir / "extract.json", m.dump(1) + "\n");
    log << "extract: window " << format_double(wd.window) << " s, " << wd.nodes.size() << " monitors\n";
  }
}

void cmd_train(const CommandOptions& opt, std::ostream& log) {
  const Config c = config_of(opt);
  const auto kind = features::parse_dataset_kind(opt.mode);
  const std::string block = "K(" + std::string(features::to_string(kind)) + ")";
  std::vector<std::pair<double, BlockSummary>> summaries;
  std::vector<std::pair<double, std::vector<double>>> weights;
  std::vector<std::string> feature_names;
  std::vector<std::uint64_t> seeds;
  std::string warnings;
  std::string per_node = "window_s\tnode\trows\tfolds\tselected\tresidual_error\n";

  for (double w : c.experiment.window_sizes) {
    const auto ex = read_extract_manifest(opt, c, w);
    seeds = ex.seeds;
    std::vector<learn::Metrics> metrics;
    std::vector<std::vector<double>> node_weights;
    for (NodeId node : ex.monitors) {
      const auto table = load_table(window_dir(opt, w) / table_name(node, kind));
      if (feature_names.empty()) feature_names = table.feature_names;
      const auto ev = evaluate_single(table, c.experiment, fold_seed(c, w, node));
      if (!ev) {
        warn_all(log, warnings, node, {"skipped at window " + format_double(w) + ": fewer than two usable classes"});
        continue;
      }
      warn_all(log, warnings, node, ev->warnings);
      metrics.push_back(ev->metrics);
      node_weights.push_back(ev->selection.weights);
      std::string sel;
      for (auto f : ev->selection.selected) sel += (sel.empty() ? "" : ",") + table.feature_names[f];
      per_node += format_double(w) + '\t' + std::to_string(node) + '\t' + std::to_string(ev->rows) + '\t' +
                  std::to_string(ev->folds) + '\t' + (sel.empty() ? "-" : sel) + '\t' +
                  pct(ev->selection.residual_error() * 100.0) + '\n';
      write_model(fs::path(opt.out) / "models" / ("w" + format_double(w)) /
                      ("node" + std::to_string(node) + "_" + std::string(features::to_string(kind)) + ".tree"),
                  table, ev->selection, c.experiment);
    }
    summaries.emplace_back(w, summarize(metrics));
    weights.emplace_back(w, learn::aggregate_weights(node_weights));
    log << "train: " << block << " window " << format_double(w) << " s, " << metrics.size() << " nodes\n";
  }

  const std::string name = "train_" + std::string(features::to_string(kind));
  std::string report = report_header(block + " detection and false-positive rates", c.hash_hex(), seeds);
  report += warnings;
  report += std::string(kMetricsColumns) + '\n' + metrics_rows(block, summaries);
  report += "\nblock\twindow_s\tclass_error\tclass_error_ci95\n" + error_rows(block, summaries);
  report += "\n" + per_node;
  write_text_file(reports_dir(opt) / (name + ".tsv"), report);
  write_text_file(reports_dir(opt) / ("weights_" + std::string(features::to_string(kind)) + ".tsv"),
                  report_header(block + " feature weights (>= 0.25)", c.hash_hex(), seeds) +
                      "window_s\tfeature\tweight\n" + weight_rows(weights, feature_names));
}

void cmd_cascade(const CommandOptions& opt, std::ostream& log) {
  const Config c = config_of(opt);
  std::vector<std::pair<double, BlockSummary>> s1, s2, sc;
  std::vector<CascadeWindowSummary> summary;
  std::vector<std::uint64_t> seeds;
  std::string warnings;
  for (double w : c.experiment.window_sizes) {
    const auto ex = read_extract_manifest(opt, c, w);
    seeds = ex.seeds;
    std::vector<learn::Metrics> m1, m2, mc;
    double inv = 0.0, inv_normal = 0.0;
    for (NodeId node : ex.monitors) {
      const auto f2 = load_table(window_dir(opt, w) / table_name(node, DatasetKind::F2));
      const auto f0 = load_table(window_dir(opt, w) / table_name(node, DatasetKind::f0));
      const auto ev = evaluate_cascade(f2, f0, c.experiment, fold_seed(c, w, node));
      if (!ev) {
        warn_all(log, warnings, node, {"skipped at window " + format_double(w) + ": fewer than two usable classes"});
        continue;
      }
      warn_all(log, warnings, node, ev->stage1.warnings);
      m1.push_back(ev->stage1.metrics);
      m2.push_back(ev->stage2.metrics);
      mc.push_back(ev->cascade);
      inv += ev->invocation_rate();
      inv_normal += ev->normal_invocation_rate();
    }
    s1.emplace_back(w, summarize(m1));
    s2.emplace_back(w, summarize(m2));
    sc.emplace_back(w, summarize(mc));
    const double n = static_cast<double>(std::max<std::size_t>(mc.size(), 1));
    const auto& any = s1.back().second.any_misbehavior;
    summary.push_back({w, any ? any->fp.mean : 0.0, 100.0 * inv / n, 100.0 * inv_normal / n});
    log << "cascade: window " << format_double(w) << " s, " << mc.size() << " nodes\n";
  }
  std::string report = report_header("co-stimulation cascade: K(F2), K(f0) and K(F2)->K(f0)", c.hash_hex(), seeds);
  report += warnings;
  report += std::string(kMetricsColumns) + '\n' + metrics_rows("K(F2)", s1) + metrics_rows("K(f0)", s2) +
            metrics_rows("K(F2)->K(f0)", sc);
  report += "\nblock\twindow_s\tclass_error\tclass_error_ci95\n" + error_rows("K(F2)", s1) + error_rows("K(f0)", s2) +
            error_rows("K(F2)->K(f0)", sc);
  report += "\n" + cascade_summary_rows(summary);
  write_text_file(reports_dir(opt) / "cascade.tsv", report);
  write_text_file(reports_dir(opt) / "cascade_summary.tsv",
                  report_header("cascade stage-2 invocation", c.hash_hex(), seeds) + cascade_summary_rows(summary));
}

void cmd_energy(const CommandOptions& opt, std::ostream& log) {
  energy::EnergyParams p;
  std::vector<std::pair<double, double>> window_fp;
  std::string header;
  double duration = 3600.0;
  if (opt.fp_source == "paper") {
    for (std::size_t i = 0; i < energy::kPublishedWindows.size(); ++i)
      window_fp.emplace_back(energy::kPublishedWindows[i], energy::kPublishedFpRates[i]);
    header = "# energy trade-off, published stage-1 FP rates\n# config_hash " + config_of(opt).hash_hex() +
             "\n# seeds none\n";
  } else if (opt.fp_source == "measured") {
    const Config c = config_of(opt);
    duration = c.scenario.sim_duration;
    const auto path = reports_dir(opt) / "cascade_summary.tsv";
    if (!fs::exists(path)) throw DataError("measured mode needs '" + path.string() + "'; run 'cascade' first");
    const std::string text = read_text_file(path);
    const auto hash_line = "# config_hash " + c.hash_hex() + "\n";
    if (text.find(hash_line) == std::string::npos)
      throw ConfigError("cascade summary was produced with a different config");
    std::string seeds_line;
    if (auto at = text.find("# seeds "); at != std::string::npos) seeds_line = text.substr(at, text.find('\n', at) - at + 1);
    for (const auto& r : parse_cascade_summary(text)) window_fp.emplace_back(r.window, r.stage1_any_fp / 100.0);
    header = "# energy trade-off, measured K(F2) any-misbehavior FP rates\n" + hash_line + seeds_line;
  } else {
    throw ConfigError("--fp-source must be 'paper' or 'measured'");
  }
  const auto rows = energy_table(window_fp, p);
  const std::string be = breakeven_line(p);
  std::string report = header + "# n=" + format_double(p.injection_rate * energy::kStage2Window) +
                       " packets, size_data=" + format_double(p.size_data) + " B, size_f2=" + format_double(p.size_f2) +
                       " B\n# breakeven " + be + "\n" + energy_rows(rows);
  write_text_file(reports_dir(opt) / ("energy_" + opt.fp_source + ".tsv"), report);
  write_text_file(reports_dir(opt) / ("energy_accumulated_" + opt.fp_source + ".tsv"),
                  header + accumulation_rows(window_fp, duration, p));
  write_text_file(reports_dir(opt) / "energy_vs_fp.tsv", energy_vs_fp_rows(p));
  log << energy_rows(rows) << "breakeven " << be << '\n';
}

void cmd_report(const CommandOptions& opt, std::ostream& log) {
  const auto dir = reports_dir(opt);
  const char* order[] = {"train_f0.tsv", "train_F0.tsv", "train_F1.tsv",  "train_F2.tsv",
                         "weights_f0.tsv", "weights_F0.tsv", "weights_F1.tsv", "weights_F2.tsv",
                         "cascade.tsv",  "energy_paper.tsv", "energy_measured.tsv"};
  std::string out;
  for (const char* name : order) {
    const auto path = dir / name;
    if (!fs::exists(path)) continue;
    out += "## " + std::string(name) + "\n" + read_text_file(path) + "\n";
  }
  if (out.empty()) throw DataError("no reports under '" + dir.string() + "'");
  write_text_file(dir / "summary.txt", out);
  log << out;
}

}  // namespace stimnet::experiment
