#include <filesystem>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "stimnet/experiment/commands.hpp"
#include "stimnet/experiment/pipeline.hpp"
#include "stimnet/experiment/reports.hpp"
#include "stimnet/experiment/scenario.hpp"

using namespace stimnet;
using namespace stimnet::experiment;
namespace fs = std::filesystem;

namespace {

std::string config_file(const char* name) { return std::string(STIMNET_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("stimnet_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const auto d = default_config();
  CHECK(d.scenario.topology.node_count == 200);
  CHECK(d.experiment.seeds.size() == 20);
  CHECK(d.experiment.window_sizes == std::vector<double>{50, 100, 250, 500});
  CHECK(d.experiment.n_folds == 20);

  const auto c = parse_config(R"({"node_count": 50, "misbehavior": {"kinds": ["normal", "dropping"]},
                                  "experiment": {"seeds": [3, 4]}})");
  CHECK(c.scenario.topology.node_count == 50);
  CHECK(c.scenario.misbehavior.kinds.size() == 2);
  CHECK(c.experiment.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.hash_hex().size() == 16);
  CHECK(parse_config("{}").hash != c.hash);

  CHECK(error_of(R"({"radio_radius": "far"})").find("radio_radius") != std::string::npos);
  CHECK(error_of(R"({"misbehavior": {"probabilty": 0.3}})").find("misbehavior.probabilty") != std::string::npos);
  CHECK(error_of(R"({"misbehavior": {"kinds": ["gossip"]}})").find("misbehavior.kinds") != std::string::npos);
  CHECK(error_of(R"({"experiment": {"window_sizes": [50, -1]}})").find("experiment.window_sizes") !=
        std::string::npos);
  CHECK(error_of(R"({"experiment": {"seeds": []}})").find("experiment.seeds") != std::string::npos);
  CHECK(error_of(R"({"connections": [{"source": 0}]})").find("connections[0]") != std::string::npos);
  CHECK_FALSE(error_of("{").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("seed and window lists") {
  CHECK(parse_seed_list("1-3,7") == std::vector<std::uint64_t>{1, 2, 3, 7});
  CHECK(parse_seed_list("5") == std::vector<std::uint64_t>{5});
  CHECK_THROWS_AS(parse_seed_list("3-1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("a"), ConfigError);
  CHECK(parse_window_list("50,500") == std::vector<double>{50, 500});
  CHECK_THROWS_AS(parse_window_list("0"), ConfigError);
}

TEST_CASE("rare classes are dropped before training") {
  std::vector<std::string> warnings;
  const auto keep = usable_rows({0, 0, 0, 1, 2, 2, 2}, 3, &warnings);
  CHECK(keep == std::vector<char>{1, 1, 1, 0, 1, 1, 1});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("dropping") != std::string::npos);
}

TEST_CASE("summaries across nodes") {
  learn::Metrics a = learn::evaluate(std::vector<int>{0, 1, 1}, std::vector<int>{0, 1, 0}, kClassCount);
  learn::Metrics b = learn::evaluate(std::vector<int>{0, 1, 0}, std::vector<int>{0, 1, 1}, kClassCount);
  const auto one = summarize({a});
  REQUIRE(one.per_class[1].has_value());
  CHECK(one.per_class[1]->nodes == 1);
  CHECK(std::isnan(one.per_class[1]->detection.halfwidth));
  CHECK_FALSE(one.per_class[2].has_value());
  const auto two = summarize({a, b});
  CHECK(two.per_class[1]->detection.mean == doctest::Approx(75.0));
  const auto text = metrics_rows("K(f0)", {{50.0, one}});
  CHECK(text.find("K(f0)\t50\tdropping\t1\t100.00\tn/a\t50.00\tn/a") != std::string::npos);
  CHECK(text.find("K(f0)\t50\twormhole\t0\tn/a") != std::string::npos);
}

TEST_CASE("cascade summary round trip") {
  const std::vector<CascadeWindowSummary> rows{{50, 3.55, 2.5, 1.25}, {500, 15.09, 9.0, 4.0}};
  const auto back = parse_cascade_summary("# comment\n" + cascade_summary_rows(rows));
  REQUIRE(back.size() == 2);
  CHECK(back[1].window == 500);
  CHECK(back[1].stage1_any_fp == 15.09);
  CHECK_THROWS_AS(parse_cascade_summary("window_s\tx\n"), DataError);
}

TEST_CASE("energy table for the published rates") {
  std::vector<std::pair<double, double>> in;
  for (std::size_t i = 0; i < 4; ++i) in.emplace_back(energy::kPublishedWindows[i], energy::kPublishedFpRates[i]);
  const auto text = energy_rows(energy_table(in, {}));
  CHECK(text.find("50\t3.55\t2.33\t23.29\t82.73") != std::string::npos);
  CHECK(text.find("500\t15.09\t3.89\t3.89\t97.12") != std::string::npos);
  CHECK(breakeven_line({}) == "n=3.431, window=6.86 s");
}

TEST_CASE("pipeline on a five-node line") {
  const auto cfg = load_config(config_file("line5.json"));
  const auto topo = make_topology(cfg.scenario);
  CHECK(topo->size() == 5);
  std::vector<RunData> runs;
  std::vector<std::int64_t> fwd(5);
  for (auto k : cfg.scenario.misbehavior.kinds) {
    runs.push_back(simulate_run(cfg, topo, k, 1));
    for (std::size_t i = 0; i < 5; ++i) fwd[i] += runs.back().forwarded[i];
  }
  CHECK(fwd[0] == 0);
  CHECK(fwd[4] == 0);
  const auto monitors = choose_monitors(fwd, *topo, 2);
  REQUIRE(monitors.size() == 2);
  WindowData wd{10, {}};
  for (const auto& r : runs) extract_run(cfg, r, monitors, {features::DatasetKind::f0, features::DatasetKind::F2}, wd);
  const auto it = std::find_if(wd.nodes.begin(), wd.nodes.end(), [](const NodeTables& n) { return n.node == 1; });
  REQUIRE(it != wd.nodes.end());
  const auto& f0 = it->tables.at(features::DatasetKind::f0);
  CHECK(f0.rows.size() == it->tables.at(features::DatasetKind::F2).rows.size());
  std::set<features::Label> labels;
  for (const auto& r : f0.rows) labels.insert(r.label);
  CHECK(labels.size() == 4);

  auto x = cfg.experiment;
  x.min_class_samples = 2;
  const auto single = evaluate_single(f0, x, 1);
  REQUIRE(single.has_value());
  CHECK(single->metrics.confusion.total() == single->rows);
  const auto cascade = evaluate_cascade(it->tables.at(features::DatasetKind::F2), f0, x, 1);
  REQUIRE(cascade.has_value());
  CHECK(cascade->cascade.confusion.total() == cascade->stage1.rows);
  CHECK(cascade->stage2.metrics.confusion == evaluate_single(f0, x, 1)->metrics.confusion);
}

TEST_CASE("stages are reproducible and communicate through files") {
  const auto a = scratch("a"), b = scratch("b");
  std::ostringstream log;
  for (const auto& dir : {a, b}) {
    CommandOptions o;
    o.config_path = config_file("line5.json");
    o.out = dir.string();
    cmd_simulate(o, log);
    cmd_extract(o, log);
    o.mode = "F2";
    cmd_train(o, log);
    cmd_cascade(o, log);
    o.fp_source = "measured";
    cmd_energy(o, log);
    o.fp_source = "paper";
    cmd_energy(o, log);
    cmd_report(o, log);
  }
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto other = b / fs::relative(e.path(), a);
    REQUIRE(fs::exists(other));
    CHECK_MESSAGE(read_text_file(e.path()) == read_text_file(other), e.path().string());
  }
  CHECK(files > 20);
  const auto report = read_text_file(a / "reports" / "summary.txt");
  CHECK(report.find("# config_hash " + load_config(config_file("line5.json")).hash_hex()) != std::string::npos);
  CHECK(report.find("# seeds 1,2") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("stage errors") {
  const auto dir = scratch("err");
  std::ostringstream log;
  CommandOptions o;
  o.config_path = config_file("line5.json");
  o.out = dir.string();
  CHECK_THROWS_AS(cmd_extract(o, log), DataError);
  CHECK_THROWS_AS(cmd_report(o, log), DataError);
  o.fp_source = "measured";
  CHECK_THROWS_AS(cmd_energy(o, log), DataError);
  o.fp_source = "guess";
  CHECK_THROWS_AS(cmd_energy(o, log), ConfigError);

  o.fp_source = "paper";
  o.seeds = "1";
  cmd_simulate(o, log);
  CommandOptions other = o;
  other.config_path.clear();
  CHECK_THROWS_AS(cmd_extract(other, log), ConfigError);
  fs::remove_all(dir);
}
