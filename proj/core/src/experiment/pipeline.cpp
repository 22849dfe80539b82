#include "stimnet/experiment/pipeline.hpp"

#include <cmath>
#include <limits>

#include "stimnet/costim/cascade.hpp"
#include "stimnet/features/extractor.hpp"
#include "stimnet/features/monitor.hpp"

namespace stimnet::experiment {

using features::DatasetKind;
using features::DatasetTable;
using netsim::MisbehaviorKind;

int class_index(features::Label label) { return static_cast<int>(label); }

std::vector<std::string> class_names() { return {"normal", "dropping", "delaying", "wormhole"}; }

RunData simulate_run(const Config& config, std::shared_ptr<const netsim::Topology> topology, MisbehaviorKind kind,
                     std::uint64_t seed) {
  const auto& s = config.scenario;
  RunData run;
  run.kind = kind;
  run.seed = seed;
  run.sim_duration = s.sim_duration;
  run.topology = std::move(topology);
  run.plan = make_plan(s, *run.topology, kind, seed);
  auto result = netsim::run_simulation(*run.topology, make_connections(s, *run.topology, seed), run.plan,
                                       s.sim_duration, mix_seed(seed, 0x30), s.simulation);
  run.connections = std::move(result.connections);
  run.stats = std::move(result.stats);
  run.trace = std::move(result.trace);
  const features::FeatureExtractor fx(run.trace, run.connections, {s.sim_duration, 0.0, s.sim_duration});
  run.forwarded = fx.forwarded_counts();
  run.forwarded.resize(run.topology->size(), 0);
  return run;
}

std::vector<NodeId> choose_monitors(const std::vector<std::int64_t>& forwarded_total,
                                    const netsim::Topology& topology, std::size_t k,
                                    std::vector<std::string>* warnings) {
  std::vector<std::size_t> degrees(topology.size());
  for (std::size_t i = 0; i < degrees.size(); ++i) degrees[i] = topology.degree(static_cast<NodeId>(i));
  return features::select_monitor_nodes(forwarded_total, degrees, k, warnings);
}

void extract_run(const Config& config, const RunData& run, const std::vector<NodeId>& monitors,
                 const std::vector<DatasetKind>& kinds, WindowData& into) {
  const features::WindowSpec spec{into.window, 0.0, run.sim_duration};
  const features::RouteTableParams table{config.scenario.simulation.route_lifetime, 30.0};
  const features::FeatureExtractor fx(run.trace, run.connections, spec, table);
  if (into.nodes.empty())
    for (NodeId m : monitors) into.nodes.push_back({m, {}, {}});
  if (into.nodes.size() != monitors.size()) throw InvariantError("monitor list changed between runs");
  for (std::size_t i = 0; i < monitors.size(); ++i) {
    auto& nt = into.nodes[i];
    const auto samples = features::paired_samples(fx, run.plan, monitors[i], &nt.excluded);
    for (DatasetKind k : kinds) {
      auto more = features::make_table(samples, k);
      auto& t = nt.tables[k];
      if (t.feature_names.empty()) t.feature_names = more.feature_names;
      features::append(t, more);
    }
  }
}

std::vector<int> table_labels(const DatasetTable& table) {
  std::vector<int> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) out.push_back(class_index(r.label));
  return out;
}

std::vector<char> usable_rows(const std::vector<int>& labels, std::size_t min_samples,
                              std::vector<std::string>* warnings) {
  std::array<std::size_t, kClassCount> counts{};
  for (int l : labels) ++counts.at(static_cast<std::size_t>(l));
  const auto names = class_names();
  std::vector<char> keep(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) keep[i] = counts[static_cast<std::size_t>(labels[i])] >= min_samples;
  if (warnings)
    for (std::size_t c = 0; c < kClassCount; ++c)
      if (counts[c] > 0 && counts[c] < min_samples)
        warnings->push_back("class " + names[c] + " skipped: " + std::to_string(counts[c]) + " samples");
  return keep;
}

learn::Dataset to_dataset(const DatasetTable& table, const std::vector<char>& keep) {
  learn::Dataset d(table.feature_names.size(), kClassCount);
  d.feature_names = table.feature_names;
  d.class_names = class_names();
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (keep[i]) d.add(table.rows[i].values, class_index(table.rows[i].label));
  return d;
}

namespace {

std::size_t present_classes(const learn::Dataset& d) {
  std::size_t n = 0;
  for (auto c : d.class_counts()) n += c > 0;
  return n;
}

}  // namespace

std::optional<NodeEvaluation> evaluate_single(const DatasetTable& table, const ExperimentConfig& x,
                                              std::uint64_t seed) {
  if (table.rows.empty()) return std::nullopt;
  NodeEvaluation ev;
  ev.node = table.rows.front().observer;
  const auto keep = usable_rows(table_labels(table), x.min_class_samples, &ev.warnings);
  const auto data = to_dataset(table, keep);
  if (present_classes(data) < 2) return std::nullopt;
  const learn::PresortedDataset sorted(data);
  const auto folds = learn::stratified_kfold(data.labels(), x.n_folds, seed);
  ev.warnings.insert(ev.warnings.end(), folds.warnings.begin(), folds.warnings.end());
  ev.rows = data.rows();
  ev.folds = folds.count;
  ev.selection = learn::forward_selection(sorted, folds, x.tree);
  const auto pred = learn::cv_predict(sorted, folds, ev.selection.selected, x.tree);
  ev.metrics = learn::evaluate(pred, data.labels(), kClassCount, kNormal);
  return ev;
}

double CascadeNodeEvaluation::invocation_rate() const {
  const auto n = cascade.confusion.total();
  return n == 0 ? 0.0 : static_cast<double>(stage2_invocations) / static_cast<double>(n);
}

double CascadeNodeEvaluation::normal_invocation_rate() const {
  return normal_rows == 0 ? 0.0 : static_cast<double>(normal_invocations) / static_cast<double>(normal_rows);
}

std::optional<CascadeNodeEvaluation> evaluate_cascade(const DatasetTable& f2, const DatasetTable& f0,
                                                      const ExperimentConfig& x, std::uint64_t seed) {
  if (f2.rows.size() != f0.rows.size()) throw DataError("F2 and f0 tables are not paired");
  for (std::size_t i = 0; i < f2.rows.size(); ++i) {
    const auto& a = f2.rows[i];
    const auto& b = f0.rows[i];
    if (a.observer != b.observer || a.neighbor != b.neighbor || a.window_index != b.window_index ||
        a.label != b.label)
      throw DataError("F2 and f0 tables are not paired at row " + std::to_string(i + 1));
  }
  if (f2.rows.empty()) return std::nullopt;

  CascadeNodeEvaluation ev;
  const auto keep = usable_rows(table_labels(f2), x.min_class_samples, &ev.stage1.warnings);
  const auto d1 = to_dataset(f2, keep);
  const auto d2 = to_dataset(f0, keep);
  if (present_classes(d1) < 2) return std::nullopt;
  const learn::PresortedDataset s1(d1);
  const learn::PresortedDataset s2(d2);
  const auto folds = learn::stratified_kfold(d1.labels(), x.n_folds, seed);

  for (auto* st : {&ev.stage1, &ev.stage2}) {
    st->node = f2.rows.front().observer;
    st->rows = d1.rows();
    st->folds = folds.count;
  }
  ev.stage1.warnings.insert(ev.stage1.warnings.end(), folds.warnings.begin(), folds.warnings.end());
  ev.stage1.selection = learn::forward_selection(s1, folds, x.tree);
  ev.stage2.selection = learn::forward_selection(s2, folds, x.tree);
  std::vector<int> p1(d1.rows()), p2(d1.rows());

  learn::ConfusionMatrix total(kClassCount);
  for (int f = 0; f < folds.count; ++f) {
    const auto mask = folds.training_mask(f);
    const auto holdout = folds.holdout(f);
    if (holdout.empty()) continue;
    const auto t1 = learn::train_tree(s1, mask, ev.stage1.selection.selected, x.tree);
    const auto t2 = learn::train_tree(s2, mask, ev.stage2.selection.selected, x.tree);
    costim::CascadeClassifier cascade{[&](std::span<const double> v) { return t1.classify(v); },
                                      [&](std::span<const double> v) { return t2.classify(v); }, kNormal};
    std::vector<std::vector<double>> r1, r2;
    std::vector<int> truth;
    for (auto r : holdout) {
      r1.emplace_back(d1.row(r).begin(), d1.row(r).end());
      r2.emplace_back(d2.row(r).begin(), d2.row(r).end());
      truth.push_back(d1.label(r));
      p1[r] = t1.classify(d1.row(r));
      p2[r] = t2.classify(d2.row(r));
    }
    const auto res = costim::cascade_evaluate(cascade, r1, r2, truth, kClassCount);
    if (res.inconclusive != 0) throw InvariantError("cascade left rows undecided although every report arrived");
    total += res.confusion;
    ev.stage2_invocations += res.stage2_invocations;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] != kNormal) continue;
      ++ev.normal_rows;
      ev.normal_invocations += res.decisions[i].stage2_invoked;
    }
  }
  ev.stage1.metrics = learn::evaluate(p1, d1.labels(), kClassCount, kNormal);
  ev.stage2.metrics = learn::evaluate(p2, d2.labels(), kClassCount, kNormal);
  ev.cascade = learn::evaluate(total, kNormal);
  return ev;
}

learn::Interval interval_of(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  if (values.size() == 1) return {values.front(), std::numeric_limits<double>::quiet_NaN()};
  return learn::ci95(values);
}

namespace {

std::optional<RateSummary> rate_summary(const std::vector<const learn::ClassMetrics*>& per_node) {
  std::vector<double> det, fp;
  for (const auto* m : per_node) {
    if (!m->detection_rate) continue;
    det.push_back(*m->detection_rate);
    fp.push_back(m->fp_rate);
  }
  if (det.empty()) return std::nullopt;
  return RateSummary{det.size(), interval_of(det), interval_of(fp)};
}

}  // namespace

BlockSummary summarize(const std::vector<learn::Metrics>& per_node) {
  BlockSummary out;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::vector<const learn::ClassMetrics*> v;
    for (const auto& m : per_node)
      if (c < m.per_class.size()) v.push_back(&m.per_class[c]);
    out.per_class[c] = rate_summary(v);
  }
  std::vector<const learn::ClassMetrics*> any;
  std::vector<double> err;
  for (const auto& m : per_node) {
    any.push_back(&m.any_misbehavior);
    err.push_back(m.classification_error);
  }
  out.any_misbehavior = rate_summary(any);
  if (!err.empty()) out.error = interval_of(err);
  return out;
}

std::uint64_t fold_seed(const Config& config, double window, NodeId node) {
  return mix_seed(mix_seed(config.scenario.seed, static_cast<std::uint64_t>(std::llround(window * 1000.0))),
                  static_cast<std::uint64_t>(node) + 1);
}

}  // namespace stimnet::experiment
