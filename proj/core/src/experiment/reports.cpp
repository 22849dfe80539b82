#include "stimnet/experiment/reports.hpp"

#include <cmath>
#include <sstream>

namespace stimnet::experiment {

std::string report_header(const std::string& title, const std::string& config_hash,
                          const std::vector<std::uint64_t>& seeds) {
  std::string out = "# " + title + "\n# config_hash " + config_hash + "\n# seeds ";
  for (std::size_t i = 0; i < seeds.size(); ++i) out += (i ? "," : "") + std::to_string(seeds[i]);
  return out + "\n";
}

std::string pct(double v) { return std::isnan(v) ? "n/a" : format_fixed(v, 2); }

namespace {

std::string window_text(double w) { return format_double(w); }

void rate_row(std::ostringstream& out, const std::string& block, double window, const std::string& cls,
              const std::optional<RateSummary>& r) {
  out << block << '\t' << window_text(window) << '\t' << cls << '\t';
  if (!r) {
    out << "0\tn/a\tn/a\tn/a\tn/a\n";
    return;
  }
  out << r->nodes << '\t' << pct(r->detection.mean) << '\t' << pct(r->detection.halfwidth) << '\t'
      << pct(r->fp.mean) << '\t' << pct(r->fp.halfwidth) << '\n';
}

}  // namespace

std::string metrics_rows(const std::string& block, const std::vector<std::pair<double, BlockSummary>>& windows) {
  std::ostringstream out;
  const auto names = class_names();
  for (const auto& [w, s] : windows) {
    for (std::size_t c = 0; c < kClassCount; ++c) rate_row(out, block, w, names[c], s.per_class[c]);
    rate_row(out, block, w, "any_misbehavior", s.any_misbehavior);
  }
  return out.str();
}

std::string error_rows(const std::string& block, const std::vector<std::pair<double, BlockSummary>>& windows) {
  std::ostringstream out;
  for (const auto& [w, s] : windows) {
    out << block << '\t' << window_text(w) << '\t';
    if (s.error) out << pct(s.error->mean) << '\t' << pct(s.error->halfwidth) << '\n';
    else out << "n/a\tn/a\n";
  }
  return out.str();
}

std::string weight_rows(const std::vector<std::pair<double, std::vector<double>>>& windows,
                        const std::vector<std::string>& feature_names, double threshold) {
  std::ostringstream out;
  for (const auto& [w, weights] : windows)
    for (std::size_t f = 0; f < weights.size() && f < feature_names.size(); ++f)
      if (weights[f] >= threshold) out << window_text(w) << '\t' << feature_names[f] << '\t' << pct(weights[f]) << '\n';
  return out.str();
}

std::string cascade_summary_rows(const std::vector<CascadeWindowSummary>& rows) {
  std::ostringstream out;
  out << kCascadeSummaryColumns << '\n';
  for (const auto& r : rows)
    out << window_text(r.window) << '\t' << format_double(r.stage1_any_fp) << '\t' << format_double(r.invocation_rate)
        << '\t' << format_double(r.normal_invocation_rate) << '\n';
  return out.str();
}

std::vector<CascadeWindowSummary> parse_cascade_summary(const std::string& text) {
  std::vector<CascadeWindowSummary> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kCascadeSummaryColumns) throw DataError("cascade summary line " + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto tab = line.find('\t', start);
      if (tab == std::string::npos) tab = line.size();
      auto d = parse_double(std::string_view(line).substr(start, tab - start));
      if (!d) throw DataError("cascade summary line " + std::to_string(lineno) + ": bad number");
      v.push_back(*d);
      start = tab + 1;
    }
    if (v.size() != 4) throw DataError("cascade summary line " + std::to_string(lineno) + ": expected 4 fields");
    out.push_back({v[0], v[1], v[2], v[3]});
  }
  if (!header) throw DataError("cascade summary is empty");
  return out;
}

std::vector<EnergyRow> energy_table(const std::vector<std::pair<double, double>>& window_fp,
                                    const energy::EnergyParams& base) {
  std::vector<EnergyRow> out;
  for (const auto& [w, fp] : window_fp) {
    auto p = base;
    p.window_size = w;
    out.push_back({w, fp, energy::trade_off(fp, p.injection_rate * energy::kStage2Window, p)});
  }
  return out;
}

std::string energy_rows(const std::vector<EnergyRow>& rows) {
  std::ostringstream out;
  out << "window_s\tfp_rate\txi_mJ\txi_prime_mJ\tgamma_pct\n";
  for (const auto& r : rows)
    out << window_text(r.window) << '\t' << pct(r.fp_rate * 100.0) << '\t' << pct(r.trade.xi / 1000.0) << '\t'
        << pct(r.trade.xi_prime / 1000.0) << '\t' << pct(r.trade.gamma * 100.0) << '\n';
  return out.str();
}

std::string breakeven_line(const energy::EnergyParams& p) {
  const auto b = energy::breakeven(p);
  return "n=" + format_fixed(b.n, 3) + ", window=" + format_fixed(b.window, 2) + " s";
}

std::string accumulation_rows(const std::vector<std::pair<double, double>>& window_fp, double duration,
                              const energy::EnergyParams& base) {
  std::ostringstream out;
  out << "window_s\tmode\ttime_s\taccumulated_mJ\n";
  for (const auto& [w, fp] : window_fp) {
    auto p = base;
    p.window_size = w;
    for (auto mode : {energy::Mode::costim, energy::Mode::watchdog})
      for (const auto& pt : energy::accumulate(duration, mode, fp, p))
        out << window_text(w) << '\t' << (mode == energy::Mode::costim ? "costim" : "watchdog") << '\t'
            << format_double(pt.time) << '\t' << format_fixed(pt.accumulated / 1000.0, 3) << '\n';
  }
  return out.str();
}

std::string energy_vs_fp_rows(const energy::EnergyParams& p) {
  std::ostringstream out;
  const double n = p.injection_rate * energy::kStage2Window;
  out << "fp_rate\txi_mJ\twatchdog_mJ\n";
  for (int i = 0; i <= 100; ++i) {
    const double fp = i / 100.0;
    out << i << '\t' << format_fixed(energy::xi_total(fp, n, p) / 1000.0, 3) << '\t'
        << format_fixed(energy::xi_f0(n, p) / 1000.0, 3) << '\n';
  }
  return out.str();
}

}  // namespace stimnet::experiment
