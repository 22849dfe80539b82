#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stimnet/energy/energy.hpp"
#include "stimnet/experiment/pipeline.hpp"

namespace stimnet::experiment {

/// "# title", "# config_hash ...", "# seeds ..." lines.
std::string report_header(const std::string& title, const std::string& config_hash,
                          const std::vector<std::uint64_t>& seeds);

/// Two decimals; NaN prints as "n/a".
std::string pct(double v);

inline constexpr std::string_view kMetricsColumns =
    "block\twindow_s\tclass\tnodes\tdet_rate\tdet_ci95\tfp_rate\tfp_ci95";

/// Rows per class plus "any_misbehavior" for every window, in the layout of
/// the detection/FP tables.
std::string metrics_rows(const std::string& block, const std::vector<std::pair<double, BlockSummary>>& windows);
std::string error_rows(const std::string& block, const std::vector<std::pair<double, BlockSummary>>& windows);

/// Weights at or above `threshold`, per window in feature order.
std::string weight_rows(const std::vector<std::pair<double, std::vector<double>>>& windows,
                        const std::vector<std::string>& feature_names, double threshold = 0.25);

struct CascadeWindowSummary {
  double window = 0.0;
  double stage1_any_fp = 0.0;          // percent, mean over nodes
  double invocation_rate = 0.0;        // percent of all rows sent to stage 2
  double normal_invocation_rate = 0.0; // percent of normal rows sent to stage 2
};

inline constexpr std::string_view kCascadeSummaryColumns =
    "window_s\tstage1_any_fp_rate\tstage2_invocation_rate\tstage2_invocation_rate_normal";

std::string cascade_summary_rows(const std::vector<CascadeWindowSummary>& rows);
/// Reads back the table written by cascade_summary_rows; comment lines are skipped.
std::vector<CascadeWindowSummary> parse_cascade_summary(const std::string& text);

struct EnergyRow {
  double window = 0.0;
  double fp_rate = 0.0;  // fraction
  energy::TradeOff trade;
};

/// Table VI layout for n = injection_rate * kStage2Window packets.
std::vector<EnergyRow> energy_table(const std::vector<std::pair<double, double>>& window_fp,
                                    const energy::EnergyParams& base);
std::string energy_rows(const std::vector<EnergyRow>& rows);
std::string breakeven_line(const energy::EnergyParams& p);
std::string accumulation_rows(const std::vector<std::pair<double, double>>& window_fp, double duration,
                              const energy::EnergyParams& base);
std::string energy_vs_fp_rows(const energy::EnergyParams& p);

}  // namespace stimnet::experiment
