#pragma once

#include <array>
#include <vector>

namespace stimnet::energy {

/// Radio cost of one packet in one mode: a * bytes + b, in microjoules.
struct LinearCost {
  double a = 0.0;  // uJ per byte
  double b = 0.0;  // uJ per packet
  double operator()(double bytes) const { return a * bytes + b; }
};

struct EnergyParams {
  LinearCost send{1.9, 454.0};
  LinearCost receive{0.5, 356.0};
  LinearCost overhear{0.39, 140.0};
  double size_data = 1024.0;   // bytes
  double size_f2 = 48.0;       // bytes, payload plus any header
  double window_size = 50.0;   // seconds
  double injection_rate = 0.5; // packets per second
};

inline constexpr double kReferenceWindow = 500.0;  // seconds
// Stage 2 is priced at the packets of one 50 s window in every table.
inline constexpr double kStage2Window = 50.0;  // seconds

// Published stage-1 false-positive rates (fractions) for 50/100/250/500 s windows.
inline constexpr std::array<double, 4> kPublishedWindows = {50.0, 100.0, 250.0, 500.0};
inline constexpr std::array<double, 4> kPublishedFpRates = {0.0355, 0.0465, 0.0928, 0.1509};

/// Watchdog cost of overhearing n data packets.
double xi_f0(double n, const EnergyParams& p);
/// Shipping one f2 report two hops upstream.
double xi_F2(const EnergyParams& p);
/// Co-stimulation cost per window: report plus stage-2 watchdog at rate fp.
double xi_total(double fp_rate, double n, const EnergyParams& p);

struct TradeOff {
  double xi = 0.0;        // uJ per window
  double xi_prime = 0.0;  // uJ per 500 s
  double gamma = 0.0;     // fraction saved against the watchdog over 500 s
};

TradeOff trade_off(double fp_rate, double n, const EnergyParams& p);

struct Breakeven {
  double n = 0.0;
  double window = 0.0;  // seconds
};

/// Packets per window above which the report is cheaper than overhearing.
Breakeven breakeven(const EnergyParams& p);

enum class Mode { costim, watchdog };

struct EnergyPoint {
  double time = 0.0;         // seconds, end of window
  double accumulated = 0.0;  // uJ
};

/// Step-wise totals, one point per window of p.window_size seconds. The
/// co-stimulation mode charges xi_total with n = injection_rate *
/// kStage2Window packets in stage 2; the watchdog overhears every packet of the window.
std::vector<EnergyPoint> accumulate(double duration, Mode mode, double fp_rate, const EnergyParams& p);

}  // namespace stimnet::energy
