#include "stimnet/energy/energy.hpp"

#include <cmath>

#include "stimnet/common.hpp"

namespace stimnet::energy {

double xi_f0(double n, const EnergyParams& p) {
  if (n < 0) throw ConfigError("packet count must be non-negative");
  return n * p.overhear(p.size_data);
}

double xi_F2(const EnergyParams& p) { return 2.0 * (p.send(p.size_f2) + p.receive(p.size_f2)); }

double xi_total(double fp_rate, double n, const EnergyParams& p) {
  if (!(fp_rate >= 0.0 && fp_rate <= 1.0)) throw ConfigError("fp rate must lie in [0, 1]");
  return xi_F2(p) + fp_rate * xi_f0(n, p);
}

TradeOff trade_off(double fp_rate, double n, const EnergyParams& p) {
  if (!(p.window_size > 0.0)) throw ConfigError("window size must be positive");
  TradeOff t;
  t.xi = xi_total(fp_rate, n, p);
  t.xi_prime = (kReferenceWindow / p.window_size) * t.xi;
  t.gamma = 1.0 - t.xi_prime / xi_f0(p.injection_rate * kReferenceWindow, p);
  return t;
}

Breakeven breakeven(const EnergyParams& p) {
  if (!(p.size_data > 0.0)) throw ConfigError("data size must be positive");
  Breakeven b;
  b.n = xi_F2(p) / p.overhear(p.size_data);
  b.window = b.n / p.injection_rate;
  return b;
}

std::vector<EnergyPoint> accumulate(double duration, Mode mode, double fp_rate, const EnergyParams& p) {
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(p.window_size > 0.0)) throw ConfigError("window size must be positive");
  const auto windows = static_cast<long>(std::ceil(duration / p.window_size - 1e-9));
  const double per_window = mode == Mode::watchdog
                                ? xi_f0(p.injection_rate * p.window_size, p)
                                : xi_total(fp_rate, p.injection_rate * kStage2Window, p);
  std::vector<EnergyPoint> out;
  double total = 0.0;
  for (long w = 1; w <= windows; ++w) {
    total += per_window;
    out.push_back({std::min(duration, static_cast<double>(w) * p.window_size), total});
  }
  return out;
}

}  // namespace stimnet::energy
