#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stimnet {

using NodeId = std::int32_t;
using PacketId = std::int64_t;
using ConnectionId = std::int32_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr NodeId kBroadcast = -1;

// Simulation clock. Integer microseconds keep traces bit-reproducible.
using SimTime = std::chrono::microseconds;

inline constexpr double to_seconds(SimTime t) {
  return static_cast<double>(t.count()) * 1e-6;
}

inline SimTime from_seconds(double seconds) {
  return SimTime{static_cast<std::int64_t>(seconds * 1e6 + (seconds >= 0 ? 0.5 : -0.5))};
}

// Error categories map onto the command-line exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 3; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class InvariantError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// SplitMix64 finalizer; derives independent sub-seeds from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Shortest text that reads back to the same double.
std::string format_double(double v);
// Fixed-point with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);
// Strict parse of a whole field; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

// FNV-1a, used to fingerprint configuration files in reports.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace stimnet
