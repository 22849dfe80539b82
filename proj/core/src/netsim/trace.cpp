#include "stimnet/netsim/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

namespace stimnet::netsim {
namespace {

constexpr std::array<std::string_view, 11> kKindNames = {
    "send", "receive", "overhear", "rts", "cts", "ack",
    "backoff", "rreq", "rrep", "rerr", "drop_internal"};

void append_int(std::string& line, std::int64_t v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, end);
}

template <typename T>
T parse_int(std::string_view field, std::size_t line_no, std::string_view name) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw DataError("trace line " + std::to_string(line_no) + ": bad " + std::string(name) +
                    " '" + std::string(field) + "'");
  return value;
}

// Parses "S.UUUUUU" into integer microseconds without going through double.
SimTime parse_timestamp(std::string_view field, std::size_t line_no) {
  const auto dot = field.find('.');
  const auto whole = field.substr(0, dot);
  std::int64_t micros = parse_int<std::int64_t>(whole, line_no, "timestamp") * 1'000'000;
  if (dot != std::string_view::npos) {
    auto frac = field.substr(dot + 1);
    if (frac.empty() || frac.size() > 6)
      throw DataError("trace line " + std::to_string(line_no) + ": bad timestamp");
    std::int64_t f = parse_int<std::int64_t>(frac, line_no, "timestamp");
    for (std::size_t i = frac.size(); i < 6; ++i) f *= 10;
    micros += f;
  }
  return SimTime{micros};
}

}  // namespace

std::string_view to_string(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

EventKind parse_event_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == text) return static_cast<EventKind>(i);
  throw DataError("unknown event kind '" + std::string(text) + "'");
}

void write_trace(std::ostream& out, const EventTrace& trace) {
  out << kTraceHeader << '\n';
  std::string line;
  for (const auto& e : trace.events) {
    line.clear();
    const std::int64_t us = e.timestamp.count();
    append_int(line, us / 1'000'000);
    line.push_back('.');
    char frac[8];
    std::snprintf(frac, sizeof frac, "%06lld", static_cast<long long>(us % 1'000'000));
    line.append(frac);
    line.push_back('\t');
    append_int(line, e.observer);
    line.push_back('\t');
    line.append(to_string(e.kind));
    line.push_back('\t');
    append_int(line, e.packet_id);
    line.push_back('\t');
    append_int(line, e.connection_id);
    line.push_back('\t');
    append_int(line, e.src);
    line.push_back('\t');
    append_int(line, e.dst_mac);
    line.push_back('\t');
    append_int(line, e.seq_number);
    line.push_back('\t');
    append_int(line, e.size);
    line.push_back('\n');
    out << line;
  }
}

EventTrace read_trace(std::istream& in) {
  EventTrace trace;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("trace is empty");
  ++line_no;
  if (line != kTraceHeader) throw DataError("trace line 1: unexpected header");
  std::array<std::string_view, 9> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string_view rest(line);
    std::size_t n = 0;
    while (n < fields.size()) {
      const auto tab = rest.find('\t');
      fields[n++] = rest.substr(0, tab);
      if (tab == std::string_view::npos) {
        rest = {};
        break;
      }
      rest.remove_prefix(tab + 1);
    }
    if (n != fields.size() || !rest.empty())
      throw DataError("trace line " + std::to_string(line_no) + ": expected 9 fields");
    TraceEvent e;
    e.timestamp = parse_timestamp(fields[0], line_no);
    e.observer = parse_int<NodeId>(fields[1], line_no, "observer");
    try {
      e.kind = parse_event_kind(fields[2]);
    } catch (const DataError&) {
      throw DataError("trace line " + std::to_string(line_no) + ": unknown event kind '" +
                      std::string(fields[2]) + "'");
    }
    e.packet_id = parse_int<PacketId>(fields[3], line_no, "packet_id");
    e.connection_id = parse_int<ConnectionId>(fields[4], line_no, "connection_id");
    e.src = parse_int<NodeId>(fields[5], line_no, "src");
    e.dst_mac = parse_int<NodeId>(fields[6], line_no, "dst_mac");
    e.seq_number = parse_int<std::int32_t>(fields[7], line_no, "seq_number");
    e.size = parse_int<std::int32_t>(fields[8], line_no, "size");
    trace.events.push_back(e);
  }
  return trace;
}

std::vector<std::string> check_trace_invariants(const EventTrace& trace, const Topology& topology,
                                                const std::vector<Connection>& connections) {
  std::vector<std::string> problems;
  const auto& ev = trace.events;

  for (std::size_t i = 1; i < ev.size(); ++i) {
    if (ev[i].timestamp < ev[i - 1].timestamp) {
      problems.push_back("timestamps decrease at event " + std::to_string(i));
      break;
    }
  }

  // Overhear closure: group data-frame events sharing (timestamp, packet, transmitter).
  std::map<std::tuple<std::int64_t, PacketId, NodeId>, std::vector<const TraceEvent*>> frames;
  for (const auto& e : ev) {
    if (e.kind == EventKind::send || e.kind == EventKind::receive || e.kind == EventKind::overhear)
      frames[{e.timestamp.count(), e.packet_id, e.src}].push_back(&e);
  }
  for (const auto& [key, group] : frames) {
    const TraceEvent* send = nullptr;
    for (const auto* e : group)
      if (e->kind == EventKind::send) send = e;
    if (!send) {
      bool any_overhear = std::any_of(group.begin(), group.end(), [](const TraceEvent* e) {
        return e->kind == EventKind::overhear;
      });
      if (any_overhear)
        problems.push_back("overhear without matching send for packet " +
                           std::to_string(std::get<1>(key)));
      continue;
    }
    const bool radio = topology.adjacent(send->observer, send->dst_mac);
    std::vector<NodeId> overhearers;
    for (const auto* e : group) {
      if (e->kind == EventKind::overhear) {
        overhearers.push_back(e->observer);
        if (!topology.adjacent(e->observer, send->observer))
          problems.push_back("overhear outside radio range for packet " +
                             std::to_string(send->packet_id));
      }
    }
    std::sort(overhearers.begin(), overhearers.end());
    if (!radio) {
      if (!overhearers.empty())
        problems.push_back("private-link transfer of packet " + std::to_string(send->packet_id) +
                           " was overheard");
      continue;
    }
    std::vector<NodeId> expected;
    for (NodeId n : topology.neighbors(send->observer))
      if (n != send->dst_mac) expected.push_back(n);
    if (overhearers != expected)
      problems.push_back("overhear set mismatch for packet " + std::to_string(send->packet_id) +
                         " sent by " + std::to_string(send->observer));
  }

  // Sequence numbers at each source: transmissions strictly increasing, and
  // transmitted plus internally dropped packets cover 0..n-1 without gaps.
  std::unordered_map<ConnectionId, NodeId> source_of;
  for (const auto& c : connections) source_of[c.id] = c.source;
  std::unordered_map<ConnectionId, std::int32_t> last_sent;
  std::unordered_map<ConnectionId, std::vector<std::int32_t>> appeared;
  std::unordered_map<PacketId, char> seen_packet;
  for (const auto& e : ev) {
    if (e.kind != EventKind::send && e.kind != EventKind::drop_internal) continue;
    auto it = source_of.find(e.connection_id);
    if (it == source_of.end() || it->second != e.observer) continue;
    if (!seen_packet.emplace(e.packet_id, 1).second) continue;
    appeared[e.connection_id].push_back(e.seq_number);
    if (e.kind == EventKind::send) {
      auto [pos, fresh] = last_sent.emplace(e.connection_id, e.seq_number);
      if (!fresh) {
        if (e.seq_number <= pos->second)
          problems.push_back("sequence numbers not increasing on connection " +
                             std::to_string(e.connection_id));
        pos->second = e.seq_number;
      }
    }
  }
  for (auto& [conn, seqs] : appeared) {
    std::sort(seqs.begin(), seqs.end());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      if (seqs[i] != static_cast<std::int32_t>(i)) {
        problems.push_back("sequence gap on connection " + std::to_string(conn));
        break;
      }
    }
  }
  return problems;
}

}  // namespace stimnet::netsim
