#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stimnet/common.hpp"
#include "stimnet/netsim/connection.hpp"
#include "stimnet/netsim/topology.hpp"

namespace stimnet::netsim {

enum class EventKind : std::uint8_t {
  send,
  receive,
  overhear,
  rts,
  cts,
  ack,
  backoff,
  rreq,
  rrep,
  rerr,
  drop_internal,
};

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

// Field conventions:
//  - `src` is the MAC transmitter of the frame (equal to `observer` for
//    transmissions and for internal drops).
//  - `dst_mac` is the MAC receiver, or kBroadcast.
//  - Data frames (send/receive/overhear/drop_internal) carry the transport
//    sequence number; rts/cts/ack/backoff are recorded at the data sender.
//  - Route-control frames carry the hop-count field in `seq_number` (0 at
//    the originator) and the connection they serve in `connection_id`.
//    An rreq/rrep/rerr event whose `src` differs from `observer` is a
//    reception; if additionally `dst_mac` names another node it was overheard.
struct TraceEvent {
  SimTime timestamp{0};
  NodeId observer = kNoNode;
  EventKind kind = EventKind::send;
  PacketId packet_id = 0;
  ConnectionId connection_id = -1;
  NodeId src = kNoNode;
  NodeId dst_mac = kNoNode;
  std::int32_t seq_number = 0;
  std::int32_t size = 0;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct EventTrace {
  std::vector<TraceEvent> events;
};

inline constexpr std::string_view kTraceHeader =
    "timestamp\tobserver\tevent_kind\tpacket_id\tconnection_id\tsrc\tdst_mac\tseq_number\tsize";

/// Tab-separated, header first, timestamps with microsecond precision.
void write_trace(std::ostream& out, const EventTrace& trace);
/// Throws DataError naming the offending line.
EventTrace read_trace(std::istream& in);

/// Checks timestamp order, overhear closure, wormhole invisibility and
/// per-connection sequence monotonicity. Returns human-readable violations.
std::vector<std::string> check_trace_invariants(const EventTrace& trace, const Topology& topology,
                                                const std::vector<Connection>& connections);

}  // namespace stimnet::netsim
