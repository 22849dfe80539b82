#include "stimnet/netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <unordered_set>

namespace stimnet::netsim {
namespace {

enum class FrameType : std::uint8_t { data, rreq, rrep, rerr };

// Field use mirrors the trace conventions: `seq` is the transport sequence
// number for data and the hop-count field for route control.
struct Frame {
  FrameType type = FrameType::data;
  PacketId id = 0;
  ConnectionId conn = -1;
  NodeId next_hop = kBroadcast;
  NodeId prev_hop = kNoNode;
  NodeId origin = kNoNode;
  NodeId target = kNoNode;
  std::int32_t seq = 0;
  std::int32_t size = 0;
};

struct Route {
  NodeId next_hop = kNoNode;
  int hops = 0;
  bool valid = false;
  SimTime expires{0};
};

struct MacState {
  std::deque<Frame> queue;
  bool active = false;
  int attempts = 0;
  int stage = 0;
};

struct NodeState {
  MacState mac;
  std::map<NodeId, Route> routes;
  std::unordered_set<PacketId> seen_rreq;
  std::map<NodeId, int> ack_failures;
};

struct Discovery {
  bool pending = false;
  int retries = 0;
  std::uint64_t token = 0;
  std::deque<Frame> buffer;
};

struct Scheduled {
  SimTime time;
  std::uint64_t order;
  std::function<void()> action;
};

struct LaterFirst {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return a.time != b.time ? a.time > b.time : a.order > b.order;
  }
};

// 802.11b-like timing, microseconds.
constexpr std::int64_t kSlot = 20;
constexpr std::int64_t kSifs = 10;
constexpr std::int64_t kDifs = 50;
constexpr std::int64_t kPreamble = 192;
constexpr int kCwMin = 31;
constexpr int kCwMax = 1023;
constexpr std::int32_t kRtsBytes = 20;
constexpr std::int32_t kCtsBytes = 14;
constexpr std::int32_t kAckBytes = 14;
constexpr std::int32_t kDataOverhead = 56;  // MAC + IP + UDP headers
constexpr std::int32_t kRreqBytes = 44;
constexpr std::int32_t kRrepBytes = 40;
constexpr std::int32_t kRerrBytes = 32;

class Engine {
 public:
  Engine(const Topology& topo, const std::vector<Connection>& conns, const MisbehaviorPlan& plan,
         double sim_duration, std::uint64_t seed, const SimulationParams& params)
      : topo_(topo),
        plan_(plan),
        params_(params),
        end_(from_seconds(sim_duration)),
        rng_(mix_seed(seed, 0x51)),
        nodes_(topo.size()),
        busy_until_(topo.size(), SimTime{0}) {
    result_.connections = conns;
    result_.stats.resize(conns.size());
    discovery_.resize(conns.size());
  }

  SimulationResult run() {
    const auto reach = effective_reachability();
    for (std::size_t i = 0; i < result_.connections.size(); ++i) {
      const auto& c = result_.connections[i];
      if (!topo_.contains(c.source) || !topo_.contains(c.destination) ||
          !reach[static_cast<std::size_t>(c.source)][static_cast<std::size_t>(c.destination)]) {
        result_.skipped.push_back(c.id);
        result_.log.push_back("connection " + std::to_string(c.id) +
                              " is unroutable and was skipped");
        continue;
      }
      schedule_injection(i, 0);
    }
    while (!queue_.empty()) {
      std::pop_heap(queue_.begin(), queue_.end(), LaterFirst{});
      Scheduled ev = std::move(queue_.back());
      queue_.pop_back();
      now_ = ev.time;
      ev.action();
    }
    std::stable_sort(result_.trace.events.begin(), result_.trace.events.end(),
                     [](const TraceEvent& a, const TraceEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
    return std::move(result_);
  }

 private:
  // ---- infrastructure -------------------------------------------------
  void at(SimTime t, std::function<void()> action) {
    queue_.push_back({t, order_++, std::move(action)});
    std::push_heap(queue_.begin(), queue_.end(), LaterFirst{});
  }

  void emit(SimTime t, NodeId observer, EventKind kind, const Frame& f, NodeId src, NodeId dst) {
    result_.trace.events.push_back(
        {t, observer, kind, f.id, f.conn, src, dst, f.seq, f.size});
  }

  SimTime airtime(std::int32_t bytes) const {
    const double us = std::ceil(static_cast<double>(bytes) * 8.0 / params_.bandwidth_bps * 1e6);
    return SimTime{kPreamble + static_cast<std::int64_t>(us)};
  }

  std::int32_t air_bytes(const Frame& f) const {
    return f.type == FrameType::data ? f.size + kDataOverhead : f.size;
  }

  SimTime access_delay() {
    std::uniform_int_distribution<int> slots(0, kCwMin);
    return SimTime{kDifs + kSlot * slots(rng_)};
  }

  SimTime backoff_delay(int stage) {
    const int cw = std::min(((kCwMin + 1) << std::min(stage, 10)) - 1, kCwMax);
    std::uniform_int_distribution<int> slots(0, cw);
    return SimTime{kDifs + kSlot * slots(rng_)};
  }

  bool chance(double p) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng_) < p;
  }

  NodeState& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Connection& conn(ConnectionId id) const {
    return result_.connections[static_cast<std::size_t>(id)];
  }
  ConnectionStats& stats(ConnectionId id) { return result_.stats[static_cast<std::size_t>(id)]; }

  void occupy(NodeId n, SimTime until) {
    auto& b = busy_until_[static_cast<std::size_t>(n)];
    b = std::max(b, until);
  }

  void occupy_neighborhood(NodeId n, SimTime until) {
    occupy(n, until);
    for (NodeId w : topo_.neighbors(n)) occupy(w, until);
  }

  std::vector<std::vector<char>> effective_reachability() const {
    const std::size_t n = topo_.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s) {
      std::deque<NodeId> frontier{static_cast<NodeId>(s)};
      reach[s][s] = 1;
      while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop_front();
        auto visit = [&](NodeId v) {
          if (!reach[s][static_cast<std::size_t>(v)]) {
            reach[s][static_cast<std::size_t>(v)] = 1;
            frontier.push_back(v);
          }
        };
        for (NodeId v : topo_.neighbors(u)) visit(v);
        if (auto p = plan_.wormhole_partner(u)) visit(*p);
      }
    }
    return reach;
  }

  std::optional<NodeId> partner(NodeId n) const {
    if (plan_.kind != MisbehaviorKind::wormhole) return std::nullopt;
    return plan_.wormhole_partner(n);
  }

  // ---- routing table --------------------------------------------------
  const Route* valid_route(NodeId at, NodeId dest) {
    auto& routes = node(at).routes;
    auto it = routes.find(dest);
    if (it == routes.end() || !it->second.valid) return nullptr;
    if (it->second.expires <= now_) {
      it->second.valid = false;
      return nullptr;
    }
    return &it->second;
  }

  void refresh_route(NodeId at, NodeId dest, NodeId via) {
    auto& routes = node(at).routes;
    auto it = routes.find(dest);
    if (it == routes.end() || !it->second.valid || it->second.next_hop != via) return;
    if (it->second.expires <= now_) return;
    it->second.expires = now_ + from_seconds(params_.route_lifetime);
  }

  void update_route(NodeId at, NodeId dest, NodeId next, int hops, bool force) {
    if (at == dest) return;
    auto& routes = node(at).routes;
    auto it = routes.find(dest);
    const SimTime expires = now_ + from_seconds(params_.route_lifetime);
    if (it == routes.end()) {
      routes.emplace(dest, Route{next, hops, true, expires});
      return;
    }
    Route& r = it->second;
    if (force || !r.valid || r.expires <= now_ || hops <= r.hops) r = Route{next, hops, true, expires};
  }

  // ---- traffic --------------------------------------------------------
  void schedule_injection(std::size_t ci, std::int32_t k) {
    const auto& c = result_.connections[ci];
    const double t = c.start_time + static_cast<double>(k) * c.injection_interval;
    const SimTime when = from_seconds(t);
    if (t >= c.start_time + c.duration || when >= end_) return;
    at(when, [this, ci, k] { inject(ci, k); });
  }

  void inject(std::size_t ci, std::int32_t k) {
    const auto& c = result_.connections[ci];
    Frame f;
    f.type = FrameType::data;
    f.id = next_packet_id_++;
    f.conn = c.id;
    f.origin = c.source;
    f.target = c.destination;
    f.seq = k;
    f.size = c.packet_size;
    ++stats(c.id).injected;
    send_from_source(f);
    schedule_injection(ci, k + 1);
  }

  void send_from_source(Frame f) {
    if (const Route* r = valid_route(f.origin, f.target)) {
      f.next_hop = r->next_hop;
      refresh_route(f.origin, f.target, f.next_hop);
      auto& c = result_.connections[static_cast<std::size_t>(f.conn)];
      if (c.path.empty()) record_path(c);
      enqueue(f.origin, f);
      return;
    }
    auto& d = discovery_[static_cast<std::size_t>(f.conn)];
    if (d.buffer.size() >= params_.queue_capacity) {
      emit(now_, f.origin, EventKind::drop_internal, f, f.origin, kNoNode);
      ++stats(f.conn).dropped_queue;
      return;
    }
    d.buffer.push_back(f);
    if (!d.pending) {
      d.pending = true;
      d.retries = 0;
      originate_rreq(f.conn);
    }
  }

  void originate_rreq(ConnectionId cid) {
    const auto& c = conn(cid);
    auto& d = discovery_[static_cast<std::size_t>(cid)];
    Frame q;
    q.type = FrameType::rreq;
    q.id = next_packet_id_++;
    q.conn = cid;
    q.origin = c.source;
    q.target = c.destination;
    q.seq = 0;
    q.size = kRreqBytes;
    q.next_hop = kBroadcast;
    node(c.source).seen_rreq.insert(q.id);
    const std::uint64_t token = ++d.token;
    enqueue(c.source, q);
    at(now_ + from_seconds(params_.discovery_timeout),
       [this, cid, token] { discovery_timeout(cid, token); });
  }

  void discovery_timeout(ConnectionId cid, std::uint64_t token) {
    auto& d = discovery_[static_cast<std::size_t>(cid)];
    if (!d.pending || d.token != token) return;
    if (d.retries < params_.rreq_retries) {
      ++d.retries;
      originate_rreq(cid);
      return;
    }
    d.pending = false;
    ++d.token;
    for (const auto& f : d.buffer) {
      emit(now_, f.origin, EventKind::drop_internal, f, f.origin, kNoNode);
      ++stats(cid).dropped_route;
    }
    d.buffer.clear();
  }

  void complete_discovery(ConnectionId cid) {
    auto& d = discovery_[static_cast<std::size_t>(cid)];
    auto& c = result_.connections[static_cast<std::size_t>(cid)];
    if (c.path.empty()) record_path(c);
    if (!d.pending) return;
    d.pending = false;
    ++d.token;
    auto pending = std::move(d.buffer);
    d.buffer.clear();
    for (auto& f : pending) send_from_source(f);
  }

  void record_path(Connection& c) {
    std::vector<NodeId> path{c.source};
    NodeId cur = c.source;
    while (cur != c.destination && path.size() <= topo_.size()) {
      const Route* r = valid_route(cur, c.destination);
      if (!r) return;
      cur = r->next_hop;
      path.push_back(cur);
    }
    if (cur == c.destination) c.path = std::move(path);
  }

  // ---- MAC ------------------------------------------------------------
  void enqueue(NodeId u, const Frame& f) {
    if (f.next_hop != kBroadcast && !topo_.adjacent(u, f.next_hop)) {
      if (partner(u) == f.next_hop) {
        tunnel(u, f);
      } else if (f.type == FrameType::data) {
        emit(now_, u, EventKind::drop_internal, f, u, kNoNode);
        ++stats(f.conn).dropped_route;
      }
      return;
    }
    auto& mac = node(u).mac;
    if (mac.queue.size() >= params_.queue_capacity) {
      if (f.type == FrameType::data) {
        emit(now_, u, EventKind::drop_internal, f, u, kNoNode);
        ++stats(f.conn).dropped_queue;
      }
      return;
    }
    mac.queue.push_back(f);
    if (!mac.active) {
      mac.active = true;
      at(now_ + access_delay(), [this, u] { attempt(u); });
    }
  }

  // Private link: no medium access, invisible to neighbors.
  void tunnel(NodeId u, const Frame& f) {
    const NodeId v = f.next_hop;
    const SimTime arrival = now_ + from_seconds(params_.tunnel_latency);
    if (f.type == FrameType::data) {
      emit(now_, u, EventKind::send, f, u, v);
      emit(arrival, v, EventKind::receive, f, u, v);
    } else {
      const EventKind k = control_kind(f.type);
      emit(now_, u, k, f, u, v);
      emit(arrival, v, k, f, u, v);
    }
    at(arrival, [this, v, f, u] { deliver(v, f, u); });
  }

  static EventKind control_kind(FrameType t) {
    switch (t) {
      case FrameType::rreq: return EventKind::rreq;
      case FrameType::rrep: return EventKind::rrep;
      case FrameType::rerr: return EventKind::rerr;
      case FrameType::data: break;
    }
    return EventKind::send;
  }

  void attempt(NodeId u) {
    auto& mac = node(u).mac;
    const Frame f = mac.queue.front();
    const SimTime busy = busy_until_[static_cast<std::size_t>(u)];
    if (busy > now_) {
      defer(u, f, busy);
      return;
    }
    if (f.type == FrameType::rreq) {
      broadcast(u, f);
    } else {
      unicast(u, f);
    }
  }

  void defer(NodeId u, const Frame& f, SimTime from) {
    auto& mac = node(u).mac;
    ++mac.stage;
    if (f.type == FrameType::data) emit(now_, u, EventKind::backoff, f, u, f.next_hop);
    at(from + backoff_delay(mac.stage), [this, u] { attempt(u); });
  }

  void unicast(NodeId u, const Frame& f) {
    auto& mac = node(u).mac;
    const NodeId v = f.next_hop;
    const bool data = f.type == FrameType::data;
    ++mac.attempts;
    if (data) emit(now_, u, EventKind::rts, f, u, v);

    if (busy_until_[static_cast<std::size_t>(v)] > now_) {
      // Receiver is held by a transmission the sender cannot hear.
      const SimTime probe = data ? airtime(kRtsBytes) : airtime(air_bytes(f));
      occupy_neighborhood(u, now_ + probe);
      if (mac.attempts >= params_.rts_retry_limit) {
        handshake_failure(u);
        return;
      }
      const SimTime timeout = now_ + probe + SimTime{kSifs} + airtime(kCtsBytes) + SimTime{kSlot};
      defer(u, f, timeout);
      return;
    }

    SimTime t_frame = now_;
    SimTime t_cts = now_;
    if (data) {
      t_cts = now_ + airtime(kRtsBytes) + SimTime{kSifs};
      t_frame = t_cts + airtime(kCtsBytes) + SimTime{kSifs};
    }
    const SimTime t_ack = t_frame + airtime(air_bytes(f)) + SimTime{kSifs};
    const SimTime t_end = t_ack + airtime(kAckBytes);
    occupy_neighborhood(u, t_end);
    occupy_neighborhood(v, t_end);

    const EventKind tx = data ? EventKind::send : control_kind(f.type);
    const EventKind rx = data ? EventKind::receive : tx;
    const EventKind ov = data ? EventKind::overhear : tx;
    if (data) emit(t_cts, u, EventKind::cts, f, v, u);
    emit(t_frame, u, tx, f, u, v);
    emit(t_frame, v, rx, f, u, v);
    for (NodeId w : topo_.neighbors(u))
      if (w != v) emit(t_frame, w, ov, f, u, v);
    if (data) emit(t_ack, u, EventKind::ack, f, v, u);

    at(t_end, [this, u] { finish(u); });
    at(t_end, [this, v, f, u] { deliver(v, f, u); });
  }

  void broadcast(NodeId u, const Frame& f) {
    const SimTime t_end = now_ + airtime(air_bytes(f));
    occupy_neighborhood(u, t_end);
    emit(now_, u, EventKind::rreq, f, u, kBroadcast);
    const auto& nbrs = topo_.neighbors(u);
    for (NodeId w : nbrs) emit(now_, w, EventKind::rreq, f, u, kBroadcast);
    if (auto p = partner(u)) {
      Frame copy = f;
      copy.next_hop = *p;
      tunnel(u, copy);
    }
    at(t_end, [this, u] { finish(u); });
    at(t_end, [this, u, f] {
      for (NodeId w : topo_.neighbors(u)) deliver(w, f, u);
    });
  }

  void reset_and_continue(NodeId u) {
    auto& mac = node(u).mac;
    mac.attempts = 0;
    mac.stage = 0;
    if (mac.queue.empty()) {
      mac.active = false;
      return;
    }
    at(now_ + access_delay(), [this, u] { attempt(u); });
  }

  void finish(NodeId u) {
    auto& st = node(u);
    const Frame f = st.mac.queue.front();
    st.mac.queue.pop_front();
    if (f.next_hop != kBroadcast) st.ack_failures[f.next_hop] = 0;
    reset_and_continue(u);
  }

  void handshake_failure(NodeId u) {
    auto& st = node(u);
    const Frame f = st.mac.queue.front();
    st.mac.queue.pop_front();
    if (f.type == FrameType::data) {
      emit(now_, u, EventKind::drop_internal, f, u, kNoNode);
      ++stats(f.conn).dropped_mac;
    }
    int& failures = st.ack_failures[f.next_hop];
    if (++failures >= params_.ack_failure_limit) {
      failures = 0;
      link_break(u, f.next_hop, f.conn, f.prev_hop);
    }
    reset_and_continue(u);
  }

  void link_break(NodeId u, NodeId v, ConnectionId cid, NodeId precursor) {
    auto& st = node(u);
    for (auto& [dest, r] : st.routes)
      if (r.valid && r.next_hop == v) r.valid = false;
    std::deque<Frame> kept;
    for (const auto& f : st.mac.queue) {
      if (f.next_hop != v) {
        kept.push_back(f);
      } else if (f.type == FrameType::data) {
        emit(now_, u, EventKind::drop_internal, f, u, kNoNode);
        ++stats(f.conn).dropped_route;
      }
    }
    st.mac.queue = std::move(kept);
    send_rerr(u, cid, precursor);
  }

  // Notifies the node that handed us the frame, or the reverse route when
  // it is unknown.
  void send_rerr(NodeId u, ConnectionId cid, NodeId precursor) {
    const auto& c = conn(cid);
    if (u == c.source) return;
    NodeId next = precursor;
    if (next == kNoNode) {
      const Route* back = valid_route(u, c.source);
      if (!back) return;
      next = back->next_hop;
    }
    Frame e;
    e.type = FrameType::rerr;
    e.id = next_packet_id_++;
    e.conn = cid;
    e.origin = u;
    e.target = c.source;
    e.seq = 0;
    e.size = kRerrBytes;
    e.next_hop = next;
    enqueue(u, e);
  }

  // ---- reception --------------------------------------------------------
  void deliver(NodeId v, Frame f, NodeId from) {
    f.prev_hop = from;
    switch (f.type) {
      case FrameType::data: on_data(v, f, from); break;
      case FrameType::rreq: on_rreq(v, f, from); break;
      case FrameType::rrep: on_rrep(v, f, from); break;
      case FrameType::rerr: on_rerr(v, f, from); break;
    }
  }

  void on_data(NodeId v, const Frame& f, NodeId from) {
    refresh_route(v, f.origin, from);
    if (v == f.target) {
      ++stats(f.conn).delivered;
      return;
    }
    if (plan_.kind == MisbehaviorKind::dropping && plan_.affects(v) && chance(plan_.probability)) {
      emit(now_, v, EventKind::drop_internal, f, v, kNoNode);
      ++stats(f.conn).dropped_misbehavior;
      return;
    }
    if (plan_.kind == MisbehaviorKind::delaying && plan_.affects(v) && chance(plan_.probability)) {
      at(now_ + from_seconds(plan_.delay), [this, v, f] { forward_data(v, f); });
      return;
    }
    forward_data(v, f);
  }

  void forward_data(NodeId v, Frame f) {
    if (const Route* r = valid_route(v, f.target)) {
      f.next_hop = r->next_hop;
      refresh_route(v, f.target, f.next_hop);
      enqueue(v, f);
      return;
    }
    emit(now_, v, EventKind::drop_internal, f, v, kNoNode);
    ++stats(f.conn).dropped_route;
    send_rerr(v, f.conn, f.prev_hop);
  }

  void on_rreq(NodeId v, Frame f, NodeId from) {
    if (!node(v).seen_rreq.insert(f.id).second) return;
    update_route(v, f.origin, from, f.seq + 1, false);
    if (v == f.target) {
      Frame r;
      r.type = FrameType::rrep;
      r.id = next_packet_id_++;
      r.conn = f.conn;
      r.origin = v;
      r.target = f.origin;
      r.seq = 0;
      r.size = kRrepBytes;
      r.next_hop = from;
      enqueue(v, r);
      return;
    }
    f.seq += 1;
    f.next_hop = kBroadcast;
    std::uniform_real_distribution<double> jitter(0.0, params_.rreq_jitter);
    at(now_ + from_seconds(jitter(rng_)), [this, v, f] { enqueue(v, f); });
  }

  void on_rrep(NodeId v, Frame f, NodeId from) {
    update_route(v, f.origin, from, f.seq + 1, true);
    if (v == f.target) {
      if (conn(f.conn).source == v) complete_discovery(f.conn);
      return;
    }
    if (const Route* back = valid_route(v, f.target)) {
      f.seq += 1;
      f.next_hop = back->next_hop;
      enqueue(v, f);
    }
  }

  void on_rerr(NodeId v, Frame f, NodeId from) {
    const NodeId dest = conn(f.conn).destination;
    auto& routes = node(v).routes;
    auto it = routes.find(dest);
    if (it == routes.end() || !it->second.valid || it->second.next_hop != from) return;
    it->second.valid = false;
    if (v == f.target) return;
    if (const Route* back = valid_route(v, f.target)) {
      f.seq += 1;
      f.next_hop = back->next_hop;
      enqueue(v, f);
    }
  }

  const Topology& topo_;
  const MisbehaviorPlan& plan_;
  SimulationParams params_;
  SimTime end_;
  SimTime now_{0};
  std::mt19937_64 rng_;
  std::vector<Scheduled> queue_;
  std::uint64_t order_ = 0;
  PacketId next_packet_id_ = 0;
  std::vector<NodeState> nodes_;
  std::vector<SimTime> busy_until_;
  std::vector<Discovery> discovery_;
  SimulationResult result_;
};

}  // namespace

SimulationResult run_simulation(const Topology& topology, const std::vector<Connection>& connections,
                                const MisbehaviorPlan& plan, double sim_duration, std::uint64_t seed,
                                const SimulationParams& params) {
  if (!(sim_duration > 0.0)) throw ConfigError("sim_duration must be positive");
  plan.validate(topology);
  for (std::size_t i = 0; i < connections.size(); ++i)
    if (connections[i].id != static_cast<ConnectionId>(i))
      throw ConfigError("connection ids must be dense and ordered");
  Engine engine(topology, connections, plan, sim_duration, seed, params);
  return engine.run();
}

}  // namespace stimnet::netsim
