#include "stimnet/features/extractor.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace stimnet::features {

using netsim::EventKind;
using netsim::TraceEvent;

namespace {

bool is_control(EventKind k) {
  return k == EventKind::rreq || k == EventKind::rrep || k == EventKind::rerr;
}

void set(LocalFeatureSample& s, Feature f, double v, bool present = true) {
  s[f] = v;
  s.present[static_cast<std::size_t>(f)] = present;
}

struct Moments {
  int n = 0;
  double sum = 0.0;
  std::vector<double> xs;

  void add(double x) {
    ++n;
    sum += x;
    xs.push_back(x);
  }
  double mean() const { return sum / n; }
  // Two-pass sample variance.
  double variance() const {
    const double m = mean();
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / (n - 1);
  }
};

}  // namespace

FeatureExtractor::FeatureExtractor(const netsim::EventTrace& trace,
                                   const std::vector<netsim::Connection>& connections,
                                   WindowSpec windows, RouteTableParams table)
    : trace_(trace),
      connections_(connections),
      windows_(windows),
      table_(table),
      window_count_(windows.count()) {
  NodeId max_id = -1;
  for (const auto& c : connections) max_id = std::max({max_id, c.source, c.destination});
  for (const auto& e : trace.events) max_id = std::max(max_id, e.observer);
  by_observer_.resize(static_cast<std::size_t>(max_id + 1));
  for (std::uint32_t i = 0; i < trace.events.size(); ++i) {
    const auto& e = trace.events[i];
    if (i > 0 && e.timestamp < trace.events[i - 1].timestamp)
      throw DataError("trace is not sorted by time");
    if (e.connection_id < 0 || static_cast<std::size_t>(e.connection_id) >= connections.size())
      throw DataError("trace references unknown connection " + std::to_string(e.connection_id));
    by_observer_[static_cast<std::size_t>(e.observer)].push_back(i);
  }
}

NodeId FeatureExtractor::source_of(ConnectionId c) const {
  return connections_[static_cast<std::size_t>(c)].source;
}

NodeId FeatureExtractor::destination_of(ConnectionId c) const {
  return connections_[static_cast<std::size_t>(c)].destination;
}

std::vector<LocalFeatureSample> FeatureExtractor::extract(NodeId observer, NodeId neighbor) const {
  std::vector<LocalFeatureSample> out(static_cast<std::size_t>(window_count_));
  for (int w = 0; w < window_count_; ++w) {
    auto& s = out[static_cast<std::size_t>(w)];
    s.observer = observer;
    s.neighbor = neighbor;
    s.window_index = w;
    s.window_size = windows_.size;
  }
  if (observer < 0 || static_cast<std::size_t>(observer) >= by_observer_.size()) return out;
  link_features(observer, neighbor, out);
  node_features(observer, out);
  routing_table_features(observer, out);
  transport_features(observer, out);
  return out;
}

void FeatureExtractor::link_features(NodeId o, NodeId n, std::vector<LocalFeatureSample>& out) const {
  if (n == kNoNode) return;

  struct Handshake {
    int rts = 0;
    int ack = 0;
    int backoff = 0;
    SimTime last{0};
    SimTime sent{-1};
  };
  struct Sent {
    PacketId id;
    SimTime at;
  };
  std::unordered_map<PacketId, Handshake> handshakes;
  std::vector<PacketId> handshake_order;
  std::vector<Sent> data_sent;
  std::vector<Sent> rrep_sent;
  std::unordered_map<PacketId, SimTime> data_forwarded;
  std::unordered_map<PacketId, SimTime> rrep_forwarded;

  auto touch = [&](const TraceEvent& e) -> Handshake& {
    auto [it, fresh] = handshakes.try_emplace(e.packet_id);
    if (fresh) handshake_order.push_back(e.packet_id);
    it->second.last = e.timestamp;
    return it->second;
  };

  for (std::uint32_t i : by_observer_[static_cast<std::size_t>(o)]) {
    const auto& e = event(i);
    switch (e.kind) {
      case EventKind::rts:
        if (e.dst_mac == n) ++touch(e).rts;
        break;
      case EventKind::ack:
        if (e.src == n) ++touch(e).ack;
        break;
      case EventKind::backoff:
        if (e.dst_mac == n) ++touch(e).backoff;
        break;
      case EventKind::send:
        if (e.dst_mac == n) {
          if (auto it = handshakes.find(e.packet_id); it != handshakes.end()) it->second.sent = e.timestamp;
          if (destination_of(e.connection_id) != n) data_sent.push_back({e.packet_id, e.timestamp});
        }
        break;
      case EventKind::overhear:
      case EventKind::receive:
        if (e.src == n) data_forwarded.try_emplace(e.packet_id, e.timestamp);
        break;
      case EventKind::rrep:
        if (e.src == o && e.dst_mac == n) {
          if (source_of(e.connection_id) != n) rrep_sent.push_back({e.packet_id, e.timestamp});
        } else if (e.src == n) {
          rrep_forwarded.try_emplace(e.packet_id, e.timestamp);
        }
        break;
      default:
        break;
    }
  }

  const std::size_t nw = out.size();
  std::vector<double> ratio_sum(nw, 0.0), bo_sum(nw, 0.0);
  std::vector<int> records(nw, 0);
  for (PacketId id : handshake_order) {
    const auto& h = handshakes.at(id);
    if (h.rts == 0) continue;
    const int w = windows_.index_of(h.sent.count() >= 0 ? h.sent : h.last);
    if (w < 0) continue;
    ratio_sum[static_cast<std::size_t>(w)] += static_cast<double>(h.ack) / h.rts;
    bo_sum[static_cast<std::size_t>(w)] += h.backoff;
    ++records[static_cast<std::size_t>(w)];
  }

  auto watchdog = [&](const std::vector<Sent>& sent, const std::unordered_map<PacketId, SimTime>& fwd,
                      Feature ratio, Feature delay) {
    std::vector<int> tx(nw, 0), seen(nw, 0);
    std::vector<double> delay_sum(nw, 0.0);
    for (const auto& s : sent) {
      const int w = windows_.index_of(s.at);
      if (w < 0) continue;
      ++tx[static_cast<std::size_t>(w)];
      auto it = fwd.find(s.id);
      if (it != fwd.end() && it->second >= s.at) {
        ++seen[static_cast<std::size_t>(w)];
        delay_sum[static_cast<std::size_t>(w)] += to_seconds(it->second - s.at);
      }
    }
    for (std::size_t w = 0; w < nw; ++w) {
      auto& smp = out[w];
      if (tx[w] > 0) set(smp, ratio, static_cast<double>(seen[w]) / tx[w]);
      if (seen[w] > 0) set(smp, delay, delay_sum[w] / seen[w]);
    }
  };
  watchdog(data_sent, data_forwarded, Feature::M3, Feature::M4);
  watchdog(rrep_sent, rrep_forwarded, Feature::R3, Feature::R4);

  for (std::size_t w = 0; w < nw; ++w) {
    auto& s = out[w];
    s.pcts_tx = records[w];
    s.traffic_present = records[w] > 0;
    if (records[w] > 0) {
      set(s, Feature::M1, ratio_sum[w] / records[w]);
      set(s, Feature::M2, bo_sum[w] / records[w]);
    }
  }
}

void FeatureExtractor::node_features(NodeId o, std::vector<LocalFeatureSample>& out) const {
  const std::size_t nw = out.size();
  std::vector<double> bits(nw, 0.0);
  std::vector<std::set<NodeId>> partners(nw), two_hop(nw);
  std::vector<std::unordered_set<PacketId>> rreq_fwd(nw);
  std::vector<int> rerr_fwd(nw, 0), control_rx(nw, 0), rrep_fwd(nw, 0), rx(nw, 0);
  std::vector<std::set<ConnectionId>> forwarded_conns(nw);

  for (std::uint32_t i : by_observer_[static_cast<std::size_t>(o)]) {
    const auto& e = event(i);
    const int wi = windows_.index_of(e.timestamp);
    if (wi < 0) continue;
    const auto w = static_cast<std::size_t>(wi);
    switch (e.kind) {
      case EventKind::send:
        partners[w].insert(e.dst_mac);
        if (source_of(e.connection_id) != o) {
          bits[w] += 8.0 * e.size;
          forwarded_conns[w].insert(e.connection_id);
        }
        break;
      case EventKind::receive:
        partners[w].insert(e.src);
        ++rx[w];
        break;
      case EventKind::overhear:
        two_hop[w].insert(e.dst_mac);
        break;
      default:
        break;
    }
    if (!is_control(e.kind)) continue;
    if (e.src == o) {
      if (e.seq_number > 0) {
        if (e.kind == EventKind::rreq) rreq_fwd[w].insert(e.packet_id);
        if (e.kind == EventKind::rerr) ++rerr_fwd[w];
        if (e.kind == EventKind::rrep) ++rrep_fwd[w];
      }
    } else if (e.dst_mac == o || e.dst_mac == kBroadcast) {
      ++control_rx[w];
    }
  }

  const double win = windows_.size;
  for (std::size_t w = 0; w < nw; ++w) {
    auto& s = out[w];
    s.pcts_rx = rx[w];
    set(s, Feature::M5, bits[w] / win);
    set(s, Feature::M6, static_cast<double>(partners[w].size()));
    set(s, Feature::M7, static_cast<double>(two_hop[w].size()));
    set(s, Feature::R1, static_cast<double>(rreq_fwd[w].size()) / win);
    set(s, Feature::R2, rerr_fwd[w] / win);
    set(s, Feature::R6, control_rx[w] / win);
    set(s, Feature::R10, static_cast<double>(forwarded_conns[w].size()));
    set(s, Feature::R11, rrep_fwd[w] / win);
  }
}

void FeatureExtractor::routing_table_features(NodeId o, std::vector<LocalFeatureSample>& out) const {
  enum class State { valid, invalid, unreachable };
  struct Entry {
    int hops = 0;
    State state = State::valid;
    SimTime expires{0};  // valid: end of lifetime; otherwise: deletion time
  };
  const SimTime life = from_seconds(table_.active_lifetime);
  const SimTime grace = from_seconds(table_.delete_period);
  std::map<NodeId, Entry> table;

  // Brings an entry up to date at time t; returns false once it is deleted.
  auto age = [&](Entry& r, SimTime t) {
    if (r.state == State::valid && r.expires <= t) {
      r.state = State::invalid;
      r.expires += grace;
    }
    return r.state == State::valid || r.expires > t;
  };
  auto learn = [&](NodeId dest, int hops, SimTime t) {
    if (dest == o) return;
    table[dest] = Entry{hops, State::valid, t + life};
  };
  auto refresh = [&](NodeId dest, SimTime t) {
    auto it = table.find(dest);
    if (it != table.end() && age(it->second, t) && it->second.state == State::valid)
      it->second.expires = t + life;
  };
  auto invalidate = [&](NodeId dest, SimTime t) {
    auto it = table.find(dest);
    if (it == table.end() || !age(it->second, t) || it->second.state != State::valid) return;
    it->second.state = State::invalid;
    it->second.expires = t + grace;
  };
  auto snapshot = [&](LocalFeatureSample& s, SimTime t) {
    int valid = 0, invalid = 0, unreach = 0, max_hops = 0;
    double hop_sum = 0.0;
    for (auto it = table.begin(); it != table.end();) {
      if (!age(it->second, t)) {
        it = table.erase(it);
        continue;
      }
      switch (it->second.state) {
        case State::valid:
          ++valid;
          hop_sum += it->second.hops;
          max_hops = std::max(max_hops, it->second.hops);
          break;
        case State::invalid: ++invalid; break;
        case State::unreachable: ++unreach; break;
      }
      ++it;
    }
    set(s, Feature::R5, valid > 0 ? hop_sum / valid : 0.0);
    set(s, Feature::R7, unreach);
    set(s, Feature::R8, invalid);
    set(s, Feature::R9, valid);
    set(s, Feature::R12, max_hops);
  };

  int next_window = 0;
  const int nw = static_cast<int>(out.size());
  for (std::uint32_t i : by_observer_[static_cast<std::size_t>(o)]) {
    const auto& e = event(i);
    while (next_window < nw && windows_.end(next_window) <= e.timestamp) {
      snapshot(out[static_cast<std::size_t>(next_window)], windows_.end(next_window));
      ++next_window;
    }
    if (next_window >= nw) break;
    const SimTime t = e.timestamp;
    switch (e.kind) {
      case EventKind::rreq:
        if (e.src != o) {
          learn(source_of(e.connection_id), e.seq_number + 1, t);
        } else if (e.seq_number == 0) {
          const NodeId dest = destination_of(e.connection_id);
          auto it = table.find(dest);
          if (it == table.end() || !age(it->second, t) || it->second.state != State::valid)
            table[dest] = Entry{0, State::unreachable, t + grace};
        }
        break;
      case EventKind::rrep:
        if (e.src != o && e.dst_mac == o) learn(destination_of(e.connection_id), e.seq_number + 1, t);
        break;
      case EventKind::rerr:
        if ((e.src != o && e.dst_mac == o) || (e.src == o && e.seq_number == 0))
          invalidate(destination_of(e.connection_id), t);
        break;
      case EventKind::send:
        refresh(destination_of(e.connection_id), t);
        break;
      case EventKind::receive:
        refresh(source_of(e.connection_id), t);
        break;
      default:
        break;
    }
  }
  for (; next_window < nw; ++next_window)
    snapshot(out[static_cast<std::size_t>(next_window)], windows_.end(next_window));
}

void FeatureExtractor::transport_features(NodeId o, std::vector<LocalFeatureSample>& out) const {
  const std::size_t nw = out.size();
  struct Last {
    std::int32_t seq;
    SimTime at;
  };
  std::unordered_map<ConnectionId, Last> last;
  bool any = false;
  SimTime last_any{0};
  std::vector<int> out_of_order(nw, 0);
  std::vector<std::map<ConnectionId, Moments>> per_conn(nw);
  std::vector<Moments> global(nw);

  for (std::uint32_t i : by_observer_[static_cast<std::size_t>(o)]) {
    const auto& e = event(i);
    if (e.kind != EventKind::receive) continue;
    const int wi = windows_.index_of(e.timestamp);
    if (wi >= 0) {
      const auto w = static_cast<std::size_t>(wi);
      if (auto it = last.find(e.connection_id); it != last.end()) {
        if (e.seq_number - 1 != it->second.seq) ++out_of_order[w];
        per_conn[w][e.connection_id].add(to_seconds(e.timestamp - it->second.at));
      }
      if (any) global[w].add(to_seconds(e.timestamp - last_any));
    }
    last[e.connection_id] = {e.seq_number, e.timestamp};
    any = true;
    last_any = e.timestamp;
  }

  for (std::size_t w = 0; w < nw; ++w) {
    auto& s = out[w];
    set(s, Feature::T1, out_of_order[w] / windows_.size);
    double mean_sum = 0.0, var_sum = 0.0;
    int mean_n = 0, var_n = 0;
    for (const auto& [c, m] : per_conn[w]) {
      mean_sum += m.mean();
      ++mean_n;
      if (m.n >= 2) {
        var_sum += m.variance();
        ++var_n;
      }
    }
    set(s, Feature::T2, mean_n > 0 ? mean_sum / mean_n : 0.0, mean_n > 0);
    set(s, Feature::T3, var_n > 0 ? var_sum / var_n : 0.0, var_n > 0);
    const auto& g = global[w];
    set(s, Feature::T4, g.n > 0 ? g.mean() : 0.0, g.n > 0);
    set(s, Feature::T5, g.n >= 2 ? g.variance() : 0.0, g.n >= 2);
  }
}

std::vector<NodeId> FeatureExtractor::data_successors(NodeId o) const {
  std::set<NodeId> out;
  if (o < 0 || static_cast<std::size_t>(o) >= by_observer_.size()) return {};
  for (std::uint32_t i : by_observer_[static_cast<std::size_t>(o)]) {
    const auto& e = event(i);
    if (e.kind == EventKind::send && e.src == o) out.insert(e.dst_mac);
  }
  return {out.begin(), out.end()};
}

std::vector<NodeId> FeatureExtractor::next_hops(NodeId node, NodeId from) const {
  std::vector<NodeId> out(static_cast<std::size_t>(window_count_), kNoNode);
  if (node < 0 || static_cast<std::size_t>(node) >= by_observer_.size()) return out;
  std::unordered_set<PacketId> handed;
  std::vector<std::map<NodeId, int>> counts(out.size());
  for (std::uint32_t i : by_observer_[static_cast<std::size_t>(node)]) {
    const auto& e = event(i);
    if (e.kind == EventKind::receive && e.src == from) {
      handed.insert(e.packet_id);
    } else if (e.kind == EventKind::send && handed.count(e.packet_id)) {
      const int w = windows_.index_of(e.timestamp);
      if (w >= 0) ++counts[static_cast<std::size_t>(w)][e.dst_mac];
    }
  }
  for (std::size_t w = 0; w < out.size(); ++w) {
    int best = 0;
    for (const auto& [hop, c] : counts[w])
      if (c > best) {
        best = c;
        out[w] = hop;
      }
  }
  return out;
}

std::vector<std::int64_t> FeatureExtractor::forwarded_counts() const {
  std::vector<std::int64_t> out(by_observer_.size(), 0);
  for (const auto& e : trace_.events)
    if (e.kind == EventKind::send && e.src == e.observer && source_of(e.connection_id) != e.observer)
      ++out[static_cast<std::size_t>(e.observer)];
  return out;
}

}  // namespace stimnet::features
