#include "multilora/network.hpp"

#include <cmath>
#include <sstream>

namespace multilora {

Priority packet_priority(const Packet& p) {
  if (p.header.type == PacketType::Data && !p.payload.empty()) {
    const std::uint8_t b = p.payload[0];
    if (b >= 1 && b <= 3) {
      return static_cast<Priority>(b);
    }
  }
  return Priority::Low;
}

bool PriorityQueues::enqueue(Packet p, Priority prio) {
  std::deque<Packet>* q = nullptr;
  switch (prio) {
    case Priority::High: q = &high_; break;
    case Priority::Normal: q = &normal_; break;
    case Priority::Low: q = &low_; break;
  }
  if (q->size() >= capacity_) {
    ++dropped_;
    return false;
  }
  if (prio == Priority::High) ++enqueued_high_;
  q->push_back(std::move(p));
  max_depth_ = std::max(max_depth_, size());
  return true;
}

std::optional<Packet> PriorityQueues::dequeue() {
  for (std::deque<Packet>* q : {&high_, &normal_, &low_}) {
    if (!q->empty()) {
      Packet p = std::move(q->front());
      q->pop_front();
      return p;
    }
  }
  return std::nullopt;
}

Router::Router(NodeAddress self, NetworkConfig cfg)
    : self_(self), cfg_(cfg), queues_(cfg.queue_capacity) {}

Packet Router::make_hello(double now) {
  (void)now;
  Packet p;
  p.header.ttl = 1;
  p.header.size = kHeaderBytes;
  p.header.source = self_;
  p.header.destination = kBroadcast;
  p.header.next_hop = kBroadcast;
  p.header.sequence = ++hello_seq_;
  p.header.type = PacketType::Hello;
  queues_.enqueue(p, Priority::Low);
  return p;
}

void Router::touch_neighbor(NodeAddress addr, double now) {
  auto [it, inserted] = neighbors_.try_emplace(addr);
  if (inserted) {
    it->second.address = addr;
    it->second.packet_success = 1.0;
  }
  it->second.last_heard = now;
}

double Router::neighbor_success(NodeAddress addr) const {
  auto it = neighbors_.find(addr);
  return it == neighbors_.end() ? 0.0 : it->second.packet_success;
}

void Router::on_hello(const Packet& p, double now) {
  if (p.header.type != PacketType::Hello || p.header.source == self_) {
    return;
  }
  touch_neighbor(p.header.source, now);
  NeighborEntry& n = neighbors_[p.header.source];
  if (!n.hello_seen) {
    n.hello_seen = true;
    n.last_sequence = p.header.sequence;
    return;
  }
  const std::uint8_t gap =
      static_cast<std::uint8_t>(p.header.sequence - n.last_sequence);
  if (gap == 0) {
    return;  // duplicate, dedup normally filters these out upstream
  }
  // gap-1 hellos were missed before this one arrived.
  const double a = cfg_.ewma_alpha;
  for (std::uint8_t i = 1; i < gap; ++i) {
    n.packet_success = (1.0 - a) * n.packet_success;
  }
  n.packet_success = (1.0 - a) * n.packet_success + a;
  n.last_sequence = p.header.sequence;
  n.metric = n.packet_success;
}

std::uint8_t Router::wire_metric_for(const RouteEntry& r) const {
  // Advertised metric byte: this node's packet success toward the route's
  // next hop, as a percentage.
  return static_cast<std::uint8_t>(
      std::lround(neighbor_success(r.next_hop) * 100.0));
}

std::vector<Packet> Router::make_route_messages(double now) {
  (void)now;
  std::vector<WireRouteEntry> entries;
  entries.reserve(routes_.size() + 1);
  WireRouteEntry self_entry;
  self_entry.destination = self_;
  self_entry.distance = 0;
  self_entry.sequence = message_seq_;
  self_entry.metric = 100;
  self_entry.priority = 3;
  entries.push_back(self_entry);
  for (const auto& [dest, r] : routes_) {
    WireRouteEntry e;
    e.destination = dest;
    e.distance = static_cast<std::uint8_t>(std::min(r.distance, 255));
    e.sequence = r.sequence;
    e.metric = wire_metric_for(r);
    e.priority = r.priority;
    entries.push_back(e);
  }
  const std::uint8_t first_seq = message_seq_;
  std::vector<Packet> packets = encode_route_message(entries, self_, first_seq);
  message_seq_ = static_cast<std::uint8_t>(message_seq_ + packets.size());
  for (const Packet& p : packets) {
    queues_.enqueue(p, Priority::Low);
  }
  return packets;
}

void Router::on_route_message(const Packet& p, double now) {
  if (p.header.type != PacketType::Route || p.header.source == self_) {
    return;
  }
  // Route messages are one-hop broadcasts, so the source is a direct
  // neighbor even if none of its hellos made it through yet.
  touch_neighbor(p.header.source, now);
  const double link_success = neighbor_success(p.header.source);

  for (const WireRouteEntry& e : decode_route_entries(p)) {
    if (e.destination == self_) {
      continue;  // the route refers to our own address
    }
    if (e.distance + 1 > cfg_.max_route_distance) {
      continue;
    }
    RouteEntry candidate;
    candidate.destination = e.destination;
    candidate.next_hop = p.header.source;
    candidate.distance = e.distance + 1;
    candidate.sequence = e.sequence;
    candidate.metric = std::min(e.metric / 100.0, link_success);
    candidate.priority = e.priority;
    candidate.last_updated = now;

    auto it = routes_.find(e.destination);
    if (it == routes_.end()) {
      routes_.emplace(e.destination, candidate);
    } else if (it->second.next_hop == candidate.next_hop) {
      // Fresh word from the hop we already use; take it even if unchanged.
      it->second = candidate;
    } else if (is_better(candidate, it->second)) {
      it->second = candidate;
    }
  }
}

bool Router::is_better(const RouteEntry& candidate, const RouteEntry& existing) const {
  const bool cand_ok = neighbor_success(candidate.next_hop) >= cfg_.success_threshold;
  const bool exist_ok = neighbor_success(existing.next_hop) >= cfg_.success_threshold;
  if (cand_ok != exist_ok) {
    return cand_ok;
  }
  if (candidate.distance != existing.distance) {
    return candidate.distance < existing.distance;
  }
  return candidate.metric > existing.metric;
}

Router::RelayResult Router::relay(Packet p, double now) {
  (void)now;
  RelayResult result;
  if (p.header.destination == self_ || p.header.destination == kBroadcast) {
    result.action = RelayAction::Deliver;
    result.packet = std::move(p);
    return result;
  }
  if (p.header.ttl == 0 || --p.header.ttl == 0) {
    ++ttl_drops_;
    result.reason = DropReason::TtlExpired;
    return result;
  }
  auto it = routes_.find(p.header.destination);
  if (it == routes_.end()) {
    ++no_route_drops_;
    result.reason = DropReason::NoRoute;
    return result;
  }
  p.header.next_hop = it->second.next_hop;
  const Priority prio = packet_priority(p);
  result.action = RelayAction::Forward;
  result.packet = p;
  queues_.enqueue(std::move(p), prio);
  return result;
}

bool Router::originate_data(NodeAddress destination, std::vector<std::uint8_t> payload,
                            Priority prio, std::uint8_t sequence, double now) {
  (void)now;
  auto it = routes_.find(destination);
  if (it == routes_.end()) {
    ++no_route_drops_;
    return false;
  }
  Packet p;
  p.header.ttl = cfg_.data_ttl;
  p.header.source = self_;
  p.header.destination = destination;
  p.header.next_hop = it->second.next_hop;
  p.header.sequence = sequence;
  p.header.type = PacketType::Data;
  p.payload = std::move(payload);
  p.header.size = static_cast<std::uint16_t>(kHeaderBytes + p.payload.size());
  queues_.enqueue(std::move(p), prio);
  return true;
}

void Router::expire_state(double now) {
  for (auto it = neighbors_.begin(); it != neighbors_.end();) {
    if (now - it->second.last_heard > cfg_.neighbor_expiry_s()) {
      it = neighbors_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = routes_.begin(); it != routes_.end();) {
    const bool stale = now - it->second.last_updated > cfg_.route_expiry_s();
    const bool orphaned = neighbors_.find(it->second.next_hop) == neighbors_.end();
    if (stale || orphaned) {
      it = routes_.erase(it);
    } else {
      ++it;
    }
  }
}

std::string Router::dump_tables() const {
  std::ostringstream os;
  os << "node " << self_ << "\nneighbors (" << neighbors_.size() << "):\n";
  for (const auto& [addr, n] : neighbors_) {
    os << "  " << addr << " success=" << n.packet_success
       << " last_seq=" << static_cast<int>(n.last_sequence)
       << " heard=" << n.last_heard << "\n";
  }
  os << "routes (" << routes_.size() << "):\n";
  for (const auto& [dest, r] : routes_) {
    os << "  " << dest << " via " << r.next_hop << " dist=" << r.distance
       << " metric=" << r.metric << " updated=" << r.last_updated << "\n";
  }
  os << "queues: depth=" << queues_.size() << " max_depth=" << queues_.max_depth()
     << " high=" << queues_.enqueued_high() << " dropped=" << queues_.dropped()
     << "\n";
  return os.str();
}

}  // namespace multilora
