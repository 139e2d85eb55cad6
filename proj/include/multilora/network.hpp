#ifndef MULTILORA_NETWORK_HPP
#define MULTILORA_NETWORK_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multilora/codec.hpp"

namespace multilora {

enum class Priority : std::uint8_t { High = 1, Normal = 2, Low = 3 };

// Application priority travels in the first payload byte of every data
// packet, so relays can classify traffic without growing the 16-byte header.
Priority packet_priority(const Packet& p);

struct NetworkConfig {
  double hello_period_s = 60.0;
  double route_period_s = 120.0;
  double success_threshold = 0.9;   // below this a link is avoided
  double ewma_alpha = 0.2;          // packet-success estimator weight
  std::uint8_t data_ttl = 8;        // initial hop budget for originated data
  std::size_t queue_capacity = 32;  // per priority class, tail drop

  // Advertised routes beyond this many hops are discarded on receipt. The
  // broadcast advertisements rule out split horizon, so without a horizon
  // two neighbors can re-advertise a dead route to each other forever,
  // inflating its distance one hop per round.
  int max_route_distance = 16;

  double neighbor_expiry_s() const { return 3.0 * hello_period_s; }
  double route_expiry_s() const { return 3.0 * route_period_s; }
};

struct NeighborEntry {
  NodeAddress address = 0;
  std::uint8_t last_sequence = 0;   // last hello counter value heard
  bool hello_seen = false;          // baseline for the sequence gap
  double packet_success = 1.0;      // EWMA over expected vs received hellos
  double metric = 1.0;
  std::uint8_t priority = 3;
  double last_heard = 0.0;
};

struct RouteEntry {
  NodeAddress destination = 0;
  NodeAddress next_hop = 0;
  int distance = 0;  // >= 1; the advertised distance plus one
  std::uint8_t sequence = 0;
  double metric = 1.0;  // bottleneck link quality along the path, 0..1
  std::uint8_t priority = 3;
  double last_updated = 0.0;
};

// Three strict-priority FIFO queues. Dequeue drains High before Normal
// before Low; a full class tail-drops the arriving packet.
class PriorityQueues {
 public:
  explicit PriorityQueues(std::size_t capacity_per_queue = 32)
      : capacity_(capacity_per_queue) {}

  bool enqueue(Packet p, Priority prio);
  std::optional<Packet> dequeue();
  std::size_t size() const { return high_.size() + normal_.size() + low_.size(); }
  bool empty() const { return size() == 0; }
  std::uint64_t dropped() const { return dropped_; }
  std::size_t max_depth() const { return max_depth_; }
  std::uint64_t enqueued_high() const { return enqueued_high_; }

 private:
  std::deque<Packet> high_, normal_, low_;
  std::size_t capacity_;
  std::uint64_t dropped_ = 0;
  std::size_t max_depth_ = 0;
  std::uint64_t enqueued_high_ = 0;
};

// Per-node distance-vector state: neighbor and route tables, signaling
// generation/processing, relaying, and the outbound priority queues.
class Router {
 public:
  enum class RelayAction { Deliver, Forward, Drop };
  enum class DropReason { None, TtlExpired, NoRoute };

  struct RelayResult {
    RelayAction action = RelayAction::Drop;
    DropReason reason = DropReason::None;
    Packet packet;  // rewritten packet on Forward, the input on Deliver
  };

  Router(NodeAddress self, NetworkConfig cfg);

  // Builds the 16-byte hello and enqueues it with low priority.
  Packet make_hello(double now);

  // Neighbor-table update from a one-hop hello. Hellos are never relayed.
  void on_hello(const Packet& p, double now);

  // Serializes the routing table plus the implicit self-entry into one or
  // more Route packets (<=30 entries each) and enqueues them, low priority.
  std::vector<Packet> make_route_messages(double now);

  void on_route_message(const Packet& p, double now);

  bool is_better(const RouteEntry& candidate, const RouteEntry& existing) const;

  // Handles an upward-delivered data packet addressed to this node (or
  // broadcast). Deliver hands it to the application; Forward rewrites
  // next_hop, decrements TTL and enqueues by the packet's priority class.
  RelayResult relay(Packet p, double now);

  // Creates a data packet toward destination and enqueues it. Returns false
  // (NoRoute) when the routing table has no entry for the destination.
  bool originate_data(NodeAddress destination, std::vector<std::uint8_t> payload,
                      Priority prio, std::uint8_t sequence, double now);

  // Drops neighbors unheard for neighbor_expiry and routes that lost their
  // next hop or went unrefreshed for route_expiry.
  void expire_state(double now);

  std::uint8_t next_message_sequence() { return message_seq_++; }

  const std::map<NodeAddress, NeighborEntry>& neighbors() const { return neighbors_; }
  const std::map<NodeAddress, RouteEntry>& routes() const { return routes_; }
  PriorityQueues& queues() { return queues_; }
  const PriorityQueues& queues() const { return queues_; }
  NodeAddress address() const { return self_; }

  std::uint64_t ttl_drops() const { return ttl_drops_; }
  std::uint64_t no_route_drops() const { return no_route_drops_; }

  // Structured-text table dump for debugging.
  std::string dump_tables() const;

 private:
  void touch_neighbor(NodeAddress addr, double now);
  double neighbor_success(NodeAddress addr) const;
  std::uint8_t wire_metric_for(const RouteEntry& r) const;

  NodeAddress self_;
  NetworkConfig cfg_;
  std::map<NodeAddress, NeighborEntry> neighbors_;
  std::map<NodeAddress, RouteEntry> routes_;
  PriorityQueues queues_;
  std::uint8_t hello_seq_ = 0;    // hellos only, drives the loss estimator
  std::uint8_t message_seq_ = 0;  // route/data/reply packets
  std::uint64_t ttl_drops_ = 0;
  std::uint64_t no_route_drops_ = 0;
};

}  // namespace multilora

#endif  // MULTILORA_NETWORK_HPP
