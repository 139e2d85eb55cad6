#include "multilora/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <sstream>
#include <thread>

#include "multilora/mac.hpp"
#include "multilora/rng.hpp"

namespace multilora {

Topology build_grid(const GridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols < 2) {
    throw InvalidSpecError("grid needs at least two cells");
  }
  if (spec.spacing_m <= 0.0) {
    throw InvalidSpecError("grid spacing must be positive");
  }
  Topology topo;
  topo.positions.reserve(static_cast<std::size_t>(spec.rows) * spec.cols + 1);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      topo.positions.push_back({c * spec.spacing_m, r * spec.spacing_m});
    }
  }
  const Position centroid{(spec.cols - 1) * spec.spacing_m / 2.0,
                          (spec.rows - 1) * spec.spacing_m / 2.0};
  if (spec.gateway_mode == GridSpec::GatewayMode::AddCenter) {
    topo.gateway_index = static_cast<int>(topo.positions.size());
    topo.positions.push_back(centroid);
  } else {
    int best = 0;
    double best_d = distance_m(topo.positions[0], centroid);
    for (std::size_t i = 1; i < topo.positions.size(); ++i) {
      const double d = distance_m(topo.positions[i], centroid);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    topo.gateway_index = best;
  }
  return topo;
}

std::vector<RadioConfig> radios_for_setup(int setup, double tx_range_m) {
  RadioConfig base;
  base.spreading_factor = 7;
  base.coding_rate = 4;
  base.preamble_symbols = 8;
  base.tx_range_m = tx_range_m;
  switch (setup) {
    case 1: {
      base.bandwidth_hz = 125000;
      base.channel_id = 0;
      return {base};
    }
    case 2: {
      base.bandwidth_hz = 125000;
      RadioConfig second = base;
      base.channel_id = 0;
      second.channel_id = 1;
      return {base, second};
    }
    case 3: {
      base.bandwidth_hz = 250000;
      RadioConfig second = base;
      base.channel_id = 0;
      second.channel_id = 1;
      return {base, second};
    }
    default:
      throw InvalidSpecError("setup must be 1, 2 or 3");
  }
}

void Scenario::validate() const {
  build_grid(grid);
  radios_for_setup(setup, tx_range_m);
  if (packet_size_bytes < static_cast<int>(kHeaderBytes) + 1 ||
      packet_size_bytes > static_cast<int>(kMaxFrameBytes)) {
    throw InvalidSpecError("packet size must be 17..256 bytes");
  }
  if (requests_per_node < 0) {
    throw InvalidSpecError("requests_per_node must be >= 0");
  }
  if (hello_period_s <= 0 || route_period_s <= 0) {
    throw InvalidSpecError("signaling periods must be positive");
  }
  if (sim_duration_s <= 0) {
    throw InvalidSpecError("sim duration must be positive");
  }
  if (reply_timeout_s <= 0) {
    throw InvalidSpecError("reply timeout must be positive");
  }
  if (request_interval_s < 0) {
    throw InvalidSpecError("request interval must be >= 0");
  }
  if (backoff_max_s < 0) {
    throw InvalidSpecError("backoff bound must be >= 0");
  }
  if (signaling_jitter_frac < 0 || signaling_jitter_frac >= 1) {
    throw InvalidSpecError("signaling jitter fraction must be in [0, 1)");
  }
  if (app_dither_max_s < 0) {
    throw InvalidSpecError("app dither must be >= 0");
  }
  if (data_ttl < 1 || data_ttl > 255) {
    throw InvalidSpecError("data TTL must be 1..255");
  }
  if (max_route_distance < 1 || max_route_distance > 255) {
    throw InvalidSpecError("max route distance must be 1..255");
  }
  const int clients = build_grid(grid).client_count();
  for (const auto& [idx, prio] : priority_overrides) {
    if (idx < 0 || idx >= clients) {
      throw InvalidSpecError("priority override index out of range");
    }
    const int p = static_cast<int>(prio);
    if (p < 1 || p > 3) {
      throw InvalidSpecError("priority must be 1..3");
    }
  }
}

MetricsReport compute_metrics(
    const std::vector<std::pair<NodeAddress, std::vector<RequestRecord>>>& by_source,
    long sent) {
  if (sent == 0) {
    throw EmptyRunError("no requests were sent");
  }
  MetricsReport report;
  report.sent = sent;

  double delay_sum = 0.0;
  double jitter_sum = 0.0;
  int jitter_flows = 0;

  for (const auto& [source, records] : by_source) {
    FlowStats flow;
    flow.source = source;
    flow.sent = static_cast<long>(records.size());
    for (const RequestRecord& rec : records) {
      if (rec.outcome == RequestOutcome::Delivered) {
        ++flow.delivered;
        flow.delays.push_back(*rec.t_replied - rec.t_sent);
      } else {
        ++flow.timed_out;
      }
    }
    for (double d : flow.delays) {
      delay_sum += d;
    }
    if (flow.delivered > 0) {
      double fsum = 0.0;
      for (double d : flow.delays) fsum += d;
      flow.apd_s = fsum / flow.delivered;
    }
    if (flow.delays.size() >= 2) {
      double diff = 0.0;
      for (std::size_t i = 1; i < flow.delays.size(); ++i) {
        diff += std::abs(flow.delays[i] - flow.delays[i - 1]);
      }
      flow.jitter_s = diff / (flow.delays.size() - 1);
      jitter_sum += flow.jitter_s;
      ++jitter_flows;
    }
    report.received += flow.delivered;
    report.flows.push_back(std::move(flow));
  }

  const long lost = report.sent - report.received;
  report.plr_percent = 100.0 * static_cast<double>(lost) / report.sent;
  report.apd_s = report.received > 0 ? delay_sum / report.received : 0.0;
  report.jitter_s = jitter_flows > 0 ? jitter_sum / jitter_flows : 0.0;
  return report;
}

namespace {

enum class EvKind : std::uint8_t {
  HelloTimer,
  RouteTimer,
  AppSend,
  AppTimeout,
  TxEnd,
  MacRetry,
};

struct Ev {
  double time = 0.0;
  std::uint64_t ordinal = 0;
  EvKind kind = EvKind::HelloTimer;
  int node = -1;
  std::uint64_t tx_id = 0;
  std::uint8_t seq = 0;
};

struct EvLater {
  bool operator()(const Ev& a, const Ev& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.ordinal > b.ordinal;
  }
};

struct TxRecord {
  Transmission tx;
  int sender_index = -1;
  int radio_index = 0;
};

}  // namespace

struct Simulator::Impl {
  Scenario scenario;
  Topology topo;
  std::vector<RadioConfig> radios;
  Rng rng;

  struct NodeRt {
    NodeAddress addr = 0;
    Position pos;
    bool gateway = false;
    Router router;
    Mac mac;
    std::optional<ClientApp> app;
    std::optional<GatewayApp> gw;
    std::vector<double> radio_busy_until;
    std::optional<std::vector<RadioAssignment>> pending_send;

    NodeRt(NodeAddress a, Position p, bool is_gw, NetworkConfig ncfg, MacConfig mcfg)
        : addr(a), pos(p), gateway(is_gw), router(a, ncfg), mac(std::move(mcfg)) {}
  };

  std::vector<NodeRt> nodes;
  std::vector<std::vector<int>> in_range_of;  // node -> nodes within radio range

  std::priority_queue<Ev, std::vector<Ev>, EvLater> events;
  std::uint64_t next_ordinal = 0;
  std::uint64_t next_tx_id = 1;
  std::map<std::uint64_t, TxRecord> live_tx;
  double prune_horizon_s = 1.0;

  double now = 0.0;
  bool ran = false;
  bool request_resolved = false;  // triggers the all-done scan
  long issued_total = 0;
  std::uint64_t collisions = 0;
  std::uint64_t payload_errors = 0;
  MetricsReport report;

  explicit Impl(Scenario s)
      : scenario(std::move(s)),
        topo(build_grid(scenario.grid)),
        radios(radios_for_setup(scenario.setup, scenario.tx_range_m)),
        rng(scenario.rng_seed) {
    scenario.validate();

    NetworkConfig ncfg;
    ncfg.hello_period_s = scenario.hello_period_s;
    ncfg.route_period_s = scenario.route_period_s;
    ncfg.success_threshold = scenario.success_threshold;
    ncfg.data_ttl = static_cast<std::uint8_t>(scenario.data_ttl);
    ncfg.queue_capacity = scenario.queue_capacity;
    ncfg.max_route_distance = scenario.max_route_distance;

    MacConfig mcfg;
    mcfg.backoff_max_s = scenario.backoff_max_s;
    mcfg.radios = radios;

    prune_horizon_s =
        2.0 * time_on_air(static_cast<int>(kMaxFrameBytes), radios.front());

    const int total = static_cast<int>(topo.positions.size());
    nodes.reserve(total);
    int client_index = 0;
    for (int i = 0; i < total; ++i) {
      const bool is_gw = i == topo.gateway_index;
      nodes.emplace_back(static_cast<NodeAddress>(i + 1), topo.positions[i], is_gw,
                         ncfg, mcfg);
      NodeRt& n = nodes.back();
      n.radio_busy_until.assign(radios.size(), 0.0);
      if (is_gw) {
        n.gw.emplace(scenario.reply_timeout_s);
      } else {
        AppConfig acfg;
        acfg.priority = scenario.default_priority;
        if (auto it = scenario.priority_overrides.find(client_index);
            it != scenario.priority_overrides.end()) {
          acfg.priority = it->second;
        }
        acfg.payload_bytes = scenario.packet_size_bytes - kHeaderBytes;
        acfg.reply_timeout_s = scenario.reply_timeout_s;
        acfg.retransmit_on_timeout = scenario.retransmit_on_timeout;
        acfg.total_requests = scenario.requests_per_node;
        acfg.destination = static_cast<NodeAddress>(topo.gateway_index + 1);
        n.app.emplace(n.addr, acfg);
        ++client_index;
      }
    }

    in_range_of.resize(total);
    const double range = scenario.tx_range_m;
    for (int a = 0; a < total; ++a) {
      for (int b = 0; b < total; ++b) {
        if (a != b && distance_m(nodes[a].pos, nodes[b].pos) <= range) {
          in_range_of[a].push_back(b);
        }
      }
    }
  }

  void schedule(double t, EvKind kind, int node, std::uint64_t tx_id = 0,
                std::uint8_t seq = 0) {
    if (t < now) {
      throw std::logic_error("event scheduled in the past");
    }
    events.push(Ev{t, next_ordinal++, kind, node, tx_id, seq});
  }

  bool cap_reached() const {
    return scenario.total_request_cap > 0 &&
           issued_total >= scenario.total_request_cap;
  }

  bool all_clients_done() const {
    for (const NodeRt& n : nodes) {
      if (n.app.has_value() && !n.app->finished() &&
          !(cap_reached() && n.app->wants_request())) {
        return false;
      }
    }
    return true;
  }

  double jittered(double period) {
    const double f = scenario.signaling_jitter_frac;
    return period * (1.0 + f * (2.0 * rng.uniform01() - 1.0));
  }

  bool channel_busy_at(const NodeRt& node, int channel_id, double t) const {
    for (const auto& [id, rec] : live_tx) {
      if (rec.tx.channel_id != channel_id) continue;
      if (rec.tx.t_start <= t && t < rec.tx.t_end &&
          distance_m(nodes[rec.sender_index].pos, node.pos) <= scenario.tx_range_m) {
        return true;
      }
    }
    return false;
  }

  double channel_idle_at(const NodeRt& node, int channel_id, double t) const {
    double idle = t;
    for (const auto& [id, rec] : live_tx) {
      if (rec.tx.channel_id != channel_id) continue;
      if (rec.tx.t_start <= t && t < rec.tx.t_end &&
          distance_m(nodes[rec.sender_index].pos, node.pos) <= scenario.tx_range_m) {
        idle = std::max(idle, rec.tx.t_end);
      }
    }
    return idle;
  }

  void try_start_next(int ni) {
    NodeRt& node = nodes[ni];
    if (node.pending_send.has_value()) {
      return;  // a send is already committed and waiting for the medium
    }
    for (double busy : node.radio_busy_until) {
      if (busy > now) return;
    }
    std::optional<Packet> next = node.router.queues().dequeue();
    if (!next.has_value()) return;
    node.pending_send = split_for_radios(*next, static_cast<int>(radios.size()));
    attempt_send(ni);
  }

  void attempt_send(int ni) {
    NodeRt& node = nodes[ni];
    if (!node.pending_send.has_value()) return;

    bool busy = false;
    double idle_at = now;
    for (const RadioAssignment& a : *node.pending_send) {
      const int ch = radios[a.radio_index].channel_id;
      if (channel_busy_at(node, ch, now)) {
        busy = true;
        idle_at = std::max(idle_at, channel_idle_at(node, ch, now));
      }
    }
    if (busy) {
      const double retry =
          idle_at + rng.uniform(0.0, node.mac.config().backoff_max_s);
      schedule(retry, EvKind::MacRetry, ni);
      return;
    }

    for (const RadioAssignment& a : *node.pending_send) {
      const RadioConfig& rc = radios[a.radio_index];
      const double toa = time_on_air(a.packet.header.size, rc);
      const std::uint64_t id = next_tx_id++;
      TxRecord rec;
      rec.tx.frame_bytes = a.packet.header.size;
      rec.tx.sender = node.addr;
      rec.tx.channel_id = rc.channel_id;
      rec.tx.t_start = now;
      rec.tx.t_end = now + toa;
      rec.tx.packet = a.packet;
      rec.sender_index = ni;
      rec.radio_index = a.radio_index;
      live_tx.emplace(id, std::move(rec));
      node.radio_busy_until[a.radio_index] = now + toa;
      schedule(now + toa, EvKind::TxEnd, ni, id);
    }
    node.pending_send.reset();
  }

  void deliver_to_app(int ni, const Packet& p) {
    NodeRt& node = nodes[ni];
    if (node.gateway) {
      if (p.header.destination == node.addr && !check_request_payload(p)) {
        ++payload_errors;
      }
      auto reply = node.gw->serve(p, now);
      if (reply.has_value()) {
        node.router.originate_data(reply->destination, std::move(reply->payload),
                                   reply->priority,
                                   node.router.next_message_sequence(), now);
        try_start_next(ni);
      }
      return;
    }
    if (!node.app.has_value()) return;
    if (node.app->on_reply(p, now)) {
      request_resolved = true;
      schedule_next_request(ni);
    }
  }

  // The next request honors both the closed loop (previous one resolved)
  // and the configured pacing between issues.
  void schedule_next_request(int ni) {
    NodeRt& node = nodes[ni];
    if (!node.app->wants_request() || cap_reached()) {
      return;
    }
    const double dithered = now + rng.uniform(0.0, scenario.app_dither_max_s);
    const double paced =
        node.app->records().back().t_sent + scenario.request_interval_s;
    schedule(std::max(dithered, paced), EvKind::AppSend, ni);
  }

  void handle_rx(int ni, const Packet& frame, int radio_index) {
    NodeRt& node = nodes[ni];
    std::optional<Packet> up = node.mac.receive(frame, radio_index, now);
    if (!up.has_value()) return;

    switch (up->header.type) {
      case PacketType::Hello:
        node.router.on_hello(*up, now);
        return;
      case PacketType::Route:
        node.router.on_route_message(*up, now);
        return;
      case PacketType::Data: {
        if (up->header.next_hop != node.addr && up->header.next_hop != kBroadcast) {
          return;  // overheard traffic for someone else
        }
        Router::RelayResult rr = node.router.relay(std::move(*up), now);
        if (rr.action == Router::RelayAction::Deliver) {
          deliver_to_app(ni, rr.packet);
        } else if (rr.action == Router::RelayAction::Forward) {
          try_start_next(ni);
        }
        return;
      }
      default:
        return;  // fragments never reach this point
    }
  }

  void handle_tx_end(int ni, std::uint64_t tx_id) {
    auto it = live_tx.find(tx_id);
    if (it == live_tx.end()) return;
    const TxRecord rec = it->second;  // copied; pruning may erase the original

    for (int ri : in_range_of[ni]) {
      NodeRt& receiver = nodes[ri];
      const int channel = rec.tx.channel_id;
      if (channel >= static_cast<int>(radios.size())) continue;

      bool delivered = true;
      if (scenario.collisions_enabled) {
        std::vector<Transmission> active{rec.tx};
        std::vector<Transmission> own;
        for (const auto& [oid, other] : live_tx) {
          if (oid == tx_id || other.tx.channel_id != channel) continue;
          if (other.sender_index == ri) {
            own.push_back(other.tx);
            continue;
          }
          if (distance_m(nodes[other.sender_index].pos, receiver.pos) >
              scenario.tx_range_m) {
            continue;
          }
          if (intervals_overlap(other.tx.t_start, other.tx.t_end, rec.tx.t_start,
                                rec.tx.t_end)) {
            active.push_back(other.tx);
          }
        }
        delivered = deliver_or_collide(active, own)[0] == RxOutcome::Delivered;
      }
      if (delivered) {
        handle_rx(ri, rec.tx.packet, channel);
      } else {
        ++collisions;
      }
    }

    // The frame must stay visible until every overlapping frame has been
    // judged; prune only well-past records.
    for (auto pit = live_tx.begin(); pit != live_tx.end();) {
      if (pit->second.tx.t_end <= now - prune_horizon_s) {
        pit = live_tx.erase(pit);
      } else {
        ++pit;
      }
    }
    try_start_next(ni);
  }

  void handle_app_send(int ni) {
    NodeRt& node = nodes[ni];
    if (!node.app.has_value() || !node.app->wants_request() || cap_reached()) {
      return;
    }
    const std::uint8_t seq = node.router.next_message_sequence();
    std::vector<std::uint8_t> payload = node.app->next_request(now, seq);
    ++issued_total;
    node.router.originate_data(node.app->config().destination, std::move(payload),
                               node.app->config().priority, seq, now);
    schedule(now + scenario.reply_timeout_s, EvKind::AppTimeout, ni, 0, seq);
    try_start_next(ni);
  }

  void handle_app_timeout(int ni, std::uint8_t seq) {
    NodeRt& node = nodes[ni];
    if (!node.app.has_value()) return;
    switch (node.app->on_timeout(seq, now)) {
      case ClientApp::TimeoutAction::Ignored:
        return;
      case ClientApp::TimeoutAction::Resolved:
        request_resolved = true;
        schedule_next_request(ni);
        return;
      case ClientApp::TimeoutAction::Retry: {
        // Same request, same sequence; the record and its t_sent stand.
        std::vector<std::uint8_t> payload = make_request_payload(
            node.addr, seq, node.app->config().priority,
            node.app->config().payload_bytes);
        node.router.originate_data(node.app->config().destination,
                                   std::move(payload),
                                   node.app->config().priority, seq, now);
        schedule(now + scenario.reply_timeout_s, EvKind::AppTimeout, ni, 0, seq);
        try_start_next(ni);
        return;
      }
    }
  }

  MetricsReport run() {
    if (ran) {
      throw std::logic_error("Simulator::run may only be called once");
    }
    ran = true;

    const double discovery_end = scenario.discovery_end_s();
    const double forwarding_start = scenario.learning_end_s();
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      const double hello_jitter = rng.uniform(0.0, scenario.hello_period_s);
      const double route_jitter = rng.uniform(0.0, scenario.hello_period_s);
      const double app_jitter = rng.uniform(0.0, scenario.hello_period_s);
      schedule(hello_jitter, EvKind::HelloTimer, i);
      schedule(discovery_end + route_jitter, EvKind::RouteTimer, i);
      if (nodes[i].app.has_value() && scenario.requests_per_node > 0) {
        schedule(forwarding_start + app_jitter, EvKind::AppSend, i);
      }
    }

    while (!events.empty()) {
      const Ev ev = events.top();
      if (ev.time > scenario.sim_duration_s) break;
      events.pop();
      if (ev.time < now) {
        throw std::logic_error("event queue went backwards");
      }
      now = ev.time;
      switch (ev.kind) {
        case EvKind::HelloTimer: {
          NodeRt& n = nodes[ev.node];
          n.router.expire_state(now);
          n.router.make_hello(now);
          try_start_next(ev.node);
          schedule(now + jittered(scenario.hello_period_s), EvKind::HelloTimer,
                   ev.node);
          break;
        }
        case EvKind::RouteTimer: {
          NodeRt& n = nodes[ev.node];
          n.router.expire_state(now);
          n.router.make_route_messages(now);
          try_start_next(ev.node);
          schedule(now + jittered(scenario.route_period_s), EvKind::RouteTimer,
                   ev.node);
          break;
        }
        case EvKind::AppSend:
          handle_app_send(ev.node);
          break;
        case EvKind::AppTimeout:
          handle_app_timeout(ev.node, ev.seq);
          break;
        case EvKind::TxEnd:
          handle_tx_end(ev.node, ev.tx_id);
          break;
        case EvKind::MacRetry:
          attempt_send(ev.node);
          break;
      }
      if (request_resolved) {
        request_resolved = false;
        if (scenario.requests_per_node > 0 && all_clients_done()) {
          break;
        }
      }
    }

    // Requests still outstanding at the cutoff never got their answer.
    std::vector<std::pair<NodeAddress, std::vector<RequestRecord>>> by_source;
    long sent = 0;
    for (NodeRt& n : nodes) {
      if (!n.app.has_value()) continue;
      std::vector<RequestRecord> records = n.app->records();
      for (RequestRecord& rec : records) {
        if (rec.outcome == RequestOutcome::Pending) {
          rec.outcome = RequestOutcome::TimedOut;
        }
      }
      sent += static_cast<long>(records.size());
      by_source.emplace_back(n.addr, std::move(records));
    }

    if (sent > 0) {
      report = compute_metrics(by_source, sent);
    }
    report.collisions = collisions;
    report.payload_errors = payload_errors;
    for (const NodeRt& n : nodes) {
      report.fragment_timeouts += n.mac.stats().fragment_timeouts;
      report.duplicates += n.mac.stats().duplicates_suppressed;
      report.queue_drops += n.router.queues().dropped();
      report.ttl_drops += n.router.ttl_drops();
      report.no_route_drops += n.router.no_route_drops();
      if (n.gw.has_value()) {
        report.duplicates += n.gw->duplicates();
      }
    }
    return report;
  }
};

Simulator::Simulator(Scenario scenario) : impl_(new Impl(std::move(scenario))) {}
Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

MetricsReport Simulator::run() { return impl_->run(); }

int Simulator::node_count() const { return static_cast<int>(impl_->nodes.size()); }
int Simulator::client_count() const { return impl_->topo.client_count(); }

NodeAddress Simulator::gateway_address() const {
  return static_cast<NodeAddress>(impl_->topo.gateway_index + 1);
}

NodeAddress Simulator::node_address(int node_index) const {
  return impl_->nodes.at(node_index).addr;
}

Position Simulator::node_position(int node_index) const {
  return impl_->nodes.at(node_index).pos;
}

bool Simulator::is_gateway(int node_index) const {
  return impl_->nodes.at(node_index).gateway;
}

std::optional<int> Simulator::route_distance(int node_index,
                                             NodeAddress destination) const {
  const auto& routes = impl_->nodes.at(node_index).router.routes();
  auto it = routes.find(destination);
  if (it == routes.end()) return std::nullopt;
  return it->second.distance;
}

int Simulator::neighbor_count(int node_index) const {
  return static_cast<int>(impl_->nodes.at(node_index).router.neighbors().size());
}

bool Simulator::table_invariants_hold(int node_index) const {
  const Router& router = impl_->nodes.at(node_index).router;
  for (const auto& [dest, route] : router.routes()) {
    if (dest == router.address()) return false;
    if (route.distance < 1) return false;
    if (router.neighbors().find(route.next_hop) == router.neighbors().end()) {
      return false;
    }
  }
  return true;
}

std::string Simulator::dump_tables(int node_index) const {
  return impl_->nodes.at(node_index).router.dump_tables();
}

MetricsReport run_scenario(const Scenario& scenario) {
  Simulator sim(scenario);
  return sim.run();
}

std::vector<MetricsReport> run_repetitions(const Scenario& base, int reps,
                                           std::uint64_t base_seed, int workers) {
  std::vector<MetricsReport> out(static_cast<std::size_t>(std::max(reps, 0)));
  if (reps <= 0) return out;
  workers = std::clamp(workers, 1, reps);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < reps; i = next.fetch_add(1)) {
      Scenario s = base;
      s.rng_seed = base_seed + static_cast<std::uint64_t>(i);
      out[static_cast<std::size_t>(i)] = run_scenario(s);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return out;
}

}  // namespace multilora
