#ifndef MULTILORA_SIM_HPP
#define MULTILORA_SIM_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "multilora/application.hpp"
#include "multilora/codec.hpp"
#include "multilora/network.hpp"
#include "multilora/phy.hpp"

namespace multilora {

class InvalidSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyRunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  int rows = 3;
  int cols = 3;
  double spacing_m = 4.0;
  // ReplaceCenter turns the cell nearest the centroid into the gateway
  // (small-scale layout); AddCenter puts the gateway at the exact centroid
  // as an extra node (large-scale layout).
  enum class GatewayMode { ReplaceCenter, AddCenter } gateway_mode =
      GatewayMode::ReplaceCenter;
};

struct Topology {
  std::vector<Position> positions;  // all nodes, gateway included
  int gateway_index = 0;

  int client_count() const { return static_cast<int>(positions.size()) - 1; }
};

Topology build_grid(const GridSpec& spec);

// Radio sets matching the evaluated setups: 1 = one radio SF7/125 kHz,
// 2 = two radios SF7/125 kHz, 3 = two radios SF7/250 kHz.
std::vector<RadioConfig> radios_for_setup(int setup, double tx_range_m);

struct Scenario {
  GridSpec grid;
  int setup = 1;
  double tx_range_m = 4.0;
  int packet_size_bytes = 128;     // request frame size, header included
  int requests_per_node = 1000;
  long total_request_cap = 0;      // 0 = no global cap

  double hello_period_s = 60.0;
  double route_period_s = 120.0;
  double discovery_duration_s = -1.0;  // < 0: defaults to 2 x hello_period
  double learning_duration_s = -1.0;   // < 0: defaults to 2 x route_period
  double sim_duration_s = 600.0;

  double reply_timeout_s = 5.0;
  double request_interval_s = 5.0;  // minimum spacing between a node's requests
  bool retransmit_on_timeout = false;  // off for metric runs
  double backoff_max_s = 0.1;
  double success_threshold = 0.9;
  int data_ttl = 8;
  int max_route_distance = 16;
  std::size_t queue_capacity = 32;

  // Hidden stations cannot hear each other, so strict periodicity would
  // replay the same collision every round. Signaling periods wander by this
  // fraction and follow-up requests wait a short random beat, as the
  // unsynchronized hardware does.
  double signaling_jitter_frac = 0.1;
  double app_dither_max_s = 0.05;

  Priority default_priority = Priority::Low;
  std::map<int, Priority> priority_overrides;  // client index -> priority

  bool collisions_enabled = true;  // test hook
  std::uint64_t rng_seed = 1;

  double discovery_end_s() const {
    return discovery_duration_s >= 0 ? discovery_duration_s : 2.0 * hello_period_s;
  }
  double learning_end_s() const {
    return discovery_end_s() +
           (learning_duration_s >= 0 ? learning_duration_s : 2.0 * route_period_s);
  }

  void validate() const;  // throws InvalidSpecError
};

struct FlowStats {
  NodeAddress source = 0;
  long sent = 0;
  long delivered = 0;
  long timed_out = 0;
  std::vector<double> delays;  // per-delivery PD in send order
  double apd_s = 0.0;
  double jitter_s = 0.0;

  bool operator==(const FlowStats&) const = default;
};

struct MetricsReport {
  double plr_percent = 0.0;
  double apd_s = 0.0;     // sum of delays over delivered count
  double jitter_s = 0.0;  // mean per-flow |PD_{i+1} - PD_i|, averaged over flows
  long sent = 0;
  long received = 0;
  std::vector<FlowStats> flows;

  // diagnostics
  std::uint64_t collisions = 0;
  std::uint64_t fragment_timeouts = 0;
  std::uint64_t queue_drops = 0;
  std::uint64_t ttl_drops = 0;
  std::uint64_t no_route_drops = 0;
  std::uint64_t duplicates = 0;
  // Requests reaching the gateway whose payload does not match the
  // deterministic sender pattern; must stay zero.
  std::uint64_t payload_errors = 0;

  bool operator==(const MetricsReport&) const = default;
};

// PLR/APD/jitter from per-source request records. sent must match the
// record count; an empty run (sent == 0) throws EmptyRunError.
MetricsReport compute_metrics(
    const std::vector<std::pair<NodeAddress, std::vector<RequestRecord>>>& by_source,
    long sent);

// Deterministic discrete-event run of one scenario. Same scenario and seed
// reproduce the identical report.
class Simulator {
 public:
  explicit Simulator(Scenario scenario);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  MetricsReport run();

  // Post-run inspection.
  int node_count() const;
  int client_count() const;
  NodeAddress gateway_address() const;
  NodeAddress node_address(int node_index) const;
  Position node_position(int node_index) const;
  bool is_gateway(int node_index) const;
  std::optional<int> route_distance(int node_index, NodeAddress destination) const;
  int neighbor_count(int node_index) const;
  // Structural table checks: every route's next hop is a current neighbor,
  // no self-routes, all distances >= 1.
  bool table_invariants_hold(int node_index) const;
  std::string dump_tables(int node_index) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

MetricsReport run_scenario(const Scenario& scenario);

// Runs reps independent repetitions with seeds base_seed, base_seed+1, ...
// across the given number of worker threads. Results are ordered by
// repetition index regardless of completion order.
std::vector<MetricsReport> run_repetitions(const Scenario& base, int reps,
                                           std::uint64_t base_seed, int workers = 1);

}  // namespace multilora

#endif  // MULTILORA_SIM_HPP
