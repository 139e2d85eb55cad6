#include <doctest.h>

#include <cmath>

#include "multilora/sim.hpp"
#include "oracles.hpp"

using namespace multilora;

namespace {

// Short signaling periods so convergence happens in simulated seconds.
Scenario fast_scenario() {
  Scenario s;
  s.hello_period_s = 2.0;
  s.route_period_s = 4.0;
  s.sim_duration_s = 600.0;
  return s;
}

}  // namespace

TEST_CASE("grid construction") {
  SUBCASE("small-scale 3x3 replaces the center cell with the gateway") {
    GridSpec spec{3, 3, 4.0, GridSpec::GatewayMode::ReplaceCenter};
    const Topology topo = build_grid(spec);
    REQUIRE(topo.positions.size() == 9);
    CHECK(topo.client_count() == 8);
    CHECK(topo.gateway_index == 4);
    CHECK(topo.positions[4].x == 4.0);
    CHECK(topo.positions[4].y == 4.0);
    double max_x = 0, max_y = 0;
    for (const Position& p : topo.positions) {
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    CHECK(max_x == 8.0);  // 3 columns at 4 m spacing span 8 m
    CHECK(max_y == 8.0);
  }

  SUBCASE("large-scale grids gain a gateway at the centroid") {
    GridSpec spec{10, 10, 4000.0, GridSpec::GatewayMode::AddCenter};
    const Topology topo = build_grid(spec);
    REQUIRE(topo.positions.size() == 101);
    CHECK(topo.client_count() == 100);
    const Position gw = topo.positions[topo.gateway_index];
    CHECK(gw.x == 18000.0);
    CHECK(gw.y == 18000.0);
    // multi-hop: the far corner is several hops out
    const auto hops = test::bfs_hops_from_gateway(topo, 4000.0);
    int max_hops = 0;
    for (int h : hops) {
      REQUIRE(h >= 0);  // connected
      max_hops = std::max(max_hops, h);
    }
    CHECK(max_hops >= 5);
  }

  SUBCASE("two nodes, one hop") {
    GridSpec spec{1, 2, 4.0, GridSpec::GatewayMode::ReplaceCenter};
    const Topology topo = build_grid(spec);
    CHECK(topo.positions.size() == 2);
    CHECK(topo.client_count() == 1);
  }

  SUBCASE("degenerate grids are rejected") {
    CHECK_THROWS_AS(build_grid({1, 1, 4.0, GridSpec::GatewayMode::ReplaceCenter}),
                    InvalidSpecError);
    CHECK_THROWS_AS(build_grid({0, 5, 4.0, GridSpec::GatewayMode::AddCenter}),
                    InvalidSpecError);
    CHECK_THROWS_AS(build_grid({2, 2, 0.0, GridSpec::GatewayMode::AddCenter}),
                    InvalidSpecError);
  }
}

TEST_CASE("setup radio tables") {
  CHECK(radios_for_setup(1, 4.0).size() == 1);
  CHECK(radios_for_setup(1, 4.0)[0].bandwidth_hz == 125000);
  CHECK(radios_for_setup(2, 4.0).size() == 2);
  CHECK(radios_for_setup(2, 4.0)[1].bandwidth_hz == 125000);
  CHECK(radios_for_setup(3, 4.0)[0].bandwidth_hz == 250000);
  CHECK(radios_for_setup(3, 4.0)[0].channel_id !=
        radios_for_setup(3, 4.0)[1].channel_id);
  CHECK_THROWS_AS(radios_for_setup(4, 4.0), InvalidSpecError);
}

TEST_CASE("metric formulas") {
  const auto rec = [](double sent_at, double replied_at) {
    RequestRecord r;
    r.t_sent = sent_at;
    if (replied_at > 0) {
      r.t_replied = replied_at;
      r.outcome = RequestOutcome::Delivered;
    } else {
      r.outcome = RequestOutcome::TimedOut;
    }
    return r;
  };

  SUBCASE("PLR is the loss percentage") {
    std::vector<RequestRecord> records;
    for (int i = 0; i < 990; ++i) records.push_back(rec(i, i + 1.0));
    for (int i = 0; i < 10; ++i) records.push_back(rec(1000 + i, -1));
    const auto report = compute_metrics({{0x01, records}}, 1000);
    CHECK(report.plr_percent == doctest::Approx(1.0));
    CHECK(report.sent == 1000);
    CHECK(report.received == 990);
  }

  SUBCASE("constant delays mean zero jitter") {
    const std::vector<RequestRecord> records{rec(0, 1.0), rec(2, 3.0), rec(4, 5.0)};
    const auto report = compute_metrics({{0x01, records}}, 3);
    CHECK(report.apd_s == doctest::Approx(1.0));
    CHECK(report.jitter_s == doctest::Approx(0.0));
  }

  SUBCASE("two delays: APD is their mean, jitter their gap") {
    const std::vector<RequestRecord> records{rec(0, 1.0), rec(2, 3.2)};
    const auto report = compute_metrics({{0x01, records}}, 2);
    CHECK(report.apd_s == doctest::Approx(1.1));
    CHECK(report.jitter_s == doctest::Approx(0.2));
  }

  SUBCASE("an empty run is an error") {
    CHECK_THROWS_AS(compute_metrics({}, 0), EmptyRunError);
  }
}

TEST_CASE("identical seeds replay identical runs") {
  Scenario s = fast_scenario();
  s.grid = {2, 2, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.setup = 2;
  s.packet_size_bytes = 64;
  s.requests_per_node = 5;
  s.rng_seed = 77;

  const MetricsReport a = run_scenario(s);
  const MetricsReport b = run_scenario(s);
  CHECK(a == b);

  Scenario other = s;
  other.rng_seed = 78;
  const MetricsReport c = run_scenario(other);
  CHECK(a.sent == c.sent);  // workload identical, timings differ
}

TEST_CASE("two nodes, one request: delay equals the two frames on air") {
  Scenario s;
  s.grid = {1, 2, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.setup = 1;
  s.packet_size_bytes = 128;
  s.requests_per_node = 1;
  s.hello_period_s = 50.0;
  s.route_period_s = 100.0;
  s.discovery_duration_s = 50.0;
  s.learning_duration_s = 100.0;
  s.sim_duration_s = 400.0;
  s.rng_seed = 1;

  const MetricsReport report = run_scenario(s);
  CHECK(report.plr_percent == 0.0);
  CHECK(report.sent == 1);
  CHECK(report.received == 1);

  const double expected =
      test::toa_oracle(128, 7, 125000) + test::toa_oracle(20, 7, 125000);
  CHECK(std::abs(report.apd_s - expected) <= 1.0e-3);
}

TEST_CASE("two radios halve the two-node exchange to the fragment times") {
  // Both fragments of a frame start at the same instant, so the exchange
  // lasts one 72-byte fragment plus one 18-byte reply fragment on air.
  Scenario s;
  s.grid = {1, 2, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.setup = 2;
  s.packet_size_bytes = 128;
  s.requests_per_node = 1;
  s.hello_period_s = 50.0;
  s.route_period_s = 100.0;
  s.discovery_duration_s = 50.0;
  s.learning_duration_s = 100.0;
  s.sim_duration_s = 400.0;
  s.rng_seed = 1;

  const MetricsReport report = run_scenario(s);
  CHECK(report.plr_percent == 0.0);
  const double expected =
      test::toa_oracle(72, 7, 125000) + test::toa_oracle(18, 7, 125000);
  CHECK(std::abs(report.apd_s - expected) <= 1.0e-3);
}

TEST_CASE("conservation holds per flow and globally") {
  Scenario s = fast_scenario();
  s.grid = {3, 3, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.setup = 1;
  s.packet_size_bytes = 256;  // long frames load the channel
  s.requests_per_node = 8;
  s.reply_timeout_s = 2.0;
  s.rng_seed = 5;

  const MetricsReport report = run_scenario(s);
  long delivered = 0, timed_out = 0;
  for (const FlowStats& flow : report.flows) {
    CHECK(flow.delivered + flow.timed_out == flow.sent);
    delivered += flow.delivered;
    timed_out += flow.timed_out;
  }
  CHECK(delivered + timed_out == report.sent);
  CHECK(report.sent == 8 * 8);
  CHECK(report.payload_errors == 0);
  for (const FlowStats& flow : report.flows) {
    for (double d : flow.delays) {
      CHECK(d > 0.0);
      CHECK(d <= s.reply_timeout_s);
    }
  }
}

TEST_CASE("without collisions a connected grid loses nothing") {
  Scenario s = fast_scenario();
  s.grid = {3, 3, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.setup = 2;
  s.packet_size_bytes = 128;
  s.requests_per_node = 5;
  s.collisions_enabled = false;
  s.rng_seed = 9;

  const MetricsReport report = run_scenario(s);
  CHECK(report.plr_percent == 0.0);
  CHECK(report.received == report.sent);
  CHECK(report.collisions == 0);
  CHECK(report.payload_errors == 0);
}

TEST_CASE("learned distances equal BFS hop counts") {
  Scenario s;
  s.grid = {3, 3, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.setup = 1;
  s.requests_per_node = 0;  // signaling only
  s.collisions_enabled = false;
  s.hello_period_s = 1.0;
  s.route_period_s = 2.0;
  s.discovery_duration_s = 2.0;
  s.learning_duration_s = 12.0;
  s.sim_duration_s = 14.0;
  s.rng_seed = 3;

  Simulator sim(s);
  sim.run();

  const Topology topo = build_grid(s.grid);
  const auto hops = test::bfs_hops_from_gateway(topo, s.tx_range_m);
  const NodeAddress gw = sim.gateway_address();
  for (int i = 0; i < sim.node_count(); ++i) {
    if (sim.is_gateway(i)) continue;
    const auto dist = sim.route_distance(i, gw);
    REQUIRE(dist.has_value());
    CHECK(*dist == hops[i]);
  }
}

TEST_CASE("neighbor discovery sees exactly the disk") {
  Scenario s = fast_scenario();
  s.grid = {3, 3, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.requests_per_node = 0;
  s.collisions_enabled = false;
  s.hello_period_s = 1.0;
  s.route_period_s = 2.0;
  s.discovery_duration_s = 3.0;
  s.learning_duration_s = 2.0;
  s.sim_duration_s = 6.0;

  Simulator sim(s);
  sim.run();
  // Corner cells touch 2 neighbors, edges 3, the center 4.
  const Topology topo = build_grid(s.grid);
  for (int i = 0; i < sim.node_count(); ++i) {
    int expected = 0;
    for (int j = 0; j < sim.node_count(); ++j) {
      if (i != j &&
          distance_m(topo.positions[i], topo.positions[j]) <= s.tx_range_m) {
        ++expected;
      }
    }
    CHECK(sim.neighbor_count(i) == expected);
  }
}

TEST_CASE("retransmission recovers losses on a hidden-terminal line") {
  // Two end clients of a 1x3 line cannot hear each other; without
  // retransmission some of their requests collide at the middle gateway
  // and are lost for good.
  Scenario s;
  s.grid = {1, 3, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.setup = 1;
  s.packet_size_bytes = 128;
  s.requests_per_node = 8;
  s.request_interval_s = 1.0;
  s.reply_timeout_s = 2.0;
  s.hello_period_s = 60.0;
  s.route_period_s = 120.0;
  s.sim_duration_s = 4000.0;
  s.rng_seed = 26;  // a seed whose baseline run loses a request

  const MetricsReport base = run_scenario(s);

  Scenario retry = s;
  retry.retransmit_on_timeout = true;
  const MetricsReport recovered = run_scenario(retry);

  CHECK(base.plr_percent > 0.0);
  CHECK(recovered.plr_percent == 0.0);
  CHECK(recovered.received == recovered.sent);
}

TEST_CASE("a simulator only runs once") {
  Scenario s = fast_scenario();
  s.grid = {1, 2, 4.0, GridSpec::GatewayMode::ReplaceCenter};
  s.requests_per_node = 1;
  Simulator sim(s);
  sim.run();
  CHECK_THROWS_AS(sim.run(), std::logic_error);
}

TEST_CASE("scenario validation rejects bad fields") {
  Scenario s;
  s.packet_size_bytes = 16;  // no room for the priority byte
  CHECK_THROWS_AS(s.validate(), InvalidSpecError);
  s = Scenario{};
  s.setup = 9;
  CHECK_THROWS_AS(s.validate(), InvalidSpecError);
  s = Scenario{};
  s.priority_overrides[99] = Priority::High;
  CHECK_THROWS_AS(s.validate(), InvalidSpecError);
  s = Scenario{};
  s.data_ttl = 0;
  CHECK_THROWS_AS(s.validate(), InvalidSpecError);
  Scenario ok;
  CHECK_NOTHROW(ok.validate());
}
