#include <doctest.h>

#include "multilora/application.hpp"

using namespace multilora;

namespace {

AppConfig small_config() {
  AppConfig cfg;
  cfg.priority = Priority::Normal;
  cfg.payload_bytes = 112;
  cfg.reply_timeout_s = 5.0;
  cfg.total_requests = 3;
  cfg.destination = 0x0A;
  return cfg;
}

Packet reply_packet(NodeAddress from, NodeAddress to, std::uint8_t echoed_seq,
                    Priority prio) {
  Packet p;
  p.header.ttl = 8;
  p.header.source = from;
  p.header.destination = to;
  p.header.next_hop = to;
  p.header.sequence = 99;
  p.header.type = PacketType::Data;
  p.payload = {static_cast<std::uint8_t>(prio), echoed_seq, 0x00, 0x5A};
  p.header.size = static_cast<std::uint16_t>(16 + p.payload.size());
  return p;
}

}  // namespace

TEST_CASE("closed-loop request issuance") {
  ClientApp app(0x01, small_config());

  CHECK(app.wants_request());
  const auto payload = app.next_request(10.0, 1);
  CHECK(payload.size() == 112);  // a 128-byte frame carries 112 payload bytes
  CHECK_FALSE(app.wants_request());  // one outstanding at a time

  CHECK(app.on_timeout(1, 15.0) == ClientApp::TimeoutAction::Resolved);
  CHECK(app.wants_request());
  app.next_request(15.0, 2);
  CHECK(app.on_reply(reply_packet(0x0A, 0x01, 2, Priority::Normal), 16.2));
  app.next_request(16.2, 3);
  CHECK(app.on_timeout(3, 21.2) == ClientApp::TimeoutAction::Resolved);

  CHECK(app.finished());
  CHECK_FALSE(app.wants_request());
  REQUIRE(app.records().size() == 3);
  CHECK(app.records()[0].outcome == RequestOutcome::TimedOut);
  CHECK(app.records()[1].outcome == RequestOutcome::Delivered);
  CHECK(*app.records()[1].t_replied - app.records()[1].t_sent ==
        doctest::Approx(1.2));
  CHECK(app.records()[2].outcome == RequestOutcome::TimedOut);
}

TEST_CASE("zero configured requests keeps the node silent") {
  AppConfig cfg = small_config();
  cfg.total_requests = 0;
  ClientApp app(0x01, cfg);
  CHECK_FALSE(app.wants_request());
  CHECK(app.finished());
}

TEST_CASE("request payloads are deterministic and checkable") {
  const auto payload = make_request_payload(0x01, 7, Priority::High, 112);
  REQUIRE(payload.size() == 112);
  CHECK(payload[0] == 1);
  CHECK(payload == make_request_payload(0x01, 7, Priority::High, 112));
  CHECK(payload != make_request_payload(0x01, 8, Priority::High, 112));

  Packet request;
  request.header.source = 0x01;
  request.header.sequence = 7;
  request.header.type = PacketType::Data;
  request.header.destination = 0x0A;
  request.payload = payload;
  request.header.size = static_cast<std::uint16_t>(16 + payload.size());
  CHECK(check_request_payload(request));
  request.payload[50] ^= 0xFF;
  CHECK_FALSE(check_request_payload(request));
}

TEST_CASE("replies resolve only the matching outstanding request") {
  ClientApp app(0x01, small_config());
  app.next_request(0.0, 40);

  SUBCASE("wrong echo is ignored") {
    CHECK_FALSE(app.on_reply(reply_packet(0x0A, 0x01, 41, Priority::Normal), 1.0));
    CHECK(app.records()[0].outcome == RequestOutcome::Pending);
  }

  SUBCASE("late replies do not resurrect a timed-out request") {
    CHECK(app.on_timeout(40, 5.0) == ClientApp::TimeoutAction::Resolved);
    CHECK_FALSE(app.on_reply(reply_packet(0x0A, 0x01, 40, Priority::Normal), 6.0));
    CHECK(app.records()[0].outcome == RequestOutcome::TimedOut);
  }

  SUBCASE("duplicate replies are idempotent") {
    CHECK(app.on_reply(reply_packet(0x0A, 0x01, 40, Priority::Normal), 1.0));
    CHECK_FALSE(app.on_reply(reply_packet(0x0A, 0x01, 40, Priority::Normal), 1.5));
    CHECK(*app.records()[0].t_replied == 1.0);
  }

  SUBCASE("stale timeouts cannot kill a newer request") {
    CHECK(app.on_reply(reply_packet(0x0A, 0x01, 40, Priority::Normal), 1.0));
    app.next_request(1.0, 41);
    CHECK(app.on_timeout(40, 5.0) == ClientApp::TimeoutAction::Ignored);
    CHECK(app.records()[1].outcome == RequestOutcome::Pending);
  }
}

TEST_CASE("the retransmission hook keeps a timed-out request alive") {
  AppConfig cfg = small_config();
  cfg.retransmit_on_timeout = true;
  ClientApp app(0x01, cfg);

  app.next_request(0.0, 10);
  CHECK(app.on_timeout(10, 5.0) == ClientApp::TimeoutAction::Retry);
  CHECK(app.records()[0].outcome == RequestOutcome::Pending);
  CHECK_FALSE(app.wants_request());  // still outstanding

  // The reply to the retransmission resolves the original record; the
  // delay spans both attempts.
  CHECK(app.on_reply(reply_packet(0x0A, 0x01, 10, Priority::Normal), 6.3));
  CHECK(app.records()[0].outcome == RequestOutcome::Delivered);
  CHECK(*app.records()[0].t_replied - app.records()[0].t_sent ==
        doctest::Approx(6.3));
}

TEST_CASE("gateway answers each unique request once") {
  GatewayApp gw(5.0);

  Packet request;
  request.header.source = 0xA1;
  request.header.destination = 0x0A;
  request.header.sequence = 12;
  request.header.type = PacketType::Data;
  request.payload = make_request_payload(0xA1, 12, Priority::High, 48);
  request.header.size = static_cast<std::uint16_t>(16 + request.payload.size());

  const auto reply = gw.serve(request, 1.0);
  REQUIRE(reply.has_value());
  CHECK(reply->destination == 0xA1);
  CHECK(reply->priority == Priority::High);
  REQUIRE(reply->payload.size() == kReplyPayloadBytes);
  CHECK(reply->payload[1] == 12);  // echoed sequence

  SUBCASE("relayed duplicates draw no second reply") {
    CHECK_FALSE(gw.serve(request, 1.5).has_value());
    CHECK(gw.served() == 1);
    CHECK(gw.duplicates() == 1);
  }

  SUBCASE("replies equal unique requests") {
    int replies = 1;
    for (std::uint8_t seq : {13, 13, 14, 12, 14}) {
      Packet r = request;
      r.header.sequence = seq;
      r.payload = make_request_payload(0xA1, seq, Priority::High, 48);
      if (gw.serve(r, 2.0).has_value()) ++replies;
    }
    CHECK(replies == 3);  // sequences 12, 13, 14
  }

  SUBCASE("broadcast data is not served") {
    Packet bcast = request;
    bcast.header.destination = kBroadcast;
    CHECK_FALSE(gw.serve(bcast, 1.0).has_value());
  }

  SUBCASE("the dedup window slides") {
    CHECK_FALSE(gw.serve(request, 5.0).has_value());
    CHECK(gw.serve(request, 7.5).has_value());  // first sighting aged out
  }
}
