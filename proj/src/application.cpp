#include "multilora/application.hpp"

#include "multilora/rng.hpp"

namespace multilora {

std::vector<std::uint8_t> make_request_payload(NodeAddress source, std::uint8_t sequence,
                                               Priority prio, std::size_t payload_bytes) {
  std::vector<std::uint8_t> payload(payload_bytes);
  if (payload_bytes == 0) {
    return payload;
  }
  payload[0] = static_cast<std::uint8_t>(prio);
  std::uint64_t state = (static_cast<std::uint64_t>(source) << 8) | sequence;
  for (std::size_t i = 1; i < payload_bytes; ++i) {
    payload[i] = static_cast<std::uint8_t>(splitmix64(state));
  }
  return payload;
}

bool check_request_payload(const Packet& request) {
  if (request.payload.empty()) {
    return false;
  }
  const std::vector<std::uint8_t> expected =
      make_request_payload(request.header.source, request.header.sequence,
                           packet_priority(request), request.payload.size());
  return expected == request.payload;
}

std::vector<std::uint8_t> ClientApp::next_request(double now, std::uint8_t sequence) {
  RequestRecord rec;
  rec.request_seq = sequence;
  rec.t_sent = now;
  outstanding_ = records_.size();
  records_.push_back(rec);
  ++issued_;
  return make_request_payload(self_, sequence, cfg_.priority, cfg_.payload_bytes);
}

bool ClientApp::on_reply(const Packet& p, double now) {
  if (!outstanding_.has_value() || p.payload.size() < 2) {
    return false;
  }
  RequestRecord& rec = records_[*outstanding_];
  if (p.payload[1] != rec.request_seq) {
    return false;  // echo does not match the outstanding request
  }
  rec.t_replied = now;
  rec.outcome = RequestOutcome::Delivered;
  outstanding_.reset();
  return true;
}

ClientApp::TimeoutAction ClientApp::on_timeout(std::uint8_t sequence, double now) {
  (void)now;
  if (!outstanding_.has_value()) {
    return TimeoutAction::Ignored;
  }
  RequestRecord& rec = records_[*outstanding_];
  if (rec.request_seq != sequence || rec.outcome != RequestOutcome::Pending) {
    return TimeoutAction::Ignored;
  }
  if (cfg_.retransmit_on_timeout) {
    return TimeoutAction::Retry;
  }
  rec.outcome = RequestOutcome::TimedOut;
  outstanding_.reset();
  return TimeoutAction::Resolved;
}

std::optional<GatewayApp::Reply> GatewayApp::serve(const Packet& request, double now) {
  if (request.header.destination == kBroadcast) {
    return std::nullopt;
  }
  const std::pair<NodeAddress, std::uint8_t> key{request.header.source,
                                                 request.header.sequence};
  for (auto it = recent_.begin(); it != recent_.end();) {
    it = now - it->second > window_s_ ? recent_.erase(it) : std::next(it);
  }
  if (auto it = recent_.find(key); it != recent_.end()) {
    ++duplicates_;
    return std::nullopt;
  }
  recent_[key] = now;
  ++served_;

  Reply reply;
  reply.destination = request.header.source;
  reply.priority = packet_priority(request);
  reply.payload = {static_cast<std::uint8_t>(reply.priority),
                   request.header.sequence, 0x00, 0x5A};
  return reply;
}

}  // namespace multilora
