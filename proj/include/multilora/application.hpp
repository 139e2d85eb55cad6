#ifndef MULTILORA_APPLICATION_HPP
#define MULTILORA_APPLICATION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "multilora/network.hpp"

namespace multilora {

// Request payload layout: byte 0 is the application priority, the rest is a
// deterministic pattern derived from (source, sequence) so payload integrity
// is checkable end to end. Replies are 4 bytes: priority, echoed request
// sequence, status, pattern byte.
std::vector<std::uint8_t> make_request_payload(NodeAddress source, std::uint8_t sequence,
                                               Priority prio, std::size_t payload_bytes);
bool check_request_payload(const Packet& request);
inline constexpr std::size_t kReplyPayloadBytes = 4;

struct AppConfig {
  Priority priority = Priority::Low;
  std::size_t payload_bytes = 112;   // request payload, header excluded
  double reply_timeout_s = 5.0;
  int total_requests = 1000;
  NodeAddress destination = 0;       // usually the gateway
  bool retransmit_on_timeout = false;  // off for metric runs
};

enum class RequestOutcome { Pending, Delivered, TimedOut };

struct RequestRecord {
  std::uint8_t request_seq = 0;
  double t_sent = 0.0;
  std::optional<double> t_replied;
  RequestOutcome outcome = RequestOutcome::Pending;
};

// Closed-loop request generator: at most one outstanding request; the next
// one goes out only after the previous was answered or timed out.
class ClientApp {
 public:
  ClientApp(NodeAddress self, AppConfig cfg) : self_(self), cfg_(cfg) {}

  bool wants_request() const {
    return issued_ < cfg_.total_requests && !outstanding_.has_value();
  }
  bool finished() const {
    return issued_ == cfg_.total_requests && !outstanding_.has_value();
  }

  // Builds the next request payload and records t_sent. The header sequence
  // comes from the node's message counter.
  std::vector<std::uint8_t> next_request(double now, std::uint8_t sequence);

  // Resolves the outstanding request if the reply echoes its sequence.
  // Late and duplicate replies are ignored.
  bool on_reply(const Packet& p, double now);

  enum class TimeoutAction {
    Ignored,   // stale timer, nothing outstanding by that sequence
    Resolved,  // request counted lost, the loop may move on
    Retry,     // retransmission hook: same request goes out again
  };

  // Timeout event for a specific request; stale timers are ignored. With
  // retransmit_on_timeout the request stays outstanding and the caller
  // re-sends it, so it never counts as lost.
  TimeoutAction on_timeout(std::uint8_t sequence, double now);

  const AppConfig& config() const { return cfg_; }
  const std::vector<RequestRecord>& records() const { return records_; }
  int issued() const { return issued_; }

 private:
  NodeAddress self_;
  AppConfig cfg_;
  std::optional<std::size_t> outstanding_;  // index into records_
  std::vector<RequestRecord> records_;
  int issued_ = 0;
};

// Request sink: answers each unique (source, sequence) data packet with a
// reply of the same priority addressed back to the source.
class GatewayApp {
 public:
  explicit GatewayApp(double dedup_window_s) : window_s_(dedup_window_s) {}

  struct Reply {
    NodeAddress destination = 0;
    Priority priority = Priority::Low;
    std::vector<std::uint8_t> payload;
  };

  // Returns the reply to send, or nullopt for broadcast-addressed data and
  // duplicates of already-served requests.
  std::optional<Reply> serve(const Packet& request, double now);

  std::uint64_t served() const { return served_; }
  std::uint64_t duplicates() const { return duplicates_; }

 private:
  double window_s_;
  std::map<std::pair<NodeAddress, std::uint8_t>, double> recent_;
  std::uint64_t served_ = 0;
  std::uint64_t duplicates_ = 0;
};

}  // namespace multilora

#endif  // MULTILORA_APPLICATION_HPP
