#ifndef MULTILORA_MAC_HPP
#define MULTILORA_MAC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "multilora/codec.hpp"
#include "multilora/phy.hpp"

namespace multilora {

struct MacConfig {
  double backoff_max_s = 0.1;       // uniform random LBT backoff bound
  std::vector<RadioConfig> radios;  // length 1 or 2
  // Unmatched fragments and dedup entries are discarded after this long.
  // Zero or negative means "derive": 3x the ToA of a full 256-byte frame.
  double reassembly_timeout_s = 0.0;

  double effective_reassembly_timeout_s() const;
};

struct RadioAssignment {
  int radio_index = 0;
  Packet packet;
};

// Decides what each radio transmits for one outbound packet. Signaling
// (hello/route) goes out identically on every radio (frequency diversity).
// Data on two radios is fragmented, the leading half on radio 0 and the
// trailing half on radio 1 (frequency multiplexing); payloads too small to
// split go out whole on radio 0. All assignments of one call are meant to
// start at the same instant.
std::vector<RadioAssignment> split_for_radios(const Packet& p, int num_radios);

struct MacStats {
  std::uint64_t duplicates_suppressed = 0;
  std::uint64_t fragment_timeouts = 0;  // packets dropped with one half missing
};

// Per-node receive-side MAC: demultiplexes fragments back into whole data
// packets and suppresses duplicate diversity copies.
class Mac {
 public:
  explicit Mac(MacConfig cfg);

  // Returns the packet to hand upward, if any: hello/route/data pass
  // through (deduplicated), fragments wait for their counterpart.
  std::optional<Packet> receive(const Packet& p, int radio_index, double now);

  // Discards pending fragments and dedup entries older than the timeout.
  void purge(double now);

  const MacStats& stats() const { return stats_; }
  const MacConfig& config() const { return config_; }

 private:
  bool seen_recently(const Packet& p, double now);

  using FragmentKey = std::pair<NodeAddress, std::uint8_t>;   // source, sequence
  using DedupKey = std::tuple<NodeAddress, std::uint8_t, std::uint8_t>;

  MacConfig config_;
  double timeout_s_;
  std::map<FragmentKey, std::pair<Packet, double>> pending_;  // fragment, arrival
  std::map<DedupKey, double> recent_;
  MacStats stats_;
};

}  // namespace multilora

#endif  // MULTILORA_MAC_HPP
