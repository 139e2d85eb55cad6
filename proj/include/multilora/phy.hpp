#ifndef MULTILORA_PHY_HPP
#define MULTILORA_PHY_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "multilora/codec.hpp"

namespace multilora {

// LoRa modem parameters for one radio. Nodes with two radios put them on
// distinct channel_ids; all time-on-air math assumes explicit header, CRC
// enabled, and low-data-rate optimization off.
struct RadioConfig {
  int spreading_factor = 7;    // 7..12
  int bandwidth_hz = 125000;   // 125000, 250000 or 500000
  int coding_rate = 4;         // 1..4, meaning 4/5..4/8
  int preamble_symbols = 8;    // >= 6
  int channel_id = 0;
  double tx_range_m = 4.0;
};

class InvalidConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Frame duration in seconds for the given modem settings, per the SX1276
// datasheet: symbol time 2^SF/BW, preamble (n+4.25) symbols, payload
// 8 + max(ceil((8*PL - 4*SF + 28 + 16) / (4*SF)) * (CR+4), 0) symbols.
double time_on_air(int frame_bytes, const RadioConfig& cfg);

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance_m(Position a, Position b);

// Disk propagation: receivable iff Euclidean distance <= tx_range_m.
bool in_range(Position a, Position b, const RadioConfig& cfg);

// One frame on the air. The interval is half-open: [t_start, t_end).
struct Transmission {
  int frame_bytes = 0;
  NodeAddress sender = 0;
  int channel_id = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  Packet packet;
};

bool intervals_overlap(double a_start, double a_end, double b_start, double b_end);

enum class RxOutcome { Delivered, Collided };

// Timestamp-overlap collision rule, evaluated at one receiver. active holds
// the in-range transmissions visible to the receiver; receiver_own holds the
// receiver's own transmissions (half-duplex). A transmission is delivered
// iff no other same-channel element of active overlaps it and the receiver
// was not transmitting on that channel during its interval. There is no
// capture effect: every overlapping transmission is discarded.
// The result is indexed like active.
std::vector<RxOutcome> deliver_or_collide(std::span<const Transmission> active,
                                          std::span<const Transmission> receiver_own);

// LBT carrier sense: busy iff any listed transmission on channel_id covers
// the instant now. Callers pass the transmissions in range of the sensing
// radio, including the node's own.
bool channel_busy(std::span<const Transmission> in_range, int channel_id, double now);

}  // namespace multilora

#endif  // MULTILORA_PHY_HPP
