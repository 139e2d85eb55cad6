#include "multilora/phy.hpp"

#include <cmath>
#include <string>

namespace multilora {

double time_on_air(int frame_bytes, const RadioConfig& cfg) {
  if (cfg.spreading_factor < 7 || cfg.spreading_factor > 12) {
    throw InvalidConfigError("spreading factor out of range 7..12");
  }
  if (cfg.bandwidth_hz != 125000 && cfg.bandwidth_hz != 250000 &&
      cfg.bandwidth_hz != 500000) {
    throw InvalidConfigError("bandwidth must be 125, 250 or 500 kHz");
  }
  if (cfg.coding_rate < 1 || cfg.coding_rate > 4) {
    throw InvalidConfigError("coding rate out of range 1..4");
  }
  if (cfg.preamble_symbols < 6) {
    throw InvalidConfigError("preamble must be at least 6 symbols");
  }
  if (frame_bytes < 1 || frame_bytes > static_cast<int>(kMaxFrameBytes)) {
    throw InvalidConfigError("frame length out of range 1..256 bytes");
  }

  const double symbol_s =
      std::ldexp(1.0, cfg.spreading_factor) / cfg.bandwidth_hz;
  const double preamble_s = (cfg.preamble_symbols + 4.25) * symbol_s;

  // Explicit header (IH=0), CRC on (CRC=1), low-data-rate optimization off.
  const int numerator = 8 * frame_bytes - 4 * cfg.spreading_factor + 28 + 16;
  const int denominator = 4 * cfg.spreading_factor;
  int extra_symbols = 0;
  if (numerator > 0) {
    const int groups = (numerator + denominator - 1) / denominator;
    extra_symbols = groups * (cfg.coding_rate + 4);
  }
  const double payload_s = (8 + extra_symbols) * symbol_s;

  return preamble_s + payload_s;
}

double distance_m(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

bool in_range(Position a, Position b, const RadioConfig& cfg) {
  return distance_m(a, b) <= cfg.tx_range_m;
}

bool intervals_overlap(double a_start, double a_end, double b_start, double b_end) {
  return a_start < b_end && b_start < a_end;
}

std::vector<RxOutcome> deliver_or_collide(std::span<const Transmission> active,
                                          std::span<const Transmission> receiver_own) {
  std::vector<RxOutcome> outcomes(active.size(), RxOutcome::Delivered);
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Transmission& tx = active[i];
    bool collided = false;
    for (std::size_t j = 0; j < active.size() && !collided; ++j) {
      if (j == i) continue;
      if (active[j].channel_id != tx.channel_id) continue;
      collided = intervals_overlap(tx.t_start, tx.t_end, active[j].t_start,
                                   active[j].t_end);
    }
    for (std::size_t j = 0; j < receiver_own.size() && !collided; ++j) {
      if (receiver_own[j].channel_id != tx.channel_id) continue;
      collided = intervals_overlap(tx.t_start, tx.t_end, receiver_own[j].t_start,
                                   receiver_own[j].t_end);
    }
    if (collided) {
      outcomes[i] = RxOutcome::Collided;
    }
  }
  return outcomes;
}

bool channel_busy(std::span<const Transmission> in_range, int channel_id, double now) {
  for (const Transmission& tx : in_range) {
    if (tx.channel_id == channel_id && tx.t_start <= now && now < tx.t_end) {
      return true;
    }
  }
  return false;
}

}  // namespace multilora
