#include "multilora/mac.hpp"

namespace multilora {

double MacConfig::effective_reassembly_timeout_s() const {
  if (reassembly_timeout_s > 0.0) {
    return reassembly_timeout_s;
  }
  RadioConfig ref = radios.empty() ? RadioConfig{} : radios.front();
  return 3.0 * time_on_air(static_cast<int>(kMaxFrameBytes), ref);
}

std::vector<RadioAssignment> split_for_radios(const Packet& p, int num_radios) {
  std::vector<RadioAssignment> out;
  if (p.header.type == PacketType::Hello || p.header.type == PacketType::Route) {
    for (int r = 0; r < num_radios; ++r) {
      out.push_back({r, p});
    }
    return out;
  }
  if (num_radios >= 2 && p.payload.size() >= 2) {
    auto [more, less] = fragment_data(p);
    out.push_back({0, std::move(more)});
    out.push_back({1, std::move(less)});
    return out;
  }
  out.push_back({0, p});
  return out;
}

Mac::Mac(MacConfig cfg)
    : config_(std::move(cfg)),
      timeout_s_(config_.effective_reassembly_timeout_s()) {}

bool Mac::seen_recently(const Packet& p, double now) {
  const DedupKey key{p.header.source, p.header.sequence,
                     static_cast<std::uint8_t>(p.header.type)};
  auto it = recent_.find(key);
  if (it != recent_.end() && now - it->second <= timeout_s_) {
    it->second = now;
    ++stats_.duplicates_suppressed;
    return true;
  }
  recent_[key] = now;
  return false;
}

std::optional<Packet> Mac::receive(const Packet& p, int radio_index, double now) {
  (void)radio_index;
  purge(now);

  switch (p.header.type) {
    case PacketType::Hello:
    case PacketType::Route:
    case PacketType::Data:
      if (seen_recently(p, now)) {
        return std::nullopt;
      }
      return p;

    case PacketType::FragMore:
    case PacketType::FragLess: {
      const FragmentKey key{p.header.source, p.header.sequence};
      auto it = pending_.find(key);
      if (it == pending_.end()) {
        pending_.emplace(key, std::make_pair(p, now));
        return std::nullopt;
      }
      const Packet& held = it->second.first;
      if (held.header.type == p.header.type) {
        // Same half twice; keep the newer copy.
        it->second = {p, now};
        return std::nullopt;
      }
      const Packet& more = held.header.type == PacketType::FragMore ? held : p;
      const Packet& less = held.header.type == PacketType::FragLess ? held : p;
      Packet whole = reassemble(more, less);
      pending_.erase(it);
      if (seen_recently(whole, now)) {
        return std::nullopt;
      }
      return whole;
    }
  }
  return std::nullopt;
}

void Mac::purge(double now) {
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (now - it->second.second > timeout_s_) {
      ++stats_.fragment_timeouts;
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = recent_.begin(); it != recent_.end();) {
    if (now - it->second > timeout_s_) {
      it = recent_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace multilora
