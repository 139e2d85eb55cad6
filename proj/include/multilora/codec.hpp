#ifndef MULTILORA_CODEC_HPP
#define MULTILORA_CODEC_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace multilora {

// 4-byte node identifier. 0xFFFFFFFF is reserved for broadcast and is never
// assigned to a node.
using NodeAddress = std::uint32_t;
inline constexpr NodeAddress kBroadcast = 0xFFFFFFFFu;

inline constexpr std::size_t kHeaderBytes = 16;
inline constexpr std::size_t kMaxFrameBytes = 256;
inline constexpr std::size_t kMaxPayloadBytes = kMaxFrameBytes - kHeaderBytes;
inline constexpr std::size_t kRouteEntryBytes = 8;
inline constexpr std::size_t kNeighborEntryBytes = 8;
inline constexpr std::size_t kMaxRouteEntriesPerMessage =
    kMaxPayloadBytes / kRouteEntryBytes;  // 30

// Single ASCII character on the wire.
enum class PacketType : std::uint8_t {
  Hello = 'h',      // neighbor announcement, header only
  Route = 'r',      // routing-table advertisement
  Data = 'd',       // unfragmented application data
  FragMore = 'm',   // more-significant (leading) data fragment
  FragLess = 'l',   // less-significant (trailing) data fragment
};

bool is_valid_packet_type(std::uint8_t byte);

// Fixed 16-byte header. Multi-byte fields are big-endian on the wire.
// Field order on the wire: ttl, size, source, destination, next_hop,
// sequence, type.
struct PacketHeader {
  std::uint8_t ttl = 0;
  std::uint16_t size = kHeaderBytes;  // total frame length, 16..256
  NodeAddress source = 0;
  NodeAddress destination = 0;
  NodeAddress next_hop = 0;
  std::uint8_t sequence = 0;
  PacketType type = PacketType::Data;

  bool operator==(const PacketHeader&) const = default;
};

struct Packet {
  PacketHeader header;
  std::vector<std::uint8_t> payload;

  bool operator==(const Packet&) const = default;
};

// One 8-byte row of a route advertisement.
struct WireRouteEntry {
  NodeAddress destination = 0;
  std::uint8_t distance = 0;
  std::uint8_t sequence = 0;
  std::uint8_t metric = 0;    // packet-success percentage, 0..100
  std::uint8_t priority = 0;

  bool operator==(const WireRouteEntry&) const = default;
};

// One 8-byte row of a neighbor-table dump (storage/debug format; neighbor
// tables are never transmitted).
struct WireNeighborEntry {
  NodeAddress address = 0;
  std::uint8_t packet_success = 0;  // percentage 0..100
  std::uint16_t metric = 0;
  std::uint8_t priority = 0;

  bool operator==(const WireNeighborEntry&) const = default;
};

enum class CodecError {
  InvalidSize,
  Truncated,
  BadType,
  TooSmall,
  SequenceMismatch,
};

class CodecException : public std::runtime_error {
 public:
  CodecException(CodecError code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  CodecError code() const { return code_; }

 private:
  CodecError code_;
};

// Serializes p into exactly p.header.size bytes.
// Throws CodecException(InvalidSize) when the size field does not equal
// 16 + payload length or exceeds 256.
std::vector<std::uint8_t> encode_packet(const Packet& p);

// Inverse of encode_packet. The input must be exactly header.size bytes:
// shorter input throws Truncated, trailing bytes throw InvalidSize, an
// unknown type byte throws BadType.
Packet decode_packet(std::span<const std::uint8_t> bytes);

// Splits a data packet into a FragMore/FragLess pair carrying the leading
// and trailing payload halves. For odd payload lengths the leading fragment
// carries the extra byte. Header fields other than size and type are copied
// verbatim. Throws TooSmall for payloads shorter than 2 bytes.
std::pair<Packet, Packet> fragment_data(const Packet& p);

// Rebuilds the original data packet from a fragment pair. Fragments group
// on (source, sequence); a mismatch throws SequenceMismatch so the caller
// can hold or drop per its policy.
Packet reassemble(const Packet& frag_more, const Packet& frag_less);

// Packs route entries into broadcast Route packets, at most 30 entries per
// packet, order preserved. An empty entry list still produces one empty
// Route packet so neighbors can refresh liveness. Packets take consecutive
// sequence numbers starting at first_sequence (mod 256).
std::vector<Packet> encode_route_message(const std::vector<WireRouteEntry>& entries,
                                         NodeAddress source,
                                         std::uint8_t first_sequence);

// Decodes the payload of a Route packet. Throws BadType for non-route
// packets and InvalidSize when the payload is not a multiple of 8 bytes.
std::vector<WireRouteEntry> decode_route_entries(const Packet& p);

void encode_route_entry(const WireRouteEntry& e, std::vector<std::uint8_t>& out);
WireRouteEntry decode_route_entry(std::span<const std::uint8_t> bytes);

void encode_neighbor_entry(const WireNeighborEntry& e, std::vector<std::uint8_t>& out);
WireNeighborEntry decode_neighbor_entry(std::span<const std::uint8_t> bytes);

}  // namespace multilora

#endif  // MULTILORA_CODEC_HPP
