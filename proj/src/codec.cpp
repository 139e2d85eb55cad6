#include "multilora/codec.hpp"

#include <algorithm>

namespace multilora {
namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32_be(std::span<const std::uint8_t> b, std::size_t off) {
  return (static_cast<std::uint32_t>(b[off]) << 24) |
         (static_cast<std::uint32_t>(b[off + 1]) << 16) |
         (static_cast<std::uint32_t>(b[off + 2]) << 8) |
         static_cast<std::uint32_t>(b[off + 3]);
}

}  // namespace

bool is_valid_packet_type(std::uint8_t byte) {
  switch (byte) {
    case 'h':
    case 'r':
    case 'd':
    case 'm':
    case 'l':
      return true;
    default:
      return false;
  }
}

std::vector<std::uint8_t> encode_packet(const Packet& p) {
  const auto& h = p.header;
  if (h.size < kHeaderBytes || h.size > kMaxFrameBytes ||
      h.size != kHeaderBytes + p.payload.size()) {
    throw CodecException(CodecError::InvalidSize,
                         "size field " + std::to_string(h.size) +
                             " inconsistent with payload length " +
                             std::to_string(p.payload.size()));
  }
  std::vector<std::uint8_t> out;
  out.reserve(h.size);
  out.push_back(h.ttl);
  // The size field is one byte; a full 256-byte frame is encoded as 0.
  out.push_back(static_cast<std::uint8_t>(h.size & 0xFF));
  put_u32_be(out, h.source);
  put_u32_be(out, h.destination);
  put_u32_be(out, h.next_hop);
  out.push_back(h.sequence);
  out.push_back(static_cast<std::uint8_t>(h.type));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

Packet decode_packet(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw CodecException(CodecError::Truncated,
                         "input shorter than the 16-byte header");
  }
  const std::uint8_t raw_size = bytes[1];
  const std::uint16_t size = raw_size == 0 ? kMaxFrameBytes : raw_size;
  if (size < kHeaderBytes) {
    throw CodecException(CodecError::InvalidSize,
                         "size field below header size");
  }
  if (bytes.size() < size) {
    throw CodecException(CodecError::Truncated,
                         "input shorter than the size field");
  }
  if (bytes.size() > size) {
    throw CodecException(CodecError::InvalidSize,
                         "trailing bytes beyond the size field");
  }
  if (!is_valid_packet_type(bytes[15])) {
    throw CodecException(CodecError::BadType, "unknown packet type byte");
  }
  Packet p;
  p.header.ttl = bytes[0];
  p.header.size = size;
  p.header.source = get_u32_be(bytes, 2);
  p.header.destination = get_u32_be(bytes, 6);
  p.header.next_hop = get_u32_be(bytes, 10);
  p.header.sequence = bytes[14];
  p.header.type = static_cast<PacketType>(bytes[15]);
  p.payload.assign(bytes.begin() + kHeaderBytes, bytes.end());
  return p;
}

std::pair<Packet, Packet> fragment_data(const Packet& p) {
  if (p.header.type != PacketType::Data) {
    throw CodecException(CodecError::BadType,
                         "only data packets can be fragmented");
  }
  if (p.payload.size() < 2) {
    throw CodecException(CodecError::TooSmall,
                         "payload too small to split across two radios");
  }
  const std::size_t more_len = (p.payload.size() + 1) / 2;

  Packet more = p;
  more.header.type = PacketType::FragMore;
  more.payload.assign(p.payload.begin(), p.payload.begin() + more_len);
  more.header.size = static_cast<std::uint16_t>(kHeaderBytes + more.payload.size());

  Packet less = p;
  less.header.type = PacketType::FragLess;
  less.payload.assign(p.payload.begin() + more_len, p.payload.end());
  less.header.size = static_cast<std::uint16_t>(kHeaderBytes + less.payload.size());

  return {std::move(more), std::move(less)};
}

Packet reassemble(const Packet& frag_more, const Packet& frag_less) {
  if (frag_more.header.type != PacketType::FragMore ||
      frag_less.header.type != PacketType::FragLess) {
    throw CodecException(CodecError::BadType,
                         "reassemble expects an m/l fragment pair");
  }
  if (frag_more.header.source != frag_less.header.source ||
      frag_more.header.sequence != frag_less.header.sequence) {
    throw CodecException(CodecError::SequenceMismatch,
                         "fragments do not group on (source, sequence)");
  }
  Packet out = frag_more;
  out.header.type = PacketType::Data;
  out.payload.insert(out.payload.end(), frag_less.payload.begin(),
                     frag_less.payload.end());
  out.header.size = static_cast<std::uint16_t>(kHeaderBytes + out.payload.size());
  return out;
}

void encode_route_entry(const WireRouteEntry& e, std::vector<std::uint8_t>& out) {
  put_u32_be(out, e.destination);
  out.push_back(e.distance);
  out.push_back(e.sequence);
  out.push_back(e.metric);
  out.push_back(e.priority);
}

WireRouteEntry decode_route_entry(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kRouteEntryBytes) {
    throw CodecException(CodecError::Truncated, "route entry shorter than 8 bytes");
  }
  WireRouteEntry e;
  e.destination = get_u32_be(bytes, 0);
  e.distance = bytes[4];
  e.sequence = bytes[5];
  e.metric = bytes[6];
  e.priority = bytes[7];
  return e;
}

std::vector<Packet> encode_route_message(const std::vector<WireRouteEntry>& entries,
                                         NodeAddress source,
                                         std::uint8_t first_sequence) {
  std::vector<Packet> packets;
  std::size_t offset = 0;
  std::uint8_t seq = first_sequence;
  do {
    const std::size_t count =
        std::min(kMaxRouteEntriesPerMessage, entries.size() - offset);
    Packet p;
    p.header.ttl = 1;
    p.header.source = source;
    p.header.destination = kBroadcast;
    p.header.next_hop = kBroadcast;
    p.header.sequence = seq++;
    p.header.type = PacketType::Route;
    p.payload.reserve(count * kRouteEntryBytes);
    for (std::size_t i = 0; i < count; ++i) {
      encode_route_entry(entries[offset + i], p.payload);
    }
    p.header.size = static_cast<std::uint16_t>(kHeaderBytes + p.payload.size());
    packets.push_back(std::move(p));
    offset += count;
  } while (offset < entries.size());
  return packets;
}

std::vector<WireRouteEntry> decode_route_entries(const Packet& p) {
  if (p.header.type != PacketType::Route) {
    throw CodecException(CodecError::BadType, "not a route packet");
  }
  if (p.payload.size() % kRouteEntryBytes != 0) {
    throw CodecException(CodecError::InvalidSize,
                         "route payload is not a multiple of 8 bytes");
  }
  std::vector<WireRouteEntry> entries;
  entries.reserve(p.payload.size() / kRouteEntryBytes);
  for (std::size_t off = 0; off < p.payload.size(); off += kRouteEntryBytes) {
    entries.push_back(decode_route_entry(
        std::span<const std::uint8_t>(p.payload).subspan(off, kRouteEntryBytes)));
  }
  return entries;
}

void encode_neighbor_entry(const WireNeighborEntry& e, std::vector<std::uint8_t>& out) {
  put_u32_be(out, e.address);
  out.push_back(e.packet_success);
  out.push_back(static_cast<std::uint8_t>(e.metric >> 8));
  out.push_back(static_cast<std::uint8_t>(e.metric & 0xFF));
  out.push_back(e.priority);
}

WireNeighborEntry decode_neighbor_entry(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kNeighborEntryBytes) {
    throw CodecException(CodecError::Truncated,
                         "neighbor entry shorter than 8 bytes");
  }
  WireNeighborEntry e;
  e.address = get_u32_be(bytes, 0);
  e.packet_success = bytes[4];
  e.metric = static_cast<std::uint16_t>((bytes[5] << 8) | bytes[6]);
  e.priority = bytes[7];
  return e;
}

}  // namespace multilora
