#include "iotsurface/proto/lifx.hpp"

#include <string>

namespace iotsurface::proto {

namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  template <typename T>
  void put(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
    }
  }
  void put(const LifxHsbk& c) {
    put(c.hue);
    put(c.saturation);
    put(c.brightness);
    put(c.kelvin);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  template <typename T>
  T get() {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  LifxHsbk hsbk() {
    LifxHsbk c;
    c.hue = get<std::uint16_t>();
    c.saturation = get<std::uint16_t>();
    c.brightness = get<std::uint16_t>();
    c.kelvin = get<std::uint16_t>();
    return c;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool known_type(std::uint16_t t) {
  switch (static_cast<LifxType>(t)) {
    case LifxType::Get:
    case LifxType::SetColor:
    case LifxType::State:
    case LifxType::SetPower:
      return true;
    default:
      return false;
  }
}

}  // namespace

LifxType lifx_type_of(const LifxPayload& payload) {
  struct {
    LifxType operator()(const LifxGet&) const { return LifxType::Get; }
    LifxType operator()(const LifxSetPower&) const { return LifxType::SetPower; }
    LifxType operator()(const LifxSetColor&) const { return LifxType::SetColor; }
    LifxType operator()(const LifxState&) const { return LifxType::State; }
  } visitor;
  return std::visit(visitor, payload);
}

std::size_t lifx_payload_size(LifxType type) {
  switch (type) {
    case LifxType::Get: return 0;
    case LifxType::SetPower: return 2;
    case LifxType::SetColor: return 12;
    case LifxType::State: return 10;
    default: throw std::invalid_argument("no payload layout for type " + std::to_string(static_cast<int>(type)));
  }
}

LifxPacket make_lifx_packet(LifxPayload payload, std::uint32_t source, std::uint64_t target,
                            std::uint8_t sequence) {
  LifxPacket p;
  auto type = lifx_type_of(payload);
  p.size = static_cast<std::uint16_t>(kLifxHeaderSize + lifx_payload_size(type));
  p.source = source;
  p.target = target;
  p.sequence = sequence;
  p.msg_type = static_cast<std::uint16_t>(type);
  p.payload = std::move(payload);
  return p;
}

std::vector<std::uint8_t> lifx_encode(const LifxPacket& packet) {
  auto type = lifx_type_of(packet.payload);
  if (packet.msg_type != static_cast<std::uint16_t>(type)) {
    throw std::invalid_argument("msg_type does not match payload");
  }
  if (packet.size != kLifxHeaderSize + lifx_payload_size(type)) {
    throw std::invalid_argument("size field does not match encoded length");
  }

  std::vector<std::uint8_t> out;
  out.reserve(packet.size);
  Writer w(out);
  w.put(packet.size);
  w.put(packet.protocol_flags);
  w.put(packet.source);
  w.put(packet.target);
  w.put(packet.sequence);
  w.put(packet.msg_type);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LifxSetPower>) {
          w.put(p.level);
        } else if constexpr (std::is_same_v<T, LifxSetColor>) {
          w.put(p.color);
          w.put(p.duration);
        } else if constexpr (std::is_same_v<T, LifxState>) {
          w.put(p.color);
          w.put(p.power);
        }
      },
      packet.payload);
  return out;
}

std::optional<std::uint16_t> lifx_peek_type(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kLifxHeaderSize) return std::nullopt;
  return static_cast<std::uint16_t>(bytes[17] | (bytes[18] << 8));
}

LifxPacket lifx_decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kLifxHeaderSize) {
    throw TruncatedPacket("LIFX packet shorter than header: " + std::to_string(bytes.size()) + " bytes");
  }
  Reader r(bytes);
  LifxPacket p;
  p.size = r.get<std::uint16_t>();
  p.protocol_flags = r.get<std::uint16_t>();
  p.source = r.get<std::uint32_t>();
  p.target = r.get<std::uint64_t>();
  p.sequence = r.get<std::uint8_t>();
  p.msg_type = r.get<std::uint16_t>();

  if (p.size != bytes.size()) {
    throw SizeMismatch("size field " + std::to_string(p.size) + " but datagram has " +
                       std::to_string(bytes.size()) + " bytes");
  }
  if (!known_type(p.msg_type)) throw UnknownType("unknown LIFX message type " + std::to_string(p.msg_type));
  auto type = static_cast<LifxType>(p.msg_type);
  auto expected = kLifxHeaderSize + lifx_payload_size(type);
  if (bytes.size() < expected) {
    throw TruncatedPacket("payload too short for message type " + std::to_string(p.msg_type));
  }
  if (bytes.size() > expected) {
    throw SizeMismatch("payload too long for message type " + std::to_string(p.msg_type));
  }

  switch (type) {
    case LifxType::Get:
      p.payload = LifxGet{};
      break;
    case LifxType::SetPower:
      p.payload = LifxSetPower{r.get<std::uint16_t>()};
      break;
    case LifxType::SetColor: {
      LifxSetColor c;
      c.color = r.hsbk();
      c.duration = r.get<std::uint32_t>();
      p.payload = c;
      break;
    }
    case LifxType::State: {
      LifxState s;
      s.color = r.hsbk();
      s.power = r.get<std::uint16_t>();
      p.payload = s;
      break;
    }
    default:
      break;
  }
  return p;
}

}  // namespace iotsurface::proto
