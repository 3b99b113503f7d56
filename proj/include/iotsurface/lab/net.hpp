#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iotsurface::lab {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
  bool operator==(const Endpoint&) const = default;
};

struct Datagram {
  std::vector<std::uint8_t> data;
  Endpoint from;
};

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// IPv4 UDP socket that owns its descriptor.
class UdpSocket {
 public:
  /// Port 0 picks an ephemeral port.
  static UdpSocket bind(const std::string& address, std::uint16_t port);

  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  ~UdpSocket();

  void enable_broadcast();
  void send_to(std::span<const std::uint8_t> bytes, const Endpoint& to);
  /// nullopt on timeout.
  std::optional<Datagram> receive(std::chrono::milliseconds timeout);
  std::uint16_t local_port() const;

 private:
  explicit UdpSocket(int fd) : fd_(fd) {}
  int fd_ = -1;
};

}  // namespace iotsurface::lab
