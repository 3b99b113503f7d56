#pragma once

// Belkin WeMo: SSDP discovery plus SOAP control of the basicevent service.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iotsurface::proto {

inline constexpr std::string_view kSsdpMulticastAddress = "239.255.255.250";
inline constexpr std::uint16_t kSsdpPort = 1900;

inline constexpr std::string_view kWemoControlleeUrn = "urn:Belkin:device:controllee:1";
inline constexpr std::string_view kWemoBasicEventUrn = "urn:Belkin:service:basicevent:1";
inline constexpr std::string_view kWemoControlPath = "/upnp/control/basicevent1";
inline constexpr std::string_view kWemoSetupPath = "/setup.xml";
/// Wi-Fi provisioning endpoint; the lab counts requests to it as pairing.
inline constexpr std::string_view kWemoWifiSetupPath = "/upnp/control/WiFiSetup1";

/// A representative slice of the device and service names the app ships.
inline constexpr std::array<std::string_view, 6> kWemoServiceUrns{
    "urn:Belkin:device:controllee:1", "urn:Belkin:device:lightswitch:1",
    "urn:Belkin:device:insight:1",    "urn:Belkin:service:basicevent:1",
    "urn:Belkin:service:WiFiSetup:1", "urn:Belkin:service:firmwareupdate:1",
};

struct WemoSoapMessage {
  enum class Kind { SetBinaryState, GetBinaryState, Response };
  Kind kind = Kind::GetBinaryState;
  int state = 0;  // SetBinaryState and Response
  std::string service_urn{kWemoBasicEventUrn};
  bool operator==(const WemoSoapMessage&) const = default;
};

struct MalformedEnvelope : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownAction : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedResponse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument when the service urn lacks the `urn:` prefix.
std::string wemo_build(const WemoSoapMessage& message);
WemoSoapMessage wemo_parse(std::string_view envelope);
/// Value for the SOAPACTION header, quotes included.
std::string wemo_soap_action(const WemoSoapMessage& message);

std::string ssdp_msearch(std::string_view service_urn);
/// ST of an M-SEARCH request; MalformedResponse if it is not one.
std::string ssdp_parse_msearch(std::string_view request);

struct SsdpResponse {
  std::string location;
  std::string urn;
  bool operator==(const SsdpResponse&) const = default;
};

std::string ssdp_build_response(const SsdpResponse& response, std::string_view usn);
SsdpResponse ssdp_parse_response(std::string_view text);

}  // namespace iotsurface::proto
