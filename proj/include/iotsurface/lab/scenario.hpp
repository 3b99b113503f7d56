#pragma once

// Scripted end-to-end reproductions: boot a simulated device, drive it with
// the rogue client, check the state transitions, record everything.

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "iotsurface/lab/devices.hpp"

namespace iotsurface::lab {

/// Line-delimited JSON events: boot, send, recv, state, assert, replay, summary.
struct Transcript {
  std::string scenario;
  std::vector<nlohmann::ordered_json> events;
  std::uint64_t pairing_events = 0;
  std::chrono::milliseconds elapsed{0};
  DeviceState initial_state;
  DeviceState final_state;

  std::string to_jsonl() const;
};

class UnknownScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ScenarioFailure : public std::runtime_error {
 public:
  ScenarioFailure(std::string assertion, Transcript transcript);
  const std::string& assertion() const { return assertion_; }
  const Transcript& transcript() const { return transcript_; }

 private:
  std::string assertion_;
  Transcript transcript_;
};

const std::vector<std::string>& scenario_names();

/// Throws UnknownScenario (message lists the valid names) or ScenarioFailure.
Transcript run_scenario(std::string_view name, const LabConfig& config);

nlohmann::json state_json(const DeviceState& s);

}  // namespace iotsurface::lab
