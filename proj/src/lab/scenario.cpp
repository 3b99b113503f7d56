#include "iotsurface/lab/scenario.hpp"

#include <functional>
#include <map>

#include "iotsurface/lab/exploit.hpp"

namespace iotsurface::lab {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::chrono::milliseconds kScenarioBudget{2000};

class Recorder {
 public:
  Recorder(std::string scenario, SimDevice& dev, LabConfig cfg)
      : dev_(dev), cfg_(std::move(cfg)), start_(Clock::now()) {
    t_.scenario = std::move(scenario);
    t_.initial_state = dev_.state();
  }

  const LabConfig& config() const { return cfg_; }
  SimDevice& device() { return dev_; }

  void emit(std::string event, json body) {
    nlohmann::ordered_json e;
    e["seq"] = seq_++;
    e["t_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count();
    e["event"] = std::move(event);
    for (auto& [k, v] : body.items()) e[k] = v;
    t_.events.push_back(std::move(e));
  }

  ActionResult act(Action action, const ActionParams& params = {}) {
    ActionResult r;
    try {
      r = exploit_client(dev_.kind(), action, cfg_, params);
    } catch (const std::exception& ex) {
      fail(std::string(to_string(action)) + " request failed: " + ex.what());
    }
    for (const auto& w : r.wire) {
      emit(w.direction, {{"action", to_string(action)},
                         {"transport", w.transport},
                         {"peer", w.peer},
                         {"hex", proto::to_hex(w.bytes)},
                         {"decoded", w.decoded}});
    }
    emit("state", {{"after", to_string(action)}, {"response", r.response}, {"device", state_json(dev_.state())}});
    return r;
  }

  void check(const std::string& name, bool ok) {
    emit("assert", {{"name", name}, {"ok", ok}});
    if (!ok) fail(name);
  }

  [[noreturn]] void fail(const std::string& name) {
    finish(false);
    throw ScenarioFailure(name, t_);
  }

  Transcript finish(bool passed) {
    t_.final_state = dev_.state();
    t_.pairing_events = dev_.pairing_events();
    t_.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_);
    emit("summary", {{"passed", passed},
                     {"pairing_events", t_.pairing_events},
                     {"elapsed_ms", t_.elapsed.count()},
                     {"handled", dev_.handled()},
                     {"dropped", dev_.dropped()},
                     {"final_state", state_json(t_.final_state)}});
    return t_;
  }

  /// Shared closing checks: nothing paired, something changed, fast enough.
  Transcript close() {
    auto now = dev_.state();
    check("pairing_events == 0", dev_.pairing_events() == 0);
    check("device state changed", !(now == t_.initial_state));
    check("completed within 2 s", Clock::now() - start_ < kScenarioBudget);
    return finish(true);
  }

 private:
  SimDevice& dev_;
  LabConfig cfg_;
  Clock::time_point start_;
  Transcript t_;
  std::uint64_t seq_ = 0;
};

Transcript kasa_spoof(const LabConfig& base) {
  DeviceState init;
  init.relay_on = true;
  auto dev = run_kasa_sim(base, init);
  Recorder rec("kasa_spoof", *dev, bound_config(base, *dev));
  rec.emit("boot", {{"device", "kasa"}, {"port", dev->port()}, {"state", state_json(dev->state())}});

  auto found = rec.act(Action::Discover);
  rec.check("discovery reports relay on", found.response.value("relay_on", false));

  auto off = rec.act(Action::Off);
  rec.check("off acknowledged", off.response.value("err_code", -1) == 0);
  auto status = rec.act(Action::Status);
  rec.check("status shows relay off", !status.response.value("relay_on", true) && !dev->state().relay_on);

  auto off_ct = off.wire.front().bytes;
  auto again = rec.act(Action::Off);
  rec.check("identical plaintext gives identical ciphertext", again.wire.front().bytes == off_ct);

  rec.act(Action::On);
  rec.check("relay back on", dev->state().relay_on);

  auto reply = send_raw_udp(rec.config().bind_address, rec.config().ports.kasa, off_ct, rec.config().timeout);
  rec.emit("replay", {{"hex", proto::to_hex(off_ct)},
                      {"decoded", proto::to_text(proto::autokey_decrypt(off_ct, {rec.config().seed}))},
                      {"reply", reply ? proto::to_text(proto::autokey_decrypt(*reply, {rec.config().seed})) : ""},
                      {"device", state_json(dev->state())}});
  rec.check("replayed ciphertext answered", reply.has_value());
  rec.check("replay turned relay off", !dev->state().relay_on);
  return rec.close();
}

Transcript lifx_control(const LabConfig& base) {
  auto dev = run_lifx_sim(base);
  Recorder rec("lifx_control", *dev, bound_config(base, *dev));
  rec.emit("boot", {{"device", "lifx"}, {"port", dev->port()}, {"state", state_json(dev->state())}});

  rec.act(Action::Discover);
  auto on = rec.act(Action::On);
  rec.check("power level 65535", on.response.value("power", 0) == 0xFFFF && dev->state().power_level == 0xFFFF);

  ActionParams p;
  p.color = {21845, 65535, 32768, 3500};
  rec.act(Action::SetColor, p);
  auto status = rec.act(Action::Status);
  rec.check("status color equals sent color",
            status.response.value("hue", -1) == p.color.hue && status.response.value("saturation", -1) == p.color.saturation &&
                status.response.value("brightness", -1) == p.color.brightness &&
                status.response.value("kelvin", -1) == p.color.kelvin && dev->state().color == p.color);
  return rec.close();
}

Transcript wemo_soap(const LabConfig& base) {
  auto dev = run_wemo_sim(base);
  Recorder rec("wemo_soap", *dev, bound_config(base, *dev));
  rec.emit("boot", {{"device", "wemo"}, {"port", dev->port()}, {"discovery_port", dev->discovery_port()},
                    {"state", state_json(dev->state())}});

  auto found = rec.act(Action::Discover);
  rec.check("M-SEARCH answered with LOCATION", !found.response.value("location", "").empty());
  auto before = rec.act(Action::Status);
  rec.check("GetBinaryState reports 0", before.response.value("binary_state", -1) == 0);
  auto set = rec.act(Action::On);
  rec.check("SetBinaryState 1 acknowledged", set.response.value("binary_state", -1) == 1);
  auto after = rec.act(Action::Status);
  rec.check("state flipped to 1", after.response.value("binary_state", -1) == 1 && dev->state().relay_on);
  return rec.close();
}

Transcript econtrol_ir(const LabConfig& base) {
  auto dev = run_econtrol_sim(base);
  Recorder rec("econtrol_ir", *dev, bound_config(base, *dev));
  rec.emit("boot", {{"device", "econtrol"}, {"port", dev->port()}, {"state", state_json(dev->state())}});

  auto found = rec.act(Action::Discover);
  rec.check("discovery returns device identity", !found.response.value("mac", "").empty());
  ActionParams p;
  // Broadlink-style IR frame: 0x26 marks infrared, then repeat count and pulse data.
  p.ir_code = {0x26, 0x00, 0x1A, 0x00, 0x4A, 0x94, 0x12, 0x12, 0x12, 0x37, 0x00, 0x0D, 0x05};
  auto ack = rec.act(Action::IrCode, p);
  rec.check("IR ack echoes code", ack.response.value("code", "") == proto::to_hex(p.ir_code));
  rec.check("device recorded IR code", dev->state().last_ir_code == p.ir_code);
  return rec.close();
}

const std::map<std::string, std::function<Transcript(const LabConfig&)>, std::less<>>& table() {
  static const std::map<std::string, std::function<Transcript(const LabConfig&)>, std::less<>> t{
      {"kasa_spoof", kasa_spoof},
      {"lifx_control", lifx_control},
      {"wemo_soap", wemo_soap},
      {"econtrol_ir", econtrol_ir},
  };
  return t;
}

}  // namespace

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& e : events) out += e.dump() + "\n";
  return out;
}

ScenarioFailure::ScenarioFailure(std::string assertion, Transcript transcript)
    : std::runtime_error("scenario " + transcript.scenario + " failed: " + assertion),
      assertion_(std::move(assertion)),
      transcript_(std::move(transcript)) {}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"kasa_spoof", "lifx_control", "wemo_soap", "econtrol_ir"};
  return names;
}

Transcript run_scenario(std::string_view name, const LabConfig& config) {
  config.validate();
  auto it = table().find(name);
  if (it == table().end()) {
    std::string valid;
    for (const auto& n : scenario_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw UnknownScenario("unknown scenario '" + std::string(name) + "'; valid: " + valid);
  }
  return it->second(config);
}

nlohmann::json state_json(const DeviceState& s) {
  return {{"relay_on", s.relay_on},
          {"power_level", s.power_level},
          {"color",
           {{"hue", s.color.hue},
            {"saturation", s.color.saturation},
            {"brightness", s.color.brightness},
            {"kelvin", s.color.kelvin}}},
          {"alias", s.alias},
          {"last_ir_code", proto::to_hex(s.last_ir_code)}};
}

}  // namespace iotsurface::lab
