// Acceptance gate: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes, or when the only failures
// are the ones listed in kKnownUnattainable. If a known-unattainable
// criterion starts passing the exit status is non-zero too, so the list
// gets revisited.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "iotsurface/detectors.hpp"
#include "iotsurface/lab/scenario.hpp"
#include "iotsurface/pathfinder.hpp"
#include "iotsurface/proto/econtrol.hpp"
#include "iotsurface/proto/kasa.hpp"
#include "iotsurface/proto/lifx.hpp"
#include "iotsurface/proto/wemo.hpp"
#include "iotsurface/report.hpp"

using namespace iotsurface;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// tolerances
constexpr double kFlagshipBudgetSeconds = 5.0;
constexpr double kScenarioBudgetSeconds = 2.0;
constexpr int kPercentTolerance = 0;  // integer labels must match exactly
constexpr int kCipherStrings = 1000;
constexpr int kCipherSeeds = 16;
constexpr int kCipherMaxLen = 256;
constexpr int kCodecTrials = 1000;

// criterion 2: the figure labels 6/32 as 19% in one chart and 18% in
// another, so no rounding of count/total can match every label
const std::set<int> kKnownUnattainable{2};

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail.clear();
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

fs::path corpus_root() { return fs::path(IOTSURFACE_FIXTURE_DIR) / "corpus"; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f s", s);
  return buf;
}

Outcome flagship_verdicts() {
  Outcome o;
  struct Row {
    const char* app;
    KeyVerdict q1;
    bool local, bcast, insecure;
  };
  const Row rows[] = {{"Kasa", KeyVerdict::HardcodedKey, true, true, false},
                      {"LIFX", KeyVerdict::NoEncryption, true, true, false},
                      {"WeMo", KeyVerdict::NoEncryption, true, false, true},
                      {"e-Control", KeyVerdict::NoEncryption, true, true, false}};
  auto t0 = Clock::now();
  for (const auto& r : rows) {
    auto rep = analyze_app(corpus_root() / r.app);
    if (rep.q1 != r.q1 || rep.q2_local != r.local || rep.q3_broadcast != r.bcast ||
        rep.q4_insecure_protocol != r.insecure)
      o.fail(std::string(r.app) + " verdicts differ");
    if (r.insecure && !rep.protocols.contains("UPnP")) o.fail(std::string(r.app) + " missing UPnP");
  }
  double secs = seconds_since(t0);
  if (secs >= kFlagshipBudgetSeconds) o.fail("took " + fmt_secs(secs));
  if (o.ok) o.detail = "4/4 rows exact in " + fmt_secs(secs);
  return o;
}

Outcome corpus_fractions() {
  Outcome o;
  auto summary = summarize_corpus(analyze_corpus(corpus_root()));
  struct Label {
    const char* name;
    const Share* share;
    int count;
    int percent;  // as printed on the chart
  };
  const Label labels[] = {{"no encryption", &summary.no_encryption, 10, 31},
                          {"hardcoded keys", &summary.hardcoded_keys, 6, 19},
                          {"no hardcoded keys", &summary.no_hardcoded_keys, 16, 50},
                          {"local communication", &summary.local_comm, 18, 56},
                          {"broadcast", &summary.broadcast, 15, 46},
                          {"insecure protocols", &summary.insecure_protocols, 6, 18}};
  std::string shown;
  for (const auto& l : labels) {
    const Share& s = *l.share;
    if (s.count != l.count || s.total != 32)
      o.fail(std::string(l.name) + " " + s.fraction() + " != " + std::to_string(l.count) + "/32");
    int diff = s.percent() - l.percent;
    if (diff > kPercentTolerance || -diff > kPercentTolerance)
      o.fail(std::string(l.name) + " " + s.fraction() + " renders " + std::to_string(s.percent()) +
             "%, chart says " + std::to_string(l.percent) + "%");
    if (!shown.empty()) shown += ", ";
    shown += s.fraction() + "=" + std::to_string(s.percent()) + "%";
  }
  if (o.ok) o.detail = shown;
  return o;
}

std::vector<std::string> names(const MethodChain& c) {
  std::vector<std::string> out;
  for (const auto& m : c) out.push_back(m.short_name());
  return out;
}

Outcome paths() {
  Outcome o;
  auto kasa = analyze_app(corpus_root() / "Kasa");
  bool kasa_ok = false;
  for (const auto& p : kasa.paths) {
    if (names(p.chain) != std::vector<std::string>{"c.a", "TPUDPClient.a", "UDPClient.b"}) continue;
    if (p.encryption_status != EncryptionStatus::HardcodedKey) continue;
    for (const auto& a : p.annotations)
      if (a.method.short_name() == "TPClientUtils.encode") kasa_ok = true;
  }
  if (!kasa_ok) o.fail("Kasa chain/annotation missing");

  auto lifx = analyze_app(corpus_root() / "LIFX");
  bool lifx_ok = false;
  for (const auto& p : lifx.paths) {
    if (!p.chain.empty() && p.chain.front().short_name() == "ColorController.setPowerState" &&
        p.sink_kind == SinkKind::UdpSend && p.encryption_status == EncryptionStatus::None)
      lifx_ok = true;
  }
  if (!lifx_ok) o.fail("LIFX path missing or annotated");
  if (o.ok) o.detail = "Kasa c.a -> TPUDPClient.a -> UDPClient.b (HardcodedKey); LIFX setPowerState -> UDP (None)";
  return o;
}

Outcome cve_kb() {
  Outcome o;
  std::vector<CveEntry> want{{"MQTT", 13, "CVE-2017-9868"},
                             {"SIP", 59, "CVE-2018-0332"},
                             {"UPnP", 346, "CVE-2016-6255"},
                             {"SSDP", 17, "CVE-2017-5042"}};
  auto got = match_cves({"MQTT", "SIP", "UPnP", "SSDP"});
  if (got != want) o.fail("knowledge base rows differ");
  if (!match_cves({"HTTPS", "UDP"}).empty()) o.fail("safe protocols matched");
  if (o.ok) o.detail = "MQTT 13, SIP 59, UPnP 346, SSDP 17 with example ids";
  return o;
}

Outcome cipher() {
  Outcome o;
  std::mt19937_64 rng(0xAB);
  std::uniform_int_distribution<int> byte(0, 255), len(0, kCipherMaxLen);
  std::set<int> seeds;
  while (static_cast<int>(seeds.size()) < kCipherSeeds) seeds.insert(byte(rng));
  int failures = 0;
  for (int seed : seeds) {
    proto::AutokeyCipherConfig cfg{static_cast<std::uint8_t>(seed)};
    for (int i = 0; i < kCipherStrings; ++i) {
      proto::Bytes x(static_cast<std::size_t>(len(rng)));
      for (auto& b : x) b = static_cast<std::uint8_t>(byte(rng));
      auto ct = proto::autokey_encrypt(x, cfg);
      if (proto::autokey_decrypt(ct, cfg) != x) ++failures;
      if (proto::autokey_encrypt(x, cfg) != ct) ++failures;
    }
  }
  auto cmd = proto::to_bytes(proto::kasa_build(proto::KasaCommand::set_relay_state(false)));
  if (proto::autokey_encrypt(cmd) != proto::autokey_encrypt(cmd)) ++failures;
  if (failures) o.fail(std::to_string(failures) + " failures");
  else
    o.detail = std::to_string(kCipherStrings) + " strings x " + std::to_string(kCipherSeeds) +
               " seeds, deterministic ciphertext";
  return o;
}

Outcome scenarios() {
  Outcome o;
  auto cfg = lab::LabConfig{}.with_ephemeral_ports();
  std::string shown;
  for (const auto& name : lab::scenario_names()) {
    auto t0 = Clock::now();
    try {
      auto t = lab::run_scenario(name, cfg);
      double secs = seconds_since(t0);
      if (t.pairing_events != 0) o.fail(name + " saw pairing");
      if (t.initial_state == t.final_state) o.fail(name + " no state change");
      if (secs >= kScenarioBudgetSeconds) o.fail(name + " took " + fmt_secs(secs));
      if (name == "kasa_spoof") {
        bool replay = false;
        for (const auto& e : t.events)
          if (e.value("event", "") == "assert" && e.value("name", "") == "replay turned relay off" &&
              e.value("ok", false))
            replay = true;
        if (!replay) o.fail("kasa replay did not reproduce the change");
      }
      if (!shown.empty()) shown += ", ";
      shown += name + " " + fmt_secs(secs);
    } catch (const lab::ScenarioFailure& e) {
      o.fail(name + ": " + e.what());
    } catch (const std::exception& e) {
      o.fail(name + " error: " + e.what());
    }
  }
  if (o.ok) o.detail = shown;
  return o;
}

Outcome codecs() {
  Outcome o;
  std::mt19937_64 rng(0x10C0);
  auto u16 = [&] { return static_cast<std::uint16_t>(rng() & 0xFFFF); };
  int failures = 0;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) {
      ++failures;
      o.fail(what);
    }
  };
  for (int i = 0; i < kCodecTrials; ++i) {
    auto kc = (rng() & 1) ? proto::KasaCommand::get_sysinfo() : proto::KasaCommand::set_relay_state(rng() & 1);
    if (proto::kasa_parse(proto::kasa_build(kc)) != kc) expect(false, "kasa round trip");

    proto::LifxPayload payload;
    switch (rng() % 4) {
      case 0: payload = proto::LifxGet{}; break;
      case 1: payload = proto::LifxSetPower{u16()}; break;
      case 2: payload = proto::LifxSetColor{{u16(), u16(), u16(), u16()}, static_cast<std::uint32_t>(rng())}; break;
      default: payload = proto::LifxState{{u16(), u16(), u16(), u16()}, u16()}; break;
    }
    auto pkt = proto::make_lifx_packet(payload, static_cast<std::uint32_t>(rng()), rng(),
                                       static_cast<std::uint8_t>(rng()));
    if (proto::lifx_decode(proto::lifx_encode(pkt)) != pkt) expect(false, "lifx round trip");

    proto::WemoSoapMessage wm;
    wm.kind = static_cast<proto::WemoSoapMessage::Kind>(rng() % 3);
    wm.state = wm.kind == proto::WemoSoapMessage::Kind::GetBinaryState ? 0 : static_cast<int>(rng() & 1);
    if (proto::wemo_parse(proto::wemo_build(wm)) != wm) expect(false, "wemo round trip");

    proto::Bytes code(1 + rng() % 64);
    for (auto& b : code) b = static_cast<std::uint8_t>(rng());
    auto em = (rng() & 1) ? proto::EControlMessage::discover() : proto::EControlMessage::ir(code);
    if (proto::econtrol_parse(proto::econtrol_build(em)) != em) expect(false, "econtrol round trip");
  }
  auto rejects = [&](auto fn, const char* what) {
    try {
      fn();
      expect(false, what);
    } catch (const std::exception&) {
    }
  };
  rejects([] { proto::kasa_parse(R"({"system":{}})"); }, "kasa accepted empty system");
  rejects([] { proto::lifx_decode(proto::Bytes{1, 2, 3}); }, "lifx accepted 3 bytes");
  rejects([] { proto::wemo_parse("<x/>"); }, "wemo accepted non-envelope");
  rejects([] { proto::ssdp_parse_response("HTTP/1.1 200 OK\r\nLOCATION: http://x/\r\n\r\n"); },
          "ssdp accepted missing ST");
  rejects([] { proto::econtrol_parse("[]"); }, "econtrol accepted []");
  if (o.ok) o.detail = std::to_string(kCodecTrials) + " trials per codec, reject sets hold";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "flagship-verdicts", flagship_verdicts},   {2, "corpus-fractions", corpus_fractions},
      {3, "path-recovery", paths},      {4, "cve-kb", cve_kb},
      {5, "cipher-properties", cipher}, {6, "exploit-scenarios", scenarios},
      {7, "codec-round-trips", codecs},
  };
  int unexpected = 0, passed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    bool known = kKnownUnattainable.contains(c.id);
    std::printf("[%s] %d %s: %s%s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                !o.ok && known ? " (known unattainable)" : "");
    if (o.ok) ++passed;
    if (o.ok == known) ++unexpected;
  }
  std::printf("%d/%zu passed\n", passed, criteria.size());
  return unexpected == 0 ? 0 : 1;
}
