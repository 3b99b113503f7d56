// iotscan: static analysis of SMIR app dumps plus the device lab.
//
//   iotscan analyze <app-dir>  [--format json|text] [--ratio-threshold R] [--min-instr N]
//                              [--patterns FILE] [--cves FILE] [--out FILE]
//   iotscan corpus <root-dir>  (same flags)
//   iotscan decode-kasa [--seed 0xAB] <hex>
//   iotscan lab run --scenario NAME [--seed 0xAB] [--ports k=v,...] [--transcript FILE]
//   iotscan lab device <kind> [--port N]
//   iotscan lab client <kind> <action> [--port N] [--discovery-port N]

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "iotsurface/lab/exploit.hpp"
#include "iotsurface/lab/scenario.hpp"
#include "iotsurface/report.hpp"

namespace {

using namespace iotsurface;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitEmpty = 2;
constexpr int kExitFailure = 3;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct AnalyzeOpts {
  std::string input;
  std::string format = "json";
  double ratio = kDefaultRatioThreshold;
  int min_instr = kDefaultMinInstructions;
  int max_depth = kDefaultMaxDepth;
  std::string patterns;
  std::string cves;
  std::string out;
};

void add_analyze_flags(CLI::App* cmd, AnalyzeOpts& o, const char* what) {
  cmd->add_option("input", o.input, what)->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--ratio-threshold", o.ratio, "arith/bitwise fraction that flags custom crypto")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--min-instr", o.min_instr, "smallest method the crypto heuristic looks at")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", o.max_depth, "longest source-to-sink chain")->check(CLI::PositiveNumber);
  cmd->add_option("--patterns", o.patterns, "pattern table (default: built in)")->check(CLI::ExistingFile);
  cmd->add_option("--cves", o.cves, "CVE knowledge base (default: built in)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "write here instead of stdout");
}

AnalysisConfig make_config(const AnalyzeOpts& o) {
  AnalysisConfig cfg;
  cfg.ratio_threshold = o.ratio;
  cfg.min_instructions = o.min_instr;
  cfg.max_depth = o.max_depth;
  if (!o.patterns.empty()) cfg.patterns = PatternTable::load(o.patterns);
  if (!o.cves.empty()) cfg.cves = CveKnowledgeBase::load(o.cves);
  return cfg;
}

void emit(const std::string& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << doc;
}

int run_analysis(const AnalyzeOpts& o, bool corpus) {
  try {
    auto cfg = make_config(o);
    auto fmt = o.format == "text" ? Format::Text : Format::Json;
    if (corpus) {
      auto reports = analyze_corpus(o.input, cfg);
      emit(render_corpus(reports, summarize_corpus(reports), fmt), o.out);
    } else {
      emit(render_report(analyze_app(o.input, cfg), fmt), o.out);
    }
    return kExitOk;
  } catch (const SyntaxError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const EmptyApp& e) {
    std::cerr << e.what() << "\n";
    return kExitEmpty;
  } catch (const EmptyCorpus& e) {
    std::cerr << e.what() << "\n";
    return kExitEmpty;
  }
}

std::uint8_t parse_seed(const std::string& s) {
  auto v = std::stoul(s, nullptr, 0);
  if (v > 0xFF) throw CLI::ValidationError("--seed", "must fit in one byte");
  return static_cast<std::uint8_t>(v);
}

void apply_ports(lab::LabConfig& cfg, const std::vector<std::string>& specs) {
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--ports", "expected name=port, got " + spec);
    auto name = spec.substr(0, eq);
    auto port = static_cast<std::uint16_t>(std::stoul(spec.substr(eq + 1)));
    if (name == "kasa") cfg.ports.kasa = port;
    else if (name == "lifx") cfg.ports.lifx = port;
    else if (name == "wemo") cfg.ports.wemo_http = port;
    else if (name == "wemo-discovery") cfg.ports.wemo_discovery = port;
    else if (name == "econtrol") cfg.ports.econtrol = port;
    else throw CLI::ValidationError("--ports", "unknown device " + name);
  }
}

void set_port(lab::LabConfig& cfg, lab::DeviceKind kind, std::uint16_t port) {
  switch (kind) {
    case lab::DeviceKind::Kasa: cfg.ports.kasa = port; break;
    case lab::DeviceKind::Lifx: cfg.ports.lifx = port; break;
    case lab::DeviceKind::Wemo: cfg.ports.wemo_http = port; break;
    case lab::DeviceKind::EControl: cfg.ports.econtrol = port; break;
  }
}

lab::DeviceKind kind_arg(const std::string& s) {
  auto k = lab::device_kind_from(s);
  if (!k) throw CLI::ValidationError("kind", "expected kasa, lifx, wemo or econtrol");
  return *k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IoT companion-app attack surface scanner and device lab"};
  app.require_subcommand(1);

  AnalyzeOpts analyze_opts, corpus_opts;
  auto* analyze = app.add_subcommand("analyze", "analyze one app directory");
  add_analyze_flags(analyze, analyze_opts, "app directory of .smir files");
  auto* corpus = app.add_subcommand("corpus", "analyze every app under a root directory");
  add_analyze_flags(corpus, corpus_opts, "directory of app directories");

  std::string seed_str = "0xAB", hex;
  auto* decode = app.add_subcommand("decode-kasa", "decrypt a captured Kasa datagram");
  decode->add_option("--seed", seed_str);
  decode->add_option("hex", hex, "ciphertext as hex")->required();

  auto* labcmd = app.add_subcommand("lab", "simulated devices and rogue clients");
  labcmd->require_subcommand(1);

  std::string scenario, transcript_path, lab_seed = "0xAB", bind = "127.0.0.1";
  std::vector<std::string> port_specs;
  auto* run = labcmd->add_subcommand("run", "run a scripted exploit scenario");
  run->add_option("--scenario", scenario)->required();
  run->add_option("--seed", lab_seed);
  run->add_option("--ports", port_specs, "name=port pairs; 0 picks a free port")->delimiter(',');
  run->add_option("--transcript", transcript_path, "write line-delimited JSON here");

  std::string kind;
  int dev_port = -1, disc_port = -1;
  auto* device = labcmd->add_subcommand("device", "run one simulated device until interrupted");
  device->add_option("kind", kind)->required();
  device->add_option("--port", dev_port)->check(CLI::Range(0, 65535));
  device->add_option("--discovery-port", disc_port)->check(CLI::Range(0, 65535));
  device->add_option("--bind", bind);
  device->add_option("--seed", lab_seed);

  std::string client_kind, action_name, ir_hex;
  std::vector<int> color;
  auto* client = labcmd->add_subcommand("client", "send one action to a device");
  client->add_option("kind", client_kind)->required();
  client->add_option("action", action_name)->required();
  client->add_option("--port", dev_port)->check(CLI::Range(1, 65535));
  client->add_option("--discovery-port", disc_port)->check(CLI::Range(1, 65535));
  client->add_option("--host", bind);
  client->add_option("--seed", lab_seed);
  client->add_option("--color", color, "hue saturation brightness kelvin")->expected(4);
  client->add_option("--ir", ir_hex, "IR code as hex");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return run_analysis(analyze_opts, false);
    if (*corpus) return run_analysis(corpus_opts, true);

    if (*decode) {
      auto plain = proto::autokey_decrypt(proto::from_hex(hex), {parse_seed(seed_str)});
      std::cout << proto::to_text(plain) << "\n";
      return kExitOk;
    }

    if (*run) {
      lab::LabConfig cfg;
      cfg.seed = parse_seed(lab_seed);
      apply_ports(cfg, port_specs);
      lab::Transcript t;
      int rc = kExitOk;
      try {
        t = lab::run_scenario(scenario, cfg);
      } catch (const lab::ScenarioFailure& f) {
        t = f.transcript();
        std::cerr << f.what() << "\n";
        rc = kExitFailure;
      }
      emit(t.to_jsonl(), transcript_path);
      if (!transcript_path.empty()) {
        std::cerr << scenario << ": " << (rc == kExitOk ? "passed" : "FAILED") << " in " << t.elapsed.count()
                  << " ms, pairing_events=" << t.pairing_events << "\n";
      }
      return rc;
    }

    if (*device) {
      lab::LabConfig cfg;
      cfg.bind_address = bind;
      cfg.discovery_address = bind;
      cfg.seed = parse_seed(lab_seed);
      auto k = kind_arg(kind);
      if (dev_port >= 0) set_port(cfg, k, static_cast<std::uint16_t>(dev_port));
      if (disc_port >= 0) cfg.ports.wemo_discovery = static_cast<std::uint16_t>(disc_port);
      auto sim = lab::run_sim(k, cfg);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << lab::to_string(k) << " listening on " << bind << ":" << sim->port();
      if (sim->discovery_port() != sim->port()) std::cerr << " (discovery " << sim->discovery_port() << ")";
      std::cerr << "; Ctrl-C to stop\n";
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      sim->stop();
      std::cerr << "handled=" << sim->handled() << " dropped=" << sim->dropped()
                << " pairing_events=" << sim->pairing_events() << "\n";
      return kExitOk;
    }

    if (*client) {
      lab::LabConfig cfg;
      cfg.bind_address = bind;
      cfg.discovery_address = bind;
      cfg.seed = parse_seed(lab_seed);
      auto k = kind_arg(client_kind);
      auto a = lab::action_from(action_name);
      if (!a) throw CLI::ValidationError("action", "expected discover, status, on, off, set_color or ir_code");
      if (dev_port > 0) set_port(cfg, k, static_cast<std::uint16_t>(dev_port));
      if (disc_port > 0) cfg.ports.wemo_discovery = static_cast<std::uint16_t>(disc_port);
      lab::ActionParams p;
      if (color.size() == 4) {
        p.color = {static_cast<std::uint16_t>(color[0]), static_cast<std::uint16_t>(color[1]),
                   static_cast<std::uint16_t>(color[2]), static_cast<std::uint16_t>(color[3])};
      }
      if (!ir_hex.empty()) p.ir_code = proto::from_hex(ir_hex);
      auto r = lab::exploit_client(k, *a, cfg, p);
      std::cout << r.response.dump() << "\n";
      return kExitOk;
    }
  } catch (const lab::UnknownScenario& e) {
    std::cerr << e.what() << "\n";
    return kExitFailure;
  } catch (const lab::Timeout& e) {
    std::cerr << "timeout: " << e.what() << "\n";
    return kExitFailure;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
