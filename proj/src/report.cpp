#include "iotsurface/report.hpp"

#include <algorithm>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

namespace iotsurface {

using ojson = nlohmann::ordered_json;

std::string_view to_string(KeyVerdict v) {
  switch (v) {
    case KeyVerdict::AvoidsHardcodedKeys: return "AvoidsHardcodedKeys";
    case KeyVerdict::HardcodedKey: return "HardcodedKey";
    case KeyVerdict::NoEncryption: return "NoEncryption";
  }
  return "?";
}

AppReport analyze_program(const Program& program, const AnalysisConfig& config) {
  if (program.classes().empty()) throw EmptyApp(program.app_id());

  AppReport r;
  r.app_id = program.app_id();
  auto graph = build_callgraph(program);

  auto& f = r.findings;
  f.crypto = detect_std_crypto(program, config.patterns);
  auto custom = detect_custom_crypto(program, config.ratio_threshold, config.min_instructions);
  f.crypto.insert(f.crypto.end(), custom.begin(), custom.end());
  f.keys = detect_hardcoded_keys(program, f.crypto, graph, config.patterns);
  f.protocols = detect_protocols(program, config.patterns);
  f.broadcasts = detect_broadcast(program);

  if (f.crypto.empty()) {
    r.q1 = KeyVerdict::NoEncryption;
  } else if (!f.keys.empty()) {
    r.q1 = KeyVerdict::HardcodedKey;
  } else {
    r.q1 = KeyVerdict::AvoidsHardcodedKeys;
  }

  for (const auto& pf : f.protocols) {
    for (auto p : pf.protocols) {
      r.protocols.insert(std::string(to_string(p)));
      if (p == Protocol::UDP || p == Protocol::TCP) {
        r.local_evidence.push_back(pf.class_name + ": " + std::string(to_string(p)) + " via " +
                                   pf.evidence.at(p));
      }
    }
  }
  r.q2_local = !r.local_evidence.empty();
  r.q3_broadcast = std::any_of(f.broadcasts.begin(), f.broadcasts.end(),
                               [](const BroadcastFinding& b) { return b.counts_as_broadcast(); });
  r.cves = match_cves(r.protocols, config.cves);
  r.q4_insecure_protocol = std::any_of(r.protocols.begin(), r.protocols.end(),
                                       [&](const std::string& p) { return config.cves.covers(p); });
  r.paths = find_vulnerable_paths(program, graph, f, config.patterns, config.max_depth);
  return r;
}

AppReport analyze_app(const std::filesystem::path& app_dir, const AnalysisConfig& config) {
  return analyze_program(load_app_dir(app_dir), config);
}

std::vector<AppReport> analyze_corpus(const std::filesystem::path& root,
                                      const AnalysisConfig& config) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  std::vector<fs::path> apps;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) apps.push_back(entry.path());
  }
  if (apps.empty()) throw EmptyCorpus();
  std::sort(apps.begin(), apps.end());

  std::vector<std::future<AppReport>> jobs;
  jobs.reserve(apps.size());
  for (const auto& dir : apps) {
    jobs.push_back(std::async(std::launch::async, [&config, dir] { return analyze_app(dir, config); }));
  }
  std::vector<AppReport> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::string Share::fraction() const { return std::to_string(count) + "/" + std::to_string(total); }

int Share::percent() const {
  if (total == 0) return 0;
  return (200 * count + total) / (2 * total);
}

CorpusSummary summarize_corpus(const std::vector<AppReport>& reports) {
  if (reports.empty()) throw EmptyCorpus();
  CorpusSummary s;
  s.total_apps = static_cast<int>(reports.size());
  for (auto* share : {&s.no_encryption, &s.hardcoded_keys, &s.no_hardcoded_keys, &s.local_comm,
                      &s.broadcast, &s.insecure_protocols}) {
    share->total = s.total_apps;
  }
  for (const auto& r : reports) {
    switch (r.q1) {
      case KeyVerdict::NoEncryption: ++s.no_encryption.count; break;
      case KeyVerdict::HardcodedKey: ++s.hardcoded_keys.count; break;
      case KeyVerdict::AvoidsHardcodedKeys: ++s.no_hardcoded_keys.count; break;
    }
    s.local_comm.count += r.q2_local;
    s.broadcast.count += r.q3_broadcast;
    s.insecure_protocols.count += r.q4_insecure_protocol;
  }
  return s;
}

std::string q1_label(KeyVerdict v) {
  switch (v) {
    case KeyVerdict::AvoidsHardcodedKeys: return "yes";
    case KeyVerdict::HardcodedKey: return "no";
    case KeyVerdict::NoEncryption: return "no encryption";
  }
  return "?";
}

std::string yes_no(bool good) { return good ? "yes" : "no"; }

namespace {

ojson method_json(const MethodId& id) { return id.str(); }

ojson report_json(const AppReport& r) {
  ojson j;
  j["app_id"] = r.app_id;
  j["verdicts"] = {{"q1", to_string(r.q1)},
                   {"q2", r.q2_local},
                   {"q3", r.q3_broadcast},
                   {"q4", r.q4_insecure_protocol}};
  j["protocols"] = r.protocols;

  j["cves"] = ojson::array();
  for (const auto& c : r.cves) {
    j["cves"].push_back({{"protocol", c.protocol}, {"reported_count", c.reported_count},
                         {"example_id", c.example_id}});
  }

  j["key_findings"] = ojson::array();
  for (const auto& k : r.findings.keys) {
    const char* kind = k.material_kind == KeyFinding::Material::Text      ? "text"
                       : k.material_kind == KeyFinding::Material::Integer ? "integer"
                                                                          : "bytes";
    j["key_findings"].push_back({{"method", method_json(k.method)},
                                 {"channel", to_string(k.channel)},
                                 {"material", k.material},
                                 {"material_kind", kind},
                                 {"site", k.site},
                                 {"target", method_json(k.target)}});
  }

  j["crypto_findings"] = ojson::array();
  for (const auto& c : r.findings.crypto) {
    ojson cj{{"method", method_json(c.method)}, {"kind", to_string(c.kind)}};
    if (c.kind == CryptoFinding::Kind::CustomHeuristic) {
      cj["ratio"] = c.ratio;
      cj["arith_count"] = c.arith_count;
      cj["instruction_count"] = c.instruction_count;
    }
    cj["evidence"] = c.evidence;
    j["crypto_findings"].push_back(std::move(cj));
  }

  j["broadcast_findings"] = ojson::array();
  for (const auto& b : r.findings.broadcasts) {
    ojson bj{{"method", method_json(b.method)},
             {"address", b.address},
             {"category", to_string(b.category)},
             {"site", b.site}};
    if (!b.note.empty()) bj["note"] = b.note;
    j["broadcast_findings"].push_back(std::move(bj));
  }

  j["protocol_findings"] = ojson::array();
  for (const auto& p : r.findings.protocols) {
    ojson ev = ojson::object();
    for (const auto& [proto, pattern] : p.evidence) ev[std::string(to_string(proto))] = pattern;
    j["protocol_findings"].push_back({{"class", p.class_name}, {"evidence", std::move(ev)}});
  }
  j["local_evidence"] = r.local_evidence;

  j["paths"] = ojson::array();
  for (const auto& p : r.paths) {
    ojson chain = ojson::array();
    for (const auto& m : p.chain) chain.push_back(method_json(m));
    ojson notes = ojson::array();
    for (const auto& a : p.annotations) {
      notes.push_back({{"method", method_json(a.method)}, {"what", a.what}, {"on_chain", a.on_chain}});
    }
    j["paths"].push_back({{"chain", std::move(chain)},
                          {"sink_kind", to_string(p.sink_kind)},
                          {"encryption_status", to_string(p.encryption_status)},
                          {"annotations", std::move(notes)}});
  }
  return j;
}

ojson share_json(const Share& s) {
  return {{"count", s.count},
          {"total", s.total},
          {"fraction", s.fraction()},
          {"percent", std::to_string(s.percent()) + "%"}};
}

ojson summary_json(const CorpusSummary& s) {
  return {{"total_apps", s.total_apps},
          {"no_encryption", share_json(s.no_encryption)},
          {"hardcoded_keys", share_json(s.hardcoded_keys)},
          {"no_hardcoded_keys", share_json(s.no_hardcoded_keys)},
          {"local_comm", share_json(s.local_comm)},
          {"broadcast", share_json(s.broadcast)},
          {"insecure_protocols", share_json(s.insecure_protocols)}};
}

constexpr const char* kTableHeader =
    "App  Avoid Hardcoded Keys?  Avoid Local Communication?  Avoid Broadcast Messages?  Safe "
    "Protocol?";

std::string table_row(const AppReport& r) {
  return r.app_id + "  " + q1_label(r.q1) + "  " + yes_no(!r.q2_local) + "  " +
         yes_no(!r.q3_broadcast) + "  " + yes_no(!r.q4_insecure_protocol);
}

std::string summary_text(const CorpusSummary& s) {
  std::ostringstream out;
  out << "Apps analyzed: " << s.total_apps << "\n";
  auto line = [&](const char* label, const Share& share) {
    out << label << "  " << share.fraction() << "  " << share.percent() << "%\n";
  };
  line("No Encryption", s.no_encryption);
  line("Hardcoded Keys", s.hardcoded_keys);
  line("No Hardcoded Keys", s.no_hardcoded_keys);
  line("Local Communication", s.local_comm);
  line("Broadcast Messages", s.broadcast);
  line("Insecure Protocols", s.insecure_protocols);
  return out.str();
}

}  // namespace

std::string render_report(const AppReport& report, Format format) {
  if (format == Format::Json) return report_json(report).dump(2) + "\n";

  std::ostringstream out;
  out << kTableHeader << "\n" << table_row(report) << "\n";
  if (!report.protocols.empty()) {
    out << "\nprotocols:";
    for (const auto& p : report.protocols) out << " " << p;
    out << "\n";
  }
  for (const auto& c : report.cves) {
    out << "cve: " << c.protocol << " " << c.reported_count << " " << c.example_id << "\n";
  }
  for (const auto& p : report.paths) {
    out << "path [" << to_string(p.sink_kind) << ", " << to_string(p.encryption_status) << "]:";
    for (const auto& m : p.chain) out << " " << m.short_name();
    out << "\n";
    for (const auto& a : p.annotations) {
      out << "  " << (a.on_chain ? "on chain" : "off chain") << ": " << a.method.short_name() << " "
          << a.what << "\n";
    }
  }
  return out.str();
}

std::string render_summary(const CorpusSummary& summary, Format format) {
  if (format == Format::Json) return summary_json(summary).dump(2) + "\n";
  return summary_text(summary);
}

std::string render_corpus(const std::vector<AppReport>& reports, const CorpusSummary& summary,
                          Format format) {
  if (format == Format::Json) {
    ojson j;
    j["apps"] = ojson::array();
    for (const auto& r : reports) j["apps"].push_back(report_json(r));
    j["summary"] = summary_json(summary);
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << kTableHeader << "\n";
  for (const auto& r : reports) out << table_row(r) << "\n";
  out << "\n" << summary_text(summary);
  return out.str();
}

}  // namespace iotsurface
