#pragma once

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "iotsurface/detectors.hpp"
#include "iotsurface/pathfinder.hpp"

namespace iotsurface {

struct AnalysisConfig {
  double ratio_threshold = kDefaultRatioThreshold;
  int min_instructions = kDefaultMinInstructions;
  int max_depth = kDefaultMaxDepth;
  PatternTable patterns = PatternTable::builtin();
  CveKnowledgeBase cves = CveKnowledgeBase::builtin();
};

enum class KeyVerdict { AvoidsHardcodedKeys, HardcodedKey, NoEncryption };
std::string_view to_string(KeyVerdict v);

struct AppReport {
  std::string app_id;
  KeyVerdict q1 = KeyVerdict::NoEncryption;
  bool q2_local = false;
  bool q3_broadcast = false;
  bool q4_insecure_protocol = false;
  std::set<std::string> protocols;
  std::vector<CveEntry> cves;
  std::vector<VulnPath> paths;
  Findings findings;
  std::vector<std::string> local_evidence;  // why q2 came out true
};

class EmptyApp : public std::runtime_error {
 public:
  explicit EmptyApp(const std::string& app) : std::runtime_error("app has no classes: " + app) {}
};

class EmptyCorpus : public std::runtime_error {
 public:
  EmptyCorpus() : std::runtime_error("corpus contains no apps") {}
};

AppReport analyze_program(const Program& program, const AnalysisConfig& config = {});
AppReport analyze_app(const std::filesystem::path& app_dir, const AnalysisConfig& config = {});

/// Every subdirectory of `root` is one app; reports come back sorted by app id.
std::vector<AppReport> analyze_corpus(const std::filesystem::path& root,
                                      const AnalysisConfig& config = {});

/// count out of total; kept exact until rendering.
struct Share {
  int count = 0;
  int total = 0;
  std::string fraction() const;  // "10/32"
  int percent() const;           // nearest integer, halves up
  bool operator==(const Share&) const = default;
};

struct CorpusSummary {
  int total_apps = 0;
  Share no_encryption;
  Share hardcoded_keys;
  Share no_hardcoded_keys;
  Share local_comm;
  Share broadcast;
  Share insecure_protocols;
  bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary summarize_corpus(const std::vector<AppReport>& reports);

enum class Format { Json, Text };

std::string render_report(const AppReport& report, Format format);
std::string render_summary(const CorpusSummary& summary, Format format);
/// Per-app table plus the summary, as one document.
std::string render_corpus(const std::vector<AppReport>& reports, const CorpusSummary& summary,
                          Format format);

/// Table-style labels: "yes" marks good practice.
std::string q1_label(KeyVerdict v);
std::string yes_no(bool good);

}  // namespace iotsurface
