#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dramaturg/affect.hpp"
#include "dramaturg/corpus.hpp"
#include "dramaturg/lexstats.hpp"
#include "dramaturg/scorer_bridge.hpp"

// End-to-end analysis of a play, the on-disk report format, result caching
// and cross-play comparison.
namespace dramaturg::report {

inline constexpr const char* kReportFormat = "dramaturg.play-report/1";
inline constexpr const char* kCacheDirName = ".dramaturg-cache";

struct AnalysisConfig {
  corpus::CleaningRules cleaning;
  std::optional<std::filesystem::path> stoplist_path;  // bundled French list when unset
  std::size_t window = corpus::SegmentationConfig::kDefaultWindow;
  bool include_partial_tail = true;
  std::size_t top_n = 10;
  lexstats::CountingPolicy ttr_policy = lexstats::CountingPolicy::alpha_all;
  // "lexicon" or "external:<command line | host:port>"
  std::string scorer = "lexicon";
  std::optional<std::filesystem::path> sentiment_lexicon;  // bundled when unset
  std::optional<std::filesystem::path> emotion_lexicon;
  affect::Granularity granularity = affect::Granularity::sentence;
  lexstats::Canvas canvas;
  std::uint32_t seed = 42;
};

// Unknown keys are rejected. Relative paths resolve against `base_dir`.
AnalysisConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
AnalysisConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const AnalysisConfig& cfg);

// Keys compared by compare_plays; any difference makes reports incomparable.
struct Compatibility {
  std::size_t window = 0;
  std::string sentiment_scorer;
  std::string emotion_scorer;
  std::string ttr_policy;
  bool operator==(const Compatibility&) const = default;
};

struct SegmentInfo {
  std::size_t word_count = 0;
  bool is_partial = false;
};

struct PlayReport {
  std::string title;
  std::string config_fingerprint;
  Compatibility compat;
  lexstats::LexicalSummary lexical;
  lexstats::FrequencyTable frequencies;
  std::size_t top_n = 10;
  std::vector<SegmentInfo> segments;
  affect::AffectArc arc;
  std::optional<EmotionScores> percentages;     // absent without emotional signal
  std::optional<affect::TensionMetrics> tension;  // absent for arcs under 3 points
  lexstats::Canvas canvas;
  std::uint32_t seed = 42;
};

nlohmann::json to_json(const PlayReport& r);
PlayReport play_report_from_json(const nlohmann::json& j);
PlayReport load_report(const std::filesystem::path& path);

std::optional<Emotion> dominant_emotion(const PlayReport& r);

struct AnalyzeOptions {
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::string> title;  // defaults to the input file stem
  bridge::ClientOptions client;
};

struct AnalyzeResult {
  PlayReport report;
  bool from_cache = false;
};

// Errors propagate with their stage label set (clean, tokenize, segment,
// score, report). The returned report is always the one reconstructed from
// its canonical serialization, so fresh and cached runs are identical.
AnalyzeResult analyze_play(const std::filesystem::path& input, const AnalysisConfig& cfg,
                           const AnalyzeOptions& opts = {});

// Fingerprint over the input bytes, the resolved configuration, the content
// of every resource file it names and, for external scoring, the server's
// handshake (model name, protocol version, capabilities).
std::string config_fingerprint(std::string_view input_bytes, const AnalysisConfig& cfg,
                               const bridge::Handshake* scorer = nullptr);

struct ComparativeReport {
  std::vector<std::string> plays;          // input order
  std::vector<std::string> ttr_ranking;    // descending TTR, ties by title
  std::map<std::string, std::optional<Emotion>> dominant_emotion;
  std::vector<std::string> shared_top_terms;  // ascending
  std::vector<std::string> tension_ranking;   // descending final-third delta, ties by title
};

// Needs at least two reports with identical Compatibility keys; otherwise
// throws IncompatibleReportsError naming the differing keys.
ComparativeReport compare_plays(std::span<const PlayReport> reports);
nlohmann::json to_json(const ComparativeReport& c);

}  // namespace dramaturg::report
