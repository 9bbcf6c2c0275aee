#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

// Ingestion: cleaning, tokenization, sentence splitting and segmentation of
// play text into fixed word windows ("stage minutes").
namespace dramaturg::corpus {

using Stoplist = std::set<std::string, std::less<>>;

struct RawDocument {
  std::string title;
  std::string raw_text;
  std::filesystem::path source_path;
  std::string language_tag = "fr";
};

// Validates the UTF-8 payload and the non-empty title.
RawDocument make_document(std::string title, std::string raw_text,
                          std::filesystem::path source_path = {},
                          std::string language_tag = "fr");
RawDocument read_document(const std::filesystem::path& path, std::string title = {});

enum class SpeakerLabelPolicy { keep, drop };

// A drop pattern is either a literal substring or, when written with a
// "re:" prefix, an ECMAScript regular expression. Patterns apply line by
// line; a line emptied by a pattern is removed entirely.
struct CleaningRules {
  bool dehyphenate_linebreaks = true;
  bool strip_control_chars = true;
  bool collapse_whitespace = true;
  std::vector<std::string> drop_patterns;
  SpeakerLabelPolicy speaker_label_policy = SpeakerLabelPolicy::drop;
};

std::string clean_text(const RawDocument& doc, const CleaningRules& rules);

struct CharSpan {
  std::size_t begin = 0;  // byte offsets into the cleaned text
  std::size_t end = 0;
  bool operator==(const CharSpan&) const = default;
};

struct Token {
  std::string surface;
  std::string lower;
  bool is_alpha = false;
  bool is_stopword = false;
  CharSpan span;
  bool operator==(const Token&) const = default;
};

// Half-open index range over a token list.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const TokenRange&) const = default;
};

// Elided clitics split off the word they precede (normalized apostrophe).
std::span<const std::string_view> elision_prefixes();
// Abbreviations whose trailing period does not end a sentence.
std::span<const std::string_view> sentence_abbreviations();

std::vector<Token> tokenize(std::string_view cleaned, const Stoplist& stoplist);
std::vector<TokenRange> split_sentences(std::span<const Token> tokens);

struct TokenizedPlay {
  std::shared_ptr<const RawDocument> document;
  std::string cleaned_text;
  std::vector<Token> tokens;
  std::vector<TokenRange> sentences;
};

TokenizedPlay tokenize_play(std::shared_ptr<const RawDocument> doc, const CleaningRules& rules,
                            const Stoplist& stoplist);

// Source text covered by a token range, from the first token's start to the
// last token's end.
std::string_view text_of(const TokenizedPlay& play, TokenRange range);

class SegmentationConfig {
 public:
  static constexpr std::size_t kDefaultWindow = 150;

  // Throws ConfigError when window is zero.
  explicit SegmentationConfig(std::size_t window = kDefaultWindow, bool include_partial_tail = true);

  std::size_t window() const noexcept { return window_; }
  bool include_partial_tail() const noexcept { return include_partial_tail_; }

 private:
  std::size_t window_;
  bool include_partial_tail_;
};

struct Segment {
  std::size_t index = 0;
  TokenRange token_range;
  std::size_t word_count = 0;
  bool is_partial = false;
  bool operator==(const Segment&) const = default;
};

std::vector<Segment> segment_tokens(std::span<const Token> tokens, const SegmentationConfig& cfg);
std::vector<Segment> segment_tokens(const TokenizedPlay& play, const SegmentationConfig& cfg);

Stoplist load_stoplist(const std::filesystem::path& path);
Stoplist default_stoplist();
std::filesystem::path data_dir();

// Cache format: tokens as [surface, start, end, flags] with flags bit 0 =
// alphabetic, bit 1 = stopword.
nlohmann::json to_json(const TokenizedPlay& play);
TokenizedPlay tokenized_play_from_json(const nlohmann::json& j);

}  // namespace dramaturg::corpus
