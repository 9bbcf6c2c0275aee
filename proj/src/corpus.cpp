#include "dramaturg/corpus.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "dramaturg/error.hpp"
#include "dramaturg/utf8.hpp"

namespace dramaturg::corpus {

namespace {

constexpr std::array<std::string_view, 12> kElisions = {
    "l'", "d'", "j'", "n'", "s'", "t'", "c'", "m'", "qu'", "jusqu'", "lorsqu'", "puisqu'"};

constexpr std::array<std::string_view, 22> kAbbreviations = {
    "m",  "mm", "mme", "mmes", "mlle", "mlles", "dr",  "me",  "mgr", "pr",  "st",
    "ste", "cf", "p",  "pp",   "vol",  "av",    "bd",  "chap", "fig", "éd", "ms"};

constexpr int kMaxCleaningPasses = 32;

bool is_blank(std::string_view line) {
  for (const auto& c : utf8::decode(line)) {
    if (!utf8::is_space(c.value)) return false;
  }
  return true;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

std::string strip_controls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& c : utf8::decode(text)) {
    if (utf8::is_control(c.value) && c.value != '\n') {
      out.push_back(' ');
    } else {
      out.append(text.substr(c.offset, c.length));
    }
  }
  return out;
}

struct DropPattern {
  std::string source;
  std::string literal;
  std::optional<std::regex> regex;
};

std::vector<DropPattern> compile_patterns(const std::vector<std::string>& sources) {
  std::vector<DropPattern> out;
  for (const auto& src : sources) {
    DropPattern p{src, {}, std::nullopt};
    if (src.rfind("re:", 0) == 0) {
      try {
        p.regex.emplace(src.substr(3), std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw ConfigError("malformed drop pattern '" + src + "': " + e.what());
      }
    } else {
      if (src.empty()) throw ConfigError("malformed drop pattern '': empty literal");
      p.literal = src;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string apply_pattern(std::string line, const DropPattern& p) {
  if (p.regex) {
    // repeat until stable so that removals cannot expose a new match
    for (int i = 0; i < kMaxCleaningPasses; ++i) {
      auto next = std::regex_replace(line, *p.regex, "");
      if (next == line) break;
      line = std::move(next);
    }
    return line;
  }
  std::size_t pos;
  while ((pos = line.find(p.literal)) != std::string::npos) line.erase(pos, p.literal.size());
  return line;
}

std::string drop_patterns(std::string_view text, const std::vector<DropPattern>& patterns) {
  if (patterns.empty()) return std::string(text);
  std::vector<std::string> kept;
  for (auto& line : split_lines(text)) {
    const bool was_blank = is_blank(line);
    std::string out = line;
    for (const auto& p : patterns) out = apply_pattern(std::move(out), p);
    if (!was_blank && is_blank(out)) continue;
    kept.push_back(std::move(out));
  }
  return join_lines(kept);
}

// Length in bytes of a leading speaker label ("LE DEALER." / "LE CLIENT :")
// including trailing separator, or 0. A label is at least two uppercase
// letters, possibly with spaces, apostrophes or hyphens, and no lowercase.
std::size_t speaker_prefix_length(std::string_view line, bool& whole_line) {
  whole_line = false;
  const auto cps = utf8::decode(line);
  std::size_t i = 0;
  while (i < cps.size() && utf8::is_space(cps[i].value)) ++i;
  std::size_t letters = 0;
  std::size_t label_end = i;
  for (; i < cps.size(); ++i) {
    const char32_t c = cps[i].value;
    if (utf8::is_letter(c)) {
      if (!utf8::is_uppercase(c)) return 0;
      ++letters;
      label_end = i + 1;
    } else if (c == ' ' || utf8::is_apostrophe(c) || c == '-') {
      continue;
    } else {
      break;
    }
  }
  if (letters < 2) return 0;
  // i is at the first non-label code point (or end)
  std::size_t j = label_end;
  while (j < cps.size() && cps[j].value == ' ') ++j;
  const bool has_terminator = j < cps.size() && (cps[j].value == '.' || cps[j].value == ':');
  if (has_terminator) ++j;
  std::size_t k = j;
  while (k < cps.size() && utf8::is_space(cps[k].value)) ++k;
  if (k == cps.size()) {
    whole_line = true;
    return line.size();
  }
  if (!has_terminator || k == j) return 0;
  // optional dialogue dash after the label
  if (cps[k].value == 0x2014 || cps[k].value == 0x2013 || cps[k].value == '-') {
    ++k;
    while (k < cps.size() && utf8::is_space(cps[k].value)) ++k;
  }
  if (k == cps.size()) {
    whole_line = true;
    return line.size();
  }
  return cps[k].offset;
}

std::string drop_speaker_labels(std::string_view text) {
  std::vector<std::string> kept;
  for (auto& line : split_lines(text)) {
    bool whole = false;
    const auto n = speaker_prefix_length(line, whole);
    if (whole) continue;
    kept.push_back(n ? line.substr(n) : line);
  }
  return join_lines(kept);
}

bool is_hyphen(char32_t c) { return c == '-' || c == 0x2010 || c == 0xAD; }
bool is_horizontal_space(char32_t c) { return utf8::is_space(c) && c != '\n'; }

std::string dehyphenate(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i].value;
    if (is_hyphen(c) && i > 0 && utf8::is_letter(cps[i - 1].value)) {
      std::size_t j = i + 1;
      while (j < cps.size() && is_horizontal_space(cps[j].value)) ++j;
      if (j < cps.size() && cps[j].value == '\n') {
        std::size_t k = j + 1;
        while (k < cps.size() && is_horizontal_space(cps[k].value)) ++k;
        if (k < cps.size() && utf8::is_letter(cps[k].value) && !utf8::is_uppercase(cps[k].value)) {
          i = k;
          continue;
        }
      }
    }
    out.append(text.substr(cps[i].offset, cps[i].length));
    ++i;
  }
  return out;
}

std::string collapse_line(std::string_view line) {
  std::string out;
  bool pending_space = false;
  for (const auto& c : utf8::decode(line)) {
    if (utf8::is_space(c.value)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(line.substr(c.offset, c.length));
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::vector<std::string> kept;
  bool previous_blank = true;  // drops leading blank lines
  for (auto& line : split_lines(text)) {
    auto collapsed = collapse_line(line);
    const bool blank = collapsed.empty();
    if (blank && previous_blank) continue;
    kept.push_back(std::move(collapsed));
    previous_blank = blank;
  }
  while (!kept.empty() && kept.back().empty()) kept.pop_back();
  return join_lines(kept);
}

std::string clean_pass(std::string_view text, const CleaningRules& rules,
                       const std::vector<DropPattern>& patterns) {
  std::string out = normalize_newlines(text);
  if (rules.strip_control_chars) out = strip_controls(out);
  out = drop_patterns(out, patterns);
  if (rules.speaker_label_policy == SpeakerLabelPolicy::drop) out = drop_speaker_labels(out);
  if (rules.dehyphenate_linebreaks) out = dehyphenate(out);
  if (rules.collapse_whitespace) out = collapse_whitespace(out);
  return out;
}

bool is_word_char(char32_t c) {
  return utf8::is_letter(c) || utf8::is_digit(c) || utf8::is_combining_mark(c);
}

bool is_elision(std::string_view folded) {
  return std::find(kElisions.begin(), kElisions.end(), folded) != kElisions.end();
}

bool is_sentence_terminal(const Token& t) {
  if (t.surface == "!" || t.surface == "?" || t.surface == "…") return true;
  return !t.surface.empty() && t.surface.find_first_not_of('.') == std::string::npos;
}

bool is_closing_mark(const Token& t) {
  return t.surface == "»" || t.surface == "”" || t.surface == "\"" || t.surface == "’" ||
         t.surface == ")" || t.surface == "]";
}

}  // namespace

std::span<const std::string_view> elision_prefixes() { return kElisions; }
std::span<const std::string_view> sentence_abbreviations() { return kAbbreviations; }

RawDocument make_document(std::string title, std::string raw_text,
                          std::filesystem::path source_path, std::string language_tag) {
  if (title.empty()) throw ConfigError("document title must not be empty");
  utf8::validate(raw_text);
  return RawDocument{std::move(title), std::move(raw_text), std::move(source_path),
                     std::move(language_tag)};
}

RawDocument read_document(const std::filesystem::path& path, std::string title) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (title.empty()) title = path.stem().string();
  return make_document(std::move(title), buf.str(), path);
}

std::string clean_text(const RawDocument& doc, const CleaningRules& rules) {
  utf8::validate(doc.raw_text);
  const auto patterns = compile_patterns(rules.drop_patterns);
  std::string current = clean_pass(doc.raw_text, rules, patterns);
  // Steps can expose work for each other (a dehyphenated join may complete a
  // drop pattern), so iterate to a fixed point.
  for (int pass = 1; pass < kMaxCleaningPasses; ++pass) {
    auto next = clean_pass(current, rules, patterns);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<Token> tokenize(std::string_view cleaned, const Stoplist& stoplist) {
  const auto cps = utf8::decode(cleaned);
  std::vector<Token> tokens;
  auto emit = [&](std::size_t first, std::size_t last) {  // code point range [first, last)
    Token t;
    t.span = {cps[first].offset, cps[last - 1].offset + cps[last - 1].length};
    t.surface = std::string(cleaned.substr(t.span.begin, t.span.end - t.span.begin));
    t.lower = utf8::fold(t.surface);
    bool has_letter = false;
    bool all_word = true;
    for (std::size_t k = first; k < last; ++k) {
      const char32_t c = cps[k].value;
      if (utf8::is_letter(c)) {
        has_letter = true;
      } else if (!utf8::is_combining_mark(c) && !utf8::is_apostrophe(c)) {
        all_word = false;
      }
    }
    t.is_alpha = has_letter && all_word;
    t.is_stopword = stoplist.find(t.lower) != stoplist.end();
    tokens.push_back(std::move(t));
  };
  auto folded_range = [&](std::size_t first, std::size_t last) {
    std::string s;
    for (std::size_t k = first; k < last; ++k) {
      utf8::append(s, utf8::is_apostrophe(cps[k].value) ? char32_t{'\''} : utf8::to_lower(cps[k].value));
    }
    return s;
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i].value;
    if (utf8::is_space(c)) {
      ++i;
      continue;
    }
    if (is_word_char(c)) {
      std::size_t j = i;
      while (j < cps.size()) {
        if (is_word_char(cps[j].value)) {
          ++j;
        } else if (utf8::is_apostrophe(cps[j].value)) {
          if (j + 1 < cps.size() && is_word_char(cps[j + 1].value)) {
            j += 1;
          } else {
            if (is_elision(folded_range(i, j + 1))) ++j;  // "l' homme"
            break;
          }
        } else {
          break;
        }
      }
      // split leading elided clitics: qu'il -> qu' + il
      std::size_t start = i;
      for (std::size_t k = i; k < j; ++k) {
        if (!utf8::is_apostrophe(cps[k].value)) continue;
        if (!is_elision(folded_range(start, k + 1))) break;
        emit(start, k + 1);
        start = k + 1;
      }
      if (start < j) emit(start, j);
      i = j;
      continue;
    }
    if (c == '.') {
      std::size_t j = i;
      while (j < cps.size() && cps[j].value == '.') ++j;
      emit(i, j);
      i = j;
      continue;
    }
    emit(i, i + 1);
    ++i;
  }
  return tokens;
}

std::vector<TokenRange> split_sentences(std::span<const Token> tokens) {
  std::vector<TokenRange> ranges;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const Token& t = tokens[i];
    if (!is_sentence_terminal(t)) {
      ++i;
      continue;
    }
    if (t.surface == "." && i > start) {
      const Token& prev = tokens[i - 1];
      const bool attached = prev.span.end == t.span.begin;
      if (attached && prev.is_alpha &&
          std::find(kAbbreviations.begin(), kAbbreviations.end(), prev.lower) !=
              kAbbreviations.end()) {
        ++i;
        continue;
      }
    }
    std::size_t end = i + 1;
    while (end < tokens.size() && (is_sentence_terminal(tokens[end]) || is_closing_mark(tokens[end]))) {
      ++end;
    }
    ranges.push_back({start, end});
    start = end;
    i = end;
  }
  if (start < tokens.size()) ranges.push_back({start, tokens.size()});
  return ranges;
}

TokenizedPlay tokenize_play(std::shared_ptr<const RawDocument> doc, const CleaningRules& rules,
                            const Stoplist& stoplist) {
  TokenizedPlay play;
  play.cleaned_text = clean_text(*doc, rules);
  play.document = std::move(doc);
  play.tokens = tokenize(play.cleaned_text, stoplist);
  play.sentences = split_sentences(play.tokens);
  return play;
}

std::string_view text_of(const TokenizedPlay& play, TokenRange range) {
  if (range.empty()) return {};
  const auto begin = play.tokens[range.begin].span.begin;
  const auto end = play.tokens[range.end - 1].span.end;
  return std::string_view(play.cleaned_text).substr(begin, end - begin);
}

SegmentationConfig::SegmentationConfig(std::size_t window, bool include_partial_tail)
    : window_(window), include_partial_tail_(include_partial_tail) {
  if (window_ == 0) throw ConfigError("segmentation window must be at least 1");
}

std::vector<Segment> segment_tokens(std::span<const Token> tokens, const SegmentationConfig& cfg) {
  std::vector<Segment> segments;
  std::size_t start = 0;
  std::size_t words = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_alpha) continue;
    if (words == cfg.window()) {
      segments.push_back({segments.size(), {start, i}, words, false});
      start = i;
      words = 0;
    }
    ++words;
  }
  if (start < tokens.size()) {
    const bool partial = words < cfg.window();
    if (!partial || cfg.include_partial_tail()) {
      segments.push_back({segments.size(), {start, tokens.size()}, words, partial});
    }
  }
  return segments;
}

std::vector<Segment> segment_tokens(const TokenizedPlay& play, const SegmentationConfig& cfg) {
  return segment_tokens(play.tokens, cfg);
}

Stoplist load_stoplist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read stoplist " + path.string());
  Stoplist out;
  std::string line;
  while (std::getline(in, line)) {
    auto word = utf8::fold(line);
    const auto first = word.find_first_not_of(" \t\r");
    if (first == std::string::npos || word[first] == '#') continue;
    const auto last = word.find_last_not_of(" \t\r");
    out.insert(word.substr(first, last - first + 1));
  }
  return out;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("DRAMATURG_DATA"); env && *env) return env;
#ifdef DRAMATURG_DATA_DIR
  return DRAMATURG_DATA_DIR;
#else
  return "data";
#endif
}

Stoplist default_stoplist() { return load_stoplist(data_dir() / "stoplist_fr.txt"); }

nlohmann::json to_json(const TokenizedPlay& play) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : play.tokens) {
    const int flags = (t.is_alpha ? 1 : 0) | (t.is_stopword ? 2 : 0);
    tokens.push_back({t.surface, t.span.begin, t.span.end, flags});
  }
  nlohmann::json sentences = nlohmann::json::array();
  for (const auto& s : play.sentences) sentences.push_back({s.begin, s.end});
  nlohmann::json j;
  j["title"] = play.document ? play.document->title : std::string{};
  j["source_path"] = play.document ? play.document->source_path.string() : std::string{};
  j["language_tag"] = play.document ? play.document->language_tag : std::string{"fr"};
  j["cleaned_text"] = play.cleaned_text;
  j["tokens"] = std::move(tokens);
  j["sentences"] = std::move(sentences);
  return j;
}

TokenizedPlay tokenized_play_from_json(const nlohmann::json& j) {
  try {
    TokenizedPlay play;
    auto doc = std::make_shared<RawDocument>();
    doc->title = j.at("title").get<std::string>();
    doc->source_path = j.at("source_path").get<std::string>();
    doc->language_tag = j.at("language_tag").get<std::string>();
    play.document = std::move(doc);
    play.cleaned_text = j.at("cleaned_text").get<std::string>();
    for (const auto& row : j.at("tokens")) {
      Token t;
      t.surface = row.at(0).get<std::string>();
      t.span = {row.at(1).get<std::size_t>(), row.at(2).get<std::size_t>()};
      const int flags = row.at(3).get<int>();
      t.is_alpha = flags & 1;
      t.is_stopword = flags & 2;
      t.lower = utf8::fold(t.surface);
      play.tokens.push_back(std::move(t));
    }
    for (const auto& row : j.at("sentences")) {
      play.sentences.push_back({row.at(0).get<std::size_t>(), row.at(1).get<std::size_t>()});
    }
    return play;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed tokenized play: ") + e.what());
  }
}

}  // namespace dramaturg::corpus
