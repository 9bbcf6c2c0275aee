#include "dramaturg/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dramaturg/canonical.hpp"
#include "dramaturg/error.hpp"
#include "dramaturg/utf8.hpp"

namespace dramaturg::affect {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Calls row(term, value, line_number) for every data row.
template <typename Row>
void for_each_row(std::string_view csv, const std::string& origin, std::string_view header_value,
                  Row&& row) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto comma = content.rfind(',');
    if (comma == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected two columns");
    }
    auto term = trim(std::string_view(content).substr(0, comma));
    auto value = trim(std::string_view(content).substr(comma + 1));
    if (line_no == 1 && term == "term" && value == header_value) continue;
    if (term.size() >= 2 && term.front() == '"' && term.back() == '"') term = term.substr(1, term.size() - 2);
    if (term.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty term");
    try {
      utf8::validate(term);
    } catch (const DecodeError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    row(utf8::fold(term), value, line_no);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> unit_terms(const std::string& unit) {
  static const corpus::Stoplist kNoStopwords;
  std::vector<std::string> out;
  for (auto& t : corpus::tokenize(unit, kNoStopwords)) {
    if (t.is_alpha) out.push_back(std::move(t.lower));
  }
  return out;
}

}  // namespace

SentimentLexicon SentimentLexicon::parse(std::string_view csv, const std::string& origin) {
  SentimentLexicon lex;
  for_each_row(csv, origin, "polarity", [&](std::string term, const std::string& value, std::size_t line) {
    double polarity = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, polarity);
    if (ec != std::errc{} || ptr != end) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": bad polarity '" + value + "'");
    }
    try {
      lex.add(term, polarity);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void SentimentLexicon::add(std::string_view term, double polarity) {
  if (!(polarity >= -1.0 && polarity <= 1.0)) {
    throw ConfigError("polarity for '" + std::string(term) + "' outside [-1,1]");
  }
  auto folded = utf8::fold(term);
  auto [it, inserted] = terms_.emplace(folded, polarity);
  if (!inserted && it->second != polarity) {
    throw ConfigError("conflicting polarities for '" + folded + "'");
  }
}

const double* SentimentLexicon::find(std::string_view folded_term) const {
  auto it = terms_.find(folded_term);
  return it == terms_.end() ? nullptr : &it->second;
}

std::string SentimentLexicon::digest() const {
  std::string body;
  for (const auto& [term, p] : terms_) body += term + '\t' + canonical::fixed(p, 17) + '\n';
  return canonical::sha256_hex(body);
}

EmotionLexicon EmotionLexicon::parse(std::string_view csv, const std::string& origin) {
  EmotionLexicon lex;
  for_each_row(csv, origin, "emotion", [&](std::string term, const std::string& value, std::size_t line) {
    const auto emotion = parse_emotion(value);
    if (!emotion) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": unknown emotion '" + value + "'");
    }
    lex.add(term, *emotion);
  });
  return lex;
}

EmotionLexicon EmotionLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void EmotionLexicon::add(std::string_view term, Emotion emotion) {
  terms_[utf8::fold(term)][static_cast<std::size_t>(emotion)] = true;
}

const std::array<bool, kEmotionCount>* EmotionLexicon::find(std::string_view folded_term) const {
  auto it = terms_.find(folded_term);
  return it == terms_.end() ? nullptr : &it->second;
}

std::string EmotionLexicon::digest() const {
  std::string body;
  for (const auto& [term, flags] : terms_) {
    body += term;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      if (flags[i]) {
        body += '\t';
        body += kEmotionNames[i];
      }
    }
    body += '\n';
  }
  return canonical::sha256_hex(body);
}

LexiconSentimentScorer::LexiconSentimentScorer(SentimentLexicon lexicon, Granularity granularity)
    : lexicon_(std::move(lexicon)), granularity_(granularity) {}

std::string LexiconSentimentScorer::identity() const {
  return "lexicon_sentiment:" + lexicon_.digest().substr(0, 16) +
         (granularity_ == Granularity::segment ? "/segment" : "/sentence");
}

std::vector<Valence> LexiconSentimentScorer::score_units(std::span<const std::string> units) {
  std::vector<Valence> out;
  out.reserve(units.size());
  for (const auto& unit : units) {
    double sum = 0;
    std::size_t hits = 0;
    for (const auto& term : unit_terms(unit)) {
      if (const double* p = lexicon_.find(term)) {
        sum += *p;
        ++hits;
      }
    }
    const double p = hits ? sum / static_cast<double>(hits) : 0.0;
    out.emplace_back(std::clamp((p + 1.0) / 2.0, 0.0, 1.0));
  }
  return out;
}

LexiconEmotionScorer::LexiconEmotionScorer(EmotionLexicon lexicon, Granularity granularity)
    : lexicon_(std::move(lexicon)), granularity_(granularity) {}

std::string LexiconEmotionScorer::identity() const {
  return "lexicon_emotion:" + lexicon_.digest().substr(0, 16) +
         (granularity_ == Granularity::segment ? "/segment" : "/sentence");
}

EmotionScores LexiconEmotionScorer::count_hits(std::span<const std::string> units) const {
  EmotionScores counts{};
  for (const auto& unit : units) {
    for (const auto& term : unit_terms(unit)) {
      if (const auto* flags = lexicon_.find(term)) {
        for (std::size_t i = 0; i < kEmotionCount; ++i) {
          if ((*flags)[i]) counts[i] += 1;
        }
      }
    }
  }
  return counts;
}

EmotionProfile LexiconEmotionScorer::score_units(std::span<const std::string> units) {
  return EmotionProfile::from_mass(count_hits(units));
}

std::unique_ptr<SentimentScorer> make_lexicon_sentiment_scorer(const ScorerDescriptor& desc) {
  if (desc.kind != ScorerKind::lexicon_sentiment) throw ConfigError("descriptor is not a sentiment lexicon");
  return std::make_unique<LexiconSentimentScorer>(SentimentLexicon::load(desc.resource), desc.granularity);
}

std::unique_ptr<EmotionScorer> make_lexicon_emotion_scorer(const ScorerDescriptor& desc) {
  if (desc.kind != ScorerKind::lexicon_emotion) throw ConfigError("descriptor is not an emotion lexicon");
  return std::make_unique<LexiconEmotionScorer>(EmotionLexicon::load(desc.resource), desc.granularity);
}

}  // namespace dramaturg::affect
