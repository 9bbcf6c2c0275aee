#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "dramaturg/affect.hpp"

// Word-association lexicons and the deterministic scorers built on them.
namespace dramaturg::affect {

// CSV `term,polarity`, polarity in [-1, 1]. A header row and `#` comment
// lines are allowed. Terms are case-folded on load.
class SentimentLexicon {
 public:
  static SentimentLexicon load(const std::filesystem::path& path);
  static SentimentLexicon parse(std::string_view csv, const std::string& origin = "<memory>");

  void add(std::string_view term, double polarity);
  const double* find(std::string_view folded_term) const;
  std::size_t size() const { return terms_.size(); }
  // Content digest, independent of file layout and row order.
  std::string digest() const;

 private:
  std::map<std::string, double, std::less<>> terms_;
};

// CSV `term,emotion` with emotion in the fixed label set; a term may appear
// on several rows with different emotions.
class EmotionLexicon {
 public:
  static EmotionLexicon load(const std::filesystem::path& path);
  static EmotionLexicon parse(std::string_view csv, const std::string& origin = "<memory>");

  void add(std::string_view term, Emotion emotion);
  const std::array<bool, kEmotionCount>* find(std::string_view folded_term) const;
  std::size_t size() const { return terms_.size(); }
  std::string digest() const;

 private:
  std::map<std::string, std::array<bool, kEmotionCount>, std::less<>> terms_;
};

// Unit valence = (p + 1) / 2 where p is the mean polarity of the unit's
// matched word tokens; a unit without matches scores 0.5.
class LexiconSentimentScorer final : public SentimentScorer {
 public:
  explicit LexiconSentimentScorer(SentimentLexicon lexicon,
                                  Granularity granularity = Granularity::sentence);
  std::string identity() const override;
  Granularity granularity() const override { return granularity_; }
  std::vector<Valence> score_units(std::span<const std::string> units) override;

 private:
  SentimentLexicon lexicon_;
  Granularity granularity_;
};

// Hits are pooled over all units, then normalized.
class LexiconEmotionScorer final : public EmotionScorer {
 public:
  explicit LexiconEmotionScorer(EmotionLexicon lexicon,
                                Granularity granularity = Granularity::sentence);
  std::string identity() const override;
  Granularity granularity() const override { return granularity_; }
  EmotionProfile score_units(std::span<const std::string> units) override;
  // Raw hit counts per label, before normalization.
  EmotionScores count_hits(std::span<const std::string> units) const;

 private:
  EmotionLexicon lexicon_;
  Granularity granularity_;
};

std::unique_ptr<SentimentScorer> make_lexicon_sentiment_scorer(const ScorerDescriptor& desc);
std::unique_ptr<EmotionScorer> make_lexicon_emotion_scorer(const ScorerDescriptor& desc);

}  // namespace dramaturg::affect
