#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dramaturg/corpus.hpp"
#include "dramaturg/emotion.hpp"

// Sentiment and emotion scoring of segments, arc assembly, and the derived
// distribution and tension metrics.
namespace dramaturg::affect {

// Positive-class probability; 0.5 is neutral.
class Valence {
 public:
  // Throws std::out_of_range outside [0, 1].
  explicit Valence(double value);
  double value() const noexcept { return value_; }
  bool operator==(const Valence&) const = default;

 private:
  double value_;
};

struct EmotionProfile {
  EmotionScores scores{};
  bool no_signal = false;

  double operator[](Emotion e) const { return scores[static_cast<std::size_t>(e)]; }

  // Normalizes non-negative mass to sum 1. Zero mass gives a no-signal
  // profile with uniform scores.
  static EmotionProfile from_mass(const EmotionScores& mass);
  static EmotionProfile uniform_no_signal();
};

struct ArcPoint {
  std::size_t segment_index = 0;
  std::optional<Valence> valence;
  std::optional<EmotionProfile> emotions;
};

struct AffectArc {
  std::string play;
  std::vector<ArcPoint> points;
  std::size_t window = corpus::SegmentationConfig::kDefaultWindow;
};

enum class Granularity { sentence, segment };

enum class ScorerKind { lexicon_sentiment, lexicon_emotion, external };

struct ScorerDescriptor {
  ScorerKind kind;
  std::string resource;  // lexicon path or endpoint
  Granularity granularity = Granularity::sentence;
};

class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  // Stable description of the scorer and its resources, used for cache
  // fingerprints and report compatibility.
  virtual std::string identity() const = 0;
  virtual Granularity granularity() const { return Granularity::sentence; }
  // One valence per unit, in order.
  virtual std::vector<Valence> score_units(std::span<const std::string> units) = 0;
};

class EmotionScorer {
 public:
  virtual ~EmotionScorer() = default;
  virtual std::string identity() const = 0;
  virtual Granularity granularity() const { return Granularity::sentence; }
  // One aggregated profile for all units.
  virtual EmotionProfile score_units(std::span<const std::string> units) = 0;
};

// Unit valences are averaged without weights.
Valence score_segment_sentiment(std::span<const std::string> units, SentimentScorer& scorer);
EmotionProfile score_segment_emotions(std::span<const std::string> units, EmotionScorer& scorer);

// Sentence units for every segment. A sentence belongs to the segment that
// holds its first token; a segment lying entirely inside a sentence that
// started earlier gets its own text as a single unit.
std::vector<std::vector<std::string>> segment_units(const corpus::TokenizedPlay& play,
                                                    std::span<const corpus::Segment> segments);

// At least one scorer must be given. Scorer errors are rethrown annotated
// with the failing segment index.
AffectArc build_arc(const corpus::TokenizedPlay& play, std::span<const corpus::Segment> segments,
                    std::size_t window, SentimentScorer* sentiment, EmotionScorer* emotion);

// Mass-normalized percentage per label over points with signal.
EmotionScores emotion_percentages(const AffectArc& arc);

struct TensionMetrics {
  double final_third_delta = 0;
  std::size_t peak_negativity_index = 0;  // segment index of the lowest valence
  double mean_valence = 0;
};

TensionMetrics tension_metrics(const AffectArc& arc);

std::string arc_to_csv(const AffectArc& arc);

}  // namespace dramaturg::affect
