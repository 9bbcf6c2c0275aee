#include "dramaturg/affect.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dramaturg/canonical.hpp"
#include "dramaturg/error.hpp"

namespace dramaturg::affect {

Valence::Valence(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::out_of_range("valence outside [0,1]: " + std::to_string(value));
  }
}

EmotionProfile EmotionProfile::from_mass(const EmotionScores& mass) {
  double total = 0;
  for (double m : mass) {
    if (!(m >= 0)) throw std::invalid_argument("emotion mass must be non-negative");
    total += m;
  }
  if (total <= 0) return uniform_no_signal();
  EmotionProfile p;
  for (std::size_t i = 0; i < kEmotionCount; ++i) p.scores[i] = mass[i] / total;
  return p;
}

EmotionProfile EmotionProfile::uniform_no_signal() {
  EmotionProfile p;
  p.scores.fill(1.0 / kEmotionCount);
  p.no_signal = true;
  return p;
}

namespace {

std::vector<std::string> admissible_units(std::span<const std::string> units, Granularity granularity) {
  std::vector<std::string> out;
  for (const auto& u : units) {
    if (u.find_first_not_of(" \t\n") != std::string::npos) out.push_back(u);
  }
  if (out.empty()) throw EmptyScopeError("empty scope: segment has no text to score");
  if (granularity == Granularity::segment && out.size() > 1) {
    std::string joined;
    for (const auto& u : out) {
      if (!joined.empty()) joined += ' ';
      joined += u;
    }
    out.assign(1, std::move(joined));
  }
  return out;
}

}  // namespace

Valence score_segment_sentiment(std::span<const std::string> units, SentimentScorer& scorer) {
  const auto admitted = admissible_units(units, scorer.granularity());
  const auto scores = scorer.score_units(admitted);
  if (scores.size() != admitted.size()) {
    throw ScorerError("sentiment scorer returned " + std::to_string(scores.size()) + " scores for " +
                      std::to_string(admitted.size()) + " units");
  }
  double sum = 0;
  for (const auto& v : scores) sum += v.value();
  // the mean of values in [0,1] can drift past 1 by an ulp
  return Valence(std::clamp(sum / static_cast<double>(scores.size()), 0.0, 1.0));
}

EmotionProfile score_segment_emotions(std::span<const std::string> units, EmotionScorer& scorer) {
  const auto admitted = admissible_units(units, scorer.granularity());
  return scorer.score_units(admitted);
}

std::vector<std::vector<std::string>> segment_units(const corpus::TokenizedPlay& play,
                                                    std::span<const corpus::Segment> segments) {
  std::vector<std::vector<std::string>> units(segments.size());
  std::size_t s = 0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& range = segments[k].token_range;
    while (s < play.sentences.size() && play.sentences[s].begin < range.begin) ++s;
    while (s < play.sentences.size() && play.sentences[s].begin < range.end) {
      units[k].emplace_back(corpus::text_of(play, play.sentences[s]));
      ++s;
    }
    if (units[k].empty() && !range.empty()) {
      units[k].emplace_back(corpus::text_of(play, range));
    }
  }
  return units;
}

AffectArc build_arc(const corpus::TokenizedPlay& play, std::span<const corpus::Segment> segments,
                    std::size_t window, SentimentScorer* sentiment, EmotionScorer* emotion) {
  if (!sentiment && !emotion) throw ConfigError("build_arc needs a sentiment or an emotion scorer");
  AffectArc arc;
  arc.play = play.document ? play.document->title : std::string{};
  arc.window = window;
  const auto units = segment_units(play, segments);
  arc.points.reserve(segments.size());
  for (std::size_t k = 0; k < segments.size(); ++k) {
    ArcPoint point;
    point.segment_index = k;
    try {
      if (sentiment) point.valence = score_segment_sentiment(units[k], *sentiment);
      if (emotion) point.emotions = score_segment_emotions(units[k], *emotion);
    } catch (ScorerError& e) {
      e.set_segment_index(k);
      throw;
    } catch (EmptyScopeError& e) {
      throw EmptyScopeError(std::string(e.what()) + " (segment " + std::to_string(k) + ")");
    }
    arc.points.push_back(std::move(point));
  }
  return arc;
}

EmotionScores emotion_percentages(const AffectArc& arc) {
  EmotionScores mass{};
  double total = 0;
  for (const auto& p : arc.points) {
    if (!p.emotions || p.emotions->no_signal) continue;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      mass[i] += p.emotions->scores[i];
      total += p.emotions->scores[i];
    }
  }
  if (total <= 0) throw NoEmotionalSignalError();
  EmotionScores pct{};
  for (std::size_t i = 0; i < kEmotionCount; ++i) pct[i] = 100.0 * mass[i] / total;
  return pct;
}

TensionMetrics tension_metrics(const AffectArc& arc) {
  std::vector<std::pair<std::size_t, double>> points;
  for (const auto& p : arc.points) {
    if (p.valence) points.emplace_back(p.segment_index, p.valence->value());
  }
  const std::size_t n = points.size();
  if (n < 3) throw ArcTooShortError(n);
  const std::size_t tail = (n + 2) / 3;
  const std::size_t head = n - tail;
  double head_neg = 0, tail_neg = 0, sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double neg = 1.0 - points[i].second;
    (i < head ? head_neg : tail_neg) += neg;
    sum += points[i].second;
  }
  TensionMetrics m;
  m.final_third_delta = tail_neg / static_cast<double>(tail) - head_neg / static_cast<double>(head);
  m.mean_valence = sum / static_cast<double>(n);
  auto lowest = std::min_element(points.begin(), points.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
  m.peak_negativity_index = lowest->first;
  return m;
}

std::string arc_to_csv(const AffectArc& arc) {
  std::string out = "segment,valence";
  for (auto name : kEmotionNames) {
    out += ',';
    out += name;
  }
  out += ",no_signal\n";
  for (const auto& p : arc.points) {
    out += std::to_string(p.segment_index);
    out += ',';
    if (p.valence) out += canonical::fixed(p.valence->value());
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      out += ',';
      if (p.emotions) out += canonical::fixed(p.emotions->scores[i]);
    }
    out += ',';
    if (p.emotions) out += p.emotions->no_signal ? "true" : "false";
    out += '\n';
  }
  return out;
}

}  // namespace dramaturg::affect
