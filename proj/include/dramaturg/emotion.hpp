#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace dramaturg {

// Fixed label set, in canonical order. This order is the tie-break for
// dominant-emotion selection and the column order of every output.
enum class Emotion : std::size_t { sadness, joy, love, anger, fear, surprise };

inline constexpr std::size_t kEmotionCount = 6;

inline constexpr std::array<Emotion, kEmotionCount> kEmotions = {
    Emotion::sadness, Emotion::joy, Emotion::love, Emotion::anger, Emotion::fear, Emotion::surprise};

inline constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "sadness", "joy", "love", "anger", "fear", "surprise"};

constexpr std::string_view name_of(Emotion e) { return kEmotionNames[static_cast<std::size_t>(e)]; }

constexpr std::optional<Emotion> parse_emotion(std::string_view name) {
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (kEmotionNames[i] == name) return kEmotions[i];
  }
  return std::nullopt;
}

using EmotionScores = std::array<double, kEmotionCount>;

}  // namespace dramaturg
