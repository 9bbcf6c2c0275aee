#pragma once

// Deterministic answers of the mock scorer, shared with the tests that check
// them. Kept free of library code so the expectations stay independent.

#include <array>
#include <cstddef>
#include <string_view>

namespace mock {

inline double scripted_valence(std::string_view text) {
  return static_cast<double>(text.size() % 101) / 100.0;
}

// Label (length mod 6) gets 0.5, the other five 0.1 each.
inline std::array<double, 6> scripted_emotions(std::string_view text) {
  std::array<double, 6> s{0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  s[text.size() % 6] = 0.5;
  return s;
}

}  // namespace mock
