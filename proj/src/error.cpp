#include "dramaturg/error.hpp"

namespace dramaturg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::decode: return "decode";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::empty_scope: return "empty_scope";
    case ErrorKind::canvas_exhausted: return "canvas_exhausted";
    case ErrorKind::arc_too_short: return "arc_too_short";
    case ErrorKind::no_emotional_signal: return "no_emotional_signal";
    case ErrorKind::incompatible: return "incompatible";
    case ErrorKind::scorer: return "scorer";
  }
  return "unknown";
}

namespace {

std::string join_keys(const std::vector<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

std::string dropped_message(const std::optional<std::int64_t>& last, std::size_t pending) {
  std::string msg = "scorer connection dropped; last acknowledged id: ";
  msg += last ? std::to_string(*last) : std::string("none");
  msg += " (" + std::to_string(pending) + " requests unanswered)";
  return msg;
}

}  // namespace

IncompatibleReportsError::IncompatibleReportsError(std::vector<std::string> keys)
    : Error(ErrorKind::incompatible, "incompatible reports; differing keys: " + join_keys(keys)),
      keys_(std::move(keys)) {}

ConnectionDroppedError::ConnectionDroppedError(std::optional<std::int64_t> last_acked,
                                               std::size_t pending)
    : ScorerError(dropped_message(last_acked, pending)),
      last_acked_(last_acked),
      pending_(pending) {}

}  // namespace dramaturg
