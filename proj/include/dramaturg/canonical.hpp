#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

// Stable text forms shared by every serialized output.
namespace dramaturg::canonical {

inline constexpr int kDecimals = 6;

// Fixed-point with kDecimals places; negative zero prints as zero.
std::string fixed(double value, int decimals = kDecimals);

// Sorted keys, two-space indent, floats in fixed notation, trailing newline.
std::string dump(const nlohmann::json& value);

std::string sha256_hex(std::string_view data);

}  // namespace dramaturg::canonical
