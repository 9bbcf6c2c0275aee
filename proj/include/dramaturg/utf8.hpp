#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 and character-class support. Classification covers Latin,
// Greek and Cyrillic scripts, which is what French dramatic text needs;
// anything else is treated as a non-letter symbol.
namespace dramaturg::utf8 {

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset of the first code unit
  std::size_t length;  // number of code units
};

// Throws DecodeError carrying the offset of the first bad byte.
std::vector<CodePoint> decode(std::string_view text);
void validate(std::string_view text);

void append(std::string& out, char32_t cp);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_combining_mark(char32_t cp);
bool is_space(char32_t cp);
bool is_newline(char32_t cp);
// C0/C1 controls and DEL; newline is reported as control too.
bool is_control(char32_t cp);
bool is_apostrophe(char32_t cp);  // U+0027 or U+2019
bool is_uppercase(char32_t cp);

char32_t to_lower(char32_t cp);

// Case-folds and maps U+2019 to U+0027 so both apostrophes compare equal.
std::string fold(std::string_view text);

std::size_t length(std::string_view text);

}  // namespace dramaturg::utf8
