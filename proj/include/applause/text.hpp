#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace applause {

struct Token {
  std::string lower;
  bool capitalized = false;  // first character was an uppercase ASCII letter
  bool sentence_initial = false;
};

// Lowercase word tokens. Splits on anything that is not a letter or digit,
// keeping apostrophes (ASCII or U+2019) that sit between two word characters,
// so "don't" stays one token. U+2019 is normalized to '.
std::vector<std::string> tokenize(std::string_view text);

// Same segmentation as tokenize() with original-case information; the first
// token is marked sentence_initial.
std::vector<Token> tokenize_with_case(std::string_view text);

std::string to_lower_ascii(std::string_view text);
std::string to_upper_ascii(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace applause
