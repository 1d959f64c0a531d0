#include "applause/text.hpp"

#include <cstdint>
#include <iostream>

#include "applause/error.hpp"

namespace applause {

namespace {

WarningSink g_sink = nullptr;

struct CodePoint {
  std::uint32_t value;
  std::size_t length;
};

CodePoint decode(std::string_view text, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  auto cont = [&](std::size_t k) -> std::uint32_t {
    if (pos + k >= text.size()) return 0x80000000u;
    const auto c = static_cast<unsigned char>(text[pos + k]);
    return (c & 0xC0) == 0x80 ? (c & 0x3Fu) : 0x80000000u;
  };
  if (lead < 0x80) return {lead, 1};
  if ((lead & 0xE0) == 0xC0) {
    const auto c1 = cont(1);
    if (c1 & 0x80000000u) return {0xFFFD, 1};
    return {((lead & 0x1Fu) << 6) | c1, 2};
  }
  if ((lead & 0xF0) == 0xE0) {
    const auto c1 = cont(1), c2 = cont(2);
    if ((c1 | c2) & 0x80000000u) return {0xFFFD, 1};
    return {((lead & 0x0Fu) << 12) | (c1 << 6) | c2, 3};
  }
  if ((lead & 0xF8) == 0xF0) {
    const auto c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if ((c1 | c2 | c3) & 0x80000000u) return {0xFFFD, 1};
    return {((lead & 0x07u) << 18) | (c1 << 12) | (c2 << 6) | c3, 4};
  }
  return {0xFFFD, 1};
}

bool is_word_char(std::uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  // Latin-1 punctuation/symbols, general punctuation, replacement char.
  if (cp < 0xC0) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp == 0xFFFD || cp == 0xFEFF) return false;
  return true;
}

bool is_apostrophe(std::uint32_t cp) { return cp == '\'' || cp == 0x2019; }

template <typename Emit>
void scan_words(std::string_view text, Emit&& emit) {
  std::string current;
  std::size_t pos = 0;
  bool first_upper = false;
  auto flush = [&] {
    if (!current.empty()) emit(std::move(current), first_upper);
    current.clear();
    first_upper = false;
  };
  while (pos < text.size()) {
    const CodePoint cp = decode(text, pos);
    if (is_word_char(cp.value)) {
      if (current.empty()) first_upper = cp.value >= 'A' && cp.value <= 'Z';
      if (cp.value < 0x80) {
        char c = static_cast<char>(cp.value);
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        current.push_back(c);
      } else {
        current.append(text.substr(pos, cp.length));
      }
    } else if (is_apostrophe(cp.value) && !current.empty() &&
               pos + cp.length < text.size() &&
               is_word_char(decode(text, pos + cp.length).value)) {
      current.push_back('\'');
    } else {
      flush();
    }
    pos += cp.length;
  }
  flush();
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTranscript: return "EmptyTranscript";
    case ErrorCode::kInvalidWindow: return "InvalidWindow";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kRegistryMismatch: return "RegistryMismatch";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kCvFailure: return "CVFailure";
    case ErrorCode::kImportanceUndefined: return "ImportanceUndefined";
    case ErrorCode::kModelMismatch: return "ModelMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMissingResource: return "MissingResource";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IOError";
  }
  return "Error";
}

void set_warning_sink(WarningSink sink) { g_sink = sink; }

void warn(std::string_view message) {
  if (g_sink != nullptr) {
    g_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> words;
  scan_words(text, [&](std::string&& w, bool) { words.push_back(std::move(w)); });
  return words;
}

std::vector<Token> tokenize_with_case(std::string_view text) {
  std::vector<Token> tokens;
  scan_words(text, [&](std::string&& w, bool upper) {
    tokens.push_back(Token{std::move(w), upper, tokens.empty()});
  });
  return tokens;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string to_upper_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto begin = text.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(kSpace);
  return text.substr(begin, end - begin + 1);
}

}  // namespace applause
