#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace applause {

// Stress-free ARPAbet symbols as used by the CMU pronouncing dictionary.
enum class Phoneme : std::uint8_t {
  AA, AE, AH, AO, AW, AY, B, CH, D, DH, EH, ER, EY, F, G, HH, IH, IY, JH, K,
  L, M, N, NG, OW, OY, P, R, S, SH, T, TH, UH, UW, V, W, Y, Z, ZH
};
inline constexpr std::size_t kPhonemeCount = 39;

// Accepts stressed or stress-free spellings ("AH0", "AH"); returns nullopt
// for anything outside the ARPAbet set.
std::optional<Phoneme> parse_phoneme(std::string_view symbol);
std::string_view to_string(Phoneme phoneme);
std::string strip_stress(std::string_view symbol);

using Pronunciation = std::vector<Phoneme>;

class PhoneticDict {
 public:
  // Keys are uppercase. Alternates are appended after the primary.
  void add(const std::string& word, Pronunciation pronunciation);

  // Primary pronunciation only; lookup is case-insensitive.
  const Pronunciation* lookup(std::string_view word) const;
  std::span<const Pronunciation> pronunciations(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, std::vector<Pronunciation>>& entries()
      const {
    return entries_;
  }

 private:
  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
};

std::optional<Pronunciation> lookup_phonemes(const PhoneticDict& dict,
                                             std::string_view word);

// CMU dict text: ";;;" comments, "WORD  PH1 PH2 ...", "WORD(2)  ..." for
// alternates; trailing "# ..." comments are ignored.
PhoneticDict load_phonetic_dict(std::istream& in);

enum class EmotionCategory : std::uint8_t {
  kAnger, kAnticipation, kDisgust, kFear, kJoy, kSadness, kSurprise, kTrust,
  kNegative, kPositive
};
inline constexpr std::size_t kEmotionCount = 10;
inline constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "anger", "anticipation", "disgust", "fear",     "joy",
    "sadness", "surprise",   "trust",   "negative", "positive"};

using EmotionSet = std::bitset<kEmotionCount>;

struct EmotionLexicon {
  std::unordered_map<std::string, EmotionSet> word_to_categories;

  EmotionSet categories(const std::string& word) const;
};

// NRC word-level format: "word<TAB>category<TAB>0|1"; only flag 1 is kept.
EmotionLexicon load_emotion_lexicon(std::istream& in);

struct CategoryLexicon {
  std::string category_name;
  std::set<std::string> exact_terms;
  std::set<std::string> prefix_terms;

  bool operator==(const CategoryLexicon&) const = default;
};

// "term<TAB>category" per line; a trailing '*' marks a prefix term. Blank
// lines and lines starting with '#' are skipped. Categories are returned in
// order of first appearance.
std::vector<CategoryLexicon> load_category_lexicon_file(std::istream& in);

bool match_token(const CategoryLexicon& lexicon, std::string_view token);
bool matches_any_prefix(std::span<const std::string> prefixes,
                        std::string_view token);

struct NameSet {
  std::unordered_set<std::string> names;

  bool contains(const std::string& lower) const {
    return names.count(lower) > 0;
  }
};

// One name per line. SSA-style "Name,Sex,Count" and "Name<TAB>Count" lines are
// also accepted; entries with a count below min_count are dropped. Lines
// without a count always pass.
NameSet load_name_set(std::istream& in, std::uint64_t min_count = 0);

struct LexiconBundle {
  PhoneticDict phonetic;
  EmotionLexicon emotions;
  std::vector<CategoryLexicon> categories;
  NameSet names;
  std::vector<std::string> gratitude_prefixes = {"grateful", "gratitud",
                                                 "thank", "appreciate", "bless"};
  std::vector<std::string> applause_prefixes = {"applau"};
};

struct LexiconPaths {
  std::filesystem::path phonetic_dict;
  std::filesystem::path emotion_lexicon;
  std::filesystem::path category_lexicon;
  std::filesystem::path names;
  std::uint64_t name_min_count = 0;
};

// Throws kMissingResource listing every path that does not exist.
LexiconBundle load_bundle(const LexiconPaths& paths);

}  // namespace applause
