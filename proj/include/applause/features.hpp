#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "applause/corpus.hpp"
#include "applause/design.hpp"
#include "applause/lexicon.hpp"
#include "applause/text.hpp"

namespace applause {

enum class Family : std::uint8_t {
  kLinguisticStyle,
  kEmotion,
  kPhonetic,
  kNameProjection,
  kGratitude,
  kQuestion,
  kApplauseSeeking,
};
inline constexpr std::size_t kFamilyCount = 7;
inline constexpr std::array<Family, kFamilyCount> kAllFamilies = {
    Family::kLinguisticStyle, Family::kEmotion,   Family::kPhonetic,
    Family::kNameProjection,  Family::kGratitude, Family::kQuestion,
    Family::kApplauseSeeking};

std::string_view to_string(Family family);

enum class FeatureKind : std::uint8_t { kRatio, kBinary };

struct FeatureSpec {
  std::string name;
  Family family;
  FeatureKind kind;

  bool operator==(const FeatureSpec&) const = default;
};

// Column layout: one "style_<category>" ratio per category lexicon (file
// order), ten "emotion_<category>" ratios, alliteration, rhyme, homogeneity,
// then the binary name_projection, gratitude, question, applause_seeking.
class FeatureRegistry {
 public:
  static FeatureRegistry for_bundle(const LexiconBundle& bundle);

  std::span<const FeatureSpec> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<std::string> names() const;
  std::vector<std::size_t> columns_of(Family family) const;
  std::size_t index_of(std::string_view name) const;

  // Stable hash over (name, family, kind) of every entry, in order.
  std::uint64_t fingerprint() const;
  bool matches(const LexiconBundle& bundle) const;

 private:
  std::vector<FeatureSpec> entries_;
};

struct FeatureVector {
  Eigen::VectorXd values;
  std::size_t word_count = 0;
};

// Category-lexicon ratios followed by the ten emotion ratios, each
// (matching tokens) / (word count); zeros for an empty word list.
Eigen::VectorXd style_and_emotion_features(std::span<const std::string> words,
                                           const LexiconBundle& bundle);

// Phonetic ratios over in-dictionary words (primary pronunciation); OOV words
// are ignored and a zero phoneme total yields 0.
double alliteration_score(std::span<const std::string> words,
                          const PhoneticDict& dict);
double rhyme_score(std::span<const std::string> words, const PhoneticDict& dict);
double homogeneity_score(std::span<const std::string> words,
                         const PhoneticDict& dict);

struct BinaryDevices {
  bool name = false;
  bool gratitude = false;
  bool question = false;
  bool applause_seeking = false;
};

// `tokens` carries case and sentence-initial flags; `text` is used for '?'.
BinaryDevices binary_detectors(std::span<const Token> tokens,
                               std::string_view text,
                               const LexiconBundle& bundle);
BinaryDevices binary_detectors(std::string_view sentence_text,
                               const LexiconBundle& bundle);

// Concatenates the window's sentences and runs every extractor over it.
FeatureVector extract(std::span<const std::string> window,
                      const LexiconBundle& bundle,
                      const FeatureRegistry& registry);

struct FeatureMatrix {
  DesignMatrix design;
  std::vector<std::string> talk_ids;  // one per row
};

FeatureMatrix extract_examples(const std::vector<LabeledExample>& examples,
                               const LexiconBundle& bundle,
                               const FeatureRegistry& registry);

// Header: feature names, talk_id, label. Floats with 6 decimals.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix);

}  // namespace applause
