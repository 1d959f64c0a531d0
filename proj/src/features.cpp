#include "applause/features.hpp"

#include <algorithm>
#include <bitset>
#include <cstdio>
#include <ostream>

#include "applause/error.hpp"
#include "applause/reports.hpp"
#include "applause/rng.hpp"

namespace applause {

namespace {

constexpr std::string_view kStylePrefix = "style_";
constexpr std::string_view kEmotionPrefix = "emotion_";

struct PhoneticCounts {
  std::array<int, kPhonemeCount> initials{};
  std::array<int, kPhonemeCount> finals{};
  std::bitset<kPhonemeCount> distinct;
  int total = 0;
};

PhoneticCounts count_phonemes(std::span<const std::string> words,
                              const PhoneticDict& dict) {
  PhoneticCounts counts;
  for (const std::string& word : words) {
    const Pronunciation* p = dict.lookup(word);
    if (p == nullptr || p->empty()) continue;
    ++counts.initials[static_cast<std::size_t>(p->front())];
    ++counts.finals[static_cast<std::size_t>(p->back())];
    for (Phoneme ph : *p) counts.distinct.set(static_cast<std::size_t>(ph));
    counts.total += static_cast<int>(p->size());
  }
  return counts;
}

int repeats(const std::array<int, kPhonemeCount>& counts) {
  int sum = 0;
  for (int c : counts) sum += std::max(0, c - 1);
  return sum;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kLinguisticStyle: return "linguistic_style";
    case Family::kEmotion: return "emotion";
    case Family::kPhonetic: return "phonetic";
    case Family::kNameProjection: return "name_projection";
    case Family::kGratitude: return "gratitude";
    case Family::kQuestion: return "question";
    case Family::kApplauseSeeking: return "applause_seeking";
  }
  return "unknown";
}

FeatureRegistry FeatureRegistry::for_bundle(const LexiconBundle& bundle) {
  FeatureRegistry registry;
  auto& e = registry.entries_;
  for (const CategoryLexicon& c : bundle.categories) {
    e.push_back({std::string(kStylePrefix) + c.category_name,
                 Family::kLinguisticStyle, FeatureKind::kRatio});
  }
  for (std::string_view emotion : kEmotionNames) {
    e.push_back({std::string(kEmotionPrefix) + std::string(emotion),
                 Family::kEmotion, FeatureKind::kRatio});
  }
  e.push_back({"alliteration", Family::kPhonetic, FeatureKind::kRatio});
  e.push_back({"rhyme", Family::kPhonetic, FeatureKind::kRatio});
  e.push_back({"homogeneity", Family::kPhonetic, FeatureKind::kRatio});
  e.push_back({"name_projection", Family::kNameProjection, FeatureKind::kBinary});
  e.push_back({"gratitude", Family::kGratitude, FeatureKind::kBinary});
  e.push_back({"question", Family::kQuestion, FeatureKind::kBinary});
  e.push_back({"applause_seeking", Family::kApplauseSeeking, FeatureKind::kBinary});

  std::vector<std::string> names = registry.names();
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw Error(ErrorCode::kRegistryMismatch, "duplicate feature names");
  }
  return registry;
}

std::vector<std::string> FeatureRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::vector<std::size_t> FeatureRegistry::columns_of(Family family) const {
  std::vector<std::size_t> columns;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].family == family) columns.push_back(i);
  }
  return columns;
}

std::size_t FeatureRegistry::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown feature '" + std::string(name) + "'");
}

std::uint64_t FeatureRegistry::fingerprint() const {
  std::uint64_t hash = fnv1a("applause-registry-v1");
  for (const auto& e : entries_) {
    hash = fnv1a(e.name, hash);
    hash = fnv1a(to_string(e.family), hash);
    hash = fnv1a(e.kind == FeatureKind::kRatio ? "ratio" : "binary", hash);
    hash = fnv1a(std::string_view("\n", 1), hash);
  }
  return hash;
}

bool FeatureRegistry::matches(const LexiconBundle& bundle) const {
  return entries_ == FeatureRegistry::for_bundle(bundle).entries_;
}

Eigen::VectorXd style_and_emotion_features(std::span<const std::string> words,
                                           const LexiconBundle& bundle) {
  const auto n_categories = static_cast<Eigen::Index>(bundle.categories.size());
  Eigen::VectorXd out =
      Eigen::VectorXd::Zero(n_categories + static_cast<Eigen::Index>(kEmotionCount));
  if (words.empty()) return out;
  for (const std::string& w : words) {
    for (Eigen::Index c = 0; c < n_categories; ++c) {
      if (match_token(bundle.categories[static_cast<std::size_t>(c)], w)) {
        out[c] += 1.0;
      }
    }
    const EmotionSet emotions = bundle.emotions.categories(w);
    for (std::size_t k = 0; k < kEmotionCount; ++k) {
      if (emotions.test(k)) out[n_categories + static_cast<Eigen::Index>(k)] += 1.0;
    }
  }
  out /= static_cast<double>(words.size());
  return out;
}

double alliteration_score(std::span<const std::string> words,
                          const PhoneticDict& dict) {
  const PhoneticCounts c = count_phonemes(words, dict);
  return c.total == 0 ? 0.0 : static_cast<double>(repeats(c.initials)) / c.total;
}

double rhyme_score(std::span<const std::string> words, const PhoneticDict& dict) {
  const PhoneticCounts c = count_phonemes(words, dict);
  return c.total == 0 ? 0.0 : static_cast<double>(repeats(c.finals)) / c.total;
}

double homogeneity_score(std::span<const std::string> words,
                         const PhoneticDict& dict) {
  const PhoneticCounts c = count_phonemes(words, dict);
  return c.total == 0 ? 0.0
                      : static_cast<double>(c.distinct.count()) / c.total;
}

BinaryDevices binary_detectors(std::span<const Token> tokens,
                               std::string_view text,
                               const LexiconBundle& bundle) {
  BinaryDevices devices;
  devices.question = text.find('?') != std::string_view::npos;
  for (const Token& t : tokens) {
    if (!devices.name && t.capitalized && !t.sentence_initial &&
        bundle.names.contains(t.lower)) {
      devices.name = true;
    }
    if (!devices.gratitude && matches_any_prefix(bundle.gratitude_prefixes, t.lower)) {
      devices.gratitude = true;
    }
    if (!devices.applause_seeking &&
        matches_any_prefix(bundle.applause_prefixes, t.lower)) {
      devices.applause_seeking = true;
    }
  }
  return devices;
}

BinaryDevices binary_detectors(std::string_view sentence_text,
                               const LexiconBundle& bundle) {
  const std::vector<Token> tokens = tokenize_with_case(sentence_text);
  return binary_detectors(tokens, sentence_text, bundle);
}

FeatureVector extract(std::span<const std::string> window,
                      const LexiconBundle& bundle,
                      const FeatureRegistry& registry) {
  if (window.empty()) {
    throw Error(ErrorCode::kInvalidWindow, "feature window is empty");
  }
  const std::size_t expected = bundle.categories.size() + kEmotionCount + 3 + 4;
  if (registry.size() != expected || !registry.matches(bundle)) {
    throw Error(ErrorCode::kRegistryMismatch,
                "registry does not match the lexicon bundle");
  }

  std::vector<Token> tokens;
  std::string text;
  for (const std::string& sentence : window) {
    std::vector<Token> sentence_tokens = tokenize_with_case(sentence);
    tokens.insert(tokens.end(), std::make_move_iterator(sentence_tokens.begin()),
                  std::make_move_iterator(sentence_tokens.end()));
    if (!text.empty()) text.push_back(' ');
    text += sentence;
  }
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const Token& t : tokens) words.push_back(t.lower);

  FeatureVector fv;
  fv.word_count = words.size();
  fv.values.resize(static_cast<Eigen::Index>(registry.size()));
  const Eigen::VectorXd lexical = style_and_emotion_features(words, bundle);
  Eigen::Index k = lexical.size();
  fv.values.head(k) = lexical;

  const PhoneticCounts c = count_phonemes(words, bundle.phonetic);
  const double total = c.total;
  fv.values[k++] = c.total == 0 ? 0.0 : repeats(c.initials) / total;
  fv.values[k++] = c.total == 0 ? 0.0 : repeats(c.finals) / total;
  fv.values[k++] = c.total == 0 ? 0.0 : static_cast<double>(c.distinct.count()) / total;

  const BinaryDevices d = binary_detectors(tokens, text, bundle);
  fv.values[k++] = d.name ? 1.0 : 0.0;
  fv.values[k++] = d.gratitude ? 1.0 : 0.0;
  fv.values[k++] = d.question ? 1.0 : 0.0;
  fv.values[k++] = d.applause_seeking ? 1.0 : 0.0;
  return fv;
}

FeatureMatrix extract_examples(const std::vector<LabeledExample>& examples,
                               const LexiconBundle& bundle,
                               const FeatureRegistry& registry) {
  if (!registry.matches(bundle)) {
    throw Error(ErrorCode::kRegistryMismatch,
                "registry does not match the lexicon bundle");
  }
  FeatureMatrix m;
  DesignMatrix& d = m.design;
  const auto n = static_cast<Eigen::Index>(examples.size());
  const auto p = static_cast<Eigen::Index>(registry.size());
  d.rows.resize(n, p);
  d.labels.resize(n);
  d.feature_names = registry.names();
  m.talk_ids.reserve(examples.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const LabeledExample& e = examples[static_cast<std::size_t>(i)];
    d.rows.row(i) = extract(e.sentence_texts, bundle, registry).values.transpose();
    d.labels[i] = e.label == Label::kPositive ? 1.0 : 0.0;
    m.talk_ids.push_back(e.talk_id);
  }
  return m;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix) {
  const DesignMatrix& d = matrix.design;
  for (const std::string& name : d.feature_names) out << name << ',';
  out << "talk_id,label\n";
  char buf[64];
  for (Eigen::Index i = 0; i < d.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.rows.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", d.rows(i, j));
      out << buf << ',';
    }
    out << csv_field(matrix.talk_ids[static_cast<std::size_t>(i)]) << ','
        << (d.labels[i] > 0.5 ? "pos" : "neg") << '\n';
  }
}

}  // namespace applause
