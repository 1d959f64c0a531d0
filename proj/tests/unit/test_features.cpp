#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "applause/error.hpp"
#include "applause/features.hpp"
#include "applause/rng.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace applause;

namespace {

const char* kSmallDict =
    "CAT  K AE1 T\n"
    "HAT  HH AE1 T\n"
    "DOG  D AO1 G\n"
    "MAMA  M AA1 M AH0\n"
    "HELLO  HH AH0 L OW1\n"
    "PETER  P IY1 T ER0\n"
    "PIPER  P AY1 P ER0\n"
    "PICKED  P IH1 K T\n";

PhoneticDict small_dict() {
  std::istringstream in(kSmallDict);
  return load_phonetic_dict(in);
}

LexiconBundle tiny_bundle() {
  LexiconBundle b;
  b.phonetic = small_dict();
  std::istringstream emo("happy\tjoy\t1\nhappy\tpositive\t1\nhappy\tanger\t0\n");
  b.emotions = load_emotion_lexicon(emo);
  std::istringstream cats("i\tfirst_person_singular\nmy\tfirst_person_singular\nyou*\tsecond_person\n");
  b.categories = load_category_lexicon_file(cats);
  std::istringstream names("alex\ndaniel\nmaria\n");
  b.names = load_name_set(names);
  return b;
}

using Words = std::vector<std::string>;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("registry layout") {
  const LexiconBundle b = tiny_bundle();
  const FeatureRegistry reg = FeatureRegistry::for_bundle(b);
  CHECK(reg.size() == 2 + 10 + 3 + 4);
  const auto names = reg.names();
  CHECK(names.front() == "style_first_person_singular");
  CHECK(names[2] == "emotion_anger");
  CHECK(names[11] == "emotion_positive");
  CHECK(names[12] == "alliteration");
  CHECK(names.back() == "applause_seeking");
  CHECK(reg.columns_of(Family::kPhonetic).size() == 3);
  CHECK(reg.columns_of(Family::kEmotion).size() == 10);
  CHECK(reg.columns_of(Family::kLinguisticStyle).size() == 2);
  for (Family f : {Family::kNameProjection, Family::kGratitude, Family::kQuestion, Family::kApplauseSeeking}) {
    const auto cols = reg.columns_of(f);
    REQUIRE(cols.size() == 1);
    CHECK(reg.entries()[cols[0]].kind == FeatureKind::kBinary);
  }
  std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == names.size());
  CHECK(reg.matches(b));
  CHECK(FeatureRegistry::for_bundle(b).fingerprint() == reg.fingerprint());

  LexiconBundle other = b;
  other.categories.pop_back();
  CHECK_FALSE(reg.matches(other));
  CHECK(FeatureRegistry::for_bundle(other).fingerprint() != reg.fingerprint());
}

TEST_CASE("style and emotion ratios") {
  const LexiconBundle b = tiny_bundle();
  const Eigen::VectorXd happy = style_and_emotion_features(Words{"i", "am", "happy"}, b);
  REQUIRE(happy.size() == 12);
  const auto emotion = [](EmotionCategory c) { return 2 + static_cast<int>(c); };
  CHECK(happy[emotion(EmotionCategory::kJoy)] == doctest::Approx(1.0 / 3));
  CHECK(happy[emotion(EmotionCategory::kPositive)] == doctest::Approx(1.0 / 3));
  CHECK(happy[emotion(EmotionCategory::kAnger)] == 0);
  CHECK(happy[0] == doctest::Approx(1.0 / 3));

  CHECK(style_and_emotion_features(Words{"the", "the", "the"}, b).isZero());
  CHECK(style_and_emotion_features(Words{"i", "love", "my", "dog"}, b)[0] == 0.5);
  CHECK(style_and_emotion_features(Words{}, b).isZero());
  CHECK(style_and_emotion_features(Words{"yourself", "youth"}, b)[1] == 1.0);
}

TEST_CASE("phonetic scores on small examples") {
  const PhoneticDict d = small_dict();
  CHECK(alliteration_score(Words{"peter", "piper", "picked"}, d) == 2.0 / 12);
  CHECK(alliteration_score(Words{"hello"}, d) == 0);
  CHECK(alliteration_score(Words{"zzxqv", "qqq"}, d) == 0);
  CHECK(rhyme_score(Words{"cat", "hat"}, d) == 1.0 / 6);
  CHECK(rhyme_score(Words{"cat", "dog"}, d) == 0);
  CHECK(rhyme_score(Words{}, d) == 0);
  CHECK(homogeneity_score(Words{"cat"}, d) == 1.0);
  CHECK(homogeneity_score(Words{"mama"}, d) == 0.75);
  CHECK(homogeneity_score(Words{"zzxqv"}, d) == 0);
  // OOV words change nothing.
  CHECK(alliteration_score(Words{"peter", "zzz", "piper", "picked", "qq"}, d) == 2.0 / 12);
}

TEST_CASE("phonetic scores match the raw-dictionary oracle on random sentences") {
  const auto dict_path = testing::data_dir() / "lexicons" / "cmudict-subset.dict";
  const testing::RawDict raw = testing::parse_raw_dict(read_file(dict_path));
  std::ifstream in(dict_path);
  const PhoneticDict dict = load_phonetic_dict(in);
  std::vector<std::string> vocab;
  for (const auto& [word, phones] : raw) {
    std::string lower = word;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    vocab.push_back(lower);
  }
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Words words;
    const auto len = 1 + uniform_below(rng, 15);
    for (std::uint64_t i = 0; i < len; ++i) words.push_back(vocab[uniform_below(rng, vocab.size())]);
    if (trial % 4 == 0) words.push_back("notaword");
    const auto want = testing::phonetic_oracle(words, raw);
    CHECK(alliteration_score(words, dict) == want.alliteration);
    CHECK(rhyme_score(words, dict) == want.rhyme);
    CHECK(homogeneity_score(words, dict) == want.homogeneity);
  }
}

TEST_CASE("permutation and duplication invariance, monotone alliteration") {
  const LexiconBundle bundle = testing::fixture_bundle();
  const FeatureRegistry reg = FeatureRegistry::for_bundle(bundle);
  const auto vocab = testing::generator_vocabulary();
  Rng rng(5);
  const auto ratio_cols = [&] {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < reg.size(); ++j) {
      if (reg.entries()[j].kind == FeatureKind::kRatio) cols.push_back(j);
    }
    return cols;
  }();
  for (int trial = 0; trial < 100; ++trial) {
    Words words;
    const auto len = 1 + uniform_below(rng, 12);
    for (std::uint64_t i = 0; i < len; ++i) words.push_back(vocab[uniform_below(rng, vocab.size())]);
    const auto join = [](const Words& ws) {
      std::string s;
      for (const auto& w : ws) s += w + " ";
      return s + ".";
    };
    const std::vector<std::string> base{join(words)};
    Words shuffled = words;
    seeded_shuffle(shuffled, rng);
    Words doubled = words;
    doubled.insert(doubled.end(), words.begin(), words.end());
    const auto fb = extract(base, bundle, reg);
    const auto fs = extract(std::vector<std::string>{join(shuffled)}, bundle, reg);
    const auto fd = extract(std::vector<std::string>{join(doubled)}, bundle, reg);
    for (auto j : ratio_cols) {
      const auto& name = reg.entries()[j].name;
      CHECK_MESSAGE(fs.values[j] == doctest::Approx(fb.values[j]).epsilon(1e-12), name);
      if (name != "alliteration" && name != "rhyme" && name != "homogeneity") {
        CHECK_MESSAGE(fd.values[j] == doctest::Approx(fb.values[j]).epsilon(1e-12), name);
      }
    }
    for (Eigen::Index j = 0; j < fb.values.size(); ++j) {
      CHECK(std::isfinite(fb.values[j]));
      CHECK(fb.values[j] >= 0);
      CHECK(fb.values[j] <= 1);
    }

    // Adding a word that starts with the modal initial phoneme.
    std::map<Phoneme, int> counts;
    for (const auto& w : words) {
      if (const auto* p = bundle.phonetic.lookup(w)) counts[p->front()] += 1;
    }
    if (counts.empty()) continue;
    const Phoneme modal = std::max_element(counts.begin(), counts.end(),
                                           [](auto& a, auto& b) { return a.second < b.second; })->first;
    const auto numerator = [&](const Words& ws) {
      std::map<Phoneme, int> c;
      for (const auto& w : ws) {
        if (const auto* p = bundle.phonetic.lookup(w)) c[p->front()] += 1;
      }
      int n = 0;
      for (auto& [k, v] : c) n += v - 1;
      return n;
    };
    for (const auto& [word, prons] : bundle.phonetic.entries()) {
      if (prons.front().front() != modal) continue;
      std::string lower = word;
      for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      Words more = words;
      more.push_back(lower);
      CHECK(numerator(more) >= numerator(words));
      break;
    }
  }
}

TEST_CASE("binary detectors") {
  const LexiconBundle b = testing::fixture_bundle();
  const auto name = binary_detectors("I want to introduce the creators, Alex and Daniel", b);
  CHECK(name.name);
  const auto thanks = binary_detectors("I would like to thank you for listening", b);
  CHECK(thanks.gratitude);
  CHECK_FALSE(thanks.question);
  const auto tank = binary_detectors("The tank is empty", b);
  CHECK_FALSE(tank.gratitude);
  CHECK_FALSE(tank.question);
  CHECK(binary_detectors("Isn't that amazing?", b).question);
  CHECK(binary_detectors("Give them a round of applause", b).applause_seeking);
  CHECK(binary_detectors("They applauded loudly", b).applause_seeking);
  CHECK(binary_detectors("We are grateful to all", b).gratitude);
  CHECK(binary_detectors("Blessings to everyone", b).gratitude);
  // Sentence-initial capitals never count as names.
  CHECK_FALSE(binary_detectors("Alex went home", b).name);
  CHECK_FALSE(binary_detectors("I met alex yesterday", b).name);
}

TEST_CASE("extract concatenates the window") {
  const LexiconBundle b = testing::fixture_bundle();
  const FeatureRegistry reg = FeatureRegistry::for_bundle(b);
  const std::size_t gratitude = reg.index_of("gratitude");
  const auto fv = extract(std::vector<std::string>{"Great.", "Thank you."}, b, reg);
  CHECK(fv.values.size() == static_cast<Eigen::Index>(reg.size()));
  CHECK(fv.values[static_cast<Eigen::Index>(gratitude)] == 1);
  CHECK(fv.word_count == 3);

  const std::string s = "Peter Piper picked a peck of pickled peppers?";
  const auto one = extract(std::vector<std::string>{s}, b, reg);
  const auto again = extract(std::vector<std::string>{s}, b, reg);
  CHECK(one.values == again.values);
  const auto devices = binary_detectors(s, b);
  CHECK(one.values[static_cast<Eigen::Index>(reg.index_of("question"))] == (devices.question ? 1 : 0));
  CHECK(one.values[static_cast<Eigen::Index>(reg.index_of("name_projection"))] == (devices.name ? 1 : 0));

  const auto empty = extract(std::vector<std::string>{"?!"}, b, reg);
  CHECK(empty.word_count == 0);
  CHECK(empty.values.allFinite());

  CHECK_THROWS_AS(extract(std::vector<std::string>{}, b, reg), Error);
  const FeatureRegistry wrong = FeatureRegistry::for_bundle(tiny_bundle());
  try {
    extract(std::vector<std::string>{"Hello."}, b, wrong);
    FAIL("expected RegistryMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRegistryMismatch);
  }
}

TEST_CASE("feature CSV layout") {
  const LexiconBundle b = testing::fixture_bundle();
  const FeatureRegistry reg = FeatureRegistry::for_bundle(b);
  std::vector<LabeledExample> examples = {
      {"talk_0001", {"Thank you so much."}, Label::kPositive, 1},
      {"talk_0001", {"The tank is empty."}, Label::kNegative, 1},
  };
  const FeatureMatrix m = extract_examples(examples, b, reg);
  CHECK(m.design.n() == 2);
  CHECK(m.design.p() == static_cast<Eigen::Index>(reg.size()));
  CHECK(m.design.labels[0] == 1);
  CHECK(m.design.labels[1] == 0);
  std::ostringstream out;
  write_feature_csv(out, m);
  std::istringstream lines(out.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header.rfind("style_", 0) == 0);
  CHECK(header.ends_with(",talk_id,label"));
  CHECK(row.find("talk_0001") != std::string::npos);
  CHECK(row.find("0.000000") != std::string::npos);
}
