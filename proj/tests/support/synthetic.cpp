#include "synthetic.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "applause/rng.hpp"

namespace applause::testing {

namespace {

constexpr std::array kNeutral = {
    "the",     "a",       "this",     "that",    "city",     "water",   "energy",
    "system",  "design",  "story",    "data",    "music",    "light",   "space",
    "road",    "river",   "mountain", "machine", "project",  "language","history",
    "art",     "book",    "paper",    "planet",  "ocean",    "tree",    "garden",
    "house",   "car",     "bridge",   "computer","phone",    "network", "market",
    "school",  "village", "island",   "forest",  "desert",   "rain",    "snow",
    "wind",    "fire",    "stone",    "glass",   "metal",    "paint",   "color",
    "shape",   "answer",  "reason",   "build",   "show",     "move",    "grow",
    "carry",   "open",    "turn",    "start",    "keep",     "hold",    "bring",
    "write",   "draw",    "play",     "walk",    "run",      "travel",  "study",
    "measure", "test",    "small",    "large",   "bright",   "dark",    "fast",
    "slow",    "green",   "blue",     "red",     "simple",   "strange", "quiet",
    "early",   "north",   "south",    "west",    "east",     "very",    "really",
    "just",    "then",    "there",    "and",     "of",       "in"};

constexpr std::array kGratitude = {
    "thank", "thanks", "grateful", "appreciate", "blessed", "gratitude"};

constexpr std::array kSecondPerson = {"you", "your", "yours",
                                                      "yourself"};

constexpr std::array kStageDirections = {"(Laughter)", "(Music)",
                                                         "(Cheers)"};

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& words) {
  return words[static_cast<std::size_t>(uniform_below(rng, N))];
}

int between(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

std::string sentence(Rng& rng, const SyntheticOptions& o, bool final_sentence,
                     double talk_background) {
  const double rate = final_sentence ? o.signal_rate : talk_background;
  const int length = between(rng, o.min_words, o.max_words);
  std::vector<std::string> words;
  for (int i = 0; i < length; ++i) {
    if (o.signal == Signal::kSecondPersonRate && uniform_unit(rng) < rate) {
      words.emplace_back(pick(rng, kSecondPerson));
    } else {
      words.emplace_back(pick(rng, kNeutral));
    }
  }
  if (o.signal == Signal::kGratitude && uniform_unit(rng) < rate) {
    const auto at = static_cast<std::size_t>(uniform_below(rng, words.size()));
    words[at] = pick(rng, kGratitude);
  }
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = words[i];
    if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (i > 0) text.push_back(' ');
    text += w;
  }
  text.push_back('.');
  return text;
}

}  // namespace

std::vector<SyntheticTalk> generate_corpus(const SyntheticOptions& o) {
  Rng rng(o.seed);
  std::vector<SyntheticTalk> talks;
  for (int t = 0; t < o.talks; ++t) {
    SyntheticTalk talk;
    char id[32];
    std::snprintf(id, sizeof id, "talk_%04d", t);
    talk.talk_id = id;
    double background = o.background_rate;
    if (o.talk_rate_spread > 0) {
      background *= 1 + o.talk_rate_spread * (2 * uniform_unit(rng) - 1);
    }
    for (int c = 0; c < o.chunks_per_talk; ++c) {
      const int length = between(rng, o.min_chunk, o.max_chunk);
      talk.chunk_lengths.push_back(length);
      for (int s = 0; s < length; ++s) {
        talk.raw_text += sentence(rng, o, s + 1 == length, background);
        talk.raw_text += uniform_below(rng, 5) == 0 ? "\n" : " ";
        if (o.stage_directions && s + 1 < length && uniform_below(rng, 8) == 0) {
          talk.raw_text += pick(rng, kStageDirections);
          talk.raw_text += ' ';
        }
      }
      talk.raw_text += "(Applause)\n\n";
    }
    // Closing remarks after the last in-talk applause.
    const int tail = between(rng, 2, 5);
    for (int s = 0; s < tail; ++s) {
      talk.raw_text += sentence(rng, o, false, background);
      talk.raw_text += ' ';
    }
    if (o.end_of_talk_applause) talk.raw_text += "(Applause)\n";
    talks.push_back(std::move(talk));
  }
  return talks;
}

std::vector<Chunk> generate_chunks(const SyntheticOptions& options) {
  std::vector<Chunk> chunks;
  for (const SyntheticTalk& talk : generate_corpus(options)) {
    for (Chunk& c : segment_into_chunks(parse_transcript(talk.talk_id, talk.raw_text))) {
      chunks.push_back(std::move(c));
    }
  }
  return chunks;
}

void write_corpus(const std::vector<SyntheticTalk>& talks,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const SyntheticTalk& talk : talks) {
    std::ofstream out(dir / (talk.talk_id + ".txt"), std::ios::binary);
    out << talk.raw_text;
  }
}

std::vector<std::string> generator_vocabulary() {
  std::vector<std::string> words;
  for (const char* w : kNeutral) words.emplace_back(w);
  for (const char* w : kGratitude) words.emplace_back(w);
  for (const char* w : kSecondPerson) words.emplace_back(w);
  return words;
}

std::filesystem::path data_dir() { return APPLAUSE_DATA_DIR; }

LexiconPaths fixture_paths() {
  const auto lex = data_dir() / "lexicons";
  LexiconPaths paths;
  paths.phonetic_dict = lex / "cmudict-subset.dict";
  paths.emotion_lexicon = lex / "emotions.tsv";
  paths.category_lexicon = lex / "categories.tsv";
  paths.names = lex / "names.txt";
  return paths;
}

LexiconBundle fixture_bundle() { return load_bundle(fixture_paths()); }

}  // namespace applause::testing
