#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace applause {

struct Sentence {
  std::string text;
  std::vector<std::string> words;
  std::size_t index_in_talk = 0;
};

struct Transcript {
  std::string talk_id;
  std::vector<Sentence> sentences;
  // Sentence indices followed by an applause marker.
  std::set<std::size_t> applause_positions;
};

struct Chunk {
  std::string talk_id;
  std::vector<Sentence> sentences;
  bool terminated_by_applause = false;
};

enum class Label { kNegative, kPositive };

struct LabeledExample {
  std::string talk_id;
  std::vector<std::string> sentence_texts;
  Label label = Label::kNegative;
  int window_size = 1;

  bool operator==(const LabeledExample&) const = default;
};

// Rule-based splitter: a run of . ! ? (plus closing quotes/brackets) ends a
// sentence when followed by whitespace and then an uppercase letter or an
// opening quote, or by end of text. Common abbreviations ("Dr.", "e.g.") and
// single-letter initials never end a sentence.
std::vector<Sentence> split_sentences(std::string_view text);

// Applause markers "(Applause)" (any case, optional inner whitespace) are
// removed and recorded after the nearest preceding sentence; a marker also
// forces a sentence boundary. Other short capitalized stage directions such
// as "(Laughter)" are removed without being recorded.
Transcript parse_transcript(std::string talk_id, std::string_view raw_text);

// Drops end-of-talk applause, then cuts the talk after each remaining
// applause position. A trailing run without applause becomes a final
// non-terminated chunk.
std::vector<Chunk> segment_into_chunks(const Transcript& transcript);

// One positive (final window_size sentences) and one negative (a window
// starting in the first half of the chunk, ending before the positive window)
// per applause-terminated chunk of at least 2 * window_size sentences. Each
// talk draws from its own generator seeded with seed ^ fnv1a(talk_id).
std::vector<LabeledExample> build_examples(const std::vector<Chunk>& chunks,
                                           int window_size, std::uint64_t seed);

bool is_eligible(const Chunk& chunk, int window_size);

struct Corpus {
  std::vector<Transcript> transcripts;
  std::vector<Chunk> chunks;  // only talks with at least one in-talk applause
};

// Reads every *.txt file in dir (sorted by filename); the stem is the talk id.
// Empty files are skipped with a warning.
Corpus load_corpus(const std::filesystem::path& dir);

struct CorpusStats {
  std::size_t talks = 0;
  std::size_t training_talks = 0;  // talks with at least one in-talk applause
  std::size_t applause_incidences = 0;  // after dropping end-of-talk applause
  std::size_t terminal_applause_dropped = 0;
  std::size_t eligible_chunks = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

CorpusStats corpus_stats(const Corpus& corpus,
                         const std::vector<LabeledExample>& examples,
                         int window_size);

// JSON-lines dataset: {"talk_id", "window_size", "label": "pos"|"neg",
// "sentences": [...]} per line.
void write_examples_jsonl(std::ostream& out,
                          const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> read_examples_jsonl(std::istream& in);

}  // namespace applause
