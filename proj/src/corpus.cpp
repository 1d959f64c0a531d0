#include "applause/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "applause/error.hpp"
#include "applause/rng.hpp"
#include "applause/text.hpp"

namespace applause {

namespace {

constexpr std::array<std::string_view, 28> kAbbreviations = {
    "mr",   "mrs",  "ms",  "dr",  "prof", "sr",   "jr",  "st",  "vs",  "etc",
    "e.g",  "i.e",  "mt",  "gen", "gov",  "sen",  "rep", "lt",  "col", "capt",
    "sgt",  "rev",  "inc", "ltd", "co",   "corp", "fig", "approx"};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

bool starts_with_at(std::string_view text, std::size_t pos,
                    std::string_view prefix) {
  return text.substr(pos, prefix.size()) == prefix;
}

// Closing quotes and brackets that may trail terminal punctuation.
std::size_t closing_length(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (starts_with_at(text, pos, "”") || starts_with_at(text, pos, "’"))
    return 3;
  return 0;
}

bool opens_sentence(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (is_upper(c) || c == '"' || c == '\'') return true;
  return starts_with_at(text, pos, "“") || starts_with_at(text, pos, "‘");
}

// Word immediately before the period at `dot`.
bool is_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !is_space(text[begin - 1]) && text[begin - 1] != '(' &&
         text[begin - 1] != '"') {
    --begin;
  }
  const std::string_view word = text.substr(begin, dot - begin);
  if (word.empty()) return false;
  if (word.size() == 1 && is_upper(word[0]) && word[0] != 'I') return true;
  // Dotted forms like "U.S" or "p.m".
  if (word.size() >= 3 && word.find('.') != std::string_view::npos &&
      word.find_first_of("!?") == std::string_view::npos) {
    return true;
  }
  const std::string lower = to_lower_ascii(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) !=
         kAbbreviations.end();
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : trim(text)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

void push_sentence(std::vector<Sentence>& out, std::string_view piece) {
  std::string text = collapse_whitespace(piece);
  if (text.empty()) return;
  // Bare punctuation ("...", "--") is not a sentence.
  if (tokenize(text).empty() && text.find('?') == std::string::npos) return;
  Sentence sentence;
  sentence.words = tokenize(text);
  sentence.text = std::move(text);
  sentence.index_in_talk = out.size();
  out.push_back(std::move(sentence));
}

enum class Parenthetical { kNone, kApplause, kStageDirection };

// Classifies "(...)" starting at `open`; sets `close` to the ')' index.
Parenthetical classify_parenthetical(std::string_view text, std::size_t open,
                                     std::size_t& close) {
  constexpr std::size_t kMaxLength = 48;
  const auto end = text.find(')', open + 1);
  if (end == std::string_view::npos || end - open > kMaxLength) {
    return Parenthetical::kNone;
  }
  const std::string_view inner = text.substr(open + 1, end - open - 1);
  if (inner.find('(') != std::string_view::npos) return Parenthetical::kNone;
  close = end;
  std::string squeezed;
  for (char c : inner) {
    if (!is_space(c)) squeezed.push_back(c);
  }
  if (to_lower_ascii(squeezed) == "applause") return Parenthetical::kApplause;

  const std::string_view content = trim(inner);
  if (content.size() < 2 || !is_upper(content[0]) || !is_lower(content[1])) {
    return Parenthetical::kNone;
  }
  int words = 1;
  for (char c : content) {
    if (c == ' ') {
      ++words;
    } else if (!is_upper(c) && !is_lower(c) && c != '-' && c != '\'') {
      return Parenthetical::kNone;
    }
  }
  return words <= 4 ? Parenthetical::kStageDirection : Parenthetical::kNone;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> sentences;
  std::size_t start = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c != '.' && c != '!' && c != '?') {
      ++pos;
      continue;
    }
    const std::size_t first_terminal = pos;
    bool single_period = true;
    while (pos < text.size() &&
           (text[pos] == '.' || text[pos] == '!' || text[pos] == '?')) {
      if (pos != first_terminal || text[pos] != '.') single_period = false;
      ++pos;
    }
    while (pos < text.size()) {
      const std::size_t n = closing_length(text, pos);
      if (n == 0) break;
      pos += n;
    }
    bool boundary = false;
    if (pos >= text.size()) {
      boundary = true;
    } else if (is_space(text[pos])) {
      std::size_t next = pos;
      while (next < text.size() && is_space(text[next])) ++next;
      boundary = next >= text.size() || opens_sentence(text, next);
    }
    if (boundary && single_period && is_abbreviation(text, first_terminal)) {
      boundary = false;
    }
    if (boundary) {
      push_sentence(sentences, text.substr(start, pos - start));
      start = pos;
    }
  }
  if (start < text.size()) push_sentence(sentences, text.substr(start));
  return sentences;
}

Transcript parse_transcript(std::string talk_id, std::string_view raw_text) {
  if (trim(raw_text).empty()) {
    throw Error(ErrorCode::kEmptyTranscript, "talk '" + talk_id + "' is empty");
  }
  Transcript transcript;
  transcript.talk_id = std::move(talk_id);

  std::string pending;
  auto flush = [&] {
    for (Sentence& s : split_sentences(pending)) {
      s.index_in_talk = transcript.sentences.size();
      transcript.sentences.push_back(std::move(s));
    }
    pending.clear();
  };

  std::size_t pos = 0;
  while (pos < raw_text.size()) {
    if (raw_text[pos] != '(') {
      pending.push_back(raw_text[pos++]);
      continue;
    }
    std::size_t close = pos;
    switch (classify_parenthetical(raw_text, pos, close)) {
      case Parenthetical::kNone:
        pending.push_back(raw_text[pos++]);
        break;
      case Parenthetical::kStageDirection:
        pending.push_back(' ');
        pos = close + 1;
        break;
      case Parenthetical::kApplause:
        flush();
        if (transcript.sentences.empty()) {
          warn("talk '" + transcript.talk_id +
               "': applause marker before the first sentence dropped");
        } else {
          transcript.applause_positions.insert(transcript.sentences.size() - 1);
        }
        pos = close + 1;
        break;
    }
  }
  flush();
  return transcript;
}

std::vector<Chunk> segment_into_chunks(const Transcript& transcript) {
  std::vector<Chunk> chunks;
  const std::size_t n = transcript.sentences.size();
  if (n == 0) return chunks;

  Chunk current{transcript.talk_id, {}, false};
  for (std::size_t i = 0; i < n; ++i) {
    current.sentences.push_back(transcript.sentences[i]);
    const bool in_talk_applause =
        i + 1 < n && transcript.applause_positions.count(i) > 0;
    if (in_talk_applause) {
      current.terminated_by_applause = true;
      chunks.push_back(std::move(current));
      current = Chunk{transcript.talk_id, {}, false};
    }
  }
  if (!current.sentences.empty()) chunks.push_back(std::move(current));
  return chunks;
}

bool is_eligible(const Chunk& chunk, int window_size) {
  return chunk.terminated_by_applause && window_size >= 1 &&
         chunk.sentences.size() >= 2 * static_cast<std::size_t>(window_size);
}

std::vector<LabeledExample> build_examples(const std::vector<Chunk>& chunks,
                                           int window_size, std::uint64_t seed) {
  if (window_size < 1) {
    throw Error(ErrorCode::kInvalidWindow,
                "window size must be >= 1, got " + std::to_string(window_size));
  }
  const auto w = static_cast<std::size_t>(window_size);
  std::unordered_map<std::string, Rng> generators;
  std::vector<LabeledExample> examples;

  auto window_texts = [](const Chunk& chunk, std::size_t begin, std::size_t len) {
    std::vector<std::string> texts;
    texts.reserve(len);
    for (std::size_t i = begin; i < begin + len; ++i) {
      texts.push_back(chunk.sentences[i].text);
    }
    return texts;
  };

  for (const Chunk& chunk : chunks) {
    if (!is_eligible(chunk, window_size)) continue;
    auto [it, inserted] = generators.try_emplace(chunk.talk_id);
    if (inserted) it->second.seed(seed ^ fnv1a(chunk.talk_id));

    const std::size_t length = chunk.sentences.size();
    const std::size_t last_start = std::min(length / 2 - 1, length - 2 * w);
    const auto negative_start =
        static_cast<std::size_t>(uniform_below(it->second, last_start + 1));

    examples.push_back({chunk.talk_id, window_texts(chunk, length - w, w),
                        Label::kPositive, window_size});
    examples.push_back({chunk.talk_id, window_texts(chunk, negative_start, w),
                        Label::kNegative, window_size});
  }
  return examples;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kMissingResource,
                "corpus directory not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  for (const fs::path& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    Transcript transcript;
    try {
      transcript = parse_transcript(file.stem().string(), buffer.str());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyTranscript) throw;
      warn(e.what());
      continue;
    }
    std::vector<Chunk> chunks = segment_into_chunks(transcript);
    const bool has_applause =
        std::any_of(chunks.begin(), chunks.end(),
                    [](const Chunk& c) { return c.terminated_by_applause; });
    if (has_applause) {
      for (Chunk& c : chunks) corpus.chunks.push_back(std::move(c));
    }
    corpus.transcripts.push_back(std::move(transcript));
  }
  return corpus;
}

CorpusStats corpus_stats(const Corpus& corpus,
                         const std::vector<LabeledExample>& examples,
                         int window_size) {
  CorpusStats stats;
  stats.talks = corpus.transcripts.size();
  for (const Transcript& t : corpus.transcripts) {
    const std::size_t n = t.sentences.size();
    std::size_t in_talk = 0;
    for (std::size_t pos : t.applause_positions) {
      if (pos + 1 < n) {
        ++in_talk;
      } else {
        ++stats.terminal_applause_dropped;
      }
    }
    stats.applause_incidences += in_talk;
    if (in_talk > 0) ++stats.training_talks;
  }
  for (const Chunk& c : corpus.chunks) {
    if (is_eligible(c, window_size)) ++stats.eligible_chunks;
  }
  for (const LabeledExample& e : examples) {
    (e.label == Label::kPositive ? stats.positives : stats.negatives) += 1;
  }
  return stats;
}

void write_examples_jsonl(std::ostream& out,
                          const std::vector<LabeledExample>& examples) {
  for (const LabeledExample& e : examples) {
    nlohmann::ordered_json row;
    row["talk_id"] = e.talk_id;
    row["window_size"] = e.window_size;
    row["label"] = e.label == Label::kPositive ? "pos" : "neg";
    row["sentences"] = e.sentence_texts;
    out << row.dump() << '\n';
  }
}

std::vector<LabeledExample> read_examples_jsonl(std::istream& in) {
  std::vector<LabeledExample> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto row = nlohmann::json::parse(line);
      LabeledExample e;
      e.talk_id = row.at("talk_id").get<std::string>();
      e.window_size = row.at("window_size").get<int>();
      const auto label = row.at("label").get<std::string>();
      if (label != "pos" && label != "neg") {
        throw Error(ErrorCode::kParse, "label must be pos or neg");
      }
      e.label = label == "pos" ? Label::kPositive : Label::kNegative;
      e.sentence_texts = row.at("sentences").get<std::vector<std::string>>();
      examples.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kParse,
                  "dataset line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return examples;
}

}  // namespace applause
