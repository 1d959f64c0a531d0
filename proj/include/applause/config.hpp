#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "applause/lexicon.hpp"

namespace applause {

struct Config {
  LexiconPaths lexicons;
  std::filesystem::path corpus_dir;
  std::uint64_t seed = 42;
  int window_size = 1;
  int folds = 10;
  int max_window = 6;
  bool nested = false;
  std::optional<double> lambda;
  std::filesystem::path out_dir = "out";
  std::filesystem::path model_path;  // defaults to <out_dir>/model.json
  std::string listen_address = "127.0.0.1:8080";
  std::string cors_origin = "*";

  std::filesystem::path resolved_model_path() const;
};

// JSON config file. Relative paths resolve against the file's directory.
// Keys: phonetic_dict, emotion_lexicon, category_lexicon, names,
// name_min_count, corpus_dir, seed, window_size, folds, max_window, nested,
// lambda, out_dir, model, listen_address, cors_origin.
Config load_config(const std::filesystem::path& path);

enum class Needs : unsigned { kLexicons = 1, kCorpus = 2, kModel = 4 };
constexpr Needs operator|(Needs a, Needs b) {
  return static_cast<Needs>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has(Needs set, Needs flag) {
  return (static_cast<unsigned>(set) & static_cast<unsigned>(flag)) != 0;
}

// Throws kMissingResource naming every required path that does not exist;
// also rejects out-of-range numeric settings with kInvalidArgument.
void validate(const Config& config, Needs needs);

}  // namespace applause
