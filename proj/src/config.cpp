#include "applause/config.hpp"

#include <fstream>

#include "json.hpp"

#include "applause/error.hpp"

namespace applause {

std::filesystem::path Config::resolved_model_path() const {
  return model_path.empty() ? out_dir / "model.json" : model_path;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingResource, "config not found: " + path.string());
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  Config c;
  try {
    const auto j = nlohmann::json::parse(in);
    if (!j.is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
    if (j.contains("phonetic_dict")) c.lexicons.phonetic_dict = resolve(j["phonetic_dict"].get<std::string>());
    if (j.contains("emotion_lexicon")) c.lexicons.emotion_lexicon = resolve(j["emotion_lexicon"].get<std::string>());
    if (j.contains("category_lexicon")) c.lexicons.category_lexicon = resolve(j["category_lexicon"].get<std::string>());
    if (j.contains("names")) c.lexicons.names = resolve(j["names"].get<std::string>());
    if (j.contains("name_min_count")) c.lexicons.name_min_count = j["name_min_count"].get<std::uint64_t>();
    if (j.contains("corpus_dir")) c.corpus_dir = resolve(j["corpus_dir"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("window_size")) c.window_size = j["window_size"].get<int>();
    if (j.contains("folds")) c.folds = j["folds"].get<int>();
    if (j.contains("max_window")) c.max_window = j["max_window"].get<int>();
    if (j.contains("nested")) c.nested = j["nested"].get<bool>();
    if (j.contains("lambda") && !j["lambda"].is_null()) c.lambda = j["lambda"].get<double>();
    if (j.contains("out_dir")) c.out_dir = resolve(j["out_dir"].get<std::string>());
    if (j.contains("model")) c.model_path = resolve(j["model"].get<std::string>());
    if (j.contains("listen_address")) c.listen_address = j["listen_address"].get<std::string>();
    if (j.contains("cors_origin")) c.cors_origin = j["cors_origin"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "config " + path.string() + ": " + e.what());
  }
  return c;
}

void validate(const Config& config, Needs needs) {
  namespace fs = std::filesystem;
  std::string missing;
  auto require_file = [&](std::string_view what, const fs::path& p) {
    if (p.empty()) {
      missing += "\n  " + std::string(what) + ": <not set>";
    } else if (!fs::exists(p)) {
      missing += "\n  " + std::string(what) + ": " + p.string();
    }
  };
  if (has(needs, Needs::kLexicons)) {
    require_file("phonetic_dict", config.lexicons.phonetic_dict);
    require_file("emotion_lexicon", config.lexicons.emotion_lexicon);
    require_file("category_lexicon", config.lexicons.category_lexicon);
    require_file("names", config.lexicons.names);
  }
  if (has(needs, Needs::kCorpus)) require_file("corpus_dir", config.corpus_dir);
  if (has(needs, Needs::kModel)) require_file("model", config.resolved_model_path());
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingResource, "missing resources:" + missing);
  }
  if (config.window_size < 1 || config.max_window < 1) {
    throw Error(ErrorCode::kInvalidWindow, "window sizes must be >= 1");
  }
  if (config.folds < 2) {
    throw Error(ErrorCode::kInvalidArgument, "folds must be >= 2");
  }
  if (config.lambda && !(*config.lambda >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  }
}

}  // namespace applause
