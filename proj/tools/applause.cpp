// Command-line front end: ingest, features, train, eval, window, importance,
// score and serve.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"

#include "applause/commands.hpp"
#include "applause/config.hpp"
#include "applause/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Applause prediction over speech transcripts"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir, corpus_dir, phonetic, emotion, categories, names;
  std::optional<int> window, folds, max_window;
  std::optional<double> lambda;
  bool nested = false;

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed (default 42)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--corpus", corpus_dir, "directory of .txt transcripts");
  app.add_option("--phonetic-dict", phonetic, "CMU pronouncing dictionary");
  app.add_option("--emotion-lexicon", emotion, "NRC word-level emotion lexicon");
  app.add_option("--category-lexicon", categories, "term<TAB>category lexicon");
  app.add_option("--names", names, "given-name list");
  app.add_option("--window", window, "sentences per example (default 1)");
  app.add_option("--folds", folds, "cross-validation folds (default 10)");
  app.add_option("--max-window", max_window, "largest window for `window` (default 6)");
  app.add_option("--lambda", lambda, "fixed L1 penalty (skips cross-validation)");
  app.add_flag("--nested", nested, "select lambda inside every evaluation fold");

  auto* ingest = app.add_subcommand("ingest", "segment transcripts into a labeled dataset");
  auto* features = app.add_subcommand("features", "write the feature matrix CSV");
  auto* train = app.add_subcommand("train", "fit the model and write coefficient reports");
  auto* eval = app.add_subcommand("eval", "per-family and overall 10-fold evaluation");
  auto* window_cmd = app.add_subcommand("window", "accuracy against window size");
  auto* importance = app.add_subcommand("importance", "relative importance weights");
  auto* score = app.add_subcommand("score", "score a draft, one line of JSON per call");
  auto* serve = app.add_subcommand("serve", "HTTP scoring service");

  std::string model_path, addr, text, text_file;
  for (auto* sub : {importance, score, serve}) {
    sub->add_option("--model", model_path, "model JSON");
  }
  score->add_option("--text", text, "draft text (default: read stdin)");
  score->add_option("--file", text_file, "read the draft from a file")->check(CLI::ExistingFile);
  serve->add_option("--addr", addr, "listen address host:port");

  CLI11_PARSE(app, argc, argv);

  try {
    applause::Config config;
    if (!config_path.empty()) config = applause::load_config(config_path);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!corpus_dir.empty()) config.corpus_dir = corpus_dir;
    if (!phonetic.empty()) config.lexicons.phonetic_dict = phonetic;
    if (!emotion.empty()) config.lexicons.emotion_lexicon = emotion;
    if (!categories.empty()) config.lexicons.category_lexicon = categories;
    if (!names.empty()) config.lexicons.names = names;
    if (window) config.window_size = *window;
    if (folds) config.folds = *folds;
    if (max_window) config.max_window = *max_window;
    if (lambda) config.lambda = *lambda;
    if (nested) config.nested = true;
    if (!model_path.empty()) config.model_path = model_path;
    if (!addr.empty()) config.listen_address = addr;

    if (*ingest) {
      applause::cmd_ingest(config, std::cerr);
    } else if (*features) {
      applause::cmd_features(config, std::cerr);
    } else if (*train) {
      applause::cmd_train(config, std::cerr);
    } else if (*eval) {
      applause::cmd_eval(config, std::cerr);
    } else if (*window_cmd) {
      applause::cmd_window(config, std::cerr);
    } else if (*importance) {
      applause::cmd_importance(config, std::cerr);
    } else if (*score) {
      std::string draft = text;
      if (!text_file.empty()) {
        std::ifstream in(text_file, std::ios::binary);
        draft.assign(std::istreambuf_iterator<char>(in), {});
      } else if (text.empty()) {
        draft.assign(std::istreambuf_iterator<char>(std::cin), {});
      }
      std::cout << applause::cmd_score(config, draft) << '\n';
    } else if (*serve) {
      applause::cmd_serve(config, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
