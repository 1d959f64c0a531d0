#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "applause/config.hpp"
#include "applause/corpus.hpp"

namespace applause {

// Reference counts of the original TED snapshot (talks kept after dropping
// end-of-talk applause, in-talk applause incidences, examples at window 1),
// printed next to the user's corpus for comparison only.
struct ReferenceCounts {
  static constexpr std::size_t kTalks = 904;
  static constexpr std::size_t kApplause = 3178;
  static constexpr std::size_t kExamples = 6356;
};

// Reference single-sentence results for the same snapshot.
struct ReferenceResults {
  static constexpr double kOverallAccuracy = 0.719;
  static constexpr double kAccuracyTolerance = 0.07;
  static constexpr double kGratitudePrecision = 0.717;
};

// Each command writes into config.out_dir and returns the written paths.
// Reruns with the same config produce byte-identical files.
std::vector<std::filesystem::path> cmd_ingest(const Config& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_features(const Config& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_train(const Config& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_eval(const Config& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_window(const Config& config, std::ostream& log);
std::vector<std::filesystem::path> cmd_importance(const Config& config, std::ostream& log);

// Scores `draft` with the configured model and returns the /score JSON body.
std::string cmd_score(const Config& config, const std::string& draft);

// Blocks serving HTTP until the process is stopped.
void cmd_serve(const Config& config, std::ostream& log);

}  // namespace applause
