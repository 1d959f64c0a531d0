#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "applause/corpus.hpp"
#include "applause/design.hpp"
#include "applause/features.hpp"
#include "applause/lasso.hpp"

namespace applause {

struct Confusion {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& o) {
    tp += o.tp; fp += o.fp; fn += o.fn; tn += o.tn;
    return *this;
  }
};

// 0/0 ratios are 0.
struct Metrics {
  double precision = 0, recall = 0, accuracy = 0, f1 = 0;
  Confusion confusion;

  static Metrics from_confusion(const Confusion& c);
  // Accuracy of always predicting the larger class.
  double majority_baseline() const;
};

// Tallies predictions against labels; probability >= 0.5 predicts positive.
Confusion tally(const Eigen::VectorXd& labels, const Eigen::VectorXd& probabilities);

struct EvalOptions {
  int folds = 10;
  std::uint64_t seed = 42;
  // Default: lambda chosen once by CV on all rows and reused in every fold.
  // nested: each outer training split selects its own lambda.
  bool nested = false;
  std::optional<double> lambda;  // fixed lambda; skips selection entirely
  CvOptions cv;
};

// Pooled confusion over seeded shuffled folds.
Metrics kfold_cv_metrics(const DesignMatrix& matrix, const EvalOptions& options = {});

struct AblationResult {
  std::map<Family, Metrics> per_family;
  Metrics overall;
};

AblationResult family_ablation(const DesignMatrix& matrix,
                               const FeatureRegistry& registry,
                               const EvalOptions& options = {});

struct WindowPoint {
  int window_size = 0;
  std::optional<double> accuracy;  // absent when no chunk is eligible
  std::size_t examples = 0;
};

std::vector<WindowPoint> window_experiment(const std::vector<Chunk>& chunks,
                                           const LexiconBundle& bundle,
                                           const FeatureRegistry& registry,
                                           int max_window = 6,
                                           const EvalOptions& options = {});

struct EvalReport {
  std::map<Family, Metrics> per_family;
  Metrics overall;
  std::vector<WindowPoint> window_curve;
};

}  // namespace applause
