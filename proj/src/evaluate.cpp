#include "applause/evaluate.hpp"

#include <algorithm>

#include "applause/error.hpp"
#include "applause/model.hpp"

namespace applause {

namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics Metrics::from_confusion(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.f1 = m.precision + m.recall == 0
             ? 0.0
             : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double Metrics::majority_baseline() const {
  const std::int64_t positives = confusion.tp + confusion.fn;
  const std::int64_t negatives = confusion.fp + confusion.tn;
  return ratio(std::max(positives, negatives), confusion.total());
}

Confusion tally(const Eigen::VectorXd& labels, const Eigen::VectorXd& probabilities) {
  Confusion c;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const bool predicted = probabilities[i] >= 0.5;
    const bool actual = labels[i] > 0.5;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics kfold_cv_metrics(const DesignMatrix& matrix, const EvalOptions& options) {
  matrix.validate();
  const Eigen::Index n = matrix.n();
  if (options.folds < 2 || n < options.folds) {
    throw Error(ErrorCode::kInvalidArgument, "k-fold evaluation needs k >= 2 and n >= k");
  }
  CvOptions cv = options.cv;
  cv.folds = options.folds;

  std::optional<double> shared_lambda = options.lambda;
  if (!shared_lambda && !options.nested) {
    shared_lambda = cv_select_lambda<double>(matrix.rows, matrix.labels, options.seed, cv).lambda;
  }

  const std::vector<int> folds = assign_folds(n, options.folds, options.seed);
  Confusion pooled;
  for (int fold = 0; fold < options.folds; ++fold) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i) {
      (folds[static_cast<std::size_t>(i)] == fold ? test : train).push_back(i);
    }
    const DesignMatrix train_part = matrix.select_rows(train);
    const double ybar = train_part.labels.mean();
    Eigen::VectorXd prob;
    if (ybar <= 0 || ybar >= 1) {
      warn("evaluation fold " + std::to_string(fold) +
           " has a single-class training split; predicting that class");
      prob = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(test.size()), ybar);
    } else {
      TrainOptions train_options;
      train_options.seed = options.seed;
      train_options.cv = cv;
      train_options.lambda = shared_lambda;
      if (!shared_lambda && train_part.n() < cv.folds) {
        train_options.cv.folds = static_cast<int>(train_part.n());
      }
      const LassoModel model = train_lasso_model(train_part, train_options).model;
      prob = predict_proba_rows(model, take_rows<double>(matrix.rows, test));
    }
    pooled += tally(take_rows<double>(matrix.labels, test), prob);
  }
  return Metrics::from_confusion(pooled);
}

AblationResult family_ablation(const DesignMatrix& matrix,
                               const FeatureRegistry& registry,
                               const EvalOptions& options) {
  if (static_cast<std::size_t>(matrix.p()) != registry.size()) {
    throw Error(ErrorCode::kRegistryMismatch, "design matrix does not match registry");
  }
  AblationResult result;
  for (Family family : kAllFamilies) {
    const std::vector<std::size_t> columns = registry.columns_of(family);
    if (columns.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "family '" + std::string(to_string(family)) + "' has no features");
    }
    result.per_family[family] = kfold_cv_metrics(matrix.select_columns(columns), options);
  }
  result.overall = kfold_cv_metrics(matrix, options);
  return result;
}

std::vector<WindowPoint> window_experiment(const std::vector<Chunk>& chunks,
                                           const LexiconBundle& bundle,
                                           const FeatureRegistry& registry,
                                           int max_window,
                                           const EvalOptions& options) {
  if (max_window < 1) {
    throw Error(ErrorCode::kInvalidWindow, "max window must be >= 1");
  }
  std::vector<WindowPoint> curve;
  for (int w = 1; w <= max_window; ++w) {
    WindowPoint point;
    point.window_size = w;
    const std::vector<LabeledExample> examples = build_examples(chunks, w, options.seed);
    point.examples = examples.size();
    if (examples.empty() || static_cast<int>(examples.size()) < options.folds) {
      warn("window " + std::to_string(w) + ": not enough eligible chunks");
      curve.push_back(point);
      continue;
    }
    const FeatureMatrix features = extract_examples(examples, bundle, registry);
    point.accuracy = kfold_cv_metrics(features.design, options).accuracy;
    curve.push_back(point);
  }
  return curve;
}

}  // namespace applause
