#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "applause/design.hpp"
#include "applause/lasso.hpp"

namespace applause {

struct LassoModel {
  double intercept = 0;
  Eigen::VectorXd std_coefficients;
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_sds;
  double lambda = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  std::uint64_t registry_fingerprint = 0;

  Eigen::Index p() const { return std_coefficients.size(); }
  std::vector<std::size_t> support() const;  // indices of non-zero coefficients
};

struct TrainOptions {
  std::optional<double> lambda;  // skips cross-validation when set
  CvOptions cv;
  std::uint64_t seed = 42;
};

struct TrainResult {
  LassoModel model;
  std::optional<CvResult<double>> cv;  // absent when lambda was supplied
  bool converged = true;
};

// Standardizes, selects lambda by k-fold CV (unless supplied) and refits on
// all rows.
TrainResult train_lasso_model(const DesignMatrix& matrix,
                              const TrainOptions& options = {});

// sigmoid(intercept + sum_j beta_j z_j), z standardized with the stored
// means/sds (sd 0 gives z 0).
double predict_proba(const LassoModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd predict_proba_rows(const LassoModel& model, const Eigen::MatrixXd& rows);

// Per-feature standardized values and contributions beta_j * z_j.
Eigen::VectorXd standardized_input(const LassoModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x);

struct CoefficientTest {
  std::string feature;
  double beta = 0;     // unpenalized refit estimate (standardized scale)
  double std_error = 0;
  double p_value = 0;
  bool separated = false;
};

struct SignificanceResult {
  std::vector<CoefficientTest> tests;  // support order
  bool separation = false;
};

// Unpenalized logistic refit on the model's non-zero features followed by a
// Wald z-test per coefficient. Divergence or a singular information matrix
// marks the refit as separated and reports p = 0.
SignificanceResult significance(const DesignMatrix& matrix, const LassoModel& model);

// Benjamini-Hochberg adjusted q-values, same order as the input.
std::vector<double> fdr_adjust(const std::vector<double>& p_values);

// |beta_j| / sum |beta| over the non-zero coefficients, as (index, weight).
std::vector<std::pair<std::size_t, double>> relative_importance(const LassoModel& model);

struct FeatureStat {
  std::string feature;
  double value = 0;
};

struct FitDiagnostics {
  double r_squared = 0;
  double pred_true_correlation = 0;
  std::vector<FeatureStat> p_values;   // non-zero coefficients only
  std::vector<FeatureStat> q_values;
  std::vector<FeatureStat> importance;
  bool separation = false;
};

// Pearson correlation between fitted probabilities and labels (0 when either
// side has zero variance).
double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// r_squared is the squared prediction/label correlation. p/q-values and
// importance are filled when the model has at least one non-zero coefficient.
FitDiagnostics diagnostics(const DesignMatrix& matrix, const LassoModel& model);

// JSON model file; doubles are written with round-trip precision.
void write_model_json(std::ostream& out, const LassoModel& model);
LassoModel read_model_json(std::istream& in);
void save_model(const std::filesystem::path& path, const LassoModel& model);
LassoModel load_model(const std::filesystem::path& path);

}  // namespace applause
