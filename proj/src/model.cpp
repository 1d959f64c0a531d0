#include "applause/model.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "applause/error.hpp"

namespace applause {

namespace {

constexpr int kModelVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used, 16);
  if (used != s.size()) throw Error(ErrorCode::kParse, "bad fingerprint '" + s + "'");
  return v;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

void DesignMatrix::validate() const {
  if (rows.rows() != labels.size() ||
      static_cast<std::size_t>(rows.cols()) != feature_names.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "design matrix shape mismatch");
  }
  if (rows.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 examples");
  }
  if (!rows.allFinite() || !labels.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "design matrix has non-finite values");
  }
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1.0) {
      pos = true;
    } else if (labels[i] == 0.0) {
      neg = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    }
  }
  if (!pos || !neg) {
    throw Error(ErrorCode::kInvalidArgument, "both classes must be present");
  }
}

DesignMatrix DesignMatrix::select_columns(const std::vector<std::size_t>& columns) const {
  DesignMatrix out;
  out.rows.resize(rows.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    out.rows.col(static_cast<Eigen::Index>(k)) = rows.col(static_cast<Eigen::Index>(columns[k]));
    out.feature_names.push_back(feature_names.at(columns[k]));
  }
  out.labels = labels;
  return out;
}

DesignMatrix DesignMatrix::select_rows(const std::vector<Eigen::Index>& indices) const {
  return {take_rows<double>(rows, indices), take_rows<double>(labels, indices),
          feature_names};
}

std::vector<std::size_t> LassoModel::support() const {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < std_coefficients.size(); ++j) {
    if (std_coefficients[j] != 0) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

TrainResult train_lasso_model(const DesignMatrix& matrix, const TrainOptions& options) {
  matrix.validate();
  TrainResult result;
  LassoModel& model = result.model;
  model.seed = options.seed;
  model.feature_names = matrix.feature_names;

  const Standardized<double> standardized = standardize(matrix.rows);
  model.feature_means = standardized.means;
  model.feature_sds = standardized.sds;
  if (options.lambda) {
    model.lambda = *options.lambda;
  } else {
    result.cv = cv_select_lambda<double>(matrix.rows, matrix.labels, options.seed,
                                         options.cv);
    model.lambda = result.cv->lambda;
  }

  // Walk the grid down to the chosen lambda with warm starts; this keeps the
  // final fit on the same path the cross-validation evaluated.
  const std::vector<double> path =
      result.cv ? std::vector<double>(result.cv->grid.begin(),
                                      result.cv->grid.begin() +
                                          static_cast<std::ptrdiff_t>(result.cv->index) + 1)
                : std::vector<double>{model.lambda};
  LassoFit<double> fit;
  bool warm = false;
  for (double lambda : path) {
    fit = fit_lasso_logistic(standardized.values, matrix.labels, lambda,
                             options.cv.solver, warm ? &fit : nullptr);
    warm = true;
  }
  result.converged = fit.converged;
  model.intercept = fit.intercept;
  model.std_coefficients = fit.coefficients;
  return result;
}

Eigen::VectorXd standardized_input(const LassoModel& model,
                                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.p()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(model.p()) + " features, got " +
                    std::to_string(x.size()));
  }
  Eigen::VectorXd z(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    z[j] = model.feature_sds[j] == 0 ? 0.0
                                     : (x[j] - model.feature_means[j]) / model.feature_sds[j];
  }
  return z;
}

double predict_proba(const LassoModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd z = standardized_input(model, x);
  return sigmoid(model.intercept + model.std_coefficients.dot(z));
}

Eigen::VectorXd predict_proba_rows(const LassoModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.p()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature count does not match model");
  }
  const Eigen::MatrixXd z =
      apply_standardization(rows, model.feature_means, model.feature_sds);
  Eigen::VectorXd eta = (z * model.std_coefficients).array() + model.intercept;
  return eta.unaryExpr([](double v) { return sigmoid(v); });
}

SignificanceResult significance(const DesignMatrix& matrix, const LassoModel& model) {
  const std::vector<std::size_t> support = model.support();
  if (support.empty()) {
    throw Error(ErrorCode::kImportanceUndefined,
                "significance needs at least one non-zero coefficient");
  }
  const Eigen::Index n = matrix.n();
  const auto q = static_cast<Eigen::Index>(support.size()) + 1;
  const Eigen::MatrixXd z_all =
      apply_standardization(matrix.rows, model.feature_means, model.feature_sds);
  Eigen::MatrixXd x(n, q);
  x.col(0).setOnes();
  for (std::size_t k = 0; k < support.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k) + 1) = z_all.col(static_cast<Eigen::Index>(support[k]));
  }
  const Eigen::VectorXd& y = matrix.labels;

  auto log_likelihood = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = x * b;
    double ll = 0;
    for (Eigen::Index i = 0; i < n; ++i) ll += y[i] * eta[i] - softplus(eta[i]);
    return ll;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
  beta[0] = null_intercept<double>(y);
  double ll = log_likelihood(beta);
  bool converged = false;
  bool separated = false;
  Eigen::MatrixXd information(q, q);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd prob(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(eta[i]);
      w[i] = prob[i] * (1 - prob[i]);
    }
    information = x.transpose() * w.asDiagonal() * x;
    const Eigen::VectorXd score = x.transpose() * (y - prob);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) {
      separated = true;
      break;
    }
    Eigen::VectorXd step = ldlt.solve(score);
    double next = log_likelihood(beta + step);
    for (int h = 0; h < 30 && !(next >= ll); ++h) {
      step /= 2;
      next = log_likelihood(beta + step);
    }
    beta += step;
    ll = next;
    if (!beta.allFinite() || beta.cwiseAbs().maxCoeff() > 1e3) {
      separated = true;
      break;
    }
    // Under separation the likelihood flattens while beta keeps growing, so
    // only the step size decides convergence.
    if (step.cwiseAbs().maxCoeff() < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged || (x * beta).cwiseAbs().maxCoeff() > 30) separated = true;

  SignificanceResult result;
  result.separation = separated;
  Eigen::VectorXd se = Eigen::VectorXd::Zero(q);
  if (!separated) {
    // Information at the final estimate.
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pr = sigmoid(eta[i]);
      w[i] = pr * (1 - pr);
    }
    information = x.transpose() * w.asDiagonal() * x;
    const Eigen::MatrixXd covariance =
        information.ldlt().solve(Eigen::MatrixXd::Identity(q, q));
    se = covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    if (!se.allFinite() || se.tail(q - 1).minCoeff() <= 0) {
      result.separation = separated = true;
    }
  }
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto idx = static_cast<Eigen::Index>(k) + 1;
    CoefficientTest t;
    t.feature = model.feature_names.at(support[k]);
    t.separated = separated;
    if (!separated) {
      t.beta = beta[idx];
      t.std_error = se[idx];
      t.p_value = std::erfc(std::abs(t.beta / t.std_error) / std::sqrt(2.0));
    }
    result.tests.push_back(std::move(t));
  }
  return result;
}

std::vector<double> fdr_adjust(const std::vector<double>& p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  std::vector<double> q(m);
  double running = 1.0;
  for (std::size_t rank = m; rank >= 1; --rank) {
    const std::size_t i = order[rank - 1];
    // m / rank >= 1, so the product never rounds below p.
    running = std::min(running, p_values[i] * (static_cast<double>(m) /
                                               static_cast<double>(rank)));
    q[i] = std::min(1.0, running);
  }
  return q;
}

std::vector<std::pair<std::size_t, double>> relative_importance(const LassoModel& model) {
  const double total = model.std_coefficients.cwiseAbs().sum();
  if (!(total > 0)) {
    throw Error(ErrorCode::kImportanceUndefined, "all coefficients are zero");
  }
  std::vector<std::pair<std::size_t, double>> weights;
  for (std::size_t j : model.support()) {
    weights.emplace_back(j, std::abs(model.std_coefficients[static_cast<Eigen::Index>(j)]) / total);
  }
  return weights;
}

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = (da * da).sum();
  const double sbb = (db * db).sum();
  if (!(saa > 0) || !(sbb > 0)) return 0.0;
  return std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

FitDiagnostics diagnostics(const DesignMatrix& matrix, const LassoModel& model) {
  FitDiagnostics d;
  const Eigen::VectorXd prob = predict_proba_rows(model, matrix.rows);
  d.pred_true_correlation = pearson_correlation(prob, matrix.labels);
  d.r_squared = d.pred_true_correlation * d.pred_true_correlation;
  if (model.support().empty()) return d;

  const SignificanceResult sig = significance(matrix, model);
  d.separation = sig.separation;
  std::vector<double> p;
  for (const CoefficientTest& t : sig.tests) p.push_back(t.p_value);
  const std::vector<double> q = fdr_adjust(p);
  for (std::size_t k = 0; k < sig.tests.size(); ++k) {
    d.p_values.push_back({sig.tests[k].feature, p[k]});
    d.q_values.push_back({sig.tests[k].feature, q[k]});
  }
  for (const auto& [j, weight] : relative_importance(model)) {
    d.importance.push_back({model.feature_names[j], weight});
  }
  return d;
}

void write_model_json(std::ostream& out, const LassoModel& model) {
  nlohmann::ordered_json j;
  j["version"] = kModelVersion;
  j["feature_names"] = model.feature_names;
  j["feature_means"] = to_std(model.feature_means);
  j["feature_sds"] = to_std(model.feature_sds);
  j["std_coefficients"] = to_std(model.std_coefficients);
  j["intercept"] = model.intercept;
  j["lambda"] = model.lambda;
  j["seed"] = model.seed;
  j["registry_fingerprint"] = hex64(model.registry_fingerprint);
  out << j.dump(2) << '\n';
}

LassoModel read_model_json(std::istream& in) {
  LassoModel model;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("version").get<int>() != kModelVersion) {
      throw Error(ErrorCode::kParse, "unsupported model version");
    }
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.feature_means = to_eigen(j.at("feature_means").get<std::vector<double>>());
    model.feature_sds = to_eigen(j.at("feature_sds").get<std::vector<double>>());
    model.std_coefficients = to_eigen(j.at("std_coefficients").get<std::vector<double>>());
    model.intercept = j.at("intercept").get<double>();
    model.lambda = j.at("lambda").get<double>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.registry_fingerprint =
        parse_hex64(j.at("registry_fingerprint").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("model file: ") + e.what());
  }
  const auto p = static_cast<Eigen::Index>(model.feature_names.size());
  if (model.feature_means.size() != p || model.feature_sds.size() != p ||
      model.std_coefficients.size() != p) {
    throw Error(ErrorCode::kParse, "model file: vector lengths disagree");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const LassoModel& model) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_model_json(out, model);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

LassoModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingResource, "cannot read model " + path.string());
  return read_model_json(in);
}

}  // namespace applause
