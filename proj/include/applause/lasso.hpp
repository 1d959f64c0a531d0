#pragma once

// L1-penalized logistic regression on standardized predictors.
//
// Objective, with intercept b0 unpenalized:
//   (1/n) sum_i [log(1 + exp(eta_i)) - y_i eta_i] + lambda * sum_j |beta_j|
//   eta_i = b0 + z_i . beta
//
// Solved by cyclic coordinate descent with soft-thresholding on the IRLS
// quadratic approximation; each outer step is accepted only if the penalized
// objective does not increase (otherwise it is halved back toward the
// previous iterate).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "applause/error.hpp"
#include "applause/rng.hpp"

namespace applause {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct Standardized {
  MatrixX<Scalar> values;
  VectorX<Scalar> means;
  VectorX<Scalar> sds;  // population sd; 0 for constant columns
};

// Centers and scales every column to mean 0 and population sd 1. Constant
// columns become all-zero with sd recorded as 0.
template <typename Derived>
Standardized<typename Derived::Scalar> standardize(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.rows();
  Standardized<Scalar> out;
  out.means = x.colwise().mean().transpose();
  out.sds.resize(x.cols());
  out.values.resize(n, x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto centered = (x.col(j).array() - out.means[j]).eval();
    Scalar sd = std::sqrt(centered.square().sum() / static_cast<Scalar>(n));
    // Relative floor: columns equal up to rounding count as constant.
    const Scalar scale = std::max(Scalar(1), std::abs(out.means[j]));
    if (!(sd > std::numeric_limits<Scalar>::epsilon() * 16 * scale)) {
      sd = Scalar(0);
    }
    out.sds[j] = sd;
    if (sd == Scalar(0)) {
      out.values.col(j).setZero();
    } else {
      out.values.col(j) = centered.matrix() / sd;
    }
  }
  return out;
}

template <typename Derived, typename Scalar = typename Derived::Scalar>
MatrixX<Scalar> apply_standardization(const Eigen::MatrixBase<Derived>& x,
                                      const VectorX<Scalar>& means,
                                      const VectorX<Scalar>& sds) {
  MatrixX<Scalar> z(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (sds[j] == Scalar(0)) {
      z.col(j).setZero();
    } else {
      z.col(j) = (x.col(j).array() - means[j]).matrix() / sds[j];
    }
  }
  return z;
}

template <typename Scalar>
Scalar sigmoid(Scalar eta) {
  if (eta >= 0) return Scalar(1) / (Scalar(1) + std::exp(-eta));
  const Scalar e = std::exp(eta);
  return e / (Scalar(1) + e);
}

// log(1 + exp(eta)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar eta) {
  return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

template <typename Scalar>
Scalar soft_threshold(Scalar value, Scalar threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return Scalar(0);
}

template <typename Scalar>
Scalar mean_logistic_loss(const MatrixX<Scalar>& z, const VectorX<Scalar>& y,
                          Scalar intercept, const VectorX<Scalar>& beta) {
  const VectorX<Scalar> eta =
      (z * beta).array() + intercept;
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    sum += softplus(eta[i]) - y[i] * eta[i];
  }
  return sum / static_cast<Scalar>(eta.size());
}

template <typename Scalar>
Scalar penalized_objective(const MatrixX<Scalar>& z, const VectorX<Scalar>& y,
                           Scalar intercept, const VectorX<Scalar>& beta,
                           Scalar lambda) {
  return mean_logistic_loss(z, y, intercept, beta) + lambda * beta.cwiseAbs().sum();
}

template <typename Scalar>
struct LossGradient {
  Scalar intercept;
  VectorX<Scalar> beta;
};

// Gradient of mean_logistic_loss: (1/n) sum_i (p_i - y_i) [1, z_i].
template <typename Scalar>
LossGradient<Scalar> logistic_gradient(const MatrixX<Scalar>& z,
                                       const VectorX<Scalar>& y,
                                       Scalar intercept,
                                       const VectorX<Scalar>& beta) {
  const VectorX<Scalar> eta = (z * beta).array() + intercept;
  VectorX<Scalar> residual(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    residual[i] = sigmoid(eta[i]) - y[i];
  }
  const auto n = static_cast<Scalar>(eta.size());
  return {residual.sum() / n, z.transpose() * residual / n};
}

template <typename Scalar>
Scalar null_intercept(const VectorX<Scalar>& y) {
  const Scalar mean = y.mean();
  return std::log(mean / (Scalar(1) - mean));
}

// Smallest lambda at which every slope is zero: max_j |z_j . (y - ybar)| / n.
template <typename Scalar>
Scalar lambda_max(const MatrixX<Scalar>& z, const VectorX<Scalar>& y) {
  if (z.cols() == 0) return Scalar(0);
  const VectorX<Scalar> centered = y.array() - y.mean();
  return (z.transpose() * centered).cwiseAbs().maxCoeff() /
         static_cast<Scalar>(y.size());
}

// `count` log-spaced values from lambda_max down to lambda_max * ratio.
template <typename Scalar>
std::vector<Scalar> lambda_grid(Scalar lambda_max_value, int count = 100,
                                Scalar ratio = Scalar(1e-3)) {
  if (!(lambda_max_value > 0) || count < 1) return {Scalar(0)};
  std::vector<Scalar> grid(static_cast<std::size_t>(count));
  const Scalar log_max = std::log(lambda_max_value);
  const Scalar step = count == 1 ? 0 : std::log(ratio) / static_cast<Scalar>(count - 1);
  for (int k = 0; k < count; ++k) {
    grid[static_cast<std::size_t>(k)] = std::exp(log_max + step * static_cast<Scalar>(k));
  }
  grid.front() = lambda_max_value;
  return grid;
}

struct SolverOptions {
  double tol = 1e-7;       // max coefficient change
  int max_sweeps = 10000;  // coordinate sweeps across all IRLS steps
  double min_weight = 1e-5;
};

template <typename Scalar>
struct LassoFit {
  Scalar intercept = 0;
  VectorX<Scalar> coefficients;
  int sweeps = 0;
  bool converged = false;
};

template <typename Scalar>
LassoFit<Scalar> fit_lasso_logistic(const MatrixX<Scalar>& z,
                                    const VectorX<Scalar>& y, Scalar lambda,
                                    const SolverOptions& options = {},
                                    const LassoFit<Scalar>* warm_start = nullptr) {
  const Eigen::Index n = z.rows();
  const Eigen::Index p = z.cols();
  if (lambda < 0 || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be finite and >= 0");
  }
  if (n == 0 || y.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "design and labels disagree");
  }
  const Scalar ybar = y.mean();
  if (!(ybar > 0 && ybar < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "both classes must be present");
  }

  LassoFit<Scalar> fit;
  fit.intercept = null_intercept(y);
  fit.coefficients = VectorX<Scalar>::Zero(p);
  if (lambda >= lambda_max(z, y)) {
    fit.converged = true;
    return fit;
  }
  if (warm_start != nullptr && warm_start->coefficients.size() == p) {
    fit.intercept = warm_start->intercept;
    fit.coefficients = warm_start->coefficients;
  }

  const auto inv_n = Scalar(1) / static_cast<Scalar>(n);
  const auto tol = static_cast<Scalar>(options.tol);
  VectorX<Scalar>& beta = fit.coefficients;
  Scalar& b0 = fit.intercept;

  VectorX<Scalar> eta = (z * beta).array() + b0;
  VectorX<Scalar> w(n), r(n), xv(p);
  Scalar objective = penalized_objective(z, y, b0, beta, lambda);
  if (!std::isfinite(objective)) {
    throw Error(ErrorCode::kNumericalFailure, "non-finite initial loss");
  }

  auto update_coordinate = [&](Eigen::Index j) -> Scalar {
    if (xv[j] <= 0) return 0;
    const Scalar gradient =
        (z.col(j).array() * w.array() * r.array()).sum() * inv_n + xv[j] * beta[j];
    const Scalar updated = soft_threshold(gradient, lambda) / xv[j];
    const Scalar delta = updated - beta[j];
    if (delta != 0) {
      beta[j] = updated;
      r -= delta * z.col(j);
      eta += delta * z.col(j);
    }
    return std::abs(delta);
  };
  auto update_intercept = [&]() -> Scalar {
    const Scalar delta = w.dot(r) / w.sum();
    b0 += delta;
    r.array() -= delta;
    eta.array() += delta;
    return std::abs(delta);
  };

  while (fit.sweeps < options.max_sweeps) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar prob = sigmoid(eta[i]);
      w[i] = std::max(prob * (1 - prob), static_cast<Scalar>(options.min_weight));
      r[i] = (y[i] - prob) / w[i];
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      xv[j] = z.col(j).array().square().matrix().dot(w) * inv_n;
    }
    const VectorX<Scalar> beta_prev = beta;
    const Scalar b0_prev = b0;

    // Full sweeps establish the active set; the active set is then iterated
    // to convergence before the next full sweep checks it.
    while (fit.sweeps < options.max_sweeps) {
      Scalar change = update_intercept();
      for (Eigen::Index j = 0; j < p; ++j) change = std::max(change, update_coordinate(j));
      ++fit.sweeps;
      if (change < tol) break;
      while (fit.sweeps < options.max_sweeps) {
        Scalar active_change = update_intercept();
        for (Eigen::Index j = 0; j < p; ++j) {
          if (beta[j] != 0) active_change = std::max(active_change, update_coordinate(j));
        }
        ++fit.sweeps;
        if (active_change < tol) break;
      }
    }

    Scalar next = penalized_objective(z, y, b0, beta, lambda);
    if (!std::isfinite(next)) {
      throw Error(ErrorCode::kNumericalFailure, "non-finite loss during fit");
    }
    // Damp steps that overshoot the true objective.
    for (int halving = 0; halving < 30 && next > objective; ++halving) {
      beta = (beta + beta_prev) / 2;
      b0 = (b0 + b0_prev) / 2;
      next = penalized_objective(z, y, b0, beta, lambda);
    }
    eta = (z * beta).array() + b0;

    const Scalar step = std::max((beta - beta_prev).cwiseAbs().maxCoeff(),
                                 std::abs(b0 - b0_prev));
    const bool stalled = next >= objective;
    objective = std::min(next, objective);
    if (step < tol || (p == 0 && std::abs(b0 - b0_prev) < tol)) {
      fit.converged = true;
      break;
    }
    if (stalled && step < 10 * tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

// Largest KKT violation of a fit:
//   beta_j != 0: |grad_j + lambda sign(beta_j)|
//   beta_j == 0: max(0, |grad_j| - lambda)
//   intercept:   |grad_0|
template <typename Scalar>
Scalar kkt_violation(const MatrixX<Scalar>& z, const VectorX<Scalar>& y,
                     const LassoFit<Scalar>& fit, Scalar lambda) {
  const LossGradient<Scalar> g =
      logistic_gradient(z, y, fit.intercept, fit.coefficients);
  Scalar worst = std::abs(g.intercept);
  for (Eigen::Index j = 0; j < g.beta.size(); ++j) {
    const Scalar b = fit.coefficients[j];
    const Scalar v = b != 0 ? std::abs(g.beta[j] + lambda * (b > 0 ? 1 : -1))
                            : std::max(Scalar(0), std::abs(g.beta[j]) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

// Mean binomial deviance with probabilities clamped to [1e-5, 1 - 1e-5].
template <typename Scalar>
Scalar binomial_deviance(const VectorX<Scalar>& y, const VectorX<Scalar>& prob) {
  constexpr Scalar kEps = Scalar(1e-5);
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const Scalar p = std::clamp(prob[i], kEps, Scalar(1) - kEps);
    sum += -2 * (y[i] * std::log(p) + (1 - y[i]) * std::log(1 - p));
  }
  return sum / static_cast<Scalar>(y.size());
}

template <typename Scalar>
VectorX<Scalar> predict_probabilities(const MatrixX<Scalar>& z,
                                      const LassoFit<Scalar>& fit) {
  VectorX<Scalar> eta = (z * fit.coefficients).array() + fit.intercept;
  return eta.unaryExpr([](Scalar v) { return sigmoid(v); });
}

// Fold id per row: a seeded shuffle of 0..n-1, dealt round-robin into k folds.
inline std::vector<int> assign_folds(Eigen::Index n, int k, std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  seeded_shuffle(order, rng);
  std::vector<int> folds(static_cast<std::size_t>(n));
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    folds[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return folds;
}

template <typename Scalar>
MatrixX<Scalar> take_rows(const MatrixX<Scalar>& x,
                          const std::vector<Eigen::Index>& rows) {
  MatrixX<Scalar> out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  }
  return out;
}

template <typename Scalar>
VectorX<Scalar> take_rows(const VectorX<Scalar>& v,
                          const std::vector<Eigen::Index>& rows) {
  VectorX<Scalar> out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  }
  return out;
}

template <typename Scalar>
struct CvResult {
  Scalar lambda = 0;
  std::size_t index = 0;
  std::vector<Scalar> grid;
  std::vector<Scalar> mean_deviance;
  int folds_used = 0;
};

struct CvOptions {
  int folds = 10;
  int grid_size = 100;
  double grid_ratio = 1e-3;
  SolverOptions solver;
};

// Seeded k-fold selection of lambda by mean held-out binomial deviance over a
// grid anchored at lambda_max of the fully standardized data. Each fold is
// standardized with its own training statistics. Ties go to the larger
// lambda. Folds whose training or held-out part lacks a class are skipped.
template <typename Scalar>
CvResult<Scalar> cv_select_lambda(const MatrixX<Scalar>& x,
                                  const VectorX<Scalar>& y, std::uint64_t seed,
                                  const CvOptions& options = {}) {
  const Eigen::Index n = x.rows();
  const int k = options.folds;
  if (k < 2 || n < k) {
    throw Error(ErrorCode::kInvalidArgument,
                "cross-validation needs k >= 2 and n >= k");
  }
  const Standardized<Scalar> full = standardize(x);
  CvResult<Scalar> result;
  result.grid = lambda_grid(lambda_max(full.values, y), options.grid_size,
                            static_cast<Scalar>(options.grid_ratio));
  const std::size_t g = result.grid.size();
  std::vector<Scalar> totals(g, 0);

  const std::vector<int> folds = assign_folds(n, k, seed);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i) {
      (folds[static_cast<std::size_t>(i)] == fold ? test : train).push_back(i);
    }
    const VectorX<Scalar> y_train = take_rows(y, train);
    const VectorX<Scalar> y_test = take_rows(y, test);
    auto has_both = [](const VectorX<Scalar>& v) {
      const Scalar m = v.mean();
      return m > 0 && m < 1;
    };
    if (!has_both(y_train) || !has_both(y_test)) {
      warn("cross-validation fold " + std::to_string(fold) +
           " is missing a class; skipped");
      continue;
    }
    const Standardized<Scalar> train_std = standardize(take_rows(x, train));
    const MatrixX<Scalar> z_test =
        apply_standardization(take_rows(x, test), train_std.means, train_std.sds);

    LassoFit<Scalar> previous;
    bool have_previous = false;
    for (std::size_t l = 0; l < g; ++l) {
      LassoFit<Scalar> fit =
          fit_lasso_logistic(train_std.values, y_train, result.grid[l],
                             options.solver, have_previous ? &previous : nullptr);
      totals[l] += binomial_deviance(y_test, predict_probabilities(z_test, fit));
      previous = std::move(fit);
      have_previous = true;
    }
    ++result.folds_used;
  }
  if (result.folds_used == 0) {
    throw Error(ErrorCode::kCvFailure, "every cross-validation fold was skipped");
  }
  result.mean_deviance.resize(g);
  for (std::size_t l = 0; l < g; ++l) {
    result.mean_deviance[l] = totals[l] / static_cast<Scalar>(result.folds_used);
    if (result.mean_deviance[l] < result.mean_deviance[result.index]) result.index = l;
  }
  result.lambda = result.grid[result.index];
  return result;
}

}  // namespace applause
