// Copyright 2026 The hipar Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Local linear models over the numerical features of a region: OLS baseline,
// LASSO by cyclic coordinate descent, orthogonal matching pursuit, and the
// per-region LASSO/OMP contest.
//
// All fits work on standardized features (population standard deviation).
// LASSO additionally scales the response by its standard deviation, so the
// penalty grid is expressed in standardized units on both sides.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hipar/dataset.hpp"
#include "hipar/errors.hpp"
#include "hipar/pattern.hpp"

namespace hipar {

enum class ErrorMetric { rmse, meae };
enum class ModelMethod { ols, lasso, omp, mean };

inline const char* to_string(ErrorMetric m) { return m == ErrorMetric::rmse ? "rmse" : "meae"; }

inline const char* to_string(ModelMethod m) {
  switch (m) {
    case ModelMethod::ols: return "ols";
    case ModelMethod::lasso: return "lasso";
    case ModelMethod::omp: return "omp";
    case ModelMethod::mean: return "mean";
  }
  return "?";
}

inline ErrorMetric parse_metric(std::string_view s) {
  if (s == "rmse") return ErrorMetric::rmse;
  if (s == "meae") return ErrorMetric::meae;
  throw InputError("unknown metric '" + std::string(s) + "'");
}

inline ModelMethod parse_method(std::string_view s) {
  if (s == "ols") return ModelMethod::ols;
  if (s == "lasso") return ModelMethod::lasso;
  if (s == "omp") return ModelMethod::omp;
  if (s == "mean") return ModelMethod::mean;
  throw InputError("unknown model method '" + std::string(s) + "'");
}

/// RMSE or median absolute residual.
inline double metric_value(std::vector<double> residuals, ErrorMetric metric) {
  if (residuals.empty()) throw InputError("error metric over an empty row set");
  if (metric == ErrorMetric::rmse) {
    double ss = 0.0;
    for (double r : residuals) ss += r * r;
    return std::sqrt(ss / static_cast<double>(residuals.size()));
  }
  for (double& r : residuals) r = std::abs(r);
  const auto mid = residuals.size() / 2;
  std::nth_element(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(mid),
                   residuals.end());
  const double upper = residuals[mid];
  if (residuals.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

struct FeatureScaling {
  std::string name;
  double mean = 0.0;
  double stddev = 1.0;
};

/// y = intercept + sum coefficients[j] * x[features[j]], in original units.
/// `scaling`/`standardized` hold the same model in standardized coordinates.
struct LinearModel {
  ModelMethod method = ModelMethod::mean;
  double intercept = 0.0;
  std::vector<std::string> features;
  std::vector<double> coefficients;
  std::vector<FeatureScaling> scaling;
  std::vector<double> standardized;
  double response_mean = 0.0;
  /// Winning penalty for LASSO, number of terms for OMP, 0 otherwise.
  double hyperparameter = 0.0;

  std::size_t nonzero_count() const {
    return static_cast<std::size_t>(
        std::count_if(coefficients.begin(), coefficients.end(), [](double c) { return c != 0.0; }));
  }

  std::vector<double> predict_rows(const Dataset& d, std::span<const std::size_t> rows) const {
    std::vector<std::span<const double>> cols;
    cols.reserve(features.size());
    for (const auto& f : features) cols.push_back(d.numeric_column(d.require_column(f)));
    std::vector<double> out;
    out.reserve(rows.size());
    for (auto r : rows) {
      double v = intercept;
      for (std::size_t j = 0; j < cols.size(); ++j) v += coefficients[j] * cols[j][r];
      out.push_back(v);
    }
    return out;
  }

  double predict(const Dataset& d, std::size_t row) const {
    const std::size_t rows[] = {row};
    return predict_rows(d, rows).front();
  }

  double predict(const Observation& x) const {
    double v = intercept;
    for (std::size_t j = 0; j < features.size(); ++j) {
      auto it = x.find(features[j]);
      if (it == x.end()) throw InputError("observation lacks attribute '" + features[j] + "'");
      const auto* value = std::get_if<double>(&it->second);
      if (!value) throw InputError("attribute '" + features[j] + "' must be numerical");
      if (!std::isfinite(*value)) throw InputError("attribute '" + features[j] + "' is not finite");
      v += coefficients[j] * *value;
    }
    return v;
  }

  /// Same prediction computed through the standardized coordinates.
  double predict_standardized(const Dataset& d, std::size_t row) const {
    double v = response_mean;
    for (std::size_t j = 0; j < scaling.size(); ++j) {
      const double x = d.number(row, d.require_column(scaling[j].name));
      v += standardized[j] * (x - scaling[j].mean) / scaling[j].stddev;
    }
    return v;
  }

  /// `target = b0 + b1*attr1 - b2*attr2`, 6 significant digits, zeros omitted.
  std::string render(const std::string& target) const {
    auto fmt = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", v);
      return std::string(buf);
    };
    std::string out = target + " = " + fmt(intercept);
    for (std::size_t j = 0; j < features.size(); ++j) {
      const double c = coefficients[j];
      if (c == 0.0) continue;
      out += c < 0 ? " - " : " + ";
      out += fmt(std::abs(c)) + "*" + features[j];
    }
    return out;
  }
};

struct RegressionConfig {
  std::vector<double> lambda_grid{0.001, 0.01, 0.1, 1.0};
  /// 0 selects min(#numerical features, 8).
  std::size_t max_terms = 0;
  double holdout_fraction = 0.2;
  std::size_t min_rows = 5;
  std::size_t max_sweeps = 1000;
  double tolerance = 1e-6;
};

struct FittedRuleModel {
  LinearModel model;
  double train_error = 0.0;
  double holdout_error = 0.0;
  ErrorMetric metric = ErrorMetric::rmse;
  /// Rows the holdout error was measured on.
  IndexSet eval_rows;
};

inline double evaluate(const LinearModel& model, std::span<const std::size_t> rows,
                       const Dataset& d, ErrorMetric metric) {
  if (rows.empty()) throw InputError("cannot evaluate a model on an empty row set");
  const auto y = d.target_values();
  auto pred = model.predict_rows(d, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) pred[i] = y[rows[i]] - pred[i];
  return metric_value(std::move(pred), metric);
}

namespace detail {

/// Standardized design over the non-constant numerical features of `rows`.
struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;  // centered response
  double y_mean = 0.0;
  double y_scale = 0.0;  // population standard deviation of y
  std::vector<FeatureScaling> scaling;
};

inline Design standardize(std::span<const std::size_t> rows, const Dataset& d) {
  Design out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto y = d.target_values();
  out.y.resize(n);
  double ym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ym += y[rows[static_cast<std::size_t>(i)]];
  ym /= static_cast<double>(n);
  double yss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.y(i) = y[rows[static_cast<std::size_t>(i)]] - ym;
    yss += out.y(i) * out.y(i);
  }
  out.y_mean = ym;
  out.y_scale = std::sqrt(yss / static_cast<double>(n));

  std::vector<std::vector<double>> kept;
  for (auto c : d.numeric_features()) {
    const auto col = d.numeric_column(c);
    double m = 0.0;
    for (auto r : rows) m += col[r];
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (auto r : rows) ss += (col[r] - m) * (col[r] - m);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) continue;
    std::vector<double> z;
    z.reserve(rows.size());
    for (auto r : rows) z.push_back((col[r] - m) / sd);
    kept.push_back(std::move(z));
    out.scaling.push_back({d.attribute(c).name, m, sd});
  }
  out.x.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) out.x(i, static_cast<Eigen::Index>(j)) = kept[j][static_cast<std::size_t>(i)];
  return out;
}

inline bool degenerate_response(const Design& design) {
  return !(design.y_scale > 1e-12 * std::max(1.0, std::abs(design.y_mean)));
}

/// Builds a model in original units from standardized coefficients on the
/// centered (unscaled) response.
inline LinearModel make_model(ModelMethod method, const Design& design,
                              const Eigen::VectorXd& beta, double hyperparameter) {
  LinearModel m;
  m.method = method;
  m.response_mean = design.y_mean;
  m.scaling = design.scaling;
  m.hyperparameter = hyperparameter;
  m.intercept = design.y_mean;
  for (std::size_t j = 0; j < design.scaling.size(); ++j) {
    const double b = beta(static_cast<Eigen::Index>(j));
    const auto& s = design.scaling[j];
    m.features.push_back(s.name);
    m.standardized.push_back(b);
    const double coef = b == 0.0 ? 0.0 : b / s.stddev;
    m.coefficients.push_back(coef);
    m.intercept -= coef * s.mean;
  }
  return m;
}

inline LinearModel mean_model(std::span<const std::size_t> rows, const Dataset& d) {
  LinearModel m;
  m.method = ModelMethod::mean;
  const auto y = d.target_values();
  double s = 0.0;
  for (auto r : rows) s += y[r];
  m.intercept = rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
  m.response_mean = m.intercept;
  return m;
}

/// Minimum-norm least squares.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.cols() == 0) return Eigen::VectorXd(0);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  return cod.solve(y);
}

inline bool better(double candidate, double incumbent) {
  return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent));
}

}  // namespace detail

inline LinearModel fit_mean(std::span<const std::size_t> rows, const Dataset& d) {
  return detail::mean_model(rows, d);
}

/// Unregularized least squares; rank-deficient systems take the minimum-norm
/// solution. Falls back to the mean model when nothing can be fitted.
inline LinearModel fit_ols(std::span<const std::size_t> rows, const Dataset& d) {
  if (rows.empty()) throw InputError("OLS fit on an empty row set");
  auto design = detail::standardize(rows, d);
  if (design.x.cols() == 0 || detail::degenerate_response(design)) return fit_mean(rows, d);
  Eigen::VectorXd beta = detail::least_squares(design.x, design.y);
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (!std::isfinite(beta(j))) return fit_mean(rows, d);
  return detail::make_model(ModelMethod::ols, design, beta, 0.0);
}

struct CoordinateDescentResult {
  Eigen::VectorXd beta;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// Cyclic coordinate descent for (1/2n)||y - X b||^2 + lambda ||b||_1.
/// Stops when the largest coefficient change of a sweep is below `tolerance`.
inline CoordinateDescentResult lasso_coordinate_descent(const Eigen::MatrixXd& x,
                                                        const Eigen::VectorXd& y, double lambda,
                                                        std::size_t max_sweeps = 1000,
                                                        double tolerance = 1e-6,
                                                        const Eigen::VectorXd* warm = nullptr) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();
  CoordinateDescentResult out;
  out.beta = warm ? *warm : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = y - x * out.beta;
  Eigen::VectorXd col_sq = x.colwise().squaredNorm().transpose() / n;
  for (out.sweeps = 0; out.sweeps < max_sweeps;) {
    ++out.sweeps;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) <= 0.0) continue;
      const double old = out.beta(j);
      const double rho = x.col(j).dot(residual) / n + col_sq(j) * old;
      double updated = 0.0;
      if (rho > lambda) updated = (rho - lambda) / col_sq(j);
      else if (rho < -lambda) updated = (rho + lambda) / col_sq(j);
      if (updated != old) {
        residual -= x.col(j) * (updated - old);
        out.beta(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change < tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/// LASSO at a fixed penalty (standardized units).
inline LinearModel fit_lasso_fixed(std::span<const std::size_t> rows, const Dataset& d,
                                   double lambda, const RegressionConfig& cfg = {}) {
  if (rows.empty()) throw InputError("LASSO fit on an empty row set");
  auto design = detail::standardize(rows, d);
  if (rows.size() < 2 || design.x.cols() == 0 || detail::degenerate_response(design))
    return fit_mean(rows, d);
  const Eigen::VectorXd ys = design.y / design.y_scale;
  auto cd = lasso_coordinate_descent(design.x, ys, lambda, cfg.max_sweeps, cfg.tolerance);
  return detail::make_model(ModelMethod::lasso, design, cd.beta * design.y_scale, lambda);
}

struct LassoFit {
  LinearModel model;
  double lambda = 0.0;
  double holdout_error = 0.0;
};

/// LASSO with the penalty picked from `cfg.lambda_grid` by lowest error on
/// `holdout`. Ties go to the larger penalty.
inline LassoFit fit_lasso(std::span<const std::size_t> rows, const Dataset& d,
                          std::span<const std::size_t> holdout,
                          ErrorMetric metric = ErrorMetric::rmse,
                          const RegressionConfig& cfg = {}) {
  if (rows.empty()) throw InputError("LASSO fit on an empty row set");
  auto eval_rows = holdout.empty() ? rows : holdout;
  auto design = detail::standardize(rows, d);
  if (rows.size() < 2 || design.x.cols() == 0 || detail::degenerate_response(design)) {
    auto m = fit_mean(rows, d);
    return {m, 0.0, evaluate(m, eval_rows, d, metric)};
  }
  if (cfg.lambda_grid.empty()) throw InputError("empty LASSO penalty grid");
  std::vector<double> grid = cfg.lambda_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  const Eigen::VectorXd ys = design.y / design.y_scale;
  LassoFit best;
  best.holdout_error = std::numeric_limits<double>::infinity();
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(design.x.cols());
  for (double lambda : grid) {
    auto cd = lasso_coordinate_descent(design.x, ys, lambda, cfg.max_sweeps, cfg.tolerance, &warm);
    warm = cd.beta;
    auto model = detail::make_model(ModelMethod::lasso, design, cd.beta * design.y_scale, lambda);
    const double err = evaluate(model, eval_rows, d, metric);
    if (detail::better(err, best.holdout_error) || !std::isfinite(best.holdout_error)) {
      best = {std::move(model), lambda, err};
    }
  }
  return best;
}

/// Greedy forward selection path. Entry k-1 holds the coefficients after k
/// terms; the path stops early once the residual vanishes.
inline std::vector<Eigen::VectorXd> omp_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                             std::size_t max_terms) {
  std::vector<Eigen::VectorXd> path;
  const Eigen::Index p = x.cols();
  const double y_norm = y.norm();
  std::vector<Eigen::Index> active;
  std::vector<bool> used(static_cast<std::size_t>(p), false);
  Eigen::VectorXd residual = y;
  const std::size_t limit = std::min<std::size_t>(max_terms, static_cast<std::size_t>(p));
  while (active.size() < limit) {
    if (residual.norm() <= 1e-10 * std::max(1.0, y_norm)) break;
    Eigen::Index pick = -1;
    double best = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(x.col(j).dot(residual)) / std::max(x.col(j).norm(), 1e-300);
      if (c > best) {
        best = c;
        pick = j;
      }
    }
    if (pick < 0 || best <= 1e-12 * std::max(1.0, y_norm)) break;
    active.push_back(pick);
    used[static_cast<std::size_t>(pick)] = true;
    Eigen::MatrixXd xa(x.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) xa.col(static_cast<Eigen::Index>(k)) = x.col(active[k]);
    Eigen::VectorXd coef = detail::least_squares(xa, y);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
    for (std::size_t k = 0; k < active.size(); ++k) full(active[k]) = coef(static_cast<Eigen::Index>(k));
    residual = y - xa * coef;
    path.push_back(std::move(full));
  }
  return path;
}

inline std::size_t default_max_terms(std::size_t features, const RegressionConfig& cfg) {
  return cfg.max_terms == 0 ? std::min<std::size_t>(features, 8) : cfg.max_terms;
}

/// OMP with exactly `terms` greedy steps (fewer if the residual vanishes).
inline LinearModel fit_omp_fixed(std::span<const std::size_t> rows, const Dataset& d,
                                 std::size_t terms) {
  if (rows.empty()) throw InputError("OMP fit on an empty row set");
  auto design = detail::standardize(rows, d);
  if (terms == 0 || rows.size() < 2 || design.x.cols() == 0 || detail::degenerate_response(design))
    return fit_mean(rows, d);
  auto path = omp_path(design.x, design.y, terms);
  if (path.empty()) return fit_mean(rows, d);
  return detail::make_model(ModelMethod::omp, design, path.back(),
                            static_cast<double>(path.size()));
}

struct OmpFit {
  LinearModel model;
  std::size_t terms = 0;
  double holdout_error = 0.0;
};

/// OMP with the number of terms in 1..max_terms picked by lowest error on
/// `holdout`. Ties go to fewer terms.
inline OmpFit fit_omp(std::span<const std::size_t> rows, const Dataset& d, std::size_t max_terms,
                      std::span<const std::size_t> holdout,
                      ErrorMetric metric = ErrorMetric::rmse) {
  if (rows.empty()) throw InputError("OMP fit on an empty row set");
  auto eval_rows = holdout.empty() ? rows : holdout;
  auto design = detail::standardize(rows, d);
  auto fallback = [&] {
    auto m = fit_mean(rows, d);
    return OmpFit{m, 0, evaluate(m, eval_rows, d, metric)};
  };
  if (max_terms == 0 || rows.size() < 2 || design.x.cols() == 0 ||
      detail::degenerate_response(design))
    return fallback();
  auto path = omp_path(design.x, design.y, max_terms);
  if (path.empty()) return fallback();
  OmpFit best;
  best.holdout_error = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < path.size(); ++k) {
    auto model = detail::make_model(ModelMethod::omp, design, path[k], static_cast<double>(k + 1));
    const double err = evaluate(model, eval_rows, d, metric);
    if (!std::isfinite(best.holdout_error) || detail::better(err, best.holdout_error))
      best = {std::move(model), k + 1, err};
  }
  return best;
}

/// LASSO vs OMP contest on an 80/20 split of `rows`; the winner (ties to
/// LASSO) is refit on all rows with its winning hyperparameter. Regions with
/// fewer than `cfg.min_rows` rows, a constant response, or no usable feature
/// get the mean model, scored on all rows.
inline FittedRuleModel best_local_model(std::span<const std::size_t> rows, const Dataset& d,
                                        ErrorMetric metric, Seed seed,
                                        const RegressionConfig& cfg = {}) {
  if (rows.empty()) throw InputError("local model on an empty region");
  FittedRuleModel out;
  out.metric = metric;
  auto design = detail::standardize(rows, d);
  if (rows.size() < cfg.min_rows || design.x.cols() == 0 || detail::degenerate_response(design)) {
    out.model = fit_mean(rows, d);
    out.train_error = evaluate(out.model, rows, d, metric);
    out.holdout_error = out.train_error;
    out.eval_rows.assign(rows.begin(), rows.end());
    return out;
  }
  auto split = holdout_split(rows, cfg.holdout_fraction, seed);
  auto lasso = fit_lasso(split.train, d, split.test, metric, cfg);
  auto omp = fit_omp(split.train, d, default_max_terms(design.x.cols(), cfg), split.test, metric);
  if (lasso.holdout_error <= omp.holdout_error) {
    out.model = lasso.model.method == ModelMethod::lasso ? fit_lasso_fixed(rows, d, lasso.lambda, cfg)
                                                         : fit_mean(rows, d);
    out.holdout_error = lasso.holdout_error;
  } else {
    out.model = omp.model.method == ModelMethod::omp ? fit_omp_fixed(rows, d, omp.terms)
                                                     : fit_mean(rows, d);
    out.holdout_error = omp.holdout_error;
  }
  out.train_error = evaluate(out.model, rows, d, metric);
  out.eval_rows = std::move(split.test);
  return out;
}

}  // namespace hipar
