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

// End-to-end fit (default rule, init, enumeration, selection) and the
// cross-validation harness comparing against an unregularized global
// linear baseline.

#pragma once

#include <chrono>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "hipar/dataset.hpp"
#include "hipar/enumeration.hpp"
#include "hipar/prediction.hpp"
#include "hipar/regression.hpp"
#include "hipar/selection.hpp"

namespace hipar {

enum class Variant { standard, f, sd };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::f: return "f";
    case Variant::sd: return "sd";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "standard") return Variant::standard;
  if (s == "f") return Variant::f;
  if (s == "sd") return Variant::sd;
  throw InputError("unknown variant '" + std::string(s) + "'");
}

struct RunConfig {
  std::string input;
  std::string target;
  std::set<std::string, std::less<>> categorical;
  double theta = 0.1;
  double sigma = 1.0;
  double omega = 1.0;
  ErrorMetric metric = ErrorMetric::rmse;
  Variant variant = Variant::standard;
  /// 0: size of the standard variant's selection on the same data.
  std::size_t sd_q = 0;
  std::size_t folds = 10;
  Seed seed = 0;
  std::string rules_out;
  std::string report_out;

  double iv_percentile = 85.0;
  bool regional_support = false;
  bool explore_rejected = false;
  bool default_joins_cover = false;
  RegressionConfig regression;
  std::size_t exact_limit = 25;
  std::ostream* trace = nullptr;
};

inline EnumConfig enum_config(const RunConfig& cfg) {
  EnumConfig e;
  e.theta = cfg.theta;
  e.iv_percentile = cfg.iv_percentile;
  e.metric = cfg.metric;
  e.seed = cfg.seed;
  e.regression = cfg.regression;
  e.regional_support = cfg.regional_support;
  e.explore_rejected = cfg.explore_rejected;
  e.trace = cfg.trace;
  return e;
}

struct HiParModel {
  CandidateSet candidates;
  SelectedRuleSet selected;
  Predictor predictor;
};

/// Default rule, initial conditions, candidate enumeration, then selection
/// over the candidates plus the default rule.
inline HiParModel run_hipar(const Dataset& d, const RunConfig& cfg) {
  const auto ecfg = enum_config(cfg);
  auto default_rule = fit_default_rule(d, ecfg);
  auto init = hipar_init(d, ecfg);
  HiParModel out;
  out.candidates = enumerate_candidates(d, std::move(init), ecfg, default_rule);

  std::vector<HybridRule> pool = out.candidates.rules;
  pool.push_back(out.candidates.default_rule);
  const double omega = cfg.variant == Variant::f ? 0.0 : cfg.omega;
  auto problem = build_problem(std::move(pool), cfg.sigma, omega, d);
  SolveOptions opts;
  opts.exact_limit = cfg.exact_limit;
  opts.seed = cfg.seed;
  if (cfg.variant == Variant::sd) {
    std::size_t q = cfg.sd_q;
    if (q == 0) q = solve(problem, opts).chosen.size();
    out.selected = select_top_q(problem, std::min(q, problem.size()));
  } else {
    out.selected = solve(problem, opts);
  }
  out.predictor =
      make_predictor(out.selected, d.feature_schema(), d.target_name(), cfg.default_joins_cover);
  return out;
}

/// Percentage error reduction of `model` with respect to `baseline`.
inline double error_reduction(double baseline, double model) {
  if (!(baseline > 0.0)) throw InputError("error reduction needs a positive baseline error");
  return (baseline - model) / baseline * 100.0;
}

/// Antecedent conditions plus non-zero coefficients over the chosen rules.
inline std::size_t count_elements(const SelectedRuleSet& rs) {
  std::size_t n = 0;
  for (const auto& r : rs.chosen) n += r.rule.pattern.size() + r.rule.fitted.model.nonzero_count();
  return n;
}

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  bool skipped = false;
  std::string warning;
  double baseline_error = 0.0;
  double model_error = 0.0;
  double reduction = 0.0;
  double baseline_rmse = 0.0;
  double model_rmse = 0.0;
  double rmse_reduction = 0.0;
  double baseline_meae = 0.0;
  double model_meae = 0.0;
  double meae_reduction = 0.0;
  std::size_t candidates = 0;
  std::size_t rules = 0;
  std::size_t elements = 0;
  double seconds = 0.0;
};

struct EvaluationReport {
  std::size_t folds = 0;
  ErrorMetric metric = ErrorMetric::rmse;
  Variant variant = Variant::standard;
  Seed seed = 0;
  std::vector<FoldResult> per_fold;
  std::size_t folds_evaluated = 0;
  double mean_reduction = 0.0;
  double mean_rmse_reduction = 0.0;
  double median_meae_reduction = 0.0;
  double mean_rules = 0.0;
  double mean_elements = 0.0;
  double mean_seconds = 0.0;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/// k-fold evaluation of the configured variant against a global OLS baseline.
/// Timing covers training only.
inline EvaluationReport cross_validate(const Dataset& d, const RunConfig& cfg) {
  if (cfg.folds < 2) throw InputError("cross-validation needs at least 2 folds");
  const auto plan = k_folds(d, cfg.folds, cfg.seed);
  EvaluationReport report;
  report.folds = cfg.folds;
  report.metric = cfg.metric;
  report.variant = cfg.variant;
  report.seed = cfg.seed;
  std::vector<double> reductions, rmse_red, meae_red, rules, elements, seconds;
  for (std::size_t f = 0; f < cfg.folds; ++f) {
    FoldResult fr;
    fr.fold = f;
    const auto train_idx = plan.train_rows(f);
    const auto test_idx = plan.test_rows(f);
    fr.train_rows = train_idx.size();
    fr.test_rows = test_idx.size();
    const Dataset train = d.subset(train_idx);
    const Dataset test = d.subset(test_idx);
    const auto test_rows = test.all_rows();
    const auto y = test.target_values();

    const auto t0 = std::chrono::steady_clock::now();
    HiParModel model;
    LinearModel baseline;
    try {
      if (train.rows() < 2 || test.rows() < 1) throw InputError("fold too small");
      baseline = fit_ols(train.all_rows(), train);
      model = run_hipar(train, cfg);
    } catch (const InputError& e) {
      fr.skipped = true;
      fr.warning = std::string("fold skipped: ") + e.what();
      report.per_fold.push_back(std::move(fr));
      continue;
    }
    fr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto pred = predict_batch(model.predictor, test, test_rows);
    std::vector<double> res_model, res_base;
    const auto base_pred = baseline.predict_rows(test, test_rows);
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      res_model.push_back(y[i] - pred[i]);
      res_base.push_back(y[i] - base_pred[i]);
    }
    fr.baseline_rmse = metric_value(res_base, ErrorMetric::rmse);
    fr.model_rmse = metric_value(res_model, ErrorMetric::rmse);
    fr.baseline_meae = metric_value(res_base, ErrorMetric::meae);
    fr.model_meae = metric_value(res_model, ErrorMetric::meae);
    fr.baseline_error = cfg.metric == ErrorMetric::rmse ? fr.baseline_rmse : fr.baseline_meae;
    fr.model_error = cfg.metric == ErrorMetric::rmse ? fr.model_rmse : fr.model_meae;
    fr.candidates = model.candidates.rules.size();
    fr.rules = model.selected.chosen.size();
    fr.elements = count_elements(model.selected);
    if (!(fr.baseline_error > 0.0)) {
      fr.skipped = true;
      fr.warning = "fold skipped: baseline error is zero";
      report.per_fold.push_back(std::move(fr));
      continue;
    }
    fr.reduction = error_reduction(fr.baseline_error, fr.model_error);
    fr.rmse_reduction =
        fr.baseline_rmse > 0.0 ? error_reduction(fr.baseline_rmse, fr.model_rmse) : 0.0;
    fr.meae_reduction =
        fr.baseline_meae > 0.0 ? error_reduction(fr.baseline_meae, fr.model_meae) : 0.0;
    reductions.push_back(fr.reduction);
    rmse_red.push_back(fr.rmse_reduction);
    meae_red.push_back(fr.meae_reduction);
    rules.push_back(static_cast<double>(fr.rules));
    elements.push_back(static_cast<double>(fr.elements));
    seconds.push_back(fr.seconds);
    report.per_fold.push_back(std::move(fr));
  }
  report.folds_evaluated = reductions.size();
  report.mean_reduction = detail::mean_of(reductions);
  report.mean_rmse_reduction = detail::mean_of(rmse_red);
  report.median_meae_reduction = meae_red.empty() ? std::nan("") : median(meae_red);
  report.mean_rules = detail::mean_of(rules);
  report.mean_elements = detail::mean_of(elements);
  report.mean_seconds = detail::mean_of(seconds);
  return report;
}

}  // namespace hipar
