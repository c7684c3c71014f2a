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

// Candidate rule enumeration: depth-first traversal of closed patterns with
// support and interclass-variance pruning, LCM-style prefix-preservation,
// an Occam acceptance test against the immediate ancestors, and on-the-fly
// re-discretization of numerical attributes inside accepted regions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hipar/dataset.hpp"
#include "hipar/discretization.hpp"
#include "hipar/pattern.hpp"
#include "hipar/regression.hpp"

namespace hipar {

struct HybridRule {
  Pattern pattern;
  FittedRuleModel fitted;
  std::size_t support_abs = 0;
  double support_rel = 0.0;
  bool is_default = false;
};

struct EnumConfig {
  /// Relative minimum support.
  double theta = 0.1;
  /// Percentile of the interval conditions' interclass variance used as the
  /// pruning threshold. A value <= 0 disables interclass-variance pruning.
  double iv_percentile = 85.0;
  ErrorMetric metric = ErrorMetric::rmse;
  Seed seed = 0;
  RegressionConfig regression;
  /// Count re-discretized interval support inside the region instead of on
  /// the whole dataset.
  bool regional_support = false;
  /// Keep descending below candidates that fail the Occam test.
  bool explore_rejected = false;
  /// One line per visited node when set.
  std::ostream* trace = nullptr;
};

struct EnumStats {
  std::size_t nodes_visited = 0;
  std::size_t pruned_support = 0;
  std::size_t pruned_iv = 0;
  std::size_t pruned_leftmost = 0;
  std::size_t duplicates = 0;
  std::size_t rejected_occam = 0;
  std::size_t accepted = 0;
  std::size_t models_fitted = 0;
};

struct CandidateSet {
  std::vector<HybridRule> rules;
  HybridRule default_rule;
  EnumStats stats;
  /// Canonical keys of every closed pattern that reached model fitting, in
  /// visiting order.
  std::vector<std::string> explored;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Linear-interpolation percentile, q in [0,100].
inline double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace detail

/// Seed of the hold-out split used for a pattern's local model.
inline Seed pattern_seed(Seed seed, const Pattern& p) {
  return detail::splitmix64(seed ^ detail::fnv1a(p.key()));
}

inline double min_support_rows(const Dataset& d, double theta) {
  return theta * static_cast<double>(d.rows());
}

inline void validate(const EnumConfig& cfg, const Dataset& d) {
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw InputError("min support must lie in (0,1]");
  if (min_support_rows(d, cfg.theta) < 1.0 - 1e-9)
    throw InputError("min support * rows must be at least 1");
  if (!(cfg.iv_percentile <= 100.0)) throw InputError("iv percentile must lie in [0,100]");
}

inline HybridRule make_rule(const Pattern& p, std::span<const std::size_t> rows, const Dataset& d,
                            const EnumConfig& cfg) {
  HybridRule r;
  r.pattern = p;
  r.fitted = best_local_model(rows, d, cfg.metric, pattern_seed(cfg.seed, p), cfg.regression);
  r.support_abs = rows.size();
  r.support_rel = static_cast<double>(rows.size()) / static_cast<double>(d.rows());
  r.is_default = p.empty();
  return r;
}

/// The global rule on the universal pattern.
inline HybridRule fit_default_rule(const Dataset& d, const EnumConfig& cfg) {
  return make_rule(Pattern{}, d.all_rows(), d, cfg);
}

/// Frequent categorical equalities plus frequent MDLP intervals of every
/// numerical feature, discretized against the median-binarized target.
inline std::vector<Condition> hipar_init(const Dataset& d, const EnumConfig& cfg) {
  validate(cfg, d);
  const double min_rows = min_support_rows(d, cfg.theta);
  std::vector<Condition> out;
  for (auto c : d.categorical_features()) {
    const auto codes = d.codes(c);
    std::vector<std::size_t> counts(d.symbols(c).size(), 0);
    for (auto code : codes) ++counts[static_cast<std::size_t>(code)];
    for (std::size_t s = 0; s < counts.size(); ++s)
      if (static_cast<double>(counts[s]) >= min_rows - 1e-9)
        out.push_back(Condition::equals(d.attribute(c).name, d.symbols(c)[s]));
  }
  const auto all = d.all_rows();
  if (d.rows() >= 2) {
    if (auto labels = binarize_target(all, d)) {
      for (auto c : d.numeric_features()) {
        auto intervals = frequent_intervals(d.attribute(c).name, d, *labels, all, min_rows);
        out.insert(out.end(), intervals.begin(), intervals.end());
      }
    }
  }
  sort_canonical(out);
  return out;
}

/// Prefix-preservation: every condition of the closed pattern ordered before
/// the extension condition must already belong to the parent pattern.
inline bool leftmost_parent_check(const Pattern& p, const Condition& extension,
                                  const Pattern& closed) {
  for (const auto& c : closed.conditions()) {
    if (!canonical_less(c, extension)) continue;
    if (!p.contains(c)) return false;
  }
  return true;
}

/// Strict dominance of the rule's error over every parent's error, all
/// measured on `eval_rows`.
inline bool occam_test(const HybridRule& rule, std::span<const HybridRule* const> parents,
                       std::span<const std::size_t> eval_rows, ErrorMetric metric,
                       const Dataset& d) {
  const double child = evaluate(rule.fitted.model, eval_rows, d, metric);
  for (const auto* parent : parents)
    if (!(child < evaluate(parent->fitted.model, eval_rows, d, metric))) return false;
  return true;
}

/// Error-only form of the acceptance test.
inline bool occam_test(double child_error, std::span<const double> parent_errors) {
  return std::all_of(parent_errors.begin(), parent_errors.end(),
                     [&](double e) { return child_error < e; });
}

class Enumerator {
 public:
  Enumerator(const Dataset& d, const EnumConfig& cfg, HybridRule default_rule)
      : d_(d), cfg_(cfg), min_rows_(min_support_rows(d, cfg.theta)) {
    validate(cfg, d);
    if (!default_rule.is_default) throw InvariantError("enumeration root must be the default rule");
    out_.default_rule = std::move(default_rule);
  }

  CandidateSet run(std::vector<Condition> init) {
    sort_canonical(init);
    for (const auto& c : init)
      if (c.is_categorical()) categorical_universe_.push_back(c);
    expand(Pattern{}, d_.all_rows(), std::move(init));
    return std::move(out_);
  }

 private:
  const HybridRule& fitted_rule(const Pattern& p, std::span<const std::size_t> rows) {
    if (rows.size() == d_.rows()) return out_.default_rule;
    auto key = p.key();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ++out_.stats.models_fitted;
    return memo_.emplace(std::move(key), make_rule(p, rows, d_, cfg_)).first->second;
  }

  /// Closures of the pattern minus one condition that describe a strictly
  /// larger region; the default rule when there is none.
  std::vector<const HybridRule*> immediate_parents(const Pattern& closed,
                                                   std::span<const std::size_t> rows,
                                                   std::span<const Condition> universe) {
    std::vector<const HybridRule*> parents;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < closed.size(); ++i) {
      Pattern q = closed.without(i);
      IndexSet q_rows = region_rows(q, d_);
      if (q_rows.size() == rows.size()) continue;
      Pattern q_closed = q_rows.size() == d_.rows() ? Pattern{}
                                                    : closure_of_rows(q, q_rows, d_, universe);
      if (!seen.insert(q_closed.key()).second) continue;
      parents.push_back(&fitted_rule(q_closed, q_rows));
    }
    if (parents.empty()) parents.push_back(&out_.default_rule);
    return parents;
  }

  void trace(const std::string& pattern, std::size_t support, double iv, const char* decision) {
    if (!cfg_.trace) return;
    *cfg_.trace << pattern << '\t' << support << '\t' << detail::format_real(iv) << '\t'
                << decision << '\n';
  }

  std::vector<Condition> rediscretize(const Pattern& closed, std::span<const std::size_t> rows) {
    std::vector<Condition> out;
    if (rows.size() < 2) return out;
    auto labels = binarize_target(rows, d_);
    if (!labels) return out;
    const IndexSet all = cfg_.regional_support ? IndexSet{} : d_.all_rows();
    std::span<const std::size_t> support_rows = cfg_.regional_support ? rows : std::span(all);
    for (auto c : d_.numeric_features()) {
      const auto& name = d_.attribute(c).name;
      if (closed.has_attribute(name)) continue;
      auto intervals = frequent_intervals(name, d_, *labels, support_rows, min_rows_);
      out.insert(out.end(), intervals.begin(), intervals.end());
    }
    return out;
  }

  void expand(const Pattern& p, const IndexSet& p_rows, std::vector<Condition> conditions) {
    std::vector<Condition> universe = categorical_universe_;
    std::vector<double> interval_iv;
    for (const auto& c : conditions) {
      if (!c.is_interval()) continue;
      universe.push_back(c);
      interval_iv.push_back(interclass_variance_rows(condition_rows(c, d_), d_));
    }
    double nu = -kInf;
    if (cfg_.iv_percentile > 0.0 && interval_iv.size() >= 2)
      nu = detail::percentile(interval_iv, cfg_.iv_percentile);

    for (std::size_t i = 0; i < conditions.size(); ++i) {
      const Condition& ext = conditions[i];
      if (p.has_attribute(ext.attribute())) continue;
      ++out_.stats.nodes_visited;
      IndexSet rows = filter_rows(ext, d_, p_rows);
      if (static_cast<double>(rows.size()) < min_rows_ - 1e-9) {
        ++out_.stats.pruned_support;
        trace(p.with(ext).render(), rows.size(), 0.0, "pruned-support");
        continue;
      }
      const double iv = interclass_variance_rows(rows, d_);
      if (!(iv > nu)) {
        ++out_.stats.pruned_iv;
        trace(p.with(ext).render(), rows.size(), iv, "pruned-iv");
        continue;
      }
      Pattern closed = closure_of_rows(p.with(ext), rows, d_, universe);
      if (!leftmost_parent_check(p, ext, closed)) {
        ++out_.stats.pruned_leftmost;
        trace(closed.render(), rows.size(), iv, "pruned-leftmost");
        continue;
      }
      if (!explored_.insert(closed.key()).second) {
        ++out_.stats.duplicates;
        trace(closed.render(), rows.size(), iv, "pruned-leftmost");
        continue;
      }
      out_.explored.push_back(closed.key());

      const HybridRule& rule = fitted_rule(closed, rows);
      auto parents = immediate_parents(closed, rows, universe);
      const bool accept =
          occam_test(rule, parents, rule.fitted.eval_rows, cfg_.metric, d_);
      if (accept) {
        ++out_.stats.accepted;
        out_.rules.push_back(rule);
        trace(closed.render(), rows.size(), iv, "accepted");
      } else {
        ++out_.stats.rejected_occam;
        trace(closed.render(), rows.size(), iv, "rejected-occam");
      }
      if (!accept && !cfg_.explore_rejected) continue;

      std::vector<Condition> child;
      for (std::size_t j = i + 1; j < conditions.size(); ++j) {
        const auto& c = conditions[j];
        if (c.is_interval() || closed.has_attribute(c.attribute())) continue;
        child.push_back(c);
      }
      auto intervals = rediscretize(closed, rows);
      child.insert(child.end(), intervals.begin(), intervals.end());
      sort_canonical(child);
      expand(closed, rows, std::move(child));
    }
  }

  const Dataset& d_;
  EnumConfig cfg_;
  double min_rows_;
  CandidateSet out_;
  std::vector<Condition> categorical_universe_;
  std::unordered_map<std::string, HybridRule> memo_;
  std::unordered_set<std::string> explored_;
};

inline CandidateSet enumerate_candidates(const Dataset& d, std::vector<Condition> init,
                                         const EnumConfig& cfg, HybridRule default_rule) {
  return Enumerator(d, cfg, std::move(default_rule)).run(std::move(init));
}

inline CandidateSet enumerate_candidates(const Dataset& d, std::vector<Condition> init,
                                         const EnumConfig& cfg) {
  return enumerate_candidates(d, std::move(init), cfg, fit_default_rule(d, cfg));
}

}  // namespace hipar
