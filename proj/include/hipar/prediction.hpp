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

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hipar/dataset.hpp"
#include "hipar/pattern.hpp"
#include "hipar/selection.hpp"

namespace hipar {

/// Error-weighted aggregation of the selected rules covering a point, with the
/// default rule as fallback for uncovered points.
struct Predictor {
  std::string target;
  std::vector<AttributeSchema> features;
  /// Selected non-default rules, in canonical pattern order.
  std::vector<SelectedRule> rules;
  SelectedRule default_rule;
  bool default_chosen = false;
  /// When set and the default rule was selected, it joins every covering set.
  bool default_joins_cover = false;
};

inline Predictor make_predictor(const SelectedRuleSet& rs, std::vector<AttributeSchema> features,
                                std::string target, bool default_joins_cover = false) {
  if (!rs.default_rule.rule.is_default)
    throw InvariantError("predictor needs the default rule");
  Predictor p;
  p.target = std::move(target);
  p.features = std::move(features);
  for (const auto& r : rs.chosen)
    if (!r.rule.is_default) p.rules.push_back(r);
  std::sort(p.rules.begin(), p.rules.end(), [](const SelectedRule& a, const SelectedRule& b) {
    return a.rule.pattern.key() < b.rule.pattern.key();
  });
  p.default_rule = rs.default_rule;
  p.default_chosen = rs.default_chosen;
  p.default_joins_cover = default_joins_cover;
  return p;
}

inline Observation observation(const Dataset& d, std::size_t row) {
  Observation x;
  for (std::size_t c = 0; c < d.cols(); ++c) {
    if (d.attribute(c).kind == AttributeKind::numerical)
      x.emplace(d.attribute(c).name, d.number(row, c));
    else
      x.emplace(d.attribute(c).name, d.symbol(row, c));
  }
  return x;
}

namespace detail {

inline void check_observation(const Predictor& pred, const Observation& x) {
  for (const auto& f : pred.features) {
    auto it = x.find(f.name);
    if (it == x.end()) throw InputError("observation lacks feature '" + f.name + "'");
    if (f.kind == AttributeKind::numerical) {
      const auto* v = std::get_if<double>(&it->second);
      if (!v) throw InputError("feature '" + f.name + "' must be numerical");
      if (!std::isfinite(*v)) throw InputError("feature '" + f.name + "' is not finite");
    } else if (!std::holds_alternative<std::string>(it->second)) {
      throw InputError("feature '" + f.name + "' must be categorical");
    }
  }
}

}  // namespace detail

/// Selected non-default rules whose pattern holds on `x`, in canonical order.
inline std::vector<const SelectedRule*> covering_rules(const Predictor& pred, const Observation& x) {
  detail::check_observation(pred, x);
  std::vector<const SelectedRule*> out;
  for (const auto& r : pred.rules)
    if (r.rule.pattern.matches(x)) out.push_back(&r);
  return out;
}

/// Normalized inverse-error weights of a covering set.
inline std::vector<double> cover_weights(std::span<const SelectedRule* const> cover) {
  std::vector<double> w;
  w.reserve(cover.size());
  double total = 0.0;
  for (const auto* r : cover) {
    w.push_back(1.0 / r->normalized_error);
    total += w.back();
  }
  for (double& v : w) v /= total;
  return w;
}

inline double predict(const Predictor& pred, const Observation& x) {
  auto cover = covering_rules(pred, x);
  if (cover.empty()) return pred.default_rule.rule.fitted.model.predict(x);
  if (pred.default_joins_cover && pred.default_chosen) cover.push_back(&pred.default_rule);
  const auto w = cover_weights(cover);
  double out = 0.0;
  for (std::size_t i = 0; i < cover.size(); ++i)
    out += w[i] * cover[i]->rule.fitted.model.predict(x);
  return out;
}

/// Pointwise predictions for `rows` of `d`, in order.
inline std::vector<double> predict_batch(const Predictor& pred, const Dataset& d,
                                         std::span<const std::size_t> rows) {
  for (const auto& f : pred.features) {
    auto c = d.column_index(f.name);
    if (!c) throw InputError("input lacks feature '" + f.name + "'");
    if (d.attribute(*c).kind != f.kind)
      throw InputError("feature '" + f.name + "' should be " + to_string(f.kind));
  }
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) {
    try {
      out.push_back(predict(pred, observation(d, r)));
    } catch (const InputError& e) {
      throw InputError("row " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<double> predict_batch(const Predictor& pred, const Dataset& d) {
  return predict_batch(pred, d, d.all_rows());
}

}  // namespace hipar
