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

// Rule files and evaluation reports.
//
// A rule file is a JSON document holding the feature schema and every rule
// the predictor needs (the selected ones plus the default rule), with exact
// interval bounds and model coefficients. A human-readable rendering of the
// same rules is written next to it with a ".txt" suffix.

#pragma once

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "hipar/pipeline.hpp"
#include "hipar/prediction.hpp"

namespace hipar {

using json = nlohmann::json;

inline constexpr const char* kRuleFormat = "hipar-rules";
inline constexpr int kRuleFormatVersion = 1;

namespace detail {

inline json bound_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

inline double bound_from_json(const json& j, double unbounded) {
  return j.is_null() ? unbounded : j.get<double>();
}

inline json condition_to_json(const Condition& c) {
  json j{{"attribute", c.attribute()}};
  if (c.is_categorical()) {
    j["equals"] = c.equality().value;
  } else {
    const auto& iv = c.range();
    j["lo"] = bound_to_json(iv.lo);
    j["hi"] = bound_to_json(iv.hi);
    j["lo_closed"] = iv.lo_closed;
    j["hi_closed"] = iv.hi_closed;
  }
  return j;
}

inline Condition condition_from_json(const json& j) {
  const auto attr = j.at("attribute").get<std::string>();
  if (j.contains("equals")) return Condition::equals(attr, j.at("equals").get<std::string>());
  return Condition::interval(attr, bound_from_json(j.at("lo"), -kInf),
                             bound_from_json(j.at("hi"), kInf), j.at("lo_closed").get<bool>(),
                             j.at("hi_closed").get<bool>());
}

inline json model_to_json(const LinearModel& m) {
  json coefs = json::array();
  for (std::size_t i = 0; i < m.features.size(); ++i)
    coefs.push_back({{"feature", m.features[i]}, {"value", m.coefficients[i]}});
  json scaling = json::array();
  for (std::size_t i = 0; i < m.scaling.size(); ++i)
    scaling.push_back({{"feature", m.scaling[i].name},
                       {"mean", m.scaling[i].mean},
                       {"stddev", m.scaling[i].stddev},
                       {"standardized", m.standardized[i]}});
  return {{"method", to_string(m.method)},
          {"intercept", m.intercept},
          {"coefficients", coefs},
          {"scaling", scaling},
          {"response_mean", m.response_mean},
          {"hyperparameter", m.hyperparameter}};
}

inline LinearModel model_from_json(const json& j) {
  LinearModel m;
  m.method = parse_method(j.at("method").get<std::string>());
  m.intercept = j.at("intercept").get<double>();
  for (const auto& c : j.at("coefficients")) {
    m.features.push_back(c.at("feature").get<std::string>());
    m.coefficients.push_back(c.at("value").get<double>());
  }
  for (const auto& s : j.at("scaling")) {
    m.scaling.push_back(
        {s.at("feature").get<std::string>(), s.at("mean").get<double>(), s.at("stddev").get<double>()});
    m.standardized.push_back(s.at("standardized").get<double>());
  }
  m.response_mean = j.at("response_mean").get<double>();
  m.hyperparameter = j.at("hyperparameter").get<double>();
  return m;
}

inline json rule_to_json(const SelectedRule& r, const std::string& target, bool selected) {
  json conds = json::array();
  for (const auto& c : r.rule.pattern.conditions()) conds.push_back(condition_to_json(c));
  const auto& f = r.rule.fitted;
  return {{"pattern", r.rule.pattern.render()},
          {"conditions", conds},
          {"model", model_to_json(f.model)},
          {"model_text", f.model.render(target)},
          {"support", r.rule.support_abs},
          {"support_rel", r.rule.support_rel},
          {"metric", to_string(f.metric)},
          {"train_error", f.train_error},
          {"holdout_error", f.holdout_error},
          {"normalized_error", r.normalized_error},
          {"alpha", r.alpha},
          {"is_default", r.rule.is_default},
          {"selected", selected}};
}

inline SelectedRule rule_from_json(const json& j) {
  SelectedRule r;
  std::vector<Condition> conds;
  for (const auto& c : j.at("conditions")) conds.push_back(condition_from_json(c));
  r.rule.pattern = Pattern(std::move(conds));
  r.rule.fitted.model = model_from_json(j.at("model"));
  r.rule.fitted.metric = parse_metric(j.at("metric").get<std::string>());
  r.rule.fitted.train_error = j.at("train_error").get<double>();
  r.rule.fitted.holdout_error = j.at("holdout_error").get<double>();
  r.rule.support_abs = j.at("support").get<std::size_t>();
  r.rule.support_rel = j.at("support_rel").get<double>();
  r.rule.is_default = j.at("is_default").get<bool>();
  r.normalized_error = j.at("normalized_error").get<double>();
  r.alpha = j.at("alpha").get<double>();
  if (r.rule.is_default != r.rule.pattern.empty())
    throw InputError("rule file: default flag must mark exactly the TRUE pattern");
  if (!(r.normalized_error > 0.0)) throw InputError("rule file: normalized error must be positive");
  return r;
}

}  // namespace detail

inline json predictor_to_json(const Predictor& p) {
  json features = json::array();
  for (const auto& f : p.features) features.push_back({{"name", f.name}, {"kind", to_string(f.kind)}});
  json rules = json::array();
  for (const auto& r : p.rules) rules.push_back(detail::rule_to_json(r, p.target, true));
  rules.push_back(detail::rule_to_json(p.default_rule, p.target, p.default_chosen));
  return {{"format", kRuleFormat},
          {"version", kRuleFormatVersion},
          {"target", p.target},
          {"features", features},
          {"default_joins_cover", p.default_joins_cover},
          {"rules", rules}};
}

inline Predictor predictor_from_json(const json& j) {
  if (j.value("format", std::string{}) != kRuleFormat)
    throw InputError("not a hipar rule file");
  if (j.value("version", 0) != kRuleFormatVersion)
    throw InputError("unsupported rule file version");
  Predictor p;
  p.target = j.at("target").get<std::string>();
  for (const auto& f : j.at("features")) {
    const auto kind = f.at("kind").get<std::string>();
    if (kind != "categorical" && kind != "numerical")
      throw InputError("rule file: unknown attribute kind '" + kind + "'");
    p.features.push_back({f.at("name").get<std::string>(),
                          kind == "categorical" ? AttributeKind::categorical
                                                : AttributeKind::numerical,
                          AttributeRole::feature});
  }
  p.default_joins_cover = j.value("default_joins_cover", false);
  bool have_default = false;
  for (const auto& rj : j.at("rules")) {
    auto r = detail::rule_from_json(rj);
    if (r.rule.is_default) {
      if (have_default) throw InputError("rule file has more than one default rule");
      have_default = true;
      p.default_chosen = rj.at("selected").get<bool>();
      p.default_rule = std::move(r);
    } else {
      p.rules.push_back(std::move(r));
    }
  }
  if (!have_default) throw InputError("rule file lacks the default rule");
  return p;
}

/// One text block per rule: antecedent, model, support and held-out error.
inline std::string render_rules(const Predictor& p) {
  std::ostringstream out;
  auto block = [&](const SelectedRule& r, std::size_t index, bool selected) {
    const auto& f = r.rule.fitted;
    out << "rule " << index;
    if (r.rule.is_default) out << " [default" << (selected ? "" : ", fallback only") << "]";
    out << "\n  if   " << r.rule.pattern.render() << "\n  then " << f.model.render(p.target)
        << "\n  support " << r.rule.support_abs << " (" << detail::format_display(r.rule.support_rel)
        << "), holdout " << to_string(f.metric) << " " << detail::format_display(f.holdout_error)
        << "\n";
  };
  std::size_t i = 1;
  for (const auto& r : p.rules) block(r, i++, true);
  block(p.default_rule, i, p.default_chosen);
  return out.str();
}

/// Writes the JSON rule file at `path` and its text rendering at `path`.txt.
inline void serialize_rules(const Predictor& p, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << predictor_to_json(p).dump(2) << '\n';
    if (!out) throw InputError("failed writing '" + path + "'");
  }
  std::ofstream text(path + ".txt", std::ios::binary);
  if (!text) throw InputError("cannot write '" + path + ".txt'");
  text << render_rules(p);
}

inline Predictor load_rules(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return predictor_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InputError("malformed rule file '" + path + "': " + e.what());
  }
}

inline json report_to_json(const EvaluationReport& r, bool include_timing = true) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json folds = json::array();
  for (const auto& f : r.per_fold) {
    json jf{{"fold", f.fold},
            {"train_rows", f.train_rows},
            {"test_rows", f.test_rows},
            {"skipped", f.skipped}};
    if (!f.warning.empty()) jf["warning"] = f.warning;
    if (!f.skipped) {
      jf["baseline_error"] = num(f.baseline_error);
      jf["model_error"] = num(f.model_error);
      jf["reduction"] = num(f.reduction);
      jf["baseline_rmse"] = num(f.baseline_rmse);
      jf["model_rmse"] = num(f.model_rmse);
      jf["rmse_reduction"] = num(f.rmse_reduction);
      jf["baseline_meae"] = num(f.baseline_meae);
      jf["model_meae"] = num(f.model_meae);
      jf["meae_reduction"] = num(f.meae_reduction);
      jf["candidates"] = f.candidates;
      jf["rules"] = f.rules;
      jf["elements"] = f.elements;
      if (include_timing) jf["seconds"] = num(f.seconds);
    }
    folds.push_back(std::move(jf));
  }
  json j{{"folds", r.folds},
         {"metric", to_string(r.metric)},
         {"variant", to_string(r.variant)},
         {"seed", r.seed},
         {"folds_evaluated", r.folds_evaluated},
         {"per_fold", folds},
         {"mean_reduction", num(r.mean_reduction)},
         {"mean_rmse_reduction", num(r.mean_rmse_reduction)},
         {"median_meae_reduction", num(r.median_meae_reduction)},
         {"mean_rules", num(r.mean_rules)},
         {"mean_elements", num(r.mean_elements)}};
  if (include_timing) j["mean_seconds"] = num(r.mean_seconds);
  return j;
}

}  // namespace hipar
