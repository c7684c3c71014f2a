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

// Conditions, conjunctive patterns and the region algebra over a Dataset:
// support, closure, interclass variance and Jaccard overlap.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hipar/dataset.hpp"
#include "hipar/errors.hpp"

namespace hipar {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Equals {
  std::string value;
  friend bool operator==(const Equals&, const Equals&) = default;
};

/// Real interval; an infinite bound is always open.
struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double v) const {
    bool above = lo_closed ? v >= lo : v > lo;
    bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A single observation keyed by attribute name.
using Cell = std::variant<double, std::string>;
using Observation = std::map<std::string, Cell, std::less<>>;

namespace detail {

inline std::string format_display(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string format_key(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return format_real(v);
}

}  // namespace detail

class Condition {
 public:
  using Predicate = std::variant<Equals, Interval>;

  Condition(std::string attribute, Predicate predicate)
      : attribute_(std::move(attribute)), predicate_(std::move(predicate)) {
    if (const auto* iv = std::get_if<Interval>(&predicate_)) {
      if (std::isnan(iv->lo) || std::isnan(iv->hi) || !(iv->lo < iv->hi))
        throw InputError("interval on '" + attribute_ + "' must satisfy lo < hi");
      if (std::isinf(iv->lo) && iv->lo > 0) throw InputError("interval lower bound is +inf");
      if (std::isinf(iv->hi) && iv->hi < 0) throw InputError("interval upper bound is -inf");
      auto& mut = std::get<Interval>(predicate_);
      if (std::isinf(mut.lo)) mut.lo_closed = false;
      if (std::isinf(mut.hi)) mut.hi_closed = false;
    }
  }

  static Condition equals(std::string attribute, std::string value) {
    return {std::move(attribute), Equals{std::move(value)}};
  }
  static Condition interval(std::string attribute, double lo, double hi, bool lo_closed,
                            bool hi_closed) {
    return {std::move(attribute), Interval{lo, hi, lo_closed, hi_closed}};
  }
  /// (-inf, hi)
  static Condition below(std::string attribute, double hi) {
    return interval(std::move(attribute), -kInf, hi, false, false);
  }
  /// [lo, hi)
  static Condition between(std::string attribute, double lo, double hi) {
    return interval(std::move(attribute), lo, hi, true, false);
  }
  /// [lo, inf)
  static Condition at_least(std::string attribute, double lo) {
    return interval(std::move(attribute), lo, kInf, true, false);
  }

  const std::string& attribute() const { return attribute_; }
  const Predicate& predicate() const { return predicate_; }
  bool is_categorical() const { return std::holds_alternative<Equals>(predicate_); }
  bool is_interval() const { return std::holds_alternative<Interval>(predicate_); }
  const Equals& equality() const { return std::get<Equals>(predicate_); }
  const Interval& range() const { return std::get<Interval>(predicate_); }

  /// Exact predicate rendering; distinct predicates render differently.
  std::string predicate_key() const {
    if (is_categorical()) return "=\"" + equality().value + "\"";
    const auto& iv = range();
    return std::string(" in ") + (iv.lo_closed ? "[" : "(") + detail::format_key(iv.lo) + "," +
           detail::format_key(iv.hi) + (iv.hi_closed ? "]" : ")");
  }
  std::string key() const { return attribute_ + predicate_key(); }

  /// Rule-file rendering: `a="v"`, `a in (-inf,x)`, `a in [x,y]`, `a in (x,inf)`.
  std::string render() const {
    if (is_categorical()) return attribute_ + "=\"" + equality().value + "\"";
    const auto& iv = range();
    const bool lo_inf = std::isinf(iv.lo);
    const bool hi_inf = std::isinf(iv.hi);
    std::string lo = detail::format_display(iv.lo);
    std::string hi = detail::format_display(iv.hi);
    if (lo_inf && hi_inf) return attribute_ + " in (-inf,inf)";
    if (lo_inf) return attribute_ + " in (-inf," + hi + ")";
    if (hi_inf) return attribute_ + " in (" + lo + ",inf)";
    return attribute_ + " in [" + lo + "," + hi + "]";
  }

  bool matches(const Cell& cell) const {
    if (is_categorical()) {
      const auto* s = std::get_if<std::string>(&cell);
      if (!s) throw InputError("condition " + render() + " expects a categorical value");
      return *s == equality().value;
    }
    const auto* v = std::get_if<double>(&cell);
    if (!v) throw InputError("condition " + render() + " expects a numerical value");
    return range().contains(*v);
  }

  friend bool operator==(const Condition& a, const Condition& b) {
    return a.attribute_ == b.attribute_ && a.predicate_ == b.predicate_;
  }

 private:
  std::string attribute_;
  Predicate predicate_;
};

/// Canonical total order: attribute name, then exact predicate rendering.
inline bool canonical_less(const Condition& a, const Condition& b) {
  if (a.attribute() != b.attribute()) return a.attribute() < b.attribute();
  return a.predicate_key() < b.predicate_key();
}

inline void sort_canonical(std::vector<Condition>& conditions) {
  std::sort(conditions.begin(), conditions.end(), canonical_less);
}

/// Condition resolved against a Dataset's columns for fast row tests.
class BoundCondition {
 public:
  BoundCondition(const Condition& c, const Dataset& d) : col_(d.require_column(c.attribute())) {
    const auto kind = d.attribute(col_).kind;
    if (c.is_categorical()) {
      if (kind != AttributeKind::categorical)
        throw InputError("condition " + c.render() + " used on numerical column");
      categorical_ = true;
      code_ = d.code_of(col_, c.equality().value);
      codes_ = d.codes(col_);
    } else {
      if (kind != AttributeKind::numerical)
        throw InputError("condition " + c.render() + " used on categorical column");
      range_ = c.range();
      values_ = d.numeric_column(col_);
    }
  }

  bool operator()(std::size_t row) const {
    if (categorical_) return code_ >= 0 && codes_[row] == code_;
    return range_.contains(values_[row]);
  }

 private:
  std::size_t col_;
  bool categorical_ = false;
  std::int32_t code_ = -1;
  Interval range_;
  std::span<const std::int32_t> codes_;
  std::span<const double> values_;
};

inline bool matches(const Condition& c, const Dataset& d, std::size_t row) {
  return BoundCondition(c, d)(row);
}

inline bool matches(const Condition& c, const Cell& cell) { return c.matches(cell); }

/// Conjunction of conditions kept in canonical order, at most one per attribute.
/// The empty pattern is the universal pattern and matches everything.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<Condition> conditions) : conditions_(std::move(conditions)) {
    sort_canonical(conditions_);
    conditions_.erase(std::unique(conditions_.begin(), conditions_.end()), conditions_.end());
    for (std::size_t i = 1; i < conditions_.size(); ++i)
      if (conditions_[i].attribute() == conditions_[i - 1].attribute())
        throw InputError("pattern has two conditions on attribute '" +
                         conditions_[i].attribute() + "'");
  }

  const std::vector<Condition>& conditions() const { return conditions_; }
  std::size_t size() const { return conditions_.size(); }
  bool empty() const { return conditions_.empty(); }

  bool contains(const Condition& c) const {
    return std::binary_search(conditions_.begin(), conditions_.end(), c, canonical_less);
  }
  bool has_attribute(std::string_view attribute) const {
    return std::any_of(conditions_.begin(), conditions_.end(),
                       [&](const Condition& c) { return c.attribute() == attribute; });
  }

  Pattern with(const Condition& c) const {
    auto conds = conditions_;
    conds.push_back(c);
    return Pattern(std::move(conds));
  }
  Pattern without(std::size_t index) const {
    auto conds = conditions_;
    conds.erase(conds.begin() + static_cast<std::ptrdiff_t>(index));
    return Pattern(std::move(conds));
  }

  /// Ordering-independent identifier.
  std::string key() const {
    if (conditions_.empty()) return "TRUE";
    std::string out;
    for (std::size_t i = 0; i < conditions_.size(); ++i) {
      if (i) out += " & ";
      out += conditions_[i].key();
    }
    return out;
  }

  std::string render() const {
    if (conditions_.empty()) return "TRUE";
    std::string out;
    for (std::size_t i = 0; i < conditions_.size(); ++i) {
      if (i) out += " & ";
      out += conditions_[i].render();
    }
    return out;
  }

  bool matches(const Observation& x) const {
    for (const auto& c : conditions_) {
      auto it = x.find(c.attribute());
      if (it == x.end()) throw InputError("observation lacks attribute '" + c.attribute() + "'");
      if (!c.matches(it->second)) return false;
    }
    return true;
  }

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.conditions_ == b.conditions_;
  }

 private:
  std::vector<Condition> conditions_;
};

struct Region {
  Pattern pattern;
  IndexSet rows;
};

struct Support {
  std::size_t absolute = 0;
  double relative = 0.0;
};

inline IndexSet condition_rows(const Condition& c, const Dataset& d) {
  BoundCondition bound(c, d);
  IndexSet out;
  for (std::size_t r = 0; r < d.rows(); ++r)
    if (bound(r)) out.push_back(r);
  return out;
}

/// Rows of `rows` that satisfy `c`.
inline IndexSet filter_rows(const Condition& c, const Dataset& d, std::span<const std::size_t> rows) {
  BoundCondition bound(c, d);
  IndexSet out;
  for (auto r : rows)
    if (bound(r)) out.push_back(r);
  return out;
}

inline IndexSet region_rows(const Pattern& p, const Dataset& d) {
  IndexSet rows = d.all_rows();
  for (const auto& c : p.conditions()) rows = filter_rows(c, d, rows);
  return rows;
}

inline Region region(const Pattern& p, const Dataset& d) { return {p, region_rows(p, d)}; }

inline Support support(const Pattern& p, const Dataset& d) {
  auto n = region_rows(p, d).size();
  return {n, static_cast<double>(n) / static_cast<double>(d.rows())};
}

inline bool holds_on_all(const Condition& c, const Dataset& d, std::span<const std::size_t> rows) {
  BoundCondition bound(c, d);
  return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return bound(r); });
}

/// Closure of a nonempty region: every universe condition holding on all
/// of `rows`, joined with `p`.
inline Pattern closure_of_rows(const Pattern& p, std::span<const std::size_t> rows,
                               const Dataset& d, std::span<const Condition> universe) {
  if (rows.empty()) throw InputError("closure of an empty region is undefined");
  auto conds = p.conditions();
  for (const auto& c : universe) {
    if (p.has_attribute(c.attribute())) continue;
    if (std::any_of(conds.begin(), conds.end(),
                    [&](const Condition& k) { return k.attribute() == c.attribute(); }))
      continue;
    if (holds_on_all(c, d, rows)) conds.push_back(c);
  }
  return Pattern(std::move(conds));
}

inline Pattern closure(const Pattern& p, const Dataset& d, std::span<const Condition> universe) {
  return closure_of_rows(p, region_rows(p, d), d, universe);
}

/// Interclass variance of a region against the target mean. Zero when the
/// region or its complement is empty.
inline double interclass_variance_rows(std::span<const std::size_t> rows, const Dataset& d) {
  const auto y = d.target_values();
  const std::size_t n = y.size();
  const std::size_t k = rows.size();
  if (k == 0 || k >= n) return 0.0;
  double total = 0.0;
  for (double v : y) total += v;
  double inside = 0.0;
  for (auto r : rows) inside += y[r];
  const double mu = total / static_cast<double>(n);
  const double mu_in = inside / static_cast<double>(k);
  const double mu_out = (total - inside) / static_cast<double>(n - k);
  return static_cast<double>(k) * (mu - mu_in) * (mu - mu_in) +
         static_cast<double>(n - k) * (mu - mu_out) * (mu - mu_out);
}

inline double interclass_variance(const Pattern& p, const Dataset& d) {
  return interclass_variance_rows(region_rows(p, d), d);
}

/// |a ∩ b| / |a ∪ b| over sorted index sets; 0 when both are empty.
inline double jaccard_rows(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

inline double jaccard(const Pattern& p, const Pattern& q, const Dataset& d) {
  return jaccard_rows(region_rows(p, d), region_rows(q, d));
}

inline IndexSet intersect_rows(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace hipar
