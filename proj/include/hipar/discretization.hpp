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

// Supervised discretization of numerical attributes. The target is split at
// its median into large/small value classes, then each attribute is cut by
// recursive entropy minimization with the Fayyad-Irani MDL stopping rule.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hipar/dataset.hpp"
#include "hipar/pattern.hpp"

namespace hipar {

enum class ValueClass : std::uint8_t { small = 0, large = 1 };

/// Large/small value labels, aligned with the rows they were computed on.
struct TargetBinarization {
  double threshold = 0.0;
  IndexSet rows;
  std::vector<ValueClass> labels;
};

struct CutPointSet {
  std::string attribute;
  std::vector<double> cuts;
};

inline double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Label = large iff y > median over `rows`; ties go to small.
/// Returns nullopt when one of the classes would be empty (degenerate target).
inline std::optional<TargetBinarization> binarize_target(std::span<const std::size_t> rows,
                                                         const Dataset& d) {
  if (rows.size() < 2) throw InputError("target binarization needs at least 2 rows");
  const auto y = d.target_values();
  std::vector<double> values;
  values.reserve(rows.size());
  for (auto r : rows) values.push_back(y[r]);
  TargetBinarization out;
  out.threshold = median(values);
  out.rows.assign(rows.begin(), rows.end());
  out.labels.reserve(rows.size());
  std::size_t large = 0;
  for (double v : values) {
    bool is_large = v > out.threshold;
    large += is_large;
    out.labels.push_back(is_large ? ValueClass::large : ValueClass::small);
  }
  if (large == 0 || large == rows.size()) return std::nullopt;
  return out;
}

namespace detail {

using ClassCounts = std::array<std::size_t, 2>;

inline double entropy(const ClassCounts& counts) {
  const double n = static_cast<double>(counts[0] + counts[1]);
  if (n == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

inline std::size_t class_count(const ClassCounts& counts) {
  return (counts[0] > 0) + (counts[1] > 0);
}

struct LabeledValue {
  double value;
  ValueClass label;
};

/// One recursion step over `items[begin,end)`, sorted by value.
inline void mdlp_split(const std::vector<LabeledValue>& items, std::size_t begin, std::size_t end,
                       std::vector<double>& cuts) {
  const std::size_t n = end - begin;
  if (n < 2) return;
  ClassCounts total{0, 0};
  for (std::size_t i = begin; i < end; ++i) ++total[static_cast<std::size_t>(items[i].label)];
  if (class_count(total) < 2) return;

  // Boundary points between consecutive distinct values: skipped only when
  // both values carry the same single class.
  ClassCounts left{0, 0};
  double best_entropy = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best_split;  // first index of the right half
  ClassCounts best_left{}, best_right{};
  std::size_t i = begin;
  std::optional<std::uint8_t> prev_mask;
  while (i < end) {
    std::size_t j = i;
    std::uint8_t mask = 0;
    ClassCounts group{0, 0};
    while (j < end && items[j].value == items[i].value) {
      mask |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(items[j].label));
      ++group[static_cast<std::size_t>(items[j].label)];
      ++j;
    }
    if (prev_mask && !(*prev_mask == mask && (mask == 1 || mask == 2))) {
      ClassCounts right{total[0] - left[0], total[1] - left[1]};
      const double nl = static_cast<double>(left[0] + left[1]);
      const double nr = static_cast<double>(right[0] + right[1]);
      const double h = (nl * entropy(left) + nr * entropy(right)) / static_cast<double>(n);
      if (h < best_entropy - 1e-12) {
        best_entropy = h;
        best_split = i;
        best_left = left;
        best_right = right;
      }
    }
    left[0] += group[0];
    left[1] += group[1];
    prev_mask = mask;
    i = j;
  }
  if (!best_split) return;

  const double ent = entropy(total);
  const double gain = ent - best_entropy;
  const double k = static_cast<double>(class_count(total));
  const double k1 = static_cast<double>(class_count(best_left));
  const double k2 = static_cast<double>(class_count(best_right));
  const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                       (k * ent - k1 * entropy(best_left) - k2 * entropy(best_right));
  const double nn = static_cast<double>(n);
  if (!(gain > (std::log2(nn - 1.0) + delta) / nn)) return;

  const std::size_t s = *best_split;
  mdlp_split(items, begin, s, cuts);
  cuts.push_back(0.5 * (items[s - 1].value + items[s].value));
  mdlp_split(items, s, end, cuts);
}

}  // namespace detail

/// Recursive minimum-entropy binary splitting accepted under the MDL
/// criterion. May return no cuts.
inline CutPointSet mdlp_cuts(const std::string& attribute, const Dataset& d,
                             const TargetBinarization& labels) {
  const auto col = d.require_column(attribute);
  const auto x = d.numeric_column(col);
  std::vector<detail::LabeledValue> items;
  items.reserve(labels.rows.size());
  for (std::size_t i = 0; i < labels.rows.size(); ++i)
    items.push_back({x[labels.rows[i]], labels.labels[i]});
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.value < b.value; });
  CutPointSet out{attribute, {}};
  detail::mdlp_split(items, 0, items.size(), out.cuts);
  return out;
}

/// k cuts -> (-inf,c1), [c1,c2), ..., [ck,inf). No cuts -> no conditions.
inline std::vector<Condition> conditions_from_cuts(const CutPointSet& cp) {
  std::vector<Condition> out;
  if (cp.cuts.empty()) return out;
  out.push_back(Condition::below(cp.attribute, cp.cuts.front()));
  for (std::size_t i = 1; i < cp.cuts.size(); ++i)
    out.push_back(Condition::between(cp.attribute, cp.cuts[i - 1], cp.cuts[i]));
  out.push_back(Condition::at_least(cp.attribute, cp.cuts.back()));
  return out;
}

/// Interval conditions of one attribute, discretized on `rows`, keeping those
/// whose support reaches `min_support` rows. Support is counted on
/// `support_rows` (the full dataset, or the region itself). When only one
/// interval survives, the attribute is dropped altogether.
inline std::vector<Condition> frequent_intervals(const std::string& attribute, const Dataset& d,
                                                 const TargetBinarization& labels,
                                                 std::span<const std::size_t> support_rows,
                                                 double min_support) {
  auto conds = conditions_from_cuts(mdlp_cuts(attribute, d, labels));
  std::vector<Condition> kept;
  for (auto& c : conds)
    if (static_cast<double>(filter_rows(c, d, support_rows).size()) >= min_support - 1e-9)
      kept.push_back(std::move(c));
  if (kept.size() < 2) kept.clear();
  return kept;
}

}  // namespace hipar
