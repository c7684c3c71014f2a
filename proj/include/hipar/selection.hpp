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

// Rule selection as a 0-1 program.
//
// Each candidate p carries a utility alpha_p = s(p)^sigma / e(p), where s and
// e are support and error normalized over the candidate pool. Choosing a set
// S costs
//
//   f(S) = -sum_{p in S} alpha_p + sum_{p<q in S} omega * J(p,q) * (alpha_p + alpha_q)
//
// with J the Jaccard overlap of the regions, subject to |S| >= 1. Since every
// pair penalty is nonnegative, the linearization variable of a pair is the
// product of the two choice variables at the optimum, so the program reduces
// to quadratic pseudo-boolean minimization over nonempty subsets.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hipar/enumeration.hpp"
#include "hipar/pattern.hpp"

namespace hipar {

struct SelectionProblem {
  std::vector<HybridRule> candidates;
  std::vector<double> normalized_error;
  std::vector<double> normalized_support;
  std::vector<double> alpha;
  /// Row-major n x n Jaccard matrix.
  std::vector<double> overlap;
  double sigma = 1.0;
  double omega = 1.0;

  std::size_t size() const { return candidates.size(); }
  double jaccard(std::size_t i, std::size_t j) const { return overlap[i * size() + j]; }
  /// Penalty paid when both i and j are chosen.
  double pair_penalty(std::size_t i, std::size_t j) const {
    return omega * jaccard(i, j) * (alpha[i] + alpha[j]);
  }
};

enum class SolverKind { exact, local_search, top_q };

inline const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::exact: return "exact";
    case SolverKind::local_search: return "local-search";
    case SolverKind::top_q: return "top-q";
  }
  return "?";
}

struct SelectedRule {
  HybridRule rule;
  double normalized_error = 1.0;
  double alpha = 1.0;
};

struct SelectedRuleSet {
  /// Indices into the problem's candidate list, ascending.
  std::vector<std::size_t> chosen_indices;
  std::vector<SelectedRule> chosen;
  /// Always kept for fallback prediction, chosen or not.
  SelectedRule default_rule;
  bool default_chosen = false;
  double objective_value = 0.0;
  SolverKind solver = SolverKind::exact;
  bool proof = false;
};

/// Rule error used for normalization: the error measured on the rule's
/// held-out slice.
inline double rule_error(const HybridRule& r) { return r.fitted.holdout_error; }

inline SelectionProblem build_problem(std::vector<HybridRule> candidates, double sigma,
                                      double omega, const Dataset& d) {
  if (candidates.empty()) throw InputError("rule selection needs at least one candidate");
  if (!(sigma >= 0.0) || !(omega >= 0.0)) throw InputError("support and overlap bias must be >= 0");
  SelectionProblem sp;
  const std::size_t n = candidates.size();
  const double floor = 1e-9 / static_cast<double>(n);
  std::vector<double> err(n);
  double err_sum = 0.0, sup_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = rule_error(candidates[i]);
    if (!std::isfinite(e) || e < 0.0) throw InputError("rule error must be finite and >= 0");
    err[i] = std::max(e, floor);
    err_sum += err[i];
    sup_sum += static_cast<double>(candidates[i].support_abs);
  }
  if (!(sup_sum > 0.0)) throw InputError("candidate supports sum to zero");
  sp.normalized_error.resize(n);
  sp.normalized_support.resize(n);
  sp.alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sp.normalized_error[i] = err[i] / err_sum;
    sp.normalized_support[i] = static_cast<double>(candidates[i].support_abs) / sup_sum;
    sp.alpha[i] = std::pow(sp.normalized_support[i], sigma) / sp.normalized_error[i];
  }
  std::vector<IndexSet> regions;
  regions.reserve(n);
  for (const auto& c : candidates) regions.push_back(region_rows(c.pattern, d));
  sp.overlap.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sp.overlap[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double jac = jaccard_rows(regions[i], regions[j]);
      sp.overlap[i * n + j] = jac;
      sp.overlap[j * n + i] = jac;
    }
  }
  sp.candidates = std::move(candidates);
  sp.sigma = sigma;
  sp.omega = omega;
  return sp;
}

/// Objective of a subset given by ascending indices.
inline double objective(const SelectionProblem& sp, std::span<const std::size_t> chosen) {
  double f = 0.0;
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    f -= sp.alpha[chosen[a]];
    for (std::size_t b = a + 1; b < chosen.size(); ++b)
      f += sp.pair_penalty(chosen[a], chosen[b]);
  }
  return f;
}

namespace detail {

inline double objective_tolerance(double scale) { return 1e-12 * std::max(1.0, std::abs(scale)); }

/// Tie-break between equal-objective subsets: fewer rules, then the
/// lexicographically smaller sequence of canonical keys.
inline bool preferred_on_tie(const SelectionProblem& sp, const std::vector<std::size_t>& a,
                             const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  std::vector<std::string> ka, kb;
  for (auto i : a) ka.push_back(sp.candidates[i].pattern.key());
  for (auto i : b) kb.push_back(sp.candidates[i].pattern.key());
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  return ka < kb;
}

struct Incumbent {
  std::vector<std::size_t> set;
  double value = std::numeric_limits<double>::infinity();

  void offer(const SelectionProblem& sp, std::vector<std::size_t> candidate, double value_in) {
    if (candidate.empty()) return;
    std::sort(candidate.begin(), candidate.end());
    const double tol = objective_tolerance(value);
    if (set.empty() || value_in < value - tol ||
        (std::abs(value_in - value) <= tol && preferred_on_tie(sp, candidate, set))) {
      set = std::move(candidate);
      value = value_in;
    }
  }
};

class BranchAndBound {
 public:
  explicit BranchAndBound(const SelectionProblem& sp) : sp_(sp), n_(sp.size()) {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return sp.alpha[a] > sp.alpha[b]; });
    // Penalty accumulated from chosen variables, per variable.
    load_.assign(n_, 0.0);
  }

  Incumbent solve() {
    // Greedy warm start.
    std::vector<std::size_t> greedy;
    for (auto i : order_) {
      double delta = -sp_.alpha[i];
      for (auto j : greedy) delta += sp_.pair_penalty(i, j);
      if (greedy.empty() || delta < 0.0) greedy.push_back(i);
    }
    best_.offer(sp_, greedy, objective(sp_, sorted(greedy)));
    recurse(0, 0.0);
    return best_;
  }

 private:
  static std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  }

  void recurse(std::size_t depth, double value) {
    if (depth == n_) {
      if (!chosen_.empty()) best_.offer(sp_, chosen_, objective(sp_, sorted(chosen_)));
      return;
    }
    // Lower bound: every undecided variable contributes at best its utility
    // net of the penalty it already owes to chosen ones, if negative.
    double bound = value;
    for (std::size_t k = depth; k < n_; ++k) {
      const auto i = order_[k];
      bound += std::min(0.0, -sp_.alpha[i] + load_[i]);
    }
    if (!best_.set.empty() && bound > best_.value + objective_tolerance(best_.value)) return;

    const auto i = order_[depth];
    const double delta = -sp_.alpha[i] + load_[i];
    chosen_.push_back(i);
    for (std::size_t k = depth + 1; k < n_; ++k) load_[order_[k]] += sp_.pair_penalty(i, order_[k]);
    recurse(depth + 1, value + delta);
    for (std::size_t k = depth + 1; k < n_; ++k) load_[order_[k]] -= sp_.pair_penalty(i, order_[k]);
    chosen_.pop_back();

    recurse(depth + 1, value);
  }

  const SelectionProblem& sp_;
  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<double> load_;
  std::vector<std::size_t> chosen_;
  Incumbent best_;
};

/// Steepest descent over single-bit flips, never emptying the set.
inline std::vector<std::size_t> local_descent(const SelectionProblem& sp, std::vector<bool> z) {
  const std::size_t n = sp.size();
  auto count = static_cast<std::size_t>(std::count(z.begin(), z.end(), true));
  for (;;) {
    double best_delta = 0.0;
    std::size_t best_i = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i] && count == 1) continue;
      double pen = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && z[j]) pen += sp.pair_penalty(i, j);
      const double gain = -sp.alpha[i] + pen;  // change when adding i
      const double delta = z[i] ? -gain : gain;
      if (delta < best_delta - 1e-15) {
        best_delta = delta;
        best_i = i;
      }
    }
    if (best_i == n) break;
    count += z[best_i] ? std::size_t(-1) : 1;
    z[best_i] = !z[best_i];
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (z[i]) out.push_back(i);
  return out;
}

}  // namespace detail

struct SolveOptions {
  /// Largest instance solved exactly.
  std::size_t exact_limit = 25;
  std::size_t restarts = 16;
  Seed seed = 0;
};

inline SelectedRuleSet make_selection(const SelectionProblem& sp, std::vector<std::size_t> chosen,
                                      SolverKind solver, bool proof) {
  std::sort(chosen.begin(), chosen.end());
  if (chosen.empty()) throw InvariantError("rule selection returned an empty set");
  SelectedRuleSet out;
  out.chosen_indices = chosen;
  out.objective_value = objective(sp, chosen);
  out.solver = solver;
  out.proof = proof;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    SelectedRule r{sp.candidates[i], sp.normalized_error[i], sp.alpha[i]};
    const bool picked = std::binary_search(chosen.begin(), chosen.end(), i);
    if (r.rule.is_default) {
      out.default_rule = r;
      out.default_chosen = picked;
    }
    if (picked) out.chosen.push_back(std::move(r));
  }
  return out;
}

inline SelectedRuleSet solve(const SelectionProblem& sp, const SolveOptions& opts = {}) {
  const std::size_t n = sp.size();
  if (n == 0) throw InputError("empty selection problem");
  if (n <= opts.exact_limit) {
    auto best = detail::BranchAndBound(sp).solve();
    return make_selection(sp, best.set, SolverKind::exact, true);
  }
  detail::Incumbent best;
  auto offer = [&](std::vector<bool> start) {
    auto set = detail::local_descent(sp, std::move(start));
    best.offer(sp, set, objective(sp, set));
  };
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sp.alpha[a] > sp.alpha[b]; });
    std::vector<bool> z(n, false);
    std::vector<std::size_t> taken;
    for (auto i : order) {
      double delta = -sp.alpha[i];
      for (auto j : taken) delta += sp.pair_penalty(i, j);
      if (taken.empty() || delta < 0.0) {
        taken.push_back(i);
        z[i] = true;
      }
    }
    offer(z);
  }
  std::mt19937_64 rng(opts.seed);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    std::vector<bool> z(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any |= (z[i] = coin(rng));
    if (!any) z[rng() % n] = true;
    offer(z);
  }
  return make_selection(sp, best.set, SolverKind::local_search, false);
}

/// The q candidates with the largest utility; ties by canonical key.
inline SelectedRuleSet select_top_q(const SelectionProblem& sp, std::size_t q) {
  const std::size_t n = sp.size();
  if (q < 1 || q > n)
    throw InputError("q = " + std::to_string(q) + " out of range [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sp.alpha[a] != sp.alpha[b]) return sp.alpha[a] > sp.alpha[b];
    return sp.candidates[a].pattern.key() < sp.candidates[b].pattern.key();
  });
  order.resize(q);
  return make_selection(sp, std::move(order), SolverKind::top_q, false);
}

}  // namespace hipar
