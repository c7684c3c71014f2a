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

// Column-typed tabular data with a designated numerical target, plus the
// CSV reader/writer and the fold / hold-out partitioning helpers used by the
// rest of the library.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hipar/errors.hpp"

namespace hipar {

using Seed = std::uint64_t;
using IndexSet = std::vector<std::size_t>;

enum class AttributeKind { categorical, numerical };
enum class AttributeRole { feature, target };

struct AttributeSchema {
  std::string name;
  AttributeKind kind = AttributeKind::numerical;
  AttributeRole role = AttributeRole::feature;

  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

inline const char* to_string(AttributeKind kind) {
  return kind == AttributeKind::categorical ? "categorical" : "numerical";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

/// Parses a finite real in C-locale decimal-point format. The whole cell
/// (modulo surrounding blanks) must be consumed.
inline std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

/// Shortest representation that parses back to the same double.
inline std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

/// A raw CSV table: header plus rows of string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool any_char = false;
  std::size_t line = 1;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    if (table.header.empty()) {
      table.header = std::move(record);
    } else if (!(record.size() == 1 && record[0].empty())) {
      table.rows.push_back(std::move(record));
    }
    record.clear();
  };

  char ch;
  while (in.get(ch)) {
    any_char = true;
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty())
          throw InputError("csv: stray quote on line " + std::to_string(line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        if (in.peek() == '\n') in.get(ch);
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw InputError("csv: unterminated quoted field");
  if (any_char && (field_started || !field.empty() || !record.empty())) end_record();
  return table;
}

inline void write_csv_field(std::ostream& out, std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                      (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

/// Immutable column store. Numerical columns hold doubles; categorical
/// columns hold codes into a per-column symbol dictionary.
class Dataset {
 public:
  Dataset() = default;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return schema_.size(); }
  const std::vector<AttributeSchema>& schema() const { return schema_; }
  const AttributeSchema& attribute(std::size_t col) const { return schema_.at(col); }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t c = 0; c < schema_.size(); ++c)
      if (schema_[c].name == name) return c;
    return std::nullopt;
  }

  std::size_t require_column(std::string_view name) const {
    auto c = column_index(name);
    if (!c) throw InputError("unknown column '" + std::string(name) + "'");
    return *c;
  }

  bool has_target() const { return target_.has_value(); }
  std::size_t target_index() const {
    if (!target_) throw InputError("dataset has no target column");
    return *target_;
  }
  const std::string& target_name() const { return schema_[target_index()].name; }

  std::span<const double> numeric_column(std::size_t col) const {
    if (schema_.at(col).kind != AttributeKind::numerical)
      throw InputError("column '" + schema_[col].name + "' is not numerical");
    return numeric_[col];
  }
  std::span<const double> target_values() const { return numeric_column(target_index()); }

  double number(std::size_t row, std::size_t col) const { return numeric_column(col)[row]; }

  std::span<const std::int32_t> codes(std::size_t col) const {
    if (schema_.at(col).kind != AttributeKind::categorical)
      throw InputError("column '" + schema_[col].name + "' is not categorical");
    return codes_[col];
  }
  const std::vector<std::string>& symbols(std::size_t col) const { return symbols_.at(col); }
  const std::string& symbol(std::size_t row, std::size_t col) const {
    return symbols_[col][static_cast<std::size_t>(codes(col)[row])];
  }
  /// Code for `value` in a categorical column, or -1 when the symbol never occurs.
  std::int32_t code_of(std::size_t col, std::string_view value) const {
    const auto& dict = symbols_.at(col);
    auto it = std::find(dict.begin(), dict.end(), value);
    return it == dict.end() ? -1 : static_cast<std::int32_t>(it - dict.begin());
  }

  /// Numerical feature columns, i.e. the regressors of every local model.
  std::vector<std::size_t> numeric_features() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < schema_.size(); ++c)
      if (schema_[c].kind == AttributeKind::numerical && schema_[c].role == AttributeRole::feature)
        out.push_back(c);
    return out;
  }
  std::vector<std::size_t> categorical_features() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < schema_.size(); ++c)
      if (schema_[c].kind == AttributeKind::categorical) out.push_back(c);
    return out;
  }
  std::vector<AttributeSchema> feature_schema() const {
    std::vector<AttributeSchema> out;
    for (const auto& a : schema_)
      if (a.role == AttributeRole::feature) out.push_back(a);
    return out;
  }

  /// Cell rendered as text; numbers use the shortest round-trip form.
  std::string cell_text(std::size_t row, std::size_t col) const {
    if (schema_.at(col).kind == AttributeKind::numerical)
      return detail::format_real(numeric_[col][row]);
    return symbol(row, col);
  }

  /// Copy of the given rows, in the given order. Dictionaries are shared
  /// so codes stay comparable with the parent dataset.
  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.schema_ = schema_;
    out.target_ = target_;
    out.symbols_ = symbols_;
    out.rows_ = rows.size();
    out.numeric_.resize(cols());
    out.codes_.resize(cols());
    for (std::size_t c = 0; c < cols(); ++c) {
      if (schema_[c].kind == AttributeKind::numerical) {
        out.numeric_[c].reserve(rows.size());
        for (auto r : rows) out.numeric_[c].push_back(numeric_[c].at(r));
      } else {
        out.codes_[c].reserve(rows.size());
        for (auto r : rows) out.codes_[c].push_back(codes_[c].at(r));
      }
    }
    return out;
  }

  IndexSet all_rows() const {
    IndexSet r(rows_);
    std::iota(r.begin(), r.end(), std::size_t{0});
    return r;
  }

  void write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < cols(); ++c) {
      if (c) out << ',';
      write_csv_field(out, schema_[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols(); ++c) {
        if (c) out << ',';
        write_csv_field(out, cell_text(r, c));
      }
      out << '\n';
    }
  }

 private:
  friend class DatasetBuilder;

  std::vector<AttributeSchema> schema_;
  std::vector<std::vector<double>> numeric_;
  std::vector<std::vector<std::int32_t>> codes_;
  std::vector<std::vector<std::string>> symbols_;
  std::optional<std::size_t> target_;
  std::size_t rows_ = 0;
};

/// Column-wise construction of a Dataset, mostly for tests and generators.
class DatasetBuilder {
 public:
  DatasetBuilder& numeric(std::string name, std::vector<double> values) {
    for (double v : values)
      if (!std::isfinite(v)) throw InputError("column '" + name + "' has a non-finite value");
    add_schema(std::move(name), AttributeKind::numerical);
    d_.numeric_.push_back(std::move(values));
    d_.codes_.emplace_back();
    d_.symbols_.emplace_back();
    return *this;
  }

  DatasetBuilder& categorical(std::string name, const std::vector<std::string>& values) {
    add_schema(std::move(name), AttributeKind::categorical);
    std::vector<std::string> dict;
    std::unordered_map<std::string, std::int32_t> lookup;
    std::vector<std::int32_t> codes;
    codes.reserve(values.size());
    for (const auto& v : values) {
      auto [it, inserted] = lookup.emplace(v, static_cast<std::int32_t>(dict.size()));
      if (inserted) dict.push_back(v);
      codes.push_back(it->second);
    }
    d_.numeric_.emplace_back();
    d_.codes_.push_back(std::move(codes));
    d_.symbols_.push_back(std::move(dict));
    return *this;
  }

  DatasetBuilder& target(std::string name) {
    target_ = std::move(name);
    return *this;
  }

  /// Validates the column set. With `require_target` the dataset must carry a
  /// numerical target and at least one feature.
  Dataset build(bool require_target = true) {
    Dataset d = std::move(d_);
    d_ = Dataset{};
    if (d.schema_.empty()) throw InputError("dataset has no columns");
    std::size_t n = 0;
    for (std::size_t c = 0; c < d.schema_.size(); ++c) {
      std::size_t len = d.schema_[c].kind == AttributeKind::numerical ? d.numeric_[c].size()
                                                                      : d.codes_[c].size();
      if (c == 0) n = len;
      if (len != n) throw InputError("column '" + d.schema_[c].name + "' has a different length");
    }
    if (n == 0) throw InputError("empty table");
    d.rows_ = n;
    if (target_) {
      auto t = d.column_index(*target_);
      if (!t) throw InputError("target column '" + *target_ + "' not found");
      if (d.schema_[*t].kind != AttributeKind::numerical)
        throw InputError("target column '" + *target_ + "' is not numerical");
      d.schema_[*t].role = AttributeRole::target;
      d.target_ = *t;
    } else if (require_target) {
      throw InputError("no target column given");
    }
    if (require_target && d.cols() < 2) throw InputError("no features remain besides the target");
    target_.reset();
    return d;
  }

 private:
  void add_schema(std::string name, AttributeKind kind) {
    for (const auto& a : d_.schema_)
      if (a.name == name) throw InputError("duplicate column name '" + name + "'");
    d_.schema_.push_back({std::move(name), kind, AttributeRole::feature});
  }

  Dataset d_;
  std::optional<std::string> target_;
};

struct LoadOptions {
  /// Empty: no target (feature-only input, e.g. for batch prediction).
  std::string target;
  std::set<std::string, std::less<>> categorical_overrides;
  /// Forced kinds by column name; numerical ones must parse.
  std::vector<AttributeSchema> forced_kinds;
};

/// Types a raw table. A column is numerical iff every cell parses as a
/// finite real, unless overridden. Rows with an empty cell are rejected.
inline Dataset dataset_from_table(const CsvTable& table, const LoadOptions& opts) {
  if (table.header.empty()) throw InputError("csv: missing header row");
  if (table.rows.empty()) throw InputError("empty table");
  const std::size_t ncols = table.header.size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != ncols)
      throw InputError("csv: row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                       " cells, expected " + std::to_string(ncols));
    for (std::size_t c = 0; c < ncols; ++c)
      if (detail::trim(row[c]).empty())
        throw InputError("csv: row " + std::to_string(r + 1) + " has a missing value in column '" +
                         table.header[c] + "'");
  }
  for (const auto& name : opts.categorical_overrides)
    if (std::find(table.header.begin(), table.header.end(), name) == table.header.end())
      throw InputError("categorical override names unknown column '" + name + "'");
  if (!opts.target.empty() &&
      std::find(table.header.begin(), table.header.end(), opts.target) == table.header.end())
    throw InputError("target column '" + opts.target + "' not found");

  DatasetBuilder builder;
  for (std::size_t c = 0; c < ncols; ++c) {
    const std::string& name = table.header[c];
    std::optional<AttributeKind> forced;
    for (const auto& f : opts.forced_kinds)
      if (f.name == name) forced = f.kind;
    if (opts.categorical_overrides.count(name)) forced = AttributeKind::categorical;

    std::vector<double> values;
    bool numeric = forced != AttributeKind::categorical;
    if (numeric) {
      values.reserve(table.rows.size());
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        auto v = detail::parse_real(table.rows[r][c]);
        if (!v) {
          if (forced == AttributeKind::numerical)
            throw InputError("csv: row " + std::to_string(r + 1) + ", column '" + name +
                             "': expected a finite number, got '" + table.rows[r][c] + "'");
          numeric = false;
          break;
        }
        values.push_back(*v);
      }
    }
    if (numeric) {
      builder.numeric(name, std::move(values));
    } else {
      std::vector<std::string> cells;
      cells.reserve(table.rows.size());
      for (const auto& row : table.rows) cells.push_back(row[c]);
      builder.categorical(name, cells);
    }
  }
  if (!opts.target.empty()) builder.target(opts.target);
  return builder.build(!opts.target.empty());
}

inline Dataset load_csv(std::istream& in, const LoadOptions& opts) {
  return dataset_from_table(read_csv(in), opts);
}

inline Dataset load_csv(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return load_csv(in, opts);
}

inline Dataset load_csv(const std::string& path, const std::string& target,
                        std::set<std::string, std::less<>> categorical_overrides = {}) {
  return load_csv(path, LoadOptions{target, std::move(categorical_overrides), {}});
}

struct FoldPlan {
  std::size_t k = 0;
  Seed seed = 0;
  std::vector<std::size_t> assignments;

  IndexSet test_rows(std::size_t fold) const {
    IndexSet out;
    for (std::size_t r = 0; r < assignments.size(); ++r)
      if (assignments[r] == fold) out.push_back(r);
    return out;
  }
  IndexSet train_rows(std::size_t fold) const {
    IndexSet out;
    for (std::size_t r = 0; r < assignments.size(); ++r)
      if (assignments[r] != fold) out.push_back(r);
    return out;
  }
};

/// Seeded shuffle, then round-robin dealing. No stratification.
inline FoldPlan k_folds(std::size_t n, std::size_t k, Seed seed) {
  if (k < 2 || k > n)
    throw InputError("fold count " + std::to_string(k) + " out of range [2, " + std::to_string(n) +
                     "]");
  IndexSet perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  FoldPlan plan{k, seed, std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) plan.assignments[perm[i]] = i % k;
  return plan;
}

inline FoldPlan k_folds(const Dataset& d, std::size_t k, Seed seed) {
  return k_folds(d.rows(), k, seed);
}

struct HoldoutSplit {
  IndexSet train;
  IndexSet test;
};

/// |test| = max(1, round(fraction * |rows|)), never the whole input.
inline HoldoutSplit holdout_split(std::span<const std::size_t> rows, double fraction, Seed seed) {
  if (rows.size() < 2) throw InputError("holdout split needs at least 2 rows");
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("holdout fraction must lie in (0,1)");
  auto test_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size()))));
  test_size = std::min(test_size, rows.size() - 1);
  IndexSet shuffled(rows.begin(), rows.end());
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  HoldoutSplit split;
  split.test.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(test_size));
  split.train.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(test_size), shuffled.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

}  // namespace hipar
