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

// hipar fit | eval | predict
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>

#include "hipar/hipar.hpp"

namespace {

struct Options {
  hipar::RunConfig run;
  std::vector<std::string> categorical;
  std::string metric = "rmse";
  std::string variant = "standard";
  std::string trace_path;
  std::string rules_in;
  std::string predict_out;
};

void add_fit_flags(CLI::App* app, Options& o, bool rules_required) {
  app->add_option("--input", o.run.input, "CSV file with a header row")->required();
  app->add_option("--target", o.run.target, "numerical target column")->required();
  app->add_option("--categorical", o.categorical, "columns forced categorical")->delimiter(',');
  app->add_option("--min-support", o.run.theta, "relative support threshold")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--support-bias", o.run.sigma, "support bias")->check(CLI::NonNegativeNumber);
  app->add_option("--overlap-bias", o.run.omega, "overlap bias")->check(CLI::NonNegativeNumber);
  app->add_option("--metric", o.metric, "rmse or meae")
      ->check(CLI::IsMember({"rmse", "meae"}));
  app->add_option("--variant", o.variant, "standard, f or sd")
      ->check(CLI::IsMember({"standard", "f", "sd"}));
  app->add_option("--sd-q", o.run.sd_q, "rules kept by the sd variant (0: automatic)");
  app->add_option("--seed", o.run.seed, "random seed");
  app->add_option("--iv-percentile", o.run.iv_percentile, "interclass variance pruning percentile")
      ->check(CLI::Range(0.0, 100.0));
  app->add_option("--trace", o.trace_path, "write one line per visited enumeration node");
  auto* rules = app->add_option("--rules-out", o.run.rules_out, "rule file to write");
  if (rules_required) rules->required();
}

hipar::Dataset load_training(const Options& o) {
  hipar::LoadOptions lo;
  lo.target = o.run.target;
  lo.categorical_overrides.insert(o.categorical.begin(), o.categorical.end());
  return hipar::load_csv(o.run.input, lo);
}

void finalize(Options& o) {
  o.run.metric = hipar::parse_metric(o.metric);
  o.run.variant = hipar::parse_variant(o.variant);
  o.run.categorical.insert(o.categorical.begin(), o.categorical.end());
}

int run_fit(Options& o, std::ostream* trace) {
  finalize(o);
  o.run.trace = trace;
  const auto d = load_training(o);
  const auto model = hipar::run_hipar(d, o.run);
  hipar::serialize_rules(model.predictor, o.run.rules_out);
  std::cout << "candidates " << model.candidates.rules.size() << ", selected "
            << model.selected.chosen.size() << " rules, "
            << hipar::count_elements(model.selected) << " elements\n";
  return 0;
}

int run_eval(Options& o, std::ostream* trace) {
  finalize(o);
  const auto d = load_training(o);
  const auto report = hipar::cross_validate(d, o.run);
  const auto text = hipar::report_to_json(report).dump(2);
  if (o.run.report_out.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(o.run.report_out, std::ios::binary);
    if (!out) throw hipar::InputError("cannot write '" + o.run.report_out + "'");
    out << text << '\n';
  }
  for (const auto& f : report.per_fold)
    if (f.skipped) std::cerr << "warning: fold " << f.fold << ": " << f.warning << '\n';
  if (!o.run.rules_out.empty()) {
    o.run.trace = trace;
    hipar::serialize_rules(hipar::run_hipar(d, o.run).predictor, o.run.rules_out);
  }
  std::cerr << "mean rmse reduction " << report.mean_rmse_reduction << "%, median meae reduction "
            << report.median_meae_reduction << "%\n";
  return 0;
}

int run_predict(const Options& o) {
  const auto pred = hipar::load_rules(o.rules_in);
  hipar::LoadOptions lo;
  lo.forced_kinds = pred.features;
  const auto d = hipar::load_csv(o.run.input, lo);
  const auto values = hipar::predict_batch(pred, d);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!o.predict_out.empty() && o.predict_out != "-") {
    file.open(o.predict_out, std::ios::binary);
    if (!file) throw hipar::InputError("cannot write '" + o.predict_out + "'");
    out = &file;
  }
  for (double v : values) *out << hipar::detail::format_real(v) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid rule mining for interpretable regression"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "mine and select hybrid rules, write a rule file");
  add_fit_flags(fit, o, true);

  auto* eval = app.add_subcommand("eval", "k-fold cross-validation against a global OLS baseline");
  add_fit_flags(eval, o, false);
  eval->add_option("--folds", o.run.folds, "number of folds")->check(CLI::Range(2, 1000000));
  eval->add_option("--report-out", o.run.report_out, "JSON report path (stdout if omitted)");

  auto* predict = app.add_subcommand("predict", "predict with a rule file");
  predict->add_option("--rules", o.rules_in, "rule file")->required();
  predict->add_option("--input", o.run.input, "feature CSV")->required();
  predict->add_option("--out", o.predict_out, "output path, one prediction per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    std::unique_ptr<std::ofstream> trace;
    if (!o.trace_path.empty()) {
      trace = std::make_unique<std::ofstream>(o.trace_path, std::ios::binary);
      if (!*trace) throw hipar::InputError("cannot write '" + o.trace_path + "'");
    }
    if (*fit) return run_fit(o, trace.get());
    if (*eval) return run_eval(o, trace.get());
    return run_predict(o);
  } catch (const hipar::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
