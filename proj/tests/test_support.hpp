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

// Shared fixtures: the real-estate toy table and the synthetic generators.

#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hipar/hipar.hpp"

namespace hipar::testing {

inline const char* kTable1Csv =
    "property-type,state,rooms,surface,price\n"
    "cottage,very good,5,120,510\n"
    "cottage,very good,3,55,410\n"
    "cottage,excellent,3,50,350\n"
    "apartment,excellent,5,85,320\n"
    "apartment,good,4,52,140\n"
    "apartment,good,3,45,125\n";

inline Dataset table1() {
  std::istringstream in(kTable1Csv);
  return load_csv(in, LoadOptions{"price", {}, {}});
}

/// Two segments keyed by a categorical switch: y = 1 + 2x on A and
/// y = 10 - 3x on B, x uniform on [0,10], Gaussian noise with standard
/// deviation noise_fraction * (range of the noiseless target).
inline Dataset two_segment(std::size_t n = 200, Seed seed = 7, double noise_fraction = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 10.0);
  std::vector<std::string> s;
  std::vector<double> x, clean;
  for (std::size_t i = 0; i < n; ++i) {
    const bool a = rng() % 2 == 0;
    const double xi = ux(rng);
    s.push_back(a ? "A" : "B");
    x.push_back(xi);
    clean.push_back(a ? 1.0 + 2.0 * xi : 10.0 - 3.0 * xi);
  }
  const auto [lo, hi] = std::minmax_element(clean.begin(), clean.end());
  std::normal_distribution<double> noise(0.0, noise_fraction * (*hi - *lo));
  std::vector<double> y;
  for (double c : clean) y.push_back(c + noise(rng));
  return DatasetBuilder().categorical("s", s).numeric("x", x).numeric("y", y).target("y").build();
}

/// Random categorical-only dataset with a noisy numerical target.
inline Dataset random_categorical(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                  std::size_t max_values = 3) {
  DatasetBuilder b;
  std::vector<double> y(rows);
  for (auto& v : y) v = std::uniform_real_distribution<double>(0.0, 100.0)(rng);
  for (std::size_t c = 0; c < cols; ++c) {
    const std::size_t k = 2 + rng() % (max_values - 1);
    std::vector<std::string> col;
    for (std::size_t r = 0; r < rows; ++r) col.push_back("v" + std::to_string(rng() % k));
    b.categorical("c" + std::to_string(c), col);
  }
  return b.numeric("y", y).target("y").build();
}

}  // namespace hipar::testing
