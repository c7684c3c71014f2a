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

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace hipar {
namespace {

Condition surface_upto_60() { return Condition::interval("surface", -kInf, 60.0, false, true); }

std::vector<Condition> categorical_universe(const Dataset& d) {
  std::vector<Condition> u;
  for (auto c : d.categorical_features())
    for (const auto& s : d.symbols(c)) u.push_back(Condition::equals(d.attribute(c).name, s));
  return u;
}

TEST(Condition, MatchesRows) {
  auto d = testing::table1();
  EXPECT_TRUE(matches(Condition::equals("property-type", "cottage"), d, 0));
  EXPECT_FALSE(matches(surface_upto_60(), d, 0));
  EXPECT_TRUE(matches(surface_upto_60(), d, 1));
}

TEST(Condition, BoundOpenness) {
  auto half = Condition::between("a", 1.0, 2.0);
  EXPECT_TRUE(half.matches(Cell{1.0}));
  EXPECT_FALSE(half.matches(Cell{2.0}));
  auto closed = Condition::interval("a", 1.0, 2.0, true, true);
  EXPECT_TRUE(closed.matches(Cell{2.0}));
  EXPECT_FALSE(Condition::below("a", 5.0).matches(Cell{5.0}));
  EXPECT_TRUE(Condition::at_least("a", 5.0).matches(Cell{5.0}));
  EXPECT_THROW(half.matches(Cell{std::string("x")}), InputError);
  EXPECT_THROW(Condition::interval("a", 2.0, 1.0, true, false), InputError);
}

TEST(Condition, Rendering) {
  EXPECT_EQ(Condition::equals("state", "good").render(), "state=\"good\"");
  EXPECT_EQ(Condition::below("surface", 60).render(), "surface in (-inf,60)");
  EXPECT_EQ(Condition::between("rooms", 3, 4.5).render(), "rooms in [3,4.5]");
  EXPECT_EQ(Condition::at_least("rooms", 4.5).render(), "rooms in (4.5,inf)");
  EXPECT_EQ(Condition::between("rooms", 3, 4.5).predicate_key(), " in [3,4.5)");
}

TEST(Pattern, CanonicalAndRendered) {
  Pattern p({Condition::equals("state", "good"), Condition::equals("property-type", "apartment")});
  EXPECT_EQ(p.render(), "property-type=\"apartment\" & state=\"good\"");
  EXPECT_EQ(Pattern{}.render(), "TRUE");
  Pattern q({Condition::equals("property-type", "apartment"), Condition::equals("state", "good")});
  EXPECT_EQ(p.key(), q.key());
  EXPECT_THROW(Pattern({Condition::equals("a", "x"), Condition::equals("a", "y")}), InputError);
}

TEST(Support, Table1) {
  auto d = testing::table1();
  Pattern p({Condition::equals("property-type", "cottage"), surface_upto_60()});
  auto s = support(p, d);
  EXPECT_EQ(s.absolute, 2u);
  EXPECT_DOUBLE_EQ(s.relative, 2.0 / 6.0);
  EXPECT_EQ(support(Pattern{}, d).absolute, 6u);
  EXPECT_DOUBLE_EQ(support(Pattern{}, d).relative, 1.0);
  auto apt = support(Pattern({Condition::equals("property-type", "apartment")}), d);
  EXPECT_EQ(apt.absolute, 3u);
  EXPECT_DOUBLE_EQ(apt.relative, 0.5);
}

TEST(Closure, Table1) {
  auto d = testing::table1();
  auto u = categorical_universe(d);
  Pattern good({Condition::equals("state", "good")});
  auto cl = closure(good, d, u);
  Pattern expected({Condition::equals("state", "good"), Condition::equals("property-type", "apartment")});
  EXPECT_EQ(cl, expected);
  EXPECT_EQ(closure(cl, d, u), cl);
  Pattern empty({Condition::equals("property-type", "cottage"), Condition::equals("state", "good")});
  EXPECT_THROW(closure(empty, d, u), InputError);
}

TEST(Closure, IdempotentOnRandomData) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    auto d = testing::random_categorical(rng, 40, 5);
    auto u = categorical_universe(d);
    for (const auto& c : u) {
      Pattern p({c});
      if (region_rows(p, d).empty()) continue;
      auto cl = closure(p, d, u);
      EXPECT_EQ(closure(cl, d, u), cl);
      EXPECT_EQ(region_rows(cl, d), region_rows(p, d));
    }
  }
}

TEST(InterclassVariance, Table1) {
  auto d = testing::table1();
  // mean 1855/6, region {140,125}, complement {510,410,350,320}
  const double mu = 1855.0 / 6.0;
  const double expected = 2 * (mu - 132.5) * (mu - 132.5) + 4 * (mu - 397.5) * (mu - 397.5);
  const double iv = interclass_variance(Pattern({Condition::equals("state", "good")}), d);
  EXPECT_NEAR(iv, expected, 1e-9);
  EXPECT_NEAR(iv, 93633.33, 0.01);
  EXPECT_EQ(interclass_variance(Pattern{}, d), 0.0);
}

TEST(InterclassVariance, SymmetricMeansGiveZero) {
  auto d = DatasetBuilder()
               .categorical("g", {"a", "b", "a", "b"})
               .numeric("y", {1.0, 1.0, 3.0, 3.0})
               .target("y")
               .build();
  EXPECT_NEAR(interclass_variance(Pattern({Condition::equals("g", "a")}), d), 0.0, 1e-12);
}

TEST(Jaccard, Table1) {
  auto d = testing::table1();
  Pattern cottage({Condition::equals("property-type", "cottage")});
  Pattern very_good({Condition::equals("state", "very good")});
  Pattern apt({Condition::equals("property-type", "apartment")});
  EXPECT_DOUBLE_EQ(jaccard(cottage, very_good, d), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(jaccard(cottage, apt, d), 0.0);
  EXPECT_DOUBLE_EQ(jaccard(apt, apt, d), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(cottage, very_good, d), jaccard(very_good, cottage, d));
}

TEST(Pattern, ObservationMatching) {
  Pattern p({Condition::equals("s", "A"), Condition::at_least("x", 2.0)});
  Observation x{{"s", std::string("A")}, {"x", 2.0}};
  EXPECT_TRUE(p.matches(x));
  x["x"] = 1.0;
  EXPECT_FALSE(p.matches(x));
  Observation missing{{"s", std::string("A")}};
  EXPECT_THROW(p.matches(missing), InputError);
}

}  // namespace
}  // namespace hipar
