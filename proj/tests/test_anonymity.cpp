#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "synthaudit/anonymity.hpp"
#include "synthaudit/rng.hpp"

using namespace synthaudit;
using namespace synthaudit::testing;

namespace {

Dataset two_cat(std::vector<std::pair<std::string, std::string>> rows) {
  std::vector<std::vector<Value>> vals;
  for (auto& [a, b] : rows) vals.push_back({a, b});
  return make_dataset({cat_attr("sex", {"F", "M"}), cat_attr("country", {"DE", "NL"})},
                      std::move(vals));
}

bool value_eq(const Value& a, const Value& b) {
  return !value_less(a, b) && !value_less(b, a);
}

// Hash-free double loop: for each row, count rows agreeing on every QI value.
size_t k_anonymity_oracle(const Dataset& d, const std::vector<std::string>& qi) {
  std::vector<size_t> idx;
  for (const auto& n : qi) idx.push_back(d.schema().require_attribute(n));
  size_t k = d.size();
  for (size_t i = 0; i < d.size(); ++i) {
    size_t count = 0;
    for (size_t j = 0; j < d.size(); ++j) {
      bool same = true;
      for (size_t a : idx) {
        if (!value_eq(d.row(i).values[a], d.row(j).values[a])) {
          same = false;
          break;
        }
      }
      if (same) ++count;
    }
    k = std::min(k, count);
  }
  return k;
}

Dataset density_seeds(const std::vector<double>& densities) {
  std::vector<std::vector<Value>> rows;
  for (double v : densities) rows.push_back({v});
  return make_dataset({num_attr("density")}, std::move(rows), "seeds");
}

DensityOracle seed_value_density() {
  return [](const Record& seed, const Record&) { return std::get<double>(seed.values[0]); };
}

// Exhaustive reference: some k-subset containing the true seed has
// max/min density ratio <= gamma.
bool pd_oracle(const std::vector<double>& dens, size_t true_seed, const PdParams& params) {
  size_t n = dens.size();
  std::vector<size_t> others;
  for (size_t i = 0; i < n; ++i)
    if (i != true_seed) others.push_back(i);
  size_t need = params.k - 1;
  std::vector<size_t> comb(need);
  for (size_t i = 0; i < need; ++i) comb[i] = i;
  auto feasible = [&] {
    double lo = dens[true_seed], hi = dens[true_seed];
    for (size_t c : comb) {
      lo = std::min(lo, dens[others[c]]);
      hi = std::max(hi, dens[others[c]]);
    }
    return lo > 0.0 && hi <= params.gamma * lo;
  };
  while (true) {
    if (feasible()) return true;
    size_t i = need;
    bool advanced = false;
    while (i > 0) {
      --i;
      if (comb[i] != i + others.size() - need) {
        ++comb[i];
        for (size_t j = i + 1; j < need; ++j) comb[j] = comb[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return false;
  }
}

}  // namespace

TEST_CASE("equivalence classes group rows by exact key tuples") {
  Dataset d = two_cat({{"F", "NL"}, {"F", "NL"}, {"M", "DE"}});
  auto part = equivalence_classes(d, {"sex", "country"});
  REQUIRE(part.classes.size() == 2);
  std::multiset<size_t> sizes;
  for (const auto& c : part.classes) sizes.insert(c.rows.size());
  CHECK(sizes == std::multiset<size_t>{1, 2});

  std::set<size_t> covered;
  for (const auto& c : part.classes)
    for (size_t r : c.rows) CHECK(covered.insert(r).second);
  CHECK(covered.size() == d.size());
}

TEST_CASE("a constant quasi-identifier puts everything in one class") {
  Dataset d = make_dataset({cat_attr("c", {"only"}), num_attr("x")},
                           {{std::string("only"), 1.0},
                            {std::string("only"), 2.0},
                            {std::string("only"), 3.0}});
  auto part = equivalence_classes(d, {"c"});
  REQUIRE(part.classes.size() == 1);
  CHECK(part.classes[0].rows.size() == 3);
}

TEST_CASE("equivalence class attribute validation") {
  Dataset d = two_cat({{"F", "NL"}});
  CHECK_THROWS_AS(equivalence_classes(d, {}), Error);
  CHECK_THROWS_AS(equivalence_classes(d, {"nope"}), Error);
  CHECK_THROWS_AS(equivalence_classes(d, {"sex", "sex"}), Error);
  try {
    equivalence_classes(d, {});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_attribute);
  }
}

TEST_CASE("missing values form their own key group") {
  Dataset d = make_dataset({cat_attr("c", {"a", "b"})},
                           {{std::string("a")}, {missing()}, {missing()}});
  auto part = equivalence_classes(d, {"c"});
  REQUIRE(part.classes.size() == 2);
  std::multiset<size_t> sizes;
  for (const auto& c : part.classes) sizes.insert(c.rows.size());
  CHECK(sizes == std::multiset<size_t>{1, 2});
}

TEST_CASE("k-anonymity worked examples") {
  Dataset d = two_cat({{"F", "NL"}, {"F", "NL"}, {"M", "DE"}, {"M", "DE"}, {"M", "DE"}});
  CHECK(k_anonymity(d, {"sex", "country"}) == 2);

  Dataset unique = two_cat({{"F", "NL"}, {"F", "DE"}, {"M", "DE"}});
  CHECK(k_anonymity(unique, {"sex", "country"}) == 1);

  Dataset same = two_cat({{"F", "NL"}, {"F", "NL"}, {"F", "NL"}, {"F", "NL"}});
  CHECK(k_anonymity(same, {"sex", "country"}) == 4);
}

TEST_CASE("k-anonymity matches the double-loop oracle on fuzzed data") {
  for (uint64_t seed = 0; seed < 15; ++seed) {
    Dataset d = random_dataset(seed, {80, 1, 3, 3, 0.1});
    for (auto qi : {std::vector<std::string>{"cat0"},
                    std::vector<std::string>{"cat0", "cat1"},
                    std::vector<std::string>{"cat0", "cat1", "cat2"},
                    std::vector<std::string>{"num0", "cat2"}}) {
      CHECK(k_anonymity(d, qi) == k_anonymity_oracle(d, qi));
    }
  }
}

TEST_CASE("k-anonymity never grows when the quasi-identifier set widens") {
  for (uint64_t seed = 20; seed < 30; ++seed) {
    Dataset d = random_dataset(seed, {60, 1, 3, 2, 0.05});
    size_t k1 = k_anonymity(d, {"cat0"});
    size_t k2 = k_anonymity(d, {"cat0", "cat1"});
    size_t k3 = k_anonymity(d, {"cat0", "cat1", "cat2"});
    size_t k4 = k_anonymity(d, {"cat0", "cat1", "cat2", "num0"});
    CHECK(k2 <= k1);
    CHECK(k3 <= k2);
    CHECK(k4 <= k3);
  }
}

TEST_CASE("l-diversity worked examples") {
  auto attrs = std::vector<Attribute>{cat_attr("qi", {"g1", "g2"}),
                                      cat_attr("s", {"a", "b", "c"})};
  Dataset d = make_dataset(attrs, {{std::string("g1"), std::string("a")},
                                   {std::string("g1"), std::string("b")},
                                   {std::string("g1"), std::string("c")},
                                   {std::string("g2"), std::string("a")},
                                   {std::string("g2"), std::string("b")},
                                   {std::string("g2"), std::string("a")}});
  CHECK(l_diversity(d, {"qi"}, "s") == 2);  // g2 sees {a, b}, g1 sees all three

  Dataset constant = make_dataset(attrs, {{std::string("g1"), std::string("a")},
                                          {std::string("g2"), std::string("a")},
                                          {std::string("g2"), std::string("a")}});
  CHECK(l_diversity(constant, {"qi"}, "s") == 1);

  Dataset singletons = make_dataset(attrs, {{std::string("g1"), std::string("a")},
                                            {std::string("g2"), std::string("b")}});
  CHECK(l_diversity(singletons, {"qi"}, "s") == 1);
}

TEST_CASE("l-diversity counts missing as its own sensitive value") {
  auto attrs = std::vector<Attribute>{cat_attr("qi", {"g"}), cat_attr("s", {"a"})};
  Dataset d = make_dataset(attrs, {{std::string("g"), std::string("a")},
                                   {std::string("g"), missing()}});
  CHECK(l_diversity(d, {"qi"}, "s") == 2);
}

TEST_CASE("l-diversity rejects a sensitive quasi-identifier") {
  Dataset d = two_cat({{"F", "NL"}, {"M", "DE"}});
  CHECK_THROWS_AS(l_diversity(d, {"sex", "country"}, "country"), Error);
  CHECK_THROWS_AS(l_diversity(d, {"sex"}, "nope"), Error);
}

TEST_CASE("l-diversity against a brute-force scan") {
  for (uint64_t seed = 40; seed < 50; ++seed) {
    Dataset d = random_dataset(seed, {70, 0, 3, 3, 0.1});
    size_t got = l_diversity(d, {"cat0", "cat1"}, "cat2");
    size_t sens = d.schema().require_attribute("cat2");
    size_t best = d.size();
    for (size_t i = 0; i < d.size(); ++i) {
      std::vector<Value> distinct;
      for (size_t j = 0; j < d.size(); ++j) {
        if (!value_eq(d.row(i).values[0], d.row(j).values[0])) continue;
        if (!value_eq(d.row(i).values[1], d.row(j).values[1])) continue;
        bool seen = false;
        for (const Value& v : distinct) seen = seen || value_eq(v, d.row(j).values[sens]);
        if (!seen) distinct.push_back(d.row(j).values[sens]);
      }
      best = std::min(best, distinct.size());
    }
    CHECK(got == best);
  }
}

TEST_CASE("plausible deniability accepts the documented window") {
  Dataset seeds = density_seeds({1.0, 0.6, 0.55, 0.1});
  PdResult r = pd_check(seed_value_density(), seeds, Record{{0.0}}, 0, {3, 2.0});
  CHECK(r.releasable);
  CHECK(r.witnesses == std::vector<size_t>{0, 1, 2});
}

TEST_CASE("equal densities are releasable for every k and gamma") {
  Dataset seeds = density_seeds({0.3, 0.3, 0.3, 0.3, 0.3, 0.3});
  for (size_t k = 2; k <= 5; ++k) {
    for (double g : {1.1, 2.0, 10.0}) {
      PdResult r = pd_check(seed_value_density(), seeds, Record{{0.0}}, 2, {k, g});
      CHECK(r.releasable);
      CHECK(r.witnesses.size() >= k);
    }
  }
}

TEST_CASE("a lone peak is not releasable") {
  Dataset seeds = density_seeds({1.0, 1e-9, 1e-9});
  PdResult r = pd_check(seed_value_density(), seeds, Record{{0.0}}, 0, {2, 2.0});
  CHECK_FALSE(r.releasable);
  CHECK(r.witnesses.empty());
}

TEST_CASE("duplicate seeds count separately") {
  Dataset seeds = density_seeds({1.0, 1.0, 1e-9});
  PdResult r = pd_check(seed_value_density(), seeds, Record{{0.0}}, 0, {2, 2.0});
  CHECK(r.releasable);
  CHECK(r.witnesses == std::vector<size_t>{0, 1});
}

TEST_CASE("pd_check validates parameters and densities") {
  Dataset seeds = density_seeds({1.0, 0.5, 0.4});
  Record out{{0.0}};
  CHECK_THROWS_AS(pd_check(seed_value_density(), seeds, out, 0, {3, 2.0}), Error);  // n <= k
  CHECK_THROWS_AS(pd_check(seed_value_density(), seeds, out, 0, {1, 2.0}), Error);
  CHECK_THROWS_AS(pd_check(seed_value_density(), seeds, out, 0, {2, 1.0}), Error);
  CHECK_THROWS_AS(pd_check(seed_value_density(), seeds, out, 9, {2, 2.0}), Error);

  Dataset zero = density_seeds({0.0, 0.5, 0.4});
  try {
    pd_check(seed_value_density(), zero, out, 0, {2, 2.0});
    FAIL("expected ZeroDensity");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::zero_density);
  }
}

TEST_CASE("window search agrees with exhaustive subset enumeration") {
  const std::vector<double> pool = {0.05, 0.1, 0.2, 0.4, 0.5, 0.8, 1.0, 1.6, 0.0};
  Rng rng(6021);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    size_t n = 5 + rng.next_below(8);  // 5..12 seeds
    std::vector<double> dens(n);
    for (double& v : dens) v = pool[rng.next_below(pool.size())];
    size_t true_seed = rng.next_below(n);
    if (dens[true_seed] == 0.0) dens[true_seed] = 1.0;
    Dataset seeds = density_seeds(dens);
    for (size_t k = 2; k <= std::min<size_t>(6, n - 1); ++k) {
      for (double g : {1.5, 2.0, 4.0}) {
        PdResult got = pd_check(seed_value_density(), seeds, Record{{0.0}}, true_seed, {k, g});
        bool want = pd_oracle(dens, true_seed, {k, g});
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(g);
        CAPTURE(true_seed);
        REQUIRE(got.releasable == want);
        if (got.releasable) {
          REQUIRE(got.witnesses.size() >= k);
          bool has_true = false;
          double lo = 1e300, hi = 0.0;
          for (size_t w : got.witnesses) {
            has_true = has_true || w == true_seed;
            lo = std::min(lo, dens[w]);
            hi = std::max(hi, dens[w]);
          }
          REQUIRE(has_true);
          REQUIRE(hi <= g * lo * (1.0 + 1e-12));
        }
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("pd_check only sees density ratios") {
  Rng rng(777);
  for (int trial = 0; trial < 40; ++trial) {
    size_t n = 6 + rng.next_below(5);
    std::vector<double> dens(n);
    for (double& v : dens) v = 0.125 * static_cast<double>(1 + rng.next_below(16));
    size_t true_seed = rng.next_below(n);
    PdParams params{2 + rng.next_below(3), 2.0};
    PdResult base = pd_check(seed_value_density(), density_seeds(dens), Record{{0.0}},
                             true_seed, params);
    for (double scale : {0.25, 2.0, 1024.0}) {
      std::vector<double> scaled = dens;
      for (double& v : scaled) v *= scale;
      PdResult s = pd_check(seed_value_density(), density_seeds(scaled), Record{{0.0}},
                            true_seed, params);
      CHECK(s.releasable == base.releasable);
      CHECK(s.witnesses == base.witnesses);
    }
  }
}
