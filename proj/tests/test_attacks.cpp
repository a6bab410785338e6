#include <cmath>
#include <functional>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "synthaudit/attacks.hpp"
#include "synthaudit/generators.hpp"
#include "synthaudit/nn.hpp"
#include "synthaudit/stats.hpp"

using namespace synthaudit;
using namespace synthaudit::testing;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ok;
}

Preprocessor embed(const Dataset& a, const Dataset& b) {
  return Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, a, b);
}

std::string signature(const AttackOutcome& o) {
  std::string s = o.attack_name + ";" + std::to_string(o.n_attempts) + ";" +
                  std::to_string(o.n_successes) + ";";
  for (const auto& a : o.attempts) {
    s += a.guess + "|" + a.truth + "|" + (a.correct ? "1" : "0") + ";";
  }
  return s;
}

Dataset head(const Dataset& d, size_t n, const std::string& label) {
  std::vector<Record> rows(d.rows().begin(), d.rows().begin() + static_cast<long>(n));
  return Dataset(d.schema(), std::move(rows), label);
}

Dataset slice(const Dataset& d, size_t from, size_t to, const std::string& label) {
  std::vector<Record> rows(d.rows().begin() + static_cast<long>(from),
                           d.rows().begin() + static_cast<long>(to));
  return Dataset(d.schema(), std::move(rows), label);
}

Dataset numeric_rows(std::vector<std::vector<double>> vals, const std::string& label = "real") {
  std::vector<std::vector<Value>> rows;
  for (auto& v : vals) {
    std::vector<Value> row;
    for (double x : v) row.emplace_back(x);
    rows.push_back(std::move(row));
  }
  std::vector<Attribute> attrs;
  for (size_t a = 0; a < vals.at(0).size(); ++a) attrs.push_back(num_attr("x" + std::to_string(a)));
  return make_dataset(attrs, std::move(rows), label);
}

}  // namespace

TEST_CASE("threat model and baseline labels") {
  CHECK(std::string(box_name(ThreatModel::Box::no_box)) == "no_box");
  CHECK(std::string(box_name(ThreatModel::Box::black_box)) == "black_box");
  CHECK(std::string(box_name(ThreatModel::Box::white_box)) == "white_box");
  CHECK(std::string(box_name(ThreatModel::Box::uncertain_box)) == "uncertain_box");
  CHECK(std::string(baseline_name(RiskEstimate::Baseline::random)) == "random");
  CHECK(std::string(baseline_name(RiskEstimate::Baseline::control)) == "control");
  CHECK(std::string(baseline_name(RiskEstimate::Baseline::absolute)) == "absolute");
  CHECK(AttackOutcome{}.success_rate() == 0.0);
}

TEST_CASE("rarity is uniform on a uniform dataset") {
  std::vector<std::vector<Value>> rows;
  for (const char* a : {"a0", "a1", "a2", "a3"}) {
    rows.push_back({std::string(a), std::string(a) + "b"});
  }
  Dataset d = make_dataset({cat_attr("p", {"a0", "a1", "a2", "a3"}),
                            cat_attr("q", {"a0b", "a1b", "a2b", "a3b"})},
                           std::move(rows));
  auto scores = rarity_scores(d);
  for (double s : scores) CHECK(s == 4.0);  // 2 attributes, each -log2(2/8)
}

TEST_CASE("numeric rarity bins ten ways and drops for duplicates") {
  std::vector<std::vector<double>> vals;
  for (int i = 0; i < 10; ++i) vals.push_back({static_cast<double>(i)});
  Dataset spread = numeric_rows(vals);
  auto scores = rarity_scores(spread);
  for (double s : scores) CHECK(s == doctest::Approx(std::log2(10.0)).epsilon(1e-12));

  vals.push_back({0.0});
  auto dup_scores = rarity_scores(numeric_rows(vals));
  CHECK(dup_scores[0] == doctest::Approx(-std::log2(3.0 / 21.0)).epsilon(1e-12));
  CHECK(dup_scores[1] == doctest::Approx(-std::log2(2.0 / 21.0)).epsilon(1e-12));
  CHECK(dup_scores[0] < dup_scores[1]);
  CHECK(dup_scores[0] == dup_scores[10]);
}

TEST_CASE("a unique value makes its row the rarest") {
  Dataset d = make_dataset({cat_attr("c", {"common", "rare"})},
                           {{std::string("common")},
                            {std::string("common")},
                            {std::string("common")},
                            {std::string("rare")}});
  auto scores = rarity_scores(d);
  for (size_t i = 0; i < 3; ++i) CHECK(scores[3] > scores[i]);
  CHECK(code_of([&] { rarity_scores(Dataset(d.schema(), {}, "real")); }) == Errc::empty_dataset);
}

TEST_CASE("missing values get their own rarity bucket") {
  Dataset d = make_dataset({cat_attr("c", {"a", "b"})},
                           {{std::string("a")}, {std::string("a")}, {std::string("b")}, {missing()}});
  auto scores = rarity_scores(d);
  CHECK(scores[3] == scores[2]);  // both counted once, v = 2 values + missing
  CHECK(scores[3] > scores[0]);
}

TEST_CASE("univariate singling out isolates unique categories") {
  Dataset synthetic = make_dataset({cat_attr("c", {"a", "b", "rare"}), num_attr("x")},
                                   {{std::string("a"), 1.0},
                                    {std::string("a"), 1.0},
                                    {std::string("b"), 1.0},
                                    {std::string("rare"), 1.0}},
                                   "synthetic");
  Dataset real = make_dataset(synthetic.schema().attributes(),
                              {{std::string("rare"), 1.0},
                               {std::string("b"), 1.0},
                               {std::string("b"), 1.0}},
                              "real");
  AttackOutcome out = singling_out_attack(synthetic, real, UnivariateMode{}, 2, 7);
  CHECK(out.attack_name == "singling_out_univariate");
  CHECK(out.n_attempts == 2);  // predicates c=b and c=rare
  CHECK(out.n_successes == 1);
  CHECK(out.success_rate() == 0.5);
}

TEST_CASE("univariate singling out uses one-sided numeric extremes") {
  Dataset synthetic = numeric_rows({{1.0}, {2.0}, {3.0}}, "synthetic");
  Dataset real = numeric_rows({{1.0}, {5.0}}, "real");
  AttackOutcome out = singling_out_attack(synthetic, real, UnivariateMode{}, 2, 7);
  CHECK(out.n_attempts == 2);
  CHECK(out.success_rate() == 1.0);  // x<=1 hits only 1.0, x>=3 hits only 5.0
}

TEST_CASE("duplicated real records defeat singling out") {
  Dataset synthetic = make_dataset({cat_attr("c", {"u1", "u2", "u3"})},
                                   {{std::string("u1")}, {std::string("u2")}, {std::string("u3")}},
                                   "synthetic");
  std::vector<std::vector<Value>> doubled;
  for (const Record& r : synthetic.rows()) {
    doubled.push_back(r.values);
    doubled.push_back(r.values);
  }
  Dataset real = make_dataset(synthetic.schema().attributes(), std::move(doubled), "real");
  AttackOutcome out = singling_out_attack(synthetic, real, UnivariateMode{}, 3, 7);
  CHECK(out.n_attempts == 3);
  CHECK(out.n_successes == 0);
}

TEST_CASE("singling out reports a partial outcome when predicates run out") {
  Dataset synthetic = make_dataset({cat_attr("c", {"a", "b", "rare"})},
                                   {{std::string("a")}, {std::string("a")}, {std::string("rare")}},
                                   "synthetic");
  AttackOutcome out = singling_out_attack(synthetic, synthetic.relabeled("real"),
                                          UnivariateMode{}, 10, 7);
  CHECK(out.n_attempts == 1);
  bool noted = false;
  for (const auto& n : out.notes) noted = noted || n.find("constructed 1") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("all-duplicate synthetic data has no isolating predicate") {
  std::vector<std::vector<Value>> rows(5, {std::string("a"), 1.0});
  Dataset synthetic = make_dataset({cat_attr("c", {"a"}), num_attr("x")}, std::move(rows),
                                   "synthetic");
  Dataset real = synthetic.relabeled("real");
  CHECK(code_of([&] { singling_out_attack(synthetic, real, UnivariateMode{}, 3, 7); }) ==
        Errc::not_enough_uniques);
  CHECK(code_of([&] { singling_out_attack(synthetic, real, MultivariateMode{2}, 3, 7); }) ==
        Errc::not_enough_uniques);
  CHECK(code_of([&] { singling_out_attack(synthetic, real, UnivariateMode{}, 0, 7); }) ==
        Errc::bad_params);
}

TEST_CASE("full-width predicates single out every memorized record") {
  Dataset train = random_dataset(17, {30, 2, 2, 3});
  Dataset synthetic = train.relabeled("synthetic");
  AttackOutcome out = singling_out_attack(synthetic, train, MultivariateMode{4}, 5, 11);
  CHECK(out.attack_name == "singling_out_multivariate");
  CHECK(out.n_attempts == 5);
  CHECK(out.success_rate() == 1.0);
  CHECK(code_of([&] { singling_out_attack(synthetic, train, MultivariateMode{5}, 5, 11); }) ==
        Errc::bad_params);
  CHECK(code_of([&] { singling_out_attack(synthetic, train, MultivariateMode{0}, 5, 11); }) ==
        Errc::bad_params);
}

TEST_CASE("multivariate predicates skip rows that cannot be isolated") {
  std::vector<std::vector<Value>> rows;
  rows.push_back({1.0, std::string("a")});
  rows.push_back({2.0, std::string("b")});
  for (int i = 0; i < 8; ++i) rows.push_back({5.0, std::string("c")});
  Dataset synthetic = make_dataset({num_attr("x"), cat_attr("c", {"a", "b", "c"})},
                                   std::move(rows), "synthetic");
  AttackOutcome out = singling_out_attack(synthetic, synthetic.relabeled("real"),
                                          MultivariateMode{2}, 10, 7);
  CHECK(out.n_attempts == 2);
  CHECK(out.success_rate() == 1.0);
}

TEST_CASE("the adversary never sees the evaluation data") {
  Dataset synthetic = random_dataset(19, {25, 2, 2, 3, 0.0});
  Dataset real_a = random_dataset(20, {25, 2, 2, 3, 0.0});
  Dataset real_b = random_dataset(21, {25, 2, 2, 3, 0.0});
  for (auto mode : {SinglingOutMode{UnivariateMode{}}, SinglingOutMode{MultivariateMode{3}}}) {
    AttackOutcome on_a = singling_out_attack(synthetic, real_a, mode, 6, 5);
    AttackOutcome on_b = singling_out_attack(synthetic, real_b, mode, 6, 5);
    REQUIRE(on_a.n_attempts == on_b.n_attempts);
    for (size_t i = 0; i < on_a.attempts.size(); ++i) {
      CHECK(on_a.attempts[i].guess == on_b.attempts[i].guess);
    }
  }
}

TEST_CASE("attacks are deterministic in the rng seed") {
  Dataset synthetic = random_dataset(19, {25, 2, 2, 3});
  Dataset real = random_dataset(20, {25, 2, 2, 3});
  CHECK(signature(singling_out_attack(synthetic, real, MultivariateMode{3}, 8, 42)) ==
        signature(singling_out_attack(synthetic, real, MultivariateMode{3}, 8, 42)));
  CHECK(signature(random_singling_out_baseline(synthetic, real, UnivariateMode{}, 50, 9)) ==
        signature(random_singling_out_baseline(synthetic, real, UnivariateMode{}, 50, 9)));
  CHECK(signature(random_linkage_baseline(40, 2, 100, 5)) ==
        signature(random_linkage_baseline(40, 2, 100, 5)));
}

TEST_CASE("linkage connects the two halves through the same synthetic row") {
  Dataset synthetic = numeric_rows({{0.0, 5.0}, {5.0, 0.0}, {9.0, 9.0}}, "synthetic");
  Dataset targets = numeric_rows({{0.0, 0.0}, {9.0, 9.0}}, "real");
  Preprocessor p = embed(targets, synthetic);
  AttackOutcome out = linkage_attack(synthetic, targets, {"x0"}, {"x1"}, 1, p,
                                     Metric::euclidean, 3);
  REQUIRE(out.n_attempts == 2);
  CHECK_FALSE(out.attempts[0].correct);  // halves point at rows 0 and 1
  CHECK(out.attempts[1].correct);
  CHECK(out.attempts[1].guess == "synthetic row 2");
  CHECK(out.n_successes == 1);
}

TEST_CASE("a memorized copy links every target") {
  Dataset targets = random_dataset(23, {20, 2, 2, 3});
  Dataset synthetic = targets.relabeled("synthetic");
  Preprocessor p = embed(targets, synthetic);
  AttackOutcome out = linkage_attack(synthetic, targets, {"num0"}, {"num1"}, 1, p,
                                     Metric::euclidean, 3);
  CHECK(out.success_rate() == 1.0);

  // k spanning the whole synthetic set links trivially.
  AttackOutcome all = linkage_attack(synthetic, targets, {"num0"}, {"num1"},
                                     synthetic.size(), p, Metric::euclidean, 3);
  CHECK(all.success_rate() == 1.0);
}

TEST_CASE("linkage validates its auxiliary sets") {
  Dataset targets = random_dataset(23, {10, 2, 2, 3});
  Dataset synthetic = targets.relabeled("synthetic");
  Preprocessor p = embed(targets, synthetic);
  CHECK(code_of([&] {
          linkage_attack(synthetic, targets, {"num0", "cat0"}, {"cat0"}, 1, p, Metric::euclidean, 3);
        }) == Errc::overlapping_aux);
  CHECK(code_of([&] {
          linkage_attack(synthetic, targets, {}, {"cat0"}, 1, p, Metric::euclidean, 3);
        }) == Errc::bad_params);
  CHECK(code_of([&] {
          linkage_attack(synthetic, targets, {"num0"}, {"num1"}, 11, p, Metric::euclidean, 3);
        }) == Errc::k_too_large);
  CHECK(code_of([&] {
          linkage_attack(synthetic, targets, {"num0"}, {"num1"}, 0, p, Metric::euclidean, 3);
        }) == Errc::bad_params);
}

TEST_CASE("inference takes the modal neighbour value") {
  Dataset synthetic = make_dataset({num_attr("x"), cat_attr("occ", {"eng", "law", "mgr"})},
                                   {{0.0, std::string("mgr")},
                                    {1.0, std::string("mgr")},
                                    {2.0, std::string("eng")},
                                    {3.0, std::string("law")}},
                                   "synthetic");
  Dataset targets = make_dataset(synthetic.schema().attributes(),
                                 {{1.4, std::string("mgr")}}, "real");
  Preprocessor p = embed(targets, synthetic);
  AttackOutcome out = inference_attack(synthetic, targets, {"x"}, "occ", 4, p, Metric::euclidean);
  REQUIRE(out.n_attempts == 1);
  CHECK(out.attempts[0].guess == "mgr");
  CHECK(out.attempts[0].correct);
}

TEST_CASE("modal ties resolve to the nearest tied neighbour") {
  Dataset synthetic = make_dataset({num_attr("x"), cat_attr("occ", {"A", "B"})},
                                   {{0.0, std::string("A")},
                                    {1.0, std::string("B")},
                                    {2.0, std::string("B")},
                                    {3.0, std::string("A")}},
                                   "synthetic");
  auto attrs = synthetic.schema().attributes();
  Preprocessor p = embed(synthetic, synthetic.relabeled("real"));

  Dataset near_b = make_dataset(attrs, {{1.4, std::string("B")}}, "real");
  AttackOutcome out_b = inference_attack(synthetic, near_b, {"x"}, "occ", 4, p, Metric::euclidean);
  CHECK(out_b.attempts[0].guess == "B");

  Dataset near_a = make_dataset(attrs, {{0.1, std::string("B")}}, "real");
  AttackOutcome out_a = inference_attack(synthetic, near_a, {"x"}, "occ", 4, p, Metric::euclidean);
  CHECK(out_a.attempts[0].guess == "A");
  CHECK_FALSE(out_a.attempts[0].correct);
}

TEST_CASE("numeric secrets average the neighbourhood") {
  Dataset synthetic = numeric_rows({{0.0, 10.0}, {10.0, 20.0}}, "synthetic");
  Dataset targets = numeric_rows({{0.0, 10.0}}, "real");
  Preprocessor p = embed(targets, synthetic);

  AttackOutcome k1 = inference_attack(synthetic, targets, {"x0"}, "x1", 1, p,
                                      Metric::euclidean, 0.0);
  CHECK(k1.attempts[0].correct);  // nearest neighbour holds the exact value

  AttackOutcome wide = inference_attack(synthetic, targets, {"x0"}, "x1", 2, p,
                                        Metric::euclidean, 5.0);
  CHECK(wide.attempts[0].guess == value_to_string(Value{15.0}));
  CHECK(wide.attempts[0].correct);

  // Default tolerance is 5% of the pooled range (0.5 here), so the mean misses.
  AttackOutcome strict = inference_attack(synthetic, targets, {"x0"}, "x1", 2, p,
                                          Metric::euclidean);
  CHECK_FALSE(strict.attempts[0].correct);
}

TEST_CASE("inference skips targets with missing secrets") {
  Dataset synthetic = make_dataset({num_attr("x"), cat_attr("s", {"a", "b"})},
                                   {{0.0, std::string("a")}, {1.0, std::string("b")}},
                                   "synthetic");
  auto attrs = synthetic.schema().attributes();
  Dataset targets = make_dataset(attrs, {{0.1, missing()}, {0.9, std::string("b")}}, "real");
  Preprocessor p = embed(targets, synthetic);
  AttackOutcome out = inference_attack(synthetic, targets, {"x"}, "s", 1, p, Metric::euclidean);
  CHECK(out.n_attempts == 1);
  REQUIRE(out.notes.size() == 1);
  CHECK(out.notes[0].find("skipped 1") != std::string::npos);

  Dataset all_missing = make_dataset(attrs, {{0.1, missing()}}, "real");
  CHECK(code_of([&] {
          inference_attack(synthetic, all_missing, {"x"}, "s", 1, p, Metric::euclidean);
        }) == Errc::too_small);
  CHECK(code_of([&] {
          inference_attack(synthetic, targets, {"s", "x"}, "s", 1, p, Metric::euclidean);
        }) == Errc::overlapping_aux);
  CHECK(code_of([&] {
          inference_attack(synthetic, targets, {"x"}, "s", 3, p, Metric::euclidean);
        }) == Errc::k_too_large);
}

TEST_CASE("more auxiliary attributes never hurt on the memorized fixture") {
  Dataset train = random_dataset(13, {50, 2, 2, 4});
  Dataset synthetic = train.relabeled("synthetic");
  Preprocessor p = embed(train, synthetic);
  std::vector<std::vector<std::string>> chains = {
      {"cat0"}, {"cat0", "num0"}, {"cat0", "num0", "num1"}};
  double prev = -1.0;
  for (const auto& aux : chains) {
    double rate =
        inference_attack(synthetic, train, aux, "cat1", 1, p, Metric::euclidean).success_rate();
    CHECK(rate >= prev);
    prev = rate;
  }
  CHECK(prev == 1.0);  // with a continuous attribute the self-match wins
}

TEST_CASE("inference guesses ignore the truth column") {
  Dataset synthetic = random_dataset(29, {30, 2, 2, 3});
  auto attrs = synthetic.schema().attributes();
  Dataset targets_a = random_dataset(30, {15, 2, 2, 3});
  std::vector<std::vector<Value>> poisoned;
  size_t secret_idx = synthetic.schema().require_attribute("cat1");
  for (const Record& r : targets_a.rows()) {
    auto vals = r.values;
    vals[secret_idx] = std::string("v0");
    poisoned.push_back(std::move(vals));
  }
  Dataset targets_b = make_dataset(attrs, std::move(poisoned), "real");
  Preprocessor p = embed(targets_a, synthetic);
  AttackOutcome a = inference_attack(synthetic, targets_a, {"num0", "num1"}, "cat1", 3, p,
                                     Metric::euclidean);
  AttackOutcome b = inference_attack(synthetic, targets_b, {"num0", "num1"}, "cat1", 3, p,
                                     Metric::euclidean);
  REQUIRE(a.n_attempts == b.n_attempts);
  for (size_t i = 0; i < a.attempts.size(); ++i) {
    CHECK(a.attempts[i].guess == b.attempts[i].guess);
  }
}

TEST_CASE("distance mia separates memorized members perfectly") {
  Dataset members = random_dataset(31, {30, 2, 0, 4});
  Dataset synthetic = members.relabeled("synthetic");
  Dataset non_members = random_dataset(32, {30, 2, 0, 4, 0.0, 100.0, 200.0});
  Preprocessor p = embed(members, synthetic);
  AttackOutcome out = mia_distance(synthetic, members, non_members, p, Metric::euclidean);
  CHECK(out.auc == 1.0);
  CHECK(*out.precision == 1.0);
  CHECK(*out.recall == 1.0);
  CHECK(*out.f1 == 1.0);
  CHECK(out.n_attempts == 60);
  CHECK(out.n_successes == 60);
  bool has_threshold = false;
  for (const auto& n : out.notes) has_threshold = has_threshold || n.rfind("threshold=", 0) == 0;
  CHECK(has_threshold);
}

TEST_CASE("exchangeable members give an uninformative mia") {
  Dataset synthetic = random_dataset(41, {60, 2, 1, 3}, "synthetic");
  Dataset members = random_dataset(42, {40, 2, 1, 3});
  Dataset non_members = random_dataset(43, {40, 2, 1, 3});
  Preprocessor p = embed(members, synthetic);
  AttackOutcome out = mia_distance(synthetic, members, non_members, p, Metric::euclidean);
  CHECK(*out.auc > 0.3);
  CHECK(*out.auc < 0.7);

  CHECK(code_of([&] {
          mia_distance(synthetic, members, Dataset(members.schema(), {}, "real"), p,
                       Metric::euclidean);
        }) == Errc::too_small);
}

TEST_CASE("mia results do not depend on the thread count") {
  Dataset synthetic = random_dataset(41, {50, 2, 1, 3}, "synthetic");
  Dataset members = random_dataset(44, {25, 2, 1, 3});
  Dataset non_members = random_dataset(45, {25, 2, 1, 3});
  Preprocessor p = embed(members, synthetic);
  AttackOutcome one = mia_distance(synthetic, members, non_members, p, Metric::euclidean, 1);
  AttackOutcome four = mia_distance(synthetic, members, non_members, p, Metric::euclidean, 4);
  CHECK(signature(one) == signature(four));
  CHECK(*one.auc == *four.auc);
}

TEST_CASE("shadow mia recognizes memorization") {
  Dataset population = random_dataset(51, {60, 2, 0, 4});
  Dataset audited_train = head(population, 20, "real");
  Dataset audited_synthetic = audited_train.relabeled("synthetic");

  std::vector<Record> target_rows;
  for (size_t i : {0ul, 1ul, 2ul, 40ul, 41ul, 42ul}) target_rows.push_back(population.row(i));
  Dataset targets(population.schema(), std::move(target_rows), "real");
  std::vector<char> is_member = {1, 1, 1, 0, 0, 0};

  GeneratorOracle oracle = [](const Dataset& train, uint64_t seed) {
    return Generator::fit(train, MemorizingParams{}, seed).sample(200, seed);
  };
  ThreatModel tm;
  tm.box = ThreatModel::Box::black_box;
  Preprocessor p = embed(population, audited_synthetic);

  AttackOutcome out = shadow_mia(tm, oracle, population, targets, is_member, audited_synthetic,
                                 8, 20, p, Metric::euclidean, 97);
  REQUIRE(out.n_attempts == 6);
  for (size_t i = 0; i < 3; ++i) CHECK(out.attempts[i].correct);  // members have distance zero
  CHECK(out.success_rate() >= 5.0 / 6.0);
  REQUIRE(out.auc.has_value());
  CHECK(*out.auc >= 0.8);

  AttackOutcome again = shadow_mia(tm, oracle, population, targets, is_member, audited_synthetic,
                                   8, 20, p, Metric::euclidean, 97);
  CHECK(signature(out) == signature(again));
}

TEST_CASE("a training-blind oracle reduces shadow mia to a coin flip") {
  Dataset population = random_dataset(51, {60, 2, 0, 4});
  Dataset audited_train = head(population, 20, "real");
  Dataset audited_synthetic = audited_train.relabeled("synthetic");
  Dataset fixed = slice(population, 50, 60, "synthetic");

  std::vector<Record> target_rows;
  for (size_t i : {0ul, 1ul, 2ul, 40ul, 41ul, 42ul}) target_rows.push_back(population.row(i));
  Dataset targets(population.schema(), std::move(target_rows), "real");
  std::vector<char> is_member = {1, 1, 1, 0, 0, 0};

  GeneratorOracle constant = [&](const Dataset&, uint64_t) { return fixed; };
  ThreatModel tm;
  tm.box = ThreatModel::Box::white_box;
  Preprocessor p = embed(population, audited_synthetic);
  AttackOutcome out = shadow_mia(tm, constant, population, targets, is_member, audited_synthetic,
                                 4, 10, p, Metric::euclidean, 3);
  CHECK(out.success_rate() == 0.5);  // equal means make everyone a "member"
}

TEST_CASE("shadow mia enforces its contract") {
  Dataset population = random_dataset(51, {20, 2, 0, 4});
  Dataset synthetic = head(population, 5, "synthetic");
  Dataset targets = head(population, 2, "real");
  std::vector<char> labels = {1, 0};
  GeneratorOracle oracle = [](const Dataset& train, uint64_t seed) {
    return Generator::fit(train, MemorizingParams{}, seed).sample(10, seed);
  };
  Preprocessor p = embed(population, synthetic);

  ThreatModel no_box;
  CHECK(code_of([&] {
          shadow_mia(no_box, oracle, population, targets, labels, synthetic, 4, 5, p,
                     Metric::euclidean, 1);
        }) == Errc::box_insufficient);

  ThreatModel bb;
  bb.box = ThreatModel::Box::black_box;
  CHECK(code_of([&] {
          shadow_mia(bb, oracle, population, targets, labels, synthetic, 3, 5, p,
                     Metric::euclidean, 1);
        }) == Errc::bad_params);
  CHECK(code_of([&] {
          shadow_mia(bb, oracle, population, targets, {1}, synthetic, 4, 5, p,
                     Metric::euclidean, 1);
        }) == Errc::size_mismatch);
  CHECK(code_of([&] {
          shadow_mia(bb, oracle, population, targets, labels, synthetic, 4, 21, p,
                     Metric::euclidean, 1);
        }) == Errc::too_small);
  GeneratorOracle empty_oracle = [&](const Dataset&, uint64_t) {
    return Dataset(population.schema(), {}, "synthetic");
  };
  CHECK(code_of([&] {
          shadow_mia(bb, empty_oracle, population, targets, labels, synthetic, 4, 5, p,
                     Metric::euclidean, 1);
        }) == Errc::fit_failure);
}

TEST_CASE("the random inference baseline hits the analytic rate") {
  Dataset synthetic = make_dataset({cat_attr("s", {"a", "b", "c", "d"})},
                                   {{std::string("a")}, {std::string("b")},
                                    {std::string("c")}, {std::string("d")}},
                                   "synthetic");
  Dataset targets = make_dataset(synthetic.schema().attributes(), {{std::string("a")}}, "real");
  Preprocessor p = embed(targets, synthetic);
  AttackOutcome out = random_inference_baseline(synthetic, targets, "s", p, std::nullopt, 1000, 12);
  CHECK(out.n_attempts == 1000);
  CHECK(std::abs(out.success_rate() - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / 1000.0));
}

TEST_CASE("the numeric baseline respects the tolerance") {
  Dataset synthetic = numeric_rows({{0.0}, {10.0}}, "synthetic");
  Dataset targets = numeric_rows({{5.0}}, "real");
  Preprocessor p = embed(targets, synthetic);
  AttackOutcome hit = random_inference_baseline(synthetic, targets, "x0", p, 5.0, 100, 12);
  CHECK(hit.success_rate() == 1.0);
  AttackOutcome miss = random_inference_baseline(synthetic, targets, "x0", p, 1.0, 100, 12);
  CHECK(miss.success_rate() == 0.0);
}

TEST_CASE("the random linkage baseline matches collision probabilities") {
  AttackOutcome sparse = random_linkage_baseline(100, 1, 2000, 8);
  CHECK(std::abs(sparse.success_rate() - 0.01) < 3.0 * std::sqrt(0.01 * 0.99 / 2000.0));

  // Two 2-subsets of a 4-element set intersect with probability 5/6.
  AttackOutcome dense = random_linkage_baseline(4, 2, 3000, 8);
  double expect = 5.0 / 6.0;
  CHECK(std::abs(dense.success_rate() - expect) <
        3.0 * std::sqrt(expect * (1.0 - expect) / 3000.0));

  CHECK(code_of([&] { random_linkage_baseline(4, 5, 10, 8); }) == Errc::k_too_large);
}

TEST_CASE("random singling out rarely isolates duplicated records") {
  Dataset base = random_dataset(61, {40, 1, 2, 3});
  std::vector<std::vector<Value>> doubled;
  for (const Record& r : base.rows()) {
    doubled.push_back(r.values);
    doubled.push_back(r.values);
  }
  Dataset real = make_dataset(base.schema().attributes(), std::move(doubled), "real");
  AttackOutcome out = random_singling_out_baseline(real.relabeled("synthetic"), real,
                                                   UnivariateMode{}, 200, 15);
  CHECK(out.success_rate() == 0.0);  // every candidate value appears an even number of times
}

TEST_CASE("the random membership baseline is a fair coin") {
  AttackOutcome out = random_membership_baseline(400, 400, 19);
  CHECK(out.n_attempts == 800);
  CHECK(std::abs(out.success_rate() - 0.5) < 3.0 * std::sqrt(0.25 / 800.0));
}

TEST_CASE("control runs expose memorization as a train-control gap") {
  Dataset train = random_dataset(71, {40, 2, 1, 3});
  Dataset control = random_dataset(72, {40, 2, 1, 3});
  Dataset synthetic = train.relabeled("synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, train, synthetic);
  AttackClosure attack = [&](const Dataset& targets) {
    return inference_attack(synthetic, targets, {"num0", "num1"}, "cat0", 1, p, Metric::euclidean);
  };
  auto [on_train, on_control] = control_run(attack, train, control);
  CHECK(on_train.success_rate() == 1.0);
  CHECK(on_control.success_rate() < on_train.success_rate());
  CHECK(on_train.attack_name == on_control.attack_name);
}

TEST_CASE("an independent generator shows no train-control gap") {
  Dataset train = random_dataset(73, {60, 2, 1, 2});
  Dataset control = random_dataset(74, {60, 2, 1, 2});
  Dataset synthetic = random_dataset(75, {60, 2, 1, 2}, "synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, train, synthetic);
  AttackClosure attack = [&](const Dataset& targets) {
    return inference_attack(synthetic, targets, {"num0", "num1"}, "cat0", 3, p, Metric::euclidean);
  };
  auto [on_train, on_control] = control_run(attack, train, control);
  CHECK(std::abs(on_train.success_rate() - on_control.success_rate()) < 0.25);
}

TEST_CASE("risk normalizes the excess over the baseline") {
  auto outcome = [](size_t successes, size_t attempts) {
    AttackOutcome o;
    o.n_attempts = attempts;
    o.n_successes = successes;
    return o;
  };
  RiskEstimate half = risk_estimate(outcome(3, 5), outcome(1, 5), RiskEstimate::Baseline::random);
  CHECK(half.risk == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.attack_rate == 0.6);
  CHECK(half.baseline_rate == 0.2);

  CHECK(risk_estimate(outcome(10, 10), outcome(1, 4), RiskEstimate::Baseline::random).risk == 1.0);
  CHECK(risk_estimate(outcome(2, 10), outcome(2, 10), RiskEstimate::Baseline::random).risk == 0.0);
  CHECK(risk_estimate(outcome(1, 10), outcome(5, 10), RiskEstimate::Baseline::random).risk == 0.0);
  CHECK(risk_estimate(outcome(5, 10), outcome(10, 10), RiskEstimate::Baseline::random).risk == 0.0);

  RiskEstimate abs = risk_estimate(outcome(5, 10), outcome(0, 1), RiskEstimate::Baseline::absolute);
  CHECK(abs.baseline_rate == 0.0);
  CHECK(abs.risk == 0.5);
  auto w = stats::wilson(5, 10);
  CHECK(abs.ci_low == w.lo);
  CHECK(abs.ci_high == w.hi);

  CHECK(code_of([&] {
          risk_estimate(outcome(0, 0), outcome(1, 4), RiskEstimate::Baseline::random);
        }) == Errc::empty_outcome);
}

TEST_CASE("risk intervals propagate both Wilson intervals") {
  auto outcome = [](size_t successes, size_t attempts) {
    AttackOutcome o;
    o.n_attempts = attempts;
    o.n_successes = successes;
    return o;
  };
  RiskEstimate r = risk_estimate(outcome(30, 50), outcome(10, 50), RiskEstimate::Baseline::control);
  auto wa = stats::wilson(30, 50);
  auto wb = stats::wilson(10, 50);
  auto excess = [](double a, double b) {
    return 1.0 - b <= 0.0 ? 0.0 : std::clamp((a - b) / (1.0 - b), 0.0, 1.0);
  };
  CHECK(r.ci_low == excess(wa.lo, wb.hi));
  CHECK(r.ci_high == excess(wa.hi, wb.lo));
  CHECK(r.ci_low <= r.risk);
  CHECK(r.risk <= r.ci_high);
  CHECK(r.ci_low >= 0.0);
  CHECK(r.ci_high <= 1.0);
  CHECK(r.baseline_kind == RiskEstimate::Baseline::control);
}

TEST_CASE("canary recovery counts reproduced plants") {
  Dataset synthetic = numeric_rows({{0.0}, {5.0}}, "synthetic");
  Preprocessor p = embed(synthetic, synthetic.relabeled("real"));
  Record present{{5.0}};
  Record absent{{2.5}};
  CHECK(canary_recovery(synthetic, {present}, p, Metric::euclidean) == 1.0);
  CHECK(canary_recovery(synthetic, {absent}, p, Metric::euclidean) == 0.0);
  CHECK(canary_recovery(synthetic, {present, absent}, p, Metric::euclidean) == 0.5);
  CHECK(canary_recovery(synthetic, {absent}, p, Metric::euclidean, 1e18) == 1.0);

  Record near{{4.9}};
  double d = nearest(near, synthetic, p, Metric::euclidean).distance;
  REQUIRE(d > 0.0);
  CHECK(canary_recovery(synthetic, {near}, p, Metric::euclidean, d) == 1.0);  // inclusive
  CHECK(canary_recovery(synthetic, {near}, p, Metric::euclidean, d * 0.99) == 0.0);

  CHECK(code_of([&] { canary_recovery(synthetic, {}, p, Metric::euclidean); }) ==
        Errc::empty_canaries);
  CHECK(code_of([&] { canary_recovery(synthetic, {present}, p, Metric::euclidean, -1.0); }) ==
        Errc::out_of_range);
}
