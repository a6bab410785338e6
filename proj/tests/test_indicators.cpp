#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "synthaudit/indicators.hpp"
#include "synthaudit/rng.hpp"
#include "synthaudit/stats.hpp"

using namespace synthaudit;
using namespace synthaudit::testing;
using doctest::Approx;

namespace {

DistanceProfile mk_profile(ProfileKind kind, std::vector<double> values,
                           std::vector<size_t> argmin, bool self_excluded = false) {
  DistanceProfile d;
  d.kind = kind;
  d.values = std::move(values);
  d.argmin_index = std::move(argmin);
  d.metric = Metric::euclidean;
  d.strategy = EmbedStrategy{};
  d.self_excluded = self_excluded;
  return d;
}

Dataset grid2(std::vector<std::pair<double, double>> pts, std::string label) {
  std::vector<std::vector<Value>> rows;
  for (auto [x, y] : pts) rows.push_back({x, y});
  return make_dataset({num_attr("x"), num_attr("y")}, std::move(rows), std::move(label));
}

Dataset cloud(uint64_t seed, size_t n, double cx, double cy, double spread, std::string label) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < n; ++i) {
    pts.push_back({cx + spread * (rng.next_double() - 0.5),
                   cy + spread * (rng.next_double() - 0.5)});
  }
  return grid2(std::move(pts), std::move(label));
}

}  // namespace

TEST_CASE("ims on copies, disjoint sets and half overlaps") {
  auto attrs = std::vector<Attribute>{num_attr("x"), cat_attr("c", {"a", "b"})};
  Dataset real = make_dataset(attrs, {{1.0, std::string("a")},
                                      {2.0, std::string("b")},
                                      {3.0, std::string("a")},
                                      {4.0, std::string("b")}});
  CHECK(ims(real, real.relabeled("synthetic")) == 1.0);

  Dataset disjoint = make_dataset(attrs, {{1.0, std::string("b")},
                                          {2.0, std::string("a")},
                                          {3.0, std::string("b")},
                                          {4.0, std::string("a")}},
                                  "synthetic");
  CHECK(ims(real, disjoint) == 0.0);

  Dataset half = make_dataset(attrs, {{1.0, std::string("a")},
                                      {2.0, std::string("b")},
                                      {9.0, std::string("a")},
                                      {9.5, std::string("b")}},
                              "synthetic");
  CHECK(ims(real, half) == 0.5);
}

TEST_CASE("ims respects the numeric tolerance") {
  Dataset real = make_dataset({num_attr("x")}, {{1.0}, {2.0}});
  Dataset near = make_dataset({num_attr("x")}, {{1.0 + 1e-9}, {5.0}}, "synthetic");
  CHECK(ims(real, near, 0.0) == 0.0);
  CHECK(ims(real, near, 1e-6) == 0.5);
}

TEST_CASE("ims treats negative zero as zero") {
  Dataset real = make_dataset({num_attr("x")}, {{0.0}});
  Dataset neg = make_dataset({num_attr("x")}, {{-0.0}}, "synthetic");
  CHECK(ims(real, neg) == 1.0);
}

TEST_CASE("ims requires a shared schema") {
  Dataset a = make_dataset({num_attr("x")}, {{1.0}});
  Dataset b = make_dataset({num_attr("y")}, {{1.0}}, "synthetic");
  CHECK_THROWS_AS(ims(a, b), Error);
}

TEST_CASE("dcr flags follow the nearest real record's own distance") {
  auto srd = mk_profile(ProfileKind::srd, {0.1, 0.5, 0.9}, {0, 1, 2});
  auto rrd = mk_profile(ProfileKind::rrd, {0.2, 0.4, 1.0}, {1, 0, 0});
  DcrSummary s = dcr_summary(srd, rrd);
  CHECK(s.at_risk == std::vector<char>{1, 0, 1});
  CHECK(s.proportion_at_risk == Approx(2.0 / 3.0));

  // argmin indirection: every synthetic record is compared against the
  // distance of the real record it is closest to, not its own position
  auto srd2 = mk_profile(ProfileKind::srd, {0.3, 0.3, 0.3}, {2, 2, 0});
  DcrSummary s2 = dcr_summary(srd2, rrd);
  CHECK(s2.at_risk == std::vector<char>{1, 1, 0});
}

TEST_CASE("dcr on an exact copy flags everything, far synthetic flags nothing") {
  Dataset train = grid2({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 2}}, "real");
  Dataset holdout = grid2({{0.4, 0.4}, {1.6, 0.2}, {0.3, 1.5}}, "holdout");
  Dataset copy = train.relabeled("synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, train, copy);
  DistanceProfile srd = profile(copy, train, ProfileKind::srd, p, Metric::euclidean);
  DistanceProfile rrd = profile(train, holdout, ProfileKind::rrd, p, Metric::euclidean);
  DcrSummary s = dcr_summary(srd, rrd);
  CHECK(s.proportion_at_risk == 1.0);
  CHECK(s.holdout_used);

  Dataset far = grid2({{50, 50}, {51, 50}, {50, 51}, {51, 51}, {52, 52}}, "synthetic");
  Preprocessor pf = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, train, far);
  DistanceProfile srd_far = profile(far, train, ProfileKind::srd, pf, Metric::euclidean);
  DistanceProfile rrd_far = profile(train, holdout, ProfileKind::rrd, pf, Metric::euclidean);
  DcrSummary sf = dcr_summary(srd_far, rrd_far);
  CHECK(sf.proportion_at_risk == 0.0);

  DistanceProfile rrd_loo = profile(train, train, ProfileKind::rrd, p, Metric::euclidean);
  DcrSummary sl = dcr_summary(srd, rrd_loo);
  CHECK_FALSE(sl.holdout_used);
  CHECK(sl.proportion_at_risk == 1.0);
}

TEST_CASE("dcr validates profile kinds and index ranges") {
  auto srd = mk_profile(ProfileKind::srd, {0.1}, {0});
  auto rrd = mk_profile(ProfileKind::rrd, {0.2}, {0});
  auto ssd = mk_profile(ProfileKind::ssd, {0.2}, {0});
  CHECK_THROWS_AS(dcr_summary(srd, ssd), Error);
  CHECK_THROWS_AS(dcr_summary(rrd, rrd), Error);
  auto bad_index = mk_profile(ProfileKind::srd, {0.1}, {5});
  CHECK_THROWS_AS(dcr_summary(bad_index, rrd), Error);
  auto other_metric = mk_profile(ProfileKind::rrd, {0.2}, {0});
  other_metric.metric = Metric::l1;
  CHECK_THROWS_AS(dcr_summary(srd, other_metric), Error);
}

TEST_CASE("dcr summary statistics and percentile monotonicity") {
  Rng rng(2024);
  std::vector<double> srd_vals, rrd_vals;
  std::vector<size_t> argmin;
  for (int i = 0; i < 40; ++i) {
    srd_vals.push_back(rng.next_double() * 3.0);
    rrd_vals.push_back(rng.next_double() * 3.0);
    argmin.push_back(rng.next_below(40));
  }
  auto srd = mk_profile(ProfileKind::srd, srd_vals, argmin);
  auto rrd = mk_profile(ProfileKind::rrd, rrd_vals, argmin);
  DcrSummary s = dcr_summary(srd, rrd);
  CHECK(s.srd.mean == Approx(stats::mean(srd_vals)));
  CHECK(s.rrd.median == Approx(stats::median(rrd_vals)));
  for (size_t i = 1; i < s.srd.percentiles.size(); ++i) {
    CHECK(s.srd.percentiles[i - 1] <= s.srd.percentiles[i]);
    CHECK(s.rrd.percentiles[i - 1] <= s.rrd.percentiles[i]);
  }

  // inflating every SRD value can only clear flags, never raise new ones
  double prev = s.proportion_at_risk;
  for (double c : {0.2, 0.5, 1.0, 4.0}) {
    std::vector<double> inflated = srd_vals;
    for (double& v : inflated) v += c;
    DcrSummary si = dcr_summary(mk_profile(ProfileKind::srd, inflated, argmin), rrd);
    CHECK(si.proportion_at_risk <= prev);
    prev = si.proportion_at_risk;
  }
}

TEST_CASE("below percentile share on the worked example") {
  auto srd = mk_profile(ProfileKind::srd, {0.1, 0.9}, {0, 0});
  auto rrd = mk_profile(ProfileKind::rrd, {0.2, 0.4, 0.6, 0.8}, {0, 0, 0, 0});
  CHECK(below_percentile_share(srd, rrd, 50) == 0.5);  // cutoff 0.5, one below
  CHECK_THROWS_AS(below_percentile_share(srd, rrd, 0.0), Error);
  CHECK_THROWS_AS(below_percentile_share(srd, rrd, 100.0), Error);

  auto zeros = mk_profile(ProfileKind::srd, {0.0, 0.0}, {0, 0});
  CHECK(below_percentile_share(zeros, rrd, 5) == 1.0);
  auto high = mk_profile(ProfileKind::srd, {9.0, 9.0}, {0, 0});
  CHECK(below_percentile_share(high, rrd, 95) == 0.0);
}

TEST_CASE("ks two-sample statistic examples") {
  std::vector<double> s123{1, 2, 3};
  KsResult same = ks_two_sample(s123, s123);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK(same.p_method == "permutation_exact");
  CHECK_FALSE(same.reject);

  std::vector<double> lo{1, 2}, hi{3, 4};
  KsResult sep = ks_two_sample(lo, hi);
  CHECK(sep.statistic == 1.0);
  // exact permutation: 2 of the 6 assignments reach D = 1
  CHECK(sep.p_value == Approx(1.0 / 3.0));

  std::vector<double> a{1, 3}, b{2, 4};
  KsResult mid = ks_two_sample(a, b);
  CHECK(mid.statistic == 0.5);
  CHECK(mid.p_value == 1.0);  // every assignment reaches D >= 0.5
}

TEST_CASE("ks large samples use the asymptotic tail") {
  Rng rng(55);
  std::vector<double> a, b;
  for (int i = 0; i < 60; ++i) a.push_back(rng.next_double());
  for (int i = 0; i < 80; ++i) b.push_back(rng.next_double());
  KsResult r = ks_two_sample(a, b);
  CHECK(r.p_method == "asymptotic");
  double ne = 60.0 * 80.0 / 140.0;
  CHECK(r.p_value == Approx(stats::kolmogorov_sf(std::sqrt(ne) * r.statistic)));
  CHECK(r.n1 == 60);
  CHECK(r.n2 == 80);

  std::vector<double> shifted;
  for (double x : a) shifted.push_back(x + 10.0);
  KsResult far = ks_two_sample(shifted, b);
  CHECK(far.statistic == 1.0);
  CHECK(far.reject);
  CHECK(far.reject_at_005);
  CHECK(far.reject_at_001);
}

TEST_CASE("ks statistic is invariant under strictly increasing transforms") {
  Rng rng(77);
  std::vector<double> a, b;
  for (int i = 0; i < 25; ++i) a.push_back(rng.next_double() * 10.0 - 5.0);
  for (int i = 0; i < 30; ++i) b.push_back(rng.next_double() * 10.0 - 5.0);
  KsResult base = ks_two_sample(a, b);
  auto lift = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(x);
    return v;
  };
  KsResult lifted = ks_two_sample(lift(a), lift(b));
  CHECK(lifted.statistic == base.statistic);
  CHECK(lifted.p_value == base.p_value);
}

TEST_CASE("ks sampled permutation path stays deterministic") {
  Rng rng(99);
  std::vector<double> a, b;
  for (int i = 0; i < 5; ++i) a.push_back(rng.next_double());
  for (int i = 0; i < 70; ++i) b.push_back(rng.next_double());
  // C(75,5) = 17,259,390 exceeds the enumeration cap
  KsResult r1 = ks_two_sample(a, b);
  KsResult r2 = ks_two_sample(a, b);
  CHECK(r1.p_method == "permutation_sampled");
  CHECK(r1.p_value == r2.p_value);
  KsResult other = ks_two_sample(a, b, 0.05, 777);
  CHECK(other.p_method == "permutation_sampled");
  CHECK(other.p_value > 0.0);
  CHECK(other.p_value <= 1.0);
}

TEST_CASE("ks input validation") {
  std::vector<double> v{1.0};
  std::vector<double> empty;
  CHECK_THROWS_AS(ks_two_sample(v, empty), Error);
  CHECK_THROWS_AS(ks_two_sample(v, v, 0.0), Error);
  CHECK_THROWS_AS(ks_two_sample(v, v, 1.0), Error);
}

TEST_CASE("adversarial accuracy of an exact copy is zero") {
  Dataset train = cloud(1, 12, 0.0, 0.0, 2.0, "real");
  Dataset copy = train.relabeled("synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, train, copy);
  AaPlResult r = adversarial_accuracy(train, copy, p, Metric::euclidean);
  CHECK(r.adversarial_accuracy == 0.0);
  CHECK(r.component_real == 0.0);
  CHECK(r.component_synthetic == 0.0);
}

TEST_CASE("adversarial accuracy of a distant tight cluster is one") {
  Dataset real = cloud(2, 10, 0.0, 0.0, 1.0, "real");
  Dataset synth = cloud(3, 10, 1000.0, 1000.0, 0.01, "synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, real, synth);
  AaPlResult r = adversarial_accuracy(real, synth, p, Metric::euclidean);
  CHECK(r.adversarial_accuracy == 1.0);
  CHECK(r.component_real == 1.0);
  CHECK(r.component_synthetic == 1.0);
}

TEST_CASE("adversarial accuracy is invariant under row permutation") {
  Dataset real = cloud(4, 15, 0.0, 0.0, 3.0, "real");
  Dataset synth = cloud(5, 13, 0.5, 0.5, 3.0, "synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, real, synth);
  AaPlResult base = adversarial_accuracy(real, synth, p, Metric::euclidean);
  CHECK(base.adversarial_accuracy ==
        Approx(0.5 * (base.component_real + base.component_synthetic)));

  std::vector<Record> reversed(synth.rows().rbegin(), synth.rows().rend());
  Dataset shuffled(synth.schema(), std::move(reversed), "synthetic");
  AaPlResult perm = adversarial_accuracy(real, shuffled, p, Metric::euclidean);
  CHECK(perm.adversarial_accuracy == base.adversarial_accuracy);

  Dataset one = grid2({{0, 0}}, "synthetic");
  CHECK_THROWS_AS(adversarial_accuracy(real, one, p, Metric::euclidean), Error);
}

TEST_CASE("privacy loss subtracts train from holdout accuracy") {
  AaPlResult train;
  train.adversarial_accuracy = 0.3;
  AaPlResult holdout;
  holdout.adversarial_accuracy = 0.5;
  CHECK(privacy_loss(train, holdout) == Approx(0.2));
  CHECK(privacy_loss(holdout, train) == Approx(-0.2));
}

TEST_CASE("tcap is exactly one when unique keys copy over") {
  auto attrs = std::vector<Attribute>{cat_attr("k", {"a", "b", "c", "d"}),
                                      cat_attr("t", {"x", "y"})};
  Dataset real = make_dataset(attrs, {{std::string("a"), std::string("x")},
                                      {std::string("b"), std::string("y")},
                                      {std::string("c"), std::string("x")},
                                      {std::string("d"), std::string("y")}});
  TcapResult r = tcap(real, real.relabeled("synthetic"), {"k"}, "t");
  CHECK(r.value == 1.0);
  CHECK(r.matched == 4);
  CHECK(r.unmatched == 0);
}

TEST_CASE("tcap averages class shares over matched reals only") {
  auto attrs = std::vector<Attribute>{cat_attr("k", {"k1", "k2", "k3"}),
                                      cat_attr("t", {"a", "b", "c"})};
  Dataset synth = make_dataset(attrs, {{std::string("k1"), std::string("a")},
                                       {std::string("k1"), std::string("a")},
                                       {std::string("k1"), std::string("a")},
                                       {std::string("k1"), std::string("b")}},
                               "synthetic");
  Dataset real = make_dataset(attrs, {{std::string("k1"), std::string("a")},
                                      {std::string("k1"), std::string("b")},
                                      {std::string("k1"), std::string("c")},
                                      {std::string("k2"), std::string("a")}});
  TcapResult r = tcap(real, synth, {"k"}, "t");
  // matched shares: 3/4, 1/4, 0/4; the k2 record is unmatched
  CHECK(r.value == Approx(1.0 / 3.0));
  CHECK(r.matched == 3);
  CHECK(r.unmatched == 1);
}

TEST_CASE("tcap with numeric keys and no overlap") {
  auto attrs = std::vector<Attribute>{num_attr("age"), cat_attr("t", {"x", "y"})};
  Dataset real = make_dataset(attrs, {{30.0, std::string("x")}, {40.0, std::string("y")}});
  Dataset synth = make_dataset(attrs, {{31.0, std::string("x")}, {41.0, std::string("y")}},
                               "synthetic");
  CHECK_THROWS_AS(tcap(real, synth, {"age"}, "t"), Error);
  try {
    tcap(real, synth, {"age"}, "t");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_matches);
  }
}

TEST_CASE("tcap attribute validation") {
  auto attrs = std::vector<Attribute>{num_attr("age"), cat_attr("t", {"x", "y"})};
  Dataset d = make_dataset(attrs, {{30.0, std::string("x")}});
  Dataset s = d.relabeled("synthetic");
  CHECK_THROWS_AS(tcap(d, s, {}, "t"), Error);
  CHECK_THROWS_AS(tcap(d, s, {"t"}, "t"), Error);
  CHECK_THROWS_AS(tcap(d, s, {"age"}, "age"), Error);  // numeric target
  CHECK_THROWS_AS(tcap(d, s, {"nope"}, "t"), Error);
}

TEST_CASE("mmd of identical sets is nonpositive up to rounding") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Dataset real = cloud(seed, 20, 0.0, 0.0, 4.0, "real");
    Dataset copy = real.relabeled("synthetic");
    Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, real, copy);
    CHECK(mmd(real, copy, p) <= 1e-9);
  }
}

TEST_CASE("mmd separates distant clouds") {
  Dataset real = cloud(11, 40, 0.0, 0.0, 1.0, "real");
  Dataset synth = cloud(12, 40, 10.0, 10.0, 1.0, "synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, real, synth);
  CHECK(mmd(real, synth, p) > 0.5);
}

TEST_CASE("mmd is exactly symmetric") {
  for (uint64_t seed = 20; seed < 24; ++seed) {
    Dataset a = cloud(seed, 15, 0.0, 0.0, 2.0, "real");
    Dataset b = cloud(seed + 100, 18, 1.0, 0.5, 2.0, "synthetic");
    Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, a, b);
    double ab = mmd(a, b, p);
    double ba = mmd(b.relabeled("real"), a.relabeled("synthetic"), p);
    CHECK(ab == ba);
  }
}

TEST_CASE("mmd degenerates when every pairwise distance is zero") {
  Dataset fit_r = grid2({{0, 0}, {10, 10}}, "real");
  Dataset fit_s = grid2({{0, 10}, {10, 0}}, "synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, fit_r, fit_s);
  Dataset point = grid2({{5, 5}, {5, 5}}, "real");
  CHECK_THROWS_AS(mmd(point, point.relabeled("synthetic"), p), Error);
  try {
    mmd(point, point.relabeled("synthetic"), p);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_bandwidth);
  }

  Dataset one = grid2({{5, 5}}, "real");
  CHECK_THROWS_AS(mmd(one, one.relabeled("synthetic"), p), Error);
}

TEST_CASE("seed indicators with perfectly memorized counterparts") {
  Dataset seeds = grid2({{0, 0}, {10, 0}, {20, 0}, {30, 0}}, "real");
  Dataset synth = seeds.relabeled("synthetic");
  Preprocessor p = Preprocessor::fit(IgnoreCategoricalStrategy{}, Metric::euclidean, seeds, synth);
  SeedIndicators si = seed_indicators(seeds, synth, p, Metric::euclidean);
  CHECK(si.hidden_rate == 0.0);
  CHECK(si.dbrl_rate == 1.0);
  for (size_t c : si.local_cloaking) CHECK(c == 0);
}

TEST_CASE("seed indicators spot a displaced counterpart") {
  Dataset seeds = grid2({{0, 0}, {10, 0}, {20, 0}, {30, 0}}, "real");
  Dataset synth = grid2({{0, 0}, {10, 0}, {20, 0}, {45, 0}}, "synthetic");
  Preprocessor p = Preprocessor::fit(IgnoreCategoricalStrategy{}, Metric::euclidean, seeds, synth);
  SeedIndicators si = seed_indicators(seeds, synth, p, Metric::euclidean);
  // seed 3 sits at 30: its counterpart drifted to 45 while synthetic row 2
  // (at 20) is strictly closer
  CHECK(si.local_cloaking == std::vector<size_t>{0, 0, 0, 1});
  CHECK(si.hidden_rate == Approx(0.25));
  CHECK(si.dbrl_rate == Approx(0.75));
  CHECK(si.dbrl_rate + si.hidden_rate == 1.0);
}

TEST_CASE("seed indicators require equal sizes") {
  Dataset seeds = grid2({{0, 0}, {1, 1}}, "real");
  Dataset synth = grid2({{0, 0}}, "synthetic");
  Preprocessor p = Preprocessor::fit(IgnoreCategoricalStrategy{}, Metric::euclidean, seeds, seeds.relabeled("synthetic"));
  CHECK_THROWS_AS(seed_indicators(seeds, synth, p, Metric::euclidean), Error);
  try {
    seed_indicators(seeds, synth, p, Metric::euclidean);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::size_mismatch);
  }
}

TEST_CASE("seed indicators stay the same across thread counts") {
  Dataset seeds = cloud(31, 40, 0.0, 0.0, 5.0, "real");
  Dataset synth = cloud(32, 40, 0.2, 0.1, 5.0, "synthetic");
  Preprocessor p = Preprocessor::fit(EmbedStrategy{}, Metric::euclidean, seeds, synth);
  SeedIndicators a = seed_indicators(seeds, synth, p, Metric::euclidean, 1);
  SeedIndicators b = seed_indicators(seeds, synth, p, Metric::euclidean, 4);
  CHECK(a.local_cloaking == b.local_cloaking);
  CHECK(a.hidden_rate == b.hidden_rate);
}
