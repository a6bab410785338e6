#include "synthaudit/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "synthaudit/parallel.hpp"
#include "synthaudit/rng.hpp"
#include "synthaudit/stats.hpp"

namespace synthaudit {

namespace {

std::string encode_row(const Record& r) {
  std::string key;
  for (const Value& v : r.values) {
    if (const double* d = std::get_if<double>(&v)) {
      key += value_to_string(*d == 0.0 ? Value(0.0) : v);  // fold -0.0 into 0.0
    } else {
      key += value_to_string(v);
    }
    key += '\x1f';
  }
  return key;
}

ProfileStats profile_stats(std::span<const double> values) {
  ProfileStats s;
  s.mean = stats::mean(values);
  s.median = stats::median(values);
  s.stddev = stats::stddev(values);
  for (size_t i = 0; i < kReportedPercentiles.size(); ++i) {
    s.percentiles[i] = stats::percentile(values, kReportedPercentiles[i]);
  }
  return s;
}

void check_srd_rrd(const DistanceProfile& srd, const DistanceProfile& rrd) {
  require(srd.kind == ProfileKind::srd, Errc::profile_mismatch,
          "expected an SRD profile, got " + std::string(profile_kind_name(srd.kind)));
  require(rrd.kind == ProfileKind::rrd, Errc::profile_mismatch,
          "expected an RRD profile, got " + std::string(profile_kind_name(rrd.kind)));
  require(srd.metric == rrd.metric && srd.strategy == rrd.strategy, Errc::profile_mismatch,
          "SRD and RRD were computed under different metrics");
  require(!srd.values.empty() && !rrd.values.empty(), Errc::empty_sample,
          "empty distance profile");
  for (size_t idx : srd.argmin_index) {
    require(idx < rrd.values.size(), Errc::profile_mismatch,
            "SRD argmin points outside the real dataset that RRD indexes");
  }
}

bool dataset_less(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    if (record_less(a.row(i), b.row(i))) return true;
    if (record_less(b.row(i), a.row(i))) return false;
  }
  return false;
}

uint64_t binomial_capped(size_t n, size_t k, uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  uint64_t result = 1;
  for (size_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step
    double next = static_cast<double>(result) * static_cast<double>(n - k + i) /
                  static_cast<double>(i);
    if (next > static_cast<double>(cap)) return cap + 1;
    result = result * (n - k + i) / i;
  }
  return result;
}

// KS statistic of the subset of pooled (sorted) values marked as sample a.
double ks_stat_marked(const std::vector<double>& pooled, const std::vector<char>& in_a,
                      size_t n1, size_t n2) {
  double d = 0.0;
  size_t ca = 0, cb = 0;
  size_t i = 0;
  while (i < pooled.size()) {
    double x = pooled[i];
    while (i < pooled.size() && pooled[i] == x) {
      if (in_a[i]) ++ca;
      else ++cb;
      ++i;
    }
    d = std::max(d, std::fabs(static_cast<double>(ca) / static_cast<double>(n1) -
                              static_cast<double>(cb) / static_cast<double>(n2)));
  }
  return d;
}

bool next_combination(std::vector<size_t>& comb, size_t n) {
  size_t k = comb.size();
  size_t i = k;
  while (i > 0) {
    --i;
    if (comb[i] != i + n - k) {
      ++comb[i];
      for (size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double permutation_p_value(std::span<const double> a, std::span<const double> b, double observed,
                           uint64_t seed, std::string& method) {
  size_t n1 = a.size();
  size_t n2 = b.size();
  size_t n = n1 + n2;
  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());

  // The statistic is symmetric in the two samples; enumerate assignments of
  // the smaller group.
  size_t k = std::min(n1, n2);
  std::vector<char> in_a(n, 0);
  constexpr uint64_t kEnumerationCap = 200000;
  uint64_t combos = binomial_capped(n, k, kEnumerationCap);

  if (combos <= kEnumerationCap && n <= 64) {
    method = "permutation_exact";
    std::vector<size_t> comb(k);
    for (size_t i = 0; i < k; ++i) comb[i] = i;
    uint64_t ge = 0, total = 0;
    do {
      std::fill(in_a.begin(), in_a.end(), 0);
      for (size_t idx : comb) in_a[idx] = 1;
      double d = ks_stat_marked(pooled, in_a, k, n - k);
      if (d >= observed - 1e-12) ++ge;
      ++total;
    } while (next_combination(comb, n));
    return static_cast<double>(ge) / static_cast<double>(total);
  }

  method = "permutation_sampled";
  constexpr size_t kDraws = 10000;
  Rng rng(seed);
  uint64_t ge = 0;
  for (size_t t = 0; t < kDraws; ++t) {
    std::fill(in_a.begin(), in_a.end(), 0);
    for (size_t idx : rng.sample_indices(n, k)) in_a[idx] = 1;
    double d = ks_stat_marked(pooled, in_a, k, n - k);
    if (d >= observed - 1e-12) ++ge;
  }
  return static_cast<double>(ge + 1) / static_cast<double>(kDraws + 1);
}

}  // namespace

double ims(const Dataset& real, const Dataset& synthetic, double tolerance) {
  require(real.schema() == synthetic.schema(), Errc::schema_mismatch,
          "ims: datasets do not share a schema");
  require(tolerance >= 0.0, Errc::out_of_range, "ims: tolerance must be >= 0");
  require(!synthetic.empty(), Errc::empty_dataset, "ims: empty synthetic dataset");
  require(!real.empty(), Errc::empty_dataset, "ims: empty real dataset");
  size_t matches = 0;
  if (tolerance == 0.0) {
    std::unordered_set<std::string> real_rows;
    real_rows.reserve(real.size() * 2);
    for (const Record& r : real.rows()) real_rows.insert(encode_row(r));
    for (const Record& s : synthetic.rows()) {
      if (real_rows.count(encode_row(s))) ++matches;
    }
  } else {
    for (const Record& s : synthetic.rows()) {
      for (const Record& r : real.rows()) {
        if (exact_match(real.schema(), s, r, tolerance)) {
          ++matches;
          break;
        }
      }
    }
  }
  return static_cast<double>(matches) / static_cast<double>(synthetic.size());
}

DcrSummary dcr_summary(const DistanceProfile& srd, const DistanceProfile& rrd) {
  check_srd_rrd(srd, rrd);
  DcrSummary out;
  out.at_risk.resize(srd.values.size());
  size_t flagged = 0;
  for (size_t i = 0; i < srd.values.size(); ++i) {
    bool risk = srd.values[i] < rrd.values[srd.argmin_index[i]];
    out.at_risk[i] = risk ? 1 : 0;
    if (risk) ++flagged;
  }
  out.proportion_at_risk = static_cast<double>(flagged) / static_cast<double>(srd.values.size());
  out.srd = profile_stats(srd.values);
  out.rrd = profile_stats(rrd.values);
  out.holdout_used = !rrd.self_excluded;
  return out;
}

double below_percentile_share(const DistanceProfile& srd, const DistanceProfile& rrd, double q) {
  check_srd_rrd(srd, rrd);
  require(q > 0.0 && q < 100.0, Errc::out_of_range,
          "below_percentile_share: q must lie in (0,100)");
  double cutoff = stats::percentile(rrd.values, q);
  size_t below = 0;
  for (double v : srd.values) {
    if (v < cutoff) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(srd.values.size());
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha,
                       uint64_t permutation_seed) {
  require(!a.empty() && !b.empty(), Errc::empty_sample, "ks_two_sample: empty sample");
  require(alpha > 0.0 && alpha < 1.0, Errc::out_of_range, "ks_two_sample: alpha outside (0,1)");
  KsResult r;
  r.n1 = a.size();
  r.n2 = b.size();
  r.alpha = alpha;
  r.statistic = stats::ks_statistic(a, b);
  if (std::min(r.n1, r.n2) < 10) {
    r.p_value = permutation_p_value(a, b, r.statistic, permutation_seed, r.p_method);
  } else {
    double ne = static_cast<double>(r.n1) * static_cast<double>(r.n2) /
                static_cast<double>(r.n1 + r.n2);
    r.p_value = stats::kolmogorov_sf(std::sqrt(ne) * r.statistic);
    r.p_method = "asymptotic";
  }
  r.reject = r.p_value < alpha;
  r.reject_at_005 = r.p_value < 0.05;
  r.reject_at_001 = r.p_value < 0.01;
  return r;
}

AaPlResult adversarial_accuracy(const Dataset& real, const Dataset& synthetic,
                                const Preprocessor& p, Metric spec, int threads) {
  require(real.size() >= 2 && synthetic.size() >= 2, Errc::too_small,
          "adversarial_accuracy needs at least 2 rows on each side");
  DistanceProfile rsd = profile(real, synthetic, ProfileKind::rsd, p, spec, threads);
  DistanceProfile rrd_self = profile(real, real, ProfileKind::rrd, p, spec, threads);
  DistanceProfile srd = profile(synthetic, real, ProfileKind::srd, p, spec, threads);
  DistanceProfile ssd = profile(synthetic, synthetic, ProfileKind::ssd, p, spec, threads);

  size_t real_wins = 0;
  for (size_t i = 0; i < real.size(); ++i) {
    if (rsd.values[i] > rrd_self.values[i]) ++real_wins;
  }
  size_t synth_wins = 0;
  for (size_t j = 0; j < synthetic.size(); ++j) {
    if (srd.values[j] > ssd.values[j]) ++synth_wins;
  }
  AaPlResult out;
  out.component_real = static_cast<double>(real_wins) / static_cast<double>(real.size());
  out.component_synthetic =
      static_cast<double>(synth_wins) / static_cast<double>(synthetic.size());
  out.adversarial_accuracy = 0.5 * (out.component_real + out.component_synthetic);
  return out;
}

double privacy_loss(const AaPlResult& train_result, const AaPlResult& holdout_result) {
  return holdout_result.adversarial_accuracy - train_result.adversarial_accuracy;
}

TcapResult tcap(const Dataset& real, const Dataset& synthetic,
                const std::vector<std::string>& key_attrs, const std::string& target_attr) {
  require(real.schema() == synthetic.schema(), Errc::schema_mismatch,
          "tcap: datasets do not share a schema");
  require(!key_attrs.empty(), Errc::bad_attribute, "tcap: key_attrs must be nonempty");
  size_t target = real.schema().require_attribute(target_attr);
  require(real.schema().at(target).is_categorical(), Errc::bad_attribute,
          "tcap: target attribute must be categorical");
  std::vector<size_t> keys;
  for (const std::string& k : key_attrs) {
    size_t idx = real.schema().require_attribute(k);
    require(idx != target, Errc::bad_attribute, "tcap: target attribute listed as a key");
    keys.push_back(idx);
  }

  auto key_of = [&](const Record& r) {
    std::string k;
    for (size_t idx : keys) {
      k += value_to_string(r.values[idx]);
      k += '\x1f';
    }
    return k;
  };

  struct ClassInfo {
    size_t size = 0;
    std::map<std::string, size_t> target_counts;  // value_to_string keyed
  };
  std::map<std::string, ClassInfo> classes;
  for (const Record& s : synthetic.rows()) {
    ClassInfo& c = classes[key_of(s)];
    ++c.size;
    ++c.target_counts[value_to_string(s.values[target])];
  }

  double sum = 0.0;
  size_t matched = 0, unmatched = 0;
  for (const Record& r : real.rows()) {
    auto it = classes.find(key_of(r));
    if (it == classes.end()) {
      ++unmatched;
      continue;
    }
    ++matched;
    const ClassInfo& c = it->second;
    auto tc = c.target_counts.find(value_to_string(r.values[target]));
    size_t share = tc == c.target_counts.end() ? 0 : tc->second;
    sum += static_cast<double>(share) / static_cast<double>(c.size);
  }
  require(matched > 0, Errc::no_matches, "tcap: no real key combination occurs in synthetic data");
  return {sum / static_cast<double>(matched), matched, unmatched};
}

double mmd(const Dataset& real, const Dataset& synthetic, const Preprocessor& p) {
  require(std::holds_alternative<EmbedStrategy>(p.strategy()), Errc::incompatible_metric,
          "mmd requires an embed preprocessor");
  require(real.size() >= 2 && synthetic.size() >= 2, Errc::too_small,
          "mmd needs at least 2 rows on each side");
  // Canonical argument order makes mmd(A,B) and mmd(B,A) run the identical
  // floating-point summation.
  const Dataset* first = &real;
  const Dataset* second = &synthetic;
  if (dataset_less(*second, *first)) std::swap(first, second);

  PreparedTable ta = PreparedTable::build(p, *first);
  PreparedTable tb = PreparedTable::build(p, *second);
  size_t m = ta.n, n = tb.n;

  std::vector<double> pairwise;
  pairwise.reserve((m + n) * (m + n - 1) / 2);
  auto dist = [&](const PreparedTable& x, size_t i, const PreparedTable& y, size_t j) {
    return pair_distance(p, Metric::euclidean, x, i, y, j);
  };
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) pairwise.push_back(dist(ta, i, ta, j));
    for (size_t j = 0; j < n; ++j) pairwise.push_back(dist(ta, i, tb, j));
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) pairwise.push_back(dist(tb, i, tb, j));
  }
  double h = stats::median(pairwise);
  if (h == 0.0) h = stats::mean(pairwise);
  require(h > 0.0, Errc::degenerate_bandwidth,
          "all pairwise distances are zero; kernel bandwidth undefined");
  double inv = 1.0 / (2.0 * h * h);
  auto kernel = [&](double d) { return std::exp(-d * d * inv); };

  double sum_xx = 0.0;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      if (i != j) sum_xx += kernel(dist(ta, i, ta, j));
    }
  }
  double sum_yy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j) sum_yy += kernel(dist(tb, i, tb, j));
    }
  }
  double sum_xy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) sum_xy += kernel(dist(ta, i, tb, j));
  }
  double md = static_cast<double>(m);
  double nd = static_cast<double>(n);
  return sum_xx / (md * (md - 1.0)) + sum_yy / (nd * (nd - 1.0)) - 2.0 * sum_xy / (md * nd);
}

SeedIndicators seed_indicators(const Dataset& real, const Dataset& synthetic,
                               const Preprocessor& p, Metric spec, int threads) {
  require(real.size() == synthetic.size(), Errc::size_mismatch,
          "seed_indicators: seed and synthetic datasets differ in size");
  require(!real.empty(), Errc::empty_dataset, "seed_indicators: empty datasets");
  PreparedTable tr = PreparedTable::build(p, real);
  PreparedTable ts = PreparedTable::build(p, synthetic);
  size_t n = real.size();
  SeedIndicators out;
  out.local_cloaking.resize(n);
  parallel_for(n, threads, [&](size_t i) {
    double own = as_distance(spec, pair_distance(p, spec, tr, i, ts, i));
    size_t closer = 0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = as_distance(spec, pair_distance(p, spec, tr, i, ts, j));
      if (d < own) ++closer;
    }
    out.local_cloaking[i] = closer;
  });
  size_t hidden = 0;
  for (size_t c : out.local_cloaking) {
    if (c > 0) ++hidden;
  }
  out.hidden_rate = static_cast<double>(hidden) / static_cast<double>(n);
  out.dbrl_rate = 1.0 - out.hidden_rate;
  return out;
}

}  // namespace synthaudit
