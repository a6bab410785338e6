#include "synthaudit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "synthaudit/error.hpp"

namespace synthaudit::stats {

double mean(std::span<const double> v) {
  require(!v.empty(), Errc::empty_sample, "mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::span<const double> v) { return percentile(v, 50.0); }

double percentile(std::span<const double> v, double q) {
  require(!v.empty(), Errc::empty_sample, "percentile of an empty sample");
  require(q >= 0.0 && q <= 100.0, Errc::out_of_range, "percentile level outside [0,100]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  if (s.size() == 1) return s[0];
  double rank = q / 100.0 * static_cast<double>(s.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(rank));
  if (lo >= s.size() - 1) return s.back();
  double frac = rank - static_cast<double>(lo);
  return s[lo] + (s[lo + 1] - s[lo]) * frac;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), Errc::empty_sample, "KS statistic of an empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  double n1 = static_cast<double>(sa.size());
  double n2 = static_cast<double>(sb.size());
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (i < sa.size() && j < sb.size()) x = std::min(sa[i], sb[j]);
    else if (i < sa.size()) x = sa[i];
    else x = sb[j];
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  return d;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  double p = 2.0 * sum;
  return std::clamp(p, 0.0, 1.0);
}

Interval wilson(size_t successes, size_t trials, double z) {
  require(trials > 0, Errc::empty_sample, "Wilson interval needs at least one trial");
  require(successes <= trials, Errc::out_of_range, "successes exceed trials");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double rank_auc(std::span<const double> positive_scores, std::span<const double> negative_scores) {
  require(!positive_scores.empty() && !negative_scores.empty(), Errc::empty_sample,
          "AUC needs both positive and negative scores");
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) items.push_back({s, true});
  for (double s : negative_scores) items.push_back({s, false});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.score < b.score; });
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < items.size()) {
    size_t j = i;
    while (j < items.size() && items[j].score == items[i].score) ++j;
    // ranks are 1-based; tied scores share the average rank
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) {
      if (items[k].positive) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  double np = static_cast<double>(positive_scores.size());
  double nn = static_cast<double>(negative_scores.size());
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace synthaudit::stats
