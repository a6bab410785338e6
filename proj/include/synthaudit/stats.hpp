#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace synthaudit::stats {

double mean(std::span<const double> v);
// Sample standard deviation (n-1); 0 for fewer than 2 values.
double stddev(std::span<const double> v);
double median(std::span<const double> v);

// Linear interpolation between order statistics: rank = q/100 * (n-1).
double percentile(std::span<const double> v, double q);

// Two-sample Kolmogorov-Smirnov statistic: sup |ECDF_a - ECDF_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Survival function of the Kolmogorov distribution, Q(x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_sf(double x);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for a binomial proportion (z defaults to 95%).
Interval wilson(size_t successes, size_t trials, double z = 1.959963984540054);

// Area under the ROC curve by rank statistic, ties averaged.
double rank_auc(std::span<const double> positive_scores, std::span<const double> negative_scores);

}  // namespace synthaudit::stats
