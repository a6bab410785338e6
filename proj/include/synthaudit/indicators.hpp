#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synthaudit/nn.hpp"

namespace synthaudit {

inline constexpr std::array<double, 7> kReportedPercentiles = {1, 5, 25, 50, 75, 95, 99};

struct ProfileStats {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  std::array<double, 7> percentiles{};  // levels 1,5,25,50,75,95,99
};

struct DcrSummary {
  double proportion_at_risk = 0.0;
  ProfileStats srd;
  ProfileStats rrd;
  std::vector<char> at_risk;  // one flag per synthetic record
  bool holdout_used = false;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  size_t n1 = 0;
  size_t n2 = 0;
  double alpha = 0.05;
  bool reject = false;
  bool reject_at_005 = false;
  bool reject_at_001 = false;
  // "asymptotic", "permutation_exact" or "permutation_sampled"
  std::string p_method;
};

struct AaPlResult {
  double adversarial_accuracy = 0.0;
  double privacy_loss = 0.0;  // filled by privacy_loss() when a holdout exists
  double component_real = 0.0;
  double component_synthetic = 0.0;
};

struct TcapResult {
  double value = 0.0;
  size_t matched = 0;    // real records whose key combination occurs in synthetic
  size_t unmatched = 0;  // excluded from the mean
};

struct SeedIndicators {
  double dbrl_rate = 0.0;    // seeds whose own counterpart is their synthetic NN
  double hidden_rate = 0.0;  // complement: some other synthetic record is strictly closer
  std::vector<size_t> local_cloaking;
};

// Identical match share: fraction of synthetic rows exactly matching >= 1 real row.
double ims(const Dataset& real, const Dataset& synthetic, double tolerance = 0.0);

// Distance-to-closest-record comparison: synthetic record i is flagged iff
// srd.values[i] < rrd.values[srd.argmin_index[i]] (its nearest real record's
// own nearest-neighbor distance).
DcrSummary dcr_summary(const DistanceProfile& srd, const DistanceProfile& rrd);

// Share of SRD values strictly below the q-th percentile of RRD.
double below_percentile_share(const DistanceProfile& srd, const DistanceProfile& rrd,
                              double q = 5.0);

// Exact sup-difference statistic; asymptotic p-value with effective size
// n1*n2/(n1+n2), replaced by a permutation p-value (full enumeration when
// cheap, otherwise 10,000 seeded draws) when min(n1,n2) < 10.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.05,
                       uint64_t permutation_seed = 0x4b53);

// Nearest-neighbor adversarial accuracy:
//   AA = 1/2 [ mean_i 1(RSD_i > RRD_self_i) + mean_j 1(SRD_j > SSD_j) ].
// Ties count as "not greater". 0.5 is the indistinguishable ideal; near 0
// means the synthetic data hugs the real records.
AaPlResult adversarial_accuracy(const Dataset& real, const Dataset& synthetic,
                                const Preprocessor& p, Metric spec, int threads = 1);

// AA(holdout) - AA(train); positive values mean the synthetic data sits
// closer to the training records than to fresh ones.
double privacy_loss(const AaPlResult& train_result, const AaPlResult& holdout_result);

// Correct-attribution probability over key-equivalence classes.
TcapResult tcap(const Dataset& real, const Dataset& synthetic,
                const std::vector<std::string>& key_attrs, const std::string& target_attr);

// Unbiased MMD^2 U-statistic, RBF kernel on embedded Euclidean distances,
// median-heuristic bandwidth (mean fallback). Exactly symmetric in (real,
// synthetic): arguments are ordered canonically before summation.
double mmd(const Dataset& real, const Dataset& synthetic, const Preprocessor& p);

// Seed-paired indicators: row i of `real` is the seed of synthetic row i.
SeedIndicators seed_indicators(const Dataset& real, const Dataset& synthetic,
                               const Preprocessor& p, Metric spec, int threads = 1);

}  // namespace synthaudit
