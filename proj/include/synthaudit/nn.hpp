#pragma once

#include <optional>

#include "synthaudit/distance.hpp"

namespace synthaudit {

// The four cross-set minimum-distance profiles: synthetic-to-real,
// synthetic-to-synthetic, real-to-synthetic and real-to-real.
enum class ProfileKind { srd, ssd, rsd, rrd };

const char* profile_kind_name(ProfileKind k);

struct NearestResult {
  size_t index = 0;
  double distance = 0.0;  // always a distance (similarities already converted)
};

struct DistanceProfile {
  ProfileKind kind = ProfileKind::srd;
  std::vector<double> values;        // one per query record
  std::vector<size_t> argmin_index;  // matching reference row
  Metric metric = Metric::euclidean;
  EvaluationStrategy strategy;
  bool self_excluded = false;
  bool accelerated = false;  // spatial index used (results identical either way)
};

// Minimum as_distance over the reference; ties broken by smallest index.
NearestResult nearest(const Record& query, const Dataset& reference, const Preprocessor& p,
                      Metric spec, std::optional<size_t> exclude_index = std::nullopt);

// k results in nondecreasing (distance, index) order.
std::vector<NearestResult> knn(const Record& query, const Dataset& reference, size_t k,
                               const Preprocessor& p, Metric spec);

// Same, over pre-encoded tables, optionally restricted to masked attributes.
std::vector<NearestResult> knn_prepared(const Preprocessor& p, Metric spec,
                                        const PreparedTable& queries, size_t query_index,
                                        const PreparedTable& reference, size_t k,
                                        const std::vector<char>* attr_mask = nullptr,
                                        std::optional<size_t> exclude_index = std::nullopt);

// Profile of minimum distances from every query row to the reference.
//
// Expected labels: SRD queries the synthetic dataset against a real one, SSD
// the synthetic dataset against itself (pass the same object; self-matches
// are excluded), RSD a real dataset against the synthetic one, RRD a real
// dataset against a real holdout, or against itself with self-exclusion when
// no holdout exists. A dataset counts as synthetic iff its label is
// "synthetic".
//
// Brute force defines the result; the accelerated index (embed strategy,
// L1/Euclidean, no missing values) returns identical values and argmins.
DistanceProfile profile(const Dataset& queries, const Dataset& reference, ProfileKind kind,
                        const Preprocessor& p, Metric spec, int threads = 1,
                        bool force_brute_force = false);

}  // namespace synthaudit
