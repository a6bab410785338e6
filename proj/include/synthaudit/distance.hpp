#pragma once

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "synthaudit/dataset.hpp"

namespace synthaudit {

enum class Metric { l1, euclidean, hamming, cosine, mahalanobis, gower };

const char* metric_name(Metric m);
Metric metric_from_name(std::string_view name);
// Cosine yields a similarity in [-1,1]; everything else is already a distance.
inline bool is_similarity(Metric m) { return m == Metric::cosine; }

// How mixed-type records are turned into something a metric can consume.
//
// Strategy        | compatible metrics
// ----------------+---------------------------------------------------------
// Bin             | Hamming (numeric attributes binned to symbols)
// Aggregate       | Gower (weighted numeric metric + Hamming over categorical);
//                 | L1/Euclidean additionally allowed on all-numeric schemas
// IgnoreCategorical | L1, Euclidean, Cosine on raw numeric attributes
// Embed           | L1, Euclidean, Cosine, Mahalanobis on the embedded vector
//
// A missing value contributes the attribute's maximum possible contribution
// (categorical: one full mismatch; numeric: pooled range, or the largest
// observed coordinate gap in embedded space). Two missing values match.
// Cosine skips attributes missing on either side (pairwise-complete).

struct BinStrategy {
  size_t n_bins = 10;  // >= 2
  bool operator==(const BinStrategy&) const = default;
};

struct AggregateStrategy {
  Metric numeric = Metric::l1;          // L1 or Euclidean
  Metric categorical = Metric::hamming;  // Hamming only
  double weight_numeric = 1.0;
  double weight_categorical = 1.0;
  // Classical range-normalized variant: numeric gaps divided by pooled range,
  // total averaged over attributes. Off by default (unnormalized sum).
  bool normalize = false;
  bool operator==(const AggregateStrategy&) const = default;
};

struct IgnoreCategoricalStrategy {
  bool operator==(const IgnoreCategoricalStrategy&) const = default;
};

struct EmbedStrategy {
  bool operator==(const EmbedStrategy&) const = default;
};

using EvaluationStrategy =
    std::variant<BinStrategy, AggregateStrategy, IgnoreCategoricalStrategy, EmbedStrategy>;

const char* strategy_name(const EvaluationStrategy& s);
void validate_strategy(const EvaluationStrategy& s);

// Per-attribute fitted state. Internal layout, exposed for the distance
// kernels and the nearest-neighbor engine.
struct AttrPrep {
  bool numeric = false;
  size_t domain_size = 0;  // categorical
  // pooled numeric stats over non-missing values
  size_t n_values = 0;
  double min = 0.0, max = 0.0, mean = 0.0, stddev = 0.0, range = 0.0;
  std::vector<double> bin_edges;  // Bin strategy: n_bins+1 ascending edges
  // Embed strategy layout
  size_t emb_offset = 0;
  size_t emb_len = 0;
  bool dropped = false;   // zero-variance numeric coordinate removed
  double emb_gap = 0.0;   // max |difference| per embedded coordinate
};

struct PreprocessorState {
  AttributeSchema schema;
  EvaluationStrategy strategy;
  Metric metric = Metric::euclidean;
  std::vector<AttrPrep> attrs;
  size_t emb_dim = 0;
  std::vector<double> covariance;  // S + lambda*I, row-major emb_dim^2 (Mahalanobis)
  std::vector<double> cholesky;    // lower-triangular factor of covariance
  double lambda = 0.0;
  std::vector<std::string> warnings;
};

// Immutable after fit; distance evaluation is a pure function of the state.
class Preprocessor {
 public:
  Preprocessor() = default;

  // Fits on the pooled rows of both datasets (the data it will be applied to).
  static Preprocessor fit(const EvaluationStrategy& strategy, Metric metric,
                          const Dataset& real, const Dataset& synthetic);

  const AttributeSchema& schema() const { return state_->schema; }
  Metric metric() const { return state_->metric; }
  const EvaluationStrategy& strategy() const { return state_->strategy; }
  const std::vector<std::string>& warnings() const { return state_->warnings; }
  size_t embedded_dim() const { return state_->emb_dim; }
  double numeric_range(size_t attr) const;

  // Embedded representation of a record (Embed strategy only); coordinates of
  // missing attributes are NaN.
  std::vector<double> embed(const Record& r) const;

  // Copy of this preprocessor with the regularized covariance replaced
  // (row-major emb_dim x emb_dim). Mahalanobis only.
  Preprocessor with_covariance(const std::vector<double>& matrix) const;

  const PreprocessorState& state() const { return *state_; }
  bool fitted() const { return state_ != nullptr; }

 private:
  std::shared_ptr<const PreprocessorState> state_;
};

// Columnar encoding of a dataset under a preprocessor, for fast pairwise
// kernels. Internal layout, subject to change.
struct PreparedTable {
  size_t n = 0;
  size_t n_attr = 0;
  size_t emb_dim = 0;
  std::vector<int32_t> cat;  // n*n_attr; code, -1 missing, -2 numeric slot
  std::vector<double> num;   // n*n_attr; raw value, NaN otherwise
  std::vector<int32_t> bin;  // n*n_attr under Bin; symbol code, -1 missing
  std::vector<double> emb;   // n*emb_dim under Embed; NaN for missing attrs
  std::vector<char> row_missing;
  bool any_missing = false;

  static PreparedTable build(const Preprocessor& p, const Dataset& d);
};

// Table 2 metrics on the preprocessed representation. Cosine returns a
// similarity; everything else a distance. `spec` must be compatible with the
// preprocessor's strategy (IncompatibleMetric otherwise); Mahalanobis
// additionally requires the preprocessor to have been fitted for it.
double distance(const Preprocessor& p, Metric spec, const Record& a, const Record& b);
double pair_distance(const Preprocessor& p, Metric spec, const PreparedTable& ta, size_t i,
                     const PreparedTable& tb, size_t j);

// Same, restricted to attributes with mask[attr] != 0 (adversaries with
// partial knowledge). Not available for Mahalanobis.
double distance_masked(const Preprocessor& p, Metric spec, const Record& a, const Record& b,
                       const std::vector<char>& attr_mask);
double pair_distance_masked(const Preprocessor& p, Metric spec, const PreparedTable& ta, size_t i,
                            const PreparedTable& tb, size_t j,
                            const std::vector<char>& attr_mask);

// Identity for true distances; cosine similarity mapped to 1 - value.
double as_distance(Metric spec, double value);

}  // namespace synthaudit
