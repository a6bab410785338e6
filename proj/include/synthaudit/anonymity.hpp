#pragma once

#include <functional>
#include <string>
#include <vector>

#include "synthaudit/dataset.hpp"

namespace synthaudit {

struct EquivalenceClass {
  std::vector<Value> key;
  std::vector<size_t> rows;
};

struct EquivalencePartition {
  std::vector<std::string> quasi_identifiers;
  std::vector<EquivalenceClass> classes;  // keys distinct, rows partition the dataset
};

// Rows grouped by the exact tuple of quasi-identifier values (numeric values
// compared exactly; missing is its own group value).
EquivalencePartition equivalence_classes(const Dataset& d,
                                         const std::vector<std::string>& quasi_identifiers);

// Minimum equivalence-class size.
size_t k_anonymity(const Dataset& d, const std::vector<std::string>& quasi_identifiers);

// Minimum over classes of the number of distinct sensitive values.
size_t l_diversity(const Dataset& d, const std::vector<std::string>& quasi_identifiers,
                   const std::string& sensitive);

struct PdParams {
  size_t k = 2;        // >= 2
  double gamma = 2.0;  // > 1
};

// Probability density of producing `output` from `seed`.
using DensityOracle = std::function<double(const Record& seed, const Record& output)>;

struct PdResult {
  bool releasable = false;
  std::vector<size_t> witnesses;  // seed indices, includes the true seed when releasable
};

// (k,gamma)-plausible deniability: the produced record is releasable iff at
// least k seeds (the true one among them) have pairwise density ratios within
// [1/gamma, gamma]. Seeds are index-distinct: duplicate seed records count
// separately. Densities are sorted descending and a max/min <= gamma window
// containing the true seed is searched.
PdResult pd_check(const DensityOracle& density, const Dataset& seeds, const Record& produced,
                  size_t true_seed_index, const PdParams& params);

}  // namespace synthaudit
