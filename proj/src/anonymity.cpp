#include "synthaudit/anonymity.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace synthaudit {

namespace {

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
  }
};

std::vector<size_t> resolve_attrs(const Dataset& d, const std::vector<std::string>& names) {
  require(!names.empty(), Errc::bad_attribute, "quasi-identifier set must be nonempty");
  std::vector<size_t> idx;
  std::set<size_t> seen;
  for (const std::string& n : names) {
    size_t i = d.schema().require_attribute(n);
    require(seen.insert(i).second, Errc::bad_attribute,
            "attribute '" + n + "' listed twice in the quasi-identifier set");
    idx.push_back(i);
  }
  return idx;
}

}  // namespace

EquivalencePartition equivalence_classes(const Dataset& d,
                                         const std::vector<std::string>& quasi_identifiers) {
  std::vector<size_t> qi = resolve_attrs(d, quasi_identifiers);
  std::map<std::vector<Value>, std::vector<size_t>, KeyLess> groups;
  for (size_t r = 0; r < d.size(); ++r) {
    std::vector<Value> key;
    key.reserve(qi.size());
    for (size_t a : qi) key.push_back(d.row(r).values[a]);
    groups[std::move(key)].push_back(r);
  }
  EquivalencePartition out;
  out.quasi_identifiers = quasi_identifiers;
  out.classes.reserve(groups.size());
  for (auto& [key, rows] : groups) out.classes.push_back({key, std::move(rows)});
  return out;
}

size_t k_anonymity(const Dataset& d, const std::vector<std::string>& quasi_identifiers) {
  require(!d.empty(), Errc::empty_dataset, "k_anonymity of an empty dataset");
  EquivalencePartition part = equivalence_classes(d, quasi_identifiers);
  size_t k = d.size();
  for (const EquivalenceClass& c : part.classes) k = std::min(k, c.rows.size());
  return k;
}

size_t l_diversity(const Dataset& d, const std::vector<std::string>& quasi_identifiers,
                   const std::string& sensitive) {
  require(!d.empty(), Errc::empty_dataset, "l_diversity of an empty dataset");
  size_t sens = d.schema().require_attribute(sensitive);
  for (const std::string& n : quasi_identifiers) {
    require(d.schema().require_attribute(n) != sens, Errc::bad_attribute,
            "sensitive attribute '" + sensitive + "' is also a quasi-identifier");
  }
  EquivalencePartition part = equivalence_classes(d, quasi_identifiers);
  size_t l = d.size();
  for (const EquivalenceClass& c : part.classes) {
    std::set<Value, decltype(&value_less)> distinct(&value_less);
    for (size_t r : c.rows) distinct.insert(d.row(r).values[sens]);
    l = std::min(l, distinct.size());
  }
  return l;
}

PdResult pd_check(const DensityOracle& density, const Dataset& seeds, const Record& produced,
                  size_t true_seed_index, const PdParams& params) {
  require(params.k >= 2, Errc::bad_params, "pd_check: k must be >= 2");
  require(params.gamma > 1.0, Errc::bad_params, "pd_check: gamma must be > 1");
  require(seeds.size() > params.k, Errc::too_few_seeds,
          "pd_check needs strictly more than k seeds (" + std::to_string(seeds.size()) +
              " <= " + std::to_string(params.k) + ")");
  require(true_seed_index < seeds.size(), Errc::out_of_range,
          "pd_check: true seed index out of range");

  size_t n = seeds.size();
  std::vector<double> dens(n);
  for (size_t i = 0; i < n; ++i) {
    dens[i] = density(seeds.row(i), produced);
    require(dens[i] >= 0.0, Errc::out_of_range, "density oracle returned a negative value");
  }
  require(dens[true_seed_index] > 0.0, Errc::zero_density,
          "true seed has zero density for the produced record");

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (dens[a] != dens[b]) return dens[a] > dens[b];
    return a < b;
  });
  size_t t = 0;
  while (order[t] != true_seed_index) ++t;

  // Slide the largest valid window [lo, hi] over the descending densities;
  // the extreme ratio dens[order[lo]] / dens[order[hi]] bounds all pairwise
  // ratios inside.
  size_t lo = 0;
  for (size_t hi = t; hi < n; ++hi) {
    double dhi = dens[order[hi]];
    if (dhi <= 0.0) break;
    while (dens[order[lo]] > params.gamma * dhi) ++lo;
    if (lo > t) break;
    if (hi - lo + 1 >= params.k) {
      PdResult out;
      out.releasable = true;
      out.witnesses.assign(order.begin() + lo, order.begin() + hi + 1);
      std::sort(out.witnesses.begin(), out.witnesses.end());
      return out;
    }
  }
  return {false, {}};
}

}  // namespace synthaudit
