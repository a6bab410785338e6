#pragma once

#include <string>
#include <vector>

#include "synthaudit/dataset.hpp"
#include "synthaudit/rng.hpp"

namespace synthaudit::testing {

inline Attribute num_attr(std::string name) {
  return Attribute{std::move(name), NumericKind{}};
}

inline Attribute num_attr(std::string name, double min, double max) {
  return Attribute{std::move(name), NumericKind{min, max}};
}

inline Attribute cat_attr(std::string name, std::vector<std::string> domain) {
  return Attribute{std::move(name), CategoricalKind{std::move(domain)}};
}

inline Value missing() { return Value{}; }

// Rows given as value lists; use Value{} for missing cells.
inline Dataset make_dataset(std::vector<Attribute> attrs, std::vector<std::vector<Value>> rows,
                            std::string label = "real") {
  AttributeSchema schema(std::move(attrs));
  std::vector<Record> records;
  for (auto& r : rows) records.push_back(Record{std::move(r)});
  return Dataset(std::move(schema), std::move(records), std::move(label));
}

struct RandomDatasetSpec {
  size_t n_rows = 50;
  size_t n_numeric = 2;
  size_t n_categorical = 2;
  size_t domain_size = 4;
  double missing_prob = 0.0;
  double lo = -5.0, hi = 5.0;
};

// Seeded mixed-type dataset for property tests.
inline Dataset random_dataset(uint64_t seed, const RandomDatasetSpec& spec,
                              std::string label = "real") {
  Rng rng(seed);
  std::vector<Attribute> attrs;
  for (size_t i = 0; i < spec.n_numeric; ++i)
    attrs.push_back(num_attr("num" + std::to_string(i)));
  for (size_t i = 0; i < spec.n_categorical; ++i) {
    std::vector<std::string> domain;
    for (size_t v = 0; v < spec.domain_size; ++v)
      domain.push_back("v" + std::to_string(v));
    attrs.push_back(cat_attr("cat" + std::to_string(i), std::move(domain)));
  }
  AttributeSchema schema(std::move(attrs));

  std::vector<Record> rows;
  for (size_t r = 0; r < spec.n_rows; ++r) {
    Record rec;
    for (size_t a = 0; a < schema.size(); ++a) {
      if (spec.missing_prob > 0.0 && rng.next_double() < spec.missing_prob) {
        rec.values.emplace_back();
      } else if (schema.at(a).is_numeric()) {
        rec.values.emplace_back(spec.lo + (spec.hi - spec.lo) * rng.next_double());
      } else {
        const auto& dom = schema.at(a).categorical().domain;
        rec.values.emplace_back(dom[rng.next_below(dom.size())]);
      }
    }
    rows.push_back(std::move(rec));
  }
  return Dataset(std::move(schema), std::move(rows), std::move(label));
}

inline std::string data_path(const std::string& name) {
  return std::string(SYNTHAUDIT_DATA_DIR) + "/" + name;
}

}  // namespace synthaudit::testing
