#include "synthaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "synthaudit/rng.hpp"

namespace synthaudit {

std::string value_to_string(const Value& v) {
  if (is_missing(v)) return "";
  if (const double* d = std::get_if<double>(&v)) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), *d);
    return std::string(buf, res.ptr);
  }
  return std::get<std::string>(v);
}

bool value_less(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (std::holds_alternative<double>(a)) return std::get<double>(a) < std::get<double>(b);
  if (std::holds_alternative<std::string>(a)) {
    return std::get<std::string>(a) < std::get<std::string>(b);
  }
  return false;  // both missing
}

bool record_less(const Record& a, const Record& b) {
  return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(),
                                      b.values.end(), value_less);
}

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  require(!attributes_.empty(), Errc::schema_violation, "schema has no attributes");
  for (size_t i = 0; i < attributes_.size(); ++i) {
    const Attribute& a = attributes_[i];
    require(!a.name.empty(), Errc::schema_violation, "attribute name is empty");
    require(by_name_.emplace(a.name, i).second, Errc::schema_violation,
            "duplicate attribute name '" + a.name + "'");
    if (a.is_categorical()) {
      const auto& dom = a.categorical().domain;
      require(!dom.empty(), Errc::schema_violation,
              "categorical attribute '" + a.name + "' has an empty domain");
      std::set<std::string_view> seen;
      for (const auto& v : dom) {
        require(!v.empty(), Errc::schema_violation,
                "empty string in domain of '" + a.name + "' (reserved for missing)");
        require(seen.insert(v).second, Errc::schema_violation,
                "duplicate domain value '" + v + "' in '" + a.name + "'");
      }
    } else {
      const auto& nk = a.numeric();
      if (nk.min && nk.max) {
        require(*nk.min <= *nk.max, Errc::schema_violation,
                "attribute '" + a.name + "' has min > max");
      }
    }
  }
}

const Attribute& AttributeSchema::at(size_t i) const {
  require(i < attributes_.size(), Errc::out_of_range, "attribute index out of range");
  return attributes_[i];
}

std::optional<size_t> AttributeSchema::index_of(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

size_t AttributeSchema::require_attribute(std::string_view name) const {
  auto idx = index_of(name);
  require(idx.has_value(), Errc::bad_attribute,
          "unknown attribute '" + std::string(name) + "'");
  return *idx;
}

std::optional<size_t> AttributeSchema::domain_code(size_t attr, std::string_view value) const {
  const auto& dom = at(attr).categorical().domain;
  auto it = std::find(dom.begin(), dom.end(), value);
  if (it == dom.end()) return std::nullopt;
  return static_cast<size_t>(it - dom.begin());
}

void Dataset::validate_record(const AttributeSchema& schema, const Record& r, size_t row_index) {
  require(r.values.size() == schema.size(), Errc::schema_violation,
          "row " + std::to_string(row_index) + " has " + std::to_string(r.values.size()) +
              " fields, schema expects " + std::to_string(schema.size()));
  for (size_t a = 0; a < schema.size(); ++a) {
    const Value& v = r.values[a];
    if (is_missing(v)) continue;
    const Attribute& attr = schema.at(a);
    if (attr.is_numeric()) {
      const double* d = std::get_if<double>(&v);
      require(d != nullptr, Errc::schema_violation,
              "row " + std::to_string(row_index) + ": attribute '" + attr.name +
                  "' expects a numeric value");
      require(std::isfinite(*d), Errc::schema_violation,
              "row " + std::to_string(row_index) + ": non-finite value in '" + attr.name + "'");
      const auto& nk = attr.numeric();
      bool in_bounds = (!nk.min || *d >= *nk.min) && (!nk.max || *d <= *nk.max);
      require(in_bounds, Errc::schema_violation,
              "row " + std::to_string(row_index) + ": value outside bounds of '" + attr.name + "'");
    } else {
      const std::string* s = std::get_if<std::string>(&v);
      require(s != nullptr, Errc::schema_violation,
              "row " + std::to_string(row_index) + ": attribute '" + attr.name +
                  "' expects a categorical value");
      require(schema.domain_code(a, *s).has_value(), Errc::schema_violation,
              "row " + std::to_string(row_index) + ": value '" + *s +
                  "' not in domain of '" + attr.name + "'");
    }
  }
}

Dataset::Dataset(AttributeSchema schema, std::vector<Record> rows, std::string label)
    : schema_(std::move(schema)), rows_(std::move(rows)), label_(std::move(label)) {
  for (size_t i = 0; i < rows_.size(); ++i) validate_record(schema_, rows_[i], i);
}

const Record& Dataset::row(size_t i) const {
  require(i < rows_.size(), Errc::out_of_range, "row index out of range");
  return rows_[i];
}

Dataset Dataset::relabeled(std::string label) const {
  Dataset d = *this;
  d.label_ = std::move(label);
  return d;
}

Dataset Dataset::with_schema(AttributeSchema schema) const {
  return Dataset(std::move(schema), rows_, label_);
}

std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec) {
  require(spec.fraction > 0.0 && spec.fraction < 1.0, Errc::out_of_range,
          "split fraction must lie in (0, 1)");
  require(d.size() >= 2, Errc::too_small, "split needs at least 2 rows");

  size_t n = d.size();
  size_t n_first = static_cast<size_t>(std::floor(spec.fraction * static_cast<double>(n) + 0.5));

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.rng_seed);
  rng.shuffle(order);

  std::vector<size_t> first_idx(order.begin(), order.begin() + n_first);
  std::vector<size_t> second_idx(order.begin() + n_first, order.end());
  std::sort(first_idx.begin(), first_idx.end());
  std::sort(second_idx.begin(), second_idx.end());

  auto gather = [&](const std::vector<size_t>& idx) {
    std::vector<Record> rows;
    rows.reserve(idx.size());
    for (size_t i : idx) rows.push_back(d.row(i));
    return rows;
  };

  const char* first_label = spec.purpose == SplitPurpose::holdout ? "holdout" : "control";
  Dataset first(d.schema(), gather(first_idx), first_label);
  Dataset second(d.schema(), gather(second_idx), d.label());
  return {std::move(first), std::move(second)};
}

CanaryInsertion insert_canaries(const Dataset& d, const std::vector<Record>& canaries,
                                uint64_t rng_seed) {
  std::vector<Record> rows = d.rows();
  std::vector<size_t> positions;
  positions.reserve(canaries.size());
  Rng rng(rng_seed);
  for (size_t c = 0; c < canaries.size(); ++c) {
    const Record& canary = canaries[c];
    Dataset::validate_record(d.schema(), canary, c);
    for (const Record& existing : rows) {
      require(!exact_match(d.schema(), canary, existing), Errc::duplicate_canary,
              "canary " + std::to_string(c) + " already present in dataset");
    }
    size_t pos = static_cast<size_t>(rng.next_below(rows.size() + 1));
    rows.insert(rows.begin() + static_cast<ptrdiff_t>(pos), canary);
    for (size_t& p : positions) {
      if (p >= pos) ++p;
    }
    positions.push_back(pos);
  }
  return {Dataset(d.schema(), std::move(rows), d.label()), std::move(positions)};
}

bool exact_match(const AttributeSchema& schema, const Record& a, const Record& b,
                 double numeric_tolerance) {
  require(a.values.size() == schema.size() && b.values.size() == schema.size(),
          Errc::schema_mismatch, "exact_match: record width differs from schema");
  require(numeric_tolerance >= 0.0, Errc::out_of_range, "numeric tolerance must be >= 0");
  for (size_t i = 0; i < schema.size(); ++i) {
    const Value& va = a.values[i];
    const Value& vb = b.values[i];
    if (is_missing(va) || is_missing(vb)) {
      if (is_missing(va) != is_missing(vb)) return false;
      continue;
    }
    if (schema.at(i).is_numeric()) {
      double da = std::get<double>(va);
      double db = std::get<double>(vb);
      if (std::fabs(da - db) > numeric_tolerance) return false;
    } else {
      if (std::get<std::string>(va) != std::get<std::string>(vb)) return false;
    }
  }
  return true;
}

AttributeSchema unify_schemas(const AttributeSchema& a, const AttributeSchema& b) {
  require(a.size() == b.size(), Errc::schema_mismatch,
          "schemas have different attribute counts");
  std::vector<Attribute> merged;
  merged.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const Attribute& aa = a.at(i);
    const Attribute& ab = b.at(i);
    require(aa.name == ab.name, Errc::schema_mismatch,
            "attribute name mismatch at position " + std::to_string(i) + ": '" + aa.name +
                "' vs '" + ab.name + "'");
    require(aa.is_numeric() == ab.is_numeric(), Errc::schema_mismatch,
            "attribute '" + aa.name + "' is numeric in one schema and categorical in the other");
    if (aa.is_numeric()) {
      NumericKind nk;
      const auto& na = aa.numeric();
      const auto& nb = ab.numeric();
      if (na.min && nb.min) nk.min = std::min(*na.min, *nb.min);
      if (na.max && nb.max) nk.max = std::max(*na.max, *nb.max);
      merged.push_back({aa.name, nk});
    } else {
      std::set<std::string> dom(aa.categorical().domain.begin(), aa.categorical().domain.end());
      dom.insert(ab.categorical().domain.begin(), ab.categorical().domain.end());
      merged.push_back({aa.name, CategoricalKind{{dom.begin(), dom.end()}}});
    }
  }
  return AttributeSchema(std::move(merged));
}

}  // namespace synthaudit
