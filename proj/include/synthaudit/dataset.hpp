#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "synthaudit/error.hpp"

namespace synthaudit {

// A cell is either missing, a numeric value, or a categorical value.
using Value = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Renders a value the way save_csv would (missing -> empty string).
std::string value_to_string(const Value& v);

// Total order over values (missing < numeric < categorical), for
// deterministic grouping and canonical dataset ordering.
bool value_less(const Value& a, const Value& b);

struct CategoricalKind {
  std::vector<std::string> domain;  // unique, non-empty strings
  bool operator==(const CategoricalKind&) const = default;
};

struct NumericKind {
  std::optional<double> min;  // inclusive bounds, optional
  std::optional<double> max;
  bool operator==(const NumericKind&) const = default;
};

struct Attribute {
  std::string name;
  std::variant<NumericKind, CategoricalKind> kind;

  bool is_numeric() const { return std::holds_alternative<NumericKind>(kind); }
  bool is_categorical() const { return std::holds_alternative<CategoricalKind>(kind); }
  const NumericKind& numeric() const { return std::get<NumericKind>(kind); }
  const CategoricalKind& categorical() const { return std::get<CategoricalKind>(kind); }
  bool operator==(const Attribute&) const = default;
};

class AttributeSchema {
 public:
  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<Attribute> attributes);

  size_t size() const { return attributes_.size(); }
  const Attribute& at(size_t i) const;
  const std::vector<Attribute>& attributes() const { return attributes_; }

  std::optional<size_t> index_of(std::string_view name) const;
  // Index of a named attribute; BadAttribute if absent.
  size_t require_attribute(std::string_view name) const;
  // Code of a categorical value within an attribute's domain, or nullopt.
  std::optional<size_t> domain_code(size_t attr, std::string_view value) const;

  bool operator==(const AttributeSchema& other) const { return attributes_ == other.attributes_; }

 private:
  std::vector<Attribute> attributes_;
  std::map<std::string, size_t, std::less<>> by_name_;
};

struct Record {
  std::vector<Value> values;
};

bool record_less(const Record& a, const Record& b);

class Dataset {
 public:
  Dataset() = default;
  Dataset(AttributeSchema schema, std::vector<Record> rows, std::string label);

  const AttributeSchema& schema() const { return schema_; }
  const std::vector<Record>& rows() const { return rows_; }
  const Record& row(size_t i) const;
  size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  // Copy with a different label.
  Dataset relabeled(std::string label) const;
  // Copy revalidated against (and carrying) another schema.
  Dataset with_schema(AttributeSchema schema) const;

  static void validate_record(const AttributeSchema& schema, const Record& r, size_t row_index);

 private:
  AttributeSchema schema_;
  std::vector<Record> rows_;
  std::string label_;
};

enum class SplitPurpose { holdout, control };

struct SplitSpec {
  double fraction = 0.5;  // share of rows in the first (split-off) part
  uint64_t rng_seed = 0;
  SplitPurpose purpose = SplitPurpose::holdout;
};

// Random disjoint partition. The first part gets round(fraction * n) rows
// (half-up) and is labeled "holdout" or "control" by purpose; the second part
// keeps the input label. Row assignment depends only on (rng_seed, n,
// fraction); each part preserves the original row order.
std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec);

struct CanaryInsertion {
  Dataset dataset;
  std::vector<size_t> positions;  // final row index of each canary, in input order
};

// Inserts crafted records at deterministic pseudo-random positions.
// DuplicateCanary if a canary exactly matches a row already present.
CanaryInsertion insert_canaries(const Dataset& d, const std::vector<Record>& canaries,
                                uint64_t rng_seed);

// Field-wise equality; numeric fields compare within |a-b| <= tolerance,
// missing matches only missing.
bool exact_match(const AttributeSchema& schema, const Record& a, const Record& b,
                 double numeric_tolerance = 0.0);

// Union of two schemas with identical attribute names and kinds: categorical
// domains are merged (sorted), numeric bounds widened. Used to reconcile
// independently inferred schemas before cross-dataset operations.
AttributeSchema unify_schemas(const AttributeSchema& a, const AttributeSchema& b);

}  // namespace synthaudit
