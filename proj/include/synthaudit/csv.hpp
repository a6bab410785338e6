#pragma once

#include <filesystem>
#include <string>

#include "synthaudit/dataset.hpp"

namespace synthaudit {

// Tag selecting schema inference: a column is numeric when every non-empty
// field parses as a number, otherwise categorical with the sorted set of
// observed values as its domain.
struct InferSchema {};

// RFC 4180 style CSV with a header row. Quoted fields may contain commas,
// quotes ("" escape) and newlines; an empty field is a missing value.
Dataset load_csv(const std::filesystem::path& path, const AttributeSchema& schema,
                 std::string label);
Dataset load_csv(const std::filesystem::path& path, InferSchema, std::string label);

void save_csv(const Dataset& d, const std::filesystem::path& path);

AttributeSchema load_schema_json(const std::filesystem::path& path);
void save_schema_json(const AttributeSchema& schema, const std::filesystem::path& path);

}  // namespace synthaudit
