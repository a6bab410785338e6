#include "synthaudit/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace synthaudit {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), Errc::io_error, "read failed for '" + path.string() + "'");
  return buf.str();
}

// Parses the full text into rows of raw fields.
std::vector<std::vector<std::string>> parse_csv_text(const std::string& text,
                                                     const std::string& origin) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  size_t i = 0;
  size_t n = text.size();
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };
  while (i < n) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field.push_back(c);
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"':
        require(field.empty(), Errc::io_error,
                "stray quote inside unquoted field in '" + origin + "'");
        in_quotes = true;
        row_started = true;
        ++i;
        break;
      case ',':
        end_field();
        row_started = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_row();
        ++i;
        break;
      default:
        field.push_back(c);
        row_started = true;
        ++i;
        break;
    }
  }
  require(!in_quotes, Errc::io_error, "unterminated quoted field in '" + origin + "'");
  if (row_started || !row.empty() || !field.empty()) end_row();
  return rows;
}

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::string csv_escape(const std::string& s) {
  bool needs_quotes = s.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> load_table(const std::filesystem::path& path) {
  auto rows = parse_csv_text(read_file(path), path.string());
  require(!rows.empty(), Errc::io_error, "'" + path.string() + "' has no header row");
  require(rows.size() >= 2, Errc::empty_dataset, "'" + path.string() + "' has no data rows");
  size_t width = rows[0].size();
  for (size_t r = 1; r < rows.size(); ++r) {
    require(rows[r].size() == width, Errc::io_error,
            "'" + path.string() + "' row " + std::to_string(r) + " has " +
                std::to_string(rows[r].size()) + " fields, header has " + std::to_string(width));
  }
  for (const auto& name : rows[0]) {
    require(!name.empty(), Errc::io_error, "'" + path.string() + "' has an empty column name");
  }
  return rows;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const AttributeSchema& schema,
                 std::string label) {
  auto table = load_table(path);
  const auto& header = table[0];
  require(header.size() == schema.size(), Errc::schema_violation,
          "'" + path.string() + "' has " + std::to_string(header.size()) +
              " columns, schema expects " + std::to_string(schema.size()));
  for (size_t a = 0; a < schema.size(); ++a) {
    require(header[a] == schema.at(a).name, Errc::schema_violation,
            "'" + path.string() + "' column " + std::to_string(a) + " is '" + header[a] +
                "', schema expects '" + schema.at(a).name + "'");
  }
  std::vector<Record> records;
  records.reserve(table.size() - 1);
  for (size_t r = 1; r < table.size(); ++r) {
    Record rec;
    rec.values.reserve(schema.size());
    for (size_t a = 0; a < schema.size(); ++a) {
      const std::string& raw = table[r][a];
      if (raw.empty()) {
        rec.values.emplace_back(std::monostate{});
      } else if (schema.at(a).is_numeric()) {
        double d = 0.0;
        require(parse_number(raw, d), Errc::schema_violation,
                "'" + path.string() + "' row " + std::to_string(r) + ": '" + raw +
                    "' is not numeric (attribute '" + schema.at(a).name + "')");
        rec.values.emplace_back(d);
      } else {
        rec.values.emplace_back(raw);
      }
    }
    records.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(records), std::move(label));
}

Dataset load_csv(const std::filesystem::path& path, InferSchema, std::string label) {
  auto table = load_table(path);
  const auto& header = table[0];
  size_t width = header.size();

  std::vector<Attribute> attrs;
  attrs.reserve(width);
  for (size_t a = 0; a < width; ++a) {
    bool numeric = true;
    bool any_value = false;
    for (size_t r = 1; r < table.size(); ++r) {
      const std::string& raw = table[r][a];
      if (raw.empty()) continue;
      any_value = true;
      double d;
      if (!parse_number(raw, d)) {
        numeric = false;
        break;
      }
    }
    if (numeric && any_value) {
      attrs.push_back({header[a], NumericKind{}});
    } else {
      std::set<std::string> domain;
      for (size_t r = 1; r < table.size(); ++r) {
        if (!table[r][a].empty()) domain.insert(table[r][a]);
      }
      require(!domain.empty(), Errc::degenerate_attribute,
              "'" + path.string() + "' column '" + header[a] + "' is entirely missing");
      attrs.push_back({header[a], CategoricalKind{{domain.begin(), domain.end()}}});
    }
  }
  AttributeSchema schema(std::move(attrs));

  std::vector<Record> records;
  records.reserve(table.size() - 1);
  for (size_t r = 1; r < table.size(); ++r) {
    Record rec;
    rec.values.reserve(width);
    for (size_t a = 0; a < width; ++a) {
      const std::string& raw = table[r][a];
      if (raw.empty()) {
        rec.values.emplace_back(std::monostate{});
      } else if (schema.at(a).is_numeric()) {
        double d = 0.0;
        parse_number(raw, d);
        rec.values.emplace_back(d);
      } else {
        rec.values.emplace_back(raw);
      }
    }
    records.push_back(std::move(rec));
  }
  return Dataset(std::move(schema), std::move(records), std::move(label));
}

void save_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io_error, "cannot write '" + path.string() + "'");
  const auto& schema = d.schema();
  for (size_t a = 0; a < schema.size(); ++a) {
    if (a) out << ',';
    out << csv_escape(schema.at(a).name);
  }
  out << '\n';
  for (const Record& r : d.rows()) {
    for (size_t a = 0; a < schema.size(); ++a) {
      if (a) out << ',';
      out << csv_escape(value_to_string(r.values[a]));
    }
    out << '\n';
  }
  out.flush();
  require(out.good(), Errc::io_error, "write failed for '" + path.string() + "'");
}

AttributeSchema load_schema_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::io_error, "cannot parse '" + path.string() + "': " + e.what());
  }
  try {
    std::vector<Attribute> attrs;
    for (const auto& item : j.at("attributes")) {
      Attribute a;
      a.name = item.at("name").get<std::string>();
      std::string kind = item.at("kind").get<std::string>();
      if (kind == "numeric") {
        NumericKind nk;
        if (item.contains("min")) nk.min = item["min"].get<double>();
        if (item.contains("max")) nk.max = item["max"].get<double>();
        a.kind = nk;
      } else if (kind == "categorical") {
        CategoricalKind ck;
        ck.domain = item.at("domain").get<std::vector<std::string>>();
        a.kind = ck;
      } else {
        raise(Errc::schema_violation, "unknown attribute kind '" + kind + "'");
      }
      attrs.push_back(std::move(a));
    }
    return AttributeSchema(std::move(attrs));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::schema_violation, "bad schema file '" + path.string() + "': " + e.what());
  }
}

void save_schema_json(const AttributeSchema& schema, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["attributes"] = nlohmann::ordered_json::array();
  for (const Attribute& a : schema.attributes()) {
    nlohmann::ordered_json item;
    item["name"] = a.name;
    if (a.is_numeric()) {
      item["kind"] = "numeric";
      if (a.numeric().min) item["min"] = *a.numeric().min;
      if (a.numeric().max) item["max"] = *a.numeric().max;
    } else {
      item["kind"] = "categorical";
      item["domain"] = a.categorical().domain;
    }
    j["attributes"].push_back(std::move(item));
  }
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io_error, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  require(out.good(), Errc::io_error, "write failed for '" + path.string() + "'");
}

}  // namespace synthaudit
