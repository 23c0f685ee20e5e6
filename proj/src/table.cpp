#include "abm/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "abm/sha1.hpp"
#include "abm/version.hpp"

namespace abm {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  std::string out(buf, res.ptr);
  // Integral values would otherwise read back as integers; mark them so a
  // double cell survives a write/read cycle as a double.
  if (out.find_first_not_of("-0123456789") == std::string::npos) out += ".0";
  return out;
}

namespace {

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return std::get<std::string>(cell);
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void append_csv_field(std::string& out, const std::string& field) {
  if (!needs_quoting(field)) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

Cell parse_cell(const std::string& field) {
  if (!field.empty()) {
    // integer?
    std::int64_t ival = 0;
    auto ir = std::from_chars(field.data(), field.data() + field.size(), ival);
    if (ir.ec == std::errc() && ir.ptr == field.data() + field.size()) return ival;
    // double? (accepts nan/inf spellings)
    double dval = 0.0;
    auto dr = std::from_chars(field.data(), field.data() + field.size(), dval);
    if (dr.ec == std::errc() && dr.ptr == field.data() + field.size()) return dval;
  }
  return field;
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out.push_back(',');
    append_csv_field(out, table.columns[c]);
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::invalid_argument("to_csv: row arity does not match column count");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      append_csv_field(out, format_cell(row[c]));
    }
    out.push_back('\n');
  }
  return out;
}

// Single pass over the text; a quoted field may span commas and newlines
// (RFC-4180), so records cannot be split line by line.
ResultTable read_csv_string(const std::string& text) {
  ResultTable table;
  bool have_header = false;
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool record_nonblank = false;  // distinguishes `""` from a skippable blank line

  auto finish_record = [&]() {
    fields.push_back(std::move(cur));
    cur.clear();
    if (!have_header) {
      table.columns = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.columns.size())
        throw std::invalid_argument("read_csv: row has " + std::to_string(fields.size()) +
                                    " fields, expected " + std::to_string(table.columns.size()));
      std::vector<Cell> row;
      row.reserve(fields.size());
      for (const auto& f : fields) row.push_back(parse_cell(f));
      table.rows.push_back(std::move(row));
    }
    fields.clear();
    record_nonblank = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        quoted = true;
        record_nonblank = true;
        break;
      case ',':
        fields.push_back(std::move(cur));
        cur.clear();
        record_nonblank = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;  // swallowed with the LF
        cur.push_back(ch);
        record_nonblank = true;
        break;
      case '\n':
        if (record_nonblank || !cur.empty() || !fields.empty()) finish_record();
        break;
      default:
        cur.push_back(ch);
        record_nonblank = true;
    }
  }
  if (quoted) throw std::invalid_argument("read_csv: unterminated quoted field");
  if (record_nonblank || !cur.empty() || !fields.empty()) finish_record();
  if (!have_header) throw std::invalid_argument("read_csv: missing header row");
  return table;
}

ResultTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_csv_string(buf.str());
}

void write_csv_file(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  out << to_csv(table);
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

std::string content_hash(const ResultTable& table) { return git_blob_hash(to_csv(table)); }

Manifest make_manifest(nlohmann::json config_echo, std::uint64_t base_seed,
                       const ResultTable& table) {
  Manifest m;
  m.tool = kToolName;
  m.version = kToolVersion;
  m.base_seed = base_seed;
  m.config_echo = std::move(config_echo);
  m.content_hash = content_hash(table);
  return m;
}

nlohmann::json manifest_json(const Manifest& manifest) {
  return nlohmann::json{{"tool", manifest.tool},
                        {"version", manifest.version},
                        {"base_seed", manifest.base_seed},
                        {"config", manifest.config_echo},
                        {"content_hash", manifest.content_hash}};
}

nlohmann::json table_json(const ResultTable& table, const Manifest& manifest) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string& name = table.columns[c];
      if (const auto* i = std::get_if<std::int64_t>(&row[c])) {
        obj[name] = *i;
      } else if (const auto* d = std::get_if<double>(&row[c])) {
        if (std::isfinite(*d))
          obj[name] = *d;
        else
          obj[name] = nullptr;
      } else {
        obj[name] = std::get<std::string>(row[c]);
      }
    }
    rows.push_back(std::move(obj));
  }
  return nlohmann::json{{"manifest", manifest_json(manifest)},
                        {"columns", table.columns},
                        {"rows", std::move(rows)}};
}

}  // namespace abm
