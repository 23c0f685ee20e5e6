#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace abm {

// One output table: named columns over cells that are integers, doubles, or
// strings. Doubles serialize with 17 significant digits so that CSV output
// round-trips bit-exactly.
using Cell = std::variant<std::int64_t, double, std::string>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;  // each row has columns.size() cells
};

// Run metadata attached to every output. content_hash is a git-style blob
// hash (sha1 over "blob <len>\0" + the canonical CSV serialization), so two
// runs produced the same rows iff the hashes match.
struct Manifest {
  std::string tool;
  std::string version;
  std::uint64_t base_seed = 0;
  nlohmann::json config_echo;
  std::string content_hash;
};

std::string format_double(double v);            // 17 significant digits
std::string to_csv(const ResultTable& table);   // header + rows, RFC-4180 quoting
ResultTable read_csv_string(const std::string& text);
ResultTable read_csv_file(const std::filesystem::path& path);
void write_csv_file(const ResultTable& table, const std::filesystem::path& path);

std::string content_hash(const ResultTable& table);
Manifest make_manifest(nlohmann::json config_echo, std::uint64_t base_seed,
                       const ResultTable& table);
nlohmann::json manifest_json(const Manifest& manifest);

// Whole table as JSON: {"manifest": ..., "columns": [...], "rows": [{...}]}.
// NaN cells become null.
nlohmann::json table_json(const ResultTable& table, const Manifest& manifest);

}  // namespace abm
