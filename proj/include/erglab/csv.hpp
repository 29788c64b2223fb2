#pragma once

// Versioned CSV artifacts: one comment line "# erglab-schema-v1 <command>",
// a header row, then comma-separated cells. Numbers use the shortest
// round-trip representation, so identical data gives identical bytes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace erglab {

inline constexpr const char* kSchemaTag = "erglab-schema-v1";

std::string format_number(double v);
std::string format_number(std::uint64_t v);
std::string format_bool(bool v);

class CsvWriter {
 public:
  CsvWriter(std::string command, std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }

  std::string str() const;
  /// Writes to `path`, creating parent directories.
  void save(const std::filesystem::path& path) const;

 private:
  std::string command_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::string command;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Throws std::runtime_error on a missing or foreign schema line, or on rows
/// whose width differs from the header.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace erglab
