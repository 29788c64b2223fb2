#include "erglab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace erglab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_number(std::uint64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_bool(bool v) { return v ? "1" : "0"; }

namespace {

void check_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") != std::string::npos)
    throw std::invalid_argument("csv: cell contains a separator: '" + cell + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::string command, std::vector<std::string> header)
    : command_(std::move(command)), header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("csv: empty header");
  for (const auto& h : header_) check_cell(h);
}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("csv: row width " + std::to_string(cells.size()) +
                                " does not match header width " + std::to_string(header_.size()));
  for (const auto& c : cells) check_cell(c);
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const {
  std::string out = std::string("# ") + kSchemaTag + " " + command_ + "\n";
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvWriter::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot open " + path.string());
  f << str();
  if (!f) throw std::runtime_error("csv: write failed for " + path.string());
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("csv: no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& cell = rows.at(row)[column(name)];
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw std::runtime_error("csv: '" + cell + "' is not a number");
  return v;
}

CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  const std::string prefix = std::string("# ") + kSchemaTag + " ";
  if (!std::getline(in, line) || line.rfind(prefix, 0) != 0)
    throw std::runtime_error("csv: missing schema line");
  t.command = line.substr(prefix.size());
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw std::runtime_error("csv: row " + std::to_string(t.rows.size() + 1) + " has " +
                               std::to_string(cells.size()) + " cells");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot open " + path.string());
  return parse_csv(f);
}

}  // namespace erglab
