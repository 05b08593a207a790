#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fiberamp {

/// Deterministic run metadata carried in a '#'-prefixed header block, so
/// every CSV is traceable to its input. Only reproducible fields go here;
/// wall time is reported on stderr instead, keeping repeated runs
/// byte-identical.
struct Manifest {
  std::string tool = "fiberamp";
  std::string version;
  std::uint64_t config_hash = 0;
  std::vector<std::pair<std::string, std::string>> extra;  // ordered
};

/// Shortest round-trip decimal rendering (std::to_chars).
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void manifest(const Manifest& m);
  void comment(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
};

/// Minimal reader for this tool's own CSVs (skips '#' comments).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int column_index(const std::string& name) const;  // -1 if absent
};
CsvTable read_csv(const std::string& path);

}  // namespace fiberamp
