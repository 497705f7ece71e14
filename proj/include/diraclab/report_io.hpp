#pragma once

// Locale-independent serialization of reports. Doubles are written with 17
// significant digits so identical inputs give byte-identical files.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "diraclab/model.hpp"
#include "diraclab/nuclearity.hpp"
#include "diraclab/quasiequiv.hpp"
#include "diraclab/suites.hpp"

namespace diraclab {

std::string format_double(double value);

using CsvField = std::variant<double, long long, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Throws shape when the row width differs from the header.
  void add_row(std::vector<CsvField> row);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvField>> rows_;
};

/// Writes text atomically enough for a batch tool: temp file then rename.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Column name for a p-dependent determinant bound: det_bound_p1, det_bound_p0.5.
std::string det_bound_column(double p);

CsvTable nuclearity_csv(const NuclearityReport& report);
nlohmann::json nuclearity_json(const NuclearityReport& report);

CsvTable resolvent_csv(const ResolventReport& report);
nlohmann::json resolvent_json(const ResolventReport& report);

CsvTable rescale_csv(const std::vector<RescalingReport>& reports);
nlohmann::json rescale_json(const std::vector<RescalingReport>& reports);

CsvTable quasiequiv_csv(const std::vector<RefinementPoint>& series);
nlohmann::json quasiequiv_json(const QuasiequivalenceReport& report);

CsvTable factor_csv(const FactorialityReport& report);
nlohmann::json factor_json(const FactorialityReport& report);

CsvTable verify_csv(const std::vector<suites::SuiteResult>& results);
nlohmann::json verify_json(const std::vector<suites::SuiteResult>& results);

CsvTable model_csv(const OneParticleModel& model);
nlohmann::json model_json(const OneParticleModel& model);

}  // namespace diraclab
