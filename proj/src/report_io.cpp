#include "diraclab/report_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

namespace diraclab {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvField optional_field(const std::optional<double>& v) {
  return v ? CsvField{*v} : CsvField{std::string()};
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

bool same_p(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvField> row) {
  if (row.size() != header_.size()) throw Error(ErrorCode::shape, "csv: row width differs from header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + quote(header_[i]);
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_double(v);
            } else if constexpr (std::is_same_v<T, long long>) {
              out += std::to_string(v);
            } else {
              out += quote(v);
            }
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::config, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::config, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string det_bound_column(double p) { return "det_bound_p" + format_double(p); }

// ---------------------------------------------------------------------------

CsvTable nuclearity_csv(const NuclearityReport& report) {
  std::vector<std::string> header{"beta", "s_trace_norm", "t1", "det_bound_p1", "nu_bound", "fit_residual"};
  std::vector<std::size_t> extra;
  for (std::size_t i = 0; i < report.p_list.size(); ++i) {
    if (!same_p(report.p_list[i], 1.0)) {
      header.push_back(det_bound_column(report.p_list[i]));
      extra.push_back(i);
    }
  }
  header.emplace_back("envelope");
  CsvTable table(std::move(header));
  for (const NuclearityPoint& pt : report.points) {
    double det1 = 1.0;
    for (double t : pt.singular_values) det1 *= 1.0 + t;
    std::vector<CsvField> row{pt.beta, pt.s_trace_norm, pt.t1, det1, pt.nu_bound, pt.fit_residual};
    for (std::size_t i : extra) row.emplace_back(pt.det_bounds[i]);
    row.emplace_back(pt.envelope);
    table.add_row(std::move(row));
  }
  return table;
}

nlohmann::json nuclearity_json(const NuclearityReport& report) {
  nlohmann::json j;
  j["p_list"] = report.p_list;
  j["m0"] = report.m0;
  j["lambda_min_positive"] = report.lambda_min_positive;
  j["spatial_dim"] = report.spatial_dim;
  j["trace_norm_decreasing"] = report.trace_norm_decreasing;
  j["singular_values_monotone"] = report.singular_values_monotone;
  j["det_bounds_consistent"] = report.det_bounds_consistent;
  j["warnings"] = report.warnings;
  j["fit_failure"] = report.fit_failure ? nlohmann::json(*report.fit_failure) : nlohmann::json();
  if (report.fit) {
    j["fit"] = {{"beta0", report.fit->beta0},
                {"rms", report.fit->rms},
                {"window_min", report.fit->window_min},
                {"window_max", report.fit->window_max},
                {"points", report.fit->points}};
  } else {
    j["fit"] = nullptr;
  }
  if (report.free_rate) {
    j["free_rate_fit"] = {{"rate", report.free_rate->rate},
                          {"log_prefactor", report.free_rate->log_prefactor},
                          {"rms", report.free_rate->rms}};
  } else {
    j["free_rate_fit"] = nullptr;
  }
  j["envelope_trend"] = optional_json(report.envelope_trend);
  nlohmann::json points = nlohmann::json::array();
  for (const NuclearityPoint& pt : report.points) {
    points.push_back({{"beta", pt.beta},
                      {"s_trace_norm", pt.s_trace_norm},
                      {"t1", pt.t1},
                      {"p_norms", pt.p_norms},
                      {"det_bounds", pt.det_bounds},
                      {"nu_bound", pt.nu_bound},
                      {"fit_residual", pt.fit_residual},
                      {"envelope", pt.envelope},
                      {"singular_values", pt.singular_values}});
  }
  j["points"] = std::move(points);
  return j;
}

CsvTable resolvent_csv(const ResolventReport& report) {
  CsvTable table({"beta", "trace_norm", "hs_first", "hs_second", "scaled", "in_window"});
  for (const ResolventPoint& pt : report.points) {
    const bool in_window = pt.beta >= report.window_min && pt.beta <= report.window_max && report.window_points > 0;
    table.add_row({pt.beta, pt.trace_norm, pt.hs_first, pt.hs_second, pt.scaled, static_cast<long long>(in_window)});
  }
  return table;
}

nlohmann::json resolvent_json(const ResolventReport& report) {
  nlohmann::json j;
  j["s_power"] = report.s_power;
  j["slope"] = optional_json(report.slope);
  j["window_min"] = report.window_min;
  j["window_max"] = report.window_max;
  j["window_points"] = report.window_points;
  j["constant"] = report.constant;
  j["lambda_max"] = report.lambda_max;
  j["decreasing"] = report.decreasing;
  j["warnings"] = report.warnings;
  nlohmann::json points = nlohmann::json::array();
  for (const ResolventPoint& pt : report.points) {
    points.push_back({{"beta", pt.beta},
                      {"trace_norm", pt.trace_norm},
                      {"hs_first", pt.hs_first},
                      {"hs_second", pt.hs_second},
                      {"scaled", pt.scaled}});
  }
  j["points"] = std::move(points);
  return j;
}

CsvTable rescale_csv(const std::vector<RescalingReport>& reports) {
  CsvTable table({"lambda", "beta", "trace_norm_rescaled", "trace_norm_reference", "max_singular_value_defect",
                  "beta0", "beta0_rescaled", "beta0_ratio"});
  for (const RescalingReport& r : reports) {
    for (std::size_t i = 0; i < r.betas.size(); ++i) {
      table.add_row({r.lambda, r.betas[i], r.trace_norm_rescaled[i], r.trace_norm_reference[i],
                     r.max_singular_value_defect, optional_field(r.beta0), optional_field(r.beta0_rescaled),
                     optional_field(r.beta0_ratio)});
    }
  }
  return table;
}

nlohmann::json rescale_json(const std::vector<RescalingReport>& reports) {
  nlohmann::json j = nlohmann::json::array();
  for (const RescalingReport& r : reports) {
    j.push_back({{"lambda", r.lambda},
                 {"betas", r.betas},
                 {"trace_norm_rescaled", r.trace_norm_rescaled},
                 {"trace_norm_reference", r.trace_norm_reference},
                 {"max_singular_value_defect", r.max_singular_value_defect},
                 {"beta0", optional_json(r.beta0)},
                 {"beta0_rescaled", optional_json(r.beta0_rescaled)},
                 {"beta0_ratio", optional_json(r.beta0_ratio)}});
  }
  return j;
}

CsvTable quasiequiv_csv(const std::vector<RefinementPoint>& series) {
  CsvTable table({"n_sites", "region_fraction", "hs_distance", "trace_distance", "slack"});
  for (const RefinementPoint& pt : series) {
    table.add_row({static_cast<long long>(pt.n_sites), pt.region_fraction, pt.hs_distance, pt.trace_distance, pt.slack});
  }
  return table;
}

nlohmann::json quasiequiv_json(const QuasiequivalenceReport& report) {
  nlohmann::json j;
  j["hs_distance"] = report.hs_distance;
  j["trace_distance"] = report.trace_distance;
  j["ps_inequality_slack"] = report.ps_inequality_slack;
  j["region_sites"] = report.region.sites();
  nlohmann::json series = nlohmann::json::array();
  for (const RefinementPoint& pt : report.refinement_series) {
    series.push_back({{"n_sites", pt.n_sites},
                      {"region_fraction", pt.region_fraction},
                      {"hs_distance", pt.hs_distance},
                      {"trace_distance", pt.trace_distance},
                      {"slack", pt.slack}});
  }
  j["refinement_series"] = std::move(series);
  return j;
}

CsvTable factor_csv(const FactorialityReport& report) {
  CsvTable table({"hspace_dim", "local_dim", "complement_dim", "intersection_dim", "min_principal_angle",
                  "double_complement_defect", "complement_orthogonality", "split_dim", "full_dim"});
  const double min_angle = report.principal_angles.empty() ? std::numbers::pi / 2 : report.principal_angles.front();
  table.add_row({static_cast<long long>(report.hspace_dim), static_cast<long long>(report.local_dim),
                 static_cast<long long>(report.complement_dim), static_cast<long long>(report.intersection_dim),
                 min_angle, report.double_complement_defect, report.complement_orthogonality,
                 static_cast<long long>(report.split_dim), static_cast<long long>(report.full_dim)});
  return table;
}

nlohmann::json factor_json(const FactorialityReport& report) {
  return {{"hspace_dim", report.hspace_dim},
          {"local_dim", report.local_dim},
          {"complement_dim", report.complement_dim},
          {"intersection_dim", report.intersection_dim},
          {"principal_angles", report.principal_angles},
          {"double_complement_defect", report.double_complement_defect},
          {"complement_orthogonality", report.complement_orthogonality},
          {"split_dim", report.split_dim},
          {"full_dim", report.full_dim}};
}

CsvTable verify_csv(const std::vector<suites::SuiteResult>& results) {
  CsvTable table({"suite", "passed", "metric", "worst", "tolerance", "cases", "detail"});
  for (const suites::SuiteResult& r : results) {
    table.add_row({r.name, static_cast<long long>(r.passed), r.metric, r.worst, r.tolerance,
                   static_cast<long long>(r.cases), r.detail});
  }
  return table;
}

nlohmann::json verify_json(const std::vector<suites::SuiteResult>& results) {
  nlohmann::json j = nlohmann::json::array();
  for (const suites::SuiteResult& r : results) {
    j.push_back({{"suite", r.name},
                 {"passed", r.passed},
                 {"metric", r.metric},
                 {"worst", r.worst},
                 {"tolerance", r.tolerance},
                 {"cases", r.cases},
                 {"detail", r.detail}});
  }
  return j;
}

CsvTable model_csv(const OneParticleModel& model) {
  CsvTable table({"index", "eigenvalue"});
  const RVector& ev = model.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) table.add_row({static_cast<long long>(i), ev(i)});
  return table;
}

nlohmann::json model_json(const OneParticleModel& model) {
  const ModelDiagnostics d = model.diagnostics();
  const SpinorLattice& lattice = model.lattice();
  return {{"n_sites", lattice.n_sites},
          {"spacing", lattice.spacing},
          {"mass", model.mass()},
          {"m0", model.m0()},
          {"min_lapse", lattice.min_lapse()},
          {"hermiticity_defect", d.hermiticity_defect},
          {"conjugation_defect", d.conjugation_defect},
          {"spectrum_symmetry_defect", d.spectrum_symmetry_defect},
          {"min_h_squared", d.min_h_squared},
          {"m0_squared", d.m0_squared},
          {"gap_respected", d.gap_respected()},
          {"lambda_min_positive", d.lambda_min_positive},
          {"lambda_max", d.lambda_max},
          {"zero_modes", d.zero_modes}};
}

}  // namespace diraclab
