// Command-line front end: builds models from an INI config, runs scans and
// checks, and writes CSV/JSON reports plus a manifest into an output directory.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diraclab/config.hpp"
#include "diraclab/nuclearity.hpp"
#include "diraclab/quasiequiv.hpp"
#include "diraclab/report_io.hpp"
#include "diraclab/states.hpp"
#include "diraclab/suites.hpp"

namespace fs = std::filesystem;
using namespace diraclab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_fit = 4;

constexpr const char* tool_version = "0.1.0";
constexpr const char* default_out_dir = "diraclab_out";

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::invalid_geometry:
    case ErrorCode::invalid_size:
    case ErrorCode::zero_mode:
      return exit_config;
    case ErrorCode::fit:
      return exit_fit;
    default:
      return exit_numeric;
  }
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

struct Outcome {
  int exit_status = exit_ok;
  bool partial = false;
  std::vector<std::string> files;
  std::string message;
};

class Session {
 public:
  Session(RunConfig config, fs::path out_dir, std::string format, bool parallel)
      : config_(std::move(config)), out_dir_(std::move(out_dir)), format_(std::move(format)), parallel_(parallel) {}

  const RunConfig& config() const { return config_; }
  bool parallel() const { return parallel_; }
  bool want_csv() const { return format_ == "csv" || format_ == "both"; }
  bool want_json() const { return format_ == "json" || format_ == "both"; }

  void emit(Outcome& outcome, const std::string& stem, const CsvTable& csv, const nlohmann::json& json) const {
    if (want_csv()) {
      write_text(out_dir_ / (stem + ".csv"), csv.str());
      outcome.files.push_back(stem + ".csv");
    }
    if (want_json()) {
      write_text(out_dir_ / (stem + ".json"), json.dump(2) + "\n");
      outcome.files.push_back(stem + ".json");
    }
  }

  /// Merges this command into manifest.json. Entries from an earlier run
  /// with a different config hash are dropped.
  void write_manifest(const std::string& command, const Outcome& outcome, const std::string& started) const {
    const fs::path path = out_dir_ / "manifest.json";
    const std::string hash = hex(config_.hash());
    nlohmann::json manifest;
    if (fs::exists(path)) {
      try {
        std::ifstream in(path);
        manifest = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception&) {
        manifest = nlohmann::json();
      }
      if (!manifest.is_object() || manifest.value("config_hash", "") != hash) manifest = nlohmann::json();
    }
    manifest["config_hash"] = hash;
    manifest["tool_version"] = tool_version;
    manifest["config"] = config_.canonical();
    nlohmann::json& commands = manifest["commands"];
    if (!commands.is_object()) commands = nlohmann::json::object();
    commands[command] = {{"exit_status", outcome.exit_status},
                         {"partial", outcome.partial},
                         {"started", started},
                         {"finished", utc_now()},
                         {"files", outcome.files},
                         {"message", outcome.message}};
    std::set<std::string> files;
    bool partial = false;
    for (const auto& [name, entry] : commands.items()) {
      for (const auto& f : entry["files"]) files.insert(f.get<std::string>());
      partial = partial || entry.value("partial", false);
    }
    manifest["files"] = files;
    manifest["partial"] = partial;
    write_text(path, manifest.dump(2) + "\n");
  }

 private:
  RunConfig config_;
  fs::path out_dir_;
  std::string format_;
  bool parallel_;
};

OneParticleModel make_model(const RunConfig& c) { return build_model(c.lattice(), c.model.mass); }

// ---------------------------------------------------------------------------

Outcome cmd_model_info(const Session& session) {
  const RunConfig& c = session.config();
  const OneParticleModel model = make_model(c);
  const ModelDiagnostics d = model.diagnostics();
  std::cout << "model: " << c.model.n_sites << " sites, spacing " << format_double(c.model.spacing) << ", mass "
            << format_double(c.model.mass) << ", min lapse " << format_double(model.lattice().min_lapse()) << "\n"
            << "  hermiticity defect     " << d.hermiticity_defect << "\n"
            << "  C h C + h (relative)   " << d.conjugation_defect << "\n"
            << "  spectrum symmetry      " << d.spectrum_symmetry_defect << "\n"
            << "  min eigenvalue of h^2  " << d.min_h_squared << "\n"
            << "  m0^2                   " << d.m0_squared << "\n"
            << "  gap respected          " << (d.gap_respected() ? "yes" : "no (discretization)") << "\n"
            << "  lambda_min+            " << d.lambda_min_positive << "\n"
            << "  lambda_max             " << d.lambda_max << "\n"
            << "  zero modes             " << d.zero_modes << "\n";
  // The ground state exercises the zero-mode policy.
  const QuasifreeState ground = positive_projector(model, c.model.zero_modes);
  std::cout << "  ground state           " << (ground.gapped() ? "gapped" : "zero modes assigned by policy") << "\n";
  Outcome outcome;
  session.emit(outcome, "model", model_csv(model), model_json(model));
  if (d.hermiticity_defect > 1e-12 || d.conjugation_defect > 1e-12) {
    outcome.exit_status = exit_numeric;
    outcome.message = "model invariants violated";
  }
  return outcome;
}

Outcome cmd_nuclearity_scan(const Session& session) {
  const RunConfig& c = session.config();
  const OneParticleModel model = make_model(c);
  const Region region = c.make_region(model.lattice());
  NuclearityOptions options;
  options.p_list = c.scan.p_list;
  options.fit_t1_threshold = c.scan.fit_t1_threshold;
  options.parallel = session.parallel();
  options.strict_fit = false;
  const std::vector<double> grid = c.beta_grid();
  const NuclearityReport report = nuclearity_scan(model, region, grid, options);

  Outcome outcome;
  session.emit(outcome, "nuclearity", nuclearity_csv(report), nuclearity_json(report));
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "nuclearity scan: " << report.points.size() << " points, lambda_min+ "
            << format_double(report.lambda_min_positive) << ", m0 " << format_double(report.m0) << "\n";
  if (report.fit) {
    std::cout << "  beta0 fit: beta0 " << report.fit->beta0 << ", rms " << report.fit->rms << " over ["
              << report.fit->window_min << ", " << report.fit->window_max << "] (" << report.fit->points << " points)\n";
  }
  if (report.free_rate) {
    std::cout << "  free-rate fit: rate " << report.free_rate->rate << ", rms " << report.free_rate->rms << "\n";
  }
  if (report.envelope_trend) std::cout << "  envelope trend " << *report.envelope_trend << "\n";

  if (!report.trace_norm_decreasing || !report.singular_values_monotone || !report.det_bounds_consistent) {
    outcome.exit_status = exit_numeric;
    outcome.message = "invariant failed:";
    if (!report.trace_norm_decreasing) outcome.message += " trace norm not decreasing;";
    if (!report.singular_values_monotone) outcome.message += " singular values not monotone;";
    if (!report.det_bounds_consistent) outcome.message += " determinant bounds inconsistent;";
  } else if (report.fit_failure) {
    outcome.exit_status = exit_fit;
    outcome.partial = true;
    outcome.message = *report.fit_failure;
  }
  return outcome;
}

Outcome cmd_resolvent_scan(const Session& session) {
  const RunConfig& c = session.config();
  const OneParticleModel model = make_model(c);
  const Region region = c.make_region(model.lattice());
  const ResolventReport report = resolvent_trace_scan(model, region, c.beta_grid(), c.scan.s_power,
                                                      c.scan.window_factor, session.parallel());
  Outcome outcome;
  session.emit(outcome, "resolvent", resolvent_csv(report), resolvent_json(report));
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "resolvent scan: s = " << report.s_power << ", lambda_max " << report.lambda_max;
  if (report.slope) std::cout << ", slope " << *report.slope;
  std::cout << " over [" << report.window_min << ", " << report.window_max << "], sup beta^s norm "
            << report.constant << "\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const ResolventPoint& pt = report.points[i];
    if (std::abs(pt.hs_first - pt.trace_norm) > 1e-8 * std::max(1.0, pt.trace_norm)) {
      outcome.exit_status = exit_numeric;
      outcome.message = "Hilbert-Schmidt factorization disagrees with the trace norm at beta " + format_double(pt.beta);
    }
  }
  if (!report.decreasing && outcome.exit_status == exit_ok) {
    outcome.exit_status = exit_numeric;
    outcome.message = "trace norm not decreasing in beta";
  }
  return outcome;
}

Outcome cmd_rescale_check(const Session& session) {
  const RunConfig& c = session.config();
  const OneParticleModel model = make_model(c);
  const Region region = c.make_region(model.lattice());
  std::vector<RescalingReport> reports;
  for (double lambda : c.check.lambdas) {
    reports.push_back(rescaling_check(model, region, c.beta_grid(), lambda));
    const RescalingReport& r = reports.back();
    std::cout << "lambda " << format_double(lambda) << ": singular value defect " << r.max_singular_value_defect;
    if (r.beta0_ratio) std::cout << ", beta0 ratio " << *r.beta0_ratio << " (expected " << lambda << ")";
    std::cout << "\n";
  }
  Outcome outcome;
  session.emit(outcome, "rescale", rescale_csv(reports), rescale_json(reports));
  return outcome;
}

Outcome cmd_quasiequiv(const Session& session) {
  const RunConfig& c = session.config();
  const OneParticleModel model = make_model(c);
  const Region region = c.make_region(model.lattice());
  const QuasifreeState ground = positive_projector(model, c.model.zero_modes);
  const QuasifreeState perturbed =
      smooth_perturbation(model, ground, c.check.perturb_rank, c.check.perturb_decay, c.check.perturb_amplitude);
  QuasiequivalenceReport report = powers_stormer(ground, perturbed, region);

  RefinementSweep sweep;
  sweep.site_counts = c.check.refine_sites;
  sweep.length = c.model.n_sites * c.model.spacing;
  sweep.mass = c.model.mass;
  sweep.region_fraction = region.fraction();
  sweep.rank = c.check.perturb_rank;
  sweep.decay = c.check.perturb_decay;
  sweep.amplitude = c.check.perturb_amplitude;
  report.refinement_series = refinement_series(sweep);

  Outcome outcome;
  session.emit(outcome, "quasiequiv", quasiequiv_csv(report.refinement_series), quasiequiv_json(report));
  std::cout << "quasiequivalence: hs " << report.hs_distance << ", trace " << report.trace_distance << ", slack "
            << report.ps_inequality_slack << "\n";
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double worst_slack = report.ps_inequality_slack;
  for (const RefinementPoint& pt : report.refinement_series) {
    std::cout << "  n " << pt.n_sites << ": trace " << pt.trace_distance << ", slack " << pt.slack << "\n";
    lo = std::min(lo, pt.trace_distance);
    hi = std::max(hi, pt.trace_distance);
    worst_slack = std::min(worst_slack, pt.slack);
  }
  if (!report.refinement_series.empty()) std::cout << "  max/min trace distance " << hi / lo << "\n";
  if (worst_slack < -1e-10) {
    outcome.exit_status = exit_numeric;
    outcome.message = "Powers-Stormer slack " + format_double(worst_slack) + " below -1e-10";
  }
  return outcome;
}

Outcome cmd_factor_check(const Session& session) {
  const RunConfig& c = session.config();
  const OneParticleModel model = make_model(c);
  const Region region = c.make_region(model.lattice());
  const QuasifreeState state = c.check.state == "ground" ? positive_projector(model, c.model.zero_modes)
                                                         : thermal_state(model, c.check.state_beta);
  const FactorialityReport report = factoriality_check(state, region);
  Outcome outcome;
  session.emit(outcome, "factor", factor_csv(report), factor_json(report));
  std::cout << "factoriality: dim M(C) " << report.local_dim << ", intersection " << report.intersection_dim
            << ", smallest angle "
            << (report.principal_angles.empty() ? std::string("none") : format_double(report.principal_angles.front()))
            << ", double complement defect " << report.double_complement_defect << "\n";
  if (report.intersection_dim > 0) {
    outcome.exit_status = exit_numeric;
    outcome.message = "M(C) meets i M(C)' in dimension " + std::to_string(report.intersection_dim);
  }
  return outcome;
}

std::vector<suites::SuiteResult> run_suites(const RunConfig& c, bool parallel) {
  std::vector<suites::SuiteResult> results;
  const Backend backend = parallel ? Backend::parallel : Backend::serial;
  for (const std::string& name : c.check.suites) {
    suites::Rng rng(c.output.seed);
    if (name == "car") {
      suites::CarParams p;
      p.corrupt_theta = c.check.corrupt_theta;
      p.backend = backend;
      results.push_back(suites::car_suite(p, rng));
    } else if (name == "wick") {
      results.push_back(suites::wick_suite({}, rng));
    } else if (name == "coeff") {
      results.push_back(suites::coefficient_suite({}, rng));
    } else if (name == "det") {
      results.push_back(suites::determinant_suite({}, rng));
    } else if (name == "ps") {
      results.push_back(suites::powers_stormer_suite({}, rng));
    } else if (name == "factor") {
      results.push_back(suites::factoriality_suite({}, rng));
    } else if (name == "resolvent") {
      results.push_back(suites::resolvent_suite({}));
    } else if (name == "rescale") {
      suites::RescaleParams p;
      p.lambdas = c.check.lambdas;
      results.push_back(suites::rescale_suite(p));
    } else if (name == "quasiequiv") {
      suites::QuasiequivParams p;
      p.site_counts = c.check.refine_sites;
      results.push_back(suites::quasiequiv_suite(p));
    } else if (name == "nuclearity") {
      for (suites::SuiteResult& r : suites::nuclearity_suite({})) results.push_back(std::move(r));
    }
  }
  return results;
}

Outcome cmd_verify(const Session& session) {
  const std::vector<suites::SuiteResult> results = run_suites(session.config(), session.parallel());
  Outcome outcome;
  session.emit(outcome, "verify", verify_csv(results), verify_json(results));
  int failed = 0;
  for (const suites::SuiteResult& r : results) {
    std::cout << std::left << std::setw(20) << r.name << (r.passed ? "PASS" : "FAIL") << "  " << r.metric
              << " worst=" << format_double(r.worst) << " tol=" << format_double(r.tolerance) << " cases=" << r.cases;
    if (!r.detail.empty()) std::cout << "  " << r.detail;
    std::cout << "\n";
    if (!r.passed) ++failed;
  }
  if (failed > 0) {
    outcome.exit_status = exit_numeric;
    outcome.message = std::to_string(failed) + " suite(s) failed";
  }
  return outcome;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diraclab: lattice Dirac field nuclearity and quasifree-state checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool parallel = false;
  std::string format;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides config and DIRACLAB_OUT)");
  app.add_option("--seed", seed, "seed for randomized suites");
  app.add_flag("--parallel", parallel, "evaluate scan points and kernels in parallel");
  app.add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  app.fallthrough();

  using Command = Outcome (*)(const Session&);
  const std::vector<std::pair<std::string, std::pair<Command, std::string>>> commands{
      {"model-info", {cmd_model_info, "build the model and report its invariants and gap"}},
      {"nuclearity-scan", {cmd_nuclearity_scan, "sweep beta: trace norm of S, determinant bounds, beta0 fit"}},
      {"resolvent-scan", {cmd_resolvent_scan, "sweep beta: localized resolvent trace norm and slope"}},
      {"rescale-check", {cmd_rescale_check, "lattice rescaling identity and beta0 covariance"}},
      {"quasiequiv", {cmd_quasiequiv, "Powers-Stormer distances for ground vs perturbed states"}},
      {"factor-check", {cmd_factor_check, "intersection of M(C) with i M(C)'"}},
      {"verify", {cmd_verify, "run the seeded verification suites"}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  std::string name;
  Command command = nullptr;
  for (const auto& [n, entry] : commands) {
    if (app.got_subcommand(n)) {
      name = n;
      command = entry.first;
    }
  }

  const std::string started = utc_now();
  std::optional<Session> session;
  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) config.output.seed = *seed;
    if (!format.empty()) config.output.formats = format;
    fs::path dir = out_dir;
    if (dir.empty()) dir = config.output.directory;
    if (dir.empty()) {
      if (const char* env = std::getenv("DIRACLAB_OUT"); env != nullptr && *env != '\0') dir = env;
    }
    if (dir.empty()) dir = default_out_dir;
    const std::string formats = config.output.formats;
    session.emplace(std::move(config), dir, formats, parallel);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }

  Outcome outcome;
  try {
    outcome = command(*session);
  } catch (const Error& e) {
    outcome.exit_status = exit_code_for(e.code());
    outcome.partial = true;
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.exit_status = exit_numeric;
    outcome.partial = true;
    outcome.message = e.what();
  }
  try {
    session->write_manifest(name, outcome, started);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write manifest: " << e.what() << "\n";
    if (outcome.exit_status == exit_ok) outcome.exit_status = exit_config;
  }
  if (outcome.exit_status != exit_ok) std::cerr << "error: " << outcome.message << "\n";
  return outcome.exit_status;
}
