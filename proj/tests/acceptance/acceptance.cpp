// Acceptance suite: one PASS/FAIL line per criterion with the measured
// margin, its tolerance and the runtime against its limit.
//
//   acceptance [--cli PATH] [--seed N] [--expect-fail ID]... [--only ID]...
//
// Exit status is 0 iff the failing criteria are exactly the expected ones, so
// a documented known failure keeps the run green while an unexpected pass or
// a new failure turns it red.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diraclab/nuclearity.hpp"
#include "diraclab/report_io.hpp"
#include "diraclab/suites.hpp"

namespace fs = std::filesystem;
using namespace diraclab;
using namespace diraclab::suites;

namespace {

struct Verdict {
  bool passed = false;
  std::string summary;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  ///< 0 means no limit
  std::function<Verdict()> run;
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

Verdict from(const SuiteResult& r) {
  return {r.passed, r.metric + " = " + sci(r.worst) + " (tol " + sci(r.tolerance) + ", " + std::to_string(r.cases) +
                        " cases) " + r.detail};
}

Verdict combine(std::initializer_list<Verdict> parts) {
  Verdict out{true, ""};
  for (const Verdict& v : parts) {
    out.passed = out.passed && v.passed;
    out.summary += (out.summary.empty() ? "" : " | ") + v.summary;
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diraclab acceptance suite"};
  std::string cli_path = DIRACLAB_CLI_PATH;
  std::uint64_t seed = 42;
  std::vector<int> expect_fail;
  std::vector<int> only;
  app.add_option("--cli", cli_path, "path to the diraclab executable");
  app.add_option("--seed", seed, "seed for the randomized criteria");
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  // Shared by criteria 4 and 7: the flat 128-site scan.
  NuclearityParams nuc_params;
  std::optional<NuclearityReport> scan128;
  auto nuclearity_report = [&]() -> const NuclearityReport& {
    if (!scan128) {
      const OneParticleModel model = build_model(SpinorLattice::flat(nuc_params.n_sites, nuc_params.spacing), nuc_params.mass);
      NuclearityOptions opts;
      opts.parallel = true;
      scan128 = nuclearity_scan(model, Region::half(model.lattice()),
                                geometric_grid(nuc_params.beta_min, nuc_params.beta_max, nuc_params.points), opts);
    }
    return *scan128;
  };

  const std::vector<Criterion> criteria{
      {1, "CAR relations (modes to 1e-12, fields to 1e-10)", 10.0,
       [&] {
         Rng rng(seed);
         return from(car_suite({}, rng));
       }},
      {2, "Wick / quasifree n-point equivalence (n = 2,4,6, tol 1e-9)", 30.0,
       [&] {
         Rng rng(seed);
         return from(wick_suite({}, rng));
       }},
      {3, "coefficient inequality (8 sites, k <= 5, tol 1e-9)", 300.0,
       [&] {
         Rng rng(seed);
         return from(coefficient_suite({}, rng));
       }},
      {4, "determinant arithmetic and det(1+T) <= exp(||T||_1)", 0.0,
       [&] {
         Rng rng(seed);
         const Verdict arithmetic = from(determinant_suite({}, rng));
         const NuclearityReport& r = nuclearity_report();
         const Verdict scan{r.det_bounds_consistent, "det(1+T) <= exp(||T||_1) on all " +
                                                         std::to_string(r.points.size()) + " scan points: " +
                                                         (r.det_bounds_consistent ? "yes" : "no")};
         return combine({arithmetic, scan});
       }},
      {5, "Powers-Stormer inequality (500 pairs, slack >= -1e-10)", 10.0,
       [&] {
         Rng rng(seed);
         return from(powers_stormer_suite({}, rng));
       }},
      {6, "resolvent scaling slope in [-1.15, -0.85], beta * norm bounded", 60.0,
       [&] { return from(resolvent_suite({})); }},
      {7, "nuclearity envelope: fixed-rate fit RMS < 0.1 and no envelope growth", 0.0,
       [&] {
         const std::vector<SuiteResult> results = nuclearity_suite(nuc_params);
         return combine({from(results.at(0)), from(results.at(1))});
       }},
      {8, "rescaling identity to 1e-10, beta0 ratio within 15%", 0.0, [&] { return from(rescale_suite({})); }},
      {9, "factoriality: M(C) and i M(C)' intersect trivially (20 instances)", 0.0,
       [&] {
         Rng rng(seed);
         return from(factoriality_suite({}, rng));
       }},
      {10, "quasiequivalence proxy: trace distance max/min < 3 under refinement", 0.0,
       [&] { return from(quasiequiv_suite({})); }},
      {11, "determinism: verify --seed 42 twice gives byte-identical CSV", 0.0,
       [&] {
         const fs::path base = fs::temp_directory_path() / ("diraclab_acceptance_" + std::to_string(::getpid()));
         fs::remove_all(base);
         std::vector<std::string> outputs;
         int status = 0;
         for (const char* run : {"first", "second"}) {
           const fs::path dir = base / run;
           const std::string cmd = "\"" + cli_path + "\" verify --seed " + std::to_string(seed) + " --out \"" +
                                   dir.string() + "\" > \"" + (base / (std::string(run) + ".log")).string() + "\" 2>&1";
           fs::create_directories(base);
           status = std::max(status, std::system(cmd.c_str()));
           outputs.push_back(read_file(dir / "verify.csv"));
         }
         const bool identical = !outputs[0].empty() && outputs[0] == outputs[1];
         fs::remove_all(base);
         return Verdict{identical, "verify.csv " + std::to_string(outputs[0].size()) + " bytes, runs " +
                                       (identical ? "identical" : "differ") + ", exit status " +
                                       std::to_string(status)};
       }},
  };

  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  const std::set<int> selected(only.begin(), only.end());
  bool ok = true;
  int passed = 0;
  int run = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s <= 0.0 || seconds <= c.time_limit_s;
    const bool pass = v.passed && in_time;
    ++run;
    if (pass) ++passed;
    const bool known = expected.contains(c.id);
    std::string tag = pass ? "PASS" : "FAIL";
    if (known) tag += pass ? " (unexpected pass)" : " (known failure)";
    if (pass == known) ok = false;

    std::ostringstream timing;
    timing << std::fixed << std::setprecision(2) << seconds << "s";
    if (c.time_limit_s > 0.0) timing << " / limit " << std::setprecision(0) << c.time_limit_s << "s";
    std::cout << "[" << tag << "] criterion " << std::setw(2) << c.id << ": " << c.title << " | " << v.summary << " | "
              << timing.str() << (in_time ? "" : " (over time limit)") << std::endl;
  }
  std::cout << passed << "/" << run << " criteria passed";
  if (!expected.empty()) std::cout << "; expected failures:";
  for (int id : expected) std::cout << " " << id;
  std::cout << std::endl;
  return ok ? 0 : 1;
}
