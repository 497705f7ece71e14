#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diraclab/model.hpp"
#include "diraclab/states.hpp"

namespace diraclab {

struct ModelSection {
  int n_sites = 32;
  double spacing = 0.25;
  double mass = 1.0;
  /// A number (constant lapse), a comma list of n_sites values, or a profile
  /// `cosine:<amplitude>` meaning 1 + amplitude cos(2 pi x / n).
  std::string lapse = "1";
  ZeroModePolicy zero_modes = ZeroModePolicy::reject;
};

struct RegionSection {
  /// `half`, `all`, `none`, or comma-separated site ranges `first:last`.
  std::string sites = "half";
  int chi_width = 4;
};

struct ScanSection {
  double beta_min = 0.25;
  double beta_max = 4.0;
  int n_points = 16;
  bool log_spaced = true;
  std::vector<double> p_list{0.5, 1.0, 2.0};
  int s_power = 1;
  double fit_t1_threshold = 0.5;
  double window_factor = 10.0;
};

struct CheckSection {
  std::vector<std::string> suites{"car", "wick", "coeff", "det", "ps", "factor", "resolvent", "rescale", "quasiequiv"};
  std::vector<double> lambdas{0.5, 2.0, 4.0};
  bool corrupt_theta = false;
  std::vector<int> refine_sites{8, 16, 32, 64};
  /// State used by factor-check: `ground` or `thermal`.
  std::string state = "thermal";
  double state_beta = 1.0;
  int perturb_rank = 4;
  double perturb_decay = 1.0;
  double perturb_amplitude = 0.3;
};

struct OutputSection {
  std::string directory;
  std::string formats = "csv";  ///< csv | json | both
  std::uint64_t seed = 42;
};

/// Parsed and range-checked run configuration (INI format).
struct RunConfig {
  ModelSection model;
  RegionSection region;
  ScanSection scan;
  CheckSection check;
  OutputSection output;
  std::string source = "<memory>";

  SpinorLattice lattice() const;
  Region make_region(const SpinorLattice& lattice) const;
  std::vector<double> beta_grid() const;

  /// Normalized INI text; parsing it yields the same configuration.
  std::string canonical() const;
  /// FNV-1a of canonical().
  std::uint64_t hash() const;
};

/// Throws Error(config) with "source:line: [section] key: message".
RunConfig parse_config(std::string_view text, std::string source = "<memory>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace diraclab
