#pragma once

// Seeded verification suites shared by the `verify` command and the
// acceptance binary. Each suite reports its worst observed margin against a
// tolerance; margins are deterministic for a fixed seed.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "diraclab/fock.hpp"
#include "diraclab/model.hpp"

namespace diraclab::suites {

using Rng = std::mt19937_64;

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string metric;      ///< what `worst` measures
  double worst = 0.0;      ///< worst observed value of the metric
  double tolerance = 0.0;  ///< pass iff worst <= tolerance (or as documented)
  std::string detail;      ///< names the failing identity, if any
  long cases = 0;
};

/// Random complex vector with independent standard normal entries, unit norm.
CVector random_vector(Rng& rng, int dim);
/// Same, supported on the region's sites.
CVector random_vector(Rng& rng, const Region& region);

struct CarParams {
  int n_sites = 10;  ///< ground state has M = n_sites modes
  double spacing = 0.5;
  double mass = 1.0;
  int field_pairs = 200;
  double tol_modes = 1e-12;
  double tol_fields = 1e-10;
  bool corrupt_theta = false;  ///< swap in a C that breaks C h C = -h
  Backend backend = Backend::parallel;
};
SuiteResult car_suite(const CarParams& params, Rng& rng);

struct WickParams {
  int tuples = 100;
  std::vector<int> orders{2, 4, 6};
  double tol = 1e-9;
};
/// Ground state with 4 modes and a thermal state with 4 modes.
SuiteResult wick_suite(const WickParams& params, Rng& rng);

struct CoefficientParams {
  int n_sites = 8;
  double spacing = 0.5;
  double mass = 1.0;
  std::vector<double> betas{0.5, 1.0, 2.0};
  int words = 50;
  int max_length = 3;
  int k_max = 5;
  double tol = 1e-9;
};
SuiteResult coefficient_suite(const CoefficientParams& params, Rng& rng);

struct DeterminantParams {
  int instances = 30;
  int max_dim = 10;
  std::vector<double> p_list{0.5, 1.0, 2.0};
  double tol = 1e-9;
};
/// prod (1 + t^p) against the principal-minor sum of T^p, and
/// det(1+T) <= exp(||T||_1).
SuiteResult determinant_suite(const DeterminantParams& params, Rng& rng);

struct PowersStormerParams {
  int trials = 500;
  int max_dim = 20;
  double tol = 1e-10;
};
SuiteResult powers_stormer_suite(const PowersStormerParams& params, Rng& rng);

struct FactorParams {
  int instances = 20;
  int max_sites = 16;
  double angle_tol = 1e-8;
  double duality_tol = 1e-10;
};
/// Strictly mixed states (thermal states and mixtures with 1/2) on random
/// lattices, lapses and regions.
SuiteResult factoriality_suite(const FactorParams& params, Rng& rng);

struct ResolventParams {
  int n_sites = 256;
  double spacing = 0.1;
  double mass = 0.1;
  int chi_width = 8;
  double beta_min = 0.1;
  double beta_max = 5.0;
  int points = 16;
  double slope_lo = -1.15;
  double slope_hi = -0.85;
};
SuiteResult resolvent_suite(const ResolventParams& params);

struct RescaleParams {
  int n_sites = 128;
  double spacing = 0.25;
  double mass = 1.0;
  double beta_min = 0.25;
  double beta_max = 4.0;
  int points = 16;
  std::vector<double> lambdas{0.5, 2.0, 4.0};
  double identity_tol = 1e-10;
  double ratio_tol = 0.15;
};
SuiteResult rescale_suite(const RescaleParams& params);

struct NuclearityParams {
  int n_sites = 128;
  double spacing = 0.25;
  double mass = 1.0;
  double beta_min = 0.25;
  double beta_max = 4.0;
  int points = 16;
  double rms_tol = 0.1;
  double trend_tol = 0.0;
};
/// Two results: the fixed-rate fit RMS and the envelope trend.
std::vector<SuiteResult> nuclearity_suite(const NuclearityParams& params);

struct QuasiequivParams {
  std::vector<int> site_counts{8, 16, 32, 64};
  double length = 8.0;
  double mass = 1.0;
  double region_fraction = 0.5;
  int rank = 4;
  double decay = 1.0;
  double amplitude = 0.3;
  double ratio_tol = 3.0;
};
SuiteResult quasiequiv_suite(const QuasiequivParams& params);

}  // namespace diraclab::suites
