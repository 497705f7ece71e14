#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diraclab/fock.hpp"
#include "diraclab/model.hpp"
#include "diraclab/states.hpp"

namespace diraclab {

/// S = 2 E_C e^{-beta h} P for the ground-state projector P, with its polar
/// decomposition S = V T. The positive-energy space H = range(P) has
/// orthonormal basis `hspace_basis`; `t_eigenvectors` are the eigenvectors
/// of T inside H, column j belonging to t(j).
struct LocalizedThermalOperator {
  CMatrix s_matrix;
  double beta = 0.0;
  Region region;
  RVector t;  ///< singular values of S on H, descending
  CMatrix v_isometry;
  CMatrix t_matrix;
  CMatrix hspace_basis;
  CMatrix t_eigenvectors;
  double lambda_min_positive = 0.0;

  /// Norm bound ||T|| <= 2 e^{-beta lambda_min+}.
  double norm_bound() const;
  double trace_norm() const { return t.sum(); }
};

LocalizedThermalOperator build_s(const OneParticleModel& model, const QuasifreeState& ground, const Region& region,
                                 double beta);

struct DetBound {
  double product_form = 1.0;           ///< [prod_j (1 + t_j^p)]^{1/p}
  std::optional<double> minor_form;    ///< [sum_k tr(wedge^k T^p)]^{1/p}, dim(H) <= 12
};
DetBound det_bound(const LocalizedThermalOperator& op, double p, Backend backend = Backend::parallel);

// ---------------------------------------------------------------------------
// Coefficient inequality |<Phi_I | e^{-beta H} A Omega>| <= prod_{i in I} t_i ||A||.

struct CoefficientReport {
  double worst_margin = -1.0;  ///< max over subsets of lhs - rhs
  double max_lhs = 0.0;
  double operator_norm = 0.0;
  std::vector<int> worst_subset;
  long subsets_checked = 0;
};

/// Evaluates the inequality for many elements against one operator. The Fock
/// space is built on the eigenvectors of T so that Phi_I are occupation states.
class CoefficientChecker {
 public:
  CoefficientChecker(const OneParticleModel& model, const QuasifreeState& ground, const LocalizedThermalOperator& op,
                     int k_max = -1, Backend backend = Backend::parallel);

  const FockRep& rep() const { return rep_; }
  int k_max() const { return k_max_; }
  CoefficientReport check(const AlgebraElement& a) const;

 private:
  FockRep rep_;
  Region region_;
  RVector t_;
  CMatrix thermal_;
  int k_max_;
};

/// Same inequality with a caller-supplied representation and Hamiltonian;
/// Phi_I are built from creation operators of the T eigenvectors.
CoefficientReport coefficient_inequality_check(const FockRep& rep, const FockMatrix& hamiltonian,
                                               const LocalizedThermalOperator& op, const AlgebraElement& a,
                                               int k_max = -1);

// ---------------------------------------------------------------------------
// beta sweeps

struct NuclearityPoint {
  double beta = 0.0;
  double s_trace_norm = 0.0;
  double t1 = 0.0;
  std::vector<double> p_norms;      ///< ||T||_p, one per entry of the p list
  std::vector<double> det_bounds;   ///< [det(1 + T^p)]^{1/p}, same order
  double nu_bound = 1.0;            ///< exp(||T||_1)
  double fit_residual = 0.0;        ///< 0 outside the fit window
  double envelope = 0.0;            ///< beta^s e^{beta lambda_min+/2} ||S||_1
  std::vector<double> singular_values;
};

/// log ||S||_1 = s log(beta0 / beta) - beta m0 / 2 over the window t1 < 0.5.
struct ScalingFit {
  double beta0 = 0.0;
  double rms = 0.0;
  double window_min = 0.0;
  double window_max = 0.0;
  int points = 0;
};

/// Diagnostic fit with the decay rate free: log ||S||_1 = c - s log beta - kappa beta.
struct FreeRateFit {
  double rate = 0.0;
  double log_prefactor = 0.0;
  double rms = 0.0;
};

struct NuclearityReport {
  std::vector<double> p_list;
  std::vector<NuclearityPoint> points;
  double m0 = 0.0;
  double lambda_min_positive = 0.0;
  int spatial_dim = 1;
  std::optional<ScalingFit> fit;
  std::optional<FreeRateFit> free_rate;
  /// Least-squares slope of log(envelope) against log(beta) over the upper
  /// half of the grid; positive values mean the envelope grows.
  std::optional<double> envelope_trend;
  bool trace_norm_decreasing = true;
  bool singular_values_monotone = true;
  bool det_bounds_consistent = true;  ///< 1 <= det(1+T) <= exp(||T||_1) everywhere
  std::vector<std::string> warnings;
  /// Set instead of throwing when the options ask for a lenient fit.
  std::optional<std::string> fit_failure;
};

struct NuclearityOptions {
  std::vector<double> p_list{0.5, 1.0, 2.0};
  double fit_t1_threshold = 0.5;
  bool parallel = false;
  /// When false a failed fit is recorded in `fit_failure` and the per-point
  /// data is still returned.
  bool strict_fit = true;
};

/// Grid must be positive, strictly ascending and hold at least 8 points.
/// Throws fit if the window is empty for a non-empty region (strict_fit).
NuclearityReport nuclearity_scan(const OneParticleModel& model, const Region& region, std::span<const double> beta_grid,
                                 const NuclearityOptions& options = {});

/// Fixed-rate fit on given data; throws fit when fewer than one point qualifies.
ScalingFit fit_beta0(std::span<const double> betas, std::span<const double> trace_norms, std::span<const double> t1,
                     double m0, int spatial_dim, double t1_threshold = 0.5);

// ---------------------------------------------------------------------------
// Rescaling a -> lambda a with Killing field lambda^{-1} t.

struct RescalingReport {
  double lambda = 1.0;
  std::vector<double> betas;
  std::vector<double> trace_norm_rescaled;   ///< ||S'(beta)||_1
  std::vector<double> trace_norm_reference;  ///< ||S_{lambda m}(beta/lambda)||_1
  double max_singular_value_defect = 0.0;
  std::optional<double> beta0;
  std::optional<double> beta0_rescaled;
  std::optional<double> beta0_ratio;
};

/// Builds the rescaled model (spacing lambda a, same mass and lapse) and the
/// reference model (original grid, mass lambda m) and checks that the
/// singular values of S' at beta equal those of the reference at beta/lambda.
/// Throws rescaling_model when they differ by more than 1e-10.
RescalingReport rescaling_check(const OneParticleModel& model, const Region& region, std::span<const double> beta_grid,
                                double lambda, bool fit = true);

// ---------------------------------------------------------------------------
// Localized resolvent ||M_chi (1 + beta^2 h^2)^{-s} M_chi||_1.

struct ResolventPoint {
  double beta = 0.0;
  double trace_norm = 0.0;
  double hs_first = 0.0;   ///< ||M_chi (1+beta^2 h^2)^{-s/2}||_2^2, equals trace_norm
  double hs_second = 0.0;  ///< ||(1+beta^2 h^2)^{s/2} M_chi (1+beta^2 h^2)^{-s}||_2
  double scaled = 0.0;     ///< beta^s * trace_norm
};

struct ResolventReport {
  int s_power = 1;
  std::vector<ResolventPoint> points;
  std::optional<double> slope;
  double window_min = 0.0;
  double window_max = 0.0;
  int window_points = 0;
  double constant = 0.0;  ///< sup over the grid of beta^s * trace_norm
  double lambda_max = 0.0;
  bool decreasing = true;
  std::vector<std::string> warnings;
};

/// Slope fitted over beta * lambda_max > window_factor. The region should
/// carry a chi profile; without one its indicator is used.
ResolventReport resolvent_trace_scan(const OneParticleModel& model, const Region& region,
                                     std::span<const double> beta_grid, int s_power = 1, double window_factor = 10.0,
                                     bool parallel = false);

// ---------------------------------------------------------------------------

struct RangeDensityReport {
  int rank = 0;
  int hspace_dim = 0;
  double smallest_singular_value = 0.0;
  bool dense() const { return rank == hspace_dim; }
};

/// rank of P E_C against dim(H), with the conditioning of E_C on H.
RangeDensityReport range_density_check(const LocalizedThermalOperator& op);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int n);

}  // namespace diraclab
