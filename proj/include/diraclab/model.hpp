#pragma once

#include <optional>
#include <vector>

#include "diraclab/linalg.hpp"
#include "diraclab/types.hpp"

namespace diraclab {

/// Periodic one-dimensional lattice carrying two-component spinors.
///
/// One-particle vectors are laid out spinor-major: component `spin` at
/// `site` lives at index spin * n_sites + site. Lattice volume weights are
/// absorbed into the field values, so the inner product is the standard one.
struct SpinorLattice {
  int n_sites = 0;
  double spacing = 1.0;
  bool periodic = true;
  int spinor_dim = 2;
  int spatial_dim = 1;
  /// Lapse v(x) per site; must be strictly positive everywhere.
  std::vector<double> lapse;

  static SpinorLattice flat(int n_sites, double spacing);

  int dim() const { return n_sites * spinor_dim; }
  int index(int spin, int site) const { return spin * n_sites + site; }
  /// v0 = min_x v(x).
  double min_lapse() const;
};

/// Antiunitary charge conjugation C k = theta * conj(k).
class ChargeConjugation {
 public:
  /// Validates that theta is unitary and theta * conj(theta) = 1 to 1e-12.
  explicit ChargeConjugation(CMatrix theta);

  /// Skips validation. Only for negative-path testing of downstream checks.
  static ChargeConjugation unchecked(CMatrix theta);

  const CMatrix& theta() const { return theta_; }
  int dim() const { return static_cast<int>(theta_.rows()); }

  CVector apply(const CVector& k) const { return theta_ * k.conjugate(); }
  /// Columnwise C applied to a matrix of vectors.
  CMatrix apply_columns(const CMatrix& ks) const { return theta_ * ks.conjugate(); }
  /// The (linear) operator C A C = theta conj(A) theta^dagger.
  CMatrix conjugate_operator(const CMatrix& a) const { return theta_ * a.conjugate() * theta_.adjoint(); }

  /// max |theta conj(theta) - 1|.
  double involution_defect() const;
  /// max over basis pairs of |(C e_i | C e_j) - (e_j | e_i)|.
  double antiunitarity_defect() const;

  /// Real-orthonormal basis of { k in span(basis) : C k = k }, for a
  /// C-invariant subspace given by orthonormal columns. Its real dimension
  /// equals the complex dimension of the subspace.
  CMatrix majorana_basis(const CMatrix& subspace_basis) const;

 private:
  struct Unchecked {};
  ChargeConjugation(CMatrix theta, Unchecked) : theta_(std::move(theta)) {}
  CMatrix theta_;
};

/// A set of lattice sites together with the projector E_C that multiplies
/// by its characteristic function, and an optional smooth cutoff profile chi.
class Region {
 public:
  Region() = default;
  Region(const SpinorLattice& lattice, std::vector<int> sites);

  static Region empty(const SpinorLattice& lattice) { return Region(lattice, {}); }
  static Region full(const SpinorLattice& lattice);
  /// Sites [first, last).
  static Region range(const SpinorLattice& lattice, int first, int last);
  /// The first half of the lattice, [0, n/2).
  static Region half(const SpinorLattice& lattice) { return range(lattice, 0, lattice.n_sites / 2); }

  const std::vector<int>& sites() const { return sites_; }
  int n_sites() const { return n_lattice_sites_; }
  int dim() const { return n_lattice_sites_ * spinor_dim_; }
  bool is_empty() const { return sites_.empty(); }
  double fraction() const { return static_cast<double>(sites_.size()) / n_lattice_sites_; }

  /// Diagonal of E_C on the one-particle space.
  const RVector& mask() const { return mask_; }
  CMatrix projector() const;
  /// Orthonormal basis of the range of E_C (standard basis vectors).
  CMatrix basis() const;
  Region complement() const;

  /// True if k vanishes (to tol) outside the region.
  bool supports(const CVector& k, double tol = 1e-12) const;

  /// Attach a smooth profile: chi = 1 on the region, raised-cosine falloff
  /// over `width` sites on either side (periodic wrap), 0 beyond.
  Region with_smooth_chi(int width) const;
  Region with_chi(std::vector<double> chi_per_site) const;
  const std::optional<std::vector<double>>& chi() const { return chi_; }
  /// chi on the one-particle space (per site, repeated over spinor components).
  RVector chi_diagonal() const;

 private:
  int n_lattice_sites_ = 0;
  int spinor_dim_ = 2;
  std::vector<int> sites_;
  RVector mask_;
  std::optional<std::vector<double>> chi_;
};

/// Measured invariants of a built model.
struct ModelDiagnostics {
  double hermiticity_defect = 0.0;
  double conjugation_defect = 0.0;   ///< ||C h C + h|| / ||h||
  double spectrum_symmetry_defect = 0.0;
  double min_h_squared = 0.0;        ///< smallest eigenvalue of h^2
  double m0_squared = 0.0;
  double lambda_min_positive = 0.0;  ///< 0 if there is no positive eigenvalue
  double lambda_max = 0.0;           ///< max |lambda_j|
  int zero_modes = 0;                ///< eigenvalues within 1e-10 of zero
  bool gap_respected(double tol = 1e-9) const { return min_h_squared >= m0_squared - tol; }
};

/// Hermitian lattice Dirac Hamiltonian with its charge conjugation. Immutable
/// once built; the eigendecomposition is computed at construction.
class OneParticleModel {
 public:
  OneParticleModel(SpinorLattice lattice, CMatrix h, ChargeConjugation conj, double mass);

  const SpinorLattice& lattice() const { return lattice_; }
  const CMatrix& h() const { return h_; }
  const ChargeConjugation& conj() const { return conj_; }
  double mass() const { return mass_; }
  /// m0 = v0 * m.
  double m0() const { return m0_; }
  int dim() const { return lattice_.dim(); }

  const linalg::HermitianEigen& eig() const { return eig_; }
  const RVector& eigenvalues() const { return eig_.values; }
  const CMatrix& eigenvectors() const { return eig_.vectors; }

  /// Orthonormal eigenvectors with eigenvalue > tol, ascending in energy.
  CMatrix positive_eigenvectors(double tol = 1e-10) const;
  RVector positive_eigenvalues(double tol = 1e-10) const;
  double smallest_positive_eigenvalue(double tol = 1e-10) const;

  ModelDiagnostics diagnostics() const;

 private:
  SpinorLattice lattice_;
  CMatrix h_;
  ChargeConjugation conj_;
  double mass_;
  double m0_;
  linalg::HermitianEigen eig_;
};

/// h = -(i/2) sigma3 (x) (V D + D V) + sigma1 (x) (V m), with D the periodic
/// central difference and V = diag(lapse); theta = sigma3 (x) 1.
OneParticleModel build_model(const SpinorLattice& lattice, double mass);

/// e^{-beta h} in the eigenbasis. Throws for beta <= 0.
CMatrix thermal_operator(const OneParticleModel& model, double beta);

/// e^{-beta h} P for the positive spectral projector, built from positive
/// eigenvectors only so that large beta * |lambda| never overflows.
CMatrix thermal_positive_part(const OneParticleModel& model, double beta);

}  // namespace diraclab
