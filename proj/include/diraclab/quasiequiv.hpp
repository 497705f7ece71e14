#pragma once

#include <span>
#include <vector>

#include "diraclab/model.hpp"
#include "diraclab/states.hpp"

namespace diraclab {

struct RefinementPoint {
  int n_sites = 0;
  double region_fraction = 0.0;
  double hs_distance = 0.0;
  double trace_distance = 0.0;
  double slack = 0.0;
};

/// Powers-Stormer quantities for two states compressed to a region:
/// hs = ||(E P1 E)^{1/2} - (E P2 E)^{1/2}||_2, trace = ||E (P1 - P2) E||_1.
struct QuasiequivalenceReport {
  double hs_distance = 0.0;
  double trace_distance = 0.0;
  double ps_inequality_slack = 0.0;  ///< trace - hs^2, never below -1e-10
  Region region;
  std::vector<RefinementPoint> refinement_series;
};

QuasiequivalenceReport powers_stormer(const QuasifreeState& first, const QuasifreeState& second, const Region& region);

/// ||a - b||_1 - ||a^{1/2} - b^{1/2}||_2^2 for positive a, b. Throws domain
/// for non-Hermitian input.
double ps_inequality_test(const CMatrix& a, const CMatrix& b);

/// Ground state against its smooth perturbation on lattices of fixed physical
/// length, refined through `site_counts`, with the region a fixed fraction.
struct RefinementSweep {
  std::vector<int> site_counts{8, 16, 32, 64};
  double length = 8.0;
  double mass = 1.0;
  double region_fraction = 0.5;
  int rank = 4;
  double decay = 1.0;
  double amplitude = 0.3;
};
std::vector<RefinementPoint> refinement_series(const RefinementSweep& sweep);

// ---------------------------------------------------------------------------

/// Real-linear subspace of a complex space C^M, stored in the real embedding
/// R^{2M} (real parts stacked over imaginary parts) with orthonormal columns.
struct RealSubspace {
  RMatrix basis;

  int dim() const { return static_cast<int>(basis.cols()); }
  RMatrix projector() const { return basis * basis.transpose(); }
};

struct FactorialityReport {
  int hspace_dim = 0;            ///< complex dimension M of range(P^{1/2})
  int local_dim = 0;             ///< real dimension of M(C)
  int complement_dim = 0;        ///< real dimension of the symplectic complement
  int intersection_dim = 0;      ///< principal angles below the threshold
  std::vector<double> principal_angles;  ///< ascending
  std::vector<CVector> offending_vectors;
  double double_complement_defect = 0.0;  ///< || proj(M'') - proj(M) ||_max
  /// max |Re(m|m')| over unit m in M(C), m' in M(complement of C).
  double complement_orthogonality = 0.0;
  /// dim M(C) + dim M(complement) against dim M (the full Majorana image).
  int split_dim = 0;
  int full_dim = 0;
};

/// M(C) = real span of P^{1/2} k over Majorana k in the region, against
/// i M(C)' with M(C)' = { m' : Im (m|m') = 0 for all m in M(C) }.
FactorialityReport factoriality_check(const QuasifreeState& state, const Region& region, double angle_tol = 1e-8);

/// Real-orthonormal basis of { k supported in region : C k = k }.
CMatrix majorana_basis(const Region& region, const ChargeConjugation& conj);

/// Principal angles between two real subspaces, ascending.
std::vector<double> principal_angles(const RMatrix& first, const RMatrix& second);

}  // namespace diraclab
