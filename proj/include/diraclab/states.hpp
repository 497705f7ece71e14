#pragma once

#include <optional>
#include <span>
#include <vector>

#include "diraclab/model.hpp"

namespace diraclab {

/// Quasifree state given by an operator P on the one-particle space with
/// 0 <= P <= 1 and C P C = 1 - P. Pure exactly when P is a projector.
class QuasifreeState {
 public:
  /// Validates hermiticity, 0 <= P <= 1 and the C-duality to 1e-12.
  QuasifreeState(CMatrix p, ChargeConjugation conj, bool gapped = true);

  const CMatrix& p() const { return p_; }
  const CMatrix& sqrt_p() const { return sqrt_p_; }
  const ChargeConjugation& conj() const { return conj_; }
  int dim() const { return static_cast<int>(p_.rows()); }

  bool is_pure(double tol = 1e-10) const;
  /// False when zero modes were assigned by policy rather than by the spectrum.
  bool gapped() const { return gapped_; }

  /// Spectrum of P, ascending.
  RVector spectrum() const;

 private:
  CMatrix p_;
  CMatrix sqrt_p_;
  ChargeConjugation conj_;
  bool gapped_ = true;
};

enum class ZeroModePolicy {
  reject,
  /// Zero modes are split into Majorana pairs f = (m_2j + i m_2j+1)/sqrt(2),
  /// taken in index order; each f joins the positive subspace.
  assign_lowest_first,
};

/// Projector onto the positive spectral subspace of h (the ground state).
QuasifreeState positive_projector(const OneParticleModel& model, ZeroModePolicy policy = ZeroModePolicy::reject);

/// Strictly mixed state P = (1 + e^{-beta h})^{-1}, the KMS state of h.
QuasifreeState thermal_state(const OneParticleModel& model, double beta);

/// Test vectors for n-point evaluation, each optionally tagged with a region
/// it must be supported in.
class TestVectorSet {
 public:
  TestVectorSet() = default;
  explicit TestVectorSet(std::vector<CVector> vectors);

  void add(CVector k, std::optional<Region> support = std::nullopt);

  std::size_t size() const { return vectors_.size(); }
  const CVector& operator[](std::size_t i) const { return vectors_[i]; }
  const std::optional<Region>& support(std::size_t i) const { return supports_[i]; }
  std::span<const CVector> vectors() const { return vectors_; }

 private:
  std::vector<CVector> vectors_;
  std::vector<std::optional<Region>> supports_;
};

/// omega(psi(k1) psi(k2)) = (C k1 | P k2).
cplx two_point(const QuasifreeState& state, const CVector& k1, const CVector& k2);

/// Pfaffian of an antisymmetric matrix by first-row expansion with
/// memoization over index subsets (n <= 20).
cplx pfaffian(const CMatrix& antisymmetric);

/// omega(psi(k1) ... psi(kn)): zero for odd n, otherwise the signed sum over
/// pair partitions, evaluated as the Pfaffian of the two-point matrix.
cplx n_point(const QuasifreeState& state, std::span<const CVector> ks);
cplx n_point(const QuasifreeState& state, const TestVectorSet& ks);

/// Compression E_C P E_C of a state to a region. The result is positive and
/// bounded by one but satisfies C-duality only on the region's subspace.
struct Restriction {
  CMatrix compressed;
  CMatrix e_c;
};
Restriction restrict_to(const QuasifreeState& state, const Region& region);

/// Smooth finite-rank perturbation of a state concentrated on low-energy
/// modes. `rank` counts one-particle modes touched and is rounded up to an
/// even number (the perturbation acts on C-conjugate pairs); coefficients
/// decay like amplitude * e^{-decay |lambda|}. The result satisfies
/// 0 <= P' <= 1 and C P' C = 1 - P'.
QuasifreeState smooth_perturbation(const OneParticleModel& model, const QuasifreeState& state, int rank, double decay,
                                   double amplitude = 0.3);

}  // namespace diraclab
