#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "diraclab/model.hpp"
#include "diraclab/states.hpp"

namespace diraclab {

enum class Backend { serial, parallel };

/// Antisymmetric Fock space over range(P^{1/2}) in the occupation basis.
///
/// Basis vector b (an M-bit integer) is a_{j1}^dagger ... a_{jr}^dagger Omega
/// with j1 < ... < jr the set bits of b, so Omega is index 0. The state's
/// charge conjugation is copied in and can be swapped for negative-path tests.
class FockRep {
 public:
  int modes() const { return static_cast<int>(mode_basis_.cols()); }
  Eigen::Index dim() const { return Eigen::Index{1} << modes(); }

  /// Orthonormal columns p_j spanning range(P^{1/2}).
  const CMatrix& mode_basis() const { return mode_basis_; }
  const QuasifreeState& state() const { return state_; }
  const ChargeConjugation& conj() const { return conj_; }
  Backend backend() const { return backend_; }

  const FockMatrix& annihilator(int j) const { return annihilators_.at(static_cast<std::size_t>(j)); }
  FockMatrix creator(int j) const { return annihilator(j).adjoint(); }

  CVector vacuum() const;
  /// Grading unitary U = (-1)^N, as its diagonal.
  const RVector& grading() const { return grading_; }
  /// Twist V = (1 + iU)/sqrt(2), as its diagonal.
  CVector twist_diagonal() const;

  /// Copy of this representation whose field operators use a different C.
  FockRep with_conjugation(ChargeConjugation conj) const;

 private:
  friend FockRep build_fock(const QuasifreeState&, int, const std::optional<CMatrix>&, Backend);
  FockRep(QuasifreeState state, CMatrix modes, Backend backend);

  QuasifreeState state_;
  ChargeConjugation conj_;
  CMatrix mode_basis_;
  Backend backend_;
  std::vector<FockMatrix> annihilators_;
  RVector grading_;
};

/// Builds the Fock space. `mode_basis`, if given, must be an orthonormal basis
/// of range(P^{1/2}); otherwise one is computed from P^{1/2}.
FockRep build_fock(const QuasifreeState& state, int max_modes = 14,
                   const std::optional<CMatrix>& mode_basis = std::nullopt, Backend backend = Backend::parallel);

/// Coefficients c_j = (p_j | v) of a one-particle vector in the mode basis.
/// Throws mode_truncation if v has a component outside the span above tol.
CVector mode_coefficients(const FockRep& rep, const CVector& v, double tol = 1e-10);

/// a(p)^dagger and a(p) for p in range(P^{1/2}).
FockMatrix creation(const FockRep& rep, const CVector& p);
FockMatrix annihilation(const FockRep& rep, const CVector& p);

/// pi(psi(k)) = a(P^{1/2} k)^dagger + a(P^{1/2} C k).
FockMatrix field_operator(const FockRep& rep, const CVector& k);

/// Product of field operators with complex coefficients:
/// sum_w c_w psi(k_{w,1}) ... psi(k_{w,r}); the empty word is the identity.
struct FieldWord {
  cplx coefficient{1.0};
  std::vector<CVector> fields;
};

class AlgebraElement {
 public:
  /// Evaluates the matrix on construction. If `support` is given, every field
  /// vector must vanish outside it (support error otherwise).
  AlgebraElement(const FockRep& rep, std::vector<FieldWord> words, std::optional<Region> support = std::nullopt);

  static AlgebraElement identity(const FockRep& rep);
  static AlgebraElement field(const FockRep& rep, const CVector& k, std::optional<Region> support = std::nullopt);

  const std::vector<FieldWord>& words() const { return words_; }
  const std::optional<Region>& support() const { return support_; }
  const CMatrix& matrix() const { return matrix_; }
  double operator_norm() const;

 private:
  std::vector<FieldWord> words_;
  std::optional<Region> support_;
  CMatrix matrix_;
};

/// H = sum_{jl} (p_j | h p_l) a_j^dagger a_l, the second quantization of
/// h_+ = P h P. The representation must come from a ground state of `model`.
FockMatrix hamiltonian(const FockRep& rep, const OneParticleModel& model);

/// e^{-beta H} by dense eigendecomposition (Fock dimension at most 4096).
CMatrix fock_thermal(const FockMatrix& hamiltonian, double beta);

/// Theta_beta(A) = e^{-beta H} A Omega.
CVector theta_map(const CMatrix& thermal, const AlgebraElement& a);
CVector theta_map(const FockMatrix& hamiltonian, double beta, const AlgebraElement& a);

/// Even and odd parts F_+- = (F +- U F U^dagger)/2.
std::pair<CMatrix, CMatrix> parity_parts(const FockRep& rep, const CMatrix& f);

/// [F1, F2]_gamma: commutator except for the odd-odd part, which anticommutes.
CMatrix graded_commutator(const FockRep& rep, const CMatrix& f1, const CMatrix& f2);
CMatrix graded_commutator(const FockRep& rep, const AlgebraElement& f1, const AlgebraElement& f2);

/// F^t = V F V^dagger.
CMatrix twist(const FockRep& rep, const CMatrix& f);

}  // namespace diraclab
