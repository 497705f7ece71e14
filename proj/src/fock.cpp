#include "diraclab/fock.hpp"

#include <cmath>
#include <vector>

#include "diraclab/fock_kernels.hpp"

namespace diraclab {
namespace {

FockMatrix build_field(const FockRep& rep, std::span<const cplx> create, std::span<const cplx> annihilate) {
  return rep.backend() == Backend::serial ? kernels::serial::field_matrix(rep.modes(), create, annihilate)
                                          : kernels::omp::field_matrix(rep.modes(), create, annihilate);
}

std::vector<cplx> to_std(const CVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

FockRep::FockRep(QuasifreeState state, CMatrix modes, Backend backend)
    : state_(std::move(state)), conj_(state_.conj()), mode_basis_(std::move(modes)), backend_(backend) {
  const int m = static_cast<int>(mode_basis_.cols());
  annihilators_.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    std::vector<cplx> create(static_cast<std::size_t>(m), 0.0);
    std::vector<cplx> annihilate(static_cast<std::size_t>(m), 0.0);
    annihilate[static_cast<std::size_t>(j)] = 1.0;
    annihilators_.push_back(backend_ == Backend::serial ? kernels::serial::field_matrix(m, create, annihilate)
                                                        : kernels::omp::field_matrix(m, create, annihilate));
  }
  grading_.resize(dim());
  for (Eigen::Index b = 0; b < dim(); ++b) grading_(b) = kernels::parity(static_cast<kernels::Occupation>(b));
}

CVector FockRep::vacuum() const {
  CVector omega = CVector::Zero(dim());
  omega(0) = 1.0;
  return omega;
}

CVector FockRep::twist_diagonal() const {
  return (RVector::Ones(dim()).cast<cplx>() + I_unit * grading_.cast<cplx>()) / std::sqrt(2.0);
}

FockRep FockRep::with_conjugation(ChargeConjugation conj) const {
  if (conj.dim() != conj_.dim()) throw Error(ErrorCode::shape, "with_conjugation: dimension mismatch");
  FockRep copy = *this;
  copy.conj_ = std::move(conj);
  return copy;
}

FockRep build_fock(const QuasifreeState& state, int max_modes, const std::optional<CMatrix>& mode_basis,
                   Backend backend) {
  if (max_modes < 0 || max_modes > 14) throw Error(ErrorCode::too_large, "build_fock: max_modes must lie in [0, 14]");
  CMatrix modes;
  if (mode_basis) {
    modes = *mode_basis;
    if (modes.rows() != state.dim()) throw Error(ErrorCode::shape, "build_fock: mode basis has wrong length");
    const CMatrix gram = modes.adjoint() * modes;
    if ((gram - CMatrix::Identity(modes.cols(), modes.cols())).cwiseAbs().maxCoeff() > 1e-10) {
      throw Error(ErrorCode::consistency, "build_fock: mode basis is not orthonormal");
    }
    const CMatrix outside = state.sqrt_p() - modes * (modes.adjoint() * state.sqrt_p());
    if (outside.cwiseAbs().maxCoeff() > 1e-10) {
      throw Error(ErrorCode::consistency, "build_fock: mode basis does not span range(P^{1/2})");
    }
  } else {
    modes = linalg::orthonormal_basis(state.sqrt_p(), 1e-10);
  }
  if (modes.cols() > max_modes) {
    throw Error(ErrorCode::too_large, "build_fock: rank of P^{1/2} is " + std::to_string(modes.cols()) +
                                          ", above max_modes " + std::to_string(max_modes));
  }
  return FockRep(state, std::move(modes), backend);
}

CVector mode_coefficients(const FockRep& rep, const CVector& v, double tol) {
  if (v.size() != rep.mode_basis().rows()) throw Error(ErrorCode::shape, "mode_coefficients: dimension mismatch");
  CVector c = rep.mode_basis().adjoint() * v;
  const double outside = (v - rep.mode_basis() * c).norm();
  if (outside > tol * std::max(1.0, v.norm())) {
    throw Error(ErrorCode::mode_truncation, "vector has a component of norm " + std::to_string(outside) +
                                                " outside the Fock modes");
  }
  return c;
}

FockMatrix creation(const FockRep& rep, const CVector& p) {
  const std::vector<cplx> create = to_std(mode_coefficients(rep, p));
  const std::vector<cplx> zero(create.size(), 0.0);
  return build_field(rep, create, zero);
}

FockMatrix annihilation(const FockRep& rep, const CVector& p) {
  // a(p) = sum_j conj((p_j | p)) a_j is antilinear in p.
  const std::vector<cplx> annihilate = to_std(mode_coefficients(rep, p).conjugate());
  const std::vector<cplx> zero(annihilate.size(), 0.0);
  return build_field(rep, zero, annihilate);
}

FockMatrix field_operator(const FockRep& rep, const CVector& k) {
  if (k.size() != rep.state().dim()) throw Error(ErrorCode::shape, "field_operator: dimension mismatch");
  const CMatrix& sqrt_p = rep.state().sqrt_p();
  const std::vector<cplx> create = to_std(mode_coefficients(rep, sqrt_p * k));
  const std::vector<cplx> annihilate = to_std(mode_coefficients(rep, sqrt_p * rep.conj().apply(k)).conjugate());
  return build_field(rep, create, annihilate);
}

// ---------------------------------------------------------------------------

AlgebraElement::AlgebraElement(const FockRep& rep, std::vector<FieldWord> words, std::optional<Region> support)
    : words_(std::move(words)), support_(std::move(support)) {
  matrix_ = CMatrix::Zero(rep.dim(), rep.dim());
  for (const FieldWord& w : words_) {
    FockMatrix product(rep.dim(), rep.dim());
    product.setIdentity();
    for (const CVector& k : w.fields) {
      if (support_ && !support_->supports(k)) {
        throw Error(ErrorCode::support, "algebra element: field vector leaves the declared region");
      }
      product = FockMatrix(product * field_operator(rep, k));
    }
    matrix_ += w.coefficient * CMatrix(product);
  }
}

AlgebraElement AlgebraElement::identity(const FockRep& rep) { return AlgebraElement(rep, {FieldWord{}}); }

AlgebraElement AlgebraElement::field(const FockRep& rep, const CVector& k, std::optional<Region> support) {
  return AlgebraElement(rep, {FieldWord{1.0, {k}}}, std::move(support));
}

double AlgebraElement::operator_norm() const {
  if (matrix_.size() == 0) return 0.0;
  return linalg::singular_values(matrix_)(0);
}

// ---------------------------------------------------------------------------

FockMatrix hamiltonian(const FockRep& rep, const OneParticleModel& model) {
  const CMatrix& p = rep.state().p();
  if (p.rows() != model.dim()) throw Error(ErrorCode::consistency, "hamiltonian: representation and model differ in dimension");
  const double scale = std::max(1.0, model.h().cwiseAbs().maxCoeff());
  const double commutator = (p * model.h() - model.h() * p).cwiseAbs().maxCoeff();
  if (!rep.state().is_pure() || commutator > 1e-8 * scale) {
    throw Error(ErrorCode::consistency, "hamiltonian: representation is not built from a ground state of the model");
  }
  const CMatrix one_body = rep.mode_basis().adjoint() * model.h() * rep.mode_basis();
  if (linalg::eigh(one_body).values.minCoeff() < -1e-9 * scale) {
    throw Error(ErrorCode::consistency, "hamiltonian: P h P is not positive, state is not the ground state");
  }
  return rep.backend() == Backend::serial ? kernels::serial::second_quantize(rep.modes(), one_body)
                                          : kernels::omp::second_quantize(rep.modes(), one_body);
}

CMatrix fock_thermal(const FockMatrix& h, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::domain, "fock_thermal: beta must be positive");
  if (h.rows() > 4096) throw Error(ErrorCode::too_large, "fock_thermal: Fock dimension above 4096");
  const linalg::HermitianEigen eig = linalg::eigh(CMatrix(h));
  return linalg::apply_function(eig, [beta](double e) { return std::exp(-beta * e); });
}

CVector theta_map(const CMatrix& thermal, const AlgebraElement& a) {
  if (thermal.cols() != a.matrix().rows()) throw Error(ErrorCode::shape, "theta_map: dimension mismatch");
  return thermal * a.matrix().col(0);
}

CVector theta_map(const FockMatrix& h, double beta, const AlgebraElement& a) {
  return theta_map(fock_thermal(h, beta), a);
}

std::pair<CMatrix, CMatrix> parity_parts(const FockRep& rep, const CMatrix& f) {
  if (f.rows() != rep.dim() || f.cols() != rep.dim()) throw Error(ErrorCode::shape, "parity_parts: dimension mismatch");
  const RVector& u = rep.grading();
  const CMatrix conjugated = u.cast<cplx>().asDiagonal() * f * u.cast<cplx>().asDiagonal();
  return {0.5 * (f + conjugated), 0.5 * (f - conjugated)};
}

CMatrix graded_commutator(const FockRep& rep, const CMatrix& f1, const CMatrix& f2) {
  // [F1,F2] - [O1,O2] + {O1,O2} with O the odd parts.
  const CMatrix o1 = parity_parts(rep, f1).second;
  const CMatrix o2 = parity_parts(rep, f2).second;
  return f1 * f2 - f2 * f1 + 2.0 * o2 * o1;
}

CMatrix graded_commutator(const FockRep& rep, const AlgebraElement& f1, const AlgebraElement& f2) {
  return graded_commutator(rep, f1.matrix(), f2.matrix());
}

CMatrix twist(const FockRep& rep, const CMatrix& f) {
  if (f.rows() != rep.dim() || f.cols() != rep.dim()) throw Error(ErrorCode::shape, "twist: dimension mismatch");
  const CVector v = rep.twist_diagonal();
  return v.asDiagonal() * f * v.conjugate().asDiagonal();
}

}  // namespace diraclab
