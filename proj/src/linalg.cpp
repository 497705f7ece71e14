#include "diraclab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace diraclab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_geometry: return "invalid-geometry";
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::zero_mode: return "zero-mode";
    case ErrorCode::domain: return "domain";
    case ErrorCode::shape: return "shape";
    case ErrorCode::too_large: return "too-large";
    case ErrorCode::mode_truncation: return "mode-truncation";
    case ErrorCode::consistency: return "consistency";
    case ErrorCode::wrong_state: return "wrong-state";
    case ErrorCode::support: return "support";
    case ErrorCode::fit: return "fit";
    case ErrorCode::perturbation_too_large: return "perturbation-too-large";
    case ErrorCode::rescaling_model: return "rescaling-model";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

namespace linalg {

HermitianEigen eigh(const CMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::shape, "eigh: matrix is not square");
  // Symmetrize so that tiny anti-Hermitian noise does not leak into the solver.
  const CMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::consistency, "eigh: solver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix apply_function(const HermitianEigen& eig, const std::function<double(double)>& f) {
  RVector fv(eig.values.size());
  for (Eigen::Index j = 0; j < fv.size(); ++j) fv(j) = f(eig.values(j));
  return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

double hermiticity_defect(const CMatrix& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

CMatrix psd_sqrt(const CMatrix& a) {
  return apply_function(eigh(a), [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector();
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues();
}

double schatten_norm(std::span<const double> singular_values, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::domain, "schatten_norm: p must be positive");
  double acc = 0.0;
  for (double s : singular_values) {
    if (s > 0.0) acc += std::pow(s, p);
  }
  return std::pow(acc, 1.0 / p);
}

double schatten_norm(const CMatrix& a, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::domain, "schatten_norm: p must be positive");
  const RVector s = singular_values(a);
  return schatten_norm(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), p);
}

int numerical_rank(const RVector& singular_values, double rel_tol, double abs_floor) {
  if (singular_values.size() == 0) return 0;
  const double cut = std::max(rel_tol * singular_values.maxCoeff(), abs_floor);
  return static_cast<int>((singular_values.array() > cut).count());
}

CMatrix orthonormal_basis(const CMatrix& columns, double rel_tol) {
  if (columns.cols() == 0) return CMatrix(columns.rows(), 0);
  Eigen::BDCSVD<CMatrix> svd(columns, Eigen::ComputeThinU);
  const int r = numerical_rank(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

RVector least_squares(const RMatrix& design, const RVector& rhs) {
  if (design.rows() != rhs.size()) throw Error(ErrorCode::shape, "least_squares: row count mismatch");
  if (design.rows() < design.cols()) throw Error(ErrorCode::fit, "least_squares: fewer points than parameters");
  return design.colPivHouseholderQr().solve(rhs);
}

double rms(const RVector& residuals) {
  if (residuals.size() == 0) return 0.0;
  return std::sqrt(residuals.squaredNorm() / static_cast<double>(residuals.size()));
}

}  // namespace linalg
}  // namespace diraclab
