#include "diraclab/quasiequiv.hpp"

#include <algorithm>
#include <cmath>

namespace diraclab {
namespace {

RMatrix embed(const CMatrix& c) {
  RMatrix out(2 * c.rows(), c.cols());
  out.topRows(c.rows()) = c.real();
  out.bottomRows(c.rows()) = c.imag();
  return out;
}

CVector unembed(const RVector& x) {
  const Eigen::Index m = x.size() / 2;
  return x.head(m).cast<cplx>() + I_unit * x.tail(m).cast<cplx>();
}

RMatrix real_span(const RMatrix& columns, double rel_tol = 1e-10) {
  if (columns.cols() == 0) return RMatrix(columns.rows(), 0);
  Eigen::BDCSVD<RMatrix> svd(columns, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(linalg::numerical_rank(svd.singularValues(), rel_tol));
}

/// Orthonormal basis of { y : a y = 0 }.
RMatrix null_space(const RMatrix& a, Eigen::Index ambient) {
  if (a.rows() == 0) return RMatrix::Identity(ambient, ambient);
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  const int r = linalg::numerical_rank(svd.singularValues(), 1e-10);
  return svd.matrixV().rightCols(ambient - r);
}

/// The symplectic form Im(u|v) = x_u^T J x_v in the real embedding.
RMatrix symplectic_form(Eigen::Index m) {
  RMatrix j = RMatrix::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m) = RMatrix::Identity(m, m);
  j.bottomLeftCorner(m, m) = -RMatrix::Identity(m, m);
  return j;
}

}  // namespace

QuasiequivalenceReport powers_stormer(const QuasifreeState& first, const QuasifreeState& second, const Region& region) {
  if (first.dim() != second.dim()) throw Error(ErrorCode::shape, "powers_stormer: states live on different spaces");
  const CMatrix a = restrict_to(first, region).compressed;
  const CMatrix b = restrict_to(second, region).compressed;
  QuasiequivalenceReport report;
  report.region = region;
  report.hs_distance = (linalg::psd_sqrt(a) - linalg::psd_sqrt(b)).norm();
  report.trace_distance = linalg::eigh(a - b).values.cwiseAbs().sum();
  report.ps_inequality_slack = report.trace_distance - report.hs_distance * report.hs_distance;
  return report;
}

double ps_inequality_test(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw Error(ErrorCode::shape, "ps_inequality_test: operands must be square of equal size");
  }
  if (linalg::hermiticity_defect(a) > 1e-12 || linalg::hermiticity_defect(b) > 1e-12) {
    throw Error(ErrorCode::domain, "ps_inequality_test: operands must be Hermitian");
  }
  const double trace = linalg::eigh(a - b).values.cwiseAbs().sum();
  const double hs = (linalg::psd_sqrt(a) - linalg::psd_sqrt(b)).norm();
  return trace - hs * hs;
}

std::vector<RefinementPoint> refinement_series(const RefinementSweep& sweep) {
  std::vector<RefinementPoint> out;
  for (int n : sweep.site_counts) {
    const SpinorLattice lattice = SpinorLattice::flat(n, sweep.length / n);
    const OneParticleModel model = build_model(lattice, sweep.mass);
    const QuasifreeState ground = positive_projector(model);
    const QuasifreeState perturbed = smooth_perturbation(model, ground, sweep.rank, sweep.decay, sweep.amplitude);
    const int last = static_cast<int>(std::lround(sweep.region_fraction * n));
    const Region region = Region::range(lattice, 0, last);
    const QuasiequivalenceReport r = powers_stormer(ground, perturbed, region);
    out.push_back({n, region.fraction(), r.hs_distance, r.trace_distance, r.ps_inequality_slack});
  }
  return out;
}

// ---------------------------------------------------------------------------

CMatrix majorana_basis(const Region& region, const ChargeConjugation& conj) {
  if (region.dim() != conj.dim()) throw Error(ErrorCode::shape, "majorana_basis: region and C dimensions differ");
  return conj.majorana_basis(region.basis());
}

std::vector<double> principal_angles(const RMatrix& first, const RMatrix& second) {
  if (first.rows() != second.rows()) throw Error(ErrorCode::shape, "principal_angles: ambient dimensions differ");
  const RMatrix& big = first.cols() >= second.cols() ? first : second;
  const RMatrix& small = first.cols() >= second.cols() ? second : first;
  if (small.cols() == 0) return {};
  // cosines from big^T small, sines from the part of small outside big; the
  // pairing by order is exact and keeps small angles accurate.
  const RVector cosines = Eigen::JacobiSVD<RMatrix>(big.transpose() * small).singularValues();
  RVector sines = Eigen::JacobiSVD<RMatrix>(small - big * (big.transpose() * small)).singularValues();
  std::sort(sines.data(), sines.data() + sines.size());
  std::vector<double> angles(static_cast<std::size_t>(small.cols()));
  for (Eigen::Index i = 0; i < small.cols(); ++i) {
    angles[static_cast<std::size_t>(i)] = std::atan2(sines(i), cosines(i));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

FactorialityReport factoriality_check(const QuasifreeState& state, const Region& region, double angle_tol) {
  if (region.dim() != state.dim()) throw Error(ErrorCode::shape, "factoriality_check: region and state differ");
  const CMatrix modes = linalg::orthonormal_basis(state.sqrt_p(), 1e-10);
  const Eigen::Index m = modes.cols();
  FactorialityReport report;
  report.hspace_dim = static_cast<int>(m);

  auto image = [&](const CMatrix& majorana) {
    return RealSubspace{real_span(embed(modes.adjoint() * state.sqrt_p() * majorana))};
  };
  const RealSubspace local = image(majorana_basis(region, state.conj()));
  const RealSubspace outside = image(majorana_basis(region.complement(), state.conj()));
  report.complement_orthogonality =
      local.dim() == 0 || outside.dim() == 0 ? 0.0 : (local.basis.transpose() * outside.basis).cwiseAbs().maxCoeff();
  report.split_dim = local.dim() + outside.dim();
  report.full_dim = image(state.conj().majorana_basis(CMatrix::Identity(state.dim(), state.dim()))).dim();
  const RMatrix j = symplectic_form(m);
  const RealSubspace complement{null_space(local.basis.transpose() * j, 2 * m)};
  report.local_dim = local.dim();
  report.complement_dim = complement.dim();

  const RealSubspace double_complement{null_space(complement.basis.transpose() * j, 2 * m)};
  report.double_complement_defect =
      m == 0 ? 0.0 : (double_complement.projector() - local.projector()).cwiseAbs().maxCoeff();

  // Multiplication by i acts as (x, y) -> (-y, x) = -J.
  const RMatrix i_complement = -j * complement.basis;
  report.principal_angles = principal_angles(local.basis, i_complement);
  for (double angle : report.principal_angles) {
    if (angle < angle_tol) ++report.intersection_dim;
  }
  if (report.intersection_dim > 0) {
    // Principal vectors of M(C) for the offending angles.
    Eigen::JacobiSVD<RMatrix> svd(local.basis.transpose() * i_complement, Eigen::ComputeThinU);
    for (int k = 0; k < report.intersection_dim && k < svd.matrixU().cols(); ++k) {
      report.offending_vectors.push_back(modes * unembed(local.basis * svd.matrixU().col(k)));
    }
  }
  return report;
}

}  // namespace diraclab
