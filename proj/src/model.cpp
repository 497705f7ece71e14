#include "diraclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace diraclab {

SpinorLattice SpinorLattice::flat(int n_sites, double spacing) {
  SpinorLattice lattice;
  lattice.n_sites = n_sites;
  lattice.spacing = spacing;
  lattice.lapse.assign(static_cast<std::size_t>(std::max(n_sites, 0)), 1.0);
  return lattice;
}

double SpinorLattice::min_lapse() const {
  if (lapse.empty()) return 0.0;
  return *std::min_element(lapse.begin(), lapse.end());
}

// ---------------------------------------------------------------------------

ChargeConjugation::ChargeConjugation(CMatrix theta) : theta_(std::move(theta)) {
  if (theta_.rows() != theta_.cols()) throw Error(ErrorCode::shape, "charge conjugation: theta is not square");
  if (antiunitarity_defect() > 1e-12) throw Error(ErrorCode::consistency, "charge conjugation: theta is not unitary");
  if (involution_defect() > 1e-12) throw Error(ErrorCode::consistency, "charge conjugation: C^2 != 1");
}

ChargeConjugation ChargeConjugation::unchecked(CMatrix theta) { return ChargeConjugation(std::move(theta), Unchecked{}); }

double ChargeConjugation::involution_defect() const {
  const CMatrix sq = theta_ * theta_.conjugate();
  return (sq - CMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

double ChargeConjugation::antiunitarity_defect() const {
  // (C e_i | C e_j) = (theta^dagger theta)_{ij} conjugated; equality with
  // (e_j | e_i) = delta_ij is unitarity of theta.
  const CMatrix gram = theta_.adjoint() * theta_;
  return (gram - CMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

CMatrix ChargeConjugation::majorana_basis(const CMatrix& subspace_basis) const {
  const Eigen::Index n = subspace_basis.rows();
  const Eigen::Index d = subspace_basis.cols();
  if (d == 0) return CMatrix(n, 0);
  // Candidates (b + Cb)/2 and i(b - Cb)/2 span the fixed-point set as a real
  // space; orthonormalize them in the real embedding [Re; Im].
  const CMatrix cb = apply_columns(subspace_basis);
  RMatrix real_embed(2 * n, 2 * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const CVector even = 0.5 * (subspace_basis.col(j) + cb.col(j));
    const CVector odd = 0.5 * I_unit * (subspace_basis.col(j) - cb.col(j));
    real_embed.col(2 * j) << even.real(), even.imag();
    real_embed.col(2 * j + 1) << odd.real(), odd.imag();
  }
  Eigen::BDCSVD<RMatrix> svd(real_embed, Eigen::ComputeThinU);
  const RMatrix u = svd.matrixU().leftCols(d);
  CMatrix out(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    out.col(j) = u.col(j).head(n).cast<cplx>() + I_unit * u.col(j).tail(n).cast<cplx>();
  }
  return out;
}

// ---------------------------------------------------------------------------

Region::Region(const SpinorLattice& lattice, std::vector<int> sites)
    : n_lattice_sites_(lattice.n_sites), spinor_dim_(lattice.spinor_dim), sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  for (int s : sites_) {
    if (s < 0 || s >= n_lattice_sites_) throw Error(ErrorCode::invalid_geometry, "region: site index outside lattice");
  }
  mask_ = RVector::Zero(dim());
  for (int s : sites_) {
    for (int c = 0; c < spinor_dim_; ++c) mask_(c * n_lattice_sites_ + s) = 1.0;
  }
}

Region Region::full(const SpinorLattice& lattice) { return range(lattice, 0, lattice.n_sites); }

Region Region::range(const SpinorLattice& lattice, int first, int last) {
  std::vector<int> sites;
  for (int s = first; s < last; ++s) sites.push_back(s);
  return Region(lattice, std::move(sites));
}

CMatrix Region::projector() const { return mask_.cast<cplx>().asDiagonal(); }

CMatrix Region::basis() const {
  const int count = static_cast<int>(sites_.size()) * spinor_dim_;
  CMatrix b = CMatrix::Zero(dim(), count);
  int col = 0;
  for (int c = 0; c < spinor_dim_; ++c) {
    for (int s : sites_) b(c * n_lattice_sites_ + s, col++) = 1.0;
  }
  return b;
}

Region Region::complement() const {
  std::vector<int> rest;
  std::set<int> in(sites_.begin(), sites_.end());
  for (int s = 0; s < n_lattice_sites_; ++s) {
    if (!in.count(s)) rest.push_back(s);
  }
  SpinorLattice shape;
  shape.n_sites = n_lattice_sites_;
  shape.spinor_dim = spinor_dim_;
  return Region(shape, std::move(rest));
}

bool Region::supports(const CVector& k, double tol) const {
  if (k.size() != dim()) throw Error(ErrorCode::shape, "region: vector dimension mismatch");
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (mask_(i) == 0.0 && std::abs(k(i)) > tol) return false;
  }
  return true;
}

Region Region::with_chi(std::vector<double> chi_per_site) const {
  if (static_cast<int>(chi_per_site.size()) != n_lattice_sites_) {
    throw Error(ErrorCode::shape, "region: chi profile length must equal n_sites");
  }
  for (int s : sites_) {
    if (std::abs(chi_per_site[static_cast<std::size_t>(s)] - 1.0) > 1e-14) {
      throw Error(ErrorCode::invalid_geometry, "region: chi must equal 1 on the region");
    }
  }
  for (double c : chi_per_site) {
    if (c < 0.0 || c > 1.0) throw Error(ErrorCode::invalid_geometry, "region: chi must lie in [0,1]");
  }
  Region out = *this;
  out.chi_ = std::move(chi_per_site);
  return out;
}

Region Region::with_smooth_chi(int width) const {
  std::vector<double> chi(static_cast<std::size_t>(n_lattice_sites_), 0.0);
  if (sites_.empty()) return with_chi(chi);
  std::vector<int> distance(static_cast<std::size_t>(n_lattice_sites_), n_lattice_sites_);
  for (int x = 0; x < n_lattice_sites_; ++x) {
    for (int s : sites_) {
      const int d = std::abs(x - s);
      distance[static_cast<std::size_t>(x)] = std::min({distance[static_cast<std::size_t>(x)], d, n_lattice_sites_ - d});
    }
  }
  for (int x = 0; x < n_lattice_sites_; ++x) {
    const int d = distance[static_cast<std::size_t>(x)];
    if (d == 0) {
      chi[static_cast<std::size_t>(x)] = 1.0;
    } else if (d <= width) {
      chi[static_cast<std::size_t>(x)] = 0.5 + 0.5 * std::cos(std::numbers::pi * d / (width + 1));
    }
  }
  return with_chi(chi);
}

RVector Region::chi_diagonal() const {
  if (!chi_) return mask_;
  RVector out(dim());
  for (int c = 0; c < spinor_dim_; ++c) {
    for (int s = 0; s < n_lattice_sites_; ++s) out(c * n_lattice_sites_ + s) = (*chi_)[static_cast<std::size_t>(s)];
  }
  return out;
}

// ---------------------------------------------------------------------------

OneParticleModel::OneParticleModel(SpinorLattice lattice, CMatrix h, ChargeConjugation conj, double mass)
    : lattice_(std::move(lattice)),
      h_(std::move(h)),
      conj_(std::move(conj)),
      mass_(mass),
      m0_(lattice_.min_lapse() * mass),
      eig_(linalg::eigh(h_)) {
  const double scale = std::max(1.0, h_.cwiseAbs().maxCoeff());
  if ((h_ - h_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::consistency, "model: h is not Hermitian");
  }
  if ((conj_.conjugate_operator(h_) + h_).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::consistency, "model: C h C != -h");
  }
}

CMatrix OneParticleModel::positive_eigenvectors(double tol) const {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < eig_.values.size(); ++j) {
    if (eig_.values(j) > tol) cols.push_back(j);
  }
  CMatrix out(dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = eig_.vectors.col(cols[c]);
  return out;
}

RVector OneParticleModel::positive_eigenvalues(double tol) const {
  std::vector<double> vals;
  for (Eigen::Index j = 0; j < eig_.values.size(); ++j) {
    if (eig_.values(j) > tol) vals.push_back(eig_.values(j));
  }
  return Eigen::Map<const RVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

double OneParticleModel::smallest_positive_eigenvalue(double tol) const {
  for (Eigen::Index j = 0; j < eig_.values.size(); ++j) {
    if (eig_.values(j) > tol) return eig_.values(j);
  }
  return 0.0;
}

ModelDiagnostics OneParticleModel::diagnostics() const {
  ModelDiagnostics d;
  const double hnorm = std::max(1e-300, h_.cwiseAbs().maxCoeff());
  d.hermiticity_defect = (h_ - h_.adjoint()).cwiseAbs().maxCoeff() / hnorm;
  d.conjugation_defect = (conj_.conjugate_operator(h_) + h_).cwiseAbs().maxCoeff() / hnorm;
  const RVector& lam = eig_.values;
  const Eigen::Index n = lam.size();
  double sym = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) sym = std::max(sym, std::abs(lam(j) + lam(n - 1 - j)));
  d.spectrum_symmetry_defect = sym;
  d.min_h_squared = lam.array().square().minCoeff();
  d.m0_squared = m0_ * m0_;
  d.lambda_min_positive = smallest_positive_eigenvalue();
  d.lambda_max = lam.cwiseAbs().maxCoeff();
  d.zero_modes = static_cast<int>((lam.array().abs() <= 1e-10).count());
  return d;
}

// ---------------------------------------------------------------------------

OneParticleModel build_model(const SpinorLattice& lattice, double mass) {
  if (lattice.n_sites < 2) throw Error(ErrorCode::invalid_size, "build_model: n_sites must be at least 2");
  if (!lattice.periodic) throw Error(ErrorCode::invalid_geometry, "build_model: only periodic lattices are supported");
  if (lattice.spinor_dim != 2 || lattice.spatial_dim != 1) {
    throw Error(ErrorCode::invalid_geometry, "build_model: only s = 1 with two-component spinors is supported");
  }
  if (static_cast<int>(lattice.lapse.size()) != lattice.n_sites) {
    throw Error(ErrorCode::invalid_geometry, "build_model: lapse must have one value per site");
  }
  for (double v : lattice.lapse) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::invalid_geometry, "build_model: lapse must be positive");
  }
  if (!(lattice.spacing > 0.0)) throw Error(ErrorCode::invalid_geometry, "build_model: spacing must be positive");
  if (!(mass >= 0.0)) throw Error(ErrorCode::domain, "build_model: mass must be non-negative");

  const int n = lattice.n_sites;
  RMatrix diff = RMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    diff(x, (x + 1) % n) += 1.0 / (2.0 * lattice.spacing);
    diff(x, (x + n - 1) % n) -= 1.0 / (2.0 * lattice.spacing);
  }
  const RVector v = Eigen::Map<const RVector>(lattice.lapse.data(), n);
  const RMatrix sym_kinetic = v.asDiagonal() * diff + diff * v.asDiagonal();

  CMatrix h = CMatrix::Zero(2 * n, 2 * n);
  // sigma3 block: -(i/2)(VD + DV) on the upper component, +(i/2)(VD + DV) on the lower.
  h.topLeftCorner(n, n) = -0.5 * I_unit * sym_kinetic.cast<cplx>();
  h.bottomRightCorner(n, n) = 0.5 * I_unit * sym_kinetic.cast<cplx>();
  // sigma1 block: V m couples the two components.
  const CMatrix vm = (mass * v).cast<cplx>().asDiagonal();
  h.topRightCorner(n, n) = vm;
  h.bottomLeftCorner(n, n) = vm;

  RVector theta_diag(2 * n);
  theta_diag.head(n).setOnes();
  theta_diag.tail(n).setConstant(-1.0);
  ChargeConjugation conj(theta_diag.cast<cplx>().asDiagonal().toDenseMatrix());
  return OneParticleModel(lattice, std::move(h), std::move(conj), mass);
}

CMatrix thermal_operator(const OneParticleModel& model, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::domain, "thermal_operator: beta must be positive");
  return linalg::apply_function(model.eig(), [beta](double x) { return std::exp(-beta * x); });
}

CMatrix thermal_positive_part(const OneParticleModel& model, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::domain, "thermal_positive_part: beta must be positive");
  const CMatrix q = model.positive_eigenvectors();
  const RVector w = (-beta * model.positive_eigenvalues().array()).exp();
  return q * w.cast<cplx>().asDiagonal() * q.adjoint();
}

}  // namespace diraclab
