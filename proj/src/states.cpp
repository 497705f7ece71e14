#include "diraclab/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

namespace diraclab {

QuasifreeState::QuasifreeState(CMatrix p, ChargeConjugation conj, bool gapped)
    : p_(std::move(p)), conj_(std::move(conj)), gapped_(gapped) {
  if (p_.rows() != p_.cols() || p_.rows() != conj_.dim()) {
    throw Error(ErrorCode::shape, "quasifree state: P and C dimensions differ");
  }
  if ((p_ - p_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw Error(ErrorCode::consistency, "quasifree state: P not Hermitian");
  const linalg::HermitianEigen eig = linalg::eigh(p_);
  if (eig.values.minCoeff() < -1e-12 || eig.values.maxCoeff() > 1.0 + 1e-12) {
    throw Error(ErrorCode::consistency, "quasifree state: spectrum of P outside [0,1]");
  }
  const CMatrix dual = conj_.conjugate_operator(p_) + p_ - CMatrix::Identity(dim(), dim());
  if (dual.cwiseAbs().maxCoeff() > 1e-12) throw Error(ErrorCode::consistency, "quasifree state: C P C != 1 - P");
  // Eigenvalues below 1e-12 are round-off for projectors; keeping their square
  // roots (~1e-6) would add spurious modes to range(P^{1/2}).
  sqrt_p_ = linalg::apply_function(eig, [](double x) { return x > 1e-12 ? std::sqrt(x) : 0.0; });
}

bool QuasifreeState::is_pure(double tol) const { return (p_ * p_ - p_).cwiseAbs().maxCoeff() <= tol; }

RVector QuasifreeState::spectrum() const { return linalg::eigh(p_).values; }

// ---------------------------------------------------------------------------

QuasifreeState positive_projector(const OneParticleModel& model, ZeroModePolicy policy) {
  constexpr double zero_tol = 1e-10;
  const RVector& lam = model.eigenvalues();
  const CMatrix& vecs = model.eigenvectors();
  std::vector<Eigen::Index> zero_cols;
  CMatrix p = CMatrix::Zero(model.dim(), model.dim());
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    if (lam(j) > zero_tol) {
      p.noalias() += vecs.col(j) * vecs.col(j).adjoint();
    } else if (std::abs(lam(j)) <= zero_tol) {
      zero_cols.push_back(j);
    }
  }
  if (zero_cols.empty()) return QuasifreeState(0.5 * (p + p.adjoint()), model.conj(), true);
  if (policy == ZeroModePolicy::reject) {
    throw Error(ErrorCode::zero_mode, "positive_projector: h has " + std::to_string(zero_cols.size()) +
                                          " eigenvalue(s) within 1e-10 of zero");
  }
  if (zero_cols.size() % 2 != 0) {
    throw Error(ErrorCode::zero_mode, "positive_projector: odd number of zero modes cannot be split C-symmetrically");
  }
  CMatrix zero_space(model.dim(), static_cast<Eigen::Index>(zero_cols.size()));
  for (std::size_t c = 0; c < zero_cols.size(); ++c) zero_space.col(static_cast<Eigen::Index>(c)) = vecs.col(zero_cols[c]);
  const CMatrix majorana = model.conj().majorana_basis(zero_space);
  for (Eigen::Index j = 0; j + 1 < majorana.cols(); j += 2) {
    const CVector f = (majorana.col(j) + I_unit * majorana.col(j + 1)) / std::sqrt(2.0);
    p.noalias() += f * f.adjoint();
  }
  return QuasifreeState(0.5 * (p + p.adjoint()), model.conj(), false);
}

QuasifreeState thermal_state(const OneParticleModel& model, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::domain, "thermal_state: beta must be positive");
  const CMatrix p = linalg::apply_function(model.eig(), [beta](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-beta * x));
    const double e = std::exp(beta * x);
    return e / (1.0 + e);
  });
  return QuasifreeState(0.5 * (p + p.adjoint()), model.conj(), true);
}

// ---------------------------------------------------------------------------

TestVectorSet::TestVectorSet(std::vector<CVector> vectors) : vectors_(std::move(vectors)) {
  supports_.resize(vectors_.size());
}

void TestVectorSet::add(CVector k, std::optional<Region> support) {
  if (support && !support->supports(k)) throw Error(ErrorCode::support, "test vector does not vanish outside its region");
  vectors_.push_back(std::move(k));
  supports_.push_back(std::move(support));
}

cplx two_point(const QuasifreeState& state, const CVector& k1, const CVector& k2) {
  if (k1.size() != state.dim() || k2.size() != state.dim()) throw Error(ErrorCode::shape, "two_point: dimension mismatch");
  return state.conj().apply(k1).dot(state.p() * k2);
}

cplx pfaffian(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::shape, "pfaffian: matrix is not square");
  if (n % 2 != 0) return 0.0;
  if (n == 0) return 1.0;
  if (n > 20) throw Error(ErrorCode::shape, "pfaffian: at most 20 indices supported");

  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<cplx> memo(full + 1);
  std::vector<char> known(full + 1, 0);
  memo[0] = 1.0;
  known[0] = 1;

  // pf(S) = sum_{j in S, j != i} (-1)^{pos(j)-1} A_ij pf(S \ {i, j}), i = min S.
  std::function<cplx(std::size_t)> rec = [&](std::size_t mask) -> cplx {
    if (known[mask]) return memo[mask];
    const int i = std::countr_zero(mask);
    const std::size_t rest = mask & ~(std::size_t{1} << i);
    cplx acc = 0.0;
    int position = 0;
    for (std::size_t m = rest; m != 0; m &= m - 1) {
      const int j = std::countr_zero(m);
      const cplx aij = a(i, j);
      if (aij != 0.0) {
        const cplx sub = rec(rest & ~(std::size_t{1} << j));
        acc += (position % 2 == 0 ? 1.0 : -1.0) * aij * sub;
      }
      ++position;
    }
    memo[mask] = acc;
    known[mask] = 1;
    return acc;
  };
  return rec(full);
}

cplx n_point(const QuasifreeState& state, std::span<const CVector> ks) {
  const std::size_t n = ks.size();
  for (const CVector& k : ks) {
    if (k.size() != state.dim()) throw Error(ErrorCode::shape, "n_point: dimension mismatch");
  }
  if (n % 2 != 0) return 0.0;
  CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx w = two_point(state, ks[i], ks[j]);
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -w;
    }
  }
  return pfaffian(a);
}

cplx n_point(const QuasifreeState& state, const TestVectorSet& ks) { return n_point(state, ks.vectors()); }

Restriction restrict_to(const QuasifreeState& state, const Region& region) {
  if (region.dim() != state.dim()) throw Error(ErrorCode::shape, "restrict_to: region and state dimensions differ");
  const RVector& mask = region.mask();
  CMatrix compressed = mask.cast<cplx>().asDiagonal() * state.p() * mask.cast<cplx>().asDiagonal();
  return {std::move(compressed), region.projector()};
}

QuasifreeState smooth_perturbation(const OneParticleModel& model, const QuasifreeState& state, int rank, double decay,
                                   double amplitude) {
  if (rank < 1) throw Error(ErrorCode::domain, "smooth_perturbation: rank must be at least 1");
  if (!(decay > 0.0)) throw Error(ErrorCode::domain, "smooth_perturbation: decay must be positive");
  if (state.dim() != model.dim()) throw Error(ErrorCode::shape, "smooth_perturbation: state and model dimensions differ");
  if (amplitude == 0.0) return state;

  const CMatrix pos = model.positive_eigenvectors();
  const RVector lam = model.positive_eigenvalues();
  const int pairs = std::min<int>((rank + 1) / 2, static_cast<int>(pos.cols()));
  if (pairs == 0) throw Error(ErrorCode::domain, "smooth_perturbation: model has no positive-energy modes");

  const ChargeConjugation& conj = model.conj();
  CMatrix delta0 = CMatrix::Zero(model.dim(), model.dim());
  for (int i = 0; i < pairs; ++i) {
    const double w = amplitude * std::exp(-decay * std::abs(lam(i)));
    const CVector e = pos.col(i);
    delta0.noalias() -= w * e * e.adjoint();
    if (i + 1 < pairs) {
      const CVector partner = conj.apply(pos.col(i + 1));
      const CMatrix coupling = 0.5 * w * e * partner.adjoint();
      delta0 += coupling + coupling.adjoint();
    }
  }
  // Anti-symmetrize under C so that C P' C = 1 - P' survives.
  CMatrix delta = 0.5 * (delta0 - conj.conjugate_operator(delta0));
  delta = 0.5 * (delta + delta.adjoint());

  const CMatrix shifted = state.p() + delta;
  CMatrix clipped = linalg::apply_function(linalg::eigh(shifted), [](double x) { return std::clamp(x, 0.0, 1.0); });
  clipped = 0.5 * (clipped + clipped.adjoint());

  const double delta_norm = delta.norm();
  const double clip_change = (clipped - shifted).norm();
  if (clip_change > 0.5 * delta_norm) {
    throw Error(ErrorCode::perturbation_too_large, "smooth_perturbation: clipping removed more than half of the perturbation");
  }
  return QuasifreeState(std::move(clipped), state.conj(), state.gapped());
}

}  // namespace diraclab
