#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's own algorithms.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// exp(A) by scaling and squaring with a truncated Taylor series.
inline CMatrix expm(const CMatrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const CMatrix scaled = a / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(a.rows(), a.cols());
  CMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Signed sum over pair partitions of {0..n-1} of prod two_point(i, j), the
/// sign being that of the permutation (i1 j1 i2 j2 ...).
template <class TwoPoint>
cplx pair_partition_sum(std::vector<int> indices, const TwoPoint& two_point) {
  if (indices.empty()) return 1.0;
  if (indices.size() % 2 == 1) return 0.0;
  const int first = indices.front();
  cplx total = 0.0;
  for (std::size_t partner = 1; partner < indices.size(); ++partner) {
    std::vector<int> rest;
    for (std::size_t k = 1; k < indices.size(); ++k) {
      if (k != partner) rest.push_back(indices[k]);
    }
    // Moving the partner next to the first element passes partner-1 others.
    const double sign = (partner - 1) % 2 == 0 ? 1.0 : -1.0;
    total += sign * two_point(first, indices[partner]) * pair_partition_sum(rest, two_point);
  }
  return total;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// a_j on the 2^M tensor space as I x ... x I x sigma_minus x Z x ... x Z,
/// where mode 0 is the least significant factor and Z = diag(1, -1).
inline CMatrix tensor_annihilator(int modes, int j) {
  CMatrix sigma_minus = CMatrix::Zero(2, 2);
  sigma_minus(0, 1) = 1.0;
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix out = CMatrix::Identity(1, 1);
  for (int mode = modes - 1; mode >= 0; --mode) {
    const CMatrix& factor = mode > j ? id : (mode == j ? sigma_minus : z);
    out = kron(out, factor);
  }
  return out;
}

/// det(1 + X) from the power sums tr(X^k) through Newton's identities.
inline cplx det_one_plus_newton(const CMatrix& x) {
  const Eigen::Index n = x.rows();
  std::vector<cplx> power(static_cast<std::size_t>(n + 1));
  CMatrix xp = CMatrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    xp = xp * x;
    power[static_cast<std::size_t>(k)] = xp.trace();
  }
  std::vector<cplx> e(static_cast<std::size_t>(n + 1));
  e[0] = 1.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    cplx s = 0.0;
    for (Eigen::Index i = 1; i <= k; ++i) {
      const double sign = i % 2 == 1 ? 1.0 : -1.0;
      s += sign * e[static_cast<std::size_t>(k - i)] * power[static_cast<std::size_t>(i)];
    }
    e[static_cast<std::size_t>(k)] = s / static_cast<double>(k);
  }
  cplx total = 0.0;
  for (const cplx& v : e) total += v;
  return total;
}

/// Sum of k x k principal minors over all k by explicit subset enumeration.
inline cplx principal_minor_sum_bruteforce(const CMatrix& x) {
  const int n = static_cast<int>(x.rows());
  cplx total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    if (idx.empty()) {
      total += 1.0;
      continue;
    }
    CMatrix sub(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = x(idx[r], idx[c]);
    }
    total += sub.determinant();
  }
  return total;
}

/// Flat lattice Dirac dispersion: +-sqrt(sin^2(2 pi j / n) / a^2 + m^2), sorted.
inline std::vector<double> flat_dispersion(int n, double spacing, double mass) {
  std::vector<double> out;
  for (int j = 0; j < n; ++j) {
    const double s = std::sin(2.0 * std::numbers::pi * j / n) / spacing;
    const double e = std::sqrt(s * s + mass * mass);
    out.push_back(e);
    out.push_back(-e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Singular values as square roots of the eigenvalues of A^dagger A, descending.
inline std::vector<double> singular_values_via_gram(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.adjoint() * a);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  std::sort(out.rbegin(), out.rend());
  return out;
}

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {normal(rng), normal(rng)};
  }
  return m;
}

inline CVector random_vector(std::mt19937_64& rng, Eigen::Index dim) {
  const CMatrix m = random_matrix(rng, dim, 1);
  return m.col(0) / m.norm();
}

}  // namespace oracle
