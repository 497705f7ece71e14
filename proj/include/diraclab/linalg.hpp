#pragma once

#include <functional>
#include <span>
#include <vector>

#include "diraclab/types.hpp"

namespace diraclab::linalg {

/// Spectral decomposition of a Hermitian matrix; eigenvalues ascending.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};

HermitianEigen eigh(const CMatrix& a);

/// f(A) for Hermitian A, evaluated in the eigenbasis.
CMatrix apply_function(const HermitianEigen& eig, const std::function<double(double)>& f);

/// Largest entry of |A - A^dagger|, relative to max(1, ||A||_max).
double hermiticity_defect(const CMatrix& a);

/// Square root of a positive semidefinite matrix. Negative eigenvalues from
/// round-off are clipped to zero.
CMatrix psd_sqrt(const CMatrix& a);

/// Singular values in descending order.
RVector singular_values(const CMatrix& a);

/// (sum_j s_j^p)^(1/p) over the given singular values. Throws for p <= 0.
double schatten_norm(std::span<const double> singular_values, double p);
double schatten_norm(const CMatrix& a, double p);

/// Number of singular values above rel_tol * s_max (and above abs_floor).
int numerical_rank(const RVector& singular_values, double rel_tol = 1e-10, double abs_floor = 1e-14);

/// Orthonormal basis of the column span, via SVD; columns with singular value
/// below rel_tol * s_max are dropped.
CMatrix orthonormal_basis(const CMatrix& columns, double rel_tol = 1e-10);

/// Least-squares solution of design * x = rhs (column-pivoted QR).
RVector least_squares(const RMatrix& design, const RVector& rhs);

/// Root-mean-square of a residual vector; 0 for an empty one.
double rms(const RVector& residuals);

}  // namespace diraclab::linalg
