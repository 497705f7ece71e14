#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace diraclab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Operators on the antisymmetric Fock space, stored column-major sparse.
using FockMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr cplx I_unit{0.0, 1.0};

enum class ErrorCode {
  invalid_geometry,
  invalid_size,
  zero_mode,
  domain,
  shape,
  too_large,
  mode_truncation,
  consistency,
  wrong_state,
  support,
  fit,
  perturbation_too_large,
  rescaling_model,
  config,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace diraclab
