#include <doctest.h>

#include <random>
#include <vector>

#include "diraclab/fock_kernels.hpp"
#include "oracles.hpp"

using namespace diraclab;

namespace {

std::vector<cplx> coefficients(std::mt19937_64& rng, int n) {
  const CVector v = oracle::random_matrix(rng, n, 1).col(0);
  return {v.data(), v.data() + v.size()};
}

double max_abs(const FockMatrix& m) {
  double out = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (FockMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

}  // namespace

TEST_CASE("Jordan-Wigner sign and parity") {
  CHECK(kernels::jordan_wigner_sign(0b000, 2) == 1.0);
  CHECK(kernels::jordan_wigner_sign(0b001, 2) == -1.0);
  CHECK(kernels::jordan_wigner_sign(0b011, 2) == 1.0);
  CHECK(kernels::jordan_wigner_sign(0b111, 0) == 1.0);
  CHECK(kernels::parity(0b101) == 1.0);
  CHECK(kernels::parity(0b100) == -1.0);
}

TEST_CASE("field matrix matches the tensor-product construction") {
  std::mt19937_64 rng(7);
  for (int modes : {1, 2, 3, 5}) {
    const std::vector<cplx> create = coefficients(rng, modes);
    const std::vector<cplx> annihilate = coefficients(rng, modes);
    oracle::CMatrix expected = oracle::CMatrix::Zero(1 << modes, 1 << modes);
    for (int j = 0; j < modes; ++j) {
      const oracle::CMatrix a = oracle::tensor_annihilator(modes, j);
      expected += create[j] * a.adjoint() + annihilate[j] * a;
    }
    const CMatrix serial = CMatrix(kernels::serial::field_matrix(modes, create, annihilate));
    const CMatrix omp = CMatrix(kernels::omp::field_matrix(modes, create, annihilate));
    CHECK((serial - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((omp - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("serial and parallel apply_field agree") {
  std::mt19937_64 rng(11);
  for (int modes : {1, 4, 9, 13}) {
    const std::vector<cplx> create = coefficients(rng, modes);
    const std::vector<cplx> annihilate = coefficients(rng, modes);
    const std::vector<cplx> in = coefficients(rng, 1 << modes);
    std::vector<cplx> a(in.size());
    std::vector<cplx> b(in.size());
    kernels::serial::apply_field(modes, create, annihilate, in, a);
    kernels::omp::apply_field(modes, create, annihilate, in, b);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    CHECK(diff < 1e-12);

    // Same action as the matrix.
    const FockMatrix m = kernels::serial::field_matrix(modes, create, annihilate);
    const CVector v = m * Eigen::Map<const CVector>(in.data(), static_cast<Eigen::Index>(in.size()));
    double mdiff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mdiff = std::max(mdiff, std::abs(a[i] - v(static_cast<Eigen::Index>(i))));
    CHECK(mdiff < 1e-12);
  }
}

TEST_CASE("apply_field rejects mismatched buffers") {
  std::vector<cplx> c(3);
  std::vector<cplx> in(8);
  std::vector<cplx> out(4);
  CHECK_THROWS_AS(kernels::serial::apply_field(3, c, c, in, out), Error);
  CHECK_THROWS_AS(kernels::omp::apply_field(3, c, c, in, out), Error);
}

TEST_CASE("second quantization: serial, parallel and tensor oracle agree") {
  std::mt19937_64 rng(13);
  for (int modes : {1, 3, 6}) {
    const CMatrix h = oracle::random_matrix(rng, modes, modes);
    oracle::CMatrix expected = oracle::CMatrix::Zero(1 << modes, 1 << modes);
    for (int j = 0; j < modes; ++j) {
      for (int l = 0; l < modes; ++l) {
        expected += h(j, l) * oracle::tensor_annihilator(modes, j).adjoint() * oracle::tensor_annihilator(modes, l);
      }
    }
    const FockMatrix s = kernels::serial::second_quantize(modes, h);
    const FockMatrix p = kernels::omp::second_quantize(modes, h);
    CHECK((CMatrix(s) - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_abs(s - p) < 1e-12);
  }
}

TEST_CASE("principal minor sum against Newton identities and brute force") {
  std::mt19937_64 rng(17);
  for (int n : {0, 1, 2, 5, 8, 10}) {
    const CMatrix x = oracle::random_matrix(rng, n, n) * 0.5;
    const cplx newton = n == 0 ? cplx{1.0} : oracle::det_one_plus_newton(x);
    const cplx brute = oracle::principal_minor_sum_bruteforce(x);
    const cplx serial = kernels::serial::principal_minor_sum(x);
    const cplx omp = kernels::omp::principal_minor_sum(x);
    const double scale = std::max(1.0, std::abs(brute));
    CHECK(std::abs(serial - brute) < 1e-10 * scale);
    CHECK(std::abs(omp - brute) < 1e-10 * scale);
    CHECK(std::abs(newton - brute) < 1e-9 * scale);
  }
}

TEST_CASE("parallel principal minor sum is reproducible") {
  std::mt19937_64 rng(19);
  const CMatrix x = oracle::random_matrix(rng, 12, 12) * 0.3;
  const cplx first = kernels::omp::principal_minor_sum(x);
  for (int i = 0; i < 3; ++i) CHECK(kernels::omp::principal_minor_sum(x) == first);
}
