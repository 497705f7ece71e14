#include <doctest.h>

#include <numbers>
#include <random>

#include "diraclab/model.hpp"
#include "oracles.hpp"

using namespace diraclab;

TEST_CASE("singular values agree with the Gram-matrix oracle") {
  std::mt19937_64 rng(3);
  for (auto [r, c] : {std::pair{5, 5}, std::pair{7, 3}, std::pair{3, 8}}) {
    const CMatrix a = oracle::random_matrix(rng, r, c);
    const RVector sv = linalg::singular_values(a);
    const std::vector<double> expected = oracle::singular_values_via_gram(a);
    REQUIRE(sv.size() == std::min(r, c));
    for (Eigen::Index i = 0; i < sv.size(); ++i) CHECK(sv(i) == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-9));
    CHECK(linalg::schatten_norm(a, 2.0) == doctest::Approx(a.norm()).epsilon(1e-12));
    CHECK(linalg::schatten_norm(a, 1.0) == doctest::Approx(sv.sum()).epsilon(1e-12));
  }
  const std::vector<double> s{1.0, 2.0};
  CHECK_THROWS_AS((void)linalg::schatten_norm(s, 0.0), Error);
}

TEST_CASE("psd_sqrt, orthonormal_basis and least squares") {
  std::mt19937_64 rng(5);
  const CMatrix b = oracle::random_matrix(rng, 6, 4);
  const CMatrix a = b * b.adjoint();
  const CMatrix r = linalg::psd_sqrt(a);
  CHECK((r * r - a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(linalg::hermiticity_defect(r) < 1e-12);

  const CMatrix q = linalg::orthonormal_basis(a);
  CHECK(q.cols() == 4);
  CHECK((q.adjoint() * q - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  RMatrix design(4, 2);
  design << 1, 0, 1, 1, 1, 2, 1, 3;
  RVector rhs(4);
  rhs << 1, 3, 5, 7;
  const RVector x = linalg::least_squares(design, rhs);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(2.0));
  CHECK(linalg::rms(rhs - design * x) < 1e-12);
  CHECK_THROWS_AS((void)linalg::least_squares(RMatrix(1, 2), RVector(1)), Error);
}

TEST_CASE("flat model reproduces the closed-form dispersion") {
  for (auto [n, a, m] : {std::tuple{8, 0.5, 1.0}, std::tuple{17, 0.25, 0.3}, std::tuple{64, 0.1, 2.0}}) {
    const OneParticleModel model = build_model(SpinorLattice::flat(n, a), m);
    const std::vector<double> expected = oracle::flat_dispersion(n, a, m);
    const RVector& ev = model.eigenvalues();
    REQUIRE(ev.size() == static_cast<Eigen::Index>(expected.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) CHECK(ev(i) == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-10));
    const ModelDiagnostics d = model.diagnostics();
    CHECK(d.gap_respected());
    CHECK(d.min_h_squared == doctest::Approx(m * m).epsilon(1e-9));
    CHECK(d.lambda_min_positive == doctest::Approx(m).epsilon(1e-9));
  }
}

TEST_CASE("variable lapse keeps h Hermitian and odd under C") {
  SpinorLattice lattice = SpinorLattice::flat(24, 0.3);
  for (int x = 0; x < 24; ++x) lattice.lapse[x] = 1.0 + 0.4 * std::cos(2.0 * std::numbers::pi * x / 24);
  const OneParticleModel model = build_model(lattice, 0.8);
  const ModelDiagnostics d = model.diagnostics();
  CHECK(d.hermiticity_defect < 1e-12);
  CHECK(d.conjugation_defect < 1e-12);
  CHECK(d.spectrum_symmetry_defect < 1e-10);
  CHECK(model.m0() == doctest::Approx(0.6 * 0.8));
}

TEST_CASE("model preconditions") {
  SpinorLattice bad = SpinorLattice::flat(6, 1.0);
  bad.lapse[2] = 0.0;
  try {
    (void)build_model(bad, 1.0);
    FAIL("expected invalid_geometry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_geometry);
  }
  try {
    (void)build_model(SpinorLattice::flat(1, 1.0), 1.0);
    FAIL("expected invalid_size");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_size);
  }
}

TEST_CASE("thermal operator against scaling-and-squaring exponential") {
  const OneParticleModel model = build_model(SpinorLattice::flat(6, 0.5), 1.0);
  for (double beta : {0.1, 0.7, 2.0}) {
    const CMatrix expected = oracle::expm(-beta * model.h());
    CHECK((thermal_operator(model, beta) - expected).cwiseAbs().maxCoeff() < 1e-10 * expected.cwiseAbs().maxCoeff());
  }
  CHECK_THROWS_AS((void)thermal_operator(model, 0.0), Error);
}

TEST_CASE("lattice rescaling relation h(lambda a, m) = h(a, lambda m) / lambda") {
  for (double lambda : {0.5, 2.0, 4.0}) {
    const OneParticleModel rescaled = build_model(SpinorLattice::flat(12, 0.25 * lambda), 1.0);
    const OneParticleModel reference = build_model(SpinorLattice::flat(12, 0.25), lambda);
    CHECK((rescaled.h() - reference.h() / lambda).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("charge conjugation validation") {
  const OneParticleModel model = build_model(SpinorLattice::flat(4, 1.0), 1.0);
  CHECK(model.conj().involution_defect() < 1e-15);
  CHECK(model.conj().antiunitarity_defect() < 1e-15);
  CMatrix theta = model.conj().theta();
  theta(0, 0) *= 2.0;
  CHECK_THROWS_AS(ChargeConjugation{theta}, Error);
  CHECK_NOTHROW((void)ChargeConjugation::unchecked(theta));

  const CMatrix maj = model.conj().majorana_basis(CMatrix::Identity(8, 8));
  CHECK(maj.cols() == 8);
  CHECK((model.conj().apply_columns(maj) - maj).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("regions") {
  const SpinorLattice lattice = SpinorLattice::flat(10, 1.0);
  const Region half = Region::half(lattice);
  CHECK(half.sites().size() == 5);
  CHECK(half.fraction() == doctest::Approx(0.5));
  CHECK(half.complement().sites().size() == 5);
  CHECK(half.dim() == 20);
  CHECK((half.projector() * half.projector() - half.projector()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Region::empty(lattice).is_empty());
  CHECK_THROWS_AS(Region(lattice, {10}), Error);

  CVector k = CVector::Zero(20);
  k(2) = 1.0;
  k(12) = 1.0;
  CHECK(half.supports(k));
  k(7) = 1e-3;
  CHECK_FALSE(half.supports(k));

  const Region smooth = half.with_smooth_chi(2);
  const RVector chi = smooth.chi_diagonal();
  for (int s : half.sites()) CHECK(chi(s) == 1.0);
  CHECK(chi(6) > 0.0);
  CHECK(chi(6) < 1.0);
  CHECK(chi(7) == 0.0);  // three sites from the region on both sides
}
