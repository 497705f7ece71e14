#include <doctest.h>

#include <numbers>
#include <random>

#include "diraclab/quasiequiv.hpp"
#include "oracles.hpp"

using namespace diraclab;

TEST_CASE("Powers-Stormer: equality witness and random positive pairs") {
  CMatrix a = CMatrix::Zero(2, 2);
  CMatrix b = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  CHECK(std::abs(ps_inequality_test(a, b)) < 1e-12);

  std::mt19937_64 rng(61);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + t % 12;
    const CMatrix x = oracle::random_matrix(rng, d, d);
    const CMatrix y = oracle::random_matrix(rng, d, d);
    CHECK(ps_inequality_test(x * x.adjoint(), y * y.adjoint()) >= -1e-10);
  }
  CHECK_THROWS_AS((void)ps_inequality_test(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), Error);
  CMatrix skew = CMatrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS((void)ps_inequality_test(skew, CMatrix::Identity(2, 2)), Error);
}

TEST_CASE("Powers-Stormer quantities for states") {
  const OneParticleModel model = build_model(SpinorLattice::flat(12, 0.5), 1.0);
  const QuasifreeState ground = positive_projector(model);
  const Region region = Region::half(model.lattice());
  const QuasiequivalenceReport self = powers_stormer(ground, ground, region);
  CHECK(self.hs_distance < 1e-12);
  CHECK(self.trace_distance < 1e-12);

  const QuasifreeState pert = smooth_perturbation(model, ground, 4, 1.0, 0.3);
  const QuasiequivalenceReport r = powers_stormer(ground, pert, region);
  CHECK(r.trace_distance > 0.0);
  CHECK(r.ps_inequality_slack >= -1e-10);
  CHECK(r.ps_inequality_slack == doctest::Approx(r.trace_distance - r.hs_distance * r.hs_distance));
}

TEST_CASE("refinement series at fixed physical length") {
  RefinementSweep sweep;
  sweep.site_counts = {8, 16, 32};
  const std::vector<RefinementPoint> series = refinement_series(sweep);
  REQUIRE(series.size() == 3);
  for (const RefinementPoint& pt : series) {
    CHECK(pt.region_fraction == doctest::Approx(0.5));
    CHECK(pt.slack >= -1e-10);
    CHECK(pt.trace_distance > 0.0);
  }
}

TEST_CASE("principal angles of known subspaces") {
  RMatrix e1 = RMatrix::Zero(3, 1);
  e1(0, 0) = 1.0;
  RMatrix diag = RMatrix::Zero(3, 1);
  diag(0, 0) = std::sqrt(0.5);
  diag(1, 0) = std::sqrt(0.5);
  const std::vector<double> angles = principal_angles(e1, diag);
  REQUIRE(angles.size() == 1);
  CHECK(angles[0] == doctest::Approx(std::numbers::pi / 4));
  CHECK(principal_angles(e1, e1)[0] < 1e-12);

  RMatrix plane = RMatrix::Zero(3, 2);
  plane(1, 0) = 1.0;
  plane(2, 1) = 1.0;
  CHECK(principal_angles(e1, plane)[0] == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("factoriality for strictly mixed states") {
  SpinorLattice lattice = SpinorLattice::flat(8, 0.5);
  for (int x = 0; x < 8; ++x) lattice.lapse[x] = 1.0 + 0.2 * std::sin(x);
  const OneParticleModel model = build_model(lattice, 1.0);
  const QuasifreeState thermal = thermal_state(model, 0.9);
  const Region region = Region::range(lattice, 1, 4);
  const FactorialityReport r = factoriality_check(thermal, region);
  CHECK(r.hspace_dim == 16);
  CHECK(r.local_dim == 6);
  CHECK(r.complement_dim == 2 * r.hspace_dim - r.local_dim);
  CHECK(r.intersection_dim == 0);
  CHECK(r.offending_vectors.empty());
  CHECK(r.double_complement_defect < 1e-10);
  CHECK(r.complement_orthogonality < 1e-10);
  CHECK(r.split_dim == r.full_dim);
  for (double angle : r.principal_angles) CHECK(angle > 1e-8);
}

TEST_CASE("majorana basis of a region") {
  const OneParticleModel model = build_model(SpinorLattice::flat(6, 1.0), 1.0);
  const Region region = Region::range(model.lattice(), 0, 2);
  const CMatrix maj = majorana_basis(region, model.conj());
  CHECK(maj.cols() == 4);
  CHECK((model.conj().apply_columns(maj) - maj).cwiseAbs().maxCoeff() < 1e-13);
  for (Eigen::Index j = 0; j < maj.cols(); ++j) CHECK(region.supports(maj.col(j)));
  CHECK((maj.adjoint() * maj).real().isIdentity(1e-12));
}
