// Seeded property tests: structural invariants over randomly drawn lattices,
// lapses, masses, regions and inverse temperatures.

#include <doctest.h>

#include <random>

#include "diraclab/fock.hpp"
#include "diraclab/nuclearity.hpp"
#include "diraclab/quasiequiv.hpp"
#include "oracles.hpp"

using namespace diraclab;

namespace {

struct Draw {
  OneParticleModel model;
  Region region;
};

Draw draw(std::mt19937_64& rng, int max_sites) {
  std::uniform_int_distribution<int> sites(3, max_sites);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = sites(rng);
  SpinorLattice lattice = SpinorLattice::flat(n, 0.2 + unit(rng));
  for (double& v : lattice.lapse) v = 0.5 + unit(rng);
  const double mass = 0.2 + 1.5 * unit(rng);
  const int first = std::uniform_int_distribution<int>(0, n - 2)(rng);
  const int last = std::uniform_int_distribution<int>(first + 1, n)(rng);
  return {build_model(lattice, mass), Region::range(lattice, first, last)};
}

}  // namespace

TEST_CASE("property: h is Hermitian, C-odd, with symmetric spectrum") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 25; ++t) {
    const Draw d = draw(rng, 20);
    const ModelDiagnostics diag = d.model.diagnostics();
    CHECK(diag.hermiticity_defect < 1e-12);
    CHECK(diag.conjugation_defect < 1e-12);
    CHECK(diag.spectrum_symmetry_defect < 1e-10);
  }
}

TEST_CASE("property: quasifree states satisfy 0 <= P <= 1 and C P C = 1 - P") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> beta(0.1, 5.0);
  for (int t = 0; t < 20; ++t) {
    const Draw d = draw(rng, 16);
    const int dim = d.model.dim();
    const CMatrix id = CMatrix::Identity(dim, dim);
    const QuasifreeState ground = positive_projector(d.model);
    const QuasifreeState thermal = thermal_state(d.model, beta(rng));
    const QuasifreeState pert = smooth_perturbation(d.model, ground, 2, 1.0, 0.2);
    for (const QuasifreeState* s : {&ground, &thermal, &pert}) {
      const RVector spec = s->spectrum();
      CHECK(spec.minCoeff() > -1e-12);
      CHECK(spec.maxCoeff() < 1.0 + 1e-12);
      CHECK((s->conj().conjugate_operator(s->p()) - (id - s->p())).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("property: singular values of S decrease in beta and obey the norm bound") {
  std::mt19937_64 rng(107);
  for (int t = 0; t < 10; ++t) {
    const Draw d = draw(rng, 16);
    const QuasifreeState ground = positive_projector(d.model);
    RVector previous;
    for (double beta : {0.2, 0.5, 1.0, 2.0}) {
      const LocalizedThermalOperator op = build_s(d.model, ground, d.region, beta);
      CHECK(op.t(0) <= op.norm_bound() * (1.0 + 1e-10));
      if (previous.size() > 0) {
        // Tail singular values sit at roundoff, so monotonicity is only meaningful above it.
        const double floor = 1e-13 * op.norm_bound();
        for (Eigen::Index j = 0; j < op.t.size(); ++j) CHECK(op.t(j) <= previous(j) * (1.0 + 1e-10) + floor);
      }
      // 1 <= det(1 + T) <= exp(||T||_1).
      double det1 = 1.0;
      for (Eigen::Index j = 0; j < op.t.size(); ++j) det1 *= 1.0 + op.t(j);
      CHECK(det1 >= 1.0);
      CHECK(det1 <= std::exp(op.trace_norm()) * (1.0 + 1e-12));
      previous = op.t;
    }
  }
}

TEST_CASE("property: CAR relations in random representations") {
  std::mt19937_64 rng(109);
  for (int t = 0; t < 6; ++t) {
    std::uniform_int_distribution<int> sites(2, 5);
    SpinorLattice lattice = SpinorLattice::flat(sites(rng), 0.7);
    for (double& v : lattice.lapse) v = 0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const OneParticleModel model = build_model(lattice, 0.9);
    const QuasifreeState ground = positive_projector(model);
    const FockRep rep = build_fock(ground);
    const Eigen::Index dim = rep.dim();
    for (int i = 0; i < rep.modes(); ++i) {
      for (int j = 0; j < rep.modes(); ++j) {
        const CMatrix ai = CMatrix(rep.annihilator(i));
        const CMatrix aj = CMatrix(rep.annihilator(j));
        const CMatrix mixed = ai * aj.adjoint() + aj.adjoint() * ai;
        const CMatrix expected = (i == j ? 1.0 : 0.0) * CMatrix::Identity(dim, dim);
        CHECK((mixed - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((ai * aj + aj * ai).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
    const CVector k = oracle::random_vector(rng, model.dim());
    const CMatrix f = CMatrix(field_operator(rep, k));
    const cplx ck = ground.conj().apply(k).dot(k);
    CHECK((2.0 * f * f - ck * CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("property: Powers-Stormer slack is non-negative") {
  std::mt19937_64 rng(113);
  for (int t = 0; t < 40; ++t) {
    const int d = 1 + t % 16;
    const CMatrix x = oracle::random_matrix(rng, d, std::max(1, d / 2));
    const CMatrix y = oracle::random_matrix(rng, d, d);
    CHECK(ps_inequality_test(x * x.adjoint(), y * y.adjoint() * 0.1) >= -1e-10);
  }
}

TEST_CASE("property: factoriality holds for strictly mixed states") {
  std::mt19937_64 rng(127);
  std::uniform_real_distribution<double> beta(0.2, 3.0);
  for (int t = 0; t < 8; ++t) {
    const Draw d = draw(rng, 10);
    const FactorialityReport r = factoriality_check(thermal_state(d.model, beta(rng)), d.region);
    CHECK(r.intersection_dim == 0);
    CHECK(r.double_complement_defect < 1e-10);
    CHECK(r.complement_orthogonality < 1e-10);
    CHECK(r.split_dim == r.full_dim);
  }
}

TEST_CASE("property: rescaling identity for random lattices") {
  std::mt19937_64 rng(131);
  const std::vector<double> grid = geometric_grid(0.3, 3.0, 8);
  for (int t = 0; t < 4; ++t) {
    const Draw d = draw(rng, 12);
    const double lambda = std::uniform_real_distribution<double>(0.3, 3.0)(rng);
    const RescalingReport r = rescaling_check(d.model, d.region, grid, lambda, false);
    CHECK(r.max_singular_value_defect <= 1e-10);
  }
}
