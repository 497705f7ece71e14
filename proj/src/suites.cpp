#include "diraclab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "diraclab/nuclearity.hpp"
#include "diraclab/quasiequiv.hpp"
#include "diraclab/states.hpp"

namespace diraclab::suites {
namespace {

double max_abs(const FockMatrix& m) {
  double out = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (FockMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

FockMatrix identity_like(const FockRep& rep) {
  FockMatrix id(rep.dim(), rep.dim());
  id.setIdentity();
  return id;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

cplx random_complex(Rng& rng) {
  std::normal_distribution<double> normal;
  return {normal(rng), normal(rng)};
}

SuiteResult finish(SuiteResult r) {
  r.passed = r.worst <= r.tolerance;
  return r;
}

}  // namespace

CVector random_vector(Rng& rng, int dim) {
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = random_complex(rng);
  return v / v.norm();
}

CVector random_vector(Rng& rng, const Region& region) {
  CVector v = CVector::Zero(region.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (region.mask()(i) != 0.0) v(i) = random_complex(rng);
  }
  const double n = v.norm();
  return n > 0.0 ? CVector(v / n) : v;
}

// ---------------------------------------------------------------------------

SuiteResult car_suite(const CarParams& params, Rng& rng) {
  const SpinorLattice lattice = SpinorLattice::flat(params.n_sites, params.spacing);
  const OneParticleModel model = build_model(lattice, params.mass);
  FockRep rep = build_fock(positive_projector(model), 14, std::nullopt, params.backend);
  if (params.corrupt_theta) {
    CMatrix theta = model.conj().theta();
    theta(0, 0) = -theta(0, 0);
    rep = rep.with_conjugation(ChargeConjugation::unchecked(theta));
  }
  const FockMatrix id = identity_like(rep);

  double mixed = 0.0;
  double pure = 0.0;
  long cases = 0;
  for (int i = 0; i < rep.modes(); ++i) {
    for (int j = 0; j < rep.modes(); ++j) {
      const FockMatrix& ai = rep.annihilator(i);
      const FockMatrix& aj = rep.annihilator(j);
      const FockMatrix ajd = rep.creator(j);
      FockMatrix anti = ai * ajd + ajd * ai;
      if (i == j) anti -= id;
      mixed = std::max(mixed, max_abs(anti));
      pure = std::max(pure, max_abs(FockMatrix(ai * aj + aj * ai)));
      cases += 2;
    }
  }

  double fields = 0.0;
  for (int r = 0; r < params.field_pairs; ++r) {
    const CVector k1 = random_vector(rng, model.dim());
    const CVector k2 = random_vector(rng, model.dim());
    const FockMatrix p1 = field_operator(rep, k1);
    const FockMatrix p2 = field_operator(rep, k2);
    const cplx expected = rep.conj().apply(k1).dot(k2);
    FockMatrix anti = p1 * p2 + p2 * p1;
    anti -= expected * id;
    fields = std::max(fields, max_abs(anti));
    ++cases;
  }

  // Grading and twisted locality on disjoint supports.
  const Region left = Region::half(lattice);
  const Region right = left.complement();
  FockMatrix u(rep.dim(), rep.dim());
  FockMatrix v(rep.dim(), rep.dim());
  FockMatrix v_adj(rep.dim(), rep.dim());
  {
    const CVector vd = rep.twist_diagonal();
    std::vector<Eigen::Triplet<cplx>> tu;
    std::vector<Eigen::Triplet<cplx>> tv;
    std::vector<Eigen::Triplet<cplx>> tva;
    for (Eigen::Index b = 0; b < rep.dim(); ++b) {
      tu.emplace_back(b, b, rep.grading()(b));
      tv.emplace_back(b, b, vd(b));
      tva.emplace_back(b, b, std::conj(vd(b)));
    }
    u.setFromTriplets(tu.begin(), tu.end());
    v.setFromTriplets(tv.begin(), tv.end());
    v_adj.setFromTriplets(tva.begin(), tva.end());
  }
  double graded = 0.0;
  for (int r = 0; r < 20; ++r) {
    const FockMatrix p1 = field_operator(rep, random_vector(rng, left));
    const FockMatrix p2 = field_operator(rep, random_vector(rng, right));
    graded = std::max(graded, max_abs(FockMatrix(u * p1 * u + p1)));
    const FockMatrix t1 = v * p1 * v_adj;
    graded = std::max(graded, max_abs(FockMatrix(t1 * p2 - p2 * t1)));
    cases += 2;
  }

  SuiteResult out;
  out.name = "car";
  out.metric = "max anticommutator defect";
  out.cases = cases;
  out.worst = std::max({mixed, pure, fields, graded});
  out.tolerance = params.tol_fields;
  out.passed = mixed <= params.tol_modes && pure <= params.tol_modes && fields <= params.tol_fields &&
               graded <= params.tol_fields;
  std::ostringstream d;
  d << "M=" << rep.modes() << " {a_i,a_j^*}=delta_ij:" << sci(mixed) << " {a_i,a_j}=0:" << sci(pure)
    << " {psi(k1),psi(k2)}=(Ck1|k2):" << sci(fields) << " grading/twist:" << sci(graded);
  if (mixed > params.tol_modes) d << " FAILED {a_i,a_j^*} = delta_ij";
  if (pure > params.tol_modes) d << " FAILED {a_i,a_j} = 0";
  if (fields > params.tol_fields) d << " FAILED {psi(k1),psi(k2)} = (Ck1|k2) 1";
  if (graded > params.tol_fields) d << " FAILED U psi U* = -psi / twisted locality";
  out.detail = d.str();
  return out;
}

SuiteResult wick_suite(const WickParams& params, Rng& rng) {
  const OneParticleModel ground_model = build_model(SpinorLattice::flat(4, 0.5), 1.0);
  const OneParticleModel small_model = build_model(SpinorLattice::flat(2, 1.0), 1.0);
  const std::vector<QuasifreeState> states{positive_projector(ground_model), thermal_state(small_model, 0.7)};

  SuiteResult out;
  out.name = "wick";
  out.metric = "max |n_point - <Omega|psi...psi|Omega>|";
  out.tolerance = params.tol;
  int modes = 0;
  for (const QuasifreeState& state : states) {
    const FockRep rep = build_fock(state, 5);
    modes = std::max(modes, rep.modes());
    for (int order : params.orders) {
      for (int t = 0; t < params.tuples; ++t) {
        std::vector<CVector> ks;
        for (int i = 0; i < order; ++i) ks.push_back(random_vector(rng, state.dim()));
        const cplx combinatorial = n_point(state, ks);
        CVector v = rep.vacuum();
        for (auto it = ks.rbegin(); it != ks.rend(); ++it) v = field_operator(rep, *it) * v;
        out.worst = std::max(out.worst, std::abs(combinatorial - v(0)));
        ++out.cases;
      }
    }
  }
  out.detail = "pure and thermal states, M<=" + std::to_string(modes) + ", worst " + sci(out.worst);
  return finish(out);
}

SuiteResult coefficient_suite(const CoefficientParams& params, Rng& rng) {
  const SpinorLattice lattice = SpinorLattice::flat(params.n_sites, params.spacing);
  const OneParticleModel model = build_model(lattice, params.mass);
  const QuasifreeState ground = positive_projector(model);
  const Region region = Region::half(lattice);

  SuiteResult out;
  out.name = "coeff";
  out.metric = "max (lhs - rhs)";
  out.tolerance = params.tol;
  out.worst = -std::numeric_limits<double>::infinity();
  double tightest_ratio = 0.0;
  for (double beta : params.betas) {
    const LocalizedThermalOperator op = build_s(model, ground, region, beta);
    const CoefficientChecker checker(model, ground, op, params.k_max);
    for (int w = 0; w < params.words; ++w) {
      const int length = uniform_int(rng, 1, params.max_length);
      FieldWord word{random_complex(rng), {}};
      for (int i = 0; i < length; ++i) word.fields.push_back(random_vector(rng, region));
      const AlgebraElement a(checker.rep(), {word}, region);
      const CoefficientReport r = checker.check(a);
      out.worst = std::max(out.worst, r.worst_margin);
      out.cases += r.subsets_checked;
      if (r.operator_norm > 0.0) tightest_ratio = std::max(tightest_ratio, r.max_lhs / r.operator_norm);
    }
  }
  out.detail = "subsets with k<=" + std::to_string(params.k_max) + ", worst margin " + sci(out.worst) +
               ", max |<Phi|Theta(A)>|/||A|| " + sci(tightest_ratio);
  return finish(out);
}

SuiteResult determinant_suite(const DeterminantParams& params, Rng& rng) {
  SuiteResult out;
  out.name = "det";
  out.metric = "max relative |prod(1+t^p) - sum of principal minors|";
  out.tolerance = params.tol;
  bool envelope_ok = true;
  for (int i = 0; i < params.instances; ++i) {
    const int n = uniform_int(rng, 2, params.max_dim);
    const SpinorLattice lattice = SpinorLattice::flat(n, uniform(rng, 0.3, 1.0));
    const OneParticleModel model = build_model(lattice, uniform(rng, 0.3, 2.0));
    const int first = uniform_int(rng, 0, n - 1);
    const Region region = Region::range(lattice, first, uniform_int(rng, first + 1, n));
    const LocalizedThermalOperator op = build_s(model, positive_projector(model), region, uniform(rng, 0.1, 2.0));
    for (double p : params.p_list) {
      const DetBound d = det_bound(op, p);
      const double minor = d.minor_form.value_or(std::numeric_limits<double>::quiet_NaN());
      const double rel = std::abs(std::pow(d.product_form, p) - std::pow(minor, p)) / std::pow(d.product_form, p);
      out.worst = std::max(out.worst, std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel);
      ++out.cases;
    }
    if (det_bound(op, 1.0).product_form > std::exp(op.trace_norm()) * (1.0 + 1e-12)) envelope_ok = false;
  }
  out = finish(out);
  out.passed = out.passed && envelope_ok;
  out.detail = std::string("det(1+T) <= exp(||T||_1): ") + (envelope_ok ? "held" : "FAILED");
  return out;
}

SuiteResult powers_stormer_suite(const PowersStormerParams& params, Rng& rng) {
  SuiteResult out;
  out.name = "ps";
  out.metric = "max(-slack)";
  out.tolerance = params.tol;
  out.worst = -std::numeric_limits<double>::infinity();
  auto random_psd = [&](int d) {
    CMatrix g(d, uniform_int(rng, 1, d));
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = random_complex(rng);
    CMatrix a = g * g.adjoint();
    return CMatrix(a / linalg::eigh(a).values.maxCoeff() * uniform(rng, 0.1, 1.0));
  };
  for (int t = 0; t < params.trials; ++t) {
    const int d = uniform_int(rng, 1, params.max_dim);
    const CMatrix a = random_psd(d);
    const CMatrix b = random_psd(d);
    out.worst = std::max(out.worst, -ps_inequality_test(0.5 * (a + a.adjoint()), 0.5 * (b + b.adjoint())));
    ++out.cases;
  }
  CMatrix a = CMatrix::Zero(2, 2);
  CMatrix b = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  const double witness = ps_inequality_test(a, b);
  ++out.cases;
  out = finish(out);
  out.passed = out.passed && std::abs(witness) <= 1e-12;
  out.detail = "equality witness slack " + sci(witness);
  return out;
}

SuiteResult factoriality_suite(const FactorParams& params, Rng& rng) {
  SuiteResult out;
  out.name = "factor";
  out.metric = "max intersection dimension";
  out.tolerance = 0.0;
  double min_angle = std::numeric_limits<double>::infinity();
  double duality = 0.0;
  double orthogonality = 0.0;
  bool split = true;
  for (int i = 0; i < params.instances; ++i) {
    const int n = uniform_int(rng, 2, params.max_sites);
    SpinorLattice lattice = SpinorLattice::flat(n, uniform(rng, 0.3, 1.0));
    for (double& v : lattice.lapse) v = uniform(rng, 0.5, 1.5);
    const OneParticleModel model = build_model(lattice, uniform(rng, 0.2, 2.0));
    QuasifreeState state = thermal_state(model, uniform(rng, 0.3, 3.0));
    if (i % 2 == 1) {
      const double w = uniform(rng, 0.1, 0.9);
      const CMatrix half = 0.5 * CMatrix::Identity(model.dim(), model.dim());
      state = QuasifreeState((1.0 - w) * state.p() + w * half, model.conj());
    }
    const int first = uniform_int(rng, 0, n - 1);
    const int len = uniform_int(rng, 1, std::max(1, n - 1));
    std::vector<int> sites;
    for (int s = 0; s < len; ++s) sites.push_back((first + s) % n);
    const FactorialityReport r = factoriality_check(state, Region(lattice, sites), params.angle_tol);
    out.worst = std::max(out.worst, static_cast<double>(r.intersection_dim));
    duality = std::max(duality, r.double_complement_defect);
    orthogonality = std::max(orthogonality, r.complement_orthogonality);
    split = split && r.split_dim == r.full_dim;
    if (!r.principal_angles.empty()) min_angle = std::min(min_angle, r.principal_angles.front());
    ++out.cases;
  }
  out = finish(out);
  out.passed = out.passed && duality <= params.duality_tol && orthogonality <= params.duality_tol && split;
  out.detail = "smallest principal angle " + sci(min_angle) + ", double complement defect " + sci(duality) +
               ", Re(M(C)|M(C^c)) " + sci(orthogonality) + ", splitting " + (split ? "exact" : "FAILED");
  return out;
}

SuiteResult resolvent_suite(const ResolventParams& params) {
  const SpinorLattice lattice = SpinorLattice::flat(params.n_sites, params.spacing);
  const OneParticleModel model = build_model(lattice, params.mass);
  const Region region = Region::half(lattice).with_smooth_chi(params.chi_width);
  const std::vector<double> grid = geometric_grid(params.beta_min, params.beta_max, params.points);
  const ResolventReport r = resolvent_trace_scan(model, region, grid, 1);

  SuiteResult out;
  out.name = "resolvent";
  out.metric = "log-log slope";
  out.worst = r.slope.value_or(std::numeric_limits<double>::quiet_NaN());
  out.tolerance = params.slope_hi;
  out.cases = static_cast<long>(r.points.size());
  // beta * norm must not grow towards the end of the grid.
  const double last = r.points.back().scaled;
  const bool bounded = std::isfinite(r.constant) && last <= r.constant;
  out.passed = r.slope && *r.slope >= params.slope_lo && *r.slope <= params.slope_hi && bounded && r.decreasing;
  out.detail = "slope " + sci(out.worst) + " over beta in [" + sci(r.window_min) + ", " + sci(r.window_max) +
               "], sup beta*norm " + sci(r.constant) + ", final beta*norm " + sci(last);
  return out;
}

SuiteResult rescale_suite(const RescaleParams& params) {
  const SpinorLattice lattice = SpinorLattice::flat(params.n_sites, params.spacing);
  const OneParticleModel model = build_model(lattice, params.mass);
  const Region region = Region::half(lattice);
  const std::vector<double> grid = geometric_grid(params.beta_min, params.beta_max, params.points);

  SuiteResult out;
  out.name = "rescale";
  out.metric = "max |beta0'/(lambda beta0) - 1|";
  out.tolerance = params.ratio_tol;
  double identity = 0.0;
  bool identity_ok = true;
  std::ostringstream d;
  for (double lambda : params.lambdas) {
    try {
      const RescalingReport r = rescaling_check(model, region, grid, lambda);
      identity = std::max(identity, r.max_singular_value_defect);
      const double dev = std::abs(*r.beta0_ratio / lambda - 1.0);
      out.worst = std::max(out.worst, dev);
      d << "lambda=" << lambda << ": ratio " << sci(*r.beta0_ratio) << "; ";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::rescaling_model) throw;
      identity_ok = false;
      d << "lambda=" << lambda << ": " << e.what() << "; ";
    }
    ++out.cases;
  }
  out = finish(out);
  out.passed = out.passed && identity_ok && identity <= params.identity_tol;
  d << "singular value identity defect " << sci(identity);
  out.detail = d.str();
  return out;
}

std::vector<SuiteResult> nuclearity_suite(const NuclearityParams& params) {
  const SpinorLattice lattice = SpinorLattice::flat(params.n_sites, params.spacing);
  const OneParticleModel model = build_model(lattice, params.mass);
  const Region region = Region::half(lattice);
  const std::vector<double> grid = geometric_grid(params.beta_min, params.beta_max, params.points);
  const NuclearityReport r = nuclearity_scan(model, region, grid);

  SuiteResult fit;
  fit.name = "nuclearity-fit";
  fit.metric = "fixed-rate fit RMS";
  fit.worst = r.fit->rms;
  fit.tolerance = params.rms_tol;
  fit.cases = r.fit->points;
  fit = finish(fit);
  fit.detail = "beta0 " + sci(r.fit->beta0) + " over beta in [" + sci(r.fit->window_min) + ", " +
               sci(r.fit->window_max) + "]; free-rate fit: rate " + sci(r.free_rate ? r.free_rate->rate : 0.0) +
               " (m0/2 = " + sci(r.m0 / 2) + ", lambda_min+ = " + sci(r.lambda_min_positive) + "), RMS " +
               sci(r.free_rate ? r.free_rate->rms : 0.0);

  SuiteResult envelope;
  envelope.name = "nuclearity-envelope";
  envelope.metric = "trend of log(beta e^{beta lambda/2} ||S||_1)";
  envelope.worst = r.envelope_trend.value_or(std::numeric_limits<double>::infinity());
  envelope.tolerance = params.trend_tol;
  envelope.cases = static_cast<long>(r.points.size());
  envelope = finish(envelope);
  envelope.passed = envelope.passed && r.trace_norm_decreasing && r.singular_values_monotone && r.det_bounds_consistent;
  double sup = 0.0;
  for (const NuclearityPoint& p : r.points) sup = std::max(sup, p.envelope);
  envelope.detail = "sup envelope " + sci(sup) + ", monotone " + (r.trace_norm_decreasing ? "yes" : "no") +
                    ", det(1+T)<=e^||T||_1 " + (r.det_bounds_consistent ? "yes" : "no");
  return {fit, envelope};
}

SuiteResult quasiequiv_suite(const QuasiequivParams& params) {
  RefinementSweep sweep;
  sweep.site_counts = params.site_counts;
  sweep.length = params.length;
  sweep.mass = params.mass;
  sweep.region_fraction = params.region_fraction;
  sweep.rank = params.rank;
  sweep.decay = params.decay;
  sweep.amplitude = params.amplitude;
  const std::vector<RefinementPoint> series = refinement_series(sweep);

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double slack = std::numeric_limits<double>::infinity();
  std::ostringstream d;
  for (const RefinementPoint& p : series) {
    lo = std::min(lo, p.trace_distance);
    hi = std::max(hi, p.trace_distance);
    slack = std::min(slack, p.slack);
    d << p.n_sites << ":" << sci(p.trace_distance) << " ";
  }
  SuiteResult out;
  out.name = "quasiequiv";
  out.metric = "max/min trace distance";
  out.worst = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  out.tolerance = params.ratio_tol;
  out.cases = static_cast<long>(series.size());
  out.passed = out.worst < out.tolerance && slack >= -1e-10;
  d << "min slack " << sci(slack);
  out.detail = d.str();
  return out;
}

}  // namespace diraclab::suites
