#include "diraclab/nuclearity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>

#include "diraclab/fock_kernels.hpp"

namespace diraclab {
namespace {

void require_grid(std::span<const double> grid, std::size_t min_points, const char* who) {
  if (grid.size() < min_points) {
    throw Error(ErrorCode::domain, std::string(who) + ": beta grid needs at least " + std::to_string(min_points) + " points");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw Error(ErrorCode::domain, std::string(who) + ": beta must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::domain, std::string(who) + ": beta grid must be strictly ascending");
  }
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  RMatrix design(static_cast<Eigen::Index>(x.size()), 2);
  RVector rhs(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    design(static_cast<Eigen::Index>(i), 1) = x[i];
    rhs(static_cast<Eigen::Index>(i)) = y[i];
  }
  return linalg::least_squares(design, rhs)(1);
}

// Runs body(i) for i in [0, n), optionally in parallel, rethrowing the first
// exception on the calling thread.
template <class Body>
void for_each_point(std::size_t n, bool parallel, Body&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(diraclab_scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::uint32_t> subsets_up_to(int modes, int k_max) {
  std::vector<std::uint32_t> out;
  const std::uint32_t count = std::uint32_t{1} << modes;
  for (std::uint32_t s = 0; s < count; ++s) {
    if (std::popcount(s) <= k_max) out.push_back(s);
  }
  return out;
}

std::vector<int> bits_of(std::uint32_t s) {
  std::vector<int> out;
  for (std::uint32_t m = s; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

void require_support(const Region& region, const AlgebraElement& a) {
  for (const FieldWord& w : a.words()) {
    for (const CVector& k : w.fields) {
      if (!region.supports(k)) throw Error(ErrorCode::support, "coefficient check: element is not localized in the region");
    }
  }
}

int default_k_max(int k_max, int modes) { return k_max < 0 ? std::min(modes, 6) : std::min(k_max, modes); }

}  // namespace

double LocalizedThermalOperator::norm_bound() const { return 2.0 * std::exp(-beta * lambda_min_positive); }

LocalizedThermalOperator build_s(const OneParticleModel& model, const QuasifreeState& ground, const Region& region,
                                 double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::domain, "build_s: beta must be positive");
  if (region.dim() != model.dim() || ground.dim() != model.dim()) {
    throw Error(ErrorCode::shape, "build_s: model, state and region dimensions differ");
  }
  const CMatrix q = model.positive_eigenvectors();
  const RVector lam = model.positive_eigenvalues();
  if ((ground.p() - q * q.adjoint()).cwiseAbs().maxCoeff() > 1e-8) {
    throw Error(ErrorCode::wrong_state, "build_s: state is not the positive spectral projector of the model");
  }

  LocalizedThermalOperator op;
  op.beta = beta;
  op.region = region;
  op.hspace_basis = q;
  op.lambda_min_positive = lam.size() > 0 ? lam(0) : 0.0;

  // S restricted to H, in the basis q: never forms e^{-beta h} on negative modes.
  const RVector decay = (-beta * lam.array()).exp();
  const CMatrix x = 2.0 * region.mask().cast<cplx>().asDiagonal() * q * decay.cast<cplx>().asDiagonal();
  Eigen::BDCSVD<CMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  op.t = svd.singularValues();
  op.t_eigenvectors = q * svd.matrixV();
  op.s_matrix = x * q.adjoint();
  op.t_matrix = op.t_eigenvectors * op.t.cast<cplx>().asDiagonal() * op.t_eigenvectors.adjoint();
  const int r = linalg::numerical_rank(op.t, 1e-10, 1e-300);
  op.v_isometry = svd.matrixU().leftCols(r) * op.t_eigenvectors.leftCols(r).adjoint();
  return op;
}

DetBound det_bound(const LocalizedThermalOperator& op, double p, Backend backend) {
  if (!(p > 0.0)) throw Error(ErrorCode::domain, "det_bound: p must be positive");
  DetBound out;
  double log_sum = 0.0;
  for (Eigen::Index j = 0; j < op.t.size(); ++j) log_sum += std::log1p(std::pow(op.t(j), p));
  out.product_form = std::exp(log_sum / p);
  if (op.t.size() <= 12) {
    // T^p in the (non-diagonalizing) basis of H, so the minor sum is a real check.
    const CMatrix w = op.hspace_basis.adjoint() * op.t_eigenvectors;
    const CMatrix tp = w * op.t.array().pow(p).matrix().cast<cplx>().asDiagonal() * w.adjoint();
    const cplx sum = backend == Backend::serial ? kernels::serial::principal_minor_sum(tp)
                                                : kernels::omp::principal_minor_sum(tp);
    out.minor_form = std::pow(sum.real(), 1.0 / p);
  }
  return out;
}

// ---------------------------------------------------------------------------

CoefficientChecker::CoefficientChecker(const OneParticleModel& model, const QuasifreeState& ground,
                                       const LocalizedThermalOperator& op, int k_max, Backend backend)
    : rep_(build_fock(ground, 14, op.t_eigenvectors, backend)),
      region_(op.region),
      t_(op.t),
      thermal_(fock_thermal(hamiltonian(rep_, model), op.beta)),
      k_max_(default_k_max(k_max, rep_.modes())) {}

CoefficientReport CoefficientChecker::check(const AlgebraElement& a) const {
  require_support(region_, a);
  if (a.matrix().rows() != rep_.dim()) throw Error(ErrorCode::shape, "coefficient check: element from another Fock space");
  const CVector theta = thermal_ * a.matrix().col(0);
  CoefficientReport report;
  report.operator_norm = a.operator_norm();
  report.worst_margin = -std::numeric_limits<double>::infinity();
  // Phi_I = a_{i1}^dagger ... a_{ik}^dagger Omega is +- the occupation state I.
  for (std::uint32_t s : subsets_up_to(rep_.modes(), k_max_)) {
    double rhs = report.operator_norm;
    for (int i : bits_of(s)) rhs *= t_(i);
    const double lhs = std::abs(theta(static_cast<Eigen::Index>(s)));
    report.max_lhs = std::max(report.max_lhs, lhs);
    if (lhs - rhs > report.worst_margin) {
      report.worst_margin = lhs - rhs;
      report.worst_subset = bits_of(s);
    }
    ++report.subsets_checked;
  }
  return report;
}

CoefficientReport coefficient_inequality_check(const FockRep& rep, const FockMatrix& h, const LocalizedThermalOperator& op,
                                               const AlgebraElement& a, int k_max) {
  require_support(op.region, a);
  const int m = static_cast<int>(op.t.size());
  if (m > rep.modes()) throw Error(ErrorCode::shape, "coefficient check: representation has fewer modes than H");
  std::vector<FockMatrix> raise;
  raise.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) raise.push_back(creation(rep, op.t_eigenvectors.col(j)));

  const CVector theta = theta_map(h, op.beta, a);
  CoefficientReport report;
  report.operator_norm = a.operator_norm();
  report.worst_margin = -std::numeric_limits<double>::infinity();
  const CVector omega = rep.vacuum();
  for (std::uint32_t s : subsets_up_to(m, default_k_max(k_max, m))) {
    const std::vector<int> bits = bits_of(s);
    CVector phi = omega;
    double rhs = report.operator_norm;
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
      phi = raise[static_cast<std::size_t>(*it)] * phi;
      rhs *= op.t(*it);
    }
    const double lhs = std::abs(phi.dot(theta));
    report.max_lhs = std::max(report.max_lhs, lhs);
    if (lhs - rhs > report.worst_margin) {
      report.worst_margin = lhs - rhs;
      report.worst_subset = bits;
    }
    ++report.subsets_checked;
  }
  return report;
}

// ---------------------------------------------------------------------------

ScalingFit fit_beta0(std::span<const double> betas, std::span<const double> trace_norms, std::span<const double> t1,
                     double m0, int spatial_dim, double t1_threshold) {
  if (betas.size() != trace_norms.size() || betas.size() != t1.size()) throw Error(ErrorCode::shape, "fit_beta0: length mismatch");
  const double s = spatial_dim;
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (t1[i] < t1_threshold && trace_norms[i] > 0.0) window.push_back(i);
  }
  if (window.empty()) throw Error(ErrorCode::fit, "beta0 fit: no grid point with t1 < " + std::to_string(t1_threshold));
  // The model has one free parameter c = s log beta0; its estimate is a mean.
  double c = 0.0;
  for (std::size_t i : window) c += std::log(trace_norms[i]) + s * std::log(betas[i]) + betas[i] * m0 / 2.0;
  c /= static_cast<double>(window.size());
  RVector residuals(static_cast<Eigen::Index>(window.size()));
  for (std::size_t w = 0; w < window.size(); ++w) {
    const std::size_t i = window[w];
    residuals(static_cast<Eigen::Index>(w)) = std::log(trace_norms[i]) - (c - s * std::log(betas[i]) - betas[i] * m0 / 2.0);
  }
  ScalingFit fit;
  fit.beta0 = std::exp(c / s);
  fit.rms = linalg::rms(residuals);
  fit.window_min = betas[window.front()];
  fit.window_max = betas[window.back()];
  fit.points = static_cast<int>(window.size());
  return fit;
}

NuclearityReport nuclearity_scan(const OneParticleModel& model, const Region& region, std::span<const double> grid,
                                 const NuclearityOptions& options) {
  require_grid(grid, 8, "nuclearity_scan");
  for (double p : options.p_list) {
    if (!(p > 0.0)) throw Error(ErrorCode::domain, "nuclearity_scan: p must be positive");
  }
  const QuasifreeState ground = positive_projector(model);

  NuclearityReport report;
  report.p_list = options.p_list;
  report.m0 = model.m0();
  report.lambda_min_positive = model.smallest_positive_eigenvalue();
  report.spatial_dim = model.lattice().spatial_dim;
  report.points.resize(grid.size());
  const double s = report.spatial_dim;

  for_each_point(grid.size(), options.parallel, [&](std::size_t i) {
    const LocalizedThermalOperator op = build_s(model, ground, region, grid[i]);
    NuclearityPoint& pt = report.points[i];
    pt.beta = grid[i];
    pt.singular_values.assign(op.t.data(), op.t.data() + op.t.size());
    pt.s_trace_norm = op.trace_norm();
    pt.t1 = op.t.size() > 0 ? op.t(0) : 0.0;
    for (double p : options.p_list) {
      pt.p_norms.push_back(linalg::schatten_norm(pt.singular_values, p));
      pt.det_bounds.push_back(det_bound(op, p).product_form);
    }
    pt.nu_bound = std::exp(pt.s_trace_norm);
    pt.envelope = std::pow(pt.beta, s) * std::exp(pt.beta * report.lambda_min_positive / 2.0) * pt.s_trace_norm;
  });

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const NuclearityPoint& pt = report.points[i];
    double det1 = 1.0;
    for (double t : pt.singular_values) det1 *= 1.0 + t;
    if (det1 < 1.0 - 1e-12 || det1 > pt.nu_bound * (1.0 + 1e-12)) report.det_bounds_consistent = false;
    if (i == 0) continue;
    const NuclearityPoint& prev = report.points[i - 1];
    if (!(pt.s_trace_norm < prev.s_trace_norm) && prev.s_trace_norm > 0.0) report.trace_norm_decreasing = false;
    for (std::size_t j = 0; j < pt.singular_values.size(); ++j) {
      if (pt.singular_values[j] > prev.singular_values[j] * (1.0 + 1e-10) + 1e-300) report.singular_values_monotone = false;
    }
  }

  if (region.is_empty()) {
    report.warnings.emplace_back("region is empty: all norms vanish and no fit is attempted");
    return report;
  }

  std::vector<double> betas(grid.begin(), grid.end());
  std::vector<double> norms;
  std::vector<double> t1;
  for (const NuclearityPoint& pt : report.points) {
    norms.push_back(pt.s_trace_norm);
    t1.push_back(pt.t1);
  }
  try {
    report.fit = fit_beta0(betas, norms, t1, report.m0, report.spatial_dim, options.fit_t1_threshold);
  } catch (const Error& e) {
    if (options.strict_fit || e.code() != ErrorCode::fit) throw;
    report.fit_failure = e.what();
    return report;
  }
  const double c = s * std::log(report.fit->beta0);
  for (NuclearityPoint& pt : report.points) {
    if (pt.t1 < options.fit_t1_threshold && pt.s_trace_norm > 0.0) {
      pt.fit_residual = std::log(pt.s_trace_norm) - (c - s * std::log(pt.beta) - pt.beta * report.m0 / 2.0);
    }
  }

  std::vector<double> wb;
  std::vector<double> wy;
  for (const NuclearityPoint& pt : report.points) {
    if (pt.t1 < options.fit_t1_threshold && pt.s_trace_norm > 0.0) {
      wb.push_back(pt.beta);
      wy.push_back(std::log(pt.s_trace_norm) + s * std::log(pt.beta));
    }
  }
  if (wb.size() >= 3) {
    RMatrix design(static_cast<Eigen::Index>(wb.size()), 2);
    RVector rhs(static_cast<Eigen::Index>(wb.size()));
    for (std::size_t i = 0; i < wb.size(); ++i) {
      design(static_cast<Eigen::Index>(i), 0) = 1.0;
      design(static_cast<Eigen::Index>(i), 1) = -wb[i];
      rhs(static_cast<Eigen::Index>(i)) = wy[i];
    }
    const RVector coef = linalg::least_squares(design, rhs);
    report.free_rate = FreeRateFit{coef(1), coef(0), linalg::rms(rhs - design * coef)};
  }

  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = grid.size() / 2; i < grid.size(); ++i) {
    if (report.points[i].envelope > 0.0) {
      lx.push_back(std::log(grid[i]));
      ly.push_back(std::log(report.points[i].envelope));
    }
  }
  if (lx.size() >= 2) report.envelope_trend = slope_of(lx, ly);
  return report;
}

// ---------------------------------------------------------------------------

RescalingReport rescaling_check(const OneParticleModel& model, const Region& region, std::span<const double> grid,
                                double lambda, bool fit) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::domain, "rescaling_check: lambda must be positive");
  require_grid(grid, 1, "rescaling_check");

  SpinorLattice stretched = model.lattice();
  stretched.spacing *= lambda;
  const OneParticleModel rescaled = build_model(stretched, model.mass());
  const OneParticleModel reference = build_model(model.lattice(), lambda * model.mass());
  const QuasifreeState ground_rescaled = positive_projector(rescaled);
  const QuasifreeState ground_reference = positive_projector(reference);

  RescalingReport report;
  report.lambda = lambda;
  report.betas.assign(grid.begin(), grid.end());
  std::vector<double> t1_rescaled;
  for (double beta : grid) {
    const LocalizedThermalOperator lhs = build_s(rescaled, ground_rescaled, region, beta);
    const LocalizedThermalOperator rhs = build_s(reference, ground_reference, region, beta / lambda);
    const double defect = (lhs.t - rhs.t).cwiseAbs().maxCoeff();
    report.max_singular_value_defect = std::max(report.max_singular_value_defect, defect);
    report.trace_norm_rescaled.push_back(lhs.trace_norm());
    report.trace_norm_reference.push_back(rhs.trace_norm());
    t1_rescaled.push_back(lhs.t.size() > 0 ? lhs.t(0) : 0.0);
  }
  if (report.max_singular_value_defect > 1e-10) {
    throw Error(ErrorCode::rescaling_model, "rescaling_check: singular values of S' and the mass-rescaled S differ by " +
                                                std::to_string(report.max_singular_value_defect));
  }
  if (!fit || region.is_empty()) return report;

  const QuasifreeState ground = positive_projector(model);
  std::vector<double> norms;
  std::vector<double> t1;
  for (double beta : grid) {
    const LocalizedThermalOperator op = build_s(model, ground, region, beta);
    norms.push_back(op.trace_norm());
    t1.push_back(op.t.size() > 0 ? op.t(0) : 0.0);
  }
  const int s = model.lattice().spatial_dim;
  report.beta0 = fit_beta0(grid, norms, t1, model.m0(), s).beta0;
  report.beta0_rescaled = fit_beta0(grid, report.trace_norm_rescaled, t1_rescaled, rescaled.m0(), s).beta0;
  report.beta0_ratio = *report.beta0_rescaled / *report.beta0;
  return report;
}

// ---------------------------------------------------------------------------

ResolventReport resolvent_trace_scan(const OneParticleModel& model, const Region& region, std::span<const double> grid,
                                     int s_power, double window_factor, bool parallel) {
  if (s_power < 1) throw Error(ErrorCode::domain, "resolvent_trace_scan: s_power must be at least 1");
  require_grid(grid, 2, "resolvent_trace_scan");
  if (region.dim() != model.dim()) throw Error(ErrorCode::shape, "resolvent_trace_scan: region and model differ");

  const RVector chi = region.chi_diagonal();
  const CMatrix& u = model.eigenvectors();
  const RVector& lam = model.eigenvalues();
  const RVector weights = (chi.cwiseAbs2().asDiagonal() * u.cwiseAbs2()).colwise().sum().transpose();
  const CMatrix chi_u = chi.cast<cplx>().asDiagonal() * u;
  const CMatrix chi_eigen = u.adjoint() * chi_u;

  ResolventReport report;
  report.s_power = s_power;
  report.lambda_max = lam.cwiseAbs().maxCoeff();
  report.points.resize(grid.size());
  const double s = s_power;

  for_each_point(grid.size(), parallel, [&](std::size_t i) {
    const double beta = grid[i];
    const RVector base = (1.0 + beta * beta * lam.array().square()).matrix();
    const RVector f = base.array().pow(-s).matrix();
    ResolventPoint& pt = report.points[i];
    pt.beta = beta;
    pt.trace_norm = weights.dot(f);
    pt.hs_first = (chi_u * f.cwiseSqrt().cast<cplx>().asDiagonal()).squaredNorm();
    pt.hs_second = (base.array().pow(s / 2.0).matrix().cast<cplx>().asDiagonal() * chi_eigen *
                    f.cast<cplx>().asDiagonal())
                       .norm();
    pt.scaled = std::pow(beta, s) * pt.trace_norm;
  });

  for (std::size_t i = 0; i < grid.size(); ++i) {
    report.constant = std::max(report.constant, report.points[i].scaled);
    if (i > 0 && !(report.points[i].trace_norm < report.points[i - 1].trace_norm)) report.decreasing = false;
  }
  if (weights.sum() == 0.0) {
    report.decreasing = true;
    report.warnings.emplace_back("chi vanishes identically: all norms are zero and no slope is fitted");
    return report;
  }

  std::vector<double> lx;
  std::vector<double> ly;
  for (const ResolventPoint& pt : report.points) {
    if (pt.beta * report.lambda_max > window_factor) {
      if (lx.empty()) report.window_min = pt.beta;
      report.window_max = pt.beta;
      lx.push_back(std::log(pt.beta));
      ly.push_back(std::log(pt.trace_norm));
    }
  }
  report.window_points = static_cast<int>(lx.size());
  if (lx.size() < 2) {
    throw Error(ErrorCode::fit, "resolvent_trace_scan: fewer than two grid points with beta * lambda_max > " +
                                    std::to_string(window_factor));
  }
  report.slope = slope_of(lx, ly);
  return report;
}

RangeDensityReport range_density_check(const LocalizedThermalOperator& op) {
  const CMatrix restricted = op.region.mask().cast<cplx>().asDiagonal() * op.hspace_basis;
  const RVector sv = linalg::singular_values(restricted);
  RangeDensityReport report;
  report.hspace_dim = static_cast<int>(op.hspace_basis.cols());
  if (sv.size() == 0 || sv(0) == 0.0) return report;
  report.rank = linalg::numerical_rank(sv);
  report.smallest_singular_value = sv(sv.size() - 1);
  return report;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw Error(ErrorCode::domain, "geometric_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

}  // namespace diraclab
