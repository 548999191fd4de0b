#include "stochpot/stochastic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stochpot/mc.hpp"
#include "stochpot/rng.hpp"

namespace stochpot::stoch {

namespace {

constexpr double kPi = 3.14159265358979323846;

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
  return v;
}

double moment(double alpha, int Q, MomentConvention conv) {
  return conv == MomentConvention::Paper ? grf::paper_moment(alpha, Q)
                                         : grf::gaussian_moment(alpha, Q);
}

// concatenates grids; the originals keep their own weights
std::shared_ptr<DomainGrid> merge_grids(const std::vector<const DomainGrid*>& parts) {
  auto g = std::make_shared<DomainGrid>();
  int total = 0;
  for (const auto* p : parts) total += p->size();
  g->points.resize(total, 3);
  g->weights.resize(total);
  int at = 0;
  for (const auto* p : parts) {
    g->points.middleRows(at, p->size()) = p->points;
    g->weights.segment(at, p->size()) = p->weights;
    at += p->size();
  }
  g->measure = parts.front()->measure;
  g->descriptor = "merged";
  return g;
}

std::shared_ptr<DomainGrid> points_grid(const std::vector<Vec>& pts) {
  auto g = std::make_shared<DomainGrid>();
  g->points.resize(static_cast<int>(pts.size()), 3);
  g->weights = Eigen::VectorXd::Ones(static_cast<int>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) g->points.row(static_cast<int>(i)) = pts[i].transpose();
  g->descriptor = "points";
  return g;
}

// w^T C w with C the raw (unjittered) kernel matrix; the double-quadrature
// noise-variance oracle for a linear functional sum_q w_q IF(x_q)
double quadratic_form(const Eigen::MatrixXd& cov, const Eigen::VectorXd& w) {
  return w.dot(cov * w);
}

double quadratic_form(const Eigen::MatrixXd& cov, const Eigen::VectorXd& wa,
                      const Eigen::VectorXd& wb) {
  return wa.dot(cov * wb);
}

// statistics of several linear functionals of one Gaussian field; per-sample
// values come from precomputed L^T w vectors so a draw costs one dot product
struct FunctionalSampler {
  grf::FieldSampler sampler;
  Eigen::MatrixXd v;  // column j = L^T w_j

  FunctionalSampler(const CovKernel& k, std::shared_ptr<const DomainGrid> grid,
                    const std::vector<Eigen::VectorXd>& weights)
      : sampler(k, std::move(grid)) {
    v.resize(sampler.cholesky_factor().rows(), static_cast<int>(weights.size()));
    for (std::size_t j = 0; j < weights.size(); ++j)
      v.col(static_cast<int>(j)) = sampler.cholesky_factor().transpose() * weights[j];
  }

  Eigen::VectorXd draw(std::uint64_t seed, std::uint64_t i) const {
    return v.transpose() * sampler.standard_normals(seed, i);
  }
  const Eigen::MatrixXd& covariance() const { return sampler.covariance(); }
};

// deterministic per-node moment accumulation: fixed-size blocks are summed in
// block order, so the result is independent of the worker count
template <class PerSample>
Eigen::VectorXd mean_vector(long n_samples, int dim, const PerSample& f) {
  const long block = 512;
  const long n_blocks = (n_samples + block - 1) / block;
  std::vector<Eigen::VectorXd> partial(static_cast<std::size_t>(n_blocks));
  mc_map(n_blocks, [&](std::uint64_t b) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    const long lo = static_cast<long>(b) * block;
    const long hi = std::min(lo + block, n_samples);
    for (long i = lo; i < hi; ++i) acc += f(static_cast<std::uint64_t>(i));
    partial[b] = acc;
    return 0.0;
  });
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  for (const auto& p : partial) total += p;
  return total / static_cast<double>(n_samples);
}

}  // namespace

NoiseConstants NoiseConstants::from_gaussian_kernel(const CovKernel& k, int n, double lambda) {
  NoiseConstants c;
  c.alpha = k.alpha;
  c.beta = grf::grad_variance_component(k);
  c.theta = grf::third_derivative_constant(k, n);
  c.xi_c = grf::hessian_constant(k, n);
  c.lambda = lambda;
  return c;
}

double binomial_moment(double base_magnitude, double lambda, double alpha, int P,
                       MomentConvention conv) {
  if (P < 0) throw std::invalid_argument("binomial_moment: order must be non-negative");
  double acc = 0.0;
  for (int Q = 0; Q <= P; ++Q)
    acc += binom(P, Q) * std::pow(std::abs(base_magnitude), P - Q) * std::pow(lambda, Q) *
           moment(alpha, Q, conv);
  return acc;
}

// ---------------------------------------------------------------- MVP ----

ReportSet perturbed_mvp(const PerturbedMvpParams& p) {
  const auto verdict = grf::kc_admissible(p.kernel);
  if (!verdict.admissible)
    throw std::invalid_argument("perturbed_mvp: kernel rejected: " + verdict.reason);

  const Domain ball_a = Domain::ball(p.dim, p.R, p.center_a);
  const Domain ball_b = Domain::ball(p.dim, p.R, p.center_b);
  const DomainGrid grid_a = geom::build_grid(ball_a, geom::MeasureKind::Volume, p.resolution);
  const DomainGrid grid_b = geom::build_grid(ball_b, geom::MeasureKind::Volume, p.resolution);
  auto merged = merge_grids({&grid_a, &grid_b});

  const int na = grid_a.size(), nb = grid_b.size();
  Eigen::VectorXd wa = Eigen::VectorXd::Zero(na + nb), wb = Eigen::VectorXd::Zero(na + nb);
  wa.head(na) = grid_a.weights / grid_a.weight_sum();
  wb.tail(nb) = grid_b.weights / grid_b.weight_sum();

  FunctionalSampler fs(p.kernel, merged, {wa, wb});

  double psi_avg_a = 0.0, psi_avg_b = 0.0;
  for (int q = 0; q < na; ++q)
    psi_avg_a += harmonic::eval(p.base, grid_a.point(q)) * wa[q];
  for (int q = 0; q < nb; ++q)
    psi_avg_b += harmonic::eval(p.base, grid_b.point(q)) * wb[na + q];

  std::vector<double> sa(static_cast<std::size_t>(p.n_samples)),
      sb(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd d = fs.draw(p.seed, i);
    sa[i] = psi_avg_a + p.lambda * d[0];
    sb[i] = psi_avg_b + p.lambda * d[1];
    return 0.0;
  });

  const double var_a = quadratic_form(fs.covariance(), wa);
  const double var_ab = quadratic_form(fs.covariance(), wa, wb);
  const double psi_center = harmonic::eval(p.base, p.center_a);
  const double vol_exact = geom::ball_volume(p.dim, p.R);

  ReportSet rep;
  rep.id = "thm_3_6";

  const McStats mean_a = batch_means(sa);
  rep.add(MomentReport::oracle_row("mean[ball_avg]", psi_center, psi_avg_a, mean_a.mean,
                                   mean_a.stderr_, p.n_samples));
  rep.add(MomentReport::exact_row("grid_avg_vs_center_value", psi_center, psi_avg_a,
                                  5e-3 * std::max(1.0, std::abs(psi_center))));

  std::vector<double> sq(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) sq[i] = sa[i] * sa[i];
  const McStats vol = batch_means(sq);
  const double vol_oracle = psi_avg_a * psi_avg_a + p.lambda * p.lambda * var_a;
  const double vol_paper_cor39 = psi_center * psi_center + p.lambda * p.lambda * p.kernel.alpha;
  rep.add(MomentReport::oracle_row("volatility[ball_avg]", vol_paper_cor39, vol_oracle, vol.mean,
                                   vol.stderr_, p.n_samples));
  rep.add(MomentReport::paper_note("volatility_pointwise_form", vol_paper_cor39, vol_oracle,
                                   vol.mean, vol.stderr_, p.n_samples));
  const double vol_paper_eq323 =
      psi_center * psi_center + p.kernel.alpha * p.lambda * vol_exact * vol_exact;
  rep.add(MomentReport::paper_note("volatility_volume_sq_form", vol_paper_eq323, vol_oracle,
                                   vol.mean, vol.stderr_, p.n_samples));

  std::vector<double> prod(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) prod[i] = sa[i] * sb[i];
  const McStats cov = batch_means(prod);
  const double cov_oracle = psi_avg_a * psi_avg_b + p.lambda * p.lambda * var_ab;
  rep.add(MomentReport::oracle_row("covariance[two_balls]", cov_oracle, cov_oracle, cov.mean,
                                   cov.stderr_, p.n_samples));

  std::vector<double> cube(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double c = sa[i] - psi_avg_a;
    cube[i] = c * c * c;
  }
  const McStats third = batch_means(cube);
  rep.add(MomentReport::oracle_row("third_moment_centered", 0.0, 0.0, third.mean, third.stderr_,
                                   p.n_samples));

  // fourth-moment convention discrimination
  std::vector<double> p4(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) p4[i] = std::pow(sa[i], 4);
  const McStats m4 = batch_means(p4);
  const double m4_gauss =
      binomial_moment(psi_avg_a, p.lambda, var_a, 4, MomentConvention::Gaussian);
  const double m4_paper = binomial_moment(psi_avg_a, p.lambda, var_a, 4, MomentConvention::Paper);
  rep.add(MomentReport::oracle_row("moment4[gaussian_convention]", m4_paper, m4_gauss, m4.mean,
                                   m4.stderr_, p.n_samples));
  rep.add(MomentReport::paper_note("moment4[paper_convention]", m4_paper, m4_gauss, m4.mean,
                                   m4.stderr_, p.n_samples));
  return rep;
}

// -------------------------------------------------- max principle ----

ReportSet averaged_max_principle(const AveragedMaxPrincipleParams& p) {
  const DomainGrid interior = geom::build_grid(p.domain, geom::MeasureKind::Volume, p.resolution);
  const DomainGrid boundary = geom::build_grid(p.domain, geom::MeasureKind::Surface, p.resolution);
  auto merged = merge_grids({&interior, &boundary});
  grf::FieldSampler sampler(p.kernel, merged);

  const int ni = interior.size(), ntot = merged->size();
  Eigen::VectorXd base_vals(ntot);
  for (int q = 0; q < ntot; ++q) base_vals[q] = harmonic::eval(p.base, merged->point(q));

  ReportSet rep;
  rep.id = "thm_3_10";

  const double spread = base_vals.maxCoeff() - base_vals.minCoeff();
  if (spread <= 1e-12) {
    rep.add(MomentReport::info_row("constant_base_function", base_vals[0]));
    return rep;
  }

  for (int P : p.orders) {
    Eigen::VectorXd mc_moment = mean_vector(p.n_samples, ntot, [&](std::uint64_t i) {
      const Eigen::VectorXd field = sampler.transform(sampler.standard_normals(p.seed, i));
      Eigen::VectorXd m(ntot);
      for (int q = 0; q < ntot; ++q)
        m[q] = std::pow(std::abs(base_vals[q] + p.lambda * field[q]), P);
      return m;
    });
    const double mc_int_max = mc_moment.head(ni).maxCoeff();
    const double mc_bdy_max = mc_moment.tail(ntot - ni).maxCoeff();
    rep.add(MomentReport::exact_row("mc_moment_max_interior_lt_boundary[P=" + std::to_string(P) + "]",
                                    1.0, mc_int_max < mc_bdy_max ? 1.0 : 0.0, 0.5));

    // closed-form moment field (true Gaussian moments, pointwise variance alpha)
    Eigen::VectorXd closed(ntot);
    for (int q = 0; q < ntot; ++q)
      closed[q] = binomial_moment(base_vals[q], p.lambda, p.kernel.alpha, P,
                                  MomentConvention::Gaussian);
    rep.add(MomentReport::exact_row("closed_moment_max_interior_lt_boundary[P=" + std::to_string(P) + "]",
                                    1.0,
                                    closed.head(ni).maxCoeff() < closed.tail(ntot - ni).maxCoeff()
                                        ? 1.0
                                        : 0.0,
                                    0.5));
    // the paper's reduction: the inequality collapses onto the deterministic
    // binomial comparison in |psi|
    Eigen::VectorXd reduction(ntot);
    for (int q = 0; q < ntot; ++q) {
      double acc = 0.0;
      for (int Q = 0; Q <= P; ++Q) acc += binom(P, Q) * std::pow(std::abs(base_vals[q]), P - Q);
      reduction[q] = acc;
    }
    rep.add(MomentReport::exact_row("paper_reduction_max_interior_lt_boundary[P=" + std::to_string(P) + "]",
                                    1.0,
                                    reduction.head(ni).maxCoeff() <
                                            reduction.tail(ntot - ni).maxCoeff()
                                        ? 1.0
                                        : 0.0,
                                    0.5));
  }
  return rep;
}

// -------------------------------------------------- line integrals ----

namespace {

struct CurveQuadrature {
  std::vector<Vec> midpoints;
  std::vector<Vec> deltas;
};

CurveQuadrature curve_quadrature(const Curve& c) {
  CurveQuadrature q;
  for (int k = 0; k + 1 < c.size(); ++k) {
    q.midpoints.push_back(0.5 * (c.node(k) + c.node(k + 1)));
    q.deltas.push_back(c.node(k + 1) - c.node(k));
  }
  return q;
}

}  // namespace

ReportSet stochastic_line_integral(const LineIntegralParams& p) {
  if (!p.loop.closed) throw std::invalid_argument("line integral: loop report needs a closed curve");
  const CurveQuadrature open_q = curve_quadrature(p.open_curve);
  const CurveQuadrature loop_q = curve_quadrature(p.loop);

  std::vector<Vec> all_pts = open_q.midpoints;
  all_pts.insert(all_pts.end(), loop_q.midpoints.begin(), loop_q.midpoints.end());
  auto grid = points_grid(all_pts);
  grf::FieldSampler sampler(p.kernel, grid);

  const int n_open = static_cast<int>(open_q.midpoints.size());
  const int n_loop = static_cast<int>(loop_q.midpoints.size());
  const int dim = p.base.dim;

  // the perturbed gradient is grad(psi) + lambda W with W a vector of `dim`
  // independent components, each a scalar field with the same kernel; a
  // literal gradient of one scalar sample would make every loop integral
  // telescope to zero, which contradicts the loop covariance this models
  const double det_open =
      harmonic::eval(p.base, p.open_curve.endpoint_b()) - harmonic::eval(p.base, p.open_curve.endpoint_a());

  std::vector<double> open_vals(static_cast<std::size_t>(p.n_samples));
  std::vector<double> loop_vals(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    double open_noise = 0.0, loop_noise = 0.0;
    for (int c = 0; c < dim; ++c) {
      const std::uint64_t comp_seed = Rng::mix(p.seed, 0xC0FFEEull + static_cast<std::uint64_t>(c));
      const Eigen::VectorXd w = sampler.transform(sampler.standard_normals(comp_seed, i));
      for (int k = 0; k < n_open; ++k) open_noise += w[k] * open_q.deltas[static_cast<std::size_t>(k)][c];
      for (int k = 0; k < n_loop; ++k)
        loop_noise += w[n_open + k] * loop_q.deltas[static_cast<std::size_t>(k)][c];
    }
    open_vals[i] = det_open + p.lambda * open_noise;
    loop_vals[i] = p.lambda * loop_noise;
    return 0.0;
  });

  // double quadrature of the kernel along curve pairs, dotted tangents
  auto loop_loop_cov = [&](const CurveQuadrature& a, int off_a, const CurveQuadrature& b,
                           int off_b) {
    double acc = 0.0;
    const auto& cov = sampler.covariance();
    for (std::size_t k = 0; k < a.midpoints.size(); ++k)
      for (std::size_t l = 0; l < b.midpoints.size(); ++l) {
        double dot = 0.0;
        for (int c = 0; c < dim; ++c) dot += a.deltas[k][c] * b.deltas[l][c];
        acc += cov(off_a + static_cast<int>(k), off_b + static_cast<int>(l)) * dot;
      }
    return acc;
  };

  ReportSet rep;
  rep.id = "lem_3_11";
  const McStats mo = batch_means(open_vals);
  rep.add(MomentReport::oracle_row("open_curve_mean", det_open, det_open, mo.mean, mo.stderr_,
                                   p.n_samples));
  const McStats ml = batch_means(loop_vals);
  rep.add(MomentReport::oracle_row("closed_loop_mean", 0.0, 0.0, ml.mean, ml.stderr_, p.n_samples));

  std::vector<double> loop_sq(loop_vals.size());
  for (std::size_t i = 0; i < loop_vals.size(); ++i) loop_sq[i] = loop_vals[i] * loop_vals[i];
  const McStats l2 = batch_means(loop_sq);
  const double loop_var_oracle =
      p.lambda * p.lambda * loop_loop_cov(loop_q, n_open, loop_q, n_open);
  rep.add(MomentReport::oracle_row("loop_loop_covariance", loop_var_oracle, loop_var_oracle,
                                   l2.mean, l2.stderr_, p.n_samples));

  std::vector<double> cross(loop_vals.size());
  for (std::size_t i = 0; i < loop_vals.size(); ++i)
    cross[i] = (open_vals[i] - det_open) * loop_vals[i];
  const McStats cx = batch_means(cross);
  const double cross_oracle = p.lambda * p.lambda * loop_loop_cov(open_q, 0, loop_q, n_open);
  rep.add(MomentReport::oracle_row("open_loop_cross_covariance", cross_oracle, cross_oracle,
                                   cx.mean, cx.stderr_, p.n_samples));
  return rep;
}

// ------------------------------------------------------------ SADEI ----

ReportSet sadei(const SadeiParams& p) {
  if (p.kernel.kind != grf::KernelKind::GaussianCorr)
    throw std::invalid_argument("sadei: gradient sampling requires a GaussianCorr kernel");
  const DomainGrid grid = geom::build_grid(p.domain, geom::MeasureKind::Volume, p.resolution);
  const int dim = p.domain.dim;
  std::vector<Vec> pts(static_cast<std::size_t>(grid.size()));
  for (int q = 0; q < grid.size(); ++q) pts[static_cast<std::size_t>(q)] = grid.point(q);
  grf::GradientFieldSampler gs(p.kernel, pts, dim, /*with_field=*/false);

  std::vector<Vec> base_grad(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) base_grad[q] = harmonic::grad(p.base, pts[q]);

  std::vector<double> energies(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd draw = gs.sample(p.seed, i);
    double acc = 0.0;
    for (int q = 0; q < grid.size(); ++q) {
      const Vec g = gs.gradient_at(draw, q);
      double sq = 0.0;
      for (int c = 0; c < dim; ++c) {
        const double v = base_grad[static_cast<std::size_t>(q)][c] + p.lambda * g[c];
        sq += v * v;
      }
      acc += 0.5 * sq * grid.weights[q];
    }
    energies[i] = acc;
    return 0.0;
  });

  const double beta_c = grf::grad_variance_component(p.kernel);
  const double grad_var_energy = 0.5 * dim * beta_c;  // per-volume energy density of the noise
  double base_energy = 0.0;
  for (int q = 0; q < grid.size(); ++q) {
    double sq = 0.0;
    for (int c = 0; c < dim; ++c) sq += base_grad[static_cast<std::size_t>(q)][c] * base_grad[static_cast<std::size_t>(q)][c];
    base_energy += 0.5 * sq * grid.weights[q];
  }
  const double vol_grid = grid.weight_sum();

  ReportSet rep;
  rep.id = "thm_3_13";
  const McStats e = batch_means(energies);
  const double oracle_mean = base_energy + p.lambda * p.lambda * grad_var_energy * vol_grid;
  const double paper_mean = base_energy + p.lambda * p.kernel.alpha * vol_grid;
  rep.add(MomentReport::oracle_row("energy_mean", paper_mean, oracle_mean, e.mean, e.stderr_,
                                   p.n_samples));
  rep.add(MomentReport::paper_note("energy_shift_paper_lambda_alpha", paper_mean, oracle_mean,
                                   e.mean, e.stderr_, p.n_samples));
  rep.add(MomentReport::info_row("analytic_gradient_variance", grad_var_energy));
  rep.add(MomentReport::info_row("base_energy", base_energy));

  std::vector<double> esq(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) esq[i] = energies[i] * energies[i];
  const McStats e2 = batch_means(esq);
  const double beta_total = dim * beta_c;
  const double paper_bound = 0.25 * base_energy * base_energy +
                             1.5 * beta_total * vol_grid * base_energy +
                             0.25 * beta_total * beta_total * vol_grid * vol_grid;
  MomentReport bound_row = MomentReport::info_row("energy_second_moment", e2.mean);
  bound_row.mc_stderr = e2.stderr_;
  bound_row.paper_value = paper_bound;
  bound_row.verdict = e2.mean <= paper_bound ? "note:bound-holds" : "note:bound-violated";
  rep.add(bound_row);

  // harmonic functions stay critical points: competitor with the same boundary
  const HarmonicFn bump = HarmonicFn::custom(
      dim,
      [base = p.base, R = p.domain.radius, c = p.domain.center](const Vec& x) {
        const double r2 = (x - c).squaredNorm();
        const double b = std::max(0.0, R * R - r2);
        return harmonic::eval(base, x) + 0.5 * b * b;
      });
  double bump_energy = 0.0;
  for (int q = 0; q < grid.size(); ++q) {
    const Vec g = harmonic::grad(bump, grid.point(q), 1e-5);
    double sq = 0.0;
    for (int c = 0; c < dim; ++c) sq += g[c] * g[c];
    bump_energy += 0.5 * sq * grid.weights[q];
  }
  rep.add(MomentReport::exact_row("harmonic_minimizes_shifted_energy", 1.0,
                                  base_energy <= bump_energy ? 1.0 : 0.0, 0.5));
  return rep;
}

// ----------------------------------------------------- Cacciopolli ----

CacciopolliCondition stochastic_cacciopolli_condition(int n, double R, double alpha, double beta) {
  if (alpha <= 0) throw std::invalid_argument("cacciopolli condition: alpha must be positive");
  CacciopolliCondition c;
  c.lhs = R * R / 4.0 * (beta / alpha);
  c.rhs = geom::shell_volume_ratio(n);
  c.holds = c.lhs <= c.rhs;
  c.threshold_R = 2.0 * std::sqrt(c.rhs * alpha / beta);
  return c;
}

ReportSet stochastic_cacciopolli(const StochasticCacciopolliParams& p) {
  const double alpha = p.kernel.alpha;
  const double beta_c = grf::grad_variance_component(p.kernel);
  const auto cond = stochastic_cacciopolli_condition(p.dim, p.R, alpha, p.dim * beta_c);

  ReportSet rep;
  rep.id = "lem_3_15";
  rep.add(MomentReport::exact_row("condition_R=" + std::to_string(p.R), cond.holds ? 1.0 : 0.0,
                                  cond.holds ? 1.0 : 0.0, 0.5));
  rep.add(MomentReport::info_row("condition_lhs", cond.lhs));
  rep.add(MomentReport::info_row("condition_rhs", cond.rhs));
  rep.add(MomentReport::info_row("threshold_radius", cond.threshold_R));

  const Domain inner = Domain::ball(p.dim, p.R);
  const Domain annulus = Domain::shell(p.dim, p.R, 2.0 * p.R);
  const DomainGrid inner_grid = geom::build_grid(inner, geom::MeasureKind::Volume, p.resolution);
  const DomainGrid shell_grid =
      geom::build_grid(annulus, geom::MeasureKind::Volume, 2 * p.resolution);

  std::vector<Vec> inner_pts(static_cast<std::size_t>(inner_grid.size()));
  for (int q = 0; q < inner_grid.size(); ++q) inner_pts[static_cast<std::size_t>(q)] = inner_grid.point(q);
  grf::GradientFieldSampler gs(p.kernel, inner_pts, p.dim, /*with_field=*/false);
  auto shell_ptr = std::make_shared<DomainGrid>(shell_grid);
  grf::FieldSampler fsh(p.kernel, shell_ptr);

  std::vector<Vec> base_grad(inner_pts.size());
  for (std::size_t q = 0; q < inner_pts.size(); ++q) base_grad[q] = harmonic::grad(p.base, inner_pts[q]);
  Eigen::VectorXd base_shell(shell_grid.size());
  for (int q = 0; q < shell_grid.size(); ++q) base_shell[q] = harmonic::eval(p.base, shell_grid.point(q));

  double det_lhs = 0.0;
  for (int q = 0; q < inner_grid.size(); ++q) {
    double sq = 0.0;
    for (int c = 0; c < p.dim; ++c) sq += base_grad[static_cast<std::size_t>(q)][c] * base_grad[static_cast<std::size_t>(q)][c];
    det_lhs += sq * inner_grid.weights[q];
  }
  const double closed_lhs =
      det_lhs + p.lambda * p.lambda * p.dim * beta_c * inner_grid.weight_sum();
  const double closed_rhs =
      4.0 / (p.R * p.R) *
      (base_shell.cwiseAbs2().dot(shell_grid.weights) +
       p.lambda * p.lambda * alpha * shell_grid.weight_sum());
  rep.add(MomentReport::info_row("closed_lhs", closed_lhs));
  rep.add(MomentReport::info_row("closed_rhs", closed_rhs));
  rep.add(MomentReport::exact_row("closed_inequality_holds", 1.0,
                                  closed_lhs <= closed_rhs ? 1.0 : 0.0, 0.5));

  for (int s = 0; s < p.n_seeds; ++s) {
    const std::uint64_t seed_s = Rng::mix(p.seed, 0xACC0ull + static_cast<std::uint64_t>(s));
    std::vector<double> lhs_vals(static_cast<std::size_t>(p.n_samples)),
        rhs_vals(static_cast<std::size_t>(p.n_samples));
    mc_map(p.n_samples, [&](std::uint64_t i) {
      const Eigen::VectorXd draw = gs.sample(seed_s, i);
      double lhs = 0.0;
      for (int q = 0; q < inner_grid.size(); ++q) {
        const Vec g = gs.gradient_at(draw, q);
        double sq = 0.0;
        for (int c = 0; c < p.dim; ++c) {
          const double v = base_grad[static_cast<std::size_t>(q)][c] + p.lambda * g[c];
          sq += v * v;
        }
        lhs += sq * inner_grid.weights[q];
      }
      lhs_vals[i] = lhs;
      const Eigen::VectorXd field = fsh.transform(fsh.standard_normals(seed_s ^ 0x5EEDull, i));
      double rhs = 0.0;
      for (int q = 0; q < shell_grid.size(); ++q) {
        const double v = base_shell[q] + p.lambda * field[q];
        rhs += v * v * shell_grid.weights[q];
      }
      rhs_vals[i] = 4.0 / (p.R * p.R) * rhs;
      return 0.0;
    });
    const McStats ml = batch_means(lhs_vals), mr = batch_means(rhs_vals);
    rep.add(MomentReport::exact_row("mc_inequality_seed" + std::to_string(s),
                                    cond.holds ? 1.0 : 0.0, ml.mean <= mr.mean ? 1.0 : 0.0, 0.5));
  }
  return rep;
}

// ------------------------------------------------------ turbulence ----

ReportSet turbulent_flow_stats(const TurbulenceParams& p) {
  if (p.kernel.kind != grf::KernelKind::GaussianCorr)
    throw std::invalid_argument("turbulence: gradient sampling requires a GaussianCorr kernel");
  const int dim = p.base.dim;
  const Vec y_far = p.x + 10.0 * p.kernel.xi * Vec(0, 0, 1);
  grf::GradientFieldSampler gs(p.kernel, {p.x, p.y, y_far}, dim, /*with_field=*/false);

  const Vec ux = harmonic::grad(p.base, p.x);
  const Vec uy = harmonic::grad(p.base, p.y);
  const Vec ufar = harmonic::grad(p.base, y_far);
  const double beta_c = grf::grad_variance_component(p.kernel);

  std::vector<double> vol(static_cast<std::size_t>(p.n_samples)),
      cov_zz(static_cast<std::size_t>(p.n_samples)), cov_far(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd d = gs.sample(p.seed, i);
    const Vec gx = gs.gradient_at(d, 0), gy = gs.gradient_at(d, 1), gf = gs.gradient_at(d, 2);
    double v = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double u = ux[c] + p.lambda * gx[c];
      v += u * u;
    }
    vol[i] = v;
    const int zc = dim - 1;
    cov_zz[i] = (ux[zc] + p.lambda * gx[zc]) * (uy[zc] + p.lambda * gy[zc]);
    cov_far[i] = (ux[zc] + p.lambda * gx[zc]) * (ufar[zc] + p.lambda * gf[zc]);
    return 0.0;
  });

  ReportSet rep;
  rep.id = "prop_3_16";
  double u2 = 0.0;
  for (int c = 0; c < dim; ++c) u2 += ux[c] * ux[c];
  const McStats mv = batch_means(vol);
  const double vol_oracle = u2 + p.lambda * p.lambda * dim * beta_c;
  const double vol_paper = u2 + p.lambda;  // the statement's "+ lambda delta_ij"
  rep.add(MomentReport::oracle_row("velocity_volatility", vol_paper, vol_oracle, mv.mean,
                                   mv.stderr_, p.n_samples));

  const int zc = dim - 1;
  const McStats mc_zz = batch_means(cov_zz);
  const double cov_oracle =
      ux[zc] * uy[zc] + p.lambda * p.lambda * grf::cov_grad_grad(p.kernel, zc, zc, p.x, p.y);
  rep.add(MomentReport::oracle_row("velocity_covariance_zz", cov_oracle, cov_oracle, mc_zz.mean,
                                   mc_zz.stderr_, p.n_samples));

  const McStats mc_far = batch_means(cov_far);
  rep.add(MomentReport::oracle_row("decorrelation_at_10xi", ux[zc] * ufar[zc], ux[zc] * ufar[zc],
                                   mc_far.mean, mc_far.stderr_, p.n_samples));

  // averaged Laplacian of the perturbed potential through a finite-difference
  // stencil of sampled field values
  {
    const double h = 0.25 * p.kernel.xi;
    std::vector<Vec> stencil = {p.x};
    for (int c = 0; c < dim; ++c) {
      Vec xp = p.x, xm = p.x;
      xp[c] += h;
      xm[c] -= h;
      stencil.push_back(xp);
      stencil.push_back(xm);
    }
    grf::FieldSampler fs(p.kernel, points_grid(stencil));
    const double base_lap = harmonic::laplacian(p.base, p.x, h);
    std::vector<double> lap(static_cast<std::size_t>(p.n_samples));
    mc_map(p.n_samples, [&](std::uint64_t i) {
      const Eigen::VectorXd f = fs.transform(fs.standard_normals(p.seed ^ 0x11ull, i));
      double acc = 0.0;
      for (int c = 0; c < dim; ++c) acc += (f[1 + 2 * c] - 2.0 * f[0] + f[2 + 2 * c]) / (h * h);
      lap[i] = base_lap + p.lambda * acc;
      return 0.0;
    });
    const McStats mlap = batch_means(lap);
    rep.add(MomentReport::oracle_row("averaged_laplacian", 0.0, base_lap, mlap.mean, mlap.stderr_,
                                     p.n_samples));
  }

  // Kelvin energy over a small ball in the flow region
  {
    const Domain d = Domain::ball(dim, 0.4, p.x);
    const DomainGrid grid = geom::build_grid(d, geom::MeasureKind::Volume, 8);
    std::vector<Vec> pts(static_cast<std::size_t>(grid.size()));
    for (int q = 0; q < grid.size(); ++q) pts[static_cast<std::size_t>(q)] = grid.point(q);
    grf::GradientFieldSampler gker(p.kernel, pts, dim, false);
    std::vector<Vec> bg(pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q) bg[q] = harmonic::grad(p.base, pts[q]);
    const long nk = std::min<long>(p.n_samples, 4000);
    std::vector<double> kel(static_cast<std::size_t>(nk));
    mc_map(nk, [&](std::uint64_t i) {
      const Eigen::VectorXd draw = gker.sample(p.seed ^ 0x22ull, i);
      double acc = 0.0;
      for (int q = 0; q < grid.size(); ++q) {
        const Vec g = gker.gradient_at(draw, q);
        double sq = 0.0;
        for (int c = 0; c < dim; ++c) {
          const double u = bg[static_cast<std::size_t>(q)][c] + p.lambda * g[c];
          sq += u * u;
        }
        acc += 0.5 * p.fluid_density * sq * grid.weights[q];
      }
      kel[i] = acc;
      return 0.0;
    });
    double det_energy = 0.0;
    for (int q = 0; q < grid.size(); ++q) {
      double sq = 0.0;
      for (int c = 0; c < dim; ++c) sq += bg[static_cast<std::size_t>(q)][c] * bg[static_cast<std::size_t>(q)][c];
      det_energy += 0.5 * p.fluid_density * sq * grid.weights[q];
    }
    const McStats mk = batch_means(kel);
    const double kel_oracle = det_energy + 0.5 * p.fluid_density * p.lambda * p.lambda * dim *
                                               beta_c * grid.weight_sum();
    const double kel_paper = det_energy + 0.5 * p.lambda * p.fluid_density * grid.weight_sum();
    rep.add(MomentReport::oracle_row("kelvin_energy", kel_paper, kel_oracle, mk.mean, mk.stderr_,
                                     nk));
  }

  // cylinder boundary: axial-axial derivative covariance reduces to the axial
  // factor alone since the radial factor is 1 at r = r' = R
  {
    const auto radial = grf::SeparableFactor::gaussian(0.4);
    const auto axial = grf::SeparableFactor::gaussian(0.6);
    const CovKernel cyl =
        CovKernel::separable(grf::Frame::Cylindrical, radial, axial, radial, 1.0);
    const Vec pa(p.cyl_radius, p.cyl_z0, 0.0), pb(p.cyl_radius, p.cyl_z1, 0.0);
    const grf::DerivCovSpec dd{grf::Frame::Cylindrical, grf::DerivSelector::Axial,
                               grf::DerivSelector::Axial};
    const double full = grf::separable_derivative_covariance(cyl, dd, pa, pb);
    const double axial_only = cyl.lambda * axial.d_left_right(p.cyl_z0, p.cyl_z1);
    Eigen::MatrixXd cov(2, 2);
    cov(0, 0) = grf::separable_derivative_covariance(cyl, dd, pa, pa);
    cov(1, 1) = grf::separable_derivative_covariance(cyl, dd, pb, pb);
    cov(0, 1) = cov(1, 0) = full;
    const Eigen::MatrixXd L = grf::cholesky_with_jitter(cov, cyl.lambda);
    std::vector<double> prod(static_cast<std::size_t>(p.n_samples));
    mc_map(p.n_samples, [&](std::uint64_t i) {
      Rng rng = Rng::for_sample(p.seed ^ 0x33ull, i);
      Eigen::Vector2d z(rng.normal(), rng.normal());
      const Eigen::Vector2d v = L * z;
      prod[i] = v[0] * v[1];
      return 0.0;
    });
    const McStats mp = batch_means(prod);
    rep.add(MomentReport::oracle_row("cylinder_boundary_zz_covariance", axial_only, full, mp.mean,
                                     mp.stderr_, p.n_samples));
    rep.add(MomentReport::exact_row("cylinder_radial_factor_drops_out", axial_only, full,
                                    1e-12 * std::abs(axial_only) + 1e-15));
  }
  return rep;
}

// ------------------------------------------------- Riesz moments ----

ReportSet stochastic_riesz_moments(const StochasticRieszParams& p) {
  const auto& spec = p.spec;
  if (!spec.grid) throw std::invalid_argument("stochastic riesz: spec needs a grid");
  const DomainGrid& g = *spec.grid;
  const double expo = spec.n - spec.a;

  const double det_x = potentials::riesz_potential(spec, p.x);
  const double det_x2 = potentials::riesz_potential(spec, p.x2);

  Eigen::VectorXd ux(g.size()), ux2(g.size());
  double kernel_mass_x = 0.0;
  for (int q = 0; q < g.size(); ++q) {
    const double dx = (p.x - g.point(q)).norm();
    const double dx2 = (p.x2 - g.point(q)).norm();
    ux[q] = spec.gamma * g.weights[q] / std::pow(dx, expo);
    ux2[q] = spec.gamma * g.weights[q] / std::pow(dx2, expo);
    kernel_mass_x += ux[q];
  }

  auto grid_ptr = spec.grid;
  FunctionalSampler fs(p.kernel, std::const_pointer_cast<const DomainGrid>(grid_ptr), {ux, ux2});

  std::vector<double> s1(static_cast<std::size_t>(p.n_samples)),
      s2(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd d = fs.draw(p.seed, i);
    s1[i] = det_x + p.lambda * d[0];
    s2[i] = det_x2 + p.lambda * d[1];
    return 0.0;
  });

  const double var_x = quadratic_form(fs.covariance(), ux);
  const double cov_xx2 = quadratic_form(fs.covariance(), ux, ux2);

  ReportSet rep;
  rep.id = "prop_3_19";
  const McStats m1 = batch_means(s1);
  rep.add(MomentReport::oracle_row("mean_potential", det_x, det_x, m1.mean, m1.stderr_,
                                   p.n_samples));

  std::vector<double> prod(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) prod[i] = s1[i] * s2[i];
  const McStats mc = batch_means(prod);
  const double cov_oracle = det_x * det_x2 + p.lambda * p.lambda * cov_xx2;
  rep.add(MomentReport::oracle_row("two_point_covariance", cov_oracle, cov_oracle, mc.mean,
                                   mc.stderr_, p.n_samples));

  std::vector<double> s1sq(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) s1sq[i] = s1[i] * s1[i];
  const McStats mv = batch_means(s1sq);
  const double vol_oracle = det_x * det_x + p.lambda * p.lambda * var_x;
  rep.add(MomentReport::oracle_row("volatility", vol_oracle, vol_oracle, mv.mean, mv.stderr_,
                                   p.n_samples));

  std::vector<double> sP(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) sP[i] = std::pow(std::abs(s1[i]), p.P);
  const McStats mP = batch_means(sP);
  const double mom_oracle = binomial_moment(det_x, p.lambda, var_x, p.P, MomentConvention::Gaussian);
  // the paper's bound structure: base |F_a g| with noise scale gamma(a) * the
  // kernel mass integral and the even-moment convention
  double mom_paper = 0.0;
  for (int Q = 0; Q <= p.P; ++Q)
    mom_paper += binom(p.P, Q) * std::pow(std::abs(det_x), p.P - Q) *
                 std::pow(p.lambda * kernel_mass_x, Q) * grf::paper_moment(p.kernel.alpha, Q);
  rep.add(MomentReport::oracle_row("moment_P" + std::to_string(p.P), mom_paper, mom_oracle,
                                   mP.mean, mP.stderr_, p.n_samples));
  if (p.P == 4) {
    const double m4_paper = binomial_moment(det_x, p.lambda, var_x, 4, MomentConvention::Paper);
    rep.add(MomentReport::paper_note("moment4_paper_convention", m4_paper, mom_oracle, mP.mean,
                                     mP.stderr_, p.n_samples));
  }
  return rep;
}

// -------------------------------------------- noisy-density Newton ----

ReportSet noisy_density_newton(const NoisyNewtonParams& p) {
  const Domain ball = Domain::ball(3, p.R);
  auto grid = std::make_shared<DomainGrid>(
      geom::build_grid(ball, geom::MeasureKind::Volume, p.resolution));
  const int n = grid->size();

  // potential functional (C/4pi normalization) at x and x2, and the force
  // noise functionals (raw-integral normalization, as pinned by the closed
  // gradient) at x
  Eigen::VectorXd upot(n), upot2(n), ufz(n), ufx(n);
  for (int q = 0; q < n; ++q) {
    const Vec y = grid->point(q);
    const double dx = (p.x - y).norm(), dx2 = (p.x2 - y).norm();
    upot[q] = p.C / (4.0 * kPi) * grid->weights[q] / dx;
    upot2[q] = p.C / (4.0 * kPi) * grid->weights[q] / dx2;
    // d/dx_i of 1/|x-y| = -(x-y)_i / |x-y|^3
    const Vec dvec = p.x - y;
    ufz[q] = -p.mass * p.C * grid->weights[q] * (-dvec.z() / std::pow(dx, 3));
    ufx[q] = -p.mass * p.C * grid->weights[q] * (-dvec.x() / std::pow(dx, 3));
  }

  FunctionalSampler fs(p.kernel, std::const_pointer_cast<const DomainGrid>(
                                     std::shared_ptr<const DomainGrid>(grid)),
                       {upot, upot2, ufz, ufx});

  const double det_pot = p.rho * upot.sum();
  const double det_pot2 = p.rho * upot2.sum();
  const Vec grad_raw = potentials::ball_newton_gradient_closed(p.R, p.x);
  const Vec det_force = -p.mass * p.C * p.rho * grad_raw;

  std::vector<double> spot(static_cast<std::size_t>(p.n_samples)),
      spot2(static_cast<std::size_t>(p.n_samples)), sfz(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd d = fs.draw(p.seed, i);
    spot[i] = det_pot + p.lambda * d[0];
    spot2[i] = det_pot2 + p.lambda * d[1];
    sfz[i] = det_force.z() + p.lambda * d[2];
    return 0.0;
  });

  ReportSet rep;
  rep.id = "thm_3_21";
  const double closed_static = potentials::ball_newton_closed(p.R, p.x.norm(), p.C, p.rho);
  const McStats mp = batch_means(spot);
  rep.add(MomentReport::oracle_row("mean_potential", closed_static, det_pot, mp.mean, mp.stderr_,
                                   p.n_samples));
  rep.add(MomentReport::exact_row("grid_potential_vs_closed", closed_static, det_pot,
                                  0.01 * std::abs(closed_static)));

  const double var_x = quadratic_form(fs.covariance(), upot);
  const double var_x2 = quadratic_form(fs.covariance(), upot2);
  std::vector<double> sq(spot.size());
  for (std::size_t i = 0; i < spot.size(); ++i) sq[i] = spot[i] * spot[i];
  const McStats mv = batch_means(sq);
  const double vol_oracle = det_pot * det_pot + p.lambda * p.lambda * var_x;
  rep.add(MomentReport::oracle_row("potential_volatility", vol_oracle, vol_oracle, mv.mean,
                                   mv.stderr_, p.n_samples));

  // P-th moment with the paper's R^3/|x|^3 decay claim reported alongside
  std::vector<double> sP(spot.size());
  for (std::size_t i = 0; i < spot.size(); ++i) sP[i] = std::pow(std::abs(spot[i]), p.P);
  const McStats mP = batch_means(sP);
  const double mom_oracle =
      binomial_moment(det_pot, p.lambda, var_x, p.P, MomentConvention::Gaussian);
  rep.add(MomentReport::oracle_row("moment_P" + std::to_string(p.P), mom_oracle, mom_oracle,
                                   mP.mean, mP.stderr_, p.n_samples));

  // noise-variance decay ratio between |x| and |x2|
  std::vector<double> nsq(spot.size()), nsq2(spot.size());
  for (std::size_t i = 0; i < spot.size(); ++i) {
    nsq[i] = (spot[i] - det_pot) * (spot[i] - det_pot);
    nsq2[i] = (spot2[i] - det_pot2) * (spot2[i] - det_pot2);
  }
  const McStats mn = batch_means(nsq), mn2 = batch_means(nsq2);
  const double ratio_oracle = var_x / var_x2;
  const double ratio_mc = mn.mean / mn2.mean;
  const double ratio_se = ratio_mc * (mn.stderr_ / mn.mean + mn2.stderr_ / mn2.mean);
  const double ratio_paper = std::pow(p.x2.norm() / p.x.norm(), 3);  // the R^3/|x|^3 claim
  rep.add(MomentReport::oracle_row("noise_variance_decay_ratio", ratio_paper, ratio_oracle,
                                   ratio_mc, ratio_se, p.n_samples));
  rep.add(MomentReport::paper_note("decay_ratio_paper_cubic", ratio_paper, ratio_oracle, ratio_mc,
                                   ratio_se, p.n_samples));

  // forces on a point mass
  const McStats mfz = batch_means(sfz);
  rep.add(MomentReport::oracle_row("force_mean_z", det_force.z(), det_force.z(), mfz.mean,
                                   mfz.stderr_, p.n_samples));
  rep.add(MomentReport::info_row("force_mean_magnitude", det_force.norm()));

  std::vector<double> fz_sq(sfz.size());
  for (std::size_t i = 0; i < sfz.size(); ++i)
    fz_sq[i] = (sfz[i] - det_force.z()) * (sfz[i] - det_force.z());
  const McStats mfv = batch_means(fz_sq);
  const double force_var_oracle = p.lambda * p.lambda * quadratic_form(fs.covariance(), ufz);
  rep.add(MomentReport::oracle_row("force_noise_variance_z", force_var_oracle, force_var_oracle,
                                   mfv.mean, mfv.stderr_, p.n_samples));

  // Laplacian moments: Lap psi_bar = -C (rho + lambda IF(x)) under the fixed
  // sign convention, so the moments are scalar-Gaussian binomials
  {
    std::vector<double> lap(static_cast<std::size_t>(p.n_samples));
    const double sd = std::sqrt(p.kernel.alpha);
    mc_map(p.n_samples, [&](std::uint64_t i) {
      Rng rng = Rng::for_sample(p.seed ^ 0x44ull, i);
      lap[i] = -p.C * (p.rho + p.lambda * sd * rng.normal());
      return 0.0;
    });
    const McStats mlap = batch_means(lap);
    rep.add(MomentReport::oracle_row("laplacian_mean", -p.C * p.rho, -p.C * p.rho, mlap.mean,
                                     mlap.stderr_, p.n_samples));
    std::vector<double> lap2(lap.size());
    for (std::size_t i = 0; i < lap.size(); ++i) lap2[i] = lap[i] * lap[i];
    const McStats mlap2 = batch_means(lap2);
    const double lap_vol = p.C * p.rho * p.C * p.rho +
                           p.C * p.C * p.lambda * p.lambda * p.kernel.alpha;
    rep.add(MomentReport::oracle_row("laplacian_volatility", lap_vol, lap_vol, mlap2.mean,
                                     mlap2.stderr_, p.n_samples));
  }
  return rep;
}

// ---------------------------------------------------- Harnack ----

HarnackSums stochastic_harnack_sums(double psi0, double psi_x, double factor_lower,
                                    double factor_upper, double lambda, double alpha, int P,
                                    MomentConvention conv) {
  HarnackSums s;
  for (int Q = 0; Q <= P; ++Q) {
    const double m = moment(alpha, Q, conv);
    s.lower += binom(P, Q) * std::pow(std::abs(factor_lower * psi0), P - Q) *
               std::pow(std::abs(lambda * factor_lower), Q) * m;
    s.middle += binom(P, Q) * std::pow(std::abs(psi_x), P - Q) * std::pow(lambda, Q) * m;
    s.upper += binom(P, Q) * std::pow(std::abs(factor_upper * psi0), P - Q) *
               std::pow(std::abs(lambda * factor_upper), Q) * m;
  }
  return s;
}

ReportSet stochastic_harnack(const StochasticHarnackParams& p) {
  const Vec x_d(0, 0, p.d);
  const double psi0 = harmonic::eval(p.base, Vec::Zero());
  const double psi_x = harmonic::eval(p.base, x_d);
  if (psi0 < 0) throw std::invalid_argument("stochastic harnack: base must be non-negative");
  const auto hb = harmonic::harnack_bounds(psi0, p.R, p.d, p.n);

  const auto paper = stochastic_harnack_sums(psi0, psi_x, hb.factor_lower, hb.factor_upper,
                                             p.lambda, p.kernel.alpha, p.P,
                                             MomentConvention::Paper);
  const auto gauss = stochastic_harnack_sums(psi0, psi_x, hb.factor_lower, hb.factor_upper,
                                             p.lambda, p.kernel.alpha, p.P,
                                             MomentConvention::Gaussian);

  // joint field at the centre and at x
  grf::FieldSampler fs(p.kernel, points_grid({Vec::Zero(), x_d}));
  std::vector<double> m0(static_cast<std::size_t>(p.n_samples)),
      mx(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd f = fs.transform(fs.standard_normals(p.seed, i));
    m0[i] = std::pow(std::abs(psi0 + p.lambda * f[0]), p.P);
    mx[i] = std::pow(std::abs(psi_x + p.lambda * f[1]), p.P);
    return 0.0;
  });
  const McStats s0 = batch_means(m0), sx = batch_means(mx);
  const double xP = std::pow(hb.factor_lower, p.P), yP = std::pow(hb.factor_upper, p.P);

  ReportSet rep;
  rep.id = "lem_3_24";
  rep.add(MomentReport::info_row("factor_lower", hb.factor_lower));
  rep.add(MomentReport::info_row("factor_upper", hb.factor_upper));
  rep.add(MomentReport::exact_row("paper_sums_ordered", 1.0,
                                  paper.lower <= paper.middle && paper.middle <= paper.upper
                                      ? 1.0
                                      : 0.0,
                                  0.5));
  rep.add(MomentReport::exact_row("gaussian_sums_ordered", 1.0,
                                  gauss.lower <= gauss.middle && gauss.middle <= gauss.upper
                                      ? 1.0
                                      : 0.0,
                                  0.5));
  if (p.P % 2 == 0)
    rep.add(MomentReport::oracle_row("middle_moment", paper.middle, gauss.middle, sx.mean,
                                     sx.stderr_, p.n_samples));
  else
    rep.add(MomentReport::info_row("middle_moment_mc", sx.mean));

  const double slack = 3.0 * (s0.stderr_ * std::max(xP, yP) + sx.stderr_);
  rep.add(MomentReport::exact_row("mc_ordering_lower", 1.0,
                                  xP * s0.mean <= sx.mean + slack ? 1.0 : 0.0, 0.5));
  rep.add(MomentReport::exact_row("mc_ordering_upper", 1.0,
                                  sx.mean <= yP * s0.mean + slack ? 1.0 : 0.0, 0.5));
  return rep;
}

// ---------------------------------------------------- Bochner ----

ReportSet stochastic_bochner(const StochasticBochnerParams& p) {
  double xi_c;
  if (p.kernel.kind == grf::KernelKind::GaussianCorr)
    xi_c = grf::hessian_constant(p.kernel, p.n);
  else
    throw std::invalid_argument(
        "stochastic bochner: the Hessian constant is analytic only for GaussianCorr kernels; "
        "supply one");

  const double det = harmonic::half_laplacian_grad_sq(p.base, p.x);
  const double shifted = det + p.lambda * p.lambda * p.n * xi_c;

  // FD Hessians of sampled fields on a compact stencil estimate the Hessian
  // constant independently
  const double h = p.fd_step_factor * p.kernel.xi;
  std::vector<Vec> stencil;
  const int dim = p.n;
  std::vector<std::pair<int, int>> offsets;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) offsets.emplace_back(a, b);
  for (auto [a, b] : offsets) {
    Vec q = p.x;
    q[0] += a * h;
    q[1] += b * h;
    stencil.push_back(q);
  }
  if (dim != 2)
    throw std::invalid_argument("stochastic bochner: the MC Hessian check is implemented in 2-d");
  grf::FieldSampler fs(p.kernel, points_grid(stencil));
  auto idx = [](int a, int b) { return (a + 1) * 3 + (b + 1); };

  std::vector<double> xis(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd f = fs.transform(fs.standard_normals(p.seed, i));
    const double f0 = f[idx(0, 0)];
    const double h11 = (f[idx(1, 0)] - 2 * f0 + f[idx(-1, 0)]) / (h * h);
    const double h22 = (f[idx(0, 1)] - 2 * f0 + f[idx(0, -1)]) / (h * h);
    const double h12 =
        (f[idx(1, 1)] - f[idx(1, -1)] - f[idx(-1, 1)] + f[idx(-1, -1)]) / (4.0 * h * h);
    xis[i] = (h11 * h11 + 2.0 * h12 * h12 + h22 * h22) / dim;
    return 0.0;
  });
  const McStats mxi = batch_means(xis);

  ReportSet rep;
  rep.id = "sec_3_11";
  rep.add(MomentReport::info_row("deterministic_half_lap_grad_sq", det));
  rep.add(MomentReport::info_row("analytic_hessian_constant", xi_c));
  rep.add(MomentReport::info_row("shifted_value", shifted));
  rep.add(MomentReport::oracle_row("mc_hessian_constant", xi_c, xi_c, mxi.mean, mxi.stderr_,
                                   p.n_samples));
  const double theta = grf::third_derivative_constant(p.kernel, p.n);
  rep.add(MomentReport::info_row("analytic_third_derivative_constant", theta));
  return rep;
}

// -------------------------------------------- noisy boundary: ball ----

double ball_paper_log_integral(double R, double a) {
  if (a < 0) throw std::domain_error("paper log integral needs a >= 0");
  // the a -> 0 limit of (2 pi / a) log((R-a)/(R+a)) is finite
  if (a < 1e-12 * R) return -4.0 * kPi / R;
  return 2.0 * kPi / a * (std::log(std::abs(R - a)) - std::log(std::abs(R + a)));
}

double ball_surface_integral_closed(double R, double a) {
  if (a >= R) throw std::domain_error("surface integral closed form needs a < R");
  return 4.0 * kPi * R / (R * R - a * a);
}

ReportSet noisy_boundary_ball(const NoisyBoundaryBallParams& p) {
  const Domain ball = Domain::ball(3, p.R);
  auto surf = std::make_shared<DomainGrid>(
      geom::build_grid(ball, geom::MeasureKind::Surface, p.resolution));
  const int n = surf->size();
  const CovKernel kernel = CovKernel::exponential(p.alpha, p.eta);  // chordal distance

  ReportSet rep;
  rep.id = "sec_3_12";

  std::vector<Eigen::VectorXd> weights;
  std::vector<double> det_vals;
  for (double aR : p.a_over_R) {
    const double a = aR * p.R;
    const Vec x(0, 0, a);
    Eigen::VectorXd w(n);
    for (int q = 0; q < n; ++q)
      w[q] = (p.R * p.R - a * a) / (4.0 * kPi * p.R) * surf->weights[q] /
             std::pow((x - surf->point(q)).norm(), 3);
    weights.push_back(w);
    double det = 0.0;
    for (int q = 0; q < n; ++q) det += w[q] * p.g.g(surf->point(q));
    det_vals.push_back(det);
  }

  FunctionalSampler fs(kernel, std::const_pointer_cast<const DomainGrid>(
                                   std::shared_ptr<const DomainGrid>(surf)),
                       weights);

  std::vector<std::vector<double>> stats(p.a_over_R.size());
  for (auto& s : stats) s.resize(static_cast<std::size_t>(p.n_samples));
  mc_map(p.n_samples, [&](std::uint64_t i) {
    const Eigen::VectorXd d = fs.draw(p.seed, i);
    for (std::size_t k = 0; k < stats.size(); ++k)
      stats[k][i] = det_vals[k] + p.lambda * d[static_cast<int>(k)];
    return 0.0;
  });

  std::vector<double> noise_vars_mc, noise_vars_oracle;
  for (std::size_t k = 0; k < p.a_over_R.size(); ++k) {
    const double a = p.a_over_R[k] * p.R;
    const McStats mean = batch_means(stats[k]);
    rep.add(MomentReport::oracle_row("mean_a=" + std::to_string(a), det_vals[k], det_vals[k],
                                     mean.mean, mean.stderr_, p.n_samples));
    std::vector<double> sq(stats[k].size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = stats[k][i] * stats[k][i];
    const McStats vol = batch_means(sq);
    const double noise_var = quadratic_form(fs.covariance(), weights[k]);
    const double vol_oracle = det_vals[k] * det_vals[k] + p.lambda * p.lambda * noise_var;
    // the paper's log closed-form noise factor for the same statistic
    const double paper_factor = (p.R * p.R - a * a) / (4.0 * kPi * p.R) *
                                ball_paper_log_integral(p.R, a);
    const double vol_paper = det_vals[k] * det_vals[k] +
                             p.lambda * p.lambda * p.alpha * paper_factor * paper_factor;
    rep.add(MomentReport::oracle_row("volatility_a=" + std::to_string(a), vol_paper, vol_oracle,
                                     vol.mean, vol.stderr_, p.n_samples));
    rep.add(MomentReport::paper_note("volatility_paper_log_form_a=" + std::to_string(a), vol_paper,
                                     vol_oracle, vol.mean, vol.stderr_, p.n_samples));
    noise_vars_mc.push_back(vol.mean - det_vals[k] * det_vals[k]);
    noise_vars_oracle.push_back(p.lambda * p.lambda * noise_var);

    if (p.P != 2) {
      std::vector<double> sP(stats[k].size());
      for (std::size_t i = 0; i < sP.size(); ++i) sP[i] = std::pow(std::abs(stats[k][i]), p.P);
      const McStats mP = batch_means(sP);
      const double mom_oracle =
          binomial_moment(det_vals[k], p.lambda, noise_var, p.P, MomentConvention::Gaussian);
      double mom_paper = 0.0;
      for (int Q = 0; Q <= p.P; ++Q)
        mom_paper += binom(p.P, Q) * std::pow(std::abs(det_vals[k]), p.P - Q) *
                     std::pow(std::abs(p.lambda * paper_factor), Q) *
                     grf::paper_moment(p.alpha, Q);
      rep.add(MomentReport::oracle_row(
          "moment_P" + std::to_string(p.P) + "_a=" + std::to_string(a), mom_paper, mom_oracle,
          mP.mean, mP.stderr_, p.n_samples));
    }

    // the surface integral itself: quadrature vs the exact closed form; the
    // integrand concentrates near the pole as a -> R, so the hard tolerance
    // applies away from the boundary only
    double surf_int = 0.0;
    const Vec x(0, 0, a);
    for (int q = 0; q < n; ++q)
      surf_int += surf->weights[q] / std::pow((x - surf->point(q)).norm(), 3);
    const double closed = ball_surface_integral_closed(p.R, a);
    MomentReport row = MomentReport::exact_row("surface_integral_a=" + std::to_string(a), closed,
                                               surf_int, 0.02 * closed);
    row.paper_value = ball_paper_log_integral(p.R, a);
    if (a > 0.6 * p.R && row.verdict == "fail") row.verdict = "note:quadrature-limited";
    rep.add(row);
  }

  // the decay claim: volatility should fall as a -> R per the statement; the
  // quadrature oracle says the opposite, so this row asserts the paper's
  // claim against MC and records the outcome
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < noise_vars_mc.size(); ++k)
    if (noise_vars_mc[k] <= noise_vars_mc[k + 1]) decreasing = false;
  MomentReport mono = MomentReport::exact_row("noise_volatility_decreasing_toward_boundary", 1.0,
                                              decreasing ? 1.0 : 0.0, 0.5);
  mono.provenance = "paper";
  mono.verdict = decreasing ? "note:paper-agrees" : "note:paper-disagrees";
  rep.add(mono);
  for (std::size_t k = 0; k < noise_vars_oracle.size(); ++k)
    rep.add(MomentReport::info_row("noise_variance_oracle_a=" + std::to_string(p.a_over_R[k] * p.R),
                                   noise_vars_oracle[k]));
  return rep;
}

// -------------------------------------------- noisy boundary: disc ----

double disc_paper_arctan_factor(double R, double r, double theta) {
  const double t1 = std::atan(std::abs(R + r) * std::tan(-0.5 * theta) / std::abs(R - r));
  const double t2 = std::atan(std::abs(R + r) * std::tan(kPi - 0.5 * theta) / std::abs(R - r));
  return (t1 - t2) / (2.0 * kPi);
}

Eigen::MatrixXd circle_noise_covariance(int n_nodes, double R, double alpha, double eta,
                                        bool chordal) {
  Eigen::MatrixXd cov(n_nodes, n_nodes);
  const double dth = 2.0 * kPi / n_nodes;
  for (int i = 0; i < n_nodes; ++i)
    for (int j = 0; j <= i; ++j) {
      const double bi = (i + 0.5) * dth, bj = (j + 0.5) * dth;
      double d = std::abs(bi - bj);
      d = std::min(d, 2.0 * kPi - d);
      if (chordal) d = 2.0 * R * std::sin(0.5 * d);
      cov(i, j) = cov(j, i) = alpha * std::exp(-d / eta);
    }
  return cov;
}

ReportSet noisy_boundary_disc(const NoisyBoundaryDiscParams& p) {
  const int n = p.n_boundary;
  const double dth = 2.0 * kPi / n;
  const Eigen::MatrixXd cov = circle_noise_covariance(n, p.R, p.alpha, p.eta, p.chordal);
  const Eigen::MatrixXd L = grf::cholesky_with_jitter(cov, p.alpha);

  auto poisson_weights = [&](double r, double theta) {
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) {
      const double beta = (j + 0.5) * dth;
      w[j] = (p.R * p.R - r * r) /
             (p.R * p.R - 2.0 * r * p.R * std::cos(theta - beta) + r * r) * dth / (2.0 * kPi);
    }
    return w;
  };
  auto det_solution = [&](double r, double theta) {
    const Eigen::VectorXd w = poisson_weights(r, theta);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += w[j] * p.g.g((j + 0.5) * dth);
    return acc;
  };

  // evaluation functionals: the report point, plus 5-point Laplacian stencils
  // at a few interior points
  std::vector<Eigen::VectorXd> functionals;
  std::vector<double> det_parts;
  functionals.push_back(poisson_weights(p.r, p.theta));
  det_parts.push_back(det_solution(p.r, p.theta));

  std::vector<Vec> check_pts;
  for (int k = 0; k < p.n_interior_checks; ++k) {
    const double rr = 0.15 + 0.55 * k / std::max(1, p.n_interior_checks - 1);
    const double tt = 0.4 + 1.1 * k;
    check_pts.push_back(geom::polar_to_cartesian(rr, tt));
  }
  const double h = p.fd_step;
  for (const Vec& c : check_pts) {
    const Vec offs[5] = {c, c + Vec(h, 0, 0), c - Vec(h, 0, 0), c + Vec(0, h, 0), c - Vec(0, h, 0)};
    for (const Vec& q : offs) {
      double rr, tt;
      geom::cartesian_to_polar(q, rr, tt);
      functionals.push_back(poisson_weights(rr, tt));
      det_parts.push_back(det_solution(rr, tt));
    }
  }
  // centre-of-disc volatility functional
  functionals.push_back(poisson_weights(0.0, 0.0));
  det_parts.push_back(det_solution(0.0, 0.0));

  Eigen::MatrixXd V(n, static_cast<int>(functionals.size()));
  for (std::size_t j = 0; j < functionals.size(); ++j)
    V.col(static_cast<int>(j)) = L.transpose() * functionals[j];

  const long N = p.n_samples;
  std::vector<double> s_main(static_cast<std::size_t>(N)), s_center(static_cast<std::size_t>(N));
  std::vector<std::vector<double>> laps(check_pts.size());
  for (auto& v : laps) v.resize(static_cast<std::size_t>(N));
  mc_map(N, [&](std::uint64_t i) {
    Rng rng = Rng::for_sample(p.seed, i);
    Eigen::VectorXd z(n);
    for (int q = 0; q < n; ++q) z[q] = rng.normal();
    const Eigen::VectorXd f = V.transpose() * z;
    s_main[i] = det_parts[0] + p.lambda * f[0];
    for (std::size_t c = 0; c < check_pts.size(); ++c) {
      const int base = 1 + static_cast<int>(c) * 5;
      double vals[5];
      for (int q = 0; q < 5; ++q)
        vals[q] = det_parts[static_cast<std::size_t>(base + q)] + p.lambda * f[base + q];
      laps[c][i] = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / (h * h);
    }
    const int ci = static_cast<int>(functionals.size()) - 1;
    s_center[i] = det_parts[static_cast<std::size_t>(ci)] + p.lambda * f[ci];
    return 0.0;
  });

  ReportSet rep;
  rep.id = "sec_3_13";
  const McStats mm = batch_means(s_main);
  rep.add(MomentReport::oracle_row("mean", det_parts[0], det_parts[0], mm.mean, mm.stderr_, N));

  std::vector<double> sq(s_main.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s_main[i] * s_main[i];
  const McStats mv = batch_means(sq);
  const double noise_var = quadratic_form(cov, functionals[0]);
  const double vol_oracle = det_parts[0] * det_parts[0] + p.lambda * p.lambda * noise_var;
  // the paper's double quadrature carries a 1/(2 pi^2) normalization instead
  // of 1/(4 pi^2); reported as a note
  const double vol_paper_norm = det_parts[0] * det_parts[0] + p.lambda * p.lambda * 2.0 * noise_var;
  rep.add(MomentReport::oracle_row("volatility", vol_paper_norm, vol_oracle, mv.mean, mv.stderr_,
                                   N));
  rep.add(MomentReport::paper_note("volatility_paper_normalization", vol_paper_norm, vol_oracle,
                                   mv.mean, mv.stderr_, N));

  const double arctan = disc_paper_arctan_factor(p.R, p.r, p.theta);
  const double vol_arctan = det_parts[0] * det_parts[0] +
                            p.lambda * p.lambda * p.alpha * arctan * arctan;
  rep.add(MomentReport::paper_note("volatility_paper_arctan_form", vol_arctan, vol_oracle, mv.mean,
                                   mv.stderr_, N));

  for (std::size_t c = 0; c < check_pts.size(); ++c) {
    const McStats ml = batch_means(laps[c]);
    rep.add(MomentReport::oracle_row("mean_fd_laplacian_pt" + std::to_string(c), 0.0, 0.0, ml.mean,
                                     ml.stderr_, N));
  }

  // P-th moments and the odd/even structure
  std::vector<double> sP(s_main.size()), s3(s_main.size());
  for (std::size_t i = 0; i < sP.size(); ++i) {
    sP[i] = std::pow(std::abs(s_main[i]), p.P);
    const double cdev = s_main[i] - det_parts[0];
    s3[i] = cdev * cdev * cdev;
  }
  const McStats mP = batch_means(sP);
  const double mom_oracle =
      binomial_moment(det_parts[0], p.lambda, noise_var, p.P, MomentConvention::Gaussian);
  rep.add(MomentReport::oracle_row("moment_P" + std::to_string(p.P), mom_oracle, mom_oracle,
                                   mP.mean, mP.stderr_, N));
  const McStats m3 = batch_means(s3);
  rep.add(MomentReport::oracle_row("third_moment_centered", 0.0, 0.0, m3.mean, m3.stderr_, N));

  // centre-limit claim: the statement says the volatility vanishes at the
  // centre; the kernel average there is strictly positive
  std::vector<double> csq(s_center.size());
  const std::size_t ci = functionals.size() - 1;
  for (std::size_t i = 0; i < csq.size(); ++i) {
    const double dev = s_center[i] - det_parts[ci];
    csq[i] = dev * dev;
  }
  const McStats mc2 = batch_means(csq);
  const double center_var_oracle = p.lambda * p.lambda * quadratic_form(cov, functionals[ci]);
  rep.add(MomentReport::paper_note("centre_noise_variance_vanishes", 0.0, center_var_oracle,
                                   mc2.mean, mc2.stderr_, N));
  rep.add(MomentReport::oracle_row("centre_noise_variance", 0.0, center_var_oracle, mc2.mean,
                                   mc2.stderr_, N));
  return rep;
}

}  // namespace stochpot::stoch
