// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Statistical criteria run at fixed seeds with the tolerances stated below.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "stochpot/rng.hpp"
#include "stochpot/stochastic.hpp"
#include "stochpot/wos.hpp"

using namespace stochpot;
using geom::Domain;
using geom::DomainGrid;
using geom::MeasureKind;
using geom::Vec;
using harmonic::HarmonicFn;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail = "") {
  std::printf("[%s] criterion %02d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const MomentReport& row(const ReportSet& r, const std::string& name) {
  for (const auto& x : r.rows)
    if (x.statistic == name) return x;
  throw std::runtime_error("missing report row: " + name);
}

// polar-grid disc quadrature: the angular trapezoid rule integrates the
// harmonic polynomials exactly, making this the high-accuracy MVP oracle
DomainGrid polar_disc_grid(double R, const Vec& c, int n_r, int n_t) {
  DomainGrid g;
  g.points.resize(n_r * n_t, 3);
  g.weights.resize(n_r * n_t);
  const double dr = R / n_r, dt = 2.0 * kPi / n_t;
  int idx = 0;
  for (int i = 0; i < n_r; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < n_t; ++j) {
      const double t = (j + 0.5) * dt;
      g.points.row(idx) = (c + Vec(r * std::cos(t), r * std::sin(t), 0)).transpose();
      g.weights[idx] = r * dr * dt;
      ++idx;
    }
  }
  g.measure = MeasureKind::Volume;
  return g;
}

// randomized 2-d harmonic polynomials: sums of re/im z^k, degree <= 4
HarmonicFn random_harmonic_poly(Rng& rng) {
  struct Term {
    int k;
    bool re;
    double coeff;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  for (int k = 1; k <= 4; ++k) {
    terms->push_back({k, true, rng.uniform(-1, 1)});
    terms->push_back({k, false, rng.uniform(-1, 1)});
  }
  const double c0 = rng.uniform(-1, 1);
  auto fn = [terms, c0](const Vec& x) {
    double acc = c0;
    for (const auto& t : *terms)
      acc += t.coeff * harmonic::eval(HarmonicFn::complex_poly(t.k, t.re), x);
    return acc;
  };
  auto grad_fn = [terms](const Vec& x) {
    Vec g = Vec::Zero();
    for (const auto& t : *terms)
      g += t.coeff * harmonic::grad(HarmonicFn::complex_poly(t.k, t.re), x);
    return g;
  };
  return HarmonicFn::custom(2, fn, grad_fn);
}

void criterion_1_ball_integral() {
  const auto spec = potentials::RieszSpec::uniform_ball(1.0, 1.0, 24);
  const double at2 = potentials::riesz_potential(spec, Vec(0, 0, 2));
  const double at0 = potentials::riesz_potential(spec, Vec(0, 0, 0));
  const double atR = potentials::riesz_potential(spec, Vec(0, 0, 1));
  const bool ok1 = std::abs(at2 - 2 * kPi / 3) <= 0.01 * 2 * kPi / 3;
  const bool ok2 = std::abs(at0 - 2 * kPi) <= 0.01 * 2 * kPi;
  const bool ok3 = std::abs(atR - 4 * kPi / 3) <= 0.02 * 4 * kPi / 3;
  report(1, "ball-integral closed forms", ok1 && ok2 && ok3,
         "a=2: " + fmt(at2) + " vs " + fmt(2 * kPi / 3) + ", a=0: " + fmt(at0) + " vs " +
             fmt(2 * kPi) + ", a=R: " + fmt(atR) + " vs " + fmt(4 * kPi / 3));
}

void criterion_2_newton_exterior() {
  const auto spec = potentials::RieszSpec::uniform_ball(1.0, 1.0, 24);
  const double quad = potentials::riesz_potential(spec, Vec(0, 0, 2)) / (4 * kPi);
  const double closed = potentials::ball_newton_closed(1.0, 2.0, 1.0, 1.0);
  const bool ok_quad = std::abs(quad - 1.0 / 6.0) <= 0.01 / 6.0;
  const bool ok_closed = closed == 1.0 / 6.0;
  report(2, "Newtonian exterior value 1/6", ok_quad && ok_closed,
         "quadrature " + fmt(quad) + ", closed " + fmt(closed));
}

void criterion_3_force_gradient() {
  const Vec g = potentials::ball_newton_gradient_closed(1.0, Vec(0, 0, 2));
  const bool ok_mag = std::abs(g.norm() - kPi / 3) <= 1e-12;
  const double h = 1e-5;
  const auto raw = [](double a) { return 4.0 * kPi / 3.0 / a; };
  const double fd = (raw(2 + h) - raw(2 - h)) / (2 * h);
  const bool ok_fd = std::abs(fd - g.z()) <= 1e-6 * std::abs(fd);
  report(3, "force gradient pi/3 and FD match", ok_mag && ok_fd,
         "|g| = " + fmt(g.norm()) + ", fd gap " + fmt(std::abs(fd - g.z())));
}

void criterion_4_disc_solvers() {
  bool ok = true;
  double worst = 0.0;
  for (const char* spec : {"cos:1", "cos:2", "sin:3"}) {
    const auto g = harmonic::circle_preset(spec);
    const auto c = harmonic::disc_fourier_solve(g, 16);
    for (double r : {0.3, 0.6, 0.9})
      for (double th : {0.0, 1.1, 2.7, 5.5}) {
        const double gap =
            std::abs(harmonic::disc_poisson_eval(g, 1.0, r, th) - harmonic::disc_fourier_eval(c, r, th));
        worst = std::max(worst, gap);
        ok = ok && gap <= 1e-8;
      }
  }
  // centre value equals the boundary mean
  const auto mixed = harmonic::CircleData{
      [](double th) { return std::cos(2 * th) + 0.7; }, "cos2+0.7"};
  const double centre = harmonic::disc_poisson_eval(mixed, 1.0, 0.0, 0.0);
  const bool ok_centre = std::abs(centre - 0.7) <= 1e-10;
  report(4, "disc solver agreement and centre mean", ok && ok_centre,
         "worst gap " + fmt(worst) + ", centre " + fmt(centre));
}

void criterion_5_wos_oracle() {
  wos::WalkConfig cfg;
  cfg.n_walkers = 10000;
  cfg.epsilon_shell = 1e-3;
  cfg.seed = 101;
  const auto disc = wos::wos_laplace(Domain::disc(1.0),
                                     [](const Vec& s) { return s.x() / s.head<2>().norm(); },
                                     Vec(0.5, 0, 0), cfg);
  const auto ball = wos::wos_laplace(Domain::ball(3, 1.0), [](const Vec& s) { return s.z(); },
                                     Vec(0, 0, 0.5), cfg);
  const auto pd = wos::wos_poisson(Domain::disc(1.0), [](const Vec&) { return -4.0; },
                                   [](const Vec&) { return 0.0; }, Vec(0, 0, 0), cfg);
  const auto pb = wos::wos_poisson(Domain::ball(3, 1.0), [](const Vec&) { return -6.0; },
                                   [](const Vec&) { return 0.0; }, Vec(0, 0, 0), cfg);
  const bool ok = std::abs(disc.estimate - 0.5) <= 3 * disc.stderr_ &&
                  std::abs(ball.estimate - 0.5) <= 3 * ball.stderr_ &&
                  std::abs(pd.estimate - 1.0) <= 3 * pd.stderr_ + 1e-12 &&
                  std::abs(pb.estimate - 1.0) <= 3 * pb.stderr_ + 1e-12;
  report(5, "walk-on-spheres oracle", ok,
         "disc " + fmt(disc.estimate) + ", ball " + fmt(ball.estimate) + ", poisson " +
             fmt(pd.estimate) + "/" + fmt(pb.estimate));
}

void criterion_6_classical_suite() {
  Rng rng(606);
  const Domain disc = Domain::disc(1.0);
  const DomainGrid vol = polar_disc_grid(1.0, Vec::Zero(), 64, 128);
  const DomainGrid surf = geom::build_grid(disc, MeasureKind::Surface, 32);
  const DomainGrid interior = geom::build_grid(disc, MeasureKind::Volume, 20);
  const DomainGrid inner_c = geom::build_grid(disc, MeasureKind::Volume, 16);
  const DomainGrid annulus = geom::build_grid(Domain::shell(2, 1.0, 2.0), MeasureKind::Volume, 24);

  const DomainGrid outer2 = geom::build_grid(Domain::disc(2.0), MeasureKind::Volume, 20);
  bool mvp_ok = true, maxp_ok = true, harnack_ok = true, cacc_ok = true, bochner_ok = true;
  double worst_mvp = 0.0, worst_bochner = 0.0, grad_envelope = 0.0;
  for (int t = 0; t < 20; ++t) {
    const HarmonicFn f = random_harmonic_poly(rng);
    // relative MVP residuals against the sup of |f| on the closed disc
    double sup = 0.0;
    for (int q = 0; q < surf.size(); ++q)
      sup = std::max(sup, std::abs(harmonic::eval(f, surf.point(q))));
    const auto res = harmonic::mvp_residual(f, Vec::Zero(), vol, surf);
    const double rel = std::max(res.volume, res.surface) / std::max(sup, 1e-12);
    worst_mvp = std::max(worst_mvp, rel);
    mvp_ok = mvp_ok && rel < 1e-6;

    maxp_ok = maxp_ok && harmonic::max_principle_check(f, interior, surf).holds;

    // comparison/stability: shift the boundary data by one
    {
      const double probe_r = 0.5, probe_t = 1.2;
      auto gf = [&f](double th) {
        return harmonic::eval(f, Vec(std::cos(th), std::sin(th), 0));
      };
      const harmonic::CircleData d1{[gf](double th) { return gf(th) + 1.0; }, "f+1"};
      const harmonic::CircleData d2{gf, "f"};
      const double v1 = harmonic::disc_poisson_eval(d1, 1.0, probe_r, probe_t);
      const double v2 = harmonic::disc_poisson_eval(d2, 1.0, probe_r, probe_t);
      maxp_ok = maxp_ok && v1 > v2 && std::abs(v1 - v2) <= 1.0 + 1e-9;
    }

    // Harnack containment for the positive shift of f
    {
      double min_f = 1e300;
      for (int q = 0; q < surf.size(); ++q)
        min_f = std::min(min_f, harmonic::eval(f, surf.point(q)));
      const double shift = -min_f + 0.1;
      const double psi0 = harmonic::eval(f, Vec::Zero()) + shift;
      for (int s = 0; s < 25; ++s) {
        const double rr = rng.uniform(0, 0.9);
        const double tt = rng.uniform(0, 2 * kPi);
        const Vec x(rr * std::cos(tt), rr * std::sin(tt), 0);
        const auto hb = harmonic::harnack_bounds(psi0, 1.0, rr, 2);
        const double v = harmonic::eval(f, x) + shift;
        harnack_ok = harnack_ok && v >= hb.lower - 1e-9 && v <= hb.upper + 1e-9;
      }
    }

    cacc_ok = cacc_ok && harmonic::cacciopolli_check(f, 1.0, inner_c, annulus).holds;

    for (int s = 0; s < 3; ++s) {
      const Vec x(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), 0);
      const double br = harmonic::bochner_residual(f, x, 1e-4);
      worst_bochner = std::max(worst_bochner, br);
      bochner_ok = bochner_ok && br <= 1e-4;
    }

    // the gradient-estimate constant is unspecified; record the empirical
    // envelope over the family
    grad_envelope =
        std::max(grad_envelope, harmonic::gradient_estimate_ratio(f, 1.0, interior, outer2));
  }
  report(6, "classical estimate suite (20 random harmonic polynomials)",
         mvp_ok && maxp_ok && harnack_ok && cacc_ok && bochner_ok,
         "worst rel MVP " + fmt(worst_mvp) + ", worst Bochner " + fmt(worst_bochner) +
             ", empirical gradient-estimate envelope C(2) <= " + fmt(grad_envelope));
}

void criterion_7_admissibility() {
  const bool ok = grf::kc_admissible(grf::CovKernel::exponential(1, 1)).admissible &&
                  grf::kc_admissible(grf::CovKernel::gaussian(1, 1)).admissible &&
                  !grf::kc_admissible(grf::CovKernel::power_law(1, 1)).admissible &&
                  !grf::kc_admissible(grf::CovKernel::white_noise()).admissible;
  report(7, "kernel admissibility table", ok);
}

void criterion_8_sampler_fidelity() {
  auto grid = std::make_shared<DomainGrid>();
  grid->points.resize(3, 3);
  grid->points << 0, 0, 0, 0.6, 0, 0, 0, 1.1, 0.3;
  grid->weights = Eigen::VectorXd::Ones(3);
  const auto kernel = grf::CovKernel::exponential(1.0, 1.0);
  grf::FieldSampler s(kernel, grid);
  const long n = 100000;
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  double m4 = 0.0;
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd v = s.sample(808, static_cast<std::uint64_t>(i)).values;
    acc += v * v.transpose();
    m4 += std::pow(v[0], 4);
  }
  acc /= static_cast<double>(n);
  m4 /= static_cast<double>(n);

  bool cov_ok = true;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double cij = grf::kernel_eval(kernel, grid->point(i), grid->point(j));
      const double se = std::sqrt((1.0 + cij * cij) / n);
      cov_ok = cov_ok && std::abs(acc(i, j) - cij) <= 3 * se;
    }
  // m4 estimator: var(X^4) = 105 - 9 for unit variance
  const double se4 = std::sqrt(96.0 / n);
  const bool gauss_in = std::abs(m4 - grf::gaussian_moment(1.0, 4)) <= 3 * se4;
  const bool paper_out = std::abs(m4 - grf::paper_moment(1.0, 4)) > 3 * se4;
  report(8, "sampler fidelity and fourth-moment discrimination", cov_ok && gauss_in && paper_out,
         "m4 = " + fmt(m4) + " vs gaussian 3, paper 1 (3se = " + fmt(3 * se4) + ")");
}

void criterion_9_stochastic_mvp() {
  stoch::PerturbedMvpParams p;
  p.base = HarmonicFn::linear(0.0, Vec::Zero());
  p.kernel = grf::CovKernel::exponential(1.0, 0.5);
  p.lambda = 1.0;
  p.n_samples = 100000;
  p.seed = 909;
  const auto rep0 = stoch::perturbed_mvp(p);
  const bool vol_ok = row(rep0, "volatility[ball_avg]").verdict == "pass";
  const bool third_ok = row(rep0, "third_moment_centered").verdict == "pass";

  p.base = HarmonicFn::linear(0.2, Vec(0.5, 0, 0));
  const auto rep1 = stoch::perturbed_mvp(p);
  const bool mean_ok = row(rep1, "mean[ball_avg]").verdict == "pass";
  report(9, "stochastic mean value property", vol_ok && third_ok && mean_ok);
}

void criterion_10_line_integrals() {
  stoch::LineIntegralParams p;
  p.n_samples = 20000;
  p.seed = 1010;
  const auto rep = stoch::stochastic_line_integral(p);
  const bool ok = row(rep, "closed_loop_mean").verdict == "pass" &&
                  row(rep, "loop_loop_covariance").verdict == "pass";
  report(10, "stochastic line integrals", ok);
}

void criterion_11_sadei() {
  stoch::SadeiParams p;
  p.base = HarmonicFn::linear(0.0, Vec::Zero());
  p.kernel = grf::CovKernel::gaussian(1.0, 1.0);
  p.lambda = 1.0;
  p.n_samples = 10000;
  p.seed = 1111;
  const auto rep = stoch::sadei(p);
  const double mc_shift = row(rep, "energy_mean").mc_estimate;
  const double grad_var = row(rep, "analytic_gradient_variance").oracle_value;
  const double target = grad_var * 4.0 * kPi / 3.0;
  const bool ok = std::abs(mc_shift - target) <= 0.05 * target;
  report(11, "stochastically averaged Dirichlet energy", ok,
         "mc " + fmt(mc_shift) + " vs " + fmt(target));
}

void criterion_12_stochastic_cacciopolli() {
  const auto hold = stoch::stochastic_cacciopolli_condition(3, 1.0, 1.0, 1.0);
  const auto fail = stoch::stochastic_cacciopolli_condition(3, 6.0, 1.0, 1.0);
  stoch::StochasticCacciopolliParams p;
  p.n_seeds = 10;
  p.n_samples = 200;
  p.seed = 1212;
  const auto rep = stoch::stochastic_cacciopolli(p);
  bool seeds_ok = true;
  for (int s = 0; s < 10; ++s)
    seeds_ok = seeds_ok && row(rep, "mc_inequality_seed" + std::to_string(s)).verdict == "pass";
  report(12, "stochastic Cacciopolli", hold.holds && !fail.holds && seeds_ok,
         "condition " + fmt(hold.lhs) + " <= " + fmt(hold.rhs) + ", R=6 gives " + fmt(fail.lhs));
}

void criterion_13_turbulence() {
  stoch::TurbulenceParams p;
  p.n_samples = 100000;
  p.seed = 1313;
  const auto rep = stoch::turbulent_flow_stats(p);
  const bool ok = row(rep, "velocity_volatility").verdict == "pass" &&
                  row(rep, "decorrelation_at_10xi").verdict == "pass" &&
                  row(rep, "cylinder_boundary_zz_covariance").verdict == "pass";
  report(13, "turbulent potential flow", ok);
}

void criterion_14_noisy_disc() {
  stoch::NoisyBoundaryDiscParams p;
  p.g = harmonic::circle_preset("cos:1");
  p.n_samples = 50000;
  p.seed = 1414;
  const auto rep = stoch::noisy_boundary_disc(p);
  bool lap_ok = true;
  double worst_lap = 0.0;
  for (int c = 0; c < p.n_interior_checks; ++c) {
    const auto& r = row(rep, "mean_fd_laplacian_pt" + std::to_string(c));
    worst_lap = std::max(worst_lap, std::abs(r.mc_estimate));
    lap_ok = lap_ok && std::abs(r.mc_estimate) <= 1e-3;
  }
  const bool mean_ok = row(rep, "mean").verdict == "pass";
  const bool vol_ok = row(rep, "volatility").verdict == "pass";
  // NOTE-level records must exist for the arctan form and the centre claim
  const bool notesveVerdict =
      row(rep, "volatility_paper_arctan_form").provenance == "paper" &&
      row(rep, "centre_noise_variance_vanishes").provenance == "paper";
  report(14, "noisy boundary disc", mean_ok && lap_ok && vol_ok && notesveVerdict,
         "worst |E lap| " + fmt(worst_lap));
}

void criterion_15_noisy_ball() {
  stoch::NoisyBoundaryBallParams p;
  p.g = harmonic::sphere_preset("zdir", 1.0);
  p.n_samples = 50000;
  p.seed = 1515;
  const auto rep = stoch::noisy_boundary_ball(p);
  bool mean_ok = true;
  for (double aR : {0.5, 0.8, 0.95})
    mean_ok = mean_ok && row(rep, "mean_a=" + std::to_string(aR)).verdict == "pass";
  // the stated decay claim: MC volatility of the noise must decrease toward
  // the boundary; the quadrature oracle says it increases, so this clause
  // records an honest failure (see the analysis shipped with the project)
  const auto& mono = row(rep, "noise_volatility_decreasing_toward_boundary");
  const bool decay_ok = mono.mc_estimate == 1.0;
  const bool note_ok = row(rep, "volatility_paper_log_form_a=" + std::to_string(0.5)).provenance ==
                       "paper";
  // the closed-form factor itself does decay; only the sampled statistic
  // refuses to follow it
  auto factor = [&](double a) {
    return std::abs((1.0 - a * a) / (4.0 * kPi) * stoch::ball_paper_log_integral(1.0, a));
  };
  const bool formula_decays = factor(0.95) < factor(0.8) && factor(0.8) < factor(0.5);
  report(15, "noisy boundary ball", mean_ok && decay_ok && note_ok,
         decay_ok ? ""
                  : std::string("MC volatility increases toward the boundary (decay claim refuted"
                                "; the stated closed-form factor does decay: ") +
                        (formula_decays ? "yes" : "no") + ")");
}

void criterion_16_determinism() {
  auto run = [](const char* threads) {
    setenv("STOCHPOT_THREADS", threads, 1);
    stoch::PerturbedMvpParams p;
    p.n_samples = 5000;
    p.seed = 1616;
    const auto rep = stoch::perturbed_mvp(p);
    std::ostringstream os;
    write_csv(rep, os);
    return os.str();
  };
  const std::string a = run("1"), b = run("2"), c = run("8");
  unsetenv("STOCHPOT_THREADS");
  report(16, "byte-identical reports across 1/2/8 workers", a == b && b == c);
}

}  // namespace

int main() {
  criterion_1_ball_integral();
  criterion_2_newton_exterior();
  criterion_3_force_gradient();
  criterion_4_disc_solvers();
  criterion_5_wos_oracle();
  criterion_6_classical_suite();
  criterion_7_admissibility();
  criterion_8_sampler_fidelity();
  criterion_9_stochastic_mvp();
  criterion_10_line_integrals();
  criterion_11_sadei();
  criterion_12_stochastic_cacciopolli();
  criterion_13_turbulence();
  criterion_14_noisy_disc();
  criterion_15_noisy_ball();
  criterion_16_determinism();
  std::printf("%d of 16 criteria passed\n", 16 - g_failures);
  return g_failures;
}
