#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "stochpot/stochastic.hpp"

using namespace stochpot;
using namespace stochpot::stoch;
using geom::Vec;
using harmonic::HarmonicFn;

namespace {
constexpr double kPi = 3.14159265358979323846;

bool has_fail(const ReportSet& r) { return r.fail_count() > 0; }

const MomentReport& row(const ReportSet& r, const std::string& name) {
  for (const auto& x : r.rows)
    if (x.statistic == name) return x;
  throw std::runtime_error("missing report row: " + name);
}
}  // namespace

TEST_CASE("binomial moments") {
  CHECK(binomial_moment(2.0, 0.5, 1.0, 1, MomentConvention::Paper) == doctest::Approx(2.0));
  CHECK(binomial_moment(2.0, 0.5, 1.0, 1, MomentConvention::Gaussian) == doctest::Approx(2.0));
  // P = 2: |psi|^2 + lambda^2 alpha under both conventions
  CHECK(binomial_moment(2.0, 0.5, 3.0, 2, MomentConvention::Paper) ==
        doctest::Approx(4.0 + 0.25 * 3.0));
  CHECK(binomial_moment(2.0, 0.5, 3.0, 2, MomentConvention::Gaussian) ==
        doctest::Approx(4.0 + 0.25 * 3.0));
  // P = 4 gaussian: psi^4 + 6 l^2 a psi^2 + 3 l^4 a^2
  const double psi = 1.5, l = 0.7, a = 2.0;
  CHECK(binomial_moment(psi, l, a, 4, MomentConvention::Gaussian) ==
        doctest::Approx(std::pow(psi, 4) + 6 * l * l * a * psi * psi +
                        3 * std::pow(l, 4) * a * a));
  CHECK(binomial_moment(psi, l, a, 4, MomentConvention::Paper) ==
        doctest::Approx(std::pow(psi, 4) + 6 * l * l * a * psi * psi +
                        std::pow(l, 4) * a * a));
}

TEST_CASE("noise constants from a Gaussian kernel") {
  const auto k = grf::CovKernel::gaussian(2.0, 0.5);
  const auto c = NoiseConstants::from_gaussian_kernel(k, 3, 0.7);
  CHECK(c.alpha == doctest::Approx(2.0));
  CHECK(c.beta == doctest::Approx(2 * 2.0 / 0.25));
  CHECK(c.xi_c == doctest::Approx(4 * 2.0 * 5 / std::pow(0.5, 4)));
  CHECK(c.theta == doctest::Approx(8 * 2.0 * 5 * 7 / std::pow(0.5, 6)));
  CHECK(c.lambda == doctest::Approx(0.7));
}

TEST_CASE("Cacciopolli condition evaluator") {
  const auto c1 = stochastic_cacciopolli_condition(3, 1.0, 1.0, 1.0);
  CHECK(c1.lhs == doctest::Approx(0.25));
  CHECK(c1.rhs == doctest::Approx(7.0));
  CHECK(c1.holds);
  const auto c2 = stochastic_cacciopolli_condition(3, 6.0, 1.0, 1.0);
  CHECK(c2.lhs == doctest::Approx(9.0));
  CHECK_FALSE(c2.holds);
  CHECK(c1.threshold_R == doctest::Approx(2.0 * std::sqrt(7.0)));
}

TEST_CASE("Harnack sums degenerate correctly") {
  // lambda = 0: pure powers of the deterministic bounds
  const auto s0 = stochastic_harnack_sums(2.0, 1.5, 0.5, 3.0, 0.0, 1.0, 2,
                                          MomentConvention::Paper);
  CHECK(s0.lower == doctest::Approx(1.0));
  CHECK(s0.middle == doctest::Approx(2.25));
  CHECK(s0.upper == doctest::Approx(36.0));
  // coincident points: factors 1 and psi_x = psi0 make all three sums equal
  const auto se = stochastic_harnack_sums(2.0, 2.0, 1.0, 1.0, 0.3, 1.0, 4,
                                          MomentConvention::Gaussian);
  CHECK(se.lower == doctest::Approx(se.middle));
  CHECK(se.middle == doctest::Approx(se.upper));
}

TEST_CASE("perturbed MVP report") {
  PerturbedMvpParams p;
  p.base = HarmonicFn::linear(0.3, Vec(0.5, 0, 0));
  p.kernel = grf::CovKernel::exponential(1.0, 0.5);
  p.lambda = 1.0;
  p.resolution = 8;
  p.n_samples = 20000;
  const auto rep = perturbed_mvp(p);
  CHECK_FALSE(has_fail(rep));
  CHECK(row(rep, "mean[ball_avg]").verdict == "pass");
  CHECK(row(rep, "volatility[ball_avg]").verdict == "pass");
  CHECK(row(rep, "third_moment_centered").verdict == "pass");
  // the pointwise and volume-squared paper forms disagree with the
  // ball-average statistic
  CHECK(row(rep, "volatility_volume_sq_form").verdict == "note:paper-disagrees");
  // paper's fourth-moment convention must sit outside the MC band while the
  // Gaussian convention is inside
  CHECK(row(rep, "moment4[gaussian_convention]").verdict == "pass");
  CHECK(row(rep, "moment4[paper_convention]").verdict == "note:paper-disagrees");
}

TEST_CASE("perturbed MVP degenerates at lambda zero") {
  PerturbedMvpParams p;
  p.base = HarmonicFn::linear(0.3, Vec(0.5, 0, 0));
  p.lambda = 0.0;
  p.resolution = 8;
  p.n_samples = 500;
  const auto rep = perturbed_mvp(p);
  const auto& vol = row(rep, "volatility[ball_avg]");
  CHECK(vol.mc_stderr == doctest::Approx(0.0));
  CHECK(vol.mc_estimate == doctest::Approx(vol.oracle_value).epsilon(1e-12));
}

TEST_CASE("white noise is rejected") {
  PerturbedMvpParams p;
  p.kernel = grf::CovKernel::white_noise();
  CHECK_THROWS_AS(perturbed_mvp(p), std::invalid_argument);
}

TEST_CASE("averaged maximum principle") {
  AveragedMaxPrincipleParams p;
  p.n_samples = 4000;
  p.resolution = 10;
  const auto rep = averaged_max_principle(p);
  CHECK_FALSE(has_fail(rep));

  AveragedMaxPrincipleParams pc;
  pc.base = HarmonicFn::linear(2.0, Vec::Zero(), 2);
  const auto repc = averaged_max_principle(pc);
  CHECK(repc.rows.size() == 1);
  CHECK(repc.rows[0].statistic == "constant_base_function");
}

TEST_CASE("stochastic line integrals") {
  LineIntegralParams p;
  p.n_samples = 8000;
  const auto rep = stochastic_line_integral(p);
  CHECK_FALSE(has_fail(rep));
  // lambda = 0 collapses to the fundamental theorem value exactly
  LineIntegralParams p0 = p;
  p0.lambda = 0.0;
  p0.n_samples = 200;
  const auto rep0 = stochastic_line_integral(p0);
  const auto& open_row = row(rep0, "open_curve_mean");
  CHECK(open_row.mc_estimate == doctest::Approx(open_row.oracle_value));
  CHECK(row(rep0, "closed_loop_mean").mc_estimate == doctest::Approx(0.0));
  // an open curve cannot serve as the loop
  LineIntegralParams bad = p;
  bad.loop = geom::Curve::segment(Vec(0, 0, 0), Vec(1, 0, 0), 8);
  CHECK_THROWS_AS(stochastic_line_integral(bad), std::invalid_argument);
}

TEST_CASE("stochastically averaged Dirichlet energy") {
  SadeiParams p;
  p.n_samples = 2000;
  p.resolution = 8;
  const auto rep = sadei(p);
  CHECK_FALSE(has_fail(rep));
  // the shift for a zero base is the analytic gradient variance times the
  // grid volume
  const auto& mean_row = row(rep, "energy_mean");
  const auto& gv = row(rep, "analytic_gradient_variance");
  CHECK(mean_row.oracle_value == doctest::Approx(gv.oracle_value * 4.0 * kPi / 3.0).epsilon(0.01));
  // exponential kernels have no mean-square gradient
  SadeiParams bad = p;
  bad.kernel = grf::CovKernel::exponential(1.0, 1.0);
  CHECK_THROWS_AS(sadei(bad), std::invalid_argument);
}

TEST_CASE("lambda zero degenerations are exact") {
  SadeiParams sp;
  sp.lambda = 0.0;
  sp.resolution = 8;
  sp.n_samples = 100;
  const auto srep = sadei(sp);
  const auto& se = row(srep, "energy_mean");
  CHECK(se.mc_stderr == doctest::Approx(0.0));
  CHECK(se.mc_estimate == doctest::Approx(row(srep, "base_energy").oracle_value).epsilon(1e-12));

  TurbulenceParams tp;
  tp.lambda = 0.0;
  tp.n_samples = 300;
  const auto trep = turbulent_flow_stats(tp);
  const auto& tv = row(trep, "velocity_covariance_zz");
  CHECK(tv.mc_stderr == doctest::Approx(0.0));
  CHECK(tv.mc_estimate == doctest::Approx(tv.oracle_value).epsilon(1e-12));

  StochasticRieszParams rp;
  rp.spec = potentials::RieszSpec::uniform_ball(1.0, 1.0, 8);
  rp.lambda = 0.0;
  rp.n_samples = 100;
  const auto rrep = stochastic_riesz_moments(rp);
  const auto& rm = row(rrep, "mean_potential");
  CHECK(rm.mc_stderr == doctest::Approx(0.0));
  CHECK(rm.mc_estimate == doctest::Approx(rm.oracle_value).epsilon(1e-12));
}

TEST_CASE("the stated log noise factor decays toward the boundary") {
  // the formula's own a -> R decay; the sampled statistic behaves differently
  auto factor = [](double a) {
    return std::abs((1.0 - a * a) / (4.0 * kPi) * ball_paper_log_integral(1.0, a));
  };
  CHECK(factor(0.8) < factor(0.5));
  CHECK(factor(0.95) < factor(0.8));
  CHECK(factor(0.999) < 0.02);
  // and its centre limit is finite
  CHECK(ball_paper_log_integral(1.0, 0.0) == doctest::Approx(-4.0 * kPi));
}

TEST_CASE("stochastic Cacciopolli quadrature form") {
  StochasticCacciopolliParams p;
  p.n_samples = 150;
  p.n_seeds = 3;
  const auto rep = stochastic_cacciopolli(p);
  CHECK_FALSE(has_fail(rep));
}

TEST_CASE("turbulent flow statistics") {
  TurbulenceParams p;
  p.n_samples = 20000;
  const auto rep = turbulent_flow_stats(p);
  CHECK_FALSE(has_fail(rep));
  CHECK(row(rep, "cylinder_radial_factor_drops_out").verdict == "pass");
}

TEST_CASE("stochastic Riesz moments") {
  StochasticRieszParams p;
  p.spec = potentials::RieszSpec::uniform_ball(1.0, 1.0, 10);
  p.n_samples = 20000;
  const auto rep = stochastic_riesz_moments(p);
  CHECK_FALSE(has_fail(rep));
  CHECK(row(rep, "moment4_paper_convention").provenance == "paper");
}

TEST_CASE("noisy-density Newtonian potential") {
  NoisyNewtonParams p;
  p.resolution = 10;
  p.n_samples = 20000;
  const auto rep = noisy_density_newton(p);
  CHECK_FALSE(has_fail(rep));
  CHECK(row(rep, "force_mean_magnitude").oracle_value ==
        doctest::Approx(kPi / 3.0).epsilon(1e-9));
}

TEST_CASE("stochastic Harnack") {
  StochasticHarnackParams p;
  p.n_samples = 30000;
  const auto rep = stochastic_harnack(p);
  CHECK_FALSE(has_fail(rep));
  // coincident points: the three sums coincide
  StochasticHarnackParams p0 = p;
  p0.d = 0.0;
  const auto rep0 = stochastic_harnack(p0);
  CHECK(row(rep0, "factor_lower").oracle_value == doctest::Approx(1.0));
  CHECK(row(rep0, "factor_upper").oracle_value == doctest::Approx(1.0));
}

TEST_CASE("stochastic Bochner shift") {
  StochasticBochnerParams p;
  p.n_samples = 20000;
  const auto rep = stochastic_bochner(p);
  CHECK_FALSE(has_fail(rep));
  const auto& det = row(rep, "deterministic_half_lap_grad_sq");
  CHECK(det.oracle_value == doctest::Approx(8.0).epsilon(1e-3));
  const auto& shifted = row(rep, "shifted_value");
  const auto& xi = row(rep, "analytic_hessian_constant");
  CHECK(shifted.oracle_value ==
        doctest::Approx(det.oracle_value + p.lambda * p.lambda * 2 * xi.oracle_value));
  // re z^2 with n = 2: shifted = 8 + 2 lambda^2 Xi
  CHECK(shifted.oracle_value == doctest::Approx(8.0 + 2 * 0.25 * xi.oracle_value).epsilon(1e-3));
}

TEST_CASE("noisy boundary ball") {
  NoisyBoundaryBallParams p;
  p.g = harmonic::sphere_preset("zdir", 1.0);
  p.resolution = 16;
  p.n_samples = 8000;
  const auto rep = noisy_boundary_ball(p);
  CHECK_FALSE(has_fail(rep));
  // the log closed form disagrees with the quadrature oracle; the surface
  // integral row checks quadrature against the exact value
  CHECK(row(rep, "noise_volatility_decreasing_toward_boundary").verdict ==
        "note:paper-disagrees");
}

TEST_CASE("noisy boundary disc") {
  NoisyBoundaryDiscParams p;
  p.g = harmonic::circle_preset("cos:1");
  p.n_boundary = 128;
  p.n_samples = 20000;
  const auto rep = noisy_boundary_disc(p);
  CHECK_FALSE(has_fail(rep));
  CHECK(row(rep, "mean").oracle_value == doctest::Approx(0.5 * std::cos(0.7)).epsilon(1e-3));
  // the centre variance is strictly positive, contradicting the vanishing
  // claim
  CHECK(row(rep, "centre_noise_variance").oracle_value > 0.0);
  CHECK(row(rep, "centre_noise_variance_vanishes").verdict == "note:paper-disagrees");
}

TEST_CASE("paper closed-form helpers") {
  CHECK(ball_paper_log_integral(1.0, 0.5) ==
        doctest::Approx(2 * kPi / 0.5 * std::log(0.5 / 1.5)));
  CHECK(ball_surface_integral_closed(1.0, 0.5) == doctest::Approx(4 * kPi / 0.75));
  CHECK(std::isfinite(disc_paper_arctan_factor(1.0, 0.5, 0.7)));
  // angular-distance covariance is symmetric positive and regulated
  const auto cov = circle_noise_covariance(16, 1.0, 2.0, 0.5, false);
  CHECK(cov(3, 3) == doctest::Approx(2.0));
  CHECK(cov(0, 8) == doctest::Approx(cov(8, 0)));
  CHECK(cov(0, 1) < 2.0);
}

TEST_CASE("report serialization carries provenance") {
  ReportSet r;
  r.id = "demo";
  r.add(MomentReport::oracle_row("stat", 1.0, 2.0, 2.01, 0.01, 100));
  r.add(MomentReport::paper_note("pstat", 1.0, 2.0, 2.01, 0.01, 100));
  std::ostringstream csv;
  write_csv(r, csv);
  CHECK(csv.str().find("provenance") != std::string::npos);
  CHECK(csv.str().find("oracle") != std::string::npos);
  CHECK(csv.str().find("note:paper-disagrees") != std::string::npos);
  std::ostringstream js;
  write_json(r, js);
  CHECK(js.str().find("\"id\": \"demo\"") != std::string::npos);
}
