#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stochpot/geometry.hpp"
#include "stochpot/harmonic.hpp"
#include "stochpot/rng.hpp"

using namespace stochpot;
using namespace stochpot::harmonic;
using geom::Domain;
using geom::DomainGrid;
using geom::MeasureKind;
using geom::Vec;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("built-in evaluations") {
  CHECK(eval(HarmonicFn::complex_poly(2, true), Vec(1, 2, 0)) == doctest::Approx(-3.0));
  CHECK(eval(HarmonicFn::complex_poly(2, false), Vec(1, 2, 0)) == doctest::Approx(4.0));
  CHECK(eval(HarmonicFn::radial3d(1.0, 2.0), Vec(0, 0, 2)) == doctest::Approx(1.5));
  CHECK(eval(HarmonicFn::radial_log2d(1.0, 0.0), Vec(std::exp(1.0), 0, 0)) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(eval(HarmonicFn::radial3d(1.0, 0.0), Vec(0, 0, 0)), SingularPointError);
}

TEST_CASE("harmonicity residuals vanish") {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const Vec x(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0);
    CHECK(std::abs(laplacian(HarmonicFn::complex_poly(3, false), x)) < 1e-6);
    CHECK(std::abs(laplacian(HarmonicFn::complex_poly(4, true), x)) < 1e-6);
  }
  // flow past a sphere at cylindrical (r, z) = (2, 1)
  const HarmonicFn flow = HarmonicFn::flow_past_sphere(1.0, 1.0);
  CHECK(std::abs(laplacian(flow, Vec(2, 0, 1))) < 1e-6);
  CHECK(std::abs(laplacian(HarmonicFn::radial3d(2.0, 1.0), Vec(0.5, 0.3, 0.8))) < 1e-6);
  CHECK(std::abs(laplacian(HarmonicFn::radial_log2d(1.5, 0.0), Vec(0.4, -0.6, 0))) < 1e-6);
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(13);
  const HarmonicFn fns[] = {HarmonicFn::complex_poly(3, true), HarmonicFn::radial3d(1.0, 0.5),
                            HarmonicFn::flow_past_sphere(2.0, 0.7),
                            HarmonicFn::radial_log2d(1.0, 0.0)};
  for (const auto& f : fns) {
    const Vec x(1.0 + rng.uniform(0, 0.5), 0.5, f.dim == 3 ? -0.4 : 0.0);
    const Vec g = grad(f, x);
    for (int i = 0; i < f.dim; ++i) {
      const double h = 1e-6;
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      CHECK(g[i] == doctest::Approx((eval(f, xp) - eval(f, xm)) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("disc Fourier solver recovers single modes") {
  const auto c = disc_fourier_solve(circle_preset("cos:1"), 8);
  CHECK(c.A[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(c.A0) < 1e-10);
  for (int m = 2; m <= 8; ++m) CHECK(std::abs(c.A[m - 1]) < 1e-10);
  for (int m = 1; m <= 8; ++m) CHECK(std::abs(c.B[m - 1]) < 1e-10);
  CHECK(disc_fourier_eval(c, 0.5, 0.3) == doctest::Approx(0.5 * std::cos(0.3)).epsilon(1e-10));

  const auto c2 = disc_fourier_solve(circle_preset("cos:2"), 8);
  CHECK(disc_fourier_eval(c2, 0.5, 0.0) == doctest::Approx(0.25).epsilon(1e-10));

  const auto cc = disc_fourier_solve(circle_preset("const:3"), 8);
  CHECK(disc_fourier_eval(cc, 0.7, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(disc_fourier_eval(c, 1.0, 0.0), std::domain_error);
}

TEST_CASE("disc Poisson integral") {
  CHECK(disc_poisson_eval(circle_preset("cos:1"), 1.0, 0.5, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(disc_poisson_eval(circle_preset("const:1"), 1.0, 0.3, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // value at the centre is the boundary mean
  CHECK(std::abs(disc_poisson_eval(circle_preset("step"), 1.0, 0.0, 0.0)) < 1e-10);
  CHECK_THROWS_AS(disc_poisson_eval(circle_preset("cos:1"), 1.0, 1.1, 0.0), std::domain_error);
}

TEST_CASE("Fourier and Poisson representations agree to 1e-8") {
  const char* data[] = {"cos:1", "cos:2", "sin:3"};
  for (const char* spec : data) {
    const auto g = circle_preset(spec);
    const auto c = disc_fourier_solve(g, 16);
    for (double r : {0.2, 0.5, 0.9}) {
      for (double th : {0.0, 0.7, 2.9}) {
        CHECK(std::abs(disc_poisson_eval(g, 1.0, r, th) - disc_fourier_eval(c, r, th)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("ball Green function and Poisson formula") {
  const Vec p(0, 0, 0);
  const double R = 1.0;
  // vanishes when the source point sits on the sphere
  const Vec x(0.3, 0.2, -0.1);
  const Vec sigma = Vec(0, 0, 1);
  CHECK(std::abs(ball_green(x, sigma, R, p)) < 1e-12);
  CHECK(ball_green(p, Vec(0, 0, 0.5), R, p) ==
        doctest::Approx(-1.0 / (4 * kPi * 0.5) + 1.0 / (4 * kPi)));
  CHECK_THROWS_AS(ball_green(Vec(0, 0, 2), Vec(0, 0, 0.5), R, p), std::domain_error);
  CHECK_THROWS_AS(ball_green(x, x, R, p), std::invalid_argument);

  const DomainGrid surf = geom::build_grid(Domain::ball(3, R), MeasureKind::Surface, 48);
  CHECK(ball_poisson_eval(sphere_preset("const:1", R), Vec(0.2, -0.1, 0.4), R, p, surf) ==
        doctest::Approx(1.0).epsilon(1e-3));
  // centre value equals the surface mean
  const double step_mean = ball_poisson_eval(sphere_preset("step", R), p, R, p, surf);
  CHECK(std::abs(step_mean) < 1e-9);
  // harmonic extension of the degree-1 harmonic g = z/R is x_z/R
  const Vec q(0.1, 0.2, 0.5);
  CHECK(ball_poisson_eval(sphere_preset("zdir", R), q, R, p, surf) ==
        doctest::Approx(q.z() / R).epsilon(2e-3));
  CHECK_THROWS_AS(ball_poisson_eval(sphere_preset("zdir", R), Vec(0, 0, 1.5), R, p, surf),
                  std::domain_error);
}

TEST_CASE("mean value property residuals") {
  const Domain ball = Domain::disc(0.5, Vec(0.1, 0.2, 0));
  const DomainGrid vol = geom::build_grid(ball, MeasureKind::Volume, 32);
  const DomainGrid surf = geom::build_grid(ball, MeasureKind::Surface, 64);

  const auto res = mvp_residual(HarmonicFn::complex_poly(2, true), ball.center, vol, surf);
  CHECK(res.volume < 2e-4);
  CHECK(res.surface < 1e-10);

  const auto cres = mvp_residual(HarmonicFn::linear(3.0, Vec::Zero(), 2), ball.center, vol, surf);
  CHECK(cres.volume < 1e-12);
  CHECK(cres.surface < 1e-12);

  // |x|^2 is not harmonic: the ball average differs from the centre value by
  // n R^2 / (n + 2)
  const Domain b3 = Domain::ball(3, 1.0);
  const DomainGrid vol3 = geom::build_grid(b3, MeasureKind::Volume, 32);
  const DomainGrid surf3 = geom::build_grid(b3, MeasureKind::Surface, 32);
  const HarmonicFn sq = HarmonicFn::custom(3, [](const Vec& x) { return x.squaredNorm(); });
  const auto nres = mvp_residual(sq, Vec::Zero(), vol3, surf3);
  CHECK(nres.volume == doctest::Approx(3.0 / 5.0).epsilon(5e-3));
}

TEST_CASE("Harnack bounds") {
  const auto b0 = harnack_bounds(2.0, 1.0, 0.0, 3);
  CHECK(b0.lower == doctest::Approx(2.0));
  CHECK(b0.upper == doctest::Approx(2.0));

  const auto b = harnack_bounds(1.0, 1.0, 0.5, 3);
  CHECK(b.factor_lower == doctest::Approx(2.0 / 9.0));
  CHECK(b.factor_upper == doctest::Approx(6.0));

  // Liouville limit: both factors approach 1 as R grows at fixed d
  const auto bl = harnack_bounds(1.0, 1e6, 0.5, 3);
  CHECK(bl.factor_lower == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(bl.factor_upper == doctest::Approx(1.0).epsilon(1e-5));

  CHECK_THROWS_AS(harnack_bounds(1.0, 1.0, 1.0, 3), std::domain_error);
  CHECK_THROWS_AS(harnack_bounds(-1.0, 1.0, 0.5, 3), std::invalid_argument);
}

TEST_CASE("Harnack containment for a non-negative harmonic function") {
  const HarmonicFn f = HarmonicFn::linear(1.0, Vec(0.3, -0.2, 0.4));
  const double R = 1.0;
  const double psi0 = eval(f, Vec::Zero());
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    Vec x(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (x.norm() >= 0.95) x *= 0.9 / x.norm();
    const auto b = harnack_bounds(psi0, R, x.norm(), 3);
    const double v = eval(f, x);
    CHECK(v >= b.lower - 1e-12);
    CHECK(v <= b.upper + 1e-12);
  }
}

TEST_CASE("maximum principle") {
  const Domain disc = Domain::disc(1.0);
  const DomainGrid interior = geom::build_grid(disc, MeasureKind::Volume, 24);
  const DomainGrid boundary = geom::build_grid(disc, MeasureKind::Surface, 24);

  const auto r = max_principle_check(HarmonicFn::complex_poly(2, true), interior, boundary);
  CHECK(r.holds);
  CHECK_FALSE(r.constant);
  for (double p : {2.0, 3.0}) {
    const auto rp = max_principle_check(HarmonicFn::complex_poly(2, true), interior, boundary, p);
    CHECK(rp.interior_max < rp.boundary_max);
  }

  const auto rc = max_principle_check(HarmonicFn::linear(5.0, Vec::Zero(), 2), interior, boundary);
  CHECK(rc.constant);
}

TEST_CASE("comparison and stability of disc solutions") {
  // f >= g on the boundary forces psi_f >= psi_g inside, and the gap is
  // bounded by the boundary gap
  const CircleData f = circle_preset("const:2");
  const CircleData g = circle_preset("cos:1");
  double max_gap = 0.0;
  for (double r : {0.0, 0.4, 0.8}) {
    for (double th : {0.1, 1.3, 4.0}) {
      const double vf = disc_poisson_eval(f, 1.0, r, th);
      const double vg = disc_poisson_eval(g, 1.0, r, th);
      CHECK(vf > vg);
      max_gap = std::max(max_gap, std::abs(vf - vg));
    }
  }
  CHECK(max_gap <= 3.0 + 1e-9);  // max boundary |f - g| = 3
}

TEST_CASE("exponential-of-harmonic identity") {
  // Lap exp(eta f) = eta^2 |grad f|^2 exp(eta f) for harmonic f
  const HarmonicFn f = HarmonicFn::complex_poly(2, true);
  const double eta = 0.7;
  const HarmonicFn expf = HarmonicFn::custom(
      2, [eta, &f](const Vec& x) { return std::exp(eta * eval(f, x)); });
  const Vec x(0.4, -0.3, 0);
  const double lhs = laplacian(expf, x, 1e-4);
  const Vec g = grad(f, x);
  const double rhs = eta * eta * (g[0] * g[0] + g[1] * g[1]) * std::exp(eta * eval(f, x));
  CHECK(std::abs(lhs - rhs) <= 1e-5 * std::abs(rhs));
}

TEST_CASE("Dirichlet energy") {
  const Domain disc = Domain::disc(1.0);
  const DomainGrid vol = geom::build_grid(disc, MeasureKind::Volume, 48);
  CHECK(dirichlet_energy(HarmonicFn::linear(2.0, Vec::Zero(), 2), vol) == doctest::Approx(0.0));
  // |grad x|^2 = 1 over the disc, halved
  CHECK(dirichlet_energy(HarmonicFn::linear(0.0, Vec(1, 0, 0), 2), vol) ==
        doctest::Approx(kPi / 2).epsilon(5e-3));
}

TEST_CASE("harmonic functions minimize the energy among same-boundary competitors") {
  const Domain disc = Domain::disc(1.0);
  const DomainGrid vol = geom::build_grid(disc, MeasureKind::Volume, 32);
  const DomainGrid boundary = geom::build_grid(disc, MeasureKind::Surface, 32);
  const HarmonicFn f = HarmonicFn::complex_poly(1, true);  // r cos theta
  const HarmonicFn phi = HarmonicFn::custom(2, [](const Vec& x) {
    const double b = std::max(0.0, 1.0 - x.head<2>().squaredNorm());
    return x.x() + 0.8 * b * b;
  });
  const auto cmp = energy_comparison(f, phi, vol, boundary, 1e-6);
  CHECK(cmp.harmonic_energy < cmp.competitor_energy);

  const HarmonicFn mismatched = HarmonicFn::custom(2, [](const Vec& x) { return x.x() + 0.5; });
  CHECK_THROWS_AS(energy_comparison(f, mismatched, vol, boundary, 1e-6), InvalidComparisonError);
}

TEST_CASE("Cacciopolli estimate") {
  const double R = 1.0;
  const DomainGrid inner = geom::build_grid(Domain::ball(3, R), MeasureKind::Volume, 16);
  const DomainGrid annulus =
      geom::build_grid(Domain::shell(3, R, 2 * R), MeasureKind::Volume, 24);

  const auto rc = cacciopolli_check(HarmonicFn::linear(4.0, Vec::Zero()), R, inner, annulus);
  CHECK(rc.lhs == doctest::Approx(0.0));
  CHECK(rc.holds);

  const auto rx = cacciopolli_check(HarmonicFn::linear(0.0, Vec(1, 0, 0)), R, inner, annulus);
  CHECK(rx.lhs == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.01));
  // integral of x^2 over the shell: (4 pi / 15)(2^5 - 1)
  CHECK(rx.rhs == doctest::Approx(4.0 * (4.0 * kPi / 15.0) * 31.0).epsilon(0.01));
  CHECK(rx.holds);

  const Domain d2 = Domain::disc(1.0);
  const DomainGrid inner2 = geom::build_grid(d2, MeasureKind::Volume, 16);
  const DomainGrid annulus2 =
      geom::build_grid(Domain::shell(2, 1.0, 2.0), MeasureKind::Volume, 24);
  CHECK(cacciopolli_check(HarmonicFn::complex_poly(2, true), 1.0, inner2, annulus2).holds);
}

TEST_CASE("Bochner identity by nested differences") {
  // re z^2: Hessian norm^2 = 8 and half-Laplacian of |grad|^2 = 8
  const HarmonicFn f = HarmonicFn::complex_poly(2, true);
  const Vec x(0.3, 0.4, 0);
  CHECK(hessian_norm_sq(f, x) == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(half_laplacian_grad_sq(f, x) == doctest::Approx(8.0).epsilon(1e-4));
  CHECK(bochner_residual(f, x) < 1e-4);

  CHECK(bochner_residual(HarmonicFn::linear(1.0, Vec(2, 3, 0), 2), x) < 1e-8);

  // non-harmonic x^2 + y^2: <grad Lap f, grad f> = 0, both other terms are 8
  const HarmonicFn g =
      HarmonicFn::custom(2, [](const Vec& v) { return v.x() * v.x() + v.y() * v.y(); });
  CHECK(hessian_norm_sq(g, x) == doctest::Approx(8.0).epsilon(1e-5));
  CHECK(half_laplacian_grad_sq(g, x) == doctest::Approx(8.0).epsilon(1e-4));
  CHECK(bochner_residual(g, x) < 1e-4);
  CHECK_THROWS_AS(bochner_residual(f, x, 1e-9), std::invalid_argument);
}

TEST_CASE("gradient estimate ratio") {
  const DomainGrid inner = geom::build_grid(Domain::disc(1.0), MeasureKind::Volume, 24);
  const DomainGrid outer = geom::build_grid(Domain::disc(2.0), MeasureKind::Volume, 24);
  CHECK(gradient_estimate_ratio(HarmonicFn::linear(3.0, Vec::Zero(), 2), 1.0, inner, outer) ==
        doctest::Approx(0.0));
  const double r =
      gradient_estimate_ratio(HarmonicFn::linear(0.0, Vec(1, 0, 0), 2), 1.0, inner, outer);
  CHECK(r == doctest::Approx(0.5).epsilon(0.08));
  const double rq = gradient_estimate_ratio(HarmonicFn::complex_poly(2, true), 1.0, inner, outer);
  CHECK(rq > 0.0);
  CHECK(std::isfinite(rq));
}

TEST_CASE("doubling ratio of harmonic L2 mass exceeds one") {
  const DomainGrid inner = geom::build_grid(Domain::disc(1.0), MeasureKind::Volume, 24);
  const DomainGrid outer = geom::build_grid(Domain::disc(2.0), MeasureKind::Volume, 24);
  const HarmonicFn f = HarmonicFn::complex_poly(2, true);
  double m_inner = 0.0, m_outer = 0.0;
  for (int q = 0; q < inner.size(); ++q) {
    const double v = eval(f, inner.point(q));
    m_inner += v * v * inner.weights[q];
  }
  for (int q = 0; q < outer.size(); ++q) {
    const double v = eval(f, outer.point(q));
    m_outer += v * v * outer.weights[q];
  }
  CHECK(m_outer / m_inner > 1.0);
}
