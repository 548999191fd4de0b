#include "stochpot/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace stochpot::potentials {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

RieszSpec RieszSpec::uniform_ball(double R, double rho, int resolution, double a) {
  RieszSpec s;
  s.n = 3;
  s.a = a;
  s.density = [rho](const Vec&) { return rho; };
  s.grid = std::make_shared<DomainGrid>(
      geom::build_grid(geom::Domain::ball(3, R), geom::MeasureKind::Volume, resolution));
  return s;
}

double riesz_potential(const RieszSpec& spec, const Vec& x) {
  if (spec.a >= spec.n) throw InvalidOrderError("riesz_potential: requires a < n");
  if (!spec.grid || !spec.density)
    throw std::invalid_argument("riesz_potential: spec needs a grid and a density");
  const double expo = spec.n - spec.a;
  const DomainGrid& g = *spec.grid;
  // half of the cell diameter triggers singular-cell handling
  const double singular_radius =
      0.5 * g.cell_size * std::sqrt(static_cast<double>(g.measure == geom::MeasureKind::Volume
                                                            ? 3
                                                            : 2));
  double acc = 0.0;
  for (int q = 0; q < g.size(); ++q) {
    const Vec y = g.point(q);
    const double d = (x - y).norm();
    const double gv = spec.density(y);
    if (g.cell_size > 0.0 && d < singular_radius) {
      // 8x subsampling of the singular cell: subdivide into octants, skip any
      // subcell midpoint that still coincides with x
      const double h2 = 0.25 * g.cell_size;
      const double wsub = g.weights[q] / 8.0;
      for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
          for (int sz = -1; sz <= 1; sz += 2) {
            Vec ys = y + Vec(sx * h2, sy * h2, sz * h2);
            const double ds = (x - ys).norm();
            if (ds == 0.0) continue;
            acc += gv * wsub / std::pow(ds, expo);
          }
    } else {
      if (d == 0.0) continue;
      acc += gv * g.weights[q] / std::pow(d, expo);
    }
  }
  return spec.gamma * acc;
}

double ball_newton_closed(double R, double a, double C, double rho) {
  if (R <= 0) throw std::invalid_argument("ball_newton_closed: radius must be positive");
  if (a < 0) throw std::invalid_argument("ball_newton_closed: distance must be non-negative");
  if (a <= R) return (C / (4.0 * kPi)) * rho * 2.0 * kPi * (R * R - a * a / 3.0);
  return C * rho * R * R * R / (3.0 * a);
}

Vec ball_newton_gradient_closed(double R, const Vec& a) {
  const double an = a.norm();
  if (an <= R) throw std::domain_error("ball_newton_gradient_closed: interior point");
  return -(4.0 * kPi / 3.0) * std::pow(R, 3) / (an * an) * (a / an);
}

double riesz_lq_exponent(int n, double p, double a) {
  if (n < 1 || p <= 0 || a <= 0) throw std::invalid_argument("riesz_lq_exponent: bad arguments");
  if (a * p >= n)
    throw std::domain_error("riesz_lq_exponent: embedding requires a p < n");
  return n * p / (n - a * p);
}

double capacity(const RieszSpec& spec, double p) {
  if (p <= 0) throw std::invalid_argument("capacity: p must be positive");
  const DomainGrid& g = *spec.grid;
  double acc = 0.0;
  for (int q = 0; q < g.size(); ++q) {
    const double v = riesz_potential(spec, g.point(q));
    acc += std::pow(std::abs(v), p) * g.weights[q];
  }
  return acc;
}

}  // namespace stochpot::potentials
