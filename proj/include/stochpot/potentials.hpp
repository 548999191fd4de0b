#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "stochpot/geometry.hpp"

namespace stochpot::potentials {

using geom::DomainGrid;
using geom::Vec;

struct RieszSpec {
  int n = 3;            // ambient dimension
  double a = 2.0;       // order, 0 < a < n
  std::function<double(const Vec&)> density;  // source g
  std::shared_ptr<const DomainGrid> grid;
  double gamma = 1.0;   // normalization gamma(a), 1 by default

  static RieszSpec uniform_ball(double R, double rho = 1.0, int resolution = 24, double a = 2.0);
};

struct InvalidOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// gamma(a) * sum_q g(y_q) w_q / |x - y_q|^{n-a}. Nodes within half a cell
// diameter of x are re-integrated on an 8x subdivision of their cell.
double riesz_potential(const RieszSpec& spec, const Vec& x);

// closed form of (C/4pi) rho * Int_{B_R} d^3y / |x-y| at distance a from the
// centre: rho C (R^2/2 - a^2/6) inside, C rho R^3 / (3a) outside
double ball_newton_closed(double R, double a, double C, double rho);

// gradient of the raw integral Int_{B_R} d^3y / |x-y| at an exterior point:
// -(4 pi / 3) R^3 a_hat / |a|^2
Vec ball_newton_gradient_closed(double R, const Vec& a);

// Sobolev-type scaling exponent q = n p / (n - a p); requires a p < n
double riesz_lq_exponent(int n, double p, double a);

// Int_D |riesz_potential(x)|^p dmu(x) over the source grid
double capacity(const RieszSpec& spec, double p);

}  // namespace stochpot::potentials
