#include "stochpot/harmonic.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace stochpot::harmonic {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

HarmonicFn HarmonicFn::complex_poly(int n, bool real_part) {
  require(n >= 0, "complex_poly: degree must be non-negative");
  HarmonicFn f;
  f.kind = Kind::ComplexPoly;
  f.dim = 2;
  f.degree = n;
  f.real_part = real_part;
  return f;
}

HarmonicFn HarmonicFn::radial3d(double c1, double c2) {
  HarmonicFn f;
  f.kind = Kind::Radial3D;
  f.dim = 3;
  f.c1 = c1;
  f.c2 = c2;
  return f;
}

HarmonicFn HarmonicFn::radial_log2d(double c1, double c2) {
  HarmonicFn f;
  f.kind = Kind::RadialLog2D;
  f.dim = 2;
  f.c1 = c1;
  f.c2 = c2;
  return f;
}

HarmonicFn HarmonicFn::flow_past_sphere(double u, double R) {
  require(R > 0, "flow_past_sphere: radius must be positive");
  HarmonicFn f;
  f.kind = Kind::FlowPastSphere;
  f.dim = 3;
  f.speed = u;
  f.sphere_radius = R;
  return f;
}

HarmonicFn HarmonicFn::linear(double c0, const Vec& coeffs, int dim) {
  HarmonicFn f;
  f.kind = Kind::Linear;
  f.dim = dim;
  f.lin0 = c0;
  f.lin = coeffs;
  return f;
}

HarmonicFn HarmonicFn::custom(int dim, std::function<double(const Vec&)> fn,
                              std::function<Vec(const Vec&)> grad) {
  require(static_cast<bool>(fn), "custom: evaluation callable required");
  HarmonicFn f;
  f.kind = Kind::Custom;
  f.dim = dim;
  f.fn = std::move(fn);
  f.grad_fn = std::move(grad);
  return f;
}

bool HarmonicFn::has_analytic_gradient() const {
  return kind != Kind::Custom || static_cast<bool>(grad_fn);
}

std::string HarmonicFn::describe() const {
  char buf[96];
  switch (kind) {
    case Kind::ComplexPoly:
      std::snprintf(buf, sizeof buf, "%s(z^%d)", real_part ? "re" : "im", degree);
      break;
    case Kind::Radial3D:
      std::snprintf(buf, sizeof buf, "-%g/r + %g", c1, c2);
      break;
    case Kind::RadialLog2D:
      std::snprintf(buf, sizeof buf, "%g log r + %g", c1, c2);
      break;
    case Kind::FlowPastSphere:
      std::snprintf(buf, sizeof buf, "flow-past-sphere(u=%g R=%g)", speed, sphere_radius);
      break;
    case Kind::Linear:
      std::snprintf(buf, sizeof buf, "linear(%g + [%g %g %g].x)", lin0, lin.x(), lin.y(), lin.z());
      break;
    case Kind::Custom:
      std::snprintf(buf, sizeof buf, "custom(dim=%d)", dim);
      break;
  }
  return buf;
}

double eval(const HarmonicFn& f, const Vec& x) {
  switch (f.kind) {
    case HarmonicFn::Kind::ComplexPoly: {
      const std::complex<double> z(x.x(), x.y());
      const std::complex<double> w = std::pow(z, f.degree);
      return f.real_part ? w.real() : w.imag();
    }
    case HarmonicFn::Kind::Radial3D: {
      const double r = x.norm();
      if (r == 0.0) throw SingularPointError("radial 3-d solution is singular at r = 0");
      return -f.c1 / r + f.c2;
    }
    case HarmonicFn::Kind::RadialLog2D: {
      const double r = x.head<2>().norm();
      if (r == 0.0) throw SingularPointError("log solution is singular at r = 0");
      return f.c1 * std::log(r) + f.c2;
    }
    case HarmonicFn::Kind::FlowPastSphere: {
      const double r = x.norm();
      if (r == 0.0) throw SingularPointError("flow potential is singular at the sphere centre");
      return f.speed * x.z() * (1.0 + std::pow(f.sphere_radius, 3) / (2.0 * r * r * r));
    }
    case HarmonicFn::Kind::Linear:
      return f.lin0 + f.lin.dot(x);
    case HarmonicFn::Kind::Custom:
      return f.fn(x);
  }
  return 0.0;
}

Vec grad(const HarmonicFn& f, const Vec& x, double h) {
  switch (f.kind) {
    case HarmonicFn::Kind::ComplexPoly: {
      if (f.degree == 0) return Vec::Zero();
      const std::complex<double> z(x.x(), x.y());
      const std::complex<double> w = static_cast<double>(f.degree) * std::pow(z, f.degree - 1);
      // d/dx Re z^n = Re w, d/dy Re z^n = -Im w; for Im z^n: (Im w, Re w)
      if (f.real_part) return {w.real(), -w.imag(), 0.0};
      return {w.imag(), w.real(), 0.0};
    }
    case HarmonicFn::Kind::Radial3D: {
      const double r = x.norm();
      if (r == 0.0) throw SingularPointError("radial 3-d solution is singular at r = 0");
      return f.c1 * x / (r * r * r);
    }
    case HarmonicFn::Kind::RadialLog2D: {
      const double r2 = x.head<2>().squaredNorm();
      if (r2 == 0.0) throw SingularPointError("log solution is singular at r = 0");
      return {f.c1 * x.x() / r2, f.c1 * x.y() / r2, 0.0};
    }
    case HarmonicFn::Kind::FlowPastSphere: {
      const double r = x.norm();
      if (r == 0.0) throw SingularPointError("flow potential is singular at the sphere centre");
      const double r3 = r * r * r;
      const double c = f.speed * std::pow(f.sphere_radius, 3) / 2.0;
      Vec g = Vec::Zero();
      g.z() = f.speed + c / r3;
      g -= c * 3.0 * x.z() / (r3 * r * r) * x;
      return g;
    }
    case HarmonicFn::Kind::Linear:
      return f.lin;
    case HarmonicFn::Kind::Custom: {
      if (f.grad_fn) return f.grad_fn(x);
      Vec g = Vec::Zero();
      for (int i = 0; i < f.dim; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f.fn(xp) - f.fn(xm)) / (2.0 * h);
      }
      return g;
    }
  }
  return Vec::Zero();
}

double laplacian(const HarmonicFn& f, const Vec& x, double h) {
  require(h > 0, "laplacian: step must be positive");
  double acc = 0.0;
  const double fx = eval(f, x);
  for (int i = 0; i < f.dim; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    acc += (eval(f, xp) - 2.0 * fx + eval(f, xm)) / (h * h);
  }
  return acc;
}

CircleData circle_preset(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "const") {
    const double c = arg.empty() ? 1.0 : std::stod(arg);
    return {[c](double) { return c; }, spec};
  }
  if (head == "cos") {
    const int m = arg.empty() ? 1 : std::stoi(arg);
    return {[m](double th) { return std::cos(m * th); }, spec};
  }
  if (head == "sin") {
    const int m = arg.empty() ? 1 : std::stoi(arg);
    return {[m](double th) { return std::sin(m * th); }, spec};
  }
  if (head == "step") return {[](double th) { return std::cos(th) >= 0.0 ? 1.0 : -1.0; }, spec};
  throw std::invalid_argument("unknown circle boundary preset: " + spec);
}

SphereData sphere_preset(const std::string& spec, double R) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "const") {
    const double c = arg.empty() ? 1.0 : std::stod(arg);
    return {[c](const Vec&) { return c; }, spec};
  }
  if (head == "zdir") return {[R](const Vec& s) { return s.z() / R; }, spec};
  if (head == "step") return {[](const Vec& s) { return s.z() >= 0.0 ? 1.0 : -1.0; }, spec};
  throw std::invalid_argument("unknown sphere boundary preset: " + spec);
}

FourierCoeffs disc_fourier_solve(const CircleData& g, int modes, double R, int quad_n) {
  require(modes >= 1, "disc_fourier_solve: need at least one mode");
  require(R > 0, "disc_fourier_solve: radius must be positive");
  FourierCoeffs c;
  c.R = R;
  c.A.setZero(modes);
  c.B.setZero(modes);
  const double dth = 2.0 * kPi / quad_n;
  double a0 = 0.0;
  for (int j = 0; j < quad_n; ++j) {
    const double th = (j + 0.5) * dth;
    const double gv = g.g(th);
    a0 += gv;
    for (int m = 1; m <= modes; ++m) {
      c.A[m - 1] += gv * std::cos(m * th);
      c.B[m - 1] += gv * std::sin(m * th);
    }
  }
  c.A0 = a0 * dth / kPi;
  c.A *= dth / kPi;
  c.B *= dth / kPi;
  return c;
}

double disc_fourier_eval(const FourierCoeffs& c, double r, double theta) {
  if (r >= c.R) throw std::domain_error("disc_fourier_eval: point outside the open disc");
  double v = 0.5 * c.A0;
  double ratio = 1.0;
  for (int m = 1; m <= c.A.size(); ++m) {
    ratio *= r / c.R;
    v += ratio * (c.A[m - 1] * std::cos(m * theta) + c.B[m - 1] * std::sin(m * theta));
  }
  return v;
}

double disc_poisson_eval(const CircleData& g, double R, double r, double theta, int quad_n) {
  if (r >= R) throw std::domain_error("disc_poisson_eval: point outside the open disc");
  if (r > 0.95 * R) {
    // kernel is nearly singular; the Fourier series converges fast enough and
    // stays well conditioned
    int modes = 64;
    const double q = r / R;
    while (std::pow(q, modes) > 1e-14 && modes < 4096) modes *= 2;
    return disc_fourier_eval(disc_fourier_solve(g, modes, R, std::max(quad_n, 4 * modes)), r,
                             theta);
  }
  const double dth = 2.0 * kPi / quad_n;
  double acc = 0.0;
  for (int j = 0; j < quad_n; ++j) {
    const double beta = (j + 0.5) * dth;
    const double kern = (R * R - r * r) / (R * R - 2.0 * r * R * std::cos(theta - beta) + r * r);
    acc += kern * g.g(beta);
  }
  return acc * dth / (2.0 * kPi);
}

double ball_green(const Vec& x, const Vec& y, double R, const Vec& p) {
  const Vec xr = x - p, yr = y - p;
  if (xr.norm() >= R) throw std::domain_error("ball_green: x outside the open ball");
  if ((x - y).norm() == 0.0) throw std::invalid_argument("ball_green: coincident points");
  const double xn = xr.norm();
  if (xn == 0.0) return -1.0 / (4.0 * kPi * yr.norm()) + 1.0 / (4.0 * kPi * R);
  const Vec image = (R * R / (xn * xn)) * xr;
  return -1.0 / (4.0 * kPi * (x - y).norm()) +
         (R / xn) / (4.0 * kPi * (image - yr).norm());
}

double ball_poisson_eval(const SphereData& g, const Vec& x, double R, const Vec& p,
                         const DomainGrid& surface) {
  const double d2 = (x - p).squaredNorm();
  if (d2 >= R * R) throw std::domain_error("ball_poisson_eval: point outside the open ball");
  double acc = 0.0;
  for (int q = 0; q < surface.size(); ++q) {
    const Vec sigma = surface.point(q);
    acc += g.g(sigma) / std::pow((x - sigma).norm(), 3) * surface.weights[q];
  }
  return (R * R - d2) / (4.0 * kPi * R) * acc;
}

MvpResidual mvp_residual(const HarmonicFn& f, const Vec& center, const DomainGrid& vol,
                         const DomainGrid& surf) {
  const double fc = eval(f, center);
  double vnum = 0.0;
  for (int q = 0; q < vol.size(); ++q) vnum += eval(f, vol.point(q)) * vol.weights[q];
  double snum = 0.0;
  for (int q = 0; q < surf.size(); ++q) snum += eval(f, surf.point(q)) * surf.weights[q];
  return {std::abs(vnum / vol.weight_sum() - fc), std::abs(snum / surf.weight_sum() - fc)};
}

HarnackBounds harnack_bounds(double psi_at_center, double R, double d, int n) {
  require(R > 0 && n >= 2, "harnack_bounds: need R > 0, n >= 2");
  require(psi_at_center >= 0, "harnack_bounds: the function must be non-negative");
  if (d < 0 || d >= R) throw std::domain_error("harnack_bounds: need 0 <= d < R");
  const double rp = std::pow(R, n - 2);
  HarnackBounds b;
  b.factor_lower = rp * (R - d) / std::pow(R + d, n - 1);
  b.factor_upper = rp * (R + d) / std::pow(R - d, n - 1);
  b.lower = b.factor_lower * psi_at_center;
  b.upper = b.factor_upper * psi_at_center;
  return b;
}

MaxPrincipleResult max_principle_check(const HarmonicFn& f, const DomainGrid& interior,
                                       const DomainGrid& boundary, double p) {
  auto moment = [p](double v) { return p == 1.0 ? v : std::pow(std::abs(v), p); };
  MaxPrincipleResult r;
  r.interior_max = -1e308;
  r.interior_min = 1e308;
  r.boundary_max = -1e308;
  r.boundary_min = 1e308;
  for (int q = 0; q < interior.size(); ++q) {
    const double v = moment(eval(f, interior.point(q)));
    r.interior_max = std::max(r.interior_max, v);
    r.interior_min = std::min(r.interior_min, v);
  }
  for (int q = 0; q < boundary.size(); ++q) {
    const double v = moment(eval(f, boundary.point(q)));
    r.boundary_max = std::max(r.boundary_max, v);
    r.boundary_min = std::min(r.boundary_min, v);
  }
  const double spread = std::max(r.interior_max, r.boundary_max) -
                        std::min(r.interior_min, r.boundary_min);
  const double scale = std::max({std::abs(r.interior_max), std::abs(r.boundary_max), 1.0});
  if (spread <= 1e-12 * scale) {
    r.constant = true;
    r.holds = true;
    return r;
  }
  r.holds = r.interior_max < r.boundary_max && r.interior_min > r.boundary_min;
  return r;
}

double dirichlet_energy(const HarmonicFn& f, const DomainGrid& grid, double h) {
  double acc = 0.0;
  for (int q = 0; q < grid.size(); ++q) {
    const Vec g = grad(f, grid.point(q), h);
    double sq = 0.0;
    for (int i = 0; i < f.dim; ++i) sq += g[i] * g[i];
    acc += 0.5 * sq * grid.weights[q];
  }
  return acc;
}

EnergyComparison energy_comparison(const HarmonicFn& f, const HarmonicFn& phi,
                                   const DomainGrid& vol, const DomainGrid& boundary,
                                   double boundary_tol, double h) {
  for (int q = 0; q < boundary.size(); ++q) {
    const Vec x = boundary.point(q);
    if (std::abs(eval(f, x) - eval(phi, x)) > boundary_tol)
      throw InvalidComparisonError("energy_comparison: boundary values do not match");
  }
  return {dirichlet_energy(f, vol, h), dirichlet_energy(phi, vol, h)};
}

CacciopolliResult cacciopolli_check(const HarmonicFn& f, double R, const DomainGrid& inner,
                                    const DomainGrid& annulus, double h) {
  CacciopolliResult r;
  for (int q = 0; q < inner.size(); ++q) {
    const Vec g = grad(f, inner.point(q), h);
    double sq = 0.0;
    for (int i = 0; i < f.dim; ++i) sq += g[i] * g[i];
    r.lhs += sq * inner.weights[q];
  }
  for (int q = 0; q < annulus.size(); ++q) {
    const double v = eval(f, annulus.point(q));
    r.rhs += v * v * annulus.weights[q];
  }
  r.rhs *= 4.0 / (R * R);
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-9) + 1e-12;
  return r;
}

namespace {

double grad_sq(const HarmonicFn& f, const Vec& x, double h) {
  const Vec g = grad(f, x, h);
  double sq = 0.0;
  for (int i = 0; i < f.dim; ++i) sq += g[i] * g[i];
  return sq;
}

}  // namespace

double half_laplacian_grad_sq(const HarmonicFn& f, const Vec& x, double h) {
  double acc = 0.0;
  const double g0 = grad_sq(f, x, h);
  for (int i = 0; i < f.dim; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    acc += (grad_sq(f, xp, h) - 2.0 * g0 + grad_sq(f, xm, h)) / (h * h);
  }
  return 0.5 * acc;
}

double hessian_norm_sq(const HarmonicFn& f, const Vec& x, double h) {
  double acc = 0.0;
  const double f0 = eval(f, x);
  for (int i = 0; i < f.dim; ++i) {
    for (int j = 0; j < f.dim; ++j) {
      double hij;
      if (i == j) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        hij = (eval(f, xp) - 2.0 * f0 + eval(f, xm)) / (h * h);
      } else {
        Vec xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += h;
        xpp[j] += h;
        xpm[i] += h;
        xpm[j] -= h;
        xmp[i] -= h;
        xmp[j] += h;
        xmm[i] -= h;
        xmm[j] -= h;
        hij = (eval(f, xpp) - eval(f, xpm) - eval(f, xmp) + eval(f, xmm)) / (4.0 * h * h);
      }
      acc += hij * hij;
    }
  }
  return acc;
}

double bochner_residual(const HarmonicFn& f, const Vec& x, double h) {
  if (h < 1e-8) throw std::invalid_argument("bochner_residual: step underflow");
  const double lhs = half_laplacian_grad_sq(f, x, h);
  // <grad (Lap f), grad f>; the inner Laplacian uses a coarser step, since
  // its rounding error would otherwise be amplified by the outer 1/(2h)
  const double hl = 10.0 * h;
  Vec grad_lap = Vec::Zero();
  for (int i = 0; i < f.dim; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad_lap[i] = (laplacian(f, xp, hl) - laplacian(f, xm, hl)) / (2.0 * h);
  }
  const Vec g = grad(f, x, h);
  double cross = 0.0;
  for (int i = 0; i < f.dim; ++i) cross += grad_lap[i] * g[i];
  return std::abs(lhs - cross - hessian_norm_sq(f, x, h));
}

double gradient_estimate_ratio(const HarmonicFn& f, double R, const DomainGrid& inner,
                               const DomainGrid& outer, double h) {
  double sup_grad = 0.0;
  for (int q = 0; q < inner.size(); ++q)
    sup_grad = std::max(sup_grad, std::sqrt(grad_sq(f, inner.point(q), h)));
  double sup_f = 0.0;
  for (int q = 0; q < outer.size(); ++q)
    sup_f = std::max(sup_f, std::abs(eval(f, outer.point(q))));
  if (sup_f == 0.0) return 0.0;
  return sup_grad * R / sup_f;
}

}  // namespace stochpot::harmonic
