#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "stochpot/geometry.hpp"

namespace stochpot::harmonic {

using geom::DomainGrid;
using geom::Vec;

// Built-in harmonic functions plus a Custom escape hatch. Planar variants
// read (x, y); solid variants read all three coordinates.
struct HarmonicFn {
  enum class Kind { ComplexPoly, Radial3D, RadialLog2D, FlowPastSphere, Linear, Custom };

  Kind kind = Kind::Linear;
  int dim = 3;

  int degree = 1;          // ComplexPoly
  bool real_part = true;   // ComplexPoly
  double c1 = 0.0, c2 = 0.0;            // Radial3D: -c1/r + c2; RadialLog2D: c1 log r + c2
  double speed = 1.0, sphere_radius = 1.0;  // FlowPastSphere
  double lin0 = 0.0;
  Vec lin = Vec::Zero();   // Linear: lin0 + lin . x

  std::function<double(const Vec&)> fn;   // Custom
  std::function<Vec(const Vec&)> grad_fn; // Custom, optional analytic gradient

  static HarmonicFn complex_poly(int n, bool real_part);
  static HarmonicFn radial3d(double c1, double c2);
  static HarmonicFn radial_log2d(double c1, double c2);
  // axial flow past a sphere of radius R: u z (1 + R^3 / (2 |x|^3))
  static HarmonicFn flow_past_sphere(double u, double R);
  static HarmonicFn linear(double c0, const Vec& coeffs, int dim = 3);
  static HarmonicFn custom(int dim, std::function<double(const Vec&)> f,
                           std::function<Vec(const Vec&)> grad = nullptr);

  bool has_analytic_gradient() const;
  std::string describe() const;
};

struct SingularPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double eval(const HarmonicFn& f, const Vec& x);
// analytic for built-ins, central differences with step h otherwise
Vec grad(const HarmonicFn& f, const Vec& x, double h = 1e-5);
// always the second-order central-difference Laplacian; serves as the
// harmonicity residual check
double laplacian(const HarmonicFn& f, const Vec& x, double h = 1e-4);

// Boundary data on a circle (angle-parameterized) and a sphere
// (surface-point-parameterized).
struct CircleData {
  std::function<double(double)> g;
  std::string name;
};
struct SphereData {
  std::function<double(const Vec&)> g;  // called with the boundary point
  std::string name;
};

// named presets: "const:c", "cos:m", "sin:m", "step" (sign of cos theta)
CircleData circle_preset(const std::string& spec);
SphereData sphere_preset(const std::string& spec, double R);

struct FourierCoeffs {
  double A0 = 0.0;
  Eigen::VectorXd A, B;  // m = 1..M
  double R = 1.0;
};

FourierCoeffs disc_fourier_solve(const CircleData& g, int modes, double R = 1.0,
                                 int quad_n = 4096);
double disc_fourier_eval(const FourierCoeffs& c, double r, double theta);

// Poisson integral by the periodic trapezoid rule; switches to the Fourier
// representation for r > 0.95 R where the kernel is nearly singular.
double disc_poisson_eval(const CircleData& g, double R, double r, double theta,
                         int quad_n = 4096);

// Green function of the ball B_R(p) in R^3
double ball_green(const Vec& x, const Vec& y, double R, const Vec& p);
// Poisson formula for the ball in R^3 over a surface quadrature grid
double ball_poisson_eval(const SphereData& g, const Vec& x, double R, const Vec& p,
                         const DomainGrid& surface);

struct MvpResidual {
  double volume = 0.0;
  double surface = 0.0;
};
MvpResidual mvp_residual(const HarmonicFn& f, const Vec& center, const DomainGrid& vol,
                         const DomainGrid& surf);

struct HarnackBounds {
  double lower = 0.0;
  double upper = 0.0;
  double factor_lower = 0.0;  // X(R, d, n)
  double factor_upper = 0.0;  // Y(R, d, n)
};
// X = R^{n-2}(R-d)/(R+d)^{n-1}, Y = R^{n-2}(R+d)/(R-d)^{n-1}
HarnackBounds harnack_bounds(double psi_at_center, double R, double d, int n);

struct MaxPrincipleResult {
  bool holds = false;
  bool constant = false;
  double interior_max = 0.0, interior_min = 0.0;
  double boundary_max = 0.0, boundary_min = 0.0;
};
// p = 1 checks f itself, p > 1 checks |f|^p
MaxPrincipleResult max_principle_check(const HarmonicFn& f, const DomainGrid& interior,
                                       const DomainGrid& boundary, double p = 1.0);

double dirichlet_energy(const HarmonicFn& f, const DomainGrid& grid, double h = 1e-5);

struct EnergyComparison {
  double harmonic_energy = 0.0;
  double competitor_energy = 0.0;
};
struct InvalidComparisonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
EnergyComparison energy_comparison(const HarmonicFn& f, const HarmonicFn& phi,
                                   const DomainGrid& vol, const DomainGrid& boundary,
                                   double boundary_tol = 1e-9, double h = 1e-5);

struct CacciopolliResult {
  double lhs = 0.0;  // integral of |grad f|^2 over B_R
  double rhs = 0.0;  // (4/R^2) integral of f^2 over B_2R \ B_R
  bool holds = false;
};
CacciopolliResult cacciopolli_check(const HarmonicFn& f, double R, const DomainGrid& inner,
                                    const DomainGrid& annulus, double h = 1e-5);

// |(1/2) Lap |grad f|^2 - <grad Lap f, grad f> - ||Hess f||^2| by nested
// central differences
double bochner_residual(const HarmonicFn& f, const Vec& x, double h = 1e-4);
// the flat identity's left side, (1/2) Lap |grad f|^2, exposed for the
// stochastic shift
double half_laplacian_grad_sq(const HarmonicFn& f, const Vec& x, double h = 1e-4);
double hessian_norm_sq(const HarmonicFn& f, const Vec& x, double h = 1e-4);

double gradient_estimate_ratio(const HarmonicFn& f, double R, const DomainGrid& inner,
                               const DomainGrid& outer, double h = 1e-5);

}  // namespace stochpot::harmonic
