#pragma once

#include <cstdint>
#include <vector>

#include "stochpot/geometry.hpp"
#include "stochpot/grf.hpp"
#include "stochpot/harmonic.hpp"
#include "stochpot/potentials.hpp"
#include "stochpot/report.hpp"

namespace stochpot::stoch {

using geom::Curve;
using geom::Domain;
using geom::DomainGrid;
using geom::Vec;
using grf::CovKernel;
using harmonic::HarmonicFn;

enum class MomentConvention { Paper, Gaussian };

// Noise scales of a field and its derivatives: alpha the field variance,
// beta the per-component gradient variance, theta/xi_c the third- and
// second-derivative constants, lambda the perturbation amplitude.
struct NoiseConstants {
  double alpha = 1.0;
  double beta = 1.0;
  double theta = 0.0;
  double xi_c = 0.0;
  double lambda = 1.0;

  static NoiseConstants from_gaussian_kernel(const CovKernel& k, int n, double lambda);
};

// sum_{Q=0}^{P} C(P,Q) |base|^{P-Q} lambda^Q m(alpha, Q)
double binomial_moment(double base_magnitude, double lambda, double alpha, int P,
                       MomentConvention conv);

// ---- randomly perturbed ball averages (mean value property) ----
struct PerturbedMvpParams {
  HarmonicFn base = HarmonicFn::linear(0.0, Vec::Zero());
  CovKernel kernel = CovKernel::exponential(1.0, 1.0);
  double lambda = 1.0;
  Vec center_a = Vec::Zero();
  Vec center_b = Vec(0.25, 0.0, 0.0);
  double R = 0.5;
  int dim = 3;
  int resolution = 10;
  long n_samples = 100000;
  std::uint64_t seed = 1;
};
ReportSet perturbed_mvp(const PerturbedMvpParams& p);

// ---- averaged maximum principle ----
struct AveragedMaxPrincipleParams {
  HarmonicFn base = HarmonicFn::complex_poly(2, true);
  CovKernel kernel = CovKernel::exponential(1.0, 1.0);
  double lambda = 0.5;
  Domain domain = Domain::disc(1.0);
  int resolution = 12;
  std::vector<int> orders = {1, 2};
  long n_samples = 20000;
  std::uint64_t seed = 2;
};
ReportSet averaged_max_principle(const AveragedMaxPrincipleParams& p);

// ---- stochastic line integrals of perturbed gradients ----
struct LineIntegralParams {
  HarmonicFn base = HarmonicFn::complex_poly(2, true);
  CovKernel kernel = CovKernel::gaussian(1.0, 0.5);
  double lambda = 1.0;
  Curve open_curve = Curve::segment(Vec(-0.5, -0.25, 0), Vec(0.5, 0.5, 0), 64);
  Curve loop = Curve::circle(0.5, Vec::Zero(), 64);
  long n_samples = 20000;
  std::uint64_t seed = 3;
};
ReportSet stochastic_line_integral(const LineIntegralParams& p);

// ---- stochastically averaged Dirichlet energy ----
struct SadeiParams {
  HarmonicFn base = HarmonicFn::linear(0.0, Vec::Zero());
  CovKernel kernel = CovKernel::gaussian(1.0, 1.0);
  double lambda = 1.0;
  Domain domain = Domain::ball(3, 1.0);
  int resolution = 8;
  long n_samples = 10000;
  std::uint64_t seed = 4;
};
ReportSet sadei(const SadeiParams& p);

// ---- stochastically averaged Cacciopolli estimate ----
struct CacciopolliCondition {
  double lhs = 0.0;        // (R^2/4)(beta/alpha)
  double rhs = 0.0;        // 2^n - 1
  double threshold_R = 0;  // radius solving the condition with equality
  bool holds = false;
};
CacciopolliCondition stochastic_cacciopolli_condition(int n, double R, double alpha, double beta);

struct StochasticCacciopolliParams {
  HarmonicFn base = HarmonicFn::linear(0.0, Vec(1, 0, 0));
  CovKernel kernel = CovKernel::gaussian(1.0, 2.0);
  double lambda = 1.0;
  double R = 1.0;
  int dim = 3;
  int resolution = 8;
  long n_samples = 400;
  int n_seeds = 10;
  std::uint64_t seed = 5;
};
ReportSet stochastic_cacciopolli(const StochasticCacciopolliParams& p);

// ---- turbulent potential flow ----
struct TurbulenceParams {
  HarmonicFn base = HarmonicFn::flow_past_sphere(1.0, 1.0);
  CovKernel kernel = CovKernel::gaussian(1.0, 0.3);
  double lambda = 0.5;
  Vec x = Vec(0, 0, 2.0);
  Vec y = Vec(0.2, 0, 2.0);
  double fluid_density = 1.0;
  long n_samples = 100000;
  std::uint64_t seed = 6;
  // cylinder variant
  double cyl_radius = 1.0;
  double cyl_z0 = -0.2, cyl_z1 = 0.3;
};
ReportSet turbulent_flow_stats(const TurbulenceParams& p);

// ---- randomly perturbed Riesz potentials ----
struct StochasticRieszParams {
  potentials::RieszSpec spec;
  CovKernel kernel = CovKernel::exponential(1.0, 0.5);
  double lambda = 0.5;
  Vec x = Vec(0, 0, 2.0);
  Vec x2 = Vec(0, 0, 2.5);
  int P = 4;
  long n_samples = 50000;
  std::uint64_t seed = 7;
};
ReportSet stochastic_riesz_moments(const StochasticRieszParams& p);

// ---- Newtonian potential with noisy density, forces, Laplacian moments ----
struct NoisyNewtonParams {
  double R = 1.0, rho = 1.0, C = 1.0;
  CovKernel kernel = CovKernel::exponential(1.0, 0.5);
  double lambda = 0.5;
  double mass = 1.0;
  Vec x = Vec(0, 0, 2.0);
  Vec x2 = Vec(0, 0, 4.0);
  int P = 2;
  int resolution = 12;
  long n_samples = 50000;
  std::uint64_t seed = 8;
};
ReportSet noisy_density_newton(const NoisyNewtonParams& p);

// ---- stochastically averaged Harnack inequality ----
struct StochasticHarnackParams {
  double psi0 = 1.0;  // base value at the centre, non-negative
  HarmonicFn base = HarmonicFn::linear(1.0, Vec(0, 0, 0.5));
  CovKernel kernel = CovKernel::exponential(1.0, 1.0);
  double lambda = 0.25;
  double R = 1.0;
  double d = 0.5;
  int n = 3;
  int P = 2;
  long n_samples = 100000;
  std::uint64_t seed = 9;
};
struct HarnackSums {
  double lower = 0.0, middle = 0.0, upper = 0.0;
};
HarnackSums stochastic_harnack_sums(double psi0, double psi_x, double factor_lower,
                                    double factor_upper, double lambda, double alpha, int P,
                                    MomentConvention conv);
ReportSet stochastic_harnack(const StochasticHarnackParams& p);

// ---- stochastically averaged Bochner identity ----
struct StochasticBochnerParams {
  HarmonicFn base = HarmonicFn::complex_poly(2, true);
  CovKernel kernel = CovKernel::gaussian(1.0, 1.0);
  double lambda = 0.5;
  Vec x = Vec(0.3, 0.2, 0.0);
  int n = 2;
  double fd_step_factor = 0.05;  // Hessian stencil step, in units of xi
  long n_samples = 30000;
  std::uint64_t seed = 10;
};
ReportSet stochastic_bochner(const StochasticBochnerParams& p);

// ---- noisy boundary data on the ball ----
struct NoisyBoundaryBallParams {
  harmonic::SphereData g;
  double R = 1.0;
  double lambda = 0.5;
  double alpha = 1.0, eta = 0.5;  // exponential kernel in chordal distance
  std::vector<double> a_over_R = {0.5, 0.8, 0.95};
  int P = 2;
  int resolution = 24;
  long n_samples = 50000;
  std::uint64_t seed = 11;
};
ReportSet noisy_boundary_ball(const NoisyBoundaryBallParams& p);

// ---- noisy boundary data on the disc ----
struct NoisyBoundaryDiscParams {
  harmonic::CircleData g;
  double R = 1.0;
  double lambda = 0.5;
  double alpha = 1.0, eta = 0.5;
  bool chordal = false;  // angular distance by default
  double r = 0.5, theta = 0.7;
  int P = 4;
  int n_boundary = 512;
  long n_samples = 50000;
  std::uint64_t seed = 12;
  double fd_step = 0.02;
  int n_interior_checks = 5;
};
ReportSet noisy_boundary_disc(const NoisyBoundaryDiscParams& p);

// literal evaluation of the paper's arctan angular-integral expression for
// the disc noise factor; reported as a note next to the quadrature oracle
double disc_paper_arctan_factor(double R, double r, double theta);

// literal evaluation of the paper's log closed form for the sphere surface
// integral of 1/|x-y|^3 at distance a from the centre
double ball_paper_log_integral(double R, double a);
// the exact value of that surface integral, 4 pi R / (R^2 - a^2)
double ball_surface_integral_closed(double R, double a);

// the kernel matrix of boundary noise on a circle of radius R: alpha *
// exp(-d/eta) with d the angular (default) or chordal distance
Eigen::MatrixXd circle_noise_covariance(int n_nodes, double R, double alpha, double eta,
                                        bool chordal);

}  // namespace stochpot::stoch
