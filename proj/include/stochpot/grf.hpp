#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stochpot/geometry.hpp"

namespace stochpot::grf {

using geom::DomainGrid;
using geom::Vec;

enum class KernelKind { Exponential, GaussianCorr, PowerLaw, WhiteNoise, Separable };

enum class Frame { Spherical, Cylindrical, Polar };

// One separable correlation factor in a single curvilinear coordinate,
// normalized to 1 at coincident arguments. Angular factors use the periodic
// distance min(|u-v|, period-|u-v|).
struct SeparableFactor {
  enum class Shape { Gaussian, Exponential } shape = Shape::Gaussian;
  double scale = 1.0;
  bool periodic = false;
  double period = 0.0;

  static SeparableFactor gaussian(double scale, bool periodic = false, double period = 0.0);
  static SeparableFactor exponential(double scale, bool periodic = false, double period = 0.0);

  double operator()(double u, double v) const;
  double d_left(double u, double v) const;    // d/du
  double d_right(double u, double v) const;   // d/dv
  double d_left_right(double u, double v) const;
  bool smooth_at_coincidence() const { return shape == Shape::Gaussian; }
};

// The regulated 2-point covariance family. Exponential/GaussianCorr/PowerLaw
// operate on Cartesian separation; Separable factors over a curvilinear
// frame: spherical K(r,r')H(theta,theta')Q(phi,phi'), cylindrical
// K(r,r')Z(z,z'), polar K(r,r')H(theta,theta').
struct CovKernel {
  KernelKind kind = KernelKind::Exponential;
  double alpha = 1.0;  // coincident-point variance
  double xi = 1.0;     // correlation length
  double p = 1.0;      // PowerLaw exponent

  double lambda = 1.0;  // Separable amplitude
  Frame frame = Frame::Spherical;
  SeparableFactor f1, f2, f3;

  static CovKernel exponential(double alpha, double xi);
  static CovKernel gaussian(double alpha, double xi);
  static CovKernel power_law(double xi, double p);
  static CovKernel white_noise();
  static CovKernel separable(Frame frame, SeparableFactor f1, SeparableFactor f2,
                             SeparableFactor f3, double lambda);

  std::string describe() const;
};

// Pointwise covariance value. Throws kernel-specific errors for PowerLaw at
// coincident points and for any WhiteNoise evaluation.
double kernel_eval(const CovKernel& k, const Vec& x, const Vec& y);

struct SingularKernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPointwiseKernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChartSingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Admissibility {
  bool admissible = false;
  std::string reason;
};

// Kolmogorov-continuity verdict per kernel family.
Admissibility kc_admissible(const CovKernel& k);

struct FieldSample {
  std::shared_ptr<const DomainGrid> grid;
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
  std::string kernel_desc;
};

inline constexpr int kDefaultGridCap = 4096;

// Draws zero-mean Gaussian fields with the exact grid covariance matrix via a
// cached Cholesky factor with escalating diagonal jitter (1e-10*alpha up to
// 1e-6*alpha). Sample i is reproducible from (seed, i, grid, kernel) alone.
class FieldSampler {
 public:
  FieldSampler(CovKernel kernel, std::shared_ptr<const DomainGrid> grid,
               int grid_cap = kDefaultGridCap);

  FieldSample sample(std::uint64_t seed, std::uint64_t sample_index = 0) const;
  // standard normal draw mapped through the factor; z must have grid->size() entries
  Eigen::VectorXd transform(const Eigen::VectorXd& z) const;
  Eigen::VectorXd standard_normals(std::uint64_t seed, std::uint64_t sample_index) const;

  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  double applied_jitter() const { return jitter_; }
  const CovKernel& kernel() const { return kernel_; }
  const std::shared_ptr<const DomainGrid>& grid() const { return grid_; }

 private:
  CovKernel kernel_;
  std::shared_ptr<const DomainGrid> grid_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  double jitter_ = 0.0;
};

// Builds the dense covariance matrix C_ij = kernel(x_i, x_j) and its Cholesky
// factor with the escalating-jitter rule shared by all samplers.
Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd cov, double alpha_scale,
                                     double* applied_jitter = nullptr);

// Moment conventions. paper_moment: (alpha^{Q/2} + (-1)^Q alpha^{Q/2})/2,
// i.e. alpha^{Q/2} for even Q and 0 for odd. gaussian_moment: the true scalar
// Gaussian moment (Q-1)!! alpha^{Q/2} for even Q.
double paper_moment(double alpha, int Q);
double gaussian_moment(double alpha, int Q);

// Riemann-sum functional of one realization over its grid.
double stochastic_integral(const FieldSample& s, const DomainGrid& grid);
// Closed-form covariance of two grid integrals: double quadrature of the
// kernel over gridA x gridB.
double integral_covariance_closed(const CovKernel& k, const DomainGrid& a, const DomainGrid& b);

FieldSample superpose(std::span<const FieldSample> fields, std::span<const double> coeffs);
double predicted_variance(std::span<const double> coeffs, std::span<const double> variances);

struct ComplexPairCov {
  double zz;     // E[Z x Z]
  double zzbar;  // E[Z x Z*]
};
ComplexPairCov complex_pair_covariances(double alphaA, double betaB);

// Derivative selectors in curvilinear frames; the angular selectors carry the
// metric factors 1/r and 1/(r sin theta).
enum class DerivSelector { Id, Radial, Polar, Azimuthal, Axial };

struct DerivCovSpec {
  Frame frame = Frame::Spherical;
  DerivSelector left = DerivSelector::Id;
  DerivSelector right = DerivSelector::Id;
};

// E[ D_left IF(left_pt) D_right IF(right_pt) ] for a Separable kernel; points
// are given in frame coordinates: (r,theta,phi) spherical, (r,z) cylindrical,
// (r,theta) polar.
double separable_derivative_covariance(const CovKernel& k, const DerivCovSpec& spec,
                                       const Vec& left_pt, const Vec& right_pt);

// --- analytic cross-covariances of isotropic C^2 kernels (GaussianCorr) ---

// cov(IF(x), IF(y)); same as kernel_eval
double cov_value_value(const CovKernel& k, const Vec& x, const Vec& y);
// cov(d_i IF(x), IF(y))
double cov_grad_value(const CovKernel& k, int i, const Vec& x, const Vec& y);
// cov(d_i IF(x), d_j IF(y))
double cov_grad_grad(const CovKernel& k, int i, int j, const Vec& x, const Vec& y);
// per-component gradient variance at coincidence: 2 alpha / xi^2 for GaussianCorr
double grad_variance_component(const CovKernel& k);
// E[d_i d_j IF(x) d_k d_l IF(x)] at coincidence
double cov_hess_hess_coincident(const CovKernel& k, int i, int j, int kk, int ll);
// Hessian constant: sum_ij E[(d_i d_j IF)^2] / n = 4 alpha (n+2) / xi^4
double hessian_constant(const CovKernel& k, int n);
// gradient-of-Laplacian constant: 8 alpha (n+2)(n+4) / xi^6
double third_derivative_constant(const CovKernel& k, int n);

// Joint sampler for (field, gradient) values of a mean-square differentiable
// kernel at a fixed point set. Row layout of a draw: first the field values
// at each point (if with_field), then gradient components point-major.
class GradientFieldSampler {
 public:
  GradientFieldSampler(CovKernel kernel, std::vector<Vec> points, int dim, bool with_field);

  Eigen::VectorXd sample(std::uint64_t seed, std::uint64_t sample_index) const;
  int n_points() const { return static_cast<int>(points_.size()); }
  int dim() const { return dim_; }
  bool with_field() const { return with_field_; }
  double field_at(const Eigen::VectorXd& draw, int point) const;
  Vec gradient_at(const Eigen::VectorXd& draw, int point) const;

 private:
  CovKernel kernel_;
  std::vector<Vec> points_;
  int dim_;
  bool with_field_;
  Eigen::MatrixXd chol_;
};

void write_csv(const FieldSample& s, std::ostream& os);

}  // namespace stochpot::grf
