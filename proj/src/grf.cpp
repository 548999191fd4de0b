#include "stochpot/grf.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "stochpot/rng.hpp"

namespace stochpot::grf {

namespace {
void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double periodic_delta(double u, double v, double period) {
  double d = std::abs(u - v);
  d = std::fmod(d, period);
  return std::min(d, period - d);
}

// signed separation used inside derivative formulas; for periodic factors the
// wrapped representative in (-period/2, period/2]
double signed_delta(double u, double v, bool periodic, double period) {
  double d = u - v;
  if (!periodic) return d;
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}
}  // namespace

SeparableFactor SeparableFactor::gaussian(double scale, bool periodic, double period) {
  require(scale > 0, "separable factor: scale must be positive");
  SeparableFactor f;
  f.shape = Shape::Gaussian;
  f.scale = scale;
  f.periodic = periodic;
  f.period = period;
  return f;
}

SeparableFactor SeparableFactor::exponential(double scale, bool periodic, double period) {
  require(scale > 0, "separable factor: scale must be positive");
  SeparableFactor f;
  f.shape = Shape::Exponential;
  f.scale = scale;
  f.periodic = periodic;
  f.period = period;
  return f;
}

double SeparableFactor::operator()(double u, double v) const {
  const double d = periodic ? periodic_delta(u, v, period) : std::abs(u - v);
  if (shape == Shape::Gaussian) return std::exp(-d * d / (scale * scale));
  return std::exp(-d / scale);
}

double SeparableFactor::d_left(double u, double v) const {
  const double d = signed_delta(u, v, periodic, period);
  if (shape == Shape::Gaussian) return -2.0 * d / (scale * scale) * std::exp(-d * d / (scale * scale));
  // exponential factor: derivative of exp(-|d|/scale), sign from |d|'
  if (d == 0.0) return 0.0;
  const double s = d > 0 ? 1.0 : -1.0;
  return -s / scale * std::exp(-std::abs(d) / scale);
}

double SeparableFactor::d_right(double u, double v) const { return -d_left(u, v); }

double SeparableFactor::d_left_right(double u, double v) const {
  const double d = signed_delta(u, v, periodic, period);
  const double s2 = scale * scale;
  if (shape == Shape::Gaussian) {
    // d/du d/dv exp(-(u-v)^2/s^2) = (2/s^2 - 4 d^2/s^4) exp(-d^2/s^2)
    return (2.0 / s2 - 4.0 * d * d / (s2 * s2)) * std::exp(-d * d / s2);
  }
  if (d == 0.0)
    throw SingularKernelError("exponential factor has no mean-square derivative at coincidence");
  return -std::exp(-std::abs(d) / scale) / s2;
}

CovKernel CovKernel::exponential(double alpha, double xi) {
  require(alpha > 0 && xi > 0, "exponential kernel: alpha, xi must be positive");
  CovKernel k;
  k.kind = KernelKind::Exponential;
  k.alpha = alpha;
  k.xi = xi;
  return k;
}

CovKernel CovKernel::gaussian(double alpha, double xi) {
  require(alpha > 0 && xi > 0, "gaussian kernel: alpha, xi must be positive");
  CovKernel k;
  k.kind = KernelKind::GaussianCorr;
  k.alpha = alpha;
  k.xi = xi;
  return k;
}

CovKernel CovKernel::power_law(double xi, double p) {
  require(xi > 0 && p >= 1, "power-law kernel: xi > 0, p >= 1");
  CovKernel k;
  k.kind = KernelKind::PowerLaw;
  k.xi = xi;
  k.p = p;
  k.alpha = 0.0;
  return k;
}

CovKernel CovKernel::white_noise() {
  CovKernel k;
  k.kind = KernelKind::WhiteNoise;
  k.alpha = 0.0;
  return k;
}

CovKernel CovKernel::separable(Frame frame, SeparableFactor f1, SeparableFactor f2,
                               SeparableFactor f3, double lambda) {
  require(lambda > 0, "separable kernel: lambda must be positive");
  CovKernel k;
  k.kind = KernelKind::Separable;
  k.frame = frame;
  k.f1 = f1;
  k.f2 = f2;
  k.f3 = f3;
  k.lambda = lambda;
  k.alpha = lambda;  // regulated coincident value
  return k;
}

std::string CovKernel::describe() const {
  char buf[128];
  switch (kind) {
    case KernelKind::Exponential:
      std::snprintf(buf, sizeof buf, "exponential(alpha=%g xi=%g)", alpha, xi);
      break;
    case KernelKind::GaussianCorr:
      std::snprintf(buf, sizeof buf, "gaussian(alpha=%g xi=%g)", alpha, xi);
      break;
    case KernelKind::PowerLaw:
      std::snprintf(buf, sizeof buf, "power-law(xi=%g p=%g)", xi, p);
      break;
    case KernelKind::WhiteNoise:
      std::snprintf(buf, sizeof buf, "white-noise");
      break;
    case KernelKind::Separable:
      std::snprintf(buf, sizeof buf, "separable(lambda=%g)", lambda);
      break;
  }
  return buf;
}

namespace {

// frame coordinates of a separable kernel argument
double separable_eval(const CovKernel& k, const Vec& x, const Vec& y) {
  // frame coordinates live in the components directly: (r, theta, phi)
  // spherical, (r, z) cylindrical, (r, theta) polar
  double v = k.lambda * k.f1(x[0], y[0]) * k.f2(x[1], y[1]);
  if (k.frame == Frame::Spherical) v *= k.f3(x[2], y[2]);
  return v;
}

}  // namespace

double kernel_eval(const CovKernel& k, const Vec& x, const Vec& y) {
  switch (k.kind) {
    case KernelKind::Exponential:
      return k.alpha * std::exp(-(x - y).norm() / k.xi);
    case KernelKind::GaussianCorr:
      return k.alpha * std::exp(-(x - y).squaredNorm() / (k.xi * k.xi));
    case KernelKind::PowerLaw: {
      const double d = (x - y).norm();
      if (d == 0.0) throw SingularKernelError("power-law kernel blows up at coincident points");
      return std::pow(k.xi, k.p) / std::pow(d, k.p);
    }
    case KernelKind::WhiteNoise:
      throw NonPointwiseKernelError("white noise has no pointwise covariance value");
    case KernelKind::Separable:
      return separable_eval(k, x, y);
  }
  return 0.0;
}

Admissibility kc_admissible(const CovKernel& k) {
  switch (k.kind) {
    case KernelKind::Exponential:
      return {true, "regulated colored noise; mean-square increments vanish with separation"};
    case KernelKind::GaussianCorr:
      return {true, "regulated Gaussian-correlated noise; smooth at coincidence"};
    case KernelKind::PowerLaw:
      return {false, "covariance blows up at coincident points"};
    case KernelKind::WhiteNoise:
      return {false, "Kolmogorov continuity condition is not satisfied"};
    case KernelKind::Separable:
      return {true, "all factors bounded and equal to 1 at coincidence"};
  }
  return {false, "unknown kernel"};
}

Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd cov, double alpha_scale,
                                     double* applied_jitter) {
  const int n = static_cast<int>(cov.rows());
  double jitter = 1e-10 * alpha_scale;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::MatrixXd trial = cov;
    trial.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(trial);
    if (llt.info() == Eigen::Success) {
      if (applied_jitter) *applied_jitter = jitter;
      return llt.matrixL();
    }
    jitter *= 10.0;
    if (jitter > 1e-6 * alpha_scale * 1.0001) break;
  }
  throw FactorizationError("covariance matrix of " + std::to_string(n) +
                           " points is not positive semidefinite after jitter escalation");
}

FieldSampler::FieldSampler(CovKernel kernel, std::shared_ptr<const DomainGrid> grid, int grid_cap)
    : kernel_(std::move(kernel)), grid_(std::move(grid)) {
  const auto verdict = kc_admissible(kernel_);
  if (!verdict.admissible)
    throw std::invalid_argument("cannot sample inadmissible kernel: " + verdict.reason);
  const int n = grid_->size();
  if (n > grid_cap)
    throw std::length_error("grid of " + std::to_string(n) +
                            " points exceeds the dense factorization cap");
  cov_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = kernel_eval(kernel_, grid_->point(i), grid_->point(j));
      cov_(i, j) = v;
      cov_(j, i) = v;
    }
  }
  const double scale = kernel_.kind == KernelKind::Separable ? kernel_.lambda : kernel_.alpha;
  chol_ = cholesky_with_jitter(cov_, scale, &jitter_);
}

Eigen::VectorXd FieldSampler::standard_normals(std::uint64_t seed,
                                               std::uint64_t sample_index) const {
  Rng rng = Rng::for_sample(seed, sample_index);
  Eigen::VectorXd z(grid_->size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return z;
}

Eigen::VectorXd FieldSampler::transform(const Eigen::VectorXd& z) const { return chol_ * z; }

FieldSample FieldSampler::sample(std::uint64_t seed, std::uint64_t sample_index) const {
  FieldSample s;
  s.grid = grid_;
  s.seed = seed;
  s.kernel_desc = kernel_.describe();
  s.values = transform(standard_normals(seed, sample_index));
  return s;
}

double paper_moment(double alpha, int Q) {
  require(Q >= 0, "paper_moment: order must be non-negative");
  if (alpha < 0) throw std::invalid_argument("paper_moment: alpha must be non-negative");
  if (Q % 2 == 1) return 0.0;
  return std::pow(alpha, 0.5 * Q);
}

double gaussian_moment(double alpha, int Q) {
  require(Q >= 0, "gaussian_moment: order must be non-negative");
  if (alpha < 0) throw std::invalid_argument("gaussian_moment: alpha must be non-negative");
  if (Q % 2 == 1) return 0.0;
  double dfact = 1.0;
  for (int m = Q - 1; m > 1; m -= 2) dfact *= m;
  return dfact * std::pow(alpha, 0.5 * Q);
}

double stochastic_integral(const FieldSample& s, const DomainGrid& grid) {
  if (s.grid.get() != &grid || s.values.size() != grid.size())
    throw std::invalid_argument("stochastic_integral: sample and grid do not match");
  return s.values.dot(grid.weights);
}

double integral_covariance_closed(const CovKernel& k, const DomainGrid& a, const DomainGrid& b) {
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const Vec x = a.point(i);
    double row = 0.0;
    for (int j = 0; j < b.size(); ++j) row += kernel_eval(k, x, b.point(j)) * b.weights[j];
    acc += a.weights[i] * row;
  }
  return acc;
}

FieldSample superpose(std::span<const FieldSample> fields, std::span<const double> coeffs) {
  require(!fields.empty() && fields.size() == coeffs.size(),
          "superpose: need matching fields and coefficients");
  const auto* g0 = fields[0].grid.get();
  for (const auto& f : fields)
    if (f.grid.get() != g0 || f.values.size() != fields[0].values.size())
      throw std::invalid_argument("superpose: fields live on different grids");
  FieldSample out;
  out.grid = fields[0].grid;
  out.seed = fields[0].seed;
  out.kernel_desc = "superposition";
  out.values = Eigen::VectorXd::Zero(fields[0].values.size());
  for (std::size_t i = 0; i < fields.size(); ++i) out.values += coeffs[i] * fields[i].values;
  return out;
}

double predicted_variance(std::span<const double> coeffs, std::span<const double> variances) {
  require(coeffs.size() == variances.size(), "predicted_variance: size mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * coeffs[i] * variances[i];
  return v;
}

ComplexPairCov complex_pair_covariances(double alphaA, double betaB) {
  return {alphaA - betaB, alphaA + betaB};
}

namespace {

struct FactorTerm {
  const SeparableFactor* factor;
  double left, right;
  int deriv_left = 0, deriv_right = 0;  // 0 or 1 each
  double metric_left = 1.0, metric_right = 1.0;
};

double eval_term(const FactorTerm& t) {
  double v;
  if (t.deriv_left && t.deriv_right)
    v = t.factor->d_left_right(t.left, t.right);
  else if (t.deriv_left)
    v = t.factor->d_left(t.left, t.right);
  else if (t.deriv_right)
    v = t.factor->d_right(t.left, t.right);
  else
    v = (*t.factor)(t.left, t.right);
  return v * t.metric_left * t.metric_right;
}

}  // namespace

double separable_derivative_covariance(const CovKernel& k, const DerivCovSpec& spec,
                                       const Vec& left_pt, const Vec& right_pt) {
  if (k.kind != KernelKind::Separable)
    throw std::invalid_argument("derivative covariances require a separable kernel");
  if (spec.frame != k.frame)
    throw std::invalid_argument("derivative spec frame does not match the kernel frame");

  const int n_factors = k.frame == Frame::Spherical ? 3 : 2;
  FactorTerm terms[3];
  const SeparableFactor* factors[3] = {&k.f1, &k.f2, &k.f3};
  for (int i = 0; i < n_factors; ++i) {
    terms[i].factor = factors[i];
    terms[i].left = left_pt[i];
    terms[i].right = right_pt[i];
  }

  auto apply = [&](DerivSelector sel, bool left_side) {
    const Vec& pt = left_side ? left_pt : right_pt;
    auto mark = [&](int idx, double metric) {
      if (left_side) {
        terms[idx].deriv_left = 1;
        terms[idx].metric_left = metric;
      } else {
        terms[idx].deriv_right = 1;
        terms[idx].metric_right = metric;
      }
    };
    switch (sel) {
      case DerivSelector::Id:
        return;
      case DerivSelector::Radial:
        mark(0, 1.0);
        return;
      case DerivSelector::Polar: {
        // (1/r) d_theta in spherical and polar frames
        if (k.frame == Frame::Cylindrical)
          throw std::invalid_argument("polar selector is undefined in the cylindrical frame");
        if (pt[0] == 0.0) throw ChartSingularityError("1/r metric factor at r = 0");
        mark(1, 1.0 / pt[0]);
        return;
      }
      case DerivSelector::Azimuthal: {
        if (k.frame != Frame::Spherical)
          throw std::invalid_argument("azimuthal selector requires the spherical frame");
        const double s = std::sin(pt[1]);
        if (pt[0] == 0.0 || s == 0.0)
          throw ChartSingularityError("1/(r sin theta) metric factor on the polar axis");
        mark(2, 1.0 / (pt[0] * s));
        return;
      }
      case DerivSelector::Axial: {
        if (k.frame != Frame::Cylindrical)
          throw std::invalid_argument("axial selector requires the cylindrical frame");
        mark(1, 1.0);
        return;
      }
    }
  };
  apply(spec.left, true);
  apply(spec.right, false);

  double v = k.lambda;
  for (int i = 0; i < n_factors; ++i) v *= eval_term(terms[i]);
  return v;
}

namespace {
void require_smooth(const CovKernel& k) {
  if (k.kind != KernelKind::GaussianCorr)
    throw std::invalid_argument(
        "analytic gradient covariances are available for GaussianCorr kernels only");
}
}  // namespace

double cov_value_value(const CovKernel& k, const Vec& x, const Vec& y) {
  return kernel_eval(k, x, y);
}

double cov_grad_value(const CovKernel& k, int i, const Vec& x, const Vec& y) {
  require_smooth(k);
  const Vec d = x - y;
  const double s2 = k.xi * k.xi;
  return -2.0 * d[i] / s2 * kernel_eval(k, x, y);
}

double cov_grad_grad(const CovKernel& k, int i, int j, const Vec& x, const Vec& y) {
  require_smooth(k);
  const Vec d = x - y;
  const double s2 = k.xi * k.xi;
  const double kr = kernel_eval(k, x, y);
  return (2.0 * (i == j ? 1.0 : 0.0) / s2 - 4.0 * d[i] * d[j] / (s2 * s2)) * kr;
}

double grad_variance_component(const CovKernel& k) {
  require_smooth(k);
  return 2.0 * k.alpha / (k.xi * k.xi);
}

double cov_hess_hess_coincident(const CovKernel& k, int i, int j, int kk, int ll) {
  require_smooth(k);
  const double s4 = std::pow(k.xi, 4);
  auto kd = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  return 4.0 * k.alpha / s4 * (kd(i, j) * kd(kk, ll) + kd(i, kk) * kd(j, ll) + kd(i, ll) * kd(j, kk));
}

double hessian_constant(const CovKernel& k, int n) {
  require_smooth(k);
  return 4.0 * k.alpha * (n + 2) / std::pow(k.xi, 4);
}

double third_derivative_constant(const CovKernel& k, int n) {
  require_smooth(k);
  return 8.0 * k.alpha * (n + 2) * (n + 4) / std::pow(k.xi, 6);
}

GradientFieldSampler::GradientFieldSampler(CovKernel kernel, std::vector<Vec> points, int dim,
                                           bool with_field)
    : kernel_(std::move(kernel)), points_(std::move(points)), dim_(dim), with_field_(with_field) {
  require_smooth(kernel_);
  const int m = static_cast<int>(points_.size());
  const int nf = with_field_ ? m : 0;
  const int total = nf + m * dim_;
  Eigen::MatrixXd cov(total, total);

  auto entry = [&](int a, int b) -> double {
    // index a < nf: field at point a; otherwise gradient component
    const bool a_field = a < nf;
    const bool b_field = b < nf;
    const int pa = a_field ? a : (a - nf) / dim_;
    const int pb = b_field ? b : (b - nf) / dim_;
    const int ca = a_field ? -1 : (a - nf) % dim_;
    const int cb = b_field ? -1 : (b - nf) % dim_;
    const Vec& x = points_[static_cast<std::size_t>(pa)];
    const Vec& y = points_[static_cast<std::size_t>(pb)];
    if (a_field && b_field) return cov_value_value(kernel_, x, y);
    if (!a_field && b_field) return cov_grad_value(kernel_, ca, x, y);
    if (a_field && !b_field) return cov_grad_value(kernel_, cb, y, x);
    return cov_grad_grad(kernel_, ca, cb, x, y);
  };
  for (int a = 0; a < total; ++a)
    for (int b = 0; b <= a; ++b) {
      const double v = entry(a, b);
      cov(a, b) = v;
      cov(b, a) = v;
    }
  chol_ = cholesky_with_jitter(std::move(cov), kernel_.alpha * (1.0 + 2.0 / (kernel_.xi * kernel_.xi)));
}

Eigen::VectorXd GradientFieldSampler::sample(std::uint64_t seed, std::uint64_t sample_index) const {
  Rng rng = Rng::for_sample(seed, sample_index);
  Eigen::VectorXd z(chol_.rows());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return chol_ * z;
}

double GradientFieldSampler::field_at(const Eigen::VectorXd& draw, int point) const {
  if (!with_field_) throw std::logic_error("sampler built without field values");
  return draw[point];
}

Vec GradientFieldSampler::gradient_at(const Eigen::VectorXd& draw, int point) const {
  const int nf = with_field_ ? n_points() : 0;
  Vec g = Vec::Zero();
  for (int c = 0; c < dim_; ++c) g[c] = draw[nf + point * dim_ + c];
  return g;
}

void write_csv(const FieldSample& s, std::ostream& os) {
  os.precision(17);
  os << "# seed=" << s.seed << " kernel=" << s.kernel_desc << " grid=" << s.grid->descriptor
     << "\n";
  os << "x,y,z,value\n";
  for (int i = 0; i < s.grid->size(); ++i) {
    os << s.grid->points(i, 0) << ',' << s.grid->points(i, 1) << ',' << s.grid->points(i, 2)
       << ',' << s.values[i] << '\n';
  }
}

}  // namespace stochpot::grf
