#include "stochpot/wos.hpp"

#include <cmath>
#include <stdexcept>

#include "stochpot/mc.hpp"
#include "stochpot/rng.hpp"

namespace stochpot::wos {

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec uniform_direction(Rng& rng, int dim) {
  if (dim == 2) {
    const double th = rng.uniform(0.0, 2.0 * kPi);
    return {std::cos(th), std::sin(th), 0.0};
  }
  // Archimedes: z uniform on [-1,1], azimuth uniform
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

// radial projection onto the sphere/circle boundary; exact for balls and discs
Vec boundary_projection(const Domain& d, const Vec& x) {
  Vec rel = x - d.center;
  if (d.dim == 2) rel.z() = 0.0;
  const double r = rel.norm();
  if (r == 0.0) return d.center + Vec(d.radius, 0, 0);
  return d.center + rel * (d.radius / r);
}

struct WalkOutcome {
  double score = 0.0;
  long steps = 0;
  bool capped = false;
};

template <class SourceFn>
WalkOutcome run_walk(const Domain& d, const std::function<double(const Vec&)>& g,
                     const SourceFn& source, const Vec& start, const WalkConfig& cfg, Rng rng) {
  WalkOutcome out;
  Vec x = start;
  double accum = 0.0;
  const double shell = cfg.epsilon_shell * d.radius;
  for (out.steps = 0; out.steps < cfg.max_steps; ++out.steps) {
    const double r = d.boundary_distance(x);
    if (r <= shell) break;
    accum += source(x, r);
    x += r * uniform_direction(rng, d.dim);
  }
  if (out.steps >= cfg.max_steps) out.capped = true;
  out.score = g(boundary_projection(d, x)) + accum;
  return out;
}

template <class SourceFn>
WosResult run_all(const Domain& d, const std::function<double(const Vec&)>& g,
                  const SourceFn& source, const Vec& x, const WalkConfig& cfg) {
  if (d.kind != geom::DomainKind::Ball && d.kind != geom::DomainKind::Disc)
    throw std::invalid_argument("walk on spheres supports balls and discs only");
  if (!d.contains(x)) throw std::domain_error("walk on spheres: start point not interior");
  if (cfg.n_walkers < 100) throw std::invalid_argument("walk on spheres: need >= 100 walkers");
  if (cfg.epsilon_shell <= 0) throw std::invalid_argument("walk on spheres: shell must be positive");

  std::vector<double> scores(static_cast<std::size_t>(cfg.n_walkers));
  std::vector<double> steps(static_cast<std::size_t>(cfg.n_walkers));
  std::vector<char> capped(static_cast<std::size_t>(cfg.n_walkers));
  mc_map(cfg.n_walkers, [&](std::uint64_t i) {
    const WalkOutcome o = run_walk(d, g, source, x, cfg, Rng::for_sample(cfg.seed, i));
    scores[i] = o.score;
    steps[i] = static_cast<double>(o.steps);
    capped[i] = o.capped ? 1 : 0;
    return 0.0;
  });

  const McStats stats = batch_means(scores, cfg.n_batches);
  WosResult r;
  r.estimate = stats.mean;
  r.stderr_ = stats.stderr_;
  r.n_walkers = cfg.n_walkers;
  double step_sum = 0.0;
  long n_capped = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    step_sum += steps[i];
    n_capped += capped[i];
  }
  r.mean_steps = step_sum / static_cast<double>(cfg.n_walkers);
  r.frac_capped = static_cast<double>(n_capped) / static_cast<double>(cfg.n_walkers);
  r.nonconvergence_warning = r.frac_capped > 0.01;
  return r;
}

}  // namespace

WosResult wos_laplace(const Domain& d, const std::function<double(const Vec&)>& g, const Vec& x,
                      const WalkConfig& cfg) {
  return run_all(d, g, [](const Vec&, double) { return 0.0; }, x, cfg);
}

WosResult wos_poisson(const Domain& d, const std::function<double(const Vec&)>& f,
                      const std::function<double(const Vec&)>& g, const Vec& x,
                      const WalkConfig& cfg) {
  const double dim = static_cast<double>(d.dim);
  // solves Lap psi = f: Dynkin gives psi = E[g(exit)] - E[integral of f/2 dt]
  // with the per-sphere mean exit time r^2/n for the standard Brownian clock
  return run_all(
      d, g, [&f, dim](const Vec& c, double r) { return -r * r / (2.0 * dim) * f(c); }, x, cfg);
}

PassageStats first_passage_stats(const Domain& d, const Vec& x, const WalkConfig& cfg) {
  auto zero = [](const Vec&) { return 0.0; };
  std::vector<double> steps(static_cast<std::size_t>(cfg.n_walkers));
  std::vector<char> capped(static_cast<std::size_t>(cfg.n_walkers));
  if (!d.contains(x)) throw std::domain_error("walk on spheres: start point not interior");
  mc_map(cfg.n_walkers, [&](std::uint64_t i) {
    const WalkOutcome o =
        run_walk(d, zero, [](const Vec&, double) { return 0.0; }, x, cfg, Rng::for_sample(cfg.seed, i));
    steps[i] = static_cast<double>(o.steps);
    capped[i] = o.capped ? 1 : 0;
    return 0.0;
  });
  PassageStats s;
  double sum = 0.0;
  long n_capped = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    sum += steps[i];
    n_capped += capped[i];
    int bucket = 0;
    long v = static_cast<long>(steps[i]);
    while (v > 1) {
      v >>= 1;
      ++bucket;
    }
    if (bucket >= static_cast<int>(s.step_histogram.size()))
      s.step_histogram.resize(static_cast<std::size_t>(bucket) + 1, 0);
    ++s.step_histogram[static_cast<std::size_t>(bucket)];
  }
  s.mean_steps = sum / static_cast<double>(cfg.n_walkers);
  s.frac_capped = static_cast<double>(n_capped) / static_cast<double>(cfg.n_walkers);
  return s;
}

}  // namespace stochpot::wos
