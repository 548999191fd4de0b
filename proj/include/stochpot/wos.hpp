#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stochpot/geometry.hpp"

namespace stochpot::wos {

using geom::Domain;
using geom::Vec;

struct WalkConfig {
  double epsilon_shell = 1e-3;  // absorption distance, in units of the domain radius
  int max_steps = 10000;
  long n_walkers = 10000;
  std::uint64_t seed = 0;
  int n_batches = 100;
};

struct WosResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double mean_steps = 0.0;
  double frac_capped = 0.0;  // walkers that hit max_steps
  bool nonconvergence_warning = false;
  long n_walkers = 0;
};

// Dirichlet problem for the Laplace equation: each walker jumps to a uniform
// point of the largest inscribed sphere until within epsilon_shell of the
// boundary, then scores g at the radial boundary projection.
WosResult wos_laplace(const Domain& d, const std::function<double(const Vec&)>& g, const Vec& x,
                      const WalkConfig& cfg);

// Dirichlet problem for Lap psi = f: adds the mean-exit-time weighted source
// accumulation -r_k^2/(2n) f(x_k) at every step.
WosResult wos_poisson(const Domain& d, const std::function<double(const Vec&)>& f,
                      const std::function<double(const Vec&)>& g, const Vec& x,
                      const WalkConfig& cfg);

struct PassageStats {
  double mean_steps = 0.0;
  double frac_capped = 0.0;
  std::vector<long> step_histogram;  // bucket k counts walks with 2^k <= steps < 2^{k+1}
};
PassageStats first_passage_stats(const Domain& d, const Vec& x, const WalkConfig& cfg);

}  // namespace stochpot::wos
