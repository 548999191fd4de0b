#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace stochpot {

struct McStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n_samples = 0;
  int n_batches = 0;
};

// Standard error by batch means: samples are split into consecutive batches
// and the spread of batch averages estimates the error of the global mean.
inline McStats batch_means(const std::vector<double>& xs, int n_batches = 100) {
  McStats s;
  s.n_samples = static_cast<long>(xs.size());
  if (xs.empty()) return s;
  if (n_batches > static_cast<int>(xs.size())) n_batches = static_cast<int>(xs.size());
  s.n_batches = n_batches;

  double total = 0.0;
  for (double x : xs) total += x;
  s.mean = total / static_cast<double>(xs.size());

  const std::size_t batch_len = xs.size() / static_cast<std::size_t>(n_batches);
  if (batch_len == 0 || n_batches < 2) {
    // fall back to the plain sample-variance estimate
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    const double var = xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0;
    s.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
  }
  double bss = 0.0;
  for (int b = 0; b < n_batches; ++b) {
    double bm = 0.0;
    for (std::size_t k = 0; k < batch_len; ++k) bm += xs[b * batch_len + k];
    bm /= static_cast<double>(batch_len);
    bss += (bm - s.mean) * (bm - s.mean);
  }
  const double batch_var = bss / static_cast<double>(n_batches - 1);
  s.stderr_ = std::sqrt(batch_var / static_cast<double>(n_batches));
  return s;
}

inline int worker_count() {
  if (const char* env = std::getenv("STOCHPOT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Evaluates per_sample(i) for i in [0, n) in parallel. Each result lands in
// slot i of the output, so the result is identical for any worker count.
template <class F>
std::vector<double> mc_map(long n, F&& per_sample) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const int workers = worker_count();
  if (workers <= 1 || n < 256) {
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = per_sample(static_cast<std::uint64_t>(i));
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < n; i += workers)
          out[static_cast<std::size_t>(i)] = per_sample(static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

template <class F>
McStats mc_run(long n, F&& per_sample, int n_batches = 100) {
  return batch_means(mc_map(n, std::forward<F>(per_sample)), n_batches);
}

}  // namespace stochpot
