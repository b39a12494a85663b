#include "convolab/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

namespace convolab {

double safe_exp(double x, bool* saturated) {
  if (x > kOverflowExponent) {
    if (saturated) *saturated = true;
    x = kOverflowExponent;
  } else if (x < -kOverflowExponent) {
    if (saturated) *saturated = true;
    x = -kOverflowExponent;
  }
  return std::exp(x);
}

cplx safe_exp(cplx z, bool* saturated) {
  const double mag = safe_exp(z.real(), saturated);
  return cplx(mag * std::cos(z.imag()), mag * std::sin(z.imag()));
}

int thread_cap() {
  if (const char* env = std::getenv("CONVOLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      // Strided assignment: slot i is always handled by worker i % workers,
      // so outputs land in fixed positions regardless of timing.
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace convolab
