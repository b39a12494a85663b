#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace convolab {

using cplx = std::complex<double>;

// Library-wide error taxonomy.  config_error covers malformed inputs and
// violated preconditions (CLI exit 2); numeric_error covers quadrature
// breakdowns, non-negligible tails and instabilities (CLI exit 3).
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : error {
  using error::error;
};
struct numeric_error : error {
  using error::error;
};

struct Tolerances {
  double abs = 1e-9;
  double rel = 1e-7;
};

// Slack used when evaluating closed region inequalities.
constexpr double kMembershipTol = 1e-12;
// exp() arguments are saturated at this magnitude and the event is flagged.
constexpr double kOverflowExponent = 700.0;

// Saturating exponential: exp(clamp(x)), setting *saturated when clamped.
double safe_exp(double x, bool* saturated = nullptr);
cplx safe_exp(cplx z, bool* saturated = nullptr);

// Worker cap: CONVOLAB_THREADS if set (>=1), else hardware concurrency.
int thread_cap();
// Runs fn(0..n-1); results must be written to disjoint slots so the
// schedule can never influence output values.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace convolab
