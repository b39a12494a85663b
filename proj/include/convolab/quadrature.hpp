#pragma once

#include <cstddef>
#include <vector>

#include "convolab/common.hpp"

namespace convolab {

struct QuadResult {
  cplx value{0.0, 0.0};
  double est_error = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

// Adaptive Simpson on [a, b]; error estimate |S_fine - S_coarse|/15 per panel.
QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a,
                              double b, double abs_tol, double rel_tol = 0.0,
                              int max_depth = 40);

// Composite trapezoid with n intervals.
cplx trapezoid(const std::function<cplx(double)>& f, double a, double b,
               std::size_t n);

// Trapezoid with interval doubling until successive values agree to abs_tol.
QuadResult trapezoid_refine(const std::function<cplx(double)>& f, double a,
                            double b, double abs_tol, std::size_t n0 = 64,
                            std::size_t n_max = std::size_t{1} << 22);

// Fixed 4-node Gauss-Legendre rule (exact through degree 7).
cplx gl4(const std::function<cplx(double)>& f, double a, double b);

// O(h^4) running antiderivative of uniform grid samples; result[0] = 0.
std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double h);

// Exact transform integral of the linear interpolant on one cell
// [a, a+h] with endpoint values fa, fb: int e^{-lambda t} fhat(t) dt.
cplx laplace_linear_cell(cplx lambda, double a, double h, cplx fa, cplx fb);

// Whole-grid version of the above for samples f at t_i = i h.
cplx laplace_piecewise_linear(const std::vector<cplx>& f, double h, cplx lambda);

}  // namespace convolab
