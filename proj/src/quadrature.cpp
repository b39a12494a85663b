#include "convolab/quadrature.hpp"

#include <cmath>

namespace convolab {

namespace {

struct AdaptState {
  const std::function<cplx(double)>* f = nullptr;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  std::size_t evals = 0;
  bool converged = true;
  double err_sum = 0.0;
};

cplx simpson(cplx fa, cplx fm, cplx fb, double h) {
  return (h / 6.0) * (fa + 4.0 * fm + fb);
}

cplx adapt(AdaptState& st, double a, double b, cplx fa, cplx fm, cplx fb,
           cplx whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const cplx flm = (*st.f)(lm), frm = (*st.f)(rm);
  st.evals += 2;
  const cplx left = simpson(fa, flm, fm, m - a);
  const cplx right = simpson(fm, frm, fb, b - m);
  const double err = std::abs(left + right - whole) / 15.0;
  if (err <= tol || depth <= 0) {
    if (depth <= 0 && err > tol) st.converged = false;
    st.err_sum += err;
    return left + right + (left + right - whole) / 15.0;
  }
  return adapt(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a,
                              double b, double abs_tol, double rel_tol,
                              int max_depth) {
  QuadResult res;
  if (a == b) return res;
  AdaptState st;
  st.f = &f;
  st.abs_tol = abs_tol;
  st.rel_tol = rel_tol;
  const double m = 0.5 * (a + b);
  const cplx fa = f(a), fm = f(m), fb = f(b);
  st.evals = 3;
  const cplx whole = simpson(fa, fm, fb, b - a);
  double tol = abs_tol;
  if (rel_tol > 0.0) tol = std::max(tol, rel_tol * std::abs(whole));
  res.value = adapt(st, a, b, fa, fm, fb, whole, tol, max_depth);
  res.est_error = st.err_sum;
  res.evals = st.evals;
  res.converged = st.converged;
  return res;
}

cplx trapezoid(const std::function<cplx(double)>& f, double a, double b,
               std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  cplx sum = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) sum += f(a + h * static_cast<double>(i));
  return sum * h;
}

QuadResult trapezoid_refine(const std::function<cplx(double)>& f, double a,
                            double b, double abs_tol, std::size_t n0,
                            std::size_t n_max) {
  QuadResult res;
  std::size_t n = n0;
  double h = (b - a) / static_cast<double>(n);
  cplx sum = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) sum += f(a + h * static_cast<double>(i));
  res.evals = n + 1;
  cplx prev = sum * h;
  while (n < n_max) {
    // Halve the step: only the new midpoints need evaluating.
    cplx mids = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      mids += f(a + h * (static_cast<double>(i) + 0.5));
    res.evals += n;
    sum += mids;
    n *= 2;
    h *= 0.5;
    const cplx cur = sum * h;
    res.est_error = std::abs(cur - prev);
    if (res.est_error <= abs_tol) {
      res.value = cur;
      return res;
    }
    prev = cur;
  }
  res.value = prev;
  res.converged = false;
  return res;
}

cplx gl4(const std::function<cplx(double)>& f, double a, double b) {
  static const double xs[2] = {0.3399810435848563, 0.8611363115940526};
  static const double ws[2] = {0.6521451548625461, 0.3478548451374538};
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  cplx sum = 0.0;
  for (int i = 0; i < 2; ++i)
    sum += ws[i] * (f(c - r * xs[i]) + f(c + r * xs[i]));
  return sum * r;
}

std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double h) {
  const std::size_t n = f.size();
  std::vector<cplx> out(n, cplx(0.0));
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i)
      out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
  }
  // First cell from the cubic through f_0..f_3, then overlapping Simpson
  // panels; each local error is O(h^5) so the running sums stay O(h^4).
  out[1] = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (std::size_t i = 2; i < n; ++i)
    out[i] = out[i - 2] + (h / 3.0) * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
  return out;
}

cplx laplace_linear_cell(cplx lambda, double a, double h, cplx fa, cplx fb) {
  const cplx z = lambda * h;
  cplx phi1, phi2;
  if (std::abs(z) < 0.1) {
    // Series for (1-e^{-z})/z and (z-1+e^{-z})/z^2; both alternate and the
    // truncation error is below 1e-17 at |z| = 0.1.
    cplx term(1.0), p1(0.0), p2(0.0);
    for (int k = 0; k < 12; ++k) {
      p1 += term / static_cast<double>(k + 1);
      p2 += term / static_cast<double>((k + 1) * (k + 2));
      term *= -z / static_cast<double>(k + 1);
    }
    phi1 = p1;
    phi2 = p2;
  } else {
    const cplx em = std::exp(-z);
    phi1 = (1.0 - em) / z;
    phi2 = (z - 1.0 + em) / (z * z);
  }
  return std::exp(-lambda * a) * h * (fa * phi1 + (fb - fa) * phi2);
}

cplx laplace_piecewise_linear(const std::vector<cplx>& f, double h, cplx lambda) {
  cplx sum = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    sum += laplace_linear_cell(lambda, h * static_cast<double>(i), h, f[i], f[i + 1]);
  return sum;
}

}  // namespace convolab
