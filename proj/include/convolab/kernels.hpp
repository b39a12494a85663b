#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "convolab/common.hpp"
#include "convolab/quadrature.hpp"

namespace convolab {

enum class KernelKind {
  Riesz,
  KHalf,
  Gevrey,
  RationalSpectrumZero,
  Tabulated,
  Convolution,
  Antiderivative,
  Weierstrass,
};

// |K(t)| <= M e^{beta t} where such a bound is known.
struct ExpBound {
  double M = 0.0;
  double beta = 0.0;
};

struct QuadSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
};

// Serializable construction recipe (JSON round-trips live in report.cpp).
struct KernelSpec {
  std::string kind;
  double alpha = 0.0;                // riesz
  double delta = 0.0;                // gevrey
  std::vector<cplx> zeros;           // rational-spectrum-zero
  int extra_pole_order = 0;
  std::vector<double> grid, values;  // tabulated
  std::vector<KernelSpec> parts;     // convolution factors / wrapped base
};

struct KernelImpl;

// Immutable convolution kernel with closed-form pieces where the kind
// admits them and quadrature elsewhere.  theta(t) = int_0^t K, and
// cell_moments feeds the product-integration trajectory engine.
class Kernel {
 public:
  static Kernel riesz(double alpha);          // t^{alpha-1}/Gamma(alpha)
  static Kernel k_half();                     // exp(-1/4t) / (2 sqrt(pi) t^{3/2})
  static Kernel gevrey(double delta);         // inverse transform of exp(-lambda^delta)
  static Kernel rational_spectrum_zero(std::vector<cplx> zeros, int extra_pole_order);
  static Kernel tabulated(std::vector<double> t, std::vector<double> values);
  static Kernel antiderivative(const Kernel& base);
  static Kernel from_spec(const KernelSpec& spec);

  KernelKind kind() const;
  const std::string& id() const;
  KernelSpec spec() const;

  // Transform converges for Re(lambda) strictly beyond this.
  double laplace_abscissa() const;
  std::optional<ExpBound> exp_bound() const;

  cplx evaluate(double t, const QuadSpec& q = {}) const;
  cplx theta(double t, const QuadSpec& q = {}) const;
  cplx theta_first_moment(double T, const QuadSpec& q = {}) const;
  cplx laplace(cplx lambda, const QuadSpec& q = {}) const;
  // Transform value with the closed form carried past the convergence
  // half-plane (principal branches); throws config_error at points where the
  // kind admits no extension (branch cuts, transform poles, numeric-only kinds).
  cplx laplace_continued(cplx lambda, const QuadSpec& q = {}) const;
  // m0 = int_a^b K, m1 = int_a^b tau K(tau) dtau.
  void cell_moments(double a, double b, cplx& m0, cplx& m1,
                    const QuadSpec& q = {}) const;

  const KernelImpl& impl() const { return *impl_; }

 private:
  explicit Kernel(std::shared_ptr<const KernelImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const KernelImpl> impl_;
  friend Kernel convolve(const Kernel&, const Kernel&);
  friend Kernel weierstrass_kernel(const Kernel&);
};

// Time-domain product-integration convolution of two kernels; the transform
// of the result is the analytic factor product, so transform
// multiplicativity stays a two-route check against closed forms.
Kernel convolve(const Kernel& a, const Kernel& b);
Kernel convolve_power(const Kernel& a, int m);

// Gaussian-smoothing square-root rescale: transform value at lambda equals
// the base transform at sqrt(lambda); computed by independent quadrature.
// Requires an exponential bound on the base kernel.
Kernel weierstrass_kernel(const Kernel& base);

// Plain time-domain quadrature of the transform integral, independent of
// any closed form the kind may carry.
cplx laplace_numeric(const Kernel& k, cplx lambda, const QuadSpec& q = {});

// (K * f)(i h) for f sampled on the uniform grid i h: the kernel is
// integrated exactly cell by cell against the linear interpolant of f, so
// integrable singularities of K cost no accuracy.  Exact when f is linear.
std::vector<cplx> product_convolve(const Kernel& k, const std::vector<cplx>& f,
                                   double h, const QuadSpec& q = {});

// Same values extrapolated from steps h and h/2; f_fine holds samples at
// half steps (2n+1 of them) and the result lands on the coarse grid.
std::vector<cplx> richardson_convolve(const Kernel& k,
                                      const std::vector<cplx>& f_fine, double h,
                                      const QuadSpec& q = {});

struct SupportMass {
  double eps = 0.0;
  double mass = 0.0;
};
struct TitchmarshReport {
  bool is_kernel = false;
  bool inconclusive = false;
  std::vector<SupportMass> trace;  // mass of |K| on [0, eps) for shrinking eps
  std::string detail;
};
// Heuristic origin-in-support probe backing the convolution cancellation law.
TitchmarshReport titchmarsh_check(const Kernel& k, double t_max = 1.0,
                                  int levels = 12);

struct ZeroScanReport {
  bool zero_free = true;
  std::vector<cplx> witnesses;
  double min_abs = 0.0;
  cplx argmin{0.0, 0.0};
};
// Scans |transform| over a right half-plane grid Re in [re_min, re_max],
// |Im| <= im_max; values below tol are reported as zero witnesses.
ZeroScanReport laplace_zero_scan(const Kernel& k, double re_min, double re_max,
                                 double im_max, int n_re, int n_im,
                                 double tol = 1e-12);

struct SummabilityReport {
  double partial_sum = 0.0;
  double tail_estimate = 0.0;
  double limit_estimate = 0.0;
  std::string verdict;  // convergent | divergent | inconclusive
  long long terms = 0;
};
// Summability of the Blaschke angles 1 - |s_n - 1|/(s_n + 1) for
// s_n = sqrt_eigenvalue(n).  The generator must be increasing and accept
// real arguments so the tail can be estimated by an integral.
SummabilityReport blaschke_summability(
    const std::function<double(double)>& sqrt_eigenvalue, long long N);

}  // namespace convolab
