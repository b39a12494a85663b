#include "convolab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace convolab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

std::string num_str(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// Principal-branch formulas (pow, sqrt, log) extend off the convergence
// half-plane everywhere except the branch cut on the closed negative real axis.
bool off_negative_axis(cplx lambda) {
  return lambda.imag() != 0.0 || lambda.real() > 0.0;
}

// sup_{t in [0,20]} |K(t)| e^{-beta t} on a dense grid, with 5% headroom.
template <typename F>
double fit_envelope_constant(F&& eval, double beta) {
  double sup = 0.0;
  for (int i = 1; i <= 2000; ++i) {
    const double t = 20.0 * i / 2000.0;
    const double v = std::abs(eval(t)) * std::exp(-beta * t);
    sup = std::max(sup, v);
  }
  return 1.05 * sup;
}

}  // namespace

struct KernelImpl {
  KernelKind kind_ = KernelKind::Riesz;
  std::string id_;
  double abscissa_ = 0.0;
  std::optional<ExpBound> bound_;

  virtual ~KernelImpl() = default;
  virtual cplx evaluate(double t, const QuadSpec& q) const = 0;
  virtual cplx theta(double t, const QuadSpec& q) const = 0;
  virtual cplx theta_first_moment(double T, const QuadSpec& q) const = 0;
  virtual cplx laplace(cplx lambda, const QuadSpec& q) const = 0;
  // Value of the transform extended past the convergence half-plane, when the
  // closed form admits one; nullopt signals "no extension at this point".
  virtual std::optional<cplx> laplace_continuation(cplx, const QuadSpec&) const {
    return std::nullopt;
  }
  virtual void cell_moments(double a, double b, cplx& m0, cplx& m1,
                            const QuadSpec& q) const {
    m0 = gl4([&](double t) { return evaluate(t, q); }, a, b);
    m1 = gl4([&](double t) { return t * evaluate(t, q); }, a, b);
  }
  virtual std::optional<ExpBound> exp_bound() const { return bound_; }
  virtual KernelSpec spec() const = 0;
};

namespace {

// Factor dispatch for composite kinds: the ordinary transform where it
// converges, the extension elsewhere, nullopt when neither applies.
std::optional<cplx> continued_value(const Kernel& k, cplx lambda,
                                    const QuadSpec& q) {
  if (lambda.real() > k.laplace_abscissa()) return k.impl().laplace(lambda, q);
  return k.impl().laplace_continuation(lambda, q);
}

}  // namespace

// ---------------------------------------------------------------------------
// Power kernel t^{alpha-1}/Gamma(alpha)
// ---------------------------------------------------------------------------

namespace {

struct RieszImpl final : KernelImpl {
  double alpha;
  double lg;  // ln Gamma(alpha)

  explicit RieszImpl(double a) : alpha(a), lg(std::lgamma(a)) {
    kind_ = KernelKind::Riesz;
    id_ = "riesz(" + num_str(a) + ")";
    abscissa_ = 0.0;
    if (alpha >= 1.0) {
      // max of t^{alpha-1} e^{-t} sits at t = alpha-1.
      const double m = alpha == 1.0
                           ? 1.0
                           : std::exp((alpha - 1.0) * (std::log(alpha - 1.0) - 1.0) - lg);
      bound_ = ExpBound{m, alpha == 1.0 ? 0.0 : 1.0};
    }
  }

  cplx evaluate(double t, const QuadSpec&) const override {
    if (t == 0.0) {
      if (alpha > 1.0) return 0.0;
      if (alpha == 1.0) return 1.0;
      return kInf;
    }
    return std::exp((alpha - 1.0) * std::log(t) - lg);
  }
  cplx theta(double t, const QuadSpec&) const override {
    if (t <= 0.0) return 0.0;
    return std::exp(alpha * std::log(t) - std::lgamma(alpha + 1.0));
  }
  cplx theta_first_moment(double T, const QuadSpec&) const override {
    if (T <= 0.0) return 0.0;
    return std::exp((alpha + 1.0) * std::log(T) - lg) / (alpha + 1.0);
  }
  cplx laplace(cplx lambda, const QuadSpec&) const override {
    return std::pow(lambda, -alpha);
  }
  std::optional<cplx> laplace_continuation(cplx lambda,
                                           const QuadSpec&) const override {
    if (!off_negative_axis(lambda)) return std::nullopt;
    return std::pow(lambda, -alpha);
  }
  void cell_moments(double a, double b, cplx& m0, cplx& m1,
                    const QuadSpec& q) const override {
    m0 = theta(b, q) - theta(a, q);
    m1 = theta_first_moment(b, q) - theta_first_moment(a, q);
  }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "riesz";
    s.alpha = alpha;
    return s;
  }
};

// ---------------------------------------------------------------------------
// exp(-1/4t)/(2 sqrt(pi) t^{3/2}); transform e^{-sqrt(lambda)}
// ---------------------------------------------------------------------------

struct KHalfImpl final : KernelImpl {
  KHalfImpl() {
    kind_ = KernelKind::KHalf;
    id_ = "k-half";
    abscissa_ = 0.0;
    bound_ = ExpBound{fit_envelope_constant([this](double t) { return raw(t); }, 0.0),
                      0.0};
  }

  double raw(double t) const {
    if (t <= 0.0) return 0.0;
    return std::exp(-0.25 / t) / (2.0 * std::sqrt(kPi) * t * std::sqrt(t));
  }
  cplx evaluate(double t, const QuadSpec&) const override { return raw(t); }
  cplx theta(double t, const QuadSpec&) const override {
    if (t <= 0.0) return 0.0;
    return std::erfc(0.5 / std::sqrt(t));
  }
  cplx theta_first_moment(double T, const QuadSpec&) const override {
    if (T <= 0.0) return 0.0;
    return std::sqrt(T / kPi) * std::exp(-0.25 / T) -
           0.5 * std::erfc(0.5 / std::sqrt(T));
  }
  cplx laplace(cplx lambda, const QuadSpec&) const override {
    return std::exp(-std::sqrt(lambda));
  }
  std::optional<cplx> laplace_continuation(cplx lambda,
                                           const QuadSpec&) const override {
    if (!off_negative_axis(lambda)) return std::nullopt;
    return std::exp(-std::sqrt(lambda));
  }
  void cell_moments(double a, double b, cplx& m0, cplx& m1,
                    const QuadSpec& q) const override {
    m0 = theta(b, q) - theta(a, q);
    m1 = theta_first_moment(b, q) - theta_first_moment(a, q);
  }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "k-half";
    return s;
  }
};

// ---------------------------------------------------------------------------
// Sub-exponential transform family exp(-lambda^delta), 0 < delta < 1,
// evaluated by contour inversion on the line Re = r with the tail cut off
// where exp(-cos(delta pi/2) y^delta) clears the tolerance.
// ---------------------------------------------------------------------------

// Upper bound for int_T^inf y^q exp(-c y^delta) dy via z = y^delta and
// ln z <= ln z0 + (z - z0)/z0.
double subexp_tail_bound(double T, double c, double delta, double q) {
  const double z0 = std::pow(T, delta);
  const double w = (q + 1.0) / delta - 1.0;
  const double denom = c - std::max(w, 0.0) / z0;
  if (denom <= 0.0) return kInf;
  return std::exp(w * std::log(z0) - c * z0) / (delta * denom);
}

struct GevreyImpl final : KernelImpl {
  double delta;
  mutable std::mutex mu;
  mutable std::map<std::tuple<int, double, double>, cplx> memo;
  mutable std::optional<ExpBound> fitted;
  mutable bool fit_done = false;

  explicit GevreyImpl(double d) : delta(d) {
    kind_ = KernelKind::Gevrey;
    id_ = "gevrey(" + num_str(d) + ")";
    abscissa_ = 0.0;
  }

  // Size of the conditioning peak of the wrapped-contour integrand: for
  // delta > 1/2 the factor exp(-cos(delta pi) v) grows until e^{-t v^{1/delta}}
  // takes over, and the result emerges by cancellation of order e^{peak}.
  double wrap_peak(double t) const {
    const double c1 = std::cos(delta * kPi);
    if (c1 >= 0.0) return 0.0;
    const double vstar = std::pow(delta * (-c1) / t, delta / (1.0 - delta));
    return -t * std::pow(vstar, 1.0 / delta) - c1 * vstar;
  }

  // Contour wrapped onto the negative axis, u = v^{1/delta}, then v = w^2 to
  // remove the endpoint cusp.  form 0: K(t); form 1: Theta(t), where the
  // loop around the origin contributes the limit value 1.
  cplx wrapped_contour(double t, int form, double tol) const {
    const double c1 = std::cos(delta * kPi), s1 = std::sin(delta * kPi);
    auto expo = [&](double v) { return -t * std::pow(v, 1.0 / delta) - c1 * v; };
    double V = 8.0;
    if (c1 < 0.0)
      V = std::max(V, 2.0 * std::pow(delta * (-c1) / t, delta / (1.0 - delta)));
    const double cut = std::log(0.1 * tol * delta * kPi + 1e-300);
    while (expo(V) > cut && V < 1e9) V *= 2.0;
    const double pw = 2.0 / delta - 1.0;  // v^{1/delta - 1} dv in the w chart
    const auto f = [&](double w) -> cplx {
      if (w == 0.0) return 0.0;
      const double v = w * w;
      if (form == 0)
        return 2.0 * std::pow(w, pw) * std::exp(expo(v)) * std::sin(s1 * v);
      return 2.0 / w * std::exp(expo(v)) * std::sin(s1 * v);
    };
    const cplx integral =
        integrate_adaptive(f, 0.0, std::sqrt(V), 0.5 * tol * delta * kPi).value;
    const double val = integral.real() / (delta * kPi);
    return form == 0 ? val : 1.0 - val;
  }

  // Inversion on the vertical line Re = r: conditioning-safe everywhere but
  // pays for the oscillation, so it serves as the fallback where the
  // wrapped contour would cancel catastrophically.
  cplx line_contour(double t, int form, double tol) const {
    const double r = 1.0 / std::max(t, 0.5);
    const double c = std::cos(delta * kPi / 2.0);
    const double q = form == 0 ? 0.0 : -1.0;
    const double pref = std::exp(r * t) / kPi;
    double T = 8.0;
    while (pref * subexp_tail_bound(T, c, delta, q) > 0.5 * tol && T < 1e12)
      T *= 2.0;
    auto g = [&](double y) -> cplx {
      const cplx lam(r, y);
      cplx val = std::exp(lam * t - std::pow(lam, delta));
      if (form == 1) val /= lam;
      return val.real();  // conjugate symmetry: the imaginary parts cancel
    };
    // Dyadic panels: the envelope drops superpolynomially, so far panels
    // need almost no work while the near ones resolve the oscillation.
    cplx acc = 0.0;
    double lo = 0.0, hi = 1.0;
    int panel = 0;
    while (lo < T) {
      hi = std::min(hi, T);
      acc += integrate_adaptive(g, lo, hi,
                                0.5 * tol * kPi / (2 << std::min(panel, 40)))
                 .value;
      lo = hi;
      hi *= 2.0;
      ++panel;
    }
    return acc.real() / kPi;
  }

  // form 0: K(t); form 1: int_0^t K.
  cplx inversion(double t, int form, double tol) const {
    if (t <= 0.0) return 0.0;
    {
      std::lock_guard<std::mutex> lk(mu);
      auto it = memo.find({form, t, tol});
      if (it != memo.end()) return it->second;
    }
    const cplx res = wrap_peak(t) <= 6.0 ? wrapped_contour(t, form, tol)
                                         : line_contour(t, form, tol);
    std::lock_guard<std::mutex> lk(mu);
    memo.emplace(std::make_tuple(form, t, tol), res);
    return res;
  }

  cplx evaluate(double t, const QuadSpec& q) const override {
    return inversion(t, 0, q.abs_tol);
  }
  cplx theta(double t, const QuadSpec& q) const override {
    return inversion(t, 1, q.abs_tol);
  }
  cplx theta_first_moment(double T, const QuadSpec& q) const override {
    // int_0^T tau K = T Theta(T) - int_0^T Theta, by parts.
    if (T <= 0.0) return 0.0;
    const double tol = std::max(q.abs_tol, 1e-12);
    const cplx run =
        integrate_adaptive([&](double s) { return inversion(s, 1, 0.1 * tol); },
                           0.0, T, 0.5 * tol)
            .value;
    return T * inversion(T, 1, 0.1 * tol) - run;
  }
  cplx laplace(cplx lambda, const QuadSpec&) const override {
    return std::exp(-std::pow(lambda, delta));
  }
  std::optional<cplx> laplace_continuation(cplx lambda,
                                           const QuadSpec&) const override {
    if (!off_negative_axis(lambda)) return std::nullopt;
    return std::exp(-std::pow(lambda, delta));
  }
  std::optional<ExpBound> exp_bound() const override {
    std::lock_guard<std::mutex> lk(mu);
    if (!fit_done) {
      double sup = 0.0;
      for (int i = 0; i < 60; ++i) {
        const double t = 0.05 * std::pow(20.0 / 0.05, i / 59.0);
        cplx v;
        {
          // inversion() takes the same mutex; compute outside the memo path.
          mu.unlock();
          v = inversion(t, 0, 1e-7);
          mu.lock();
        }
        sup = std::max(sup, std::abs(v) * std::exp(-t));
      }
      fitted = ExpBound{1.1 * sup, 1.0};
      fit_done = true;
    }
    return fitted;
  }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "gevrey";
    s.delta = delta;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Rational transform prod (z_n - lambda)/(z_n + lambda) * (1+lambda)^{-q}:
// vanishes exactly at the prescribed zeros; time domain via partial
// fractions recovered from circle integrals around each pole.
// ---------------------------------------------------------------------------

struct RationalImpl final : KernelImpl {
  std::vector<cplx> zeros;
  int q_order;
  struct Pole {
    cplx p;
    int mult;
    std::vector<cplx> coef;  // coef[j-1] multiplies (lambda - p)^{-j}
  };
  std::vector<Pole> poles;

  RationalImpl(std::vector<cplx> zs, int q) : zeros(std::move(zs)), q_order(q) {
    kind_ = KernelKind::RationalSpectrumZero;
    std::ostringstream os;
    os << "rational-z(";
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      if (i) os << ",";
      os << num_str(zeros[i].real());
      if (zeros[i].imag() != 0.0) os << "+" << num_str(zeros[i].imag()) << "i";
    }
    os << ";q=" << q_order << ")";
    id_ = os.str();

    // Collect poles at -z_n and -1 (order q), merging near-coincident ones.
    std::vector<cplx> raw;
    for (const cplx& z : zeros) raw.push_back(-z);
    for (int i = 0; i < q_order; ++i) raw.push_back(cplx(-1.0, 0.0));
    for (const cplx& p : raw) {
      bool merged = false;
      for (Pole& pl : poles) {
        if (std::abs(pl.p - p) < 1e-9 * (1.0 + std::abs(p))) {
          ++pl.mult;
          merged = true;
          break;
        }
      }
      if (!merged) poles.push_back(Pole{p, 1, {}});
    }

    // Residue extraction: c_{p,j} = (1/2 pi i) oint F(lambda) (lambda-p)^{j-1}.
    for (Pole& pl : poles) {
      double dist = kInf;
      for (const Pole& other : poles)
        if (&other != &pl) dist = std::min(dist, std::abs(pl.p - other.p));
      const double rad = std::isfinite(dist) ? 0.45 * dist : 0.5;
      const int M = 512;
      pl.coef.assign(pl.mult, cplx(0.0));
      for (int m = 0; m < M; ++m) {
        const double th = 2.0 * kPi * m / M;
        const cplx e(std::cos(th), std::sin(th));
        const cplx lam = pl.p + rad * e;
        const cplx F = transform(lam);
        cplx ring = rad * e;  // (lambda - p)^j, starting at j = 1
        for (int j = 0; j < pl.mult; ++j) {
          pl.coef[j] += F * ring / static_cast<double>(M);
          ring *= rad * e;
        }
      }
    }

    abscissa_ = -kInf;
    for (const Pole& pl : poles) abscissa_ = std::max(abscissa_, pl.p.real());

    // Self-check: the partial fractions must reproduce the product form.
    const cplx probes[4] = {cplx(0.5, 0.0), cplx(2.0, 3.0), cplx(10.0, 0.0),
                            cplx(0.1, 0.7)};
    for (const cplx& lam : probes) {
      cplx pf = 0.0;
      for (const Pole& pl : poles) {
        cplx pw = lam - pl.p;
        for (int j = 0; j < pl.mult; ++j) {
          pf += pl.coef[j] / pw;
          pw *= lam - pl.p;
        }
      }
      const cplx ref = transform(lam);
      if (std::abs(pf - ref) > 1e-8 * (1.0 + std::abs(ref)))
        throw numeric_error("rational kernel: partial-fraction recovery failed");
    }

    bound_ = ExpBound{
        fit_envelope_constant([this](double t) { return std::abs(time_value(t)); },
                              abscissa_),
        abscissa_};
  }

  cplx transform(cplx lam) const {
    cplx v = 1.0;
    for (const cplx& z : zeros) v *= (z - lam) / (z + lam);
    for (int i = 0; i < q_order; ++i) v /= (1.0 + lam);
    return v;
  }

  cplx time_value(double t) const {
    cplx acc = 0.0;
    for (const Pole& pl : poles) {
      const cplx et = std::exp(pl.p * t);
      double fact = 1.0;  // (j-1)!
      double tp = 1.0;    // t^{j-1}
      for (int j = 1; j <= pl.mult; ++j) {
        acc += pl.coef[j - 1] * tp * et / fact;
        tp *= t;
        fact *= j;
      }
    }
    return acc;
  }

  // F_j(t) = int_0^t s^{j-1} e^{ps}/(j-1)! ds by downward substitution.
  static void f_table(cplx p, double t, int jmax, std::vector<cplx>& F) {
    F.assign(jmax + 1, cplx(0.0));
    const cplx et = std::exp(p * t);
    if (jmax >= 1) F[1] = (et - 1.0) / p;
    double fact = 1.0, tp = t;
    for (int j = 2; j <= jmax; ++j) {
      fact *= (j - 1);
      F[j] = (tp * et / fact - F[j - 1]) / p;
      tp *= t;
    }
  }

  cplx theta(double t, const QuadSpec&) const override {
    if (t <= 0.0) return 0.0;
    cplx acc = 0.0;
    std::vector<cplx> F;
    for (const Pole& pl : poles) {
      f_table(pl.p, t, pl.mult, F);
      for (int j = 1; j <= pl.mult; ++j) acc += pl.coef[j - 1] * F[j];
    }
    return acc;
  }
  cplx theta_first_moment(double T, const QuadSpec&) const override {
    if (T <= 0.0) return 0.0;
    cplx acc = 0.0;
    std::vector<cplx> F;
    for (const Pole& pl : poles) {
      f_table(pl.p, T, pl.mult + 1, F);
      for (int j = 1; j <= pl.mult; ++j)
        acc += pl.coef[j - 1] * static_cast<double>(j) * F[j + 1];
    }
    return acc;
  }
  cplx evaluate(double t, const QuadSpec&) const override { return time_value(t); }
  cplx laplace(cplx lambda, const QuadSpec&) const override {
    return transform(lambda);
  }
  std::optional<cplx> laplace_continuation(cplx lambda,
                                           const QuadSpec&) const override {
    for (const cplx& z : zeros)
      if (std::abs(lambda + z) < 1e-12 * (1.0 + std::abs(z))) return std::nullopt;
    if (q_order > 0 && std::abs(lambda + 1.0) < 1e-12) return std::nullopt;
    return transform(lambda);
  }
  void cell_moments(double a, double b, cplx& m0, cplx& m1,
                    const QuadSpec& q) const override {
    m0 = theta(b, q) - theta(a, q);
    m1 = theta_first_moment(b, q) - theta_first_moment(a, q);
  }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "rational-spectrum-zero";
    s.zeros = zeros;
    s.extra_pole_order = q_order;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Piecewise-linear sample table on [grid_0, grid_back], zero outside.
// ---------------------------------------------------------------------------

struct TabulatedImpl final : KernelImpl {
  std::vector<double> grid;
  std::vector<double> vals;
  std::vector<double> pre_theta;  // exact running integrals of the interpolant
  std::vector<double> pre_tfm;

  TabulatedImpl(std::vector<double> t, std::vector<double> v)
      : grid(std::move(t)), vals(std::move(v)) {
    kind_ = KernelKind::Tabulated;
    if (grid.size() != vals.size() || grid.size() < 2)
      throw config_error("tabulated kernel: need matching t/value arrays, >= 2 rows");
    if (grid.front() < 0.0)
      throw config_error("tabulated kernel: grid must start at t >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw config_error("tabulated kernel: grid must increase strictly");
    id_ = "tabulated(n=" + std::to_string(grid.size()) + ")";
    abscissa_ = -kInf;
    double amax = 0.0;
    for (double x : vals) amax = std::max(amax, std::abs(x));
    bound_ = ExpBound{std::max(amax, 1e-300), 0.0};

    pre_theta.assign(grid.size(), 0.0);
    pre_tfm.assign(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double a = grid[i - 1], b = grid[i];
      const double fa = vals[i - 1], fb = vals[i];
      pre_theta[i] = pre_theta[i - 1] + 0.5 * (fa + fb) * (b - a);
      // int tau * linear(tau): write linear as fa + s*(fb-fa)/(b-a), s = tau-a.
      const double h = b - a, slope = (fb - fa) / h;
      pre_tfm[i] = pre_tfm[i - 1] + fa * 0.5 * (b * b - a * a) +
                   slope * (h * h * (a / 2.0 + h / 3.0));
      // int_a^b tau (tau-a) dtau = h^2 (a/2 + h/3)
    }
  }

  double interp(double t) const {
    if (t <= grid.front()) return t == grid.front() ? vals.front() : 0.0;
    if (t >= grid.back()) return t == grid.back() ? vals.back() : 0.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return vals[i - 1] * (1.0 - w) + vals[i] * w;
  }

  cplx evaluate(double t, const QuadSpec&) const override { return interp(t); }
  cplx theta(double t, const QuadSpec&) const override { return prefix(t, false); }
  cplx theta_first_moment(double T, const QuadSpec&) const override {
    return prefix(T, true);
  }
  double prefix(double t, bool moment) const {
    if (t <= grid.front()) return 0.0;
    const std::vector<double>& pre = moment ? pre_tfm : pre_theta;
    if (t >= grid.back()) return pre.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double a = grid[i - 1], fa = vals[i - 1];
    const double h = grid[i] - a, slope = (vals[i] - fa) / h;
    const double s = t - a;
    double add = fa * s + 0.5 * slope * s * s;
    if (moment) {
      add = fa * 0.5 * (t * t - a * a) + slope * s * s * (a / 2.0 + s / 3.0);
    }
    return pre[i - 1] + add;
  }
  cplx laplace(cplx lambda, const QuadSpec&) const override {
    cplx acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      acc += laplace_linear_cell(lambda, grid[i - 1], grid[i] - grid[i - 1],
                                 vals[i - 1], vals[i]);
    return acc;
  }
  void cell_moments(double a, double b, cplx& m0, cplx& m1,
                    const QuadSpec& q) const override {
    m0 = prefix(b, false) - prefix(a, false);
    m1 = prefix(b, true) - prefix(a, true);
    (void)q;
  }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "tabulated";
    s.grid = grid;
    s.values = vals;
    return s;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Product-integration convolution shared by the convolution kind and the
// trajectory engine: exact kernel cell moments against the linear
// interpolant of the co-factor samples.
// ---------------------------------------------------------------------------

std::vector<cplx> product_convolve(const Kernel& k, const std::vector<cplx>& f,
                                   double h, const QuadSpec& q) {
  const std::size_t n = f.size();
  std::vector<cplx> out(n, cplx(0.0));
  if (n < 2) return out;
  // Weights per kernel cell j: the convolution at t_i picks the samples
  // f[i-j] (near tau = jh) and f[i-j-1] (near tau = (j+1)h).
  std::vector<cplx> w_hi(n - 1), w_lo(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    cplx m0, m1;
    k.cell_moments(h * static_cast<double>(j), h * static_cast<double>(j + 1),
                   m0, m1, q);
    const cplx d = (m1 - h * static_cast<double>(j) * m0) / h;
    w_hi[j] = m0 - d;
    w_lo[j] = d;
  }
  for (std::size_t i = 1; i < n; ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < i; ++j)
      acc += w_hi[j] * f[i - j] + w_lo[j] * f[i - j - 1];
    out[i] = acc;
  }
  return out;
}

std::vector<cplx> richardson_convolve(const Kernel& k,
                                      const std::vector<cplx>& f_fine, double h,
                                      const QuadSpec& q) {
  if (f_fine.size() % 2 == 0 || f_fine.size() < 3)
    throw config_error("richardson_convolve: need samples at half steps (odd count)");
  const std::size_t n = (f_fine.size() - 1) / 2;
  std::vector<cplx> f_coarse(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f_coarse[i] = f_fine[2 * i];
  const std::vector<cplx> ch = product_convolve(k, f_coarse, h, q);
  const std::vector<cplx> ch2 = product_convolve(k, f_fine, 0.5 * h, q);
  std::vector<cplx> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    out[i] = (4.0 * ch2[2 * i] - ch[i]) / 3.0;
  return out;
}

namespace {

// Uniform complex sample track with interpolation and exact-interpolant
// integrals; backs the convolution kind's lazy cache.
struct UniformSamples {
  double h = 0.0;
  std::vector<cplx> v;

  cplx interp(double t) const {
    if (t <= 0.0) return v.empty() ? cplx(0.0) : v.front();
    const double x = t / h;
    const std::size_t i = static_cast<std::size_t>(x);
    if (i + 1 >= v.size()) return v.back();
    const double w = x - static_cast<double>(i);
    return v[i] * (1.0 - w) + v[i + 1] * w;
  }
  cplx prefix(double t, bool moment, const std::vector<cplx>& pre,
              const std::vector<cplx>& pre_m) const {
    if (t <= 0.0) return 0.0;
    const double tb = h * static_cast<double>(v.size() - 1);
    if (t >= tb) return moment ? pre_m.back() : pre.back();
    const std::size_t i = static_cast<std::size_t>(t / h);
    const double a = h * static_cast<double>(i);
    const cplx fa = v[i];
    const cplx slope = (v[i + 1] - v[i]) / h;
    const double s = t - a;
    if (!moment) return pre[i] + fa * s + 0.5 * slope * s * s;
    return pre_m[i] + fa * 0.5 * (t * t - a * a) +
           slope * s * s * (a / 2.0 + s / 3.0);
  }
};

struct ConvolutionImpl final : KernelImpl {
  Kernel fa, fb;  // fa carries the moments; fb must be bounded near 0
  mutable std::mutex mu;
  mutable UniformSamples cache;
  mutable std::vector<cplx> pre, pre_m;

  ConvolutionImpl(Kernel a, Kernel b) : fa(std::move(a)), fb(std::move(b)) {
    kind_ = KernelKind::Convolution;
    id_ = "conv(" + fa.id() + "," + fb.id() + ")";
    abscissa_ = std::max(fa.laplace_abscissa(), fb.laplace_abscissa());
    const auto ba = fa.exp_bound(), bb = fb.exp_bound();
    if (ba && bb) {
      const double beta = std::max(ba->beta, bb->beta) + 0.1;
      bound_ = ExpBound{ba->M * bb->M * 10.0 / std::exp(1.0), beta};
    }
  }

  static bool bounded_at_zero(const Kernel& k) {
    const cplx v = k.evaluate(0.0);
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }

  void ensure(double t, const QuadSpec& q) const {
    std::lock_guard<std::mutex> lk(mu);
    const double have = cache.v.empty()
                            ? 0.0
                            : cache.h * static_cast<double>(cache.v.size() - 1);
    if (have >= t && !cache.v.empty()) return;
    double t_hi = 8.0;
    while (t_hi < t) t_hi *= 2.0;
    const std::size_t n = 4096;
    const double h = t_hi / static_cast<double>(n);
    std::vector<cplx> fine(2 * n + 1);
    for (std::size_t i = 0; i < fine.size(); ++i)
      fine[i] = fb.evaluate(0.5 * h * static_cast<double>(i), q);
    cache.h = h;
    cache.v = richardson_convolve(fa, fine, h, q);
    pre = cumulative_integral(cache.v, h);
    std::vector<cplx> tc(cache.v.size());
    for (std::size_t i = 0; i < tc.size(); ++i)
      tc[i] = h * static_cast<double>(i) * cache.v[i];
    pre_m = cumulative_integral(tc, h);
  }

  cplx evaluate(double t, const QuadSpec& q) const override {
    if (t <= 0.0) return 0.0;
    ensure(t, q);
    std::lock_guard<std::mutex> lk(mu);
    return cache.interp(t);
  }
  cplx theta(double t, const QuadSpec& q) const override {
    if (t <= 0.0) return 0.0;
    ensure(t, q);
    std::lock_guard<std::mutex> lk(mu);
    return cache.prefix(t, false, pre, pre_m);
  }
  cplx theta_first_moment(double T, const QuadSpec& q) const override {
    if (T <= 0.0) return 0.0;
    ensure(T, q);
    std::lock_guard<std::mutex> lk(mu);
    return cache.prefix(T, true, pre, pre_m);
  }
  cplx laplace(cplx lambda, const QuadSpec& q) const override {
    return fa.laplace(lambda, q) * fb.laplace(lambda, q);
  }
  std::optional<cplx> laplace_continuation(cplx lambda,
                                           const QuadSpec& q) const override {
    const auto va = continued_value(fa, lambda, q);
    const auto vb = continued_value(fb, lambda, q);
    if (!va || !vb) return std::nullopt;
    return *va * *vb;
  }
  void cell_moments(double a, double b, cplx& m0, cplx& m1,
                    const QuadSpec& q) const override {
    ensure(b, q);
    std::lock_guard<std::mutex> lk(mu);
    m0 = cache.prefix(b, false, pre, pre_m) - cache.prefix(a, false, pre, pre_m);
    m1 = cache.prefix(b, true, pre, pre_m) - cache.prefix(a, true, pre, pre_m);
  }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "convolution";
    s.parts = {fa.spec(), fb.spec()};
    return s;
  }
};

// ---------------------------------------------------------------------------
// Antiderivative kind: K1 = Theta of the base.
// ---------------------------------------------------------------------------

struct AntiderivativeImpl final : KernelImpl {
  Kernel base;

  explicit AntiderivativeImpl(Kernel b) : base(std::move(b)) {
    kind_ = KernelKind::Antiderivative;
    id_ = "antider(" + base.id() + ")";
    abscissa_ = std::max(base.laplace_abscissa(), 0.0);
    if (const auto eb = base.exp_bound()) {
      if (eb->beta > 0.0)
        bound_ = ExpBound{eb->M / eb->beta, eb->beta};
      else if (eb->beta == 0.0)
        bound_ = ExpBound{eb->M / std::exp(1.0), 1.0};
      else
        bound_ = ExpBound{eb->M / -eb->beta, 0.0};
    }
  }

  cplx evaluate(double t, const QuadSpec& q) const override {
    return base.theta(t, q);
  }
  cplx theta(double t, const QuadSpec& q) const override {
    // int_0^t Theta = t Theta(t) - int_0^t tau K(tau) dtau by parts.
    return t * base.theta(t, q) - base.theta_first_moment(t, q);
  }
  cplx theta_first_moment(double T, const QuadSpec& q) const override {
    return integrate_adaptive(
               [&](double t) { return t * base.theta(t, q); }, 0.0, T,
               q.abs_tol)
        .value;
  }
  cplx laplace(cplx lambda, const QuadSpec& q) const override {
    return base.laplace(lambda, q) / lambda;
  }
  std::optional<cplx> laplace_continuation(cplx lambda,
                                           const QuadSpec& q) const override {
    if (std::abs(lambda) < 1e-300) return std::nullopt;
    const auto v = continued_value(base, lambda, q);
    if (!v) return std::nullopt;
    return *v / lambda;
  }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "antiderivative";
    s.parts = {base.spec()};
    return s;
  }
};

// ---------------------------------------------------------------------------
// Weierstrass smoothing: K1(t) = (2/sqrt(pi t)) int_0^inf u e^{-u^2}
// K(2 sqrt(t) u) du; its transform equals the base transform at
// sqrt(lambda) and is computed here by independent quadrature in v = sqrt(t).
// ---------------------------------------------------------------------------

struct WeierstrassImpl final : KernelImpl {
  Kernel base;
  double bM, bbeta;

  explicit WeierstrassImpl(Kernel b) : base(std::move(b)) {
    kind_ = KernelKind::Weierstrass;
    id_ = "weier(" + base.id() + ")";
    const auto eb = base.exp_bound();
    if (!eb)
      throw config_error(
          "weierstrass kernel: base must carry an exponential bound");
    bM = eb->M;
    bbeta = eb->beta;
    abscissa_ = bbeta > 0.0 ? bbeta * bbeta : 0.0;
  }

  // g(v) = 2 v K1(v^2): smooth down to v = 0.
  cplx g(double v, const QuadSpec& q) const {
    const double b = bbeta > 0.0 ? bbeta * v : 0.0;
    const double umax = b + std::sqrt(b * b + 45.0);
    const auto f = [&](double u) -> cplx {
      if (u == 0.0) return 0.0;
      return u * std::exp(-u * u) * base.evaluate(2.0 * u * v, q);
    };
    const double tol = std::max(q.abs_tol * 0.1, 1e-13);
    return (4.0 / std::sqrt(kPi)) * integrate_adaptive(f, 0.0, umax, tol).value;
  }

  cplx evaluate(double t, const QuadSpec& q) const override {
    if (t < 0.0) return 0.0;
    if (t == 0.0) return kInf;
    const double v = std::sqrt(t);
    return g(v, q) / (2.0 * v);
  }
  cplx theta(double t, const QuadSpec& q) const override {
    if (t <= 0.0) return 0.0;
    return integrate_adaptive([&](double v) { return g(v, q); }, 0.0,
                              std::sqrt(t), q.abs_tol)
        .value;
  }
  cplx theta_first_moment(double T, const QuadSpec& q) const override {
    if (T <= 0.0) return 0.0;
    return integrate_adaptive([&](double v) { return v * v * g(v, q); }, 0.0,
                              std::sqrt(T), q.abs_tol)
        .value;
  }
  cplx laplace(cplx lambda, const QuadSpec& q) const override {
    const double re = lambda.real();
    const double vT = std::sqrt((45.0 + std::log1p(bM)) /
                                std::max(re - abscissa_, 1e-12));
    return integrate_adaptive(
               [&](double v) { return std::exp(-lambda * v * v) * g(v, q); },
               0.0, vT, 0.5 * q.abs_tol)
        .value;
  }
  void cell_moments(double a, double b, cplx& m0, cplx& m1,
                    const QuadSpec& q) const override {
    const double va = std::sqrt(std::max(a, 0.0)), vb = std::sqrt(std::max(b, 0.0));
    const double tol = std::max(q.abs_tol * std::max(b - a, 1e-3), 1e-14);
    m0 = integrate_adaptive([&](double v) { return g(v, q); }, va, vb, tol).value;
    m1 = integrate_adaptive([&](double v) { return v * v * g(v, q); }, va, vb, tol)
             .value;
  }
  std::optional<ExpBound> exp_bound() const override { return std::nullopt; }
  KernelSpec spec() const override {
    KernelSpec s;
    s.kind = "weierstrass";
    s.parts = {base.spec()};
    return s;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Wrapper
// ---------------------------------------------------------------------------

Kernel Kernel::riesz(double alpha) {
  if (!(alpha > 0.0)) throw config_error("riesz kernel: alpha must be > 0");
  return Kernel(std::make_shared<RieszImpl>(alpha));
}
Kernel Kernel::k_half() { return Kernel(std::make_shared<KHalfImpl>()); }
Kernel Kernel::gevrey(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw config_error("gevrey kernel: delta must lie in (0,1)");
  return Kernel(std::make_shared<GevreyImpl>(delta));
}
Kernel Kernel::rational_spectrum_zero(std::vector<cplx> zeros,
                                      int extra_pole_order) {
  if (extra_pole_order < 1)
    throw config_error("rational kernel: extra pole order must be >= 1");
  for (const cplx& z : zeros)
    if (!(z.real() > 0.0))
      throw config_error("rational kernel: zeros must have positive real part");
  return Kernel(std::make_shared<RationalImpl>(std::move(zeros), extra_pole_order));
}
Kernel Kernel::tabulated(std::vector<double> t, std::vector<double> values) {
  return Kernel(std::make_shared<TabulatedImpl>(std::move(t), std::move(values)));
}
Kernel Kernel::antiderivative(const Kernel& base) {
  return Kernel(std::make_shared<AntiderivativeImpl>(base));
}

Kernel convolve(const Kernel& a, const Kernel& b) {
  const bool a0 = ConvolutionImpl::bounded_at_zero(a);
  const bool b0 = ConvolutionImpl::bounded_at_zero(b);
  if (!a0 && !b0)
    throw config_error("convolve: at least one factor must be bounded at 0");
  // The bounded factor is the one that gets sampled.
  if (b0) return Kernel(std::make_shared<ConvolutionImpl>(a, b));
  return Kernel(std::make_shared<ConvolutionImpl>(b, a));
}

Kernel convolve_power(const Kernel& a, int m) {
  if (m < 1) throw config_error("convolve_power: exponent must be >= 1");
  Kernel acc = a;
  for (int i = 1; i < m; ++i) acc = convolve(acc, a);
  return acc;
}

Kernel weierstrass_kernel(const Kernel& base) {
  return Kernel(std::make_shared<WeierstrassImpl>(base));
}

Kernel Kernel::from_spec(const KernelSpec& s) {
  if (s.kind == "riesz") return riesz(s.alpha);
  if (s.kind == "k-half") return k_half();
  if (s.kind == "gevrey") return gevrey(s.delta);
  if (s.kind == "rational-spectrum-zero")
    return rational_spectrum_zero(s.zeros, s.extra_pole_order);
  if (s.kind == "tabulated") return tabulated(s.grid, s.values);
  if (s.kind == "antiderivative") {
    if (s.parts.size() != 1)
      throw config_error("antiderivative kernel spec: exactly one base");
    return antiderivative(from_spec(s.parts[0]));
  }
  if (s.kind == "weierstrass") {
    if (s.parts.size() != 1)
      throw config_error("weierstrass kernel spec: exactly one base");
    return weierstrass_kernel(from_spec(s.parts[0]));
  }
  if (s.kind == "convolution") {
    if (s.parts.size() < 2)
      throw config_error("convolution kernel spec: need >= 2 factors");
    Kernel acc = from_spec(s.parts[0]);
    for (std::size_t i = 1; i < s.parts.size(); ++i)
      acc = convolve(acc, from_spec(s.parts[i]));
    return acc;
  }
  throw config_error("unknown kernel kind: " + s.kind);
}

KernelKind Kernel::kind() const { return impl_->kind_; }
const std::string& Kernel::id() const { return impl_->id_; }
KernelSpec Kernel::spec() const { return impl_->spec(); }
double Kernel::laplace_abscissa() const { return impl_->abscissa_; }
std::optional<ExpBound> Kernel::exp_bound() const { return impl_->exp_bound(); }

cplx Kernel::evaluate(double t, const QuadSpec& q) const {
  if (t < 0.0) throw config_error("kernel evaluate: t must be >= 0");
  return impl_->evaluate(t, q);
}
cplx Kernel::theta(double t, const QuadSpec& q) const {
  if (t < 0.0) throw config_error("kernel theta: t must be >= 0");
  if (t == 0.0) return 0.0;
  return impl_->theta(t, q);
}
cplx Kernel::theta_first_moment(double T, const QuadSpec& q) const {
  if (T < 0.0) throw config_error("kernel theta_first_moment: T must be >= 0");
  if (T == 0.0) return 0.0;
  return impl_->theta_first_moment(T, q);
}
cplx Kernel::laplace(cplx lambda, const QuadSpec& q) const {
  if (!(lambda.real() > impl_->abscissa_))
    throw config_error("kernel laplace: Re(lambda) must exceed the abscissa " +
                       num_str(impl_->abscissa_));
  return impl_->laplace(lambda, q);
}
cplx Kernel::laplace_continued(cplx lambda, const QuadSpec& q) const {
  if (lambda.real() > impl_->abscissa_) return impl_->laplace(lambda, q);
  if (const auto v = impl_->laplace_continuation(lambda, q)) return *v;
  throw config_error("kernel laplace_continued: no extension at lambda = " +
                     num_str(lambda.real()) + "+" + num_str(lambda.imag()) +
                     "i for " + impl_->id_);
}
void Kernel::cell_moments(double a, double b, cplx& m0, cplx& m1,
                          const QuadSpec& q) const {
  if (a < 0.0 || b < a) throw config_error("kernel cell_moments: need 0 <= a <= b");
  impl_->cell_moments(a, b, m0, m1, q);
}

// ---------------------------------------------------------------------------
// Free diagnostics
// ---------------------------------------------------------------------------

cplx laplace_numeric(const Kernel& k, cplx lambda, const QuadSpec& q) {
  const double absc = k.laplace_abscissa();
  const double re = lambda.real();
  if (!(re > absc + 1e-9))
    throw config_error("laplace_numeric: Re(lambda) too close to the abscissa");
  double T;
  if (const auto eb = k.exp_bound()) {
    const double gap = re - eb->beta;
    if (gap <= 1e-9)
      throw numeric_error("laplace_numeric: transform tail not controlled");
    T = (std::log(std::max(eb->M, 1.0) / (q.abs_tol * gap)) + 1.0) / gap;
  } else {
    T = 60.0 / std::max(re - std::max(absc, 0.0), 1e-3);
  }
  T = std::max(T, 1.0);
  // [0, 1] in the v = sqrt(t) chart to absorb an integrable endpoint
  // singularity, then the plain chart out to the horizon.
  const auto head = integrate_adaptive(
      [&](double v) {
        if (v == 0.0) return cplx(0.0);
        return 2.0 * v * std::exp(-lambda * v * v) * k.evaluate(v * v, q);
      },
      0.0, 1.0, 0.5 * q.abs_tol);
  const auto tail = integrate_adaptive(
      [&](double t) { return std::exp(-lambda * t) * k.evaluate(t, q); }, 1.0,
      T, 0.5 * q.abs_tol);
  return head.value + tail.value;
}

TitchmarshReport titchmarsh_check(const Kernel& k, double t_max, int levels) {
  TitchmarshReport rep;
  const QuadSpec q;
  for (int j = 0; j < levels; ++j) {
    const double eps = t_max * std::pow(2.0, -j);
    const double mass =
        std::abs(integrate_adaptive(
                     [&](double v) {
                       if (v == 0.0) return cplx(0.0);
                       return cplx(2.0 * v * std::abs(k.evaluate(v * v, q)));
                     },
                     0.0, std::sqrt(eps), 1e-13)
                     .value);
    rep.trace.push_back({eps, mass});
  }
  if (k.kind() != KernelKind::Tabulated) {
    // Closed-form kinds are analytic (or convolutions of such), so the
    // origin belongs to the support unless the kernel vanishes identically;
    // the trace is reported as evidence but may underflow for flat kernels.
    rep.is_kernel = true;
    rep.detail = "closed-form kind: origin in support by analyticity";
    return rep;
  }
  // Tabulated data: find the widest prefix with exactly zero mass.
  double eps0 = 0.0;
  for (const auto& sm : rep.trace)
    if (sm.mass == 0.0) eps0 = std::max(eps0, sm.eps);
  if (eps0 == 0.0) {
    rep.is_kernel = true;
    rep.detail = "positive mass at every probed scale";
    return rep;
  }
  const KernelSpec s = k.spec();
  int nodes_inside = 0;
  for (double t : s.grid)
    if (t <= eps0) ++nodes_inside;
  if (nodes_inside >= 4) {
    rep.is_kernel = false;
    rep.detail = "interpolant vanishes identically on [0, " + num_str(eps0) + ")";
  } else {
    rep.inconclusive = true;
    rep.detail = "grid too coarse below eps = " + num_str(eps0);
  }
  return rep;
}

ZeroScanReport laplace_zero_scan(const Kernel& k, double re_min, double re_max,
                                 double im_max, int n_re, int n_im, double tol) {
  if (n_re < 2 || n_im < 1) throw config_error("laplace_zero_scan: grid too small");
  if (n_im % 2 == 0) ++n_im;  // keep the real axis on the grid
  ZeroScanReport rep;
  rep.min_abs = kInf;
  const QuadSpec q;
  for (int i = 0; i < n_re; ++i) {
    const double re =
        re_min + (re_max - re_min) * i / static_cast<double>(n_re - 1);
    for (int j = 0; j < n_im; ++j) {
      const double im =
          n_im == 1 ? 0.0
                    : -im_max + 2.0 * im_max * j / static_cast<double>(n_im - 1);
      const cplx lam(re, im);
      if (!(lam.real() > k.laplace_abscissa())) continue;
      const double a = std::abs(k.laplace(lam, q));
      if (a < rep.min_abs) {
        rep.min_abs = a;
        rep.argmin = lam;
      }
      if (a < tol && rep.witnesses.size() < 32) {
        rep.zero_free = false;
        rep.witnesses.push_back(lam);
      }
    }
  }
  return rep;
}

SummabilityReport blaschke_summability(
    const std::function<double(double)>& sqrt_eigenvalue, long long N) {
  if (N < 4) throw config_error("blaschke_summability: need N >= 4");
  SummabilityReport rep;
  rep.terms = N;
  auto term = [&](double x) {
    const double s = sqrt_eigenvalue(x);
    if (!(s >= 0.0))
      throw config_error("blaschke_summability: generator must be >= 0");
    // 1 - |s-1|/(s+1) without cancellation: 2/(s+1) past 1, 2s/(s+1) before.
    return s >= 1.0 ? 2.0 / (s + 1.0) : 2.0 * s / (s + 1.0);
  };
  double sum = 0.0, comp = 0.0;
  for (long long n = 1; n <= N; ++n) {
    const double y = term(static_cast<double>(n)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  rep.partial_sum = sum;

  const double aN = term(static_cast<double>(N));
  const double aH = term(static_cast<double>(N) / 2.0);
  const double sigma = (aN > 0.0 && aH > 0.0)
                           ? std::log(aH / aN) / std::log(2.0)
                           : kInf;
  if (sigma >= 1.05) {
    rep.verdict = "convergent";
  } else if (sigma <= 0.95) {
    rep.verdict = "divergent";
  } else {
    // Borderline exponent: a non-vanishing n * a_n signals the harmonic wall.
    rep.verdict = static_cast<double>(N) * aN > 0.01 ? "divergent" : "inconclusive";
  }

  if (rep.verdict == "convergent") {
    // Tail by the integral estimate minus half the last term (midpoint
    // correction); substitution x = N/u maps the tail onto (0, 1].
    const double Nd = static_cast<double>(N);
    const auto integrand = [&](double u) -> cplx {
      const double x = Nd / u;
      return term(x) * Nd / (u * u);
    };
    const double tail_int =
        integrate_adaptive(integrand, 1e-9, 1.0, 1e-12).value.real();
    rep.tail_estimate = tail_int - 0.5 * aN;
    rep.limit_estimate = rep.partial_sum + rep.tail_estimate;
  } else {
    rep.tail_estimate = kInf;
    rep.limit_estimate = kInf;
  }
  return rep;
}

}  // namespace convolab
