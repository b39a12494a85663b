#include "convolab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "convolab/quadrature.hpp"
#include "convolab/regions.hpp"

namespace convolab {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string cplx_str(cplx v) {
  if (v.imag() == 0.0) return num_str(v.real());
  std::string im = num_str(std::abs(v.imag())) + "i";
  if (v.real() == 0.0) return (v.imag() < 0.0 ? "-" : "") + im;
  return num_str(v.real()) + (v.imag() < 0.0 ? "-" : "+") + im;
}

std::vector<double> grid_nodes(const GridSpec& g) {
  if (!(g.t_max > 0.0) || g.steps < 1)
    throw config_error("time grid needs t_max > 0 and at least one step");
  std::vector<double> t(g.steps + 1);
  for (std::size_t i = 0; i <= g.steps; ++i)
    t[i] = g.t_max * static_cast<double>(i) / static_cast<double>(g.steps);
  return t;
}

// Resolves the per-point input vector: empty means all ones.
std::vector<cplx> resolve_datum(const std::vector<cplx>& x, std::size_t n,
                                const char* what) {
  if (x.empty()) return std::vector<cplx>(n, cplx{1.0, 0.0});
  if (x.size() != n)
    throw config_error(std::string(what) +
                       ": input vector length does not match the spectrum");
  return x;
}

cplx cosh_clamped(cplx z, bool* sat) {
  return 0.5 * (safe_exp(z, sat) + safe_exp(-z, sat));
}

// Shared scalar engine for both family kinds.
Trajectory scalar_family(const Kernel& k, cplx mu, FamilyKind kind,
                         const GridSpec& grid, const Tolerances& tol) {
  const std::vector<double> t = grid_nodes(grid);
  const double h = grid.step();
  const std::size_t n2 = 2 * grid.steps;
  bool sat = false;
  std::vector<cplx> f(n2 + 1);
  if (kind == FamilyKind::Cosine) {
    const cplx q = std::sqrt(mu);
    for (std::size_t j = 0; j <= n2; ++j) {
      const double s = grid.t_max * static_cast<double>(j) / static_cast<double>(n2);
      f[j] = cosh_clamped(q * s, &sat);
    }
  } else {
    for (std::size_t j = 0; j <= n2; ++j) {
      const double s = grid.t_max * static_cast<double>(j) / static_cast<double>(n2);
      f[j] = safe_exp(mu * s, &sat);
    }
  }
  QuadSpec q{tol.abs, tol.rel};
  std::vector<cplx> vals = richardson_convolve(k, f, h, q);

  Trajectory tr;
  tr.time_grid = t;
  tr.values.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) tr.values[i] = {vals[i]};
  tr.datum = {cplx{1.0, 0.0}};
  tr.kernel_id = k.id();
  tr.operator_id = "scalar(mu=" + cplx_str(mu) + ")";
  tr.kind = kind;
  tr.quadrature = {h, tol.abs, "product-integration+richardson"};
  tr.saturated = sat;
  return tr;
}

// Trapezoidal solve of the defining identity on n intervals; theta holds
// Theta at the nodes.
std::vector<cplx> volterra_solve(const std::vector<cplx>& theta, cplx mu,
                                 FamilyKind kind, double h) {
  const std::size_t n = theta.size() - 1;
  std::vector<cplx> v(n + 1);
  v[0] = cplx{0.0, 0.0};
  if (kind == FamilyKind::Cosine) {
    // v_i = Theta_i + mu h sum_{j=1}^{i-1} (t_i - t_j) v_j: the j = 0 and
    // j = i trapezoid terms vanish because v_0 = 0 and the weight t_i - t_i = 0.
    for (std::size_t i = 1; i <= n; ++i) {
      cplx acc{0.0, 0.0};
      const double ti = h * static_cast<double>(i);
      for (std::size_t j = 1; j < i; ++j)
        acc += (ti - h * static_cast<double>(j)) * v[j];
      v[i] = theta[i] + mu * h * acc;
    }
  } else {
    const cplx denom = cplx{1.0, 0.0} - mu * (h / 2.0);
    if (std::abs(denom) < 1e-12)
      throw numeric_error("volterra oracle: implicit step is singular for this mu");
    cplx running{0.0, 0.0};  // v_0/2 + sum_{j=1}^{i-1} v_j
    for (std::size_t i = 1; i <= n; ++i) {
      v[i] = (theta[i] + mu * h * running) / denom;
      running += v[i];
    }
  }
  return v;
}

// Extracts column j of a trajectory's values.
std::vector<cplx> column(const Trajectory& tr, std::size_t j) {
  std::vector<cplx> c(tr.values.size());
  for (std::size_t i = 0; i < tr.values.size(); ++i) c[i] = tr.values[i][j];
  return c;
}

double binom(int m, int i) {
  double r = 1.0;
  for (int t = 1; t <= i; ++t) r = r * static_cast<double>(m - t + 1) / t;
  return r;
}

}  // namespace

Trajectory scalar_cosine(const Kernel& k, cplx mu, const GridSpec& grid,
                         const Tolerances& tol) {
  return scalar_family(k, mu, FamilyKind::Cosine, grid, tol);
}

Trajectory scalar_semigroup(const Kernel& k, cplx mu, const GridSpec& grid,
                            const Tolerances& tol) {
  return scalar_family(k, mu, FamilyKind::Semigroup, grid, tol);
}

Trajectory volterra_oracle(const Kernel& k, cplx mu, FamilyKind kind,
                           const GridSpec& grid, const Tolerances& tol) {
  const std::vector<double> t = grid_nodes(grid);
  const double h = grid.step();
  const std::size_t n = grid.steps;
  QuadSpec q{tol.abs * 1e-3, tol.rel * 1e-3};

  // Theta on the half-step grid; the requested grid reuses the even entries.
  std::vector<cplx> theta_fine(2 * n + 1);
  for (std::size_t j = 0; j <= 2 * n; ++j)
    theta_fine[j] =
        k.theta(grid.t_max * static_cast<double>(j) / static_cast<double>(2 * n), q);
  std::vector<cplx> theta(n + 1);
  for (std::size_t i = 0; i <= n; ++i) theta[i] = theta_fine[2 * i];

  const std::vector<cplx> v = volterra_solve(theta, mu, kind, h);
  const std::vector<cplx> v_half = volterra_solve(theta_fine, mu, kind, h / 2.0);

  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    diff = std::max(diff, std::abs(v[i] - v_half[2 * i]));
    scale = std::max(scale, std::abs(v[i]));
  }
  const double est = diff / 3.0;  // second-order extrapolated error estimate
  if (!(est <= tol.abs + tol.rel * scale))
    throw numeric_error(
        "volterra oracle: step too coarse (estimated error " + num_str(est) + ")");

  Trajectory tr;
  tr.time_grid = t;
  tr.values.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) tr.values[i] = {v[i]};
  tr.datum = {cplx{1.0, 0.0}};
  tr.kernel_id = k.id();
  tr.operator_id = "scalar(mu=" + cplx_str(mu) + ")";
  tr.kind = kind;
  tr.quadrature = {h, est, "trapezoid-volterra"};
  tr.saturated = false;
  return tr;
}

Trajectory apply_family(const SpectralOperator& op, const Kernel& k,
                        FamilyKind kind, const GridSpec& grid,
                        const std::vector<cplx>& x, const Tolerances& tol) {
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  const std::vector<cplx> datum = resolve_datum(x, mus.size(), "apply_family");

  Trajectory tr;
  tr.time_grid = grid_nodes(grid);
  tr.values.assign(tr.time_grid.size(), std::vector<cplx>(mus.size()));
  bool sat = false;
  for (std::size_t j = 0; j < mus.size(); ++j) {
    const Trajectory col = scalar_family(k, mus[j], kind, grid, tol);
    sat = sat || col.saturated;
    const cplx scale = w[j] * datum[j];
    for (std::size_t i = 0; i < tr.time_grid.size(); ++i)
      tr.values[i][j] = col.values[i][0] * scale;
  }
  tr.datum = datum;
  tr.kernel_id = k.id();
  tr.operator_id = op.id();
  tr.kind = kind;
  tr.quadrature = {grid.step(), tol.abs, "product-integration+richardson"};
  tr.saturated = sat;
  return tr;
}

double identity_residual(const Trajectory& traj, const SpectralOperator& op,
                         const Kernel& k) {
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  if (traj.points() != mus.size())
    throw config_error("identity_residual: trajectory width does not match the spectrum");
  if (traj.time_grid.size() < 2)
    throw config_error("identity_residual: trajectory needs at least two nodes");
  const std::vector<cplx> datum =
      resolve_datum(traj.datum, mus.size(), "identity_residual");
  const double h = traj.time_grid[1] - traj.time_grid[0];
  const std::size_t n = traj.time_grid.size();

  std::vector<cplx> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = k.theta(traj.time_grid[i]);

  double resid = 0.0;
  for (std::size_t j = 0; j < mus.size(); ++j) {
    const std::vector<cplx> c = column(traj, j);
    const std::vector<cplx> U = cumulative_integral(c, h);
    std::vector<cplx> sc(n);
    for (std::size_t i = 0; i < n; ++i) sc[i] = traj.time_grid[i] * c[i];
    const std::vector<cplx> V = cumulative_integral(sc, h);
    const cplx scale = w[j] * datum[j];
    for (std::size_t i = 0; i < n; ++i) {
      const cplx integral = traj.kind == FamilyKind::Cosine
                                ? traj.time_grid[i] * U[i] - V[i]
                                : U[i];
      const cplx defect = mus[j] * integral - (c[i] - theta[i] * scale);
      resid = std::max(resid, std::abs(defect));
    }
  }
  return resid;
}

double composition_residual(const SpectralOperator& op, const Kernel& k,
                            const GridSpec& grid, double t, double s,
                            const Tolerances& tol) {
  const double h = grid.step();
  auto snap = [&](double x) -> std::size_t {
    if (x < 0.0) throw config_error("composition times must be nonnegative");
    const auto ix = static_cast<long long>(std::llround(x / h));
    if (std::abs(x - static_cast<double>(ix) * h) > 1e-9 * std::max(1.0, std::abs(x)))
      throw config_error("composition times must lie on the grid");
    return static_cast<std::size_t>(ix);
  };
  const std::size_t it = snap(t), is = snap(s), iT = it + is;
  if (iT > grid.steps)
    throw config_error("composition: t + s exceeds the grid span");
  const double T = h * static_cast<double>(iT);
  QuadSpec q{tol.abs, tol.rel};

  // int_0^{b} K(T - r) S(r) dr against the linear interpolant of S, with the
  // kernel integrated exactly on each reflected cell.
  auto bracket = [&](const std::vector<cplx>& S, double hh, std::size_t ib) {
    cplx total{0.0, 0.0};
    for (std::size_t l = 0; l < ib; ++l) {
      const double rl = hh * static_cast<double>(l);
      cplx m0, m1;
      k.cell_moments(T - rl - hh, T - rl, m0, m1, q);
      const cplx slope = (S[l + 1] - S[l]) / hh;
      total += S[l] * m0 + slope * ((T - rl) * m0 - m1);
    }
    return total;
  };

  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  double resid = 0.0;
  for (std::size_t j = 0; j < mus.size(); ++j) {
    const Trajectory coarse = scalar_semigroup(k, mus[j], grid, tol);
    const Trajectory fine =
        scalar_semigroup(k, mus[j], GridSpec{grid.t_max, 2 * grid.steps}, tol);
    const std::vector<cplx> Sh = column(coarse, 0);
    const std::vector<cplx> Sh2 = column(fine, 0);

    const cplx Fh = bracket(Sh, h, iT) - bracket(Sh, h, it) - bracket(Sh, h, is);
    const cplx Fh2 = bracket(Sh2, h / 2.0, 2 * iT) - bracket(Sh2, h / 2.0, 2 * it) -
                     bracket(Sh2, h / 2.0, 2 * is);
    const cplx rhs = (4.0 * Fh2 - Fh) / 3.0;
    const cplx lhs = Sh2[2 * it] * Sh2[2 * is];
    resid = std::max(resid, w[j] * w[j] * std::abs(lhs - rhs));
  }
  return resid;
}

double laplace_criterion_residual(const SpectralOperator& op, const Kernel& k,
                                  const Trajectory& traj, cplx lambda,
                                  const Tolerances& tol) {
  if (traj.kind != FamilyKind::Cosine)
    throw config_error("laplace_criterion_residual expects a cosine trajectory");
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  if (traj.points() != mus.size())
    throw config_error("laplace_criterion_residual: trajectory width mismatch");
  const std::vector<cplx> datum =
      resolve_datum(traj.datum, mus.size(), "laplace_criterion_residual");
  const std::size_t n = traj.time_grid.size();
  if (n < 3) throw config_error("laplace_criterion_residual: trajectory too short");
  const double h = traj.time_grid[1] - traj.time_grid[0];
  const double T = traj.time_grid.back();

  const cplx Kt = k.laplace(lambda, QuadSpec{tol.abs, tol.rel});
  if (std::abs(Kt) < 1e-12)
    throw numeric_error("laplace criterion: kernel transform vanishes at lambda");

  double resid = 0.0;
  for (std::size_t j = 0; j < mus.size(); ++j) {
    const cplx denom = lambda * lambda - mus[j];
    if (std::abs(denom) < 1e-12 * (1.0 + std::abs(mus[j])))
      throw config_error("laplace criterion: lambda^2 lies in the spectrum");
    const cplx lhs = lambda * w[j] * datum[j] / denom;

    const std::vector<cplx> c = column(traj, j);
    // Truncation-tail estimate from the trajectory's own terminal growth,
    // measured on quarter-grid windows so oscillation zeros cannot fake an
    // exponential rate the way a single-step ratio would.
    const std::size_t q = std::max<std::size_t>(n / 4, 1);
    double vT = 0.0, vTm = 0.0;
    for (std::size_t i = n - q; i < n; ++i) vT = std::max(vT, std::abs(c[i]));
    for (std::size_t i = n - std::min(2 * q, n - 1); i < n - q; ++i)
      vTm = std::max(vTm, std::abs(c[i]));
    vT = std::max(vT, std::abs(c[n - 1]));
    double g = (vT > 0.0 && vTm > 0.0)
                   ? std::log(vT / vTm) / (static_cast<double>(q) * h)
                   : 0.0;
    g = std::max(g, 0.0);
    const double margin = lambda.real() - g;
    const double tail =
        margin > 0.0 ? vT * std::exp(-lambda.real() * T) / margin : kInf;
    if (!(tail <= 0.01 * (tol.abs + tol.rel * std::abs(lhs))))
      throw numeric_error(
          "laplace criterion: truncated tail is not negligible (estimate " +
          num_str(tail) + ")");

    cplx A = laplace_piecewise_linear(c, h, lambda);
    if (n % 2 == 1) {  // even interval count: Richardson against the 2h grid
      std::vector<cplx> c2((n + 1) / 2);
      for (std::size_t i = 0; i < c2.size(); ++i) c2[i] = c[2 * i];
      const cplx A2 = laplace_piecewise_linear(c2, 2.0 * h, lambda);
      A = (4.0 * A - A2) / 3.0;
    }
    resid = std::max(resid, std::abs(lhs - A / Kt));
  }
  return resid;
}

BlockSemigroup block_semigroup(const SpectralOperator& op, const Kernel& k,
                               const GridSpec& grid, const Tolerances& tol) {
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  const std::vector<double> t = grid_nodes(grid);
  const double h = grid.step();
  const std::size_t n = t.size();
  QuadSpec q{tol.abs, tol.rel};

  std::vector<cplx> theta(n), theta1(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = k.theta(t[i], q);
    theta1[i] = t[i] * theta[i] - k.theta_first_moment(t[i], q);
  }

  BlockSemigroup out;
  auto init = [&](Trajectory& tr, const char* label) {
    tr.time_grid = t;
    tr.values.assign(n, std::vector<cplx>(mus.size()));
    tr.datum.assign(mus.size(), cplx{1.0, 0.0});
    tr.kernel_id = k.id();
    tr.operator_id = op.id();
    tr.kind = FamilyKind::Semigroup;
    tr.quadrature = {h, tol.abs, label};
  };
  init(out.s1, "block-S1");
  init(out.s2, "block-S2");
  init(out.s3, "block-S3");
  init(out.s4, "block-S4");

  double resid = 0.0;
  for (std::size_t j = 0; j < mus.size(); ++j) {
    const cplx mu = mus[j];
    const Trajectory ct = scalar_cosine(k, mu, grid, tol);
    std::vector<cplx> c = column(ct, 0);
    for (auto& v : c) v *= w[j];

    const std::vector<cplx> S1 = cumulative_integral(c, h);
    std::vector<cplx> sc(n);
    for (std::size_t i = 0; i < n; ++i) sc[i] = t[i] * c[i];
    const std::vector<cplx> V = cumulative_integral(sc, h);
    std::vector<cplx> S2(n), S3(n), S4(n);
    for (std::size_t i = 0; i < n; ++i) {
      S2[i] = t[i] * S1[i] - V[i];
      S3[i] = c[i] - theta[i] * w[j];
    }
    const std::vector<cplx> IS2 = cumulative_integral(S2, h);
    for (std::size_t i = 0; i < n; ++i) S4[i] = mu * IS2[i] + theta1[i] * w[j];

    const std::vector<cplx> IS1 = cumulative_integral(S1, h);
    const std::vector<cplx> IS3 = cumulative_integral(S3, h);
    const std::vector<cplx> IS4 = cumulative_integral(S4, h);
    for (std::size_t i = 0; i < n; ++i) {
      resid = std::max(resid, std::abs(S2[i] - IS1[i]));            // S2 = int S1
      resid = std::max(resid, std::abs(S1[i] - S4[i]));             // S1 = S4
      resid = std::max(resid, std::abs(mu * S2[i] - S3[i]));        // A int S1 = S3
      resid = std::max(resid, std::abs(IS4[i] - S2[i]));            // int S4 = S2
      resid = std::max(resid,
                       std::abs(IS3[i] - (S1[i] - theta1[i] * w[j])));  // int S3
      out.s1.values[i][j] = S1[i];
      out.s2.values[i][j] = S2[i];
      out.s3.values[i][j] = S3[i];
      out.s4.values[i][j] = S4[i];
    }
  }
  out.max_residual = resid;
  return out;
}

WeierstrassResult weierstrass_semigroup(const Trajectory& cos_traj,
                                        const SpectralOperator& op,
                                        const Kernel& k, const GridSpec& t_out,
                                        const Tolerances& tol) {
  if (cos_traj.kind != FamilyKind::Cosine)
    throw config_error("weierstrass_semigroup expects a cosine trajectory");
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  if (cos_traj.points() != mus.size())
    throw config_error("weierstrass_semigroup: trajectory width mismatch");
  const std::vector<cplx> datum =
      resolve_datum(cos_traj.datum, mus.size(), "weierstrass_semigroup");
  const std::size_t ns = cos_traj.time_grid.size();
  if (ns < 3) throw config_error("weierstrass_semigroup: trajectory too short");
  const double hs = cos_traj.time_grid[1] - cos_traj.time_grid[0];
  const double S_max = cos_traj.time_grid.back();
  const std::vector<double> t = grid_nodes(t_out);

  // Terminal-decay check: the Gaussian factor must already dominate the
  // trajectory's growth at the end of the stored grid. The rate comes from
  // quarter-grid window maxima so oscillation zeros cannot fake an
  // exponential rate the way a single-step ratio would.
  const std::size_t qw = std::max<std::size_t>(ns / 4, 1);
  for (std::size_t j = 0; j < mus.size(); ++j) {
    double vT = 0.0, vTm = 0.0;
    for (std::size_t i = ns - qw; i < ns; ++i)
      vT = std::max(vT, std::abs(cos_traj.values[i][j]));
    for (std::size_t i = ns - std::min(2 * qw, ns - 1); i < ns - qw; ++i)
      vTm = std::max(vTm, std::abs(cos_traj.values[i][j]));
    vT = std::max(vT, std::abs(cos_traj.values[ns - 1][j]));
    double g = (vT > 0.0 && vTm > 0.0)
                   ? std::log(vT / vTm) / (static_cast<double>(qw) * hs)
                   : 0.0;
    g = std::max(g, 0.0);
    const double tmax = t_out.t_max;
    const double rate = S_max / (2.0 * tmax) - g;
    const double head = vT * std::exp(-S_max * S_max / (4.0 * tmax)) /
                        std::sqrt(kPi * tmax);
    const double tail = rate > 0.0 ? head / rate : kInf;
    if (!(tail <= 0.01 * std::max(tol.abs, 1e-12)))
      throw numeric_error(
          "weierstrass_semigroup: cosine grid too short for the Gaussian tail "
          "(estimate " + num_str(tail) + ")");
  }

  const Kernel k1 = weierstrass_kernel(k);

  WeierstrassResult out;
  out.semigroup.time_grid = t;
  out.semigroup.values.assign(t.size(), std::vector<cplx>(mus.size()));
  out.semigroup.datum = datum;
  out.semigroup.kernel_id = k1.id();
  out.semigroup.operator_id = cos_traj.operator_id;
  out.semigroup.kind = FamilyKind::Semigroup;
  out.semigroup.quadrature = {t_out.step(), tol.abs, "gaussian-average"};
  out.semigroup.saturated = cos_traj.saturated;

  for (std::size_t i = 1; i < t.size(); ++i) {
    const double ti = t[i];
    const double rt = std::sqrt(ti);
    for (std::size_t j = 0; j < mus.size(); ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t l = 0; l + 1 < ns; ++l) {
        const double a = cos_traj.time_grid[l];
        const double b = cos_traj.time_grid[l + 1];
        if (a / (2.0 * rt) > 27.0) break;  // Gaussian factor below 1e-300
        const cplx cl = cos_traj.values[l][j];
        const cplx slope = (cos_traj.values[l + 1][j] - cl) / hs;
        const double I0 =
            std::sqrt(kPi * ti) * (std::erf(b / (2.0 * rt)) - std::erf(a / (2.0 * rt)));
        const double I1 = -2.0 * ti * (std::exp(-b * b / (4.0 * ti)) -
                                       std::exp(-a * a / (4.0 * ti)));
        acc += (cl - slope * a) * I0 + slope * I1;
      }
      out.semigroup.values[i][j] = acc / std::sqrt(kPi * ti);
    }
  }

  // Reference: the rescaled kernel's own semigroup on a refined grid.
  const std::size_t m = std::max<std::size_t>(1, (200 + t_out.steps - 1) / t_out.steps);
  const GridSpec ref_grid{t_out.t_max, m * t_out.steps};
  double resid = 0.0;
  for (std::size_t j = 0; j < mus.size(); ++j) {
    const Trajectory ref = scalar_semigroup(k1, mus[j], ref_grid, tol);
    const cplx scale = w[j] * datum[j];
    for (std::size_t i = 1; i < t.size(); ++i)
      resid = std::max(resid, std::abs(out.semigroup.values[i][j] -
                                       ref.values[i * m][0] * scale));
  }
  out.residual = resid;
  for (std::size_t j = 0; j < mus.size(); ++j)
    out.small_t_value = std::max(out.small_t_value,
                                 std::abs(out.semigroup.values[1][j]));
  return out;
}

double semigroup_average_residual(const Kernel& k, cplx mu,
                                  const GridSpec& grid, const Tolerances& tol) {
  const Trajectory sp = scalar_semigroup(k, mu, grid, tol);
  const Trajectory sm = scalar_semigroup(k, -mu, grid, tol);
  const Trajectory c = scalar_cosine(k, mu * mu, grid, tol);
  double resid = 0.0;
  for (std::size_t i = 0; i < c.time_grid.size(); ++i)
    resid = std::max(resid, std::abs(0.5 * (sp.values[i][0] + sm.values[i][0]) -
                                     c.values[i][0]));
  return resid;
}

ContourResult contour_cosine(const SpectralOperator& op, double delta,
                             const WeightSequence& seq, double alpha,
                             double beta, double t,
                             const std::vector<cplx>& datum,
                             std::size_t probes, const Tolerances& tol) {
  if (!(delta > 0.0 && delta < 1.0))
    throw config_error("contour_cosine needs delta in (0, 1)");
  if (!(t > 0.0)) throw config_error("contour_cosine needs t > 0");
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();
  const std::vector<cplx> x = resolve_datum(datum, mus.size(), "contour_cosine");

  // C = sup M(rho)/rho^delta over a wide log grid; the admissible horizon is
  // cos(delta pi/2) / (C alpha^delta).
  double C = 0.0;
  for (int i = 0; i <= 640; ++i) {
    const double rho = 1e-2 * std::pow(10.0, static_cast<double>(i) / 64.0);
    C = std::max(C, seq.associated(rho) / std::pow(rho, delta));
  }
  if (!(C > 0.0))
    throw numeric_error("contour_cosine: associated function appears to vanish");
  const double cosd = std::cos(delta * kPi / 2.0);
  const double time_bound = cosd / (C * std::pow(alpha, delta));
  ContourResult out;
  out.time_bound = time_bound;
  if (t > time_bound * (1.0 + 1e-12))
    throw config_error("contour_cosine: t exceeds the admissible horizon " +
                       num_str(time_bound));

  // The contour encloses no spectrum: the squared region must sit inside the
  // resolvent set.
  const Region lam = Region::ultralog(seq, alpha, beta, 1.0);
  const ResolventProfile prof = region_resolvent_profile(
      op, lam.squared(), [](cplx) { return 1.0; }, 256);
  if (!prof.subset_of_resolvent)
    throw numeric_error("contour_cosine: contour region meets the spectrum near " +
                        cplx_str(prof.witness));

  // Truncation height: the integrand magnitude decays like
  // exp(-(cos(delta pi/2) - C alpha^delta t) |y|^delta + beta t).
  const double margin = std::max(cosd - C * std::pow(alpha, delta) * t, 0.02 * cosd);
  const double Y =
      std::min(std::pow((45.0 + beta * t) / margin, 1.0 / delta), 1e7);

  const std::size_t n_half = 2048;
  std::vector<double> ys(2 * n_half + 1);
  std::vector<double> xs(2 * n_half + 1);
  for (std::size_t mpos = 0; mpos <= n_half; ++mpos) {
    const double u = static_cast<double>(mpos) / static_cast<double>(n_half);
    const double y = Y * u * u * u;  // cubic clustering near the real axis
    // Boundary abscissa: x = M(alpha |x + iy|) + beta, solved by bisection.
    auto g = [&](double xv) {
      return xv - (seq.associated(alpha * std::hypot(xv, y)) + beta);
    };
    double hi = std::max(2.0 * beta, 1.0);
    int guard = 0;
    while (g(hi) <= 0.0 && guard++ < 240) hi *= 2.0;
    if (g(hi) <= 0.0)
      throw numeric_error("contour_cosine: boundary abscissa diverges");
    double lo = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) <= 0.0 ? lo : hi) = mid;
    }
    const double xv = 0.5 * (lo + hi);
    ys[n_half + mpos] = y;
    ys[n_half - mpos] = -y;
    xs[n_half + mpos] = xv;
    xs[n_half - mpos] = xv;
  }

  const std::size_t nn = ys.size();
  std::vector<cplx> lambda(nn), weight(nn);
  for (std::size_t i = 0; i < nn; ++i) lambda[i] = cplx{xs[i], ys[i]};
  for (std::size_t i = 0; i < nn; ++i) {
    const cplx dl = i == 0          ? lambda[1] - lambda[0]
                    : i == nn - 1   ? lambda[nn - 1] - lambda[nn - 2]
                                    : (lambda[i + 1] - lambda[i - 1]) * 0.5;
    const cplx ld = std::exp(delta * std::log(lambda[i]));
    bool sat = false;
    weight[i] = lambda[i] * safe_exp(lambda[i] * t - ld, &sat) * dl /
                (cplx{0.0, 2.0 * kPi});
  }

  out.contour_nodes = nn;
  out.values.resize(mus.size());
  for (std::size_t j = 0; j < mus.size(); ++j) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < nn; ++i) {
      const cplx den = lambda[i] * lambda[i] - mus[j];
      if (std::abs(den) < 1e-12 * (1.0 + std::abs(mus[j])))
        throw numeric_error("contour_cosine: contour passes through the spectrum");
      acc += weight[i] / den;
    }
    out.values[j] = acc * w[j] * x[j];
  }

  // Probe a handful of spectrum points against the direct kernel cosine.
  const std::size_t np = std::min<std::size_t>(probes, mus.size());
  const Kernel kd = Kernel::gevrey(delta);
  for (std::size_t p = 0; p < np; ++p) {
    const std::size_t idx = (mus.size() * (p + 1)) / (np + 1);
    const Trajectory direct =
        scalar_cosine(kd, mus[idx], GridSpec{t, 384}, tol);
    const cplx ref = direct.values.back()[0] * w[idx] * x[idx];
    out.residual = std::max(out.residual, std::abs(out.values[idx] - ref));
  }
  return out;
}

DerivativeBoundReport hille_yosida_derivative_check(
    const SpectralOperator& op, const Kernel& k, double omega, double a,
    int k_max, const std::vector<double>& lambda_grid) {
  if (k_max < 1 || k_max > 6)
    throw config_error("hille_yosida_derivative_check supports orders 1..6");
  if (lambda_grid.empty())
    throw config_error("hille_yosida_derivative_check needs a nonempty grid");
  const double absc = k.laplace_abscissa();
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();

  DerivativeBoundReport rep;
  for (double lam : lambda_grid) {
    if (!(lam > a && lam > omega && lam > absc))
      throw config_error(
          "hille_yosida_derivative_check: grid must lie beyond a, omega and "
          "the transform abscissa");
    if (std::abs(k.laplace(lam)) < 1e-12) {
      ++rep.skipped;
      continue;
    }
    const double hstep =
        std::min(0.05 * (lam - omega), 0.2 * (lam - std::max(a, absc)));

    // F_j over a stencil abscissa, shared across spectrum points.
    auto F = [&](double xv) {
      const cplx Kt = k.laplace(xv);
      std::vector<cplx> vals(mus.size());
      for (std::size_t j = 0; j < mus.size(); ++j) {
        const cplx den = cplx{xv, 0.0} - mus[j];
        if (std::abs(den) < 1e-12)
          throw config_error("hille_yosida_derivative_check: grid hits the spectrum");
        vals[j] = Kt * w[j] / den;
      }
      return vals;
    };

    for (int m = 1; m <= k_max; ++m) {
      auto stencil = [&](double hh) {
        std::vector<cplx> d(mus.size(), cplx{0.0, 0.0});
        for (int i = 0; i <= m; ++i) {
          const double off = (static_cast<double>(m) / 2.0 - i) * hh;
          const double coef = (i % 2 == 0 ? 1.0 : -1.0) * binom(m, i);
          const std::vector<cplx> fv = F(lam + off);
          for (std::size_t j = 0; j < mus.size(); ++j) d[j] += coef * fv[j];
        }
        const double hm = std::pow(hh, m);
        for (auto& v : d) v /= hm;
        return d;
      };
      const std::vector<cplx> D1 = stencil(hstep);
      const std::vector<cplx> D2 = stencil(hstep / 2.0);
      double fact = 1.0;
      for (int i = 2; i <= m; ++i) fact *= i;
      for (std::size_t j = 0; j < mus.size(); ++j) {
        const cplx D = (4.0 * D2[j] - D1[j]) / 3.0;
        if (std::abs(D1[j] - D2[j]) > 0.25 * std::abs(D) + 1e-10)
          throw numeric_error(
              "hille_yosida_derivative_check: derivative stencil failed to "
              "stabilize at order " + std::to_string(m));
        const double cand =
            std::abs(D) * std::pow(lam - omega, m + 1) / fact;
        if (cand > rep.M_fit) {
          rep.M_fit = cand;
          rep.witness = cplx{lam, 0.0};
          rep.witness_order = m;
        }
      }
    }
  }
  rep.ok = rep.M_fit <= 1e6;
  return rep;
}

GrowthWitness growth_witness(const SpectralOperator& op, const Kernel& k,
                             double omega, double r) {
  const double absc = k.laplace_abscissa();
  const std::vector<cplx>& mus = op.points();
  const std::vector<double>& w = op.c_weights();

  auto q_of = [&](cplx lam) -> double {
    if (!(lam.real() > absc)) return kNaN;
    cplx Kt;
    try {
      Kt = k.laplace(lam);
    } catch (const error&) {
      return kNaN;
    }
    double sup = 0.0;
    for (std::size_t j = 0; j < mus.size(); ++j) {
      const cplx den = lam * lam - mus[j];
      const double d = std::abs(den);
      if (d < 1e-300) return kInf;
      sup = std::max(sup, std::abs(lam * Kt) * w[j] / d);
    }
    return sup / std::pow(std::abs(lam), r);
  };

  GrowthWitness out;
  auto run_chain = [&](const std::vector<cplx>& chain) {
    std::vector<std::pair<cplx, double>> vals;
    for (cplx lam : chain) {
      const double qv = q_of(lam);
      if (std::isnan(qv)) continue;
      if (std::isinf(qv)) {
        out.bound_ok = false;
        out.witness = lam;
        return;
      }
      out.M0 = std::max(out.M0, qv);
      vals.emplace_back(lam, qv);
    }
    const std::size_t n = vals.size();
    if (n >= 3) {
      const double q0 = vals[n - 3].second, q1 = vals[n - 2].second,
                   q2 = vals[n - 1].second;
      if (q2 > q1 && q1 > q0 && q0 > 0.0 && q2 / q0 > 2.0) {
        out.bound_ok = false;
        out.witness = vals[n - 1].first;
      }
    }
  };

  std::vector<cplx> approach;
  for (int m = 0; m <= 24; ++m)
    approach.emplace_back(omega + std::pow(2.0, -m), 0.0);
  run_chain(approach);

  const double phis[] = {0.0, kPi / 4.0, -kPi / 4.0, 0.45 * kPi, -0.45 * kPi};
  for (double phi : phis) {
    std::vector<cplx> ray;
    for (int j = 0; j <= 20; ++j)
      ray.push_back(cplx{omega, 0.0} +
                    std::pow(2.0, j) * cplx{std::cos(phi), std::sin(phi)});
    run_chain(ray);
  }
  return out;
}

}  // namespace convolab
