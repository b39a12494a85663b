#include "convolab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

namespace convolab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

std::string num_str(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string cplx_str(cplx z) {
  std::string s = num_str(z.real());
  if (z.imag() != 0.0) s += (z.imag() > 0.0 ? "+" : "") + num_str(z.imag()) + "i";
  return s;
}

std::string seq_label(const WeightSequence& seq) {
  std::string s = seq.kind_name();
  if (seq.gevrey_index() > 0.0)
    s += "[" + num_str(seq.gevrey_index()) + "]";
  else
    s += "[n=" + std::to_string(seq.order()) + "]";
  if (seq.log_power() != 1) s += "^" + std::to_string(seq.log_power());
  return s;
}

std::string mode_name(GrowthMode m) {
  return m == GrowthMode::Beurling ? "beurling" : "roumieu";
}

double spectral_distance(const SpectralOperator& op, cplx z) {
  double d = kInf;
  for (const cplx& mu : op.points()) d = std::min(d, std::abs(z - mu));
  return d;
}

// Model resolvent norm sup_j w_j / |lambda - mu_j| (weights default to one).
double resolvent_sup(const SpectralOperator& op, cplx lambda) {
  const auto& mu = op.points();
  const auto& w = op.c_weights();
  double best = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double d = std::abs(lambda - mu[j]);
    const double wj = w.empty() ? 1.0 : w[j];
    if (d < 1e-300) return kInf;
    best = std::max(best, wj / d);
  }
  return best;
}

// "There exists C" operationalized: profile the region twice (n and 2n
// samples) and require the fitted constant stable under the doubling
// (ratio < 1.1).  A spectral collision or an unstable fit both surface a
// concrete witness point.
struct EnvFit {
  bool subset = true;
  bool stable = false;
  bool collision = false;
  bool empty = false;  // region starts beyond the sampling window
  double constant = 0.0;
  cplx witness{0.0, 0.0};
  std::size_t samples = 0;
};

EnvFit fit_envelope(const SpectralOperator& op, const Region& r,
                    const std::function<double(cplx)>& env, std::size_t n = 384,
                    double radius = 1e6) {
  EnvFit f;
  const ResolventProfile coarse = region_resolvent_profile(op, r, env, n, radius);
  f.samples = coarse.samples;
  if (!coarse.subset_of_resolvent) {
    f.subset = false;
    f.collision = true;
    f.witness = coarse.witness;
    return f;
  }
  if (coarse.samples == 0) {
    f.empty = true;  // nothing to verify inside the window: not a pass
    return f;
  }
  const ResolventProfile fine =
      region_resolvent_profile(op, r, env, 2 * n, radius);
  f.samples += fine.samples;
  if (!fine.subset_of_resolvent) {
    f.subset = false;
    f.collision = true;
    f.witness = fine.witness;
    return f;
  }
  f.constant = std::max(coarse.sup_ratio, fine.sup_ratio);
  f.stable = fine.sup_ratio <= 1.1 * coarse.sup_ratio + 1e-12;
  f.witness =
      fine.sup_ratio >= coarse.sup_ratio ? fine.sup_site : coarse.sup_site;
  return f;
}

Verdict make_pass(std::string klass, std::string detail, double constant,
                  std::vector<double> grid) {
  Verdict v;
  v.klass = std::move(klass);
  v.kind = VerdictKind::Pass;
  v.detail = std::move(detail);
  v.constant = constant;
  v.grid = std::move(grid);
  return v;
}

Verdict make_fail(const SpectralOperator& op, std::string klass, cplx witness,
                  std::string detail, double constant,
                  std::vector<double> grid) {
  Verdict v;
  v.klass = std::move(klass);
  v.kind = VerdictKind::Fail;
  v.witness = witness;
  v.witness_distance = spectral_distance(op, witness);
  v.detail = std::move(detail);
  v.constant = constant;
  v.grid = std::move(grid);
  return v;
}

Verdict make_inconclusive(std::string klass, std::string reason,
                          std::vector<double> grid = {}) {
  Verdict v;
  v.klass = std::move(klass);
  v.kind = VerdictKind::Inconclusive;
  v.detail = std::move(reason);
  v.grid = std::move(grid);
  return v;
}

// Region-offset ladder for "there exists C >= 0 shifting the region off the
// spectrum".  Deliberately capped at 16 so collision verdicts stay decidable
// inside the sampled spectral window of the symbol models.
const double kOffsetLadder[] = {1.0, 4.0, 16.0};

struct LadderFit {
  bool pass = false;
  double offset = 0.0;  // region offset C that passed
  EnvFit fit;           // passing fit, or the last failing one
  double last_offset = 0.0;
};

template <typename RegionMaker, typename EnvMaker>
LadderFit ladder_fit(const SpectralOperator& op, RegionMaker&& make_region,
                     EnvMaker&& make_env) {
  LadderFit out;
  for (double C : kOffsetLadder) {
    const Region r = make_region(C);
    const EnvFit f = fit_envelope(op, r, make_env(C));
    out.last_offset = C;
    out.fit = f;
    if (f.subset && f.stable) {
      out.pass = true;
      out.offset = C;
      return out;
    }
  }
  return out;
}

std::string fit_failure_text(const EnvFit& f) {
  if (f.collision)
    return "region meets the spectrum at " + cplx_str(f.witness);
  if (f.empty)
    return "region lies beyond the sampling window (no boundary samples)";
  return "envelope constant did not stabilize under grid doubling near " +
         cplx_str(f.witness);
}

}  // namespace

std::vector<double> default_k_grid() {
  std::vector<double> g;
  for (int e = -4; e <= 4; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}
std::vector<double> default_alpha_grid() { return {0.25, 0.5, 1.0, 2.0}; }
std::vector<double> default_beta_grid() { return {1.0, 2.0, 4.0}; }
std::vector<double> default_eps_grid() { return {0.1, 0.2, 0.3, 0.5}; }
std::vector<double> default_sigma_grid() { return {0.5, 1.0, 2.0}; }

// ---------------------------------------------------------------------------
// Integrated cosine
// ---------------------------------------------------------------------------

Verdict integrated_cosine_check(const SpectralOperator& op,
                                const std::vector<double>& alpha_grid,
                                const std::vector<double>& beta_grid,
                                int n_max) {
  if (alpha_grid.empty() || beta_grid.empty())
    throw config_error("integrated cosine: parameter grids must be non-empty");
  if (n_max < 0 || n_max > 12)
    throw config_error("integrated cosine: degree cap must lie in [0, 12]");
  const std::string klass = "integrated-cosine(" + std::to_string(n_max) + ")";
  std::vector<double> grid = alpha_grid;
  grid.insert(grid.end(), beta_grid.begin(), beta_grid.end());

  bool all_collide = true;
  std::optional<Verdict> first_collision;
  std::optional<Verdict> envelope_failure;

  for (double a : alpha_grid) {
    for (double b : beta_grid) {
      if (!(a > 0.0) || !(b > 0.0))
        throw config_error("integrated cosine: grid entries must be positive");
      const Region region = Region::exponential(a, b).squared();
      bool pair_collided = false;
      for (int n = 0; n <= n_max; ++n) {
        const auto env = [n](cplx w) {
          return std::pow(1.0 + std::abs(w), static_cast<double>(n));
        };
        const EnvFit f = fit_envelope(op, region, env);
        if (!f.subset) {
          pair_collided = true;
          if (!first_collision)
            first_collision = make_fail(
                op, klass, f.witness,
                "every tested region meets the spectrum; e.g. E^2(" +
                    num_str(a) + "," + num_str(b) + ") contains " +
                    cplx_str(f.witness),
                0.0, grid);
          break;  // containment does not depend on the envelope degree
        }
        all_collide = false;
        if (f.stable)
          return make_pass(klass,
                           "E^2(" + num_str(a) + "," + num_str(b) +
                               ") inside the resolvent set with degree " +
                               std::to_string(n) + " envelope constant " +
                               num_str(f.constant),
                           f.constant, grid);
        if (!envelope_failure)
          envelope_failure = make_fail(
              op, klass, f.witness,
              "E^2(" + num_str(a) + "," + num_str(b) +
                  ") avoids the spectrum but no polynomial degree <= " +
                  std::to_string(n_max) + " stabilizes; " + fit_failure_text(f),
              f.constant, grid);
      }
      (void)pair_collided;
    }
  }
  if (all_collide && first_collision) return *first_collision;
  if (envelope_failure) return *envelope_failure;
  if (first_collision) return *first_collision;
  return make_inconclusive(klass, "empty sweep", grid);
}

// ---------------------------------------------------------------------------
// Ultradistribution sine
// ---------------------------------------------------------------------------

namespace {

LadderFit ultra_k_fit(const SpectralOperator& op, const WeightSequence& seq,
                      double k) {
  return ladder_fit(
      op,
      [&](double C) { return Region::log_region(seq, k, C).squared(); },
      [&](double) {
        return std::function<double(cplx)>([&seq, k](cplx w) {
          return safe_exp(seq.associated(k * std::sqrt(std::abs(w))));
        });
      });
}

}  // namespace

Verdict ultradistribution_sine_check(const SpectralOperator& op,
                                     const WeightSequence& seq, GrowthMode mode,
                                     const std::vector<double>& k_grid) {
  if (k_grid.empty())
    throw config_error("ultradistribution sine: k grid must be non-empty");
  for (double k : k_grid)
    if (!(k > 0.0))
      throw config_error("ultradistribution sine: k grid entries must be positive");
  const ConditionReport cond = check_conditions(seq);
  if (!(cond.m1 && cond.m2 && cond.m3prime))
    throw config_error(
        "ultradistribution sine: weight sequence fails the admissibility "
        "conditions (log-convexity / stability / divergence test)");
  const std::string klass =
      "ultradistribution-sine(" + seq_label(seq) + "," + mode_name(mode) + ")";

  if (mode == GrowthMode::Beurling) {
    LadderFit last;
    double last_k = k_grid.front();
    for (double k : k_grid) {
      const LadderFit f = ultra_k_fit(op, seq, k);
      last = f;
      last_k = k;
      if (f.pass)
        return make_pass(klass,
                         "admissible scale k=" + num_str(k) +
                             " with region offset " + num_str(f.offset) +
                             " and envelope constant " + num_str(f.fit.constant),
                         f.fit.constant, k_grid);
    }
    return make_fail(op, klass, last.fit.witness,
                     "no admissible scale on the grid; at k=" + num_str(last_k) +
                         " offset " + num_str(last.last_offset) + " the " +
                         fit_failure_text(last.fit),
                     last.fit.constant, k_grid);
  }

  double worst_constant = 0.0;
  for (double k : k_grid) {
    const LadderFit f = ultra_k_fit(op, seq, k);
    if (!f.pass)
      return make_fail(op, klass, f.fit.witness,
                       "scale k=" + num_str(k) + " fails: with offset " +
                           num_str(f.last_offset) + " the " +
                           fit_failure_text(f.fit),
                       f.fit.constant, k_grid);
    worst_constant = std::max(worst_constant, f.fit.constant);
  }
  return make_pass(klass,
                   "every scale on the grid admissible; largest per-scale "
                   "envelope constant " +
                       num_str(worst_constant),
                   worst_constant, k_grid);
}

// ---------------------------------------------------------------------------
// Hyperfunction sine
// ---------------------------------------------------------------------------

namespace {

LadderFit hyper_eps_fit(const SpectralOperator& op, double eps) {
  return ladder_fit(
      op, [&](double C) { return Region::ouchi(eps, C).squared(); },
      [&](double) {
        return std::function<double(cplx)>([eps](cplx w) {
          return safe_exp(eps * std::sqrt(std::abs(w)));
        });
      });
}

}  // namespace

Verdict hyperfunction_sine_check(const SpectralOperator& op,
                                 const std::vector<double>& eps_grid) {
  if (eps_grid.empty())
    throw config_error("hyperfunction sine: eps grid must be non-empty");
  const std::string klass = "hyperfunction-sine";
  double worst_constant = 0.0;
  for (double eps : eps_grid) {
    if (!(eps > 0.0 && eps < 1.0))
      throw config_error("hyperfunction sine: eps must lie in (0, 1)");
    const LadderFit f = hyper_eps_fit(op, eps);
    if (!f.pass)
      return make_fail(op, klass, f.fit.witness,
                       "eps=" + num_str(eps) + " fails: with offset " +
                           num_str(f.last_offset) + " the " +
                           fit_failure_text(f.fit),
                       f.fit.constant, eps_grid);
    worst_constant = std::max(worst_constant, f.fit.constant);
  }
  return make_pass(klass,
                   "every eps on the grid admits an offset; largest envelope "
                   "constant " +
                       num_str(worst_constant),
                   worst_constant, eps_grid);
}

// ---------------------------------------------------------------------------
// Fourier hyperfunction sine
// ---------------------------------------------------------------------------

Verdict fourier_hyperfunction_sine_check(const SpectralOperator& op,
                                         const std::vector<double>& sigma_grid,
                                         const std::vector<double>& eps_grid) {
  if (sigma_grid.empty() || eps_grid.empty())
    throw config_error("fourier hyperfunction sine: grids must be non-empty");
  const std::string klass = "fourier-hyperfunction-sine";
  std::vector<double> grid = sigma_grid;
  grid.insert(grid.end(), eps_grid.begin(), eps_grid.end());

  for (const cplx& mu : op.points()) {
    const double tol = 1e-9 * (1.0 + std::abs(mu));
    if (mu.real() > tol || std::abs(mu.imag()) > tol) {
      Verdict v = make_fail(op, klass, mu,
                            "spectrum point " + cplx_str(mu) +
                                " escapes the closed negative real axis",
                            0.0, grid);
      v.witness_distance = 0.0;
      return v;
    }
  }

  double worst_constant = 0.0;
  for (double sigma : sigma_grid) {
    if (!(sigma > 0.0))
      throw config_error("fourier hyperfunction sine: sigma grid must be positive");
    for (double eps : eps_grid) {
      if (!(eps > 0.0))
        throw config_error("fourier hyperfunction sine: eps grid must be positive");
      const Region region = Region::half_plane(sigma).squared();
      const EnvFit f = fit_envelope(op, region, [eps](cplx w) {
        return safe_exp(eps * std::sqrt(std::abs(w)));
      });
      if (!(f.subset && f.stable))
        return make_fail(op, klass, f.witness,
                         "sigma=" + num_str(sigma) + ", eps=" + num_str(eps) +
                             ": " + fit_failure_text(f),
                         f.constant, grid);
      worst_constant = std::max(worst_constant, f.constant);
    }
  }
  return make_pass(klass,
                   "spectrum inside the closed negative real axis; largest "
                   "envelope constant " +
                       num_str(worst_constant),
                   worst_constant, grid);
}

// ---------------------------------------------------------------------------
// Local convoluted cosine regions
// ---------------------------------------------------------------------------

namespace {

// log(1 / |Theta-transform|) with the integrated kernel transform K~/lambda;
// +inf where the transform vanishes.
double recip_theta_log(const Kernel& k, cplx lambda) {
  const cplx v = k.laplace(lambda) / lambda;
  const double a = std::abs(v);
  if (!(a > 1e-300)) return kInf;
  return -std::log(a);
}

std::string local_klass(const Kernel& k, double tau) {
  return "local-convoluted-cosine(" + k.id() + "," + num_str(tau) + ")";
}

}  // namespace

LocalCosineRegions local_convoluted_cosine_regions(const Kernel& k, double tau,
                                                   double eps,
                                                   const SpectralOperator& op) {
  if (!(tau > 0.0))
    throw config_error("local convoluted cosine: tau must be positive");
  if (!(eps > 0.0 && eps < 1.0))
    throw config_error("local convoluted cosine: eps must lie in (0, 1)");
  LocalCosineRegions out;
  const std::string klass = local_klass(k, tau);

  // Kernel hypothesis: 1/|Theta~| <= T exp(eps |lambda|) on the linear-growth
  // region.  Fit the log constant on boundary plus real-ray samples and
  // require stability when both the sample count and the radius double.
  double fits[2] = {-kInf, -kInf};
  for (int pass = 0; pass < 2; ++pass) {
    const double R = 1e4 * (pass + 1);
    const std::size_t n = 48u << pass;
    const Region hyp_region = Region::ouchi(eps, 1.0);
    std::vector<cplx> samples = hyp_region.boundary(n, R).points;
    const double vertex = 1.0 / (1.0 - eps);
    for (std::size_t i = 0; i < n; ++i) {
      const double rho =
          0.1 * std::pow(R / 0.1, static_cast<double>(i) /
                                      static_cast<double>(n - 1));
      samples.push_back(cplx(vertex + rho, 0.0));
    }
    double sup = -kInf;
    for (const cplx& lam : samples)
      sup = std::max(sup, recip_theta_log(k, lam) - eps * std::abs(lam));
    fits[pass] = sup;
  }
  out.hypothesis_log_constant = fits[1];
  const bool hyp_ok =
      std::isfinite(fits[1]) && fits[1] <= fits[0] + std::log(1.1);
  if (!hyp_ok) {
    out.hypothesis_ok = false;
    out.hypothesis_note =
        "reciprocal transform growth did not stabilize on the region (log fit " +
        num_str(fits[0]) + " -> " + num_str(fits[1]) +
        " under window doubling)";
    out.conclusion = make_inconclusive(
        klass, "hypothesis-check-failure: " + out.hypothesis_note,
        {tau, eps});
    return out;
  }
  out.hypothesis_ok = true;

  const LadderFit f = ladder_fit(
      op, [&](double C) { return Region::ouchi(eps, C).squared(); },
      [&](double) {
        return std::function<double(cplx)>([tau, eps](cplx w) {
          return safe_exp(tau * eps * std::sqrt(std::abs(w)));
        });
      });
  if (f.pass)
    out.conclusion = make_pass(
        klass,
        "kernel growth constant log T=" + num_str(out.hypothesis_log_constant) +
            "; squared region with offset " + num_str(f.offset) +
            " verified with envelope constant " + num_str(f.fit.constant),
        f.fit.constant, {tau, eps});
  else
    out.conclusion =
        make_fail(op, klass, f.fit.witness,
                  "eps=" + num_str(eps) + ": with offset " +
                      num_str(f.last_offset) + " the " +
                      fit_failure_text(f.fit),
                  f.fit.constant, {tau, eps});
  return out;
}

LocalCosineRegions local_convoluted_cosine_regions(const Kernel& k, double tau,
                                                   const WeightSequence& seq,
                                                   double alpha, double beta,
                                                   const SpectralOperator& op) {
  if (!(tau > 0.0))
    throw config_error("local convoluted cosine: tau must be positive");
  if (!(alpha > 0.0) || !(beta >= 0.0))
    throw config_error("local convoluted cosine: need alpha > 0 and beta >= 0");
  const double s = seq.gevrey_index();
  if (!(s > 0.0))
    throw config_error(
        "local convoluted cosine: the sequence needs a closed-form Gevrey "
        "index");
  LocalCosineRegions out;
  const std::string klass = local_klass(k, tau);

  // Kernel hypothesis at unit scale: 1/|Theta~(lambda)| = O(exp(M(lambda)))
  // along the positive ray, capped where the associated function is exact.
  const int J = std::clamp(static_cast<int>(std::floor(8.0 * s)), 8, 40);
  double fit_half = -kInf, fit_full = -kInf;
  int argmax = 0;
  for (int j = 0; j <= J; ++j) {
    const double lam = std::ldexp(1.0, j);
    const double o = recip_theta_log(k, cplx(lam, 0.0)) - seq.associated(lam);
    if (o > fit_full) {
      fit_full = o;
      argmax = j;
    }
    if (j <= J / 2) fit_half = std::max(fit_half, o);
  }
  out.hypothesis_log_constant = fit_full;
  const bool hyp_ok = std::isfinite(fit_full) && argmax <= (3 * J) / 4 &&
                      fit_full <= fit_half + std::log(1.1);
  if (!hyp_ok) {
    out.hypothesis_ok = false;
    out.hypothesis_note =
        "reciprocal transform growth escapes exp(M(lambda)) on the ray (log "
        "fit " +
        num_str(fit_half) + " -> " + num_str(fit_full) + ", peak at 2^" +
        std::to_string(argmax) + ")";
    out.conclusion = make_inconclusive(
        klass, "hypothesis-check-failure: " + out.hypothesis_note,
        {tau, alpha, beta});
    return out;
  }
  out.hypothesis_ok = true;

  const Region region = Region::ultralog(seq, alpha, beta, 1.0).squared();
  const EnvFit f = fit_envelope(op, region, [&seq, alpha](cplx w) {
    const double r = std::sqrt(std::abs(w));
    return safe_exp(seq.associated(alpha * r)) / (1.0 + r);
  });
  if (f.subset && f.stable)
    out.conclusion = make_pass(
        klass,
        "kernel growth constant log C=" + num_str(out.hypothesis_log_constant) +
            "; squared log-type region (alpha=" + num_str(alpha) +
            ", beta=" + num_str(beta) + ") verified with envelope constant " +
            num_str(f.constant),
        f.constant, {tau, alpha, beta});
  else
    out.conclusion = make_fail(op, klass, f.witness,
                               "alpha=" + num_str(alpha) + ", beta=" +
                                   num_str(beta) + ": " + fit_failure_text(f),
                               f.constant, {tau, alpha, beta});
  return out;
}

// ---------------------------------------------------------------------------
// Analytic semigroup witness
// ---------------------------------------------------------------------------

AnalyticWitness analytic_semigroup_witness(const SpectralOperator& op,
                                           const Kernel& k, double gamma,
                                           double omega, std::size_t grid) {
  if (!(gamma > 0.0 && gamma < 0.5 * kPi))
    throw config_error("analytic witness: gamma must lie in (0, pi/2)");
  if (grid < 4) grid = 4;
  AnalyticWitness out;
  out.gamma = gamma;
  out.omega = omega;
  const std::string klass = "analytic-K-semigroup(" + k.id() + "," +
                            num_str(gamma) + "," + num_str(omega) + ")";
  const double half = 0.5 * kPi + gamma;

  const Region sector = Region::shifted_sector(omega, half);
  for (const cplx& mu : op.points())
    if (sector.contains(mu))
      throw config_error("analytic witness: sector meets the spectrum at " +
                         cplx_str(mu));

  std::size_t skipped = 0;
  const auto eval_at = [&](double rho, double phi, double& val) {
    const cplx lam = omega + rho * std::polar(1.0, phi);
    cplx kt;
    try {
      kt = k.laplace_continued(lam);
    } catch (const config_error&) {
      ++skipped;
      val = -1.0;
      return lam;
    }
    const double rn = resolvent_sup(op, lam);
    if (!std::isfinite(rn)) {
      ++skipped;
      val = -1.0;
      return lam;
    }
    val = std::abs(lam - omega) * std::abs(kt) * rn;
    return lam;
  };
  // Per-ray sup: coarse logarithmic sweep, then a dense pass around the
  // bracket of the running peak so the estimate converges under doubling.
  const auto sup_on = [&](std::size_t m, double& sup, cplx& site) {
    sup = 0.0;
    site = cplx(0.0, 0.0);
    for (int ia = -3; ia <= 3; ++ia) {
      const double phi = half * (1.0 - 1e-9) * static_cast<double>(ia) / 3.0;
      std::size_t best = 0;
      double ray_sup = -1.0;
      const auto rho_of = [&](double t) { return 1e-2 * std::pow(1e7, t); };
      for (std::size_t j = 0; j < m; ++j) {
        double val;
        const cplx lam = eval_at(
            rho_of(static_cast<double>(j) / static_cast<double>(m - 1)), phi,
            val);
        if (val > ray_sup) {
          ray_sup = val;
          best = j;
          if (val > sup) {
            sup = val;
            site = lam;
          }
        }
      }
      const double t_lo =
          static_cast<double>(best > 0 ? best - 1 : 0) /
          static_cast<double>(m - 1);
      const double t_hi =
          static_cast<double>(std::min(best + 1, m - 1)) /
          static_cast<double>(m - 1);
      for (int j = 0; j <= 64; ++j) {
        double val;
        const cplx lam =
            eval_at(rho_of(t_lo + (t_hi - t_lo) * j / 64.0), phi, val);
        if (val > sup) {
          sup = val;
          site = lam;
        }
      }
    }
  };
  double sup_c = 0.0, sup_f = 0.0;
  cplx site_c, site_f;
  sup_on(grid, sup_c, site_c);
  sup_on(2 * grid, sup_f, site_f);
  out.M_fit = std::max(sup_c, sup_f);
  const bool stable = sup_f <= 1.1 * sup_c + 1e-12;

  // Decay of |lambda Ktilde(lambda)| ||R(lambda)|| along the real ray.
  std::vector<double> ray;
  for (int j = 0; j <= 20; ++j) {
    const cplx lam(omega + std::ldexp(1.0, j), 0.0);
    if (!(lam.real() > k.laplace_abscissa())) continue;
    ray.push_back(std::abs(lam) * std::abs(k.laplace(lam)) *
                  resolvent_sup(op, lam));
  }
  const std::size_t R = ray.size();
  out.decay_ok = R >= 3 && ray[R - 1] < ray[R - 2] && ray[R - 2] < ray[R - 3] &&
                 ray[R - 1] <= 0.5 * ray[R - 3];

  const std::vector<double> vgrid = {gamma, omega, static_cast<double>(grid)};
  std::string skip_note =
      skipped ? "; " + std::to_string(skipped) + " samples outside the " +
                    "transform domain were skipped"
              : "";
  if (stable && out.decay_ok) {
    out.verdict = make_pass(klass,
                            "sector sup constant " + num_str(out.M_fit) +
                                " stable and the real-ray decay test passed" +
                                skip_note,
                            out.M_fit, vgrid);
  } else {
    const cplx w = sup_f >= sup_c ? site_f : site_c;
    std::string why = !stable ? "sector sup did not stabilize under grid "
                                "doubling (" +
                                    num_str(sup_c) + " -> " + num_str(sup_f) +
                                    ")"
                              : "real-ray decay test failed";
    out.verdict =
        make_fail(op, klass, w, why + skip_note, out.M_fit, vgrid);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hyperfunction -> k-half transfer
// ---------------------------------------------------------------------------

SectorTransfer hyperfunction_to_k_half(const SpectralOperator& op, double eps,
                                       std::size_t grid) {
  if (!(eps > 0.0 && eps < 1.0 / std::sqrt(2.0)))
    throw config_error(
        "hyperfunction transfer: eps must lie in (0, 1/sqrt(2))");
  SectorTransfer out;
  out.angle = 2.0 * std::acos(eps) - 0.5 * kPi;
  out.gamma_interior = 0.95 * out.angle;
  const std::string klass = "analytic-K-semigroup(k-half," +
                            num_str(out.gamma_interior) + ",eps=" +
                            num_str(eps) + ")";

  const LadderFit hf = hyper_eps_fit(op, eps);
  if (!hf.pass) {
    out.verdict = make_fail(op, klass, hf.fit.witness,
                            "hyperfunction test failed at eps=" + num_str(eps) +
                                ": with offset " + num_str(hf.last_offset) +
                                " the " + fit_failure_text(hf.fit),
                            hf.fit.constant, {eps});
    return out;
  }

  const Region region = Region::ouchi(eps, hf.offset).squared();
  const SectorWitness sw = sector_inclusion_witness(region, out.gamma_interior);
  if (!sw.ok) {
    out.verdict = make_fail(
        op, klass, sw.violation,
        "no sector vertex on the search ladder keeps the witness sector "
        "inside the verified region; escape at " +
            cplx_str(sw.violation),
        0.0, {eps});
    return out;
  }
  out.omega = sw.omega;
  out.decay_margin =
      eps - std::cos(0.25 * kPi + 0.5 * out.gamma_interior);

  AnalyticWitness aw = analytic_semigroup_witness(op, Kernel::k_half(),
                                                  out.gamma_interior, out.omega,
                                                  grid);
  out.M_fit = aw.M_fit;
  out.verdict = std::move(aw.verdict);
  out.verdict.detail += "; transferred aperture " + num_str(out.angle) +
                        ", square-root decay margin " +
                        num_str(out.decay_margin);
  if (out.decay_margin >= 0.0 && out.verdict.kind == VerdictKind::Pass) {
    out.verdict.kind = VerdictKind::Fail;
    out.verdict.witness = cplx(eps, 0.0);
    out.verdict.detail += " (nonnegative margin: decay not guaranteed)";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ultradistribution -> sub-exponential kernel transfer
// ---------------------------------------------------------------------------

Verdict ultra_to_k_delta(const SpectralOperator& op, const WeightSequence& seq,
                         GrowthMode mode, double delta) {
  const double s = seq.gevrey_index();
  if (!(s > 1.0))
    throw config_error(
        "sub-exponential transfer: the sequence needs a Gevrey index above "
        "one");
  const double lo = 1.0 / (2.0 * s);
  const bool in_range = mode == GrowthMode::Beurling
                            ? (delta > lo && delta < 0.5)
                            : (delta >= lo && delta < 0.5);
  if (!in_range)
    throw config_error("delta-out-of-range: admissible interval is " +
                       std::string(mode == GrowthMode::Beurling ? "(" : "[") +
                       num_str(lo) + ", 0.5) for this sequence");
  const std::string klass = "k-delta-transfer(" + seq_label(seq) + "," +
                            mode_name(mode) + "," + num_str(delta) + ")";

  const Verdict pre =
      ultradistribution_sine_check(op, seq, mode, default_k_grid());
  if (pre.kind != VerdictKind::Pass) {
    Verdict v = make_fail(op, klass, pre.witness,
                          "ultradistribution precondition failed: " + pre.detail,
                          pre.constant, {delta});
    v.witness_distance = pre.witness_distance;
    return v;
  }

  const double Cs = s;
  const double cosd = std::cos(kPi * delta);
  const auto tail_ok = [&](double k, double& last, double& peak_lam) {
    std::vector<double> E(41);
    double peak = -kInf;
    peak_lam = 1.0;
    for (int j = 0; j <= 40; ++j) {
      const double lam = std::ldexp(1.0, j);
      E[j] = Cs * std::pow(k, 1.0 / s) * std::pow(lam, lo) -
             cosd * std::pow(lam, delta);
      if (E[j] > peak) {
        peak = E[j];
        peak_lam = lam;
      }
    }
    last = E[40];
    return E[40] < E[39] && E[39] < E[38] && last < -10.0;
  };

  std::vector<double> k_try = mode == GrowthMode::Beurling
                                  ? std::vector<double>{1.0}
                                  : default_k_grid();
  double last = 0.0, peak_lam = 1.0;
  for (double k : k_try) {
    if (tail_ok(k, last, peak_lam))
      return make_pass(klass,
                       "decay exponent falls to " + num_str(last) +
                           " at the end of the doubling ray (scale k=" +
                           num_str(k) + ")",
                       last, {delta, k});
  }
  return make_fail(op, klass, cplx(peak_lam, 0.0),
                   "decay exponent does not fall below -10 on the doubling "
                   "ray (last value " +
                       num_str(last) + ")",
                   last, {delta});
}

// ---------------------------------------------------------------------------
// Rotation transfer
// ---------------------------------------------------------------------------

RotationTransfer rotation_transfer(const SpectralOperator& op,
                                   const WeightSequence& seq, const Kernel& kern,
                                   double k, double omega, double theta) {
  const double s = seq.gevrey_index();
  if (!(s > 1.0 && s <= 2.0))
    throw config_error(
        "rotation transfer: sequence Gevrey index must lie in (1, 2]");
  if (!(k > 0.0)) throw config_error("rotation transfer: k must be positive");
  if (!(omega > 0.0))
    throw config_error("rotation transfer: omega must be positive");
  if (!(theta > 0.0 && theta <= 0.5 * kPi + 1e-12))
    throw config_error("rotation transfer: theta must lie in (0, pi/2]");
  RotationTransfer out;
  const std::string klass = "rotation-transfer(" + seq_label(seq) + ",k=" +
                            num_str(k) + ",theta=" + num_str(theta) + ")";
  const std::vector<double> vgrid = {k, omega, theta};

  // Lower Gevrey constant: inf M(rho)/rho^{1/s} on the window where the
  // associated function is exact.
  const double cap =
      std::min(1e6, std::pow(static_cast<double>(seq.order()), s));
  double l = kInf;
  for (int i = 0; i < 200; ++i) {
    const double rho =
        10.0 * std::pow(cap / 10.0, static_cast<double>(i) / 199.0);
    l = std::min(l, seq.associated(rho) / std::pow(rho, 1.0 / s));
  }
  out.l = l;

  // Kernel hypothesis 1/|Ktilde| = O(exp(M(k lambda))) on the real ray.
  {
    const int J = std::clamp(
        static_cast<int>(std::floor(std::log2(std::min(1e6, cap / k)))), 6,
        20);
    double fit_half = -kInf, fit_full = -kInf;
    int argmax = 0;
    for (int j = 0; j <= J; ++j) {
      const double lam = std::ldexp(1.0, j);
      const cplx v = kern.laplace(cplx(lam, 0.0));
      const double a = std::abs(v);
      const double o =
          (a > 1e-300 ? -std::log(a) : kInf) - seq.associated(k * lam);
      if (o > fit_full) {
        fit_full = o;
        argmax = j;
      }
      if (j <= J / 2) fit_half = std::max(fit_half, o);
    }
    out.kernel_hypothesis_ok = std::isfinite(fit_full) &&
                               argmax <= (3 * J) / 4 &&
                               fit_full <= fit_half + std::log(1.1);
    if (!out.kernel_hypothesis_ok) {
      out.verdict = make_inconclusive(
          klass,
          "hypothesis failure: kernel transform growth escapes "
          "exp(M(k lambda)) on the ray (log fit " +
              num_str(fit_half) + " -> " + num_str(fit_full) + ")",
          vgrid);
      return out;
    }
  }

  // Resolvent hypothesis on the parabola domain.
  double a_const = 0.0;
  {
    const EnvFit f = fit_envelope(op, Region::parabola(omega),
                                  [&seq, k](cplx w) {
                                    return safe_exp(seq.associated(
                                        k * std::sqrt(std::abs(w))));
                                  });
    out.resolvent_hypothesis_ok = f.subset && f.stable;
    if (!out.resolvent_hypothesis_ok) {
      out.verdict = make_inconclusive(
          klass,
          "hypothesis failure: resolvent growth on the parabola domain (" +
              fit_failure_text(f) + ")",
          vgrid);
      return out;
    }
    a_const = f.constant;
  }

  // Radial threshold from the quadratic-vs-power inequality.
  const double wp = (omega + 1.0) * (omega + 1.0);
  const auto G = [&](double x) {
    return x * x / (4.0 * wp) - std::pow(x, s) / (k * std::pow(l, s)) - wp;
  };
  double hi = 1.0;
  bool found = false;
  for (int i = 0; i < 60; ++i) {
    if (G(hi) >= 0.0) {
      found = true;
      break;
    }
    hi *= 2.0;
  }
  if (!found) {
    out.beta = 0.0;
    out.verdict = make_fail(
        op, klass, cplx(k, 0.0),
        "no admissible radial threshold at this scale (the quadratic and "
        "power terms compete); a larger k is required",
        0.0, vgrid);
    out.verdict.witness_distance = 0.0;
    return out;
  }
  double lo_x = hi * 0.5;
  if (hi <= 1.0) lo_x = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo_x + hi);
    (G(mid) >= 0.0 ? hi : lo_x) = mid;
  }
  out.beta = hi;
  out.C_k = std::max(a_const / k, out.beta);

  // Final sweep: log-type region with offset C_k inside the resolvent set of
  // both rotated operators, with the scale-k envelope.
  const Region region = Region::log_region(seq, k, out.C_k);
  std::function<double(cplx)> env;
  if (std::abs(theta - 0.5 * kPi) < 1e-9) {
    env = [&seq, k](cplx lam) {
      return safe_exp(seq.associated(k * std::sqrt(std::abs(lam))));
    };
  } else {
    const WeightSequence sq = seq.squared();
    env = [sq, k](cplx lam) {
      return safe_exp(0.5 * sq.associated(k * k * std::abs(lam)));
    };
  }
  double worst = 0.0;
  for (int sign = 0; sign < 2; ++sign) {
    const double th = sign == 0 ? theta : -theta;
    const SpectralOperator rot = spectrum_image(op, SpectrumMap::Rotate, th);
    const EnvFit f = fit_envelope(rot, region, env);
    if (!(f.subset && f.stable)) {
      out.verdict = make_fail(rot, klass, f.witness,
                              "rotation by " + num_str(th) + ": " +
                                  fit_failure_text(f),
                              f.constant, vgrid);
      return out;
    }
    worst = std::max(worst, f.constant);
  }
  out.verdict = make_pass(klass,
                          "threshold beta=" + num_str(out.beta) +
                              ", region offset C_k=" + num_str(out.C_k) +
                              ", both rotations verified with envelope "
                              "constant " +
                              num_str(worst),
                          worst, vgrid);
  return out;
}

// ---------------------------------------------------------------------------
// Aggregate report
// ---------------------------------------------------------------------------

ClassificationReport classify(const SpectralOperator& op,
                              const WeightSequence& seq) {
  ClassificationReport rep;
  rep.operator_id = op.id();

  const std::string k_ultra_b =
      "ultradistribution-sine(" + seq_label(seq) + ",beurling)";
  const std::string k_ultra_r =
      "ultradistribution-sine(" + seq_label(seq) + ",roumieu)";
  const Kernel r1 = Kernel::riesz(1.0);
  const std::string k_local = local_klass(r1, 1.0);
  const double gamma0 = 0.25 * kPi;
  const std::string k_analytic = "analytic-K-semigroup(k-half," +
                                 num_str(gamma0) + "," + num_str(1.0) + ")";

  std::vector<Verdict> slots(7);
  parallel_for(7, [&](std::size_t i) {
    const char* klass_for_slot[7] = {"integrated-cosine(4)",
                                     k_ultra_b.c_str(),
                                     k_ultra_r.c_str(),
                                     "hyperfunction-sine",
                                     "fourier-hyperfunction-sine",
                                     k_local.c_str(),
                                     k_analytic.c_str()};
    try {
      switch (i) {
        case 0:
          slots[0] = integrated_cosine_check(op, default_alpha_grid(),
                                             default_beta_grid(), 4);
          break;
        case 1:
          slots[1] = ultradistribution_sine_check(op, seq, GrowthMode::Beurling,
                                                  default_k_grid());
          break;
        case 2:
          slots[2] = ultradistribution_sine_check(op, seq, GrowthMode::Roumieu,
                                                  default_k_grid());
          break;
        case 3:
          slots[3] = hyperfunction_sine_check(op, default_eps_grid());
          break;
        case 4:
          slots[4] = fourier_hyperfunction_sine_check(op, default_sigma_grid(),
                                                      default_eps_grid());
          break;
        case 5:
          slots[5] =
              local_convoluted_cosine_regions(r1, 1.0, 0.3, op).conclusion;
          break;
        case 6:
          slots[6] =
              analytic_semigroup_witness(op, Kernel::k_half(), gamma0, 1.0, 16)
                  .verdict;
          break;
        default:
          break;
      }
    } catch (const std::exception& e) {
      slots[i] = make_inconclusive(klass_for_slot[i], e.what());
    }
  });

  for (Verdict& v : slots) {
    rep.grids_used[v.klass] = v.grid;
    rep.verdicts[v.klass] = std::move(v);
  }
  return rep;
}

}  // namespace convolab
