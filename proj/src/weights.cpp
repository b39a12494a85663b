#include "convolab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace convolab {

namespace {

// p = 0 must give ln M_0 = 0 for every closed-form kind.
double closed_form_log(WeightKind kind, double s, std::size_t p) {
  if (p == 0) return 0.0;
  const double pd = static_cast<double>(p);
  switch (kind) {
    case WeightKind::GevreyFactorial:
      return s * std::lgamma(pd + 1.0);
    case WeightKind::GevreyPower:
      return s * pd * std::log(pd);
    case WeightKind::GevreyGamma:
      return std::lgamma(1.0 + pd * s);
    default:
      throw config_error("weights: table kind has no closed form");
  }
}

}  // namespace

WeightSequence WeightSequence::gevrey_factorial(double s, std::size_t P) {
  if (!(s > 1.0)) throw config_error("weights: gevrey index must be > 1");
  WeightSequence w;
  w.kind_ = WeightKind::GevreyFactorial;
  w.s_ = s;
  w.P_ = P;
  return w;
}

WeightSequence WeightSequence::gevrey_power(double s, std::size_t P) {
  if (!(s > 1.0)) throw config_error("weights: gevrey index must be > 1");
  WeightSequence w;
  w.kind_ = WeightKind::GevreyPower;
  w.s_ = s;
  w.P_ = P;
  return w;
}

WeightSequence WeightSequence::gevrey_gamma(double s, std::size_t P) {
  if (!(s > 1.0)) throw config_error("weights: gevrey index must be > 1");
  WeightSequence w;
  w.kind_ = WeightKind::GevreyGamma;
  w.s_ = s;
  w.P_ = P;
  return w;
}

WeightSequence WeightSequence::table(std::vector<double> values) {
  if (values.size() < 2) throw config_error("weights: table needs at least M_0, M_1");
  if (std::abs(values[0] - 1.0) > 1e-12)
    throw config_error("weights: table must start with M_0 = 1");
  WeightSequence w;
  w.kind_ = WeightKind::Table;
  w.P_ = values.size() - 1;
  w.log_table_.resize(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) {
    if (!(values[p] > 0.0)) throw config_error("weights: table entries must be positive");
    w.log_table_[p] = std::log(values[p]);
  }
  return w;
}

std::string WeightSequence::kind_name() const {
  switch (kind_) {
    case WeightKind::GevreyFactorial: return "gevrey-factorial";
    case WeightKind::GevreyPower: return "gevrey-power";
    case WeightKind::GevreyGamma: return "gevrey-gamma";
    default: return "table";
  }
}

double WeightSequence::raw_log(std::size_t p) const {
  if (kind_ == WeightKind::Table) {
    if (p > P_) throw config_error("weights: table index beyond stored range");
    return log_table_[p];
  }
  return closed_form_log(kind_, s_, p);
}

double WeightSequence::log_value(std::size_t p) const {
  return static_cast<double>(sq_) * raw_log(p);
}

double WeightSequence::value(std::size_t p) const { return std::exp(log_value(p)); }

WeightSequence WeightSequence::squared() const {
  WeightSequence w = *this;
  w.sq_ *= 2;
  return w;
}

WeightSequence::AssocResult WeightSequence::associated_detail(double rho) const {
  AssocResult res;
  if (!(rho > 0.0)) return res;  // sup at p = 0 -> 0
  const double x = std::log(rho);
  auto objective = [&](std::size_t p) {
    return static_cast<double>(p) * x - log_value(p);
  };

  if (kind_ == WeightKind::Table) {
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t p = 0; p <= P_; ++p) {
      const double g = objective(p);
      if (g > best) {
        best = g;
        arg = p;
      }
    }
    res.value = best;
    res.argmax = arg;
    res.truncated = (arg == P_ && P_ > 0);
    return res;
  }

  // The log objective p*x - ln M_p is concave (the sequences are
  // log-convex), so an integer ternary search locates the sup exactly;
  // this is the limit of repeatedly doubling a truncation horizon.
  std::size_t lo = 0, hi = std::size_t{1} << 26;
  while (hi - lo > 2) {
    const std::size_t m1 = lo + (hi - lo) / 3;
    const std::size_t m2 = hi - (hi - lo) / 3;
    if (objective(m1) < objective(m2))
      lo = m1 + 1;
    else
      hi = m2;
  }
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t p = (lo > 2 ? lo - 2 : 0); p <= hi + 2; ++p) {
    const double g = objective(p);
    if (g > best) {
      best = g;
      arg = p;
    }
  }
  res.value = best;
  res.argmax = arg;
  return res;
}

ConditionReport check_conditions(const WeightSequence& seq) {
  ConditionReport rep;
  const std::size_t P = seq.order();
  std::vector<double> lm(P + 1);
  for (std::size_t p = 0; p <= P; ++p) lm[p] = seq.log_value(p);

  // Log-convexity M_p^2 <= M_{p-1} M_{p+1}.
  rep.m1 = true;
  for (std::size_t p = 1; p + 1 <= P; ++p) {
    const double slack = 1e-12 * (1.0 + std::abs(lm[p]));
    if (2.0 * lm[p] > lm[p - 1] + lm[p + 1] + slack) {
      rep.m1 = false;
      break;
    }
  }

  // Stability under splitting: M_n <= A H^n min_{p+q=n} M_p M_q.
  // d_n is the log excess the pair (A, H) must absorb.
  std::vector<double> d(P + 1, 0.0);
  for (std::size_t n = 0; n <= P; ++n) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= n; ++p) best = std::min(best, lm[p] + lm[n - p]);
    d[n] = lm[n] - best;
  }
  const int kGrid = 64;
  const double log_hi = std::log(1e6);
  double best_cost = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia < kGrid; ++ia) {
    const double logA = log_hi * ia / (kGrid - 1);
    for (int ih = 0; ih < kGrid; ++ih) {
      const double logH = log_hi * ih / (kGrid - 1);
      bool ok = true;
      for (std::size_t n = 0; n <= P; ++n) {
        if (d[n] > logA + static_cast<double>(n) * logH + 1e-9) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const double cost = logA + logH;  // minimize A*H, then A
      if (cost < best_cost - 1e-15 ||
          (std::abs(cost - best_cost) <= 1e-15 && logA < std::log(rep.m2_A))) {
        best_cost = cost;
        rep.m2 = true;
        rep.m2_A = std::exp(logA);
        rep.m2_H = std::exp(logH);
      }
    }
  }

  // Quasi-analyticity border: sum of r_p = M_{p-1}/M_p.
  std::vector<double> r(P + 1, 0.0);
  double partial = 0.0;
  for (std::size_t p = 1; p <= P; ++p) {
    r[p] = std::exp(lm[p - 1] - lm[p]);
    partial += r[p];
  }
  rep.m3_partial_sum = partial;
  const double q = r[P] / r[P - 1];
  rep.m3_tail_bound =
      q < 1.0 ? r[P] * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  // Power-law decay exponent of the terms near p = P; the pure geometric
  // ratio test cannot separate sum 1/p from sum 1/p^2.
  const double sigma = std::log(r[P - 1] / r[P]) /
                       std::log(static_cast<double>(P) / static_cast<double>(P - 1));
  if (q <= 0.9 || sigma >= 1.05) {
    rep.m3prime = true;
    rep.m3_verdict = "convergent";
  } else if (sigma <= 0.95) {
    rep.m3_verdict = "divergent";
  } else {
    rep.m3_verdict = "inconclusive";
  }
  return rep;
}

double sqrt_identity_residual(const WeightSequence& seq, double k, double t) {
  if (!(k > 0.0) || !(t > 0.0))
    throw config_error("weights: sqrt identity needs k > 0, t > 0");
  const double lhs = seq.associated(k * std::sqrt(t));
  const double rhs = 0.5 * seq.squared().associated(k * k * t);
  return std::abs(lhs - rhs);
}

}  // namespace convolab
