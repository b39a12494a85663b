#include "convolab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace convolab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

std::string num_str(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// Bisection for increasing-through-zero f on [lo, hi] with f(lo) <= 0 <= f(hi).
template <typename F>
double bisect(F&& f, double lo, double hi, int iters = 120) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * (1.0 + std::abs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

std::string seq_label(const WeightSequence& s) {
  if (s.kind() == WeightKind::Table)
    return "table[" + std::to_string(s.order() + 1) + "]";
  std::string base = s.kind_name() + "(" + num_str(s.gevrey_index()) + ")";
  if (s.log_power() != 1) base += "^" + std::to_string(s.log_power());
  return base;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Region Region::half_plane(double sigma) {
  Region r;
  r.kind_ = RegionKind::HalfPlane;
  r.sigma_ = sigma;
  r.id_ = "halfplane(" + num_str(sigma) + ")";
  return r;
}

Region Region::parabola(double omega) {
  if (!(omega > 0.0)) throw config_error("parabola region: omega must be > 0");
  Region r;
  r.kind_ = RegionKind::Parabola;
  r.omega_ = omega;
  r.id_ = "parabola(" + num_str(omega) + ")";
  return r;
}

Region Region::ouchi(double eps, double C) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw config_error("ouchi region: eps must lie in (0,1)");
  if (!(C > 0.0)) throw config_error("ouchi region: C must be > 0");
  Region r;
  r.kind_ = RegionKind::Ouchi;
  r.eps_ = eps;
  r.c_ = C;
  r.id_ = "ouchi(" + num_str(eps) + "," + num_str(C) + ")";
  return r;
}

Region Region::log_region(WeightSequence seq, double k, double C) {
  if (!(k > 0.0)) throw config_error("log region: k must be > 0");
  Region r;
  r.kind_ = RegionKind::LogRegion;
  r.k_ = k;
  r.c_ = C;
  r.seq_ = std::move(seq);
  r.id_ = "logregion(" + seq_label(*r.seq_) + "," + num_str(k) + "," +
          num_str(C) + ")";
  return r;
}

Region Region::ultralog(WeightSequence seq, double alpha, double beta,
                        double gamma) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw config_error("ultralog region: alpha, beta, gamma must be > 0");
  Region r;
  r.kind_ = RegionKind::UltraLog;
  r.alpha_ = alpha;
  r.beta_ = beta;
  r.gamma_ = gamma;
  r.seq_ = std::move(seq);
  r.id_ = "ultralog(" + seq_label(*r.seq_) + "," + num_str(alpha) + "," +
          num_str(beta) + "," + num_str(gamma) + ")";
  return r;
}

Region Region::exponential(double alpha, double beta) {
  if (!(alpha > 0.0)) throw config_error("exponential region: alpha must be > 0");
  Region r;
  r.kind_ = RegionKind::Exponential;
  r.alpha_ = alpha;
  r.beta_ = beta;
  r.id_ = "exp(" + num_str(alpha) + "," + num_str(beta) + ")";
  return r;
}

Region Region::sector(double half_angle) { return shifted_sector(0.0, half_angle); }

Region Region::shifted_sector(double vertex, double half_angle) {
  if (!(half_angle > 0.0) || !(half_angle <= kPi))
    throw config_error("sector region: half-angle must lie in (0, pi]");
  Region r;
  r.kind_ = RegionKind::Sector;
  r.vertex_ = vertex;
  r.angle_ = half_angle;
  r.id_ = vertex == 0.0
              ? "sector(" + num_str(half_angle) + ")"
              : "sector(" + num_str(vertex) + "," + num_str(half_angle) + ")";
  return r;
}

Region Region::squared() const {
  if (squared_) throw config_error("region: already a squared image");
  Region r = *this;
  r.squared_ = true;
  r.id_ = "sq[" + id_ + "]";
  return r;
}

RegionSpec Region::spec() const {
  RegionSpec s;
  s.squared = squared_;
  switch (kind_) {
    case RegionKind::HalfPlane:
      s.kind = "half-plane";
      s.sigma = sigma_;
      break;
    case RegionKind::Parabola:
      s.kind = "parabola";
      s.omega = omega_;
      break;
    case RegionKind::Ouchi:
      s.kind = "ouchi";
      s.eps = eps_;
      s.C = c_;
      break;
    case RegionKind::LogRegion:
      s.kind = "log-region";
      s.k = k_;
      s.C = c_;
      break;
    case RegionKind::UltraLog:
      s.kind = "ultralog";
      s.alpha = alpha_;
      s.beta = beta_;
      s.gamma = gamma_;
      break;
    case RegionKind::Exponential:
      s.kind = "exponential";
      s.alpha = alpha_;
      s.beta = beta_;
      break;
    case RegionKind::Sector:
      s.kind = "sector";
      s.vertex = vertex_;
      s.angle = angle_;
      break;
  }
  if (seq_) {
    s.seq = seq_->kind_name();
    s.seq_s = seq_->gevrey_index();
    s.seq_log_power = seq_->log_power();
    if (seq_->kind() == WeightKind::Table) {
      for (std::size_t p = 0; p <= seq_->order(); ++p)
        s.seq_table.push_back(std::exp(seq_->log_value(p) /
                                       static_cast<double>(seq_->log_power())));
    }
  }
  return s;
}

Region Region::from_spec(const RegionSpec& s) {
  auto seq = [&]() -> WeightSequence {
    WeightSequence w = [&]() {
      if (s.seq == "gevrey-factorial") return WeightSequence::gevrey_factorial(s.seq_s);
      if (s.seq == "gevrey-power") return WeightSequence::gevrey_power(s.seq_s);
      if (s.seq == "gevrey-gamma") return WeightSequence::gevrey_gamma(s.seq_s);
      if (s.seq == "table") return WeightSequence::table(s.seq_table);
      throw config_error("region spec: unknown weight sequence kind: " + s.seq);
    }();
    for (int p = s.seq_log_power; p > 1; p /= 2) w = w.squared();
    return w;
  };
  Region r = [&]() {
    if (s.kind == "half-plane") return half_plane(s.sigma);
    if (s.kind == "parabola") return parabola(s.omega);
    if (s.kind == "ouchi") return ouchi(s.eps, s.C);
    if (s.kind == "log-region") return log_region(seq(), s.k, s.C);
    if (s.kind == "ultralog") return ultralog(seq(), s.alpha, s.beta, s.gamma);
    if (s.kind == "exponential") return exponential(s.alpha, s.beta);
    if (s.kind == "sector") return shifted_sector(s.vertex, s.angle);
    throw config_error("region spec: unknown kind: " + s.kind);
  }();
  return s.squared ? r.squared() : r;
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

bool Region::base_contains(cplx z) const {
  const double x = z.real(), y = z.imag();
  const double tol = kMembershipTol * (1.0 + std::abs(z));
  switch (kind_) {
    case RegionKind::HalfPlane:
      return x >= sigma_ - tol;
    case RegionKind::Parabola:
      return x >= omega_ * omega_ - y * y / (4.0 * omega_ * omega_) - tol;
    case RegionKind::Ouchi:
      return x >= eps_ * std::abs(z) + c_ - tol;
    case RegionKind::LogRegion:
      return x >= seq_->associated(k_ * std::abs(z)) + c_ - tol;
    case RegionKind::UltraLog:
      return x >= seq_->associated(alpha_ * std::abs(z)) / gamma_ + beta_ - tol;
    case RegionKind::Exponential: {
      if (x < beta_ - tol) return false;
      const double ae = alpha_ * x;
      const double cap = ae > 690.0 ? kInf : std::exp(ae);
      return std::abs(y) <= cap + tol;
    }
    case RegionKind::Sector:
      return std::abs(std::arg(z - vertex_)) <= angle_ + kMembershipTol;
  }
  return false;
}

bool Region::contains(cplx z) const {
  if (!squared_) return base_contains(z);
  const cplx root = std::sqrt(z);
  return base_contains(root) || base_contains(-root);
}

// ---------------------------------------------------------------------------
// Asymptotic boundary argument
// ---------------------------------------------------------------------------

std::optional<double> Region::arg_limit() const {
  switch (kind_) {
    case RegionKind::Ouchi:
      return squared_ ? 2.0 * std::acos(eps_) : std::acos(eps_);
    case RegionKind::HalfPlane:
    case RegionKind::LogRegion:
    case RegionKind::UltraLog:
      return squared_ ? kPi : 0.5 * kPi;
    case RegionKind::Parabola:
      return squared_ ? std::optional<double>{} : std::optional<double>{kPi};
    case RegionKind::Sector:
    case RegionKind::Exponential:
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Boundary sampling
// ---------------------------------------------------------------------------

BoundarySample Region::boundary(std::size_t n, double radius) const {
  if (n < 2) throw config_error("region boundary: need n >= 2");
  if (!(radius > 0.0)) throw config_error("region boundary: radius must be > 0");
  BoundarySample out;
  out.radius = radius;
  // Squared regions sample the base within |w| <= sqrt(radius) and square.
  const double rad = squared_ ? std::sqrt(radius) : radius;
  std::vector<cplx>& pts = out.points;
  pts.reserve(n);

  // The boundary x-level for the growth kinds at height y.
  auto level_x = [&](double y) -> double {
    auto g = [&](double x) -> double {
      const double rho = std::hypot(x, y);
      double rhs = 0.0;
      if (kind_ == RegionKind::LogRegion)
        rhs = seq_->associated(k_ * rho) + c_;
      else
        rhs = seq_->associated(alpha_ * rho) / gamma_ + beta_;
      return x - rhs;
    };
    const double base = kind_ == RegionKind::LogRegion ? c_ : beta_;
    double lo = base - 1.0;
    double hi = std::max(std::abs(base) * 2.0 + 2.0, 2.0);
    while (g(hi) <= 0.0) {
      hi *= 2.0;
      if (hi > 1e12) throw numeric_error("region boundary: level solve diverged");
    }
    return bisect(g, lo, hi);
  };

  switch (kind_) {
    case RegionKind::HalfPlane: {
      if (rad <= std::abs(sigma_))
        throw config_error("region boundary: radius below the region offset");
      const double ycap = std::sqrt(rad * rad - sigma_ * sigma_);
      for (std::size_t i = 0; i < n; ++i)
        pts.emplace_back(sigma_,
                         -ycap + 2.0 * ycap * i / static_cast<double>(n - 1));
      out.clamped = true;
      break;
    }
    case RegionKind::Parabola: {
      auto xof = [&](double y) {
        return omega_ * omega_ - y * y / (4.0 * omega_ * omega_);
      };
      if (rad <= omega_ * omega_)
        throw config_error("region boundary: radius below the parabola vertex");
      const double yhi = 2.0 * omega_ * (std::sqrt(rad) + omega_) + 1.0;
      const double ycap =
          bisect([&](double y) { return std::hypot(xof(y), y) - rad; }, 0.0, yhi);
      for (std::size_t i = 0; i < n; ++i) {
        const double y = -ycap + 2.0 * ycap * i / static_cast<double>(n - 1);
        pts.emplace_back(xof(y), y);
      }
      out.clamped = true;
      break;
    }
    case RegionKind::Ouchi: {
      const double edge = eps_ + c_ / rad;
      if (edge >= 1.0)
        throw config_error("region boundary: radius below the region apex");
      const double thcap = std::acos(edge);
      for (std::size_t i = 0; i < n; ++i) {
        const double th = -thcap + 2.0 * thcap * i / static_cast<double>(n - 1);
        const double r = c_ / (std::cos(th) - eps_);
        pts.emplace_back(r * std::cos(th), r * std::sin(th));
      }
      out.clamped = true;
      break;
    }
    case RegionKind::LogRegion:
    case RegionKind::UltraLog: {
      if (std::abs(level_x(0.0)) >= rad)
        throw config_error("region boundary: radius below the region apex");
      const double ycap = bisect(
          [&](double y) { return std::hypot(level_x(y), y) - rad; }, 0.0, rad);
      for (std::size_t i = 0; i < n; ++i) {
        const double y = -ycap + 2.0 * ycap * i / static_cast<double>(n - 1);
        pts.emplace_back(level_x(y), y);
      }
      out.clamped = true;
      break;
    }
    case RegionKind::Exponential: {
      if (std::hypot(beta_, std::exp(std::min(alpha_ * beta_, 690.0))) >= rad)
        throw config_error("region boundary: radius below the region apex");
      const double xhi = std::min(std::log(rad) / alpha_, rad);
      const double xcap = bisect(
          [&](double x) { return std::hypot(x, std::exp(alpha_ * x)) - rad; },
          beta_, xhi + 1.0);
      const std::size_t n_curve = n / 3;
      const std::size_t n_seg = n - 2 * n_curve;
      for (std::size_t i = 0; i < n_curve; ++i) {  // lower curve, Im ascending
        const double x =
            xcap + (beta_ - xcap) * i / static_cast<double>(std::max<std::size_t>(n_curve - 1, 1));
        pts.emplace_back(x, -std::exp(alpha_ * x));
      }
      const double yseg = std::exp(alpha_ * beta_);
      for (std::size_t i = 0; i < n_seg; ++i)
        pts.emplace_back(beta_, -yseg + 2.0 * yseg * i /
                                     static_cast<double>(std::max<std::size_t>(n_seg - 1, 1)));
      for (std::size_t i = 0; i < n_curve; ++i) {  // upper curve
        const double x =
            beta_ + (xcap - beta_) * i / static_cast<double>(std::max<std::size_t>(n_curve - 1, 1));
        pts.emplace_back(x, std::exp(alpha_ * x));
      }
      out.clamped = true;
      break;
    }
    case RegionKind::Sector: {
      if (std::abs(vertex_) >= rad)
        throw config_error("region boundary: radius below the sector vertex");
      const double rcap = bisect(
          [&](double r) {
            return std::abs(vertex_ + r * std::exp(cplx(0.0, angle_))) - rad;
          },
          0.0, rad + std::abs(vertex_) + 1.0);
      const std::size_t n_low = n / 2, n_up = n - n_low;
      for (std::size_t i = 0; i < n_low; ++i) {
        const double r = rcap * static_cast<double>(n_low - i) /
                         static_cast<double>(n_low);
        pts.push_back(vertex_ + r * std::exp(cplx(0.0, -angle_)));
      }
      for (std::size_t i = 0; i < n_up; ++i) {
        const double r = rcap * static_cast<double>(i + 1) / static_cast<double>(n_up);
        pts.push_back(vertex_ + r * std::exp(cplx(0.0, angle_)));
      }
      out.clamped = true;
      break;
    }
  }

  if (squared_)
    for (cplx& p : pts) p *= p;
  return out;
}

// ---------------------------------------------------------------------------
// Inclusion witnesses
// ---------------------------------------------------------------------------

SectorWitness sector_inclusion_witness(const Region& r, double target_angle) {
  const double phi = 0.5 * kPi + target_angle;
  std::vector<double> omegas = {0.0};
  for (double w = 0.5; w <= 1048576.0; w *= 2.0) omegas.push_back(w);

  SectorWitness wit;
  for (double omega : omegas) {
    bool all_in = true;
    cplx first_out;
    for (int ai = -8; ai <= 8 && all_in; ++ai) {
      const double psi = phi * ai / 8.0;
      for (double rho = 1e-3; rho <= 1.01e6; rho *= std::pow(10.0, 1.0 / 3.0)) {
        const cplx z = omega + rho * std::exp(cplx(0.0, psi));
        if (!r.contains(z)) {
          all_in = false;
          first_out = z;
          break;
        }
      }
    }
    if (all_in) {
      wit.omega = omega;
      wit.ok = true;
      return wit;
    }
    wit.omega = omega;
    wit.violation = first_out;
  }
  wit.ok = false;
  return wit;
}

UltralogNormalization ultralog_normalize(const WeightSequence& seq, double alpha,
                                         double beta, double gamma) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw config_error("ultralog_normalize: alpha, beta, gamma must be > 0");
  UltralogNormalization out;
  std::vector<double> rhos;
  for (double rho = 1e-3; rho <= 1e9; rho *= std::pow(10.0, 1.0 / 32.0))
    rhos.push_back(rho);
  out.grid_points = rhos.size();

  // Inclusion of the normalized region needs M(alpha' rho) + beta' >=
  // M(alpha rho)/gamma + beta across the radial grid.
  for (double ap = alpha;; ap *= 2.0) {
    double deficit = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      const double d =
          seq.associated(alpha * rhos[i]) / gamma - seq.associated(ap * rhos[i]);
      if (d > deficit) {
        deficit = d;
        arg = i;
      }
    }
    // Accept only if the worst deficit is attained interior to the grid —
    // a boundary argmax means the gap is still widening with rho.
    if (deficit == 0.0 || arg + 1 < rhos.size()) {
      out.alpha_p = ap;
      out.beta_p = beta + deficit;
      double margin = kInf;
      for (double rho : rhos)
        margin = std::min(margin, seq.associated(ap * rho) + out.beta_p -
                                      seq.associated(alpha * rho) / gamma - beta);
      out.margin = margin;
      return out;
    }
    if (ap > alpha * 5e3)
      throw numeric_error("ultralog_normalize: parameter grid exhausted");
  }
}

double boundary_distance(const Region& r1, const Region& r2, double radius) {
  double prev = kInf;
  for (std::size_t n = 256; n <= 8192; n *= 2) {
    const BoundarySample b1 = r1.boundary(n, radius);
    const BoundarySample b2 = r2.boundary(n, radius);
    if (b1.points.empty() || b2.points.empty())
      throw config_error("boundary_distance: empty boundary sample");
    double d = kInf;
    for (const cplx& p : b1.points)
      for (const cplx& q : b2.points) d = std::min(d, std::abs(p - q));
    if (std::abs(d - prev) <= 1e-3) return d;
    prev = d;
  }
  return prev;
}

}  // namespace convolab
