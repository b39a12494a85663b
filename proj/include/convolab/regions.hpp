#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "convolab/common.hpp"
#include "convolab/weights.hpp"

namespace convolab {

enum class RegionKind {
  HalfPlane,    // Re z >= sigma
  Parabola,     // Re z >= omega^2 - (Im z)^2 / (4 omega^2)
  Ouchi,        // Re z >= eps |z| + C
  LogRegion,    // Re z >= M(k |z|) + C
  UltraLog,     // Re z >= M(alpha |z|) / gamma + beta
  Exponential,  // Re z >= beta and |Im z| <= e^{alpha Re z}
  Sector,       // |arg(z - vertex)| <= half_angle
};

// Serializable construction recipe (JSON round-trips live in report.cpp).
struct RegionSpec {
  std::string kind;
  bool squared = false;
  double sigma = 0.0;
  double omega = 0.0;
  double eps = 0.0, C = 0.0;
  double k = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double angle = 0.0, vertex = 0.0;
  std::string seq;  // weight-sequence kind for log-region / ultralog
  double seq_s = 0.0;
  int seq_log_power = 1;
  std::vector<double> seq_table;
};

struct BoundarySample {
  std::vector<cplx> points;  // ordered by the boundary parameter, Im ascending
  bool clamped = false;      // true when the parameter range hit the radius cap
  double radius = 0.0;       // |z| cap that was applied
};

// Closed subsets of the plane cut out by the growth inequalities above,
// plus their images under z -> z^2.  Membership in a squared region is
// decided through both square roots of the probe point.
class Region {
 public:
  static Region half_plane(double sigma);
  static Region parabola(double omega);
  static Region ouchi(double eps, double C);
  static Region log_region(WeightSequence seq, double k, double C);
  static Region ultralog(WeightSequence seq, double alpha, double beta,
                         double gamma);
  static Region exponential(double alpha, double beta);
  static Region sector(double half_angle);
  static Region shifted_sector(double vertex, double half_angle);
  static Region from_spec(const RegionSpec& spec);

  Region squared() const;  // the image region; squaring twice is rejected

  RegionKind kind() const { return kind_; }
  bool is_squared() const { return squared_; }
  const std::string& id() const { return id_; }
  RegionSpec spec() const;

  bool contains(cplx z) const;

  // Limit of |arg z| along the boundary as |z| grows, where the kind has one.
  std::optional<double> arg_limit() const;

  // n points along the boundary, parameter clamped so |z| <= radius.
  BoundarySample boundary(std::size_t n, double radius = 1e6) const;

 private:
  Region() = default;
  bool base_contains(cplx z) const;

  RegionKind kind_ = RegionKind::HalfPlane;
  bool squared_ = false;
  std::string id_;
  double sigma_ = 0.0, omega_ = 0.0;
  double eps_ = 0.0, c_ = 0.0, k_ = 0.0;
  double alpha_ = 0.0, beta_ = 0.0, gamma_ = 0.0;
  double angle_ = 0.0, vertex_ = 0.0;
  std::optional<WeightSequence> seq_;
};

struct SectorWitness {
  double omega = 0.0;
  bool ok = false;
  cplx violation{0.0, 0.0};  // sample that escaped the region when !ok
};

// Searches vertices omega in {0, 0.5, 1, 2, 4, ...} for which the shifted
// sector omega + Sigma_{pi/2 + target_angle} lies inside r on a ray/radius
// verification grid.
SectorWitness sector_inclusion_witness(const Region& r, double target_angle);

struct UltralogNormalization {
  double alpha_p = 0.0;
  double beta_p = 0.0;
  double margin = 0.0;       // min over the grid of the inclusion slack
  std::size_t grid_points = 0;
};

// Finds (alpha', beta') such that the gamma = 1 region with those parameters
// sits inside the given (alpha, beta, gamma) one, verified on a dense radial
// grid.  Throws numeric_error when the parameter grid is exhausted.
UltralogNormalization ultralog_normalize(const WeightSequence& seq, double alpha,
                                         double beta, double gamma);

// Minimum pairwise distance between sampled boundaries, refined (n doubling)
// until stable to 1e-3 or the sample cap is reached.
double boundary_distance(const Region& r1, const Region& r2, double radius);

}  // namespace convolab
