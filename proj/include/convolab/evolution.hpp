#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "convolab/common.hpp"
#include "convolab/kernels.hpp"
#include "convolab/operators.hpp"
#include "convolab/weights.hpp"

namespace convolab {

enum class FamilyKind { Cosine, Semigroup };

// Uniform time grid: steps intervals on [0, t_max], steps+1 nodes.
struct GridSpec {
  double t_max = 1.0;
  std::size_t steps = 256;
  double step() const { return t_max / static_cast<double>(steps); }
};

struct QuadratureMeta {
  double step = 0.0;
  double tolerance = 0.0;  // achieved / estimated accuracy where available
  std::string method;
};

// Kernel-convoluted evolution family sampled on a uniform grid. values[i]
// holds one complex per spectrum point (a single entry for scalar runs);
// values[0] is identically zero because the convolving kernel integrates
// to zero over an empty interval.
struct Trajectory {
  std::vector<double> time_grid;
  std::vector<std::vector<cplx>> values;
  std::vector<cplx> datum;  // per-point input vector folded into values
  std::string kernel_id;
  std::string operator_id;
  FamilyKind kind = FamilyKind::Cosine;
  QuadratureMeta quadrature;
  bool saturated = false;  // overflow guard engaged (values clamped)

  std::size_t points() const { return values.empty() ? 0 : values[0].size(); }
};

// c_K(t; mu) = int_0^t K(t-s) cosh(sqrt(mu) s) ds by product integration
// (exact kernel cell moments, Richardson-extrapolated). The integrand is
// even in sqrt(mu), so the branch choice is immaterial.
Trajectory scalar_cosine(const Kernel& k, cplx mu, const GridSpec& grid,
                         const Tolerances& tol = {});

// s_K(t; mu) = int_0^t K(t-s) e^{mu s} ds, same engine.
Trajectory scalar_semigroup(const Kernel& k, cplx mu, const GridSpec& grid,
                            const Tolerances& tol = {});

// Independent second-order oracle: discretizes the defining identity
//   c(t) = Theta(t) + mu int_0^t (t-s) c(s) ds        (cosine)
//   s(t) = Theta(t) + mu int_0^t s(u) du              (semigroup)
// with plain trapezoidal product integration. Deliberately lower-tech than
// the closed convolution route so the two can check each other. The
// tolerance is the step-adequacy threshold: a halved-step comparison
// estimating a larger error throws numeric_error.
Trajectory volterra_oracle(const Kernel& k, cplx mu, FamilyKind kind,
                           const GridSpec& grid,
                           const Tolerances& tol = {1e-5, 1e-5});

// Diagonal action: per spectrum point, the scalar family times
// c_weight_j * x_j. Commutation with the diagonal C is exact by
// construction.
Trajectory apply_family(const SpectralOperator& op, const Kernel& k,
                        FamilyKind kind, const GridSpec& grid,
                        const std::vector<cplx>& x, const Tolerances& tol = {});

// Max over grid and spectrum of the defining-identity defect
//   | mu int_0^t (t-s) v(s) ds - (v(t) - Theta(t) w x) |   (cosine)
//   | mu int_0^t v(s) ds      - (v(t) - Theta(t) w x) |    (semigroup)
double identity_residual(const Trajectory& traj, const SpectralOperator& op,
                         const Kernel& k);

// Semigroup composition defect at on-grid times t, s:
//   | S(t)S(s) - [int_0^{t+s} - int_0^t - int_0^s] K(t+s-r) S(r) w dr |
// maximized over spectrum points.
double composition_residual(const SpectralOperator& op, const Kernel& k,
                            const GridSpec& grid, double t, double s,
                            const Tolerances& tol = {});

// Resolvent-transform defect of a cosine trajectory at lambda:
//   | lambda w x / (lambda^2 - mu) - (1/Ktilde(lambda)) int_0^T e^{-lambda t} v dt |
// maximized over spectrum. Throws numeric_error when the truncated tail is
// not negligible or the kernel transform vanishes at lambda.
double laplace_criterion_residual(const SpectralOperator& op, const Kernel& k,
                                  const Trajectory& traj, cplx lambda,
                                  const Tolerances& tol = {});

// The four blocks of the companion model's Theta-convoluted semigroup,
// assembled from scalar cosine data:
//   S1 = int_0^t c,  S2 = int_0^t (t-s) c(s) ds,  S3 = c - Theta w,
//   S4 = mu int_0^t S2 + Theta1 w        (Theta1 = int_0^t Theta)
// max_residual covers S2 = int S1, S1 = S4, and the four block equations
// of the companion identity.
struct BlockSemigroup {
  Trajectory s1, s2, s3, s4;
  double max_residual = 0.0;
};
BlockSemigroup block_semigroup(const SpectralOperator& op, const Kernel& k,
                               const GridSpec& grid, const Tolerances& tol = {});

// Gaussian average of a cosine trajectory,
//   S(t) = (1/sqrt(pi t)) int_0^inf e^{-s^2/4t} C_K(s) x ds,
// integrated cell-exactly over the trajectory's linear interpolant. The
// result is a semigroup for the kernel weierstrass_kernel(k); residual
// compares it against that kernel's directly computed semigroup.
struct WeierstrassResult {
  Trajectory semigroup;
  double residual = 0.0;
  double small_t_value = 0.0;  // max point magnitude at the first t > 0
};
WeierstrassResult weierstrass_semigroup(const Trajectory& cos_traj,
                                        const SpectralOperator& op,
                                        const Kernel& k, const GridSpec& t_out,
                                        const Tolerances& tol = {});

// Defect of the half-sum combination
//   | (1/2)(s_K(t; mu) + s_K(t; -mu)) - c_K(t; mu^2) |
// — an exact identity, so the defect is pure quadrature error.
double semigroup_average_residual(const Kernel& k, cplx mu,
                                  const GridSpec& grid,
                                  const Tolerances& tol = {});

// Cosine values at time t by a contour integral of
//   (1/2 pi i) int lambda e^{lambda t - lambda^delta} / (lambda^2 - mu) dlambda
// along the upward-oriented boundary of the ultralog region
// Lambda(seq, alpha, beta, 1). Requires t within the admissible horizon
// cos(delta pi/2) / (C alpha^delta) (C = sup M(rho)/rho^delta) and the
// squared region inside the resolvent set. residual compares probe sites
// against the direct gevrey(delta) cosine.
struct ContourResult {
  std::vector<cplx> values;  // one per spectrum sample
  double residual = 0.0;
  double time_bound = 0.0;
  std::size_t contour_nodes = 0;
};
ContourResult contour_cosine(const SpectralOperator& op, double delta,
                             const WeightSequence& seq, double alpha,
                             double beta, double t,
                             const std::vector<cplx>& datum,
                             std::size_t probes = 5,
                             const Tolerances& tol = {});

// Real-variable derivative bounds for the map
//   lambda -> Ktilde(lambda) w / (lambda - mu):
// |d^m/dlambda^m| <= M m! / (lambda - omega)^{m+1} for m <= k_max on the
// given real grid. M_fit is the smallest constant making every bound hold;
// ok is false when no M <= 1e6 works. Grid points with a vanishing
// transform are skipped and counted.
struct DerivativeBoundReport {
  double M_fit = 0.0;
  bool ok = false;
  std::size_t skipped = 0;
  cplx witness{0.0, 0.0};
  int witness_order = 0;
};
DerivativeBoundReport hille_yosida_derivative_check(
    const SpectralOperator& op, const Kernel& k, double omega, double a,
    int k_max, const std::vector<double>& lambda_grid);

// Polynomial-growth witness for
//   Upsilon(lambda) = lambda Ktilde(lambda) w / (lambda^2 - mu)
// on Re lambda > omega: fits M0 with |Upsilon| <= M0 |lambda|^r and runs
// doubling chains (radial rays and an approach chain toward omega) to
// detect unbounded growth.
struct GrowthWitness {
  bool bound_ok = true;
  double M0 = 0.0;
  cplx witness{0.0, 0.0};
};
GrowthWitness growth_witness(const SpectralOperator& op, const Kernel& k,
                             double omega, double r);

}  // namespace convolab
