#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "convolab/common.hpp"
#include "convolab/kernels.hpp"
#include "convolab/operators.hpp"
#include "convolab/regions.hpp"
#include "convolab/weights.hpp"

namespace convolab {

// Growth quantifier for weight-sequence classes: Beurling asks for one
// admissible scale k on the sweep grid, Roumieu for every scale (each with
// its own fitted constant).
enum class GrowthMode { Beurling, Roumieu };

enum class VerdictKind { Pass, Fail, Inconclusive };

// One generation-class decision.  Every Fail carries a concrete witness
// point: either a sample inside a required region that collides with the
// spectrum, or the site where the envelope fit refused to stabilize.
struct Verdict {
  std::string klass;
  VerdictKind kind = VerdictKind::Inconclusive;
  cplx witness{0.0, 0.0};
  double witness_distance = 0.0;  // spectral distance at the witness (Fail)
  std::string detail;             // grounds for the decision / reason string
  double constant = 0.0;          // fitted envelope constant where applicable
  std::vector<double> grid;       // sweep parameters the decision used
};

struct ClassificationReport {
  std::string operator_id;
  std::map<std::string, Verdict> verdicts;            // keyed by class name
  std::map<std::string, std::vector<double>> grids_used;
};

// Default sweep grids (exposed so reruns stay comparable).
std::vector<double> default_k_grid();      // {2^-4, ..., 2^4}
std::vector<double> default_alpha_grid();  // {0.25, 0.5, 1, 2}
std::vector<double> default_beta_grid();   // {1, 2, 4}
std::vector<double> default_eps_grid();    // {0.1, 0.2, 0.3, 0.5}
std::vector<double> default_sigma_grid();  // {0.5, 1, 2}

// Exponentially bounded integrated cosine test: pass when some pair
// (alpha, beta) with a degree n <= n_max yields E^2(alpha, beta) inside the
// resolvent set together with a stable polynomial envelope fit
// (1 + |lambda|)^n; fail when every tested region meets the spectrum, or
// when no polynomial degree stabilizes.
Verdict integrated_cosine_check(const SpectralOperator& op,
                                const std::vector<double>& alpha_grid,
                                const std::vector<double>& beta_grid,
                                int n_max);

// Ultradistribution sine test against the squared log-region of the weight
// sequence: resolvent containment plus the envelope exp(M(k|lambda|)) in the
// square-root variable.  Beurling passes on one admissible k, Roumieu needs
// every k on the grid.  The sequence must satisfy the log-convexity,
// stability, and non-quasianalyticity conditions.
Verdict ultradistribution_sine_check(const SpectralOperator& op,
                                     const WeightSequence& seq, GrowthMode mode,
                                     const std::vector<double>& k_grid);

// Hyperfunction sine test: for every eps on the grid there must be an offset
// C with the squared linear-growth region inside the resolvent set and the
// envelope exp(eps sqrt(|lambda|)) stable on it.
Verdict hyperfunction_sine_check(const SpectralOperator& op,
                                 const std::vector<double>& eps_grid);

// Fourier hyperfunction sine test: the spectrum must sit inside the closed
// negative real axis (within tolerance), and on every right half-plane
// Re > sigma the squared-region envelope exp(eps sqrt(|lambda|)) must fit
// with a finite constant.
Verdict fourier_hyperfunction_sine_check(const SpectralOperator& op,
                                         const std::vector<double>& sigma_grid,
                                         const std::vector<double>& eps_grid);

// Region conclusions for local convoluted cosine families.  The kernel-side
// hypothesis is checked numerically first; when it fails the run reports
// that failure and leaves the conclusion inconclusive rather than issuing a
// verdict.
struct LocalCosineRegions {
  bool hypothesis_ok = false;
  double hypothesis_log_constant = 0.0;  // log of the fitted kernel constant
  std::string hypothesis_note;           // set when the hypothesis check fails
  Verdict conclusion;
};

// Variant (a): reciprocal integrated-transform growth at most
// T exp(eps |lambda|) on the linear-growth region; the conclusion verifies
// the envelope exp(tau eps sqrt(|lambda|)) on the squared region for op.
LocalCosineRegions local_convoluted_cosine_regions(const Kernel& k, double tau,
                                                   double eps,
                                                   const SpectralOperator& op);
// Variant (b): reciprocal integrated-transform growth at most
// exp(M(lambda)) along the positive ray (unit-scale test); the conclusion
// verifies exp(M(alpha sqrt(|lambda|))) / (1 + sqrt(|lambda|)) on the
// squared log-type region with offset beta.
LocalCosineRegions local_convoluted_cosine_regions(const Kernel& k, double tau,
                                                   const WeightSequence& seq,
                                                   double alpha, double beta,
                                                   const SpectralOperator& op);

// Analytic K-semigroup witness on the sector omega + Sigma_{pi/2 + gamma}:
// requires the open sector disjoint from the spectrum (else config_error),
// then fits sup |(lambda - omega) Ktilde(lambda)| * ||R(lambda)|| on a sector
// grid (stability under radial-grid doubling) and tests the decay of
// |lambda Ktilde(lambda)| * ||R(lambda)|| along the real ray by doubling.
struct AnalyticWitness {
  Verdict verdict;
  double M_fit = 0.0;
  bool decay_ok = false;
  double gamma = 0.0;
  double omega = 0.0;
};
AnalyticWitness analytic_semigroup_witness(const SpectralOperator& op,
                                           const Kernel& k, double gamma,
                                           double omega, std::size_t grid = 16);

// From a hyperfunction pass at eps in (0, 1/sqrt 2) to an analytic witness
// for the k-half kernel: aperture angle = 2 arccos(eps) - pi/2, vertex found
// by sector inclusion inside the verified region (the witness sector uses a
// 0.95 interior fraction of the aperture so the inclusion has margin), and
// the square-root decay margin eps - cos(pi/4 + gamma_interior/2) < 0 is
// recorded along the way.
struct SectorTransfer {
  double angle = 0.0;           // full transferred aperture
  double gamma_interior = 0.0;  // aperture actually handed to the witness
  double omega = 0.0;
  double decay_margin = 0.0;    // negative when the square-root decay wins
  double M_fit = 0.0;
  Verdict verdict;
};
SectorTransfer hyperfunction_to_k_half(const SpectralOperator& op, double eps,
                                       std::size_t grid = 16);

// From an ultradistribution pass for a Gevrey-index-s sequence to the
// sub-exponential kernel exp(-lambda^delta): delta must lie in
// (1/(2s), 1/2) for Beurling and [1/(2s), 1/2) for Roumieu (else
// config_error), and the decay exponent
//   C_s k^{1/s} |lambda|^{1/(2s)} - cos(pi delta) |lambda|^delta
// must fall below -10 with a decreasing tail on a doubling ray.
Verdict ultra_to_k_delta(const SpectralOperator& op, const WeightSequence& seq,
                         GrowthMode mode, double delta);

// Rotation transfer at scale k: from a kernel growth hypothesis
// 1/|Ktilde| = O(exp(M(k|lambda|))) on a right half-plane and a resolvent
// envelope exp(M(k sqrt(|lambda|))) on the parabola domain with vertex
// omega^2, compute the radial threshold beta solving
//   x^2 / (4(omega+1)^2) - x^s / (k l^s) >= (omega+1)^2
// (l = the sequence's lower Gevrey constant), set C_k = max(a/k, beta), and
// verify the log-region with offset C_k inside the resolvent set of the
// rotated operators e^{+i theta} A and e^{-i theta} A with the same
// envelope.  theta defaults to pi/2 (the +-i rotation); theta < pi/2 runs
// the same sweep with the squared-sequence envelope
// exp(Mbar(k^2 |lambda|) / 2).  At s = 2 the threshold inequality admits no
// beta for small k (the two powers compete), which surfaces as a Fail for
// that k: a Roumieu reading (every k) therefore fails while a Beurling
// reading (some k) passes through large k.
struct RotationTransfer {
  double C_k = 0.0;
  double beta = 0.0;  // 0 when the threshold inequality has no solution
  double l = 0.0;     // lower Gevrey constant used in the inequality
  bool kernel_hypothesis_ok = false;
  bool resolvent_hypothesis_ok = false;
  Verdict verdict;
};
RotationTransfer rotation_transfer(const SpectralOperator& op,
                                   const WeightSequence& seq, const Kernel& kern,
                                   double k, double omega,
                                   double theta = 1.57079632679489662);

// Full per-operator report over the default grids: integrated cosine,
// ultradistribution sine in both modes for the given sequence,
// hyperfunction sine, Fourier hyperfunction sine, a local convoluted cosine
// conclusion for the order-one power kernel, and an analytic k-half witness
// at gamma = pi/4 (inconclusive when its sector meets the spectrum).
// Per-class checks run concurrently and merge deterministically by name.
ClassificationReport classify(const SpectralOperator& op,
                              const WeightSequence& seq);

}  // namespace convolab
