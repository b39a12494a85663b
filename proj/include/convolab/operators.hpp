#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "convolab/common.hpp"
#include "convolab/regions.hpp"

namespace convolab {

enum class SpectrumSource { Eigenvalues, Symbol };
enum class SpectrumMap { Square, NegateSquare, Rotate };

// Serializable construction recipe (JSON round-trips live in report.cpp).
struct OperatorSpec {
  std::vector<cplx> eigenvalues;  // eigenvalue-list form
  std::string symbol;             // named form: see named() below
  double X = 0.0;                 // symbol half-range (0 = registry default)
  std::size_t n = 0;              // sample count / list length (0 = default)
  std::vector<double> c_weights;  // empty = identity
};

// Diagonal model: the spectrum is a finite complex sample set, either an
// explicit eigenvalue list or a multiplication symbol sampled on [-X, X].
// Norms are sup-over-points, so resolvent norms are exact reciprocal
// spectral distances.
class SpectralOperator {
 public:
  static SpectralOperator from_eigenvalues(std::vector<cplx> mu,
                                           std::vector<double> c_weights = {});
  static SpectralOperator from_symbol(const std::function<cplx(double)>& m,
                                      double X, std::size_t n,
                                      std::string label = "symbol",
                                      std::vector<double> c_weights = {});
  // Registered models: "dirichlet-laplacian" (eigenvalues n^2, count n),
  // "beals-squared" ((x+ix^2)^2 sampled), "kos" ((1-x^2/4)+ix sampled).
  // X = 0 / n = 0 pick registry defaults (symbol ranges out-scale the
  // default region sweep radius tenfold).
  static SpectralOperator named(const std::string& name, double X = 0.0,
                                std::size_t n = 0);
  static SpectralOperator from_spec(const OperatorSpec& spec);

  SpectrumSource source() const { return source_; }
  const std::string& id() const { return id_; }
  const std::vector<cplx>& points() const { return points_; }
  const std::vector<double>& c_weights() const { return weights_; }
  // Sample sites x for symbol models (empty for eigenvalue lists).
  const std::vector<double>& sample_sites() const { return xs_; }
  OperatorSpec spec() const;

 private:
  friend SpectralOperator spectrum_image(const SpectralOperator&, SpectrumMap,
                                         double);
  SpectralOperator() = default;
  SpectrumSource source_ = SpectrumSource::Eigenvalues;
  std::string id_;
  std::string symbol_name_;
  double x_range_ = 0.0;
  std::vector<cplx> points_;
  std::vector<double> weights_;
  std::vector<double> xs_;
};

// Distance from lambda to the nearest spectrum sample; the model resolvent
// norm is its reciprocal. Throws config_error when lambda is within 1e-14
// of the spectrum.
double resolvent_distance(const SpectralOperator& op, cplx lambda);

struct ResolventProfile {
  bool subset_of_resolvent = true;
  double sup_ratio = 0.0;  // max over samples of (1/distance)/envelope
  cplx witness{0.0, 0.0};  // sample within 1e-12 of the spectrum, if any
  cplx sup_site{0.0, 0.0};  // sample attaining sup_ratio
  std::size_t samples = 0;
};

// Sweeps boundary and interior samples of the region (plus every spectrum
// point the region contains) and profiles the resolvent norm against the
// envelope.
ResolventProfile region_resolvent_profile(
    const SpectralOperator& op, const Region& r,
    const std::function<double(cplx)>& envelope, std::size_t n,
    double radius = 1e6);

// The block operator [[0, I], [A, 0]] on paired coordinates.
struct CompanionOperator {
  SpectralOperator base;
};

struct CompanionCheck {
  bool lower_ok = false;      // ||R(l^2:A)|| <= ||R(l:comp)||
  bool upper_ok = false;      // ||R(l:comp)|| <= (1+|l|) sqrt(1+|l|^2) ||R(l^2:A)|| + 1
  double formula_residual = 0.0;
  double companion_norm = 0.0;  // largest singular value of the inverse
  double base_norm = 0.0;       // 1 / dist(l^2, spectrum)
};

// Materializes the companion as a dense 2N x 2N matrix (N <= 512; larger
// models use the equivalent per-point 2x2 blocks), computes its true
// resolvent norm, and verifies the two norm inequalities plus the block
// resolvent formula
//   R(l)(x, y) = ( R(l^2:A)(l x + y),  A R(l^2:A) x + l R(l^2:A) y )
// on `trials` seeded random vectors.
CompanionCheck companion_resolvent_check(const CompanionOperator& comp,
                                         cplx lambda, std::size_t trials);

// Pointwise spectrum transform. NegateSquare computes -mu^2 directly.
SpectralOperator spectrum_image(const SpectralOperator& op, SpectrumMap map,
                                double theta = 0.0);

}  // namespace convolab
