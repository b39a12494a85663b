#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "convolab/common.hpp"

namespace convolab {

enum class WeightKind { GevreyFactorial, GevreyPower, GevreyGamma, Table };

// Log-convexity / stability / quasi-analyticity report for a weight sequence.
struct ConditionReport {
  bool m1 = false;
  bool m2 = false;
  double m2_A = 0.0;  // smallest passing grid pair, ordered by A*H then A
  double m2_H = 0.0;
  bool m3prime = false;           // true only for a "convergent" verdict
  std::string m3_verdict;         // convergent | divergent | inconclusive
  double m3_partial_sum = 0.0;    // sum_{p<=P} M_{p-1}/M_p
  double m3_tail_bound = 0.0;     // geometric tail bound from the p=P ratio
};

// A positive sequence M_p (M_0 = 1) handled entirely in log space so that
// e.g. (p!)^2 stays representable far beyond p ~ 85.  Closed-form kinds can
// be evaluated at any p; table kinds are limited to their stored range.
class WeightSequence {
 public:
  static WeightSequence gevrey_factorial(double s, std::size_t P = 256);  // (p!)^s
  static WeightSequence gevrey_power(double s, std::size_t P = 256);      // p^{p s}
  static WeightSequence gevrey_gamma(double s, std::size_t P = 256);      // Gamma(1+p s)
  static WeightSequence table(std::vector<double> values);                // explicit M_p

  WeightKind kind() const { return kind_; }
  std::string kind_name() const;
  double gevrey_index() const { return s_; }  // 0 for table kind
  std::size_t order() const { return P_; }
  int log_power() const { return sq_; }

  double log_value(std::size_t p) const;  // ln M_p
  double value(std::size_t p) const;      // M_p (may overflow to inf)

  struct AssocResult {
    double value = 0.0;        // sup_p ln(rho^p / M_p), clamped at 0
    std::size_t argmax = 0;
    bool truncated = false;    // table kind with the sup attained at p = P
  };
  // Associated function M(rho).  Closed-form kinds evaluate the sup exactly
  // (the log objective is concave, so integer ternary search finds it);
  // table kinds scan p <= P and flag a boundary-attained sup.
  AssocResult associated_detail(double rho) const;
  double associated(double rho) const { return associated_detail(rho).value; }

  // The sequence M_p^2 (log doubling; keeps the kind's closed form usable).
  WeightSequence squared() const;

 private:
  WeightSequence() = default;
  double raw_log(std::size_t p) const;

  WeightKind kind_ = WeightKind::Table;
  double s_ = 0.0;
  std::size_t P_ = 0;
  int sq_ = 1;  // logs are multiplied by this (squared() doubles it)
  std::vector<double> log_table_;
};

ConditionReport check_conditions(const WeightSequence& seq);

// | M(k sqrt(t)) - (1/2) Mbar(k^2 t) | where Mbar belongs to the squared
// sequence.  Exact p-by-p proportionality makes this a sharp self-test.
double sqrt_identity_residual(const WeightSequence& seq, double k, double t);

}  // namespace convolab
