#pragma once

// Random-binning exponents for the erasure/list decoder obtained with the
// Gallager/Forney bounding technique:
//
//   E0(rho, s) = -ln sum_y P(y) sum_x P^{1-s}(x|y) (sum_x' P^{s/rho}(x'|y))^rho
//   E1(R, T)   = sup_{0 <= s <= rho <= 1} [E0(rho, s) + rho R - s T]
//   E2(R, T)   = E1(R, T) + T
//
// E1 bounds the exponent of Pr{true source vector is not a candidate}; E2 the
// exponent of undetected error (erasure mode) or of the expected number of
// incorrect candidates (list mode).

#include <limits>

#include "swexp/source_model.hpp"

namespace swexp {

// Feasible parameters 0 <= s <= rho <= 1.
struct GFParams {
  double rho;
  double s;

  GFParams(double rho_value, double s_value);
};

struct ExponentResult {
  double value = 0.0;  // nats; +inf when diverged
  bool diverged = false;
  // Optimizing parameters; rho is NaN for exponents without a rho parameter.
  double rho = std::numeric_limits<double>::quiet_NaN();
  double s = std::numeric_limits<double>::quiet_NaN();
};

// Threshold used when deciding whether an exponent is positive.
inline constexpr double kPositivityThreshold = 1e-9;

// Precomputed P(y) and P(x|y) for repeated E0 evaluations.
class GallagerForney {
 public:
  explicit GallagerForney(const JointSource& src);

  // Throws DomainError unless 0 < rho <= 1 and 0 <= s <= rho.
  double e0(double rho, double s) const;
  // Objective of the E1 supremum; defined as 0 at rho = 0.
  double e1_objective(double rho, double s, double rate, double threshold) const;

  ExponentResult e1(double rate, double threshold) const;
  ExponentResult e2(double rate, double threshold) const;
  double r_min(double threshold) const;
  double t_max(double rate) const;

  const JointSource& source() const { return src_; }

 private:
  // -E0(rho, sigma rho)/rho at rho -> 0, by Richardson extrapolation.
  double small_rho_slope(double sigma) const;

  JointSource src_;
  Distribution py_;
  ConditionalXgivenY cond_;
};

double e0(const JointSource& src, double rho, double s);
ExponentResult e1(const JointSource& src, double rate, double threshold);
ExponentResult e2(const JointSource& src, double rate, double threshold);
double r_min(const JointSource& src, double threshold);
double t_max(const JointSource& src, double rate);

}  // namespace swexp
