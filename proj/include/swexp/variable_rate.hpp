#pragma once

// Variable-rate binning with an additive rate function r(x): a sequence x is
// hashed into exp(sum_i r(x_i)) bins, and the mean rate sum_x P(x) r(x) is
// held at R. The exponent becomes
//
//   E1~(R, T) = sup_{0 <= s <= rho <= 1} sup_r [E0~(rho, s; r) - s T],
//   E0~(rho, s; r) = -ln sum_y P(y) sum_x P^{1-s}(x|y)
//                        (sum_x' P^{s/rho}(x'|y) e^{-r(x')})^rho.
//
// Sign convention: E0~ absorbs the rate term. With r(x) = R for every x,
// E0~(rho, s) = E0(rho, s) + rho R, so E1~ reduces to the fixed-rate E1
// objective. At rho = 1 with the interior optimal rates,
// E0~(1, s) = E0(1, s) + R + D(P||Q_s).

#include <span>
#include <vector>

#include "swexp/gallager_forney.hpp"
#include "swexp/source_model.hpp"

namespace swexp {

struct FWeights {
  std::vector<double> f;  // F(x) = sum_y P(y) P^s(x|y) sum_x' P^{1-s}(x'|y)
  std::vector<double> q;  // Q(x) = F(x) / sum F
};

struct RateAssignment {
  std::vector<double> rates;  // nats per symbol, r(x) >= 0
  double mu = 0.0;            // water-filling level; NaN for the numeric rho < 1 solver
  double mean_rate = 0.0;     // sum_x P(x) r(x)
  bool interior = false;      // every rate strictly positive without clipping
};

struct VariableRateExponent {
  ExponentResult exponent;
  RateAssignment rates;  // optimal assignment at the reported (rho, s)
};

class VariableRate {
 public:
  explicit VariableRate(const JointSource& src);

  FWeights f_weights(double s) const;

  // Rates minimizing sum_x F(x) e^{-r(x)} subject to sum_x P(x) r(x) = R,
  // r >= 0 (the rho = 1 inner problem): r(x) = [ln(Q(x)/P(x)) + mu]_+.
  // Throws InfeasibleRate if R <= 0.
  RateAssignment optimal_rates(double s, double rate) const;

  // Numeric maximizer of E0~(rho, s; r) over the same constraint set, by
  // projected gradient descent on ln of the bracketed sum.
  RateAssignment optimize_rates(double rho, double s, double rate) const;

  double e0_tilde(double rho, double s, std::span<const double> rates) const;

  VariableRateExponent e1_tilde(double rate, double threshold) const;

  // max_r E0~(rho, s; r) - s T, choosing the closed form at rho = 1.
  double inner_value(double rho, double s, double rate, double threshold) const;

  const Distribution& px() const { return px_; }

 private:
  RateAssignment best_rates(double rho, double s, double rate) const;

  JointSource src_;
  Distribution px_;
  Distribution py_;
  ConditionalXgivenY cond_;
};

FWeights f_weights(const JointSource& src, double s);
RateAssignment optimal_rates(const JointSource& src, double s, double rate);
double e0_tilde(const JointSource& src, double rho, double s, const RateAssignment& rates);
VariableRateExponent e1_tilde(const JointSource& src, double rate, double threshold);

}  // namespace swexp
