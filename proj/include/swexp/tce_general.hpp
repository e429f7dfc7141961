#pragma once

// Type-class-enumeration exponent for general finite-alphabet sources:
//
//   L(P_Y', R, s) = min_{W} s [D(W || P_{X|Y} | P_Y') + R] + (1-s) [R - H(X'|Y)]_+
//   E1'(R, T, s)  = min_{P_Y'} [D(P_Y' || P_Y) + L(P_Y', R, s)
//                               - sum_y P_Y'(y) ln sum_x P^{1-s}(x|y)] - s T
//   E1'(R, T)     = sup_{s >= 0} E1'(R, T, s)
//
// H(X'|Y) is evaluated under P_Y' x W. Polynomial type-class factors are
// dropped, so values are exact to first order in the exponent.

#include <cstddef>
#include <vector>

#include "swexp/gallager_forney.hpp"
#include "swexp/source_model.hpp"

namespace swexp {

inline constexpr std::size_t kMaxGeneralAlphabet = 6;

struct InnerExponent {
  double value = 0.0;
  ConditionalXgivenY minimizer;
};

struct TypeEnumerationExponent {
  ExponentResult exponent;
  std::vector<double> py_prime;  // minimizing auxiliary Y marginal at the reported s
  ConditionalXgivenY conditional;
  // Every refined minimizer of the P_Y' problem within 1e-7 of the minimum.
  std::vector<std::vector<double>> tied_py_prime;
};

class TypeEnumeration {
 public:
  // Throws DomainError when |X| or |Y| exceeds kMaxGeneralAlphabet.
  explicit TypeEnumeration(const JointSource& src);

  InnerExponent inner_l(const DistributionOverY& py_prime, double rate, double s) const;

  // The bracketed P_Y' objective of E1'(R, T, s) (without the -s T term).
  double middle_objective(const std::vector<double>& py_prime, double rate, double s) const;

  struct MiddleMinimum {
    double value = 0.0;
    std::vector<double> py_prime;
    std::vector<std::vector<double>> ties;
  };
  MiddleMinimum minimize_middle(double rate, double s) const;

  double e1_prime_at(double rate, double threshold, double s) const;
  TypeEnumerationExponent e1_prime(double rate, double threshold) const;

 private:
  struct Tilt;  // per-s quantities shared by every P_Y'
  Tilt tilt(double s) const;
  double inner_value(const Tilt& t, const std::vector<double>& py_prime, double rate,
                     std::vector<double>* minimizer) const;
  double middle_value(const Tilt& t, const std::vector<double>& py_prime, double rate) const;

  JointSource src_;
  Distribution py_;
  ConditionalXgivenY cond_;
  std::vector<std::vector<double>> log_cond_;  // [y][x], -inf off the support
};

InnerExponent inner_l(const JointSource& src, const DistributionOverY& py_prime, double rate, double s);
TypeEnumerationExponent e1_prime_general(const JointSource& src, double rate, double threshold);

}  // namespace swexp
