#include "swexp/tce_binary.hpp"

#include <cmath>
#include <numbers>

#include "swexp/optimize.hpp"

namespace swexp {
namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_common(double p, double rate, double s) {
  if (!(p > 0.0 && p <= 0.5)) throw DomainError("crossover probability must lie in (0, 1/2]");
  if (!(rate >= 0.0 && rate <= kLn2 + 1e-12)) throw DomainError("rate must lie in [0, ln 2]");
  if (!(s >= 0.0)) throw DomainError("s must be nonnegative");
}

double log_odds(double p) { return std::log((1.0 - p) / p); }

// -ln[p^t + (1-p)^t]
double neg_log_moment(double p, double t) {
  const double probs[2] = {p, 1.0 - p};
  return -log_power_sum(probs, t);
}

}  // namespace

char region_label(Region region) { return static_cast<char>('A' + static_cast<int>(region)); }

double tilted_crossover(double p, double s) {
  // p^s/(p^s + (1-p)^s) written as a logistic function of s ln(p/(1-p)).
  return 1.0 / (1.0 + std::exp(s * log_odds(p)));
}

double exchange_rate(double p, double s) {
  if (!(s > 1.0)) throw DomainError("exchange_rate: defined for s > 1");
  return neg_log_moment(p, s) / (s - 1.0);
}

double l_objective(double p, double rate, double s, double delta) {
  check_common(p, rate, s);
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("delta must lie in [0,1]");
  const double gap = rate - binary_entropy(delta);
  return s * delta * log_odds(p) + s * gap + (1.0 - s) * std::max(gap, 0.0);
}

Region classify_region(double p, double rate, double s) {
  check_common(p, rate, s);
  const double h_p = binary_entropy(p);
  const double h_ps = binary_entropy(tilted_crossover(p, s));
  if (s <= 1.0) {
    if (rate > h_ps) return Region::A;
    if (rate > h_p) return Region::B;
    return Region::C;
  }
  if (rate > h_p) return Region::D;
  if (rate > exchange_rate(p, s)) return Region::E;
  if (rate > h_ps) return Region::F;
  return Region::G;
}

PhasePoint l_closed_form(double p, double rate, double s) {
  const Region region = classify_region(p, rate, s);
  const double lo = log_odds(p);
  PhasePoint out{s, rate, region, 0.0, 0.0};
  switch (region) {
    case Region::C:
    case Region::F:
    case Region::G:
      out.delta_star = p;
      out.l_value = s * (p * lo + rate - binary_entropy(p));
      break;
    case Region::B:
      out.delta_star = binary_entropy_inverse(std::min(rate, kLn2));
      out.l_value = s * out.delta_star * lo;
      break;
    case Region::A:
    case Region::D:
    case Region::E: {
      const double ps = tilted_crossover(p, s);
      out.delta_star = ps;
      out.l_value = s * ps * lo + rate - binary_entropy(ps);
      break;
    }
  }
  return out;
}

double e1_prime_binary_at(double p, double rate, double threshold, double s) {
  const auto point = l_closed_form(p, rate, s);
  return point.l_value - s * std::log1p(-p) + neg_log_moment(p, 1.0 - s) - s * threshold;
}

double e1_prime_binary_three_case(double p, double rate, double threshold, double s) {
  const Region region = classify_region(p, rate, s);
  const double tail = neg_log_moment(p, 1.0 - s);
  switch (region) {
    case Region::C:
    case Region::F:
    case Region::G:
      return s * (rate - threshold) + tail;
    case Region::B: {
      const double delta = binary_entropy_inverse(std::min(rate, kLn2));
      return s * (rate - threshold + binary_divergence(delta, p)) + tail;
    }
    case Region::A:
    case Region::D:
    case Region::E:
      break;
  }
  return rate - s * threshold + neg_log_moment(p, s) + tail;
}

ExponentResult e1_prime_binary(double p, double rate, double threshold) {
  check_common(p, rate, 0.0);
  const auto sup = sup_over_s([&](double s) { return e1_prime_binary_at(p, rate, threshold, s); });
  ExponentResult out;
  out.value = sup.value;
  out.s = sup.s;
  out.diverged = sup.diverged;
  return out;
}

ExponentResult e2_prime_binary(double p, double rate, double threshold) {
  auto out = e1_prime_binary(p, rate, threshold);
  out.value += threshold;
  return out;
}

VeryNoisyBounds very_noisy_bounds(double eps, double tau, double theta) {
  if (!(std::abs(eps) <= 0.05)) throw DomainError("very_noisy_bounds: requires |eps| <= 0.05");
  if (!(tau > 4.0)) throw DomainError("very_noisy_bounds: requires tau > 4");
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("very_noisy_bounds: theta must lie in [0,1]");
  const double eps2 = eps * eps;
  return {(tau + 2.0) * eps2, (tau * (tau + 8.0) / 16.0 - 1.0) * eps2};
}

double very_noisy_gamma(double t, double eps) { return (t - 1.0) * (kLn2 - 2.0 * t * eps * eps); }

double very_noisy_rho_star(double s, double theta) {
  if (!(theta > 0.0)) throw DomainError("very_noisy_rho_star: theta must be positive");
  return s / theta;
}

}  // namespace swexp
