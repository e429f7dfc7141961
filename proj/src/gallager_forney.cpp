#include "swexp/gallager_forney.hpp"

#include <cmath>
#include <limits>

#include "swexp/optimize.hpp"

namespace swexp {
namespace {

constexpr double kSlack = 1e-12;
constexpr double kSmallRho = 1e-6;

}  // namespace

GFParams::GFParams(double rho_value, double s_value) : rho(rho_value), s(s_value) {
  if (!(s >= 0.0 && s <= rho + kSlack && rho <= 1.0 + kSlack))
    throw DomainError("parameters must satisfy 0 <= s <= rho <= 1");
}

GallagerForney::GallagerForney(const JointSource& src)
    : src_(src), py_(marginal_y(src)), cond_(conditional_x_given_y(src)) {}

double GallagerForney::e0(double rho, double s) const {
  if (!(rho > 0.0 && rho <= 1.0 + kSlack && s >= 0.0 && s <= rho + kSlack))
    throw DomainError("e0: requires 0 < rho <= 1 and 0 <= s <= rho");
  const double ratio = s / rho;
  double total = 0.0;
  for (std::size_t y = 0; y < src_.size_y(); ++y) {
    const auto column = cond_.column(y);
    double outer = 0.0;
    double inner = 0.0;
    for (double w : column) {
      outer += pow_support(w, 1.0 - s);
      inner += pow_support(w, ratio);
    }
    total += py_[y] * outer * std::pow(inner, rho);
  }
  return -std::log(total);
}

double GallagerForney::e1_objective(double rho, double s, double rate, double threshold) const {
  if (rho <= 0.0) return 0.0;
  return e0(rho, s) + rho * rate - s * threshold;
}

ExponentResult GallagerForney::e1(double rate, double threshold) const {
  if (!(rate >= 0.0)) throw DomainError("e1: rate must be nonnegative");
  const auto best = maximize_triangle(
      [&](double rho, double s) { return e1_objective(rho, s, rate, threshold); });
  ExponentResult result;
  result.value = best.value;
  result.rho = best.rho;
  result.s = best.s;
  return result;
}

ExponentResult GallagerForney::e2(double rate, double threshold) const {
  auto result = e1(rate, threshold);
  result.value += threshold;
  return result;
}

// Along each ray s = sigma rho the map rho -> E0(rho, sigma rho) is concave
// with value 0 at the origin, so E0/rho is nonincreasing in rho and both the
// R_min infimum and the T_max supremum are attained in the limit rho -> 0.
double GallagerForney::small_rho_slope(double sigma) const {
  const double fine = -e0(kSmallRho, sigma * kSmallRho) / kSmallRho;
  const double coarse = -e0(10.0 * kSmallRho, sigma * 10.0 * kSmallRho) / (10.0 * kSmallRho);
  return (10.0 * fine - coarse) / 9.0;
}

double GallagerForney::r_min(double threshold) const {
  // sigma T + slope(sigma) is convex in sigma.
  const auto best = golden_section_max(
      [&](double sigma) { return -(sigma * threshold + small_rho_slope(sigma)); }, 0.0, 1.0, 1e-9);
  return -best.value;
}

double GallagerForney::t_max(double rate) const {
  if (!(rate > 0.0)) throw DomainError("t_max: rate must be positive");
  // (R - slope(sigma))/sigma is quasi-concave on (0, 1]; it grows without
  // bound as sigma -> 0 once R exceeds slope(0).
  if (rate - small_rho_slope(0.0) > kPositivityThreshold) return std::numeric_limits<double>::infinity();
  auto ratio = [&](double sigma) { return (rate - small_rho_slope(sigma)) / sigma; };
  constexpr int kSteps = 64;
  int best = kSteps;
  double best_value = ratio(1.0);
  for (int k = kSteps - 1; k >= 1; --k) {
    const double v = ratio(static_cast<double>(k) / kSteps);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double lo = best == 1 ? 1e-9 : static_cast<double>(best - 1) / kSteps;
  const double hi = best == kSteps ? 1.0 : static_cast<double>(best + 1) / kSteps;
  return golden_section_max(ratio, lo, hi, 1e-10).value;
}

double e0(const JointSource& src, double rho, double s) { return GallagerForney(src).e0(rho, s); }
ExponentResult e1(const JointSource& src, double rate, double threshold) {
  return GallagerForney(src).e1(rate, threshold);
}
ExponentResult e2(const JointSource& src, double rate, double threshold) {
  return GallagerForney(src).e2(rate, threshold);
}
double r_min(const JointSource& src, double threshold) { return GallagerForney(src).r_min(threshold); }
double t_max(const JointSource& src, double rate) { return GallagerForney(src).t_max(rate); }

}  // namespace swexp
