#include "swexp/variable_rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "swexp/optimize.hpp"

namespace swexp {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-8;

double mean_of(std::span<const double> weights, std::span<const double> values) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * values[i];
  return total;
}

// Euclidean projection onto {r : r >= 0, sum_i w_i r_i = R} with w > 0.
std::vector<double> project_rates(std::span<const double> v, std::span<const double> w, double rate) {
  auto clipped_mean = [&](double theta) {
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) total += w[i] * std::max(0.0, v[i] - theta * w[i]);
    return total;
  };
  // clipped_mean is continuous and nonincreasing in theta.
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) hi = std::max(hi, v[i] / w[i]);
  double lo = hi - 1.0;
  while (clipped_mean(lo) < rate) lo -= 2.0 * (hi - lo);
  const double theta =
      bisect_increasing([&](double t) { return rate - clipped_mean(t); }, lo, hi, 1e-15);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] - theta * w[i]);
  // Restore the equality exactly on the positive coordinates.
  const double mean = mean_of(w, out);
  double active = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (out[i] > 0.0) active += w[i] * w[i];
  if (active > 0.0)
    for (std::size_t i = 0; i < v.size(); ++i)
      if (out[i] > 0.0) out[i] += (rate - mean) * w[i] / active;
  return out;
}

}  // namespace

VariableRate::VariableRate(const JointSource& src)
    : src_(src), px_(marginal_x(src)), py_(marginal_y(src)), cond_(conditional_x_given_y(src)) {}

FWeights VariableRate::f_weights(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("f_weights: s must lie in [0,1]");
  FWeights out;
  out.f.assign(src_.size_x(), 0.0);
  for (std::size_t y = 0; y < src_.size_y(); ++y) {
    double tail = 0.0;
    for (double w : cond_.column(y)) tail += pow_support(w, 1.0 - s);
    for (std::size_t x = 0; x < src_.size_x(); ++x)
      out.f[x] += py_[y] * pow_support(cond_(x, y), s) * tail;
  }
  const double total = std::accumulate(out.f.begin(), out.f.end(), 0.0);
  out.q.resize(out.f.size());
  for (std::size_t x = 0; x < out.f.size(); ++x) out.q[x] = out.f[x] / total;
  return out;
}

RateAssignment VariableRate::optimal_rates(double s, double rate) const {
  if (!(rate > 0.0)) throw InfeasibleRate("optimal_rates: mean rate must be positive");
  const auto fw = f_weights(s);
  const auto p = px_.values();
  const std::size_t n = p.size();

  std::vector<double> log_ratio(n);
  for (std::size_t x = 0; x < n; ++x)
    log_ratio[x] = fw.q[x] > 0.0 ? std::log(fw.q[x] / p[x]) : -std::numeric_limits<double>::infinity();

  RateAssignment out;
  out.rates.resize(n);
  const double divergence = kl_divergence(p, fw.q);
  const double interior_mu = rate + divergence;
  bool interior = std::isfinite(divergence);
  for (std::size_t x = 0; x < n && interior; ++x) interior = log_ratio[x] + interior_mu > 0.0;

  if (interior) {
    for (std::size_t x = 0; x < n; ++x) out.rates[x] = log_ratio[x] + interior_mu;
    out.mu = interior_mu;
    out.interior = true;
  } else {
    auto fill = [&](double mu) {
      double total = 0.0;
      for (std::size_t x = 0; x < n; ++x) total += p[x] * std::max(0.0, log_ratio[x] + mu);
      return total;
    };
    double max_q_over_p = -std::numeric_limits<double>::infinity();
    double max_p_over_q = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < n; ++x) {
      max_q_over_p = std::max(max_q_over_p, log_ratio[x]);
      if (std::isfinite(log_ratio[x])) max_p_over_q = std::max(max_p_over_q, -log_ratio[x]);
    }
    double mu = bisect_increasing([&](double m) { return fill(m) - rate; }, -max_q_over_p,
                                  rate + max_p_over_q, 1e-14);
    // Solve the active-set equation exactly.
    double active_mass = 0.0;
    double active_log = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (log_ratio[x] + mu > 0.0) {
        active_mass += p[x];
        active_log += p[x] * log_ratio[x];
      }
    }
    if (active_mass > 0.0) {
      const double exact = (rate - active_log) / active_mass;
      bool same_set = true;
      for (std::size_t x = 0; x < n; ++x)
        same_set = same_set && ((log_ratio[x] + exact > 0.0) == (log_ratio[x] + mu > 0.0));
      if (same_set) mu = exact;
    }
    for (std::size_t x = 0; x < n; ++x) out.rates[x] = std::max(0.0, log_ratio[x] + mu);
    out.mu = mu;
    out.interior = false;
  }
  out.mean_rate = mean_of(p, out.rates);
  return out;
}

double VariableRate::e0_tilde(double rho, double s, std::span<const double> rates) const {
  if (!(rho > 0.0 && rho <= 1.0 + 1e-12 && s >= 0.0 && s <= rho + 1e-12))
    throw DomainError("e0_tilde: requires 0 < rho <= 1 and 0 <= s <= rho");
  if (rates.size() != src_.size_x()) throw DomainError("e0_tilde: one rate per X symbol required");
  for (double r : rates)
    if (!(r >= 0.0)) throw DomainError("e0_tilde: rates must be nonnegative");
  const double ratio = s / rho;
  double total = 0.0;
  for (std::size_t y = 0; y < src_.size_y(); ++y) {
    double outer = 0.0;
    double inner = 0.0;
    for (std::size_t x = 0; x < src_.size_x(); ++x) {
      const double w = cond_(x, y);
      outer += pow_support(w, 1.0 - s);
      inner += pow_support(w, ratio) * std::exp(-rates[x]);
    }
    total += py_[y] * outer * std::pow(inner, rho);
  }
  return -std::log(total);
}

RateAssignment VariableRate::optimize_rates(double rho, double s, double rate) const {
  if (!(rate > 0.0)) throw InfeasibleRate("optimize_rates: mean rate must be positive");
  if (!(rho > 0.0 && rho <= 1.0 + 1e-12 && s >= 0.0 && s <= rho + 1e-12))
    throw DomainError("optimize_rates: requires 0 < rho <= 1 and 0 <= s <= rho");
  const std::size_t nx = src_.size_x();
  const std::size_t ny = src_.size_y();
  const auto p = px_.values();
  const double ratio = s / rho;

  std::vector<double> outer(ny, 0.0);
  std::vector<double> tilted(nx * ny);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      outer[y] += pow_support(cond_(x, y), 1.0 - s);
      tilted[y * nx + x] = pow_support(cond_(x, y), ratio);
    }
  }
  // ln sum_y P(y) outer_y inner_y^rho and its gradient in r.
  std::vector<double> grad(nx);
  auto evaluate = [&](const std::vector<double>& r, bool with_gradient) {
    double total = 0.0;
    if (with_gradient) std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t y = 0; y < ny; ++y) {
      double inner = 0.0;
      for (std::size_t x = 0; x < nx; ++x) inner += tilted[y * nx + x] * std::exp(-r[x]);
      const double term = py_[y] * outer[y] * std::pow(inner, rho);
      total += term;
      if (with_gradient)
        for (std::size_t x = 0; x < nx; ++x)
          grad[x] -= term * rho * tilted[y * nx + x] * std::exp(-r[x]) / inner;
    }
    if (with_gradient)
      for (double& g : grad) g /= total;
    return std::log(total);
  };

  std::vector<double> r(nx, rate);
  double value = evaluate(r, true);
  double step = 1.0;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::vector<double> candidate;
    double candidate_value = value;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> moved(nx);
      for (std::size_t x = 0; x < nx; ++x) moved[x] = r[x] - step * grad[x];
      candidate = project_rates(moved, p, rate);
      double decrease = 0.0;
      for (std::size_t x = 0; x < nx; ++x) decrease += grad[x] * (candidate[x] - r[x]);
      candidate_value = evaluate(candidate, false);
      if (candidate_value <= value + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    double moved_by = 0.0;
    for (std::size_t x = 0; x < nx; ++x) moved_by = std::max(moved_by, std::abs(candidate[x] - r[x]));
    r = std::move(candidate);
    value = evaluate(r, true);
    step = std::min(step * 2.0, 1e3);
    if (moved_by < kStepTolerance) break;
  }

  RateAssignment out;
  out.rates = std::move(r);
  out.mu = std::numeric_limits<double>::quiet_NaN();
  out.mean_rate = mean_of(p, out.rates);
  out.interior = std::all_of(out.rates.begin(), out.rates.end(), [](double v) { return v > 0.0; });
  return out;
}

RateAssignment VariableRate::best_rates(double rho, double s, double rate) const {
  return rho >= 1.0 ? optimal_rates(s, rate) : optimize_rates(rho, s, rate);
}

double VariableRate::inner_value(double rho, double s, double rate, double threshold) const {
  if (rho <= 0.0) return 0.0;
  const auto rates = best_rates(rho, s, rate);
  return e0_tilde(rho, s, rates.rates) - s * threshold;
}

VariableRateExponent VariableRate::e1_tilde(double rate, double threshold) const {
  if (!(rate > 0.0)) throw InfeasibleRate("e1_tilde: mean rate must be positive");
  auto objective = [&](double rho, double s) { return inner_value(rho, s, rate, threshold); };
  auto best = maximize_triangle(objective);

  // The constant assignment is feasible, so the fixed-rate optimum is a valid
  // starting point that the variable-rate value must dominate.
  const auto fixed = GallagerForney(src_).e1(rate, threshold);
  const double at_fixed = objective(fixed.rho, fixed.s);
  if (at_fixed > best.value) best = {fixed.rho, fixed.s, at_fixed};

  VariableRateExponent out;
  out.exponent.value = best.value;
  out.exponent.rho = best.rho;
  out.exponent.s = best.s;
  if (best.rho > 0.0) {
    out.rates = best_rates(best.rho, best.s, rate);
  } else {
    out.rates.rates.assign(src_.size_x(), rate);
    out.rates.mu = std::numeric_limits<double>::quiet_NaN();
    out.rates.mean_rate = rate;
    out.rates.interior = true;
  }
  return out;
}

FWeights f_weights(const JointSource& src, double s) { return VariableRate(src).f_weights(s); }
RateAssignment optimal_rates(const JointSource& src, double s, double rate) {
  return VariableRate(src).optimal_rates(s, rate);
}
double e0_tilde(const JointSource& src, double rho, double s, const RateAssignment& rates) {
  return VariableRate(src).e0_tilde(rho, s, rates.rates);
}
VariableRateExponent e1_tilde(const JointSource& src, double rate, double threshold) {
  return VariableRate(src).e1_tilde(rate, threshold);
}

}  // namespace swexp
