#include "swexp/tce_general.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "swexp/optimize.hpp"

namespace swexp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-7;

// Tilted member of the exponential family through column P(.|y):
// W_beta(x) = P^beta(x|y) / Z(beta).
struct TiltedColumn {
  double log_z;
  double mean_log_p;  // sum_x W_beta(x) ln P(x|y)
};

TiltedColumn tilt_column(const std::vector<double>& log_p, double beta) {
  double peak = -kInf;
  for (double l : log_p)
    if (l > -kInf) peak = std::max(peak, beta * l);
  double total = 0.0;
  double weighted = 0.0;
  for (double l : log_p) {
    if (l == -kInf) continue;
    const double w = std::exp(beta * l - peak);
    total += w;
    weighted += w * l;
  }
  return {peak + std::log(total), weighted / total};
}

double tilted_entropy(const TiltedColumn& c, double beta) { return c.log_z - beta * c.mean_log_p; }
double tilted_divergence(const TiltedColumn& c, double beta) {
  return (beta - 1.0) * c.mean_log_p - c.log_z;
}

std::vector<double> tilted_column(const std::vector<double>& log_p, double beta) {
  const auto c = tilt_column(log_p, beta);
  std::vector<double> w(log_p.size(), 0.0);
  for (std::size_t x = 0; x < log_p.size(); ++x)
    if (log_p[x] > -kInf) w[x] = std::exp(beta * log_p[x] - c.log_z);
  return w;
}

// All compositions of `total` into `parts` nonnegative integers.
void for_each_composition(std::size_t parts, int total,
                          const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> counts(parts, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == parts) {
      counts[i] = left;
      visit(counts);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, total);
}

std::uint64_t composition_key(const std::vector<int>& counts) {
  std::uint64_t key = 0;
  for (int c : counts) key = key * 97 + static_cast<std::uint64_t>(c);
  return key;
}

}  // namespace

struct TypeEnumeration::Tilt {
  double s;
  std::vector<double> entropy_p;      // H(P(.|y))
  std::vector<double> log_z;          // ln sum_x P^s(x|y)
  std::vector<double> entropy_tilt;   // H(P_s(.|y))
  std::vector<double> log_tail;       // ln sum_x P^{1-s}(x|y)
};

TypeEnumeration::TypeEnumeration(const JointSource& src)
    : src_(src), py_(marginal_y(src)), cond_(conditional_x_given_y(src)) {
  if (src.size_x() > kMaxGeneralAlphabet || src.size_y() > kMaxGeneralAlphabet)
    throw DomainError("type enumeration supports alphabets of at most 6 symbols");
  log_cond_.resize(src.size_y());
  for (std::size_t y = 0; y < src.size_y(); ++y) {
    for (double w : cond_.column(y)) log_cond_[y].push_back(w > 0.0 ? std::log(w) : -kInf);
  }
}

TypeEnumeration::Tilt TypeEnumeration::tilt(double s) const {
  Tilt t;
  t.s = s;
  for (std::size_t y = 0; y < src_.size_y(); ++y) {
    const auto base = tilt_column(log_cond_[y], 1.0);
    const auto tilted = tilt_column(log_cond_[y], s);
    t.entropy_p.push_back(tilted_entropy(base, 1.0));
    t.log_z.push_back(tilted.log_z);
    t.entropy_tilt.push_back(tilted_entropy(tilted, s));
    t.log_tail.push_back(log_power_sum(cond_.column(y), 1.0 - s));
  }
  return t;
}

// The minimization splits on the sign of R - H(X'|Y). Where H >= R the
// objective is s D + s R, minimized by W = P unless P has H < R. Where H <= R
// it equals R + sum_y P_Y'(y) [D(W_y || P_s(.|y)) - ln Z_y(s)], minimized by
// the tilt P_s unless that has H > R. An infeasible unconstrained minimizer
// pushes the optimum onto H = R, where minimizing D(W || P) selects a common
// tilt P^beta with beta solving H = R.
double TypeEnumeration::inner_value(const Tilt& t, const std::vector<double>& py_prime, double rate,
                                    std::vector<double>* minimizer) const {
  const std::size_t ny = src_.size_y();
  const double s = t.s;
  double h_p = 0.0;
  double h_s = 0.0;
  double log_z = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    h_p += py_prime[y] * t.entropy_p[y];
    h_s += py_prime[y] * t.entropy_tilt[y];
    log_z += py_prime[y] * t.log_z[y];
  }

  double best = kInf;
  double beta = 1.0;
  if (h_p >= rate) best = s * rate;
  if (h_s <= rate) {
    const double value = rate - log_z;
    if (value < best) {
      best = value;
      beta = s;
    }
  }
  if (best == kInf) {
    auto entropy_at = [&](double b) {
      double h = 0.0;
      for (std::size_t y = 0; y < ny; ++y)
        if (py_prime[y] > 0.0) h += py_prime[y] * tilted_entropy(tilt_column(log_cond_[y], b), b);
      return h;
    };
    beta = bisect_increasing([&](double b) { return rate - entropy_at(b); }, 0.0, 1.0, 1e-14);
    double divergence = 0.0;
    for (std::size_t y = 0; y < ny; ++y)
      if (py_prime[y] > 0.0)
        divergence += py_prime[y] * tilted_divergence(tilt_column(log_cond_[y], beta), beta);
    best = s * (divergence + rate);
  }
  if (minimizer != nullptr) {
    minimizer->clear();
    for (std::size_t y = 0; y < ny; ++y) {
      const auto column = tilted_column(log_cond_[y], beta);
      minimizer->insert(minimizer->end(), column.begin(), column.end());
    }
  }
  return best;
}

InnerExponent TypeEnumeration::inner_l(const DistributionOverY& py_prime, double rate, double s) const {
  if (py_prime.size() != src_.size_y()) throw DomainError("inner_l: P_Y' has the wrong size");
  if (!(s >= 0.0)) throw DomainError("inner_l: s must be nonnegative");
  if (!(rate >= 0.0)) throw DomainError("inner_l: rate must be nonnegative");
  const std::vector<double> py(py_prime.values().begin(), py_prime.values().end());
  std::vector<double> columns;
  InnerExponent out;
  out.value = inner_value(tilt(s), py, rate, &columns);
  out.minimizer = ConditionalXgivenY(src_.size_x(), src_.size_y(), std::move(columns));
  return out;
}

double TypeEnumeration::middle_value(const Tilt& t, const std::vector<double>& py_prime,
                                     double rate) const {
  double value = kl_divergence(py_prime, py_.values()) + inner_value(t, py_prime, rate, nullptr);
  for (std::size_t y = 0; y < src_.size_y(); ++y) value -= py_prime[y] * t.log_tail[y];
  return value;
}

double TypeEnumeration::middle_objective(const std::vector<double>& py_prime, double rate,
                                         double s) const {
  if (py_prime.size() != src_.size_y()) throw DomainError("middle_objective: P_Y' has the wrong size");
  return middle_value(tilt(s), py_prime, rate);
}

TypeEnumeration::MiddleMinimum TypeEnumeration::minimize_middle(double rate, double s) const {
  const std::size_t ny = src_.size_y();
  const Tilt t = tilt(s);
  auto objective = [&](const std::vector<double>& v) { return middle_value(t, v, rate); };
  if (ny == 1) {
    const std::vector<double> only{1.0};
    return {objective(only), only, {only}};
  }

  const int denominator = ny <= 3 ? 64 : 32;
  struct GridPoint {
    std::vector<int> counts;
    double value;
  };
  std::vector<GridPoint> grid;
  std::unordered_map<std::uint64_t, double> by_key;
  for_each_composition(ny, denominator, [&](const std::vector<int>& counts) {
    std::vector<double> v(ny);
    for (std::size_t y = 0; y < ny; ++y) v[y] = static_cast<double>(counts[y]) / denominator;
    const double value = objective(v);
    grid.push_back({counts, value});
    by_key.emplace(composition_key(counts), value);
  });

  // Seeds: grid points no worse than any lattice neighbour, best first.
  std::vector<const GridPoint*> seeds;
  for (const auto& g : grid) {
    bool local_min = true;
    auto counts = g.counts;
    for (std::size_t i = 0; i < ny && local_min; ++i) {
      if (counts[i] == 0) continue;
      for (std::size_t j = 0; j < ny && local_min; ++j) {
        if (i == j) continue;
        --counts[i];
        ++counts[j];
        const auto it = by_key.find(composition_key(counts));
        if (it != by_key.end() && it->second < g.value) local_min = false;
        ++counts[i];
        --counts[j];
      }
    }
    if (local_min) seeds.push_back(&g);
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const GridPoint* a, const GridPoint* b) { return a->value < b->value; });
  if (seeds.size() > 4) seeds.resize(4);

  std::vector<SimplexOptimum> refined;
  for (const auto* seed : seeds) {
    std::vector<double> start(ny);
    for (std::size_t y = 0; y < ny; ++y) start[y] = static_cast<double>(seed->counts[y]) / denominator;
    auto opt = nelder_mead_simplex(objective, start, 1.0 / denominator, 1e-9);
    if (seed->value < opt.value) opt = {start, seed->value};
    refined.push_back(std::move(opt));
  }
  std::sort(refined.begin(), refined.end(),
            [](const SimplexOptimum& a, const SimplexOptimum& b) { return a.value < b.value; });

  MiddleMinimum out;
  out.value = refined.front().value;
  out.py_prime = refined.front().point;
  for (const auto& r : refined) {
    if (r.value > out.value + kTieTolerance) break;
    const bool duplicate = std::any_of(out.ties.begin(), out.ties.end(), [&](const auto& other) {
      double gap = 0.0;
      for (std::size_t y = 0; y < ny; ++y) gap = std::max(gap, std::abs(other[y] - r.point[y]));
      return gap < 1e-4;
    });
    if (!duplicate) out.ties.push_back(r.point);
  }
  return out;
}

double TypeEnumeration::e1_prime_at(double rate, double threshold, double s) const {
  return minimize_middle(rate, s).value - s * threshold;
}

TypeEnumerationExponent TypeEnumeration::e1_prime(double rate, double threshold) const {
  const double max_rate = std::log(static_cast<double>(src_.size_x()));
  if (!(rate >= 0.0 && rate <= max_rate + 1e-12)) throw DomainError("e1_prime: rate must lie in [0, ln|X|]");
  const auto sup = sup_over_s([&](double s) { return e1_prime_at(rate, threshold, s); }, 256.0, 1e-9,
                              1e-7);
  TypeEnumerationExponent out;
  out.exponent.value = sup.value;
  out.exponent.s = sup.s;
  out.exponent.diverged = sup.diverged;
  if (!sup.diverged) {
    auto middle = minimize_middle(rate, sup.s);
    std::vector<double> columns;
    inner_value(tilt(sup.s), middle.py_prime, rate, &columns);
    out.conditional = ConditionalXgivenY(src_.size_x(), src_.size_y(), std::move(columns));
    out.py_prime = std::move(middle.py_prime);
    out.tied_py_prime = std::move(middle.ties);
  }
  return out;
}

InnerExponent inner_l(const JointSource& src, const DistributionOverY& py_prime, double rate, double s) {
  return TypeEnumeration(src).inner_l(py_prime, rate, s);
}

TypeEnumerationExponent e1_prime_general(const JointSource& src, double rate, double threshold) {
  return TypeEnumeration(src).e1_prime(rate, threshold);
}

}  // namespace swexp
