#include "swexp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace swexp {

ScalarOptimum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarOptimum best{lo, f(lo)};
  auto consider = [&best](double x, double fx) {
    if (fx > best.value) best = {x, fx};
  };
  if (hi <= lo) return best;
  consider(hi, f(hi));

  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  consider(c, fc);
  consider(d, fd);
  return best;
}

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TriangleOptimum maximize_triangle(const std::function<double(double, double)>& objective,
                                  const TriangleSearchOptions& options) {
  const int steps = static_cast<int>(std::lround(1.0 / options.grid_step));
  const double h = 1.0 / steps;

  TriangleOptimum best{0.0, 0.0, objective(0.0, 0.0)};
  for (int ks = 0; ks <= steps; ++ks) {
    for (int kr = std::max(ks, 1); kr <= steps; ++kr) {
      const double rho = kr * h;
      const double s = ks * h;
      const double v = objective(rho, s);
      if (v > best.value) best = {rho, s, v};
    }
  }

  auto consider = [&best](double rho, double s, double v) {
    if (v > best.value) best = {rho, s, v};
  };
  auto profile = [&](double rho) {
    const auto inner = golden_section_max([&](double s) { return objective(rho, s); }, 0.0, rho,
                                          options.tolerance);
    consider(rho, inner.arg, inner.value);
    return inner.value;
  };
  golden_section_max(profile, std::max(0.0, best.rho - h), std::min(1.0, best.rho + h),
                     options.tolerance);
  return best;
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  const std::size_t n = v.size();
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
  return v;
}

SimplexOptimum nelder_mead_simplex(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> start, double initial_step, double tolerance,
                                   int max_iterations) {
  const std::size_t k = start.size();
  if (k <= 1) return {start, f(start)};
  const std::size_t dim = k - 1;

  auto to_point = [k, dim](const std::vector<double>& u) {
    std::vector<double> v(k);
    double rest = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      v[i] = u[i];
      rest -= u[i];
    }
    v[dim] = rest;
    return project_to_simplex(std::move(v));
  };

  struct Vertex {
    std::vector<double> u;
    double value;
  };
  auto make_vertex = [&](std::vector<double> u) {
    const auto point = to_point(u);
    // Keep vertices on the simplex so the search cannot drift away from it.
    u.assign(point.begin(), point.begin() + static_cast<std::ptrdiff_t>(dim));
    return Vertex{std::move(u), f(point)};
  };

  std::vector<Vertex> simplex;
  simplex.push_back(make_vertex(std::vector<double>(start.begin(), start.begin() + static_cast<std::ptrdiff_t>(dim))));
  for (std::size_t i = 0; i < dim; ++i) {
    auto u = simplex.front().u;
    u[i] += (u[i] + initial_step <= 1.0) ? initial_step : -initial_step;
    simplex.push_back(make_vertex(std::move(u)));
  }

  auto combine = [dim](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    double size = 0.0;
    for (std::size_t j = 1; j <= dim; ++j)
      for (std::size_t i = 0; i < dim; ++i)
        size = std::max(size, std::abs(simplex[j].u[i] - simplex[0].u[i]));
    if (simplex.back().value - simplex.front().value <= tolerance * 1e-3 && size <= tolerance) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[j].u[i] / static_cast<double>(dim);

    Vertex& worst = simplex.back();
    const Vertex reflected = make_vertex(combine(centroid, worst.u, -1.0));
    if (reflected.value < simplex.front().value) {
      Vertex expanded = make_vertex(combine(centroid, worst.u, -2.0));
      worst = expanded.value < reflected.value ? std::move(expanded) : reflected;
    } else if (reflected.value < simplex[dim - 1].value) {
      worst = reflected;
    } else {
      const bool outside = reflected.value < worst.value;
      Vertex contracted = make_vertex(combine(centroid, worst.u, outside ? -0.5 : 0.5));
      if (contracted.value < std::min(worst.value, reflected.value)) {
        worst = std::move(contracted);
      } else {
        for (std::size_t j = 1; j <= dim; ++j)
          simplex[j] = make_vertex(combine(simplex[0].u, simplex[j].u, 0.5));
      }
    }
  }
  const auto it = std::min_element(simplex.begin(), simplex.end(),
                                   [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
  return {to_point(it->u), it->value};
}

SupOverS sup_over_s(const std::function<double(double)>& objective, double max_s, double tolerance,
                    double increment_slack) {
  std::vector<double> grid;
  for (int k = 0; k < 32; ++k) grid.push_back(k / 16.0);
  for (double s = 2.0; s <= max_s + 1e-12; s += 2.0) grid.push_back(s);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = objective(grid[i]);

  SupOverS result;
  const std::size_t n = grid.size();
  double increments[3];
  for (int j = 0; j < 3; ++j) {
    const std::size_t i = n - 3 + static_cast<std::size_t>(j);
    increments[j] = (values[i] - values[i - 1]) / (grid[i] - grid[i - 1]);
  }
  result.asymptotic_slope = increments[2];
  const double slack = increment_slack > 0.0
                           ? increment_slack
                           : 64.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, std::abs(values.back()));
  const bool positive = increments[0] > 1e-9 && increments[1] > 1e-9 && increments[2] > 1e-9;
  const bool non_decreasing =
      increments[1] >= increments[0] - slack && increments[2] >= increments[1] - slack;
  if (positive && non_decreasing) {
    result.value = std::numeric_limits<double>::infinity();
    result.s = std::numeric_limits<double>::infinity();
    result.diverged = true;
    return result;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (values[i] > values[best]) best = i;
  const double lo = best == 0 ? grid[0] : grid[best - 1];
  const double hi = best + 1 == n ? grid[best] : grid[best + 1];
  const auto refined = golden_section_max(objective, lo, hi, tolerance);
  if (refined.value > values[best]) {
    result.value = refined.value;
    result.s = refined.arg;
  } else {
    result.value = values[best];
    result.s = grid[best];
  }
  return result;
}

}  // namespace swexp
