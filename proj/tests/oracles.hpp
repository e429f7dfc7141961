#pragma once

// Test-side reference computations. Written from the defining formulas with
// plain loops and grids; nothing here calls into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // [x][y]

inline double h(double d) {
  double v = 0.0;
  if (d > 0) v -= d * std::log(d);
  if (d < 1) v -= (1 - d) * std::log(1 - d);
  return v;
}

inline double bin_div(double a, double b) {
  double v = 0.0;
  if (a > 0) v += a * std::log(a / b);
  if (a < 1) v += (1 - a) * std::log((1 - a) / (1 - b));
  return v;
}

inline Matrix bss(double p) { return {{(1 - p) / 2, p / 2}, {p / 2, (1 - p) / 2}}; }

inline std::vector<double> py(const Matrix& m) {
  std::vector<double> out(m[0].size(), 0.0);
  for (const auto& row : m)
    for (std::size_t y = 0; y < row.size(); ++y) out[y] += row[y];
  return out;
}

inline std::vector<double> px(const Matrix& m) {
  std::vector<double> out;
  for (const auto& row : m) {
    double s = 0;
    for (double v : row) s += v;
    out.push_back(s);
  }
  return out;
}

// E0(rho, s) straight from its definition (full-support sources).
inline double e0(const Matrix& m, double rho, double s) {
  const auto q = py(m);
  double total = 0.0;
  for (std::size_t y = 0; y < q.size(); ++y) {
    double inner = 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) inner += std::pow(m[x][y] / q[y], s / rho);
    double outer = 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) outer += std::pow(m[x][y] / q[y], 1 - s);
    total += q[y] * outer * std::pow(inner, rho);
  }
  return -std::log(total);
}

// The specialized double-BSS form of the E1 objective.
inline double bss_e1_objective(double p, double rho, double s, double R, double T) {
  return rho * R - std::log(std::pow(p, 1 - s) + std::pow(1 - p, 1 - s)) -
         rho * std::log(std::pow(p, s / rho) + std::pow(1 - p, s / rho)) - s * T;
}

// Dense grid over 0 <= s <= rho <= 1 (rho > 0), returns the best value.
inline double e1_grid(const std::function<double(double, double)>& obj, int steps) {
  double best = 0.0;  // value at rho = s = 0
  for (int i = 1; i <= steps; ++i) {
    const double rho = static_cast<double>(i) / steps;
    for (int j = 0; j <= i; ++j) best = std::max(best, obj(rho, static_cast<double>(j) / steps));
  }
  return best;
}

// c(sigma) = lim_{rho->0} -E0(rho, sigma rho)/rho
//          = sigma H(X|Y) + sum_y P(y) ln sum_x P^sigma(x|y).
inline double small_rho_slope(const Matrix& m, double sigma) {
  const auto q = py(m);
  double hxy = 0.0, tail = 0.0;
  for (std::size_t y = 0; y < q.size(); ++y) {
    double z = 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) {
      const double c = m[x][y] / q[y];
      if (c > 0) hxy -= m[x][y] * std::log(c);
      z += std::pow(c, sigma);
    }
    tail += q[y] * std::log(z);
  }
  return sigma * hxy + tail;
}

inline double r_min(const Matrix& m, double T, int steps = 20000) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double sigma = static_cast<double>(i) / steps;
    best = std::min(best, sigma * T + small_rho_slope(m, sigma));
  }
  return best;
}

// L(R, s, delta) for the double BSS.
inline double l_obj(double p, double R, double s, double d) {
  const double gap = R - h(d);
  return s * d * std::log((1 - p) / p) + s * gap + (1 - s) * std::max(gap, 0.0);
}

// min over delta in [0,1]: 1e-4 grid, then 1e-8-spaced rescans around the
// best grid point.
inline double l_brute(double p, double R, double s) {
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double d = i * 1e-4;
    const double v = l_obj(p, R, s, d);
    if (v < best) best = v, arg = d;
  }
  double lo = std::max(0.0, arg - 1e-4), hi = std::min(1.0, arg + 1e-4);
  for (int round = 0; round < 3; ++round) {
    const double step = (hi - lo) / 200;
    for (int i = 0; i <= 200; ++i) {
      const double d = lo + i * step;
      const double v = l_obj(p, R, s, d);
      if (v < best) best = v, arg = d;
    }
    lo = std::max(0.0, arg - step);
    hi = std::min(1.0, arg + step);
  }
  return best;
}

inline double h_inverse(double R) {
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < R ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Three-case E1'(R, T, s) with its own region tests.
inline double e1_prime_s(double p, double R, double T, double s) {
  const double ps = std::pow(p, s) / (std::pow(p, s) + std::pow(1 - p, s));
  const double tail = std::log(std::pow(p, 1 - s) + std::pow(1 - p, 1 - s));
  const double head = std::log(std::pow(p, s) + std::pow(1 - p, s));
  enum { CFG, B, ADE } phase;
  if (s <= 1) {
    phase = R > h(ps) ? ADE : (R > h(p) ? B : CFG);
  } else {
    const double rs = -head / (s - 1);
    phase = R > rs ? ADE : CFG;
  }
  switch (phase) {
    case CFG: return s * (R - T) - tail;
    case B: return s * (R - T + bin_div(h_inverse(R), p)) - tail;
    default: return R - s * T - head - tail;
  }
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(k);
  double s = 0;
  for (auto& x : v) s += (x = e(rng) + floor);
  for (auto& x : v) x /= s;
  return v;
}

inline Matrix random_source(std::mt19937_64& rng, std::size_t nx, std::size_t ny) {
  const auto flat = random_simplex(rng, nx * ny, 0.05);
  Matrix m(nx, std::vector<double>(ny));
  double total = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) total += (m[x][y] = flat[x * ny + y]);
  // Make the sum exactly representable-close to 1: fold the residue into the last cell.
  m[nx - 1][ny - 1] += 1.0 - total;
  return m;
}

}  // namespace oracle
