#pragma once

// Small derivative-free optimizers shared by the exponent modules.

#include <functional>
#include <vector>

namespace swexp {

struct ScalarOptimum {
  double arg = 0.0;
  double value = 0.0;
};

// Maximizes a unimodal f on [lo, hi] by golden-section search until the
// bracket is narrower than tol. Endpoints are evaluated too, so a monotone f
// returns its boundary maximum.
ScalarOptimum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-8);

// Root of a function that is nondecreasing on [lo, hi] with f(lo) <= 0 <= f(hi).
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-12);

struct TriangleOptimum {
  double rho = 0.0;
  double s = 0.0;
  double value = 0.0;
};

struct TriangleSearchOptions {
  double grid_step = 1.0 / 64.0;
  double tolerance = 1e-8;
};

// Maximizes objective(rho, s) over 0 <= s <= rho <= 1. A grid pass (scanned
// in order of increasing s, then rho, replacing only on strict improvement)
// is followed by golden-section over rho around the best grid row with an
// inner golden-section over s in [0, rho]. Assumes concavity in s for fixed
// rho and unimodality of the profile in rho.
TriangleOptimum maximize_triangle(const std::function<double(double, double)>& objective,
                                  const TriangleSearchOptions& options = {});

// Nelder-Mead minimization over the probability simplex of dimension
// start.size(). Points are parameterized by their first k-1 coordinates;
// evaluations outside the simplex are projected back onto it.
struct SimplexOptimum {
  std::vector<double> point;
  double value = 0.0;
};

SimplexOptimum nelder_mead_simplex(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> start, double initial_step = 1.0 / 64.0,
                                   double tolerance = 1e-7, int max_iterations = 2000);

// Euclidean projection onto {v : v_i >= 0, sum v_i = 1}.
std::vector<double> project_to_simplex(std::vector<double> v);

// Supremum of a concave function of s over s >= 0, with detection of the
// unbounded case. The objective is sampled on a fine grid over [0, 2] and on
// s = 2, 4, ..., max_s; it is declared divergent when the last three
// per-unit-s increments all exceed 1e-9 and are non-decreasing (up to
// rounding). Otherwise golden-section refines around the best grid point.
// increment_slack is the tolerance of the non-decreasing test; values <= 0
// select 64 ulps of the objective at max_s.
struct SupOverS {
  double value = 0.0;
  double s = 0.0;
  bool diverged = false;
  double asymptotic_slope = 0.0;  // last per-unit increment on the coarse grid
};

SupOverS sup_over_s(const std::function<double(double)>& objective, double max_s = 256.0,
                    double tolerance = 1e-9, double increment_slack = 0.0);

}  // namespace swexp
