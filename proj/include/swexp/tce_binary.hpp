#pragma once

// Type-class-enumeration exponent for a pair of correlated binary symmetric
// sources with crossover p. The bound reduces to minimizing over the
// normalized Hamming distance delta
//
//   L(R, s, delta) = s delta ln((1-p)/p) + s [R - h(delta)] + (1-s) [R - h(delta)]_+
//
// whose minimum L(R, s) has a closed form on seven regions A-G of the strip
// s >= 0, 0 <= R <= ln 2:
//
//   A: s <= 1, R > h(p_s)            D: s > 1, R > h(p)
//   B: s <= 1, h(p) < R <= h(p_s)    E: s > 1, R(s) < R <= h(p)
//   C: s <= 1, R <= h(p)             F: s > 1, h(p_s) < R <= R(s)
//                                    G: s > 1, R <= h(p_s)
//
// with p_s = p^s/(p^s + (1-p)^s) and R(s) = -ln[p^s + (1-p)^s]/(s-1).

#include "swexp/gallager_forney.hpp"

namespace swexp {

enum class Region { A, B, C, D, E, F, G };

char region_label(Region region);

// p_s; decreasing in s for p < 1/2, with p_0 = 1/2 and p_1 = p.
double tilted_crossover(double p, double s);

// R(s) for s > 1, the rate at which the minima at delta = p and
// delta = p_s of L(R, s, .) exchange order.
double exchange_rate(double p, double s);

struct PhasePoint {
  double s;
  double rate;
  Region region;
  double delta_star;
  double l_value;
};

double l_objective(double p, double rate, double s, double delta);

Region classify_region(double p, double rate, double s);

// Closed-form minimum of l_objective over delta in [0,1].
PhasePoint l_closed_form(double p, double rate, double s);

// E1'(R, T, s) assembled from the closed form:
//   L(R, s) + s ln(1/(1-p)) - ln[p^{1-s} + (1-p)^{1-s}] - s T.
double e1_prime_binary_at(double p, double rate, double threshold, double s);

// The explicit three-case form of the same quantity (C/F/G, B, A/D/E
// branches written without L). Kept separate so the two can be compared.
double e1_prime_binary_three_case(double p, double rate, double threshold, double s);

// sup over s >= 0 of E1'(R, T, s); value +inf with diverged set when the
// objective grows linearly in s.
ExponentResult e1_prime_binary(double p, double rate, double threshold);

// E2' = E1' + T. The E2 = E1 + T relation is established for the
// Gallager/Forney exponents; applying it to E1' is an extrapolation.
ExponentResult e2_prime_binary(double p, double rate, double threshold);

// Second-order expansions for weakly correlated sources, p = 1/2 - eps,
// R = ln 2 - 2 theta^2 eps^2, T = -tau eps^2.
struct VeryNoisyBounds {
  double e1_upper;        // (tau + 2) eps^2
  double e1_prime_lower;  // [tau (tau + 8)/16 - 1] eps^2
};

// Throws DomainError unless |eps| <= 0.05, tau > 4 and theta in [0,1].
VeryNoisyBounds very_noisy_bounds(double eps, double tau, double theta);

// gamma(t) = -ln[(1/2 - eps)^t + (1/2 + eps)^t] to second order in eps:
// (t - 1)(ln 2 - 2 t eps^2).
double very_noisy_gamma(double t, double eps);

// Maximizing rho for fixed s once the rho <= 1 constraint is dropped: s/theta.
double very_noisy_rho_star(double s, double theta);

}  // namespace swexp
