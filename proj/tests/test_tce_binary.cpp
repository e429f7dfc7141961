#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "swexp/errors.hpp"
#include "swexp/gallager_forney.hpp"
#include "swexp/source_model.hpp"
#include "swexp/tce_binary.hpp"

using namespace swexp;
using doctest::Approx;

namespace {
const double kLn2 = std::log(2.0);
}

TEST_CASE("l_objective examples") {
  const double p = 0.1, k = std::log(9.0);
  for (double d : {0.05, 0.2, 0.4}) {
    const double R = oracle::h(d);
    CHECK(l_objective(p, R, 1.7, d) == Approx(1.7 * d * k).epsilon(1e-13));
  }
  CHECK(l_objective(p, 0.5, 0.0, 0.05) == Approx(0.5 - oracle::h(0.05)).epsilon(1e-13));
  CHECK(l_objective(p, 0.2, 0.0, 0.3) == 0.0);
  // p = 0.1, R = 0.5, s = 2, delta = 0.2, by hand:
  // h(0.2) = 0.5004024235 > R, so the positive part vanishes:
  // 2*0.2*ln 9 + 2*(0.5 - h(0.2)).
  const double h02 = -0.2 * std::log(0.2) - 0.8 * std::log(0.8);
  CHECK(l_objective(p, 0.5, 2.0, 0.2) == Approx(0.4 * k + 2 * (0.5 - h02)).epsilon(1e-13));
  CHECK_THROWS_AS(l_objective(p, 0.5, 2.0, 1.2), DomainError);
  CHECK_THROWS_AS(l_objective(0.7, 0.5, 2.0, 0.2), DomainError);
  CHECK_THROWS_AS(l_objective(p, 0.8, 2.0, 0.2), DomainError);
}

TEST_CASE("degenerate p = 1/2") {
  for (double s : {0.0, 0.5, 1.0, 2.0, 7.0}) CHECK(std::fabs(l_closed_form(0.5, kLn2, s).l_value) <= 1e-12);
  for (double s : {1.5, 2.0, 10.0}) CHECK(exchange_rate(0.5, s) == Approx(kLn2).epsilon(1e-13));
}

TEST_CASE("closed form equals brute-force delta minimization") {
  for (double p : {0.05, 0.1, 0.25})
    for (int i = 0; i <= 16; ++i)
      for (int j = 0; j <= 16; ++j) {
        const double s = 4.0 * i / 16, R = kLn2 * j / 16;
        const auto pt = l_closed_form(p, R, s);
        CHECK(pt.l_value == Approx(oracle::l_brute(p, R, s)).epsilon(1e-6));
        CHECK(pt.l_value == Approx(l_objective(p, R, s, pt.delta_star)).epsilon(1e-10));
      }
}

TEST_CASE("classify_region") {
  CHECK(classify_region(0.1, kLn2, 0.5) == Region::A);
  for (double s : {0.0, 0.4, 1.0}) CHECK(classify_region(0.1, 0.2, s) == Region::C);
  const double p = 0.1, s = 2.0;
  const double hps = oracle::h(std::pow(p, s) / (std::pow(p, s) + std::pow(1 - p, s)));
  const double rs = -std::log(std::pow(p, s) + std::pow(1 - p, s)) / (s - 1);
  CHECK(hps < rs);
  CHECK(rs < oracle::h(p));
  CHECK(classify_region(p, 0.5 * (oracle::h(p) + kLn2), s) == Region::D);
  CHECK(classify_region(p, 0.5 * (rs + oracle::h(p)), s) == Region::E);
  CHECK(classify_region(p, 0.5 * (hps + rs), s) == Region::F);
  CHECK(classify_region(p, 0.5 * hps, s) == Region::G);
  CHECK(classify_region(p, 0.5 * (oracle::h(p) + oracle::h(std::pow(p, 0.5) / (std::pow(p, 0.5) + std::pow(1 - p, 0.5)))), 0.5) ==
        Region::B);
  // Closed sides as written: R = h(p) at s <= 1 belongs to C.
  CHECK(classify_region(p, binary_entropy(p), 0.5) == Region::C);
  CHECK(region_label(Region::E) == 'E');
}

TEST_CASE("tilted crossover") {
  CHECK(tilted_crossover(0.1, 0.0) == Approx(0.5));
  CHECK(tilted_crossover(0.1, 1.0) == Approx(0.1).epsilon(1e-14));
  for (double p : {0.05, 0.2, 0.4}) {
    double last = 1.0;
    for (int k = 0; k <= 100; ++k) {
      const double v = tilted_crossover(p, 0.1 * k);
      CHECK(v < last);
      CHECK(v == Approx(std::pow(p, 0.1 * k) / (std::pow(p, 0.1 * k) + std::pow(1 - p, 0.1 * k))).epsilon(1e-12));
      last = v;
    }
  }
}

TEST_CASE("local minimum structure in E and F") {
  const double p = 0.1;
  int checked = 0;
  for (double s : {1.5, 2.0, 3.0}) {
    const double ps = tilted_crossover(p, s);
    for (int j = 1; j < 200; ++j) {
      const double R = kLn2 * j / 200;
      const Region r = classify_region(p, R, s);
      if (r != Region::E && r != Region::F) continue;
      ++checked;
      const double e = 1e-6;
      for (double d : {p, ps}) {
        CHECK(l_objective(p, R, s, d - e) - l_objective(p, R, s, d) > 0);  // decreasing into d
        CHECK(l_objective(p, R, s, d + e) - l_objective(p, R, s, d) > 0);  // increasing out of d
      }
      const double at_p = l_objective(p, R, s, p), at_ps = l_objective(p, R, s, ps);
      if (r == Region::E) CHECK(at_ps <= at_p + 1e-12);
      if (r == Region::F) CHECK(at_p <= at_ps + 1e-12);
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("continuity across boundaries") {
  for (double p : {0.05, 0.1, 0.25}) {
    for (int k = 1; k < 10; ++k) {
      const double s_lo = k / 10.0, s_hi = 1.0 + 0.3 * k;
      const double e = 1e-12;
      auto gap = [&](double R, double s) {
        return std::fabs(l_closed_form(p, R + e, s).l_value - l_closed_form(p, R - e, s).l_value);
      };
      CHECK(gap(binary_entropy(p), s_lo) <= 1e-9);
      CHECK(gap(binary_entropy(p), s_hi) <= 1e-9);
      CHECK(gap(exchange_rate(p, s_hi), s_hi) <= 1e-9);
      CHECK(gap(binary_entropy(tilted_crossover(p, s_hi)), s_hi) <= 1e-9);
      const double r_top = binary_entropy(tilted_crossover(p, s_lo));
      if (r_top < kLn2 - 1e-9) CHECK(gap(r_top, s_lo) <= 1e-9);
      const double R = kLn2 * k / 10;
      CHECK(std::fabs(l_closed_form(p, R, 1 + e).l_value - l_closed_form(p, R, 1 - e).l_value) <= 1e-9);
    }
  }
}

TEST_CASE("three-case form equals the L-based assembly") {
  for (double p : {0.05, 0.1, 0.3})
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const double s = 4.0 * i / 40, R = kLn2 * j / 40;
        for (double T : {-0.5, 0.0, 0.2}) {
          const double a = e1_prime_binary_at(p, R, T, s);
          CHECK(a == Approx(e1_prime_binary_three_case(p, R, T, s)).epsilon(1e-10));
          CHECK(a == Approx(oracle::e1_prime_s(p, R, T, s)).epsilon(1e-9));
        }
      }
}

TEST_CASE("e1_prime_binary") {
  const auto div = e1_prime_binary(0.1, 0.5, std::log(1.0 / 9) - 0.1);
  CHECK(div.diverged);
  CHECK(std::isinf(div.value));

  const auto src = BinarySymmetricPair(0.1).joint();
  const double R = oracle::h(0.1) + 0.02;
  const double gf = e1(src, R, 0.0).value;
  CHECK(gf >= 0.0);
  CHECK(e1_prime_binary(0.1, R, 0.0).value >= gf - 1e-9);

  // Dense s grid oracle for the finite case.
  double best = -1e9;
  for (int i = 0; i <= 100000; ++i) best = std::max(best, oracle::e1_prime_s(0.1, 0.5, 0.0, 10.0 * i / 100000));
  const auto fin = e1_prime_binary(0.1, 0.5, 0.0);
  CHECK_FALSE(fin.diverged);
  CHECK(fin.value == Approx(best).epsilon(1e-7));
  CHECK(fin.value >= best - 1e-9);
  CHECK(e2_prime_binary(0.1, 0.5, -0.1).value == Approx(e1_prime_binary(0.1, 0.5, -0.1).value - 0.1));
}

TEST_CASE("dominance over the Gallager/Forney exponent") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> up(0.02, 0.5), ur(0.0, kLn2), ut(-1.0, 0.3);
  for (int i = 0; i < 60; ++i) {
    const double p = up(rng), R = ur(rng), T = ut(rng);
    const auto a = e1_prime_binary(p, R, T);
    const auto b = e1(BinarySymmetricPair(p).joint(), R, T);
    CHECK(a.value >= b.value - 1e-6);
  }
}

TEST_CASE("very noisy bounds") {
  const auto b = very_noisy_bounds(0.01, 8.0, 1.0);
  CHECK(b.e1_upper == Approx(1e-3).epsilon(1e-12));
  CHECK(b.e1_prime_lower == Approx(7e-4).epsilon(1e-12));
  const auto near4 = very_noisy_bounds(0.01, 4.0 + 1e-9, 1.0);
  CHECK(near4.e1_prime_lower == Approx(2e-4).epsilon(1e-6));
  CHECK(near4.e1_upper == Approx(6e-4).epsilon(1e-6));
  const auto big = very_noisy_bounds(0.01, 100.0, 0.5);
  CHECK(big.e1_prime_lower / big.e1_upper == Approx(674.0 / 102.0).epsilon(1e-12));
  CHECK_THROWS_AS(very_noisy_bounds(0.01, 4.0, 1.0), DomainError);
  CHECK_THROWS_AS(very_noisy_bounds(0.1, 8.0, 1.0), DomainError);
  CHECK_THROWS_AS(very_noisy_bounds(0.01, 8.0, 1.5), DomainError);

  // gamma(t) against the exact expression; the truncation error is O(t^4 eps^4).
  const double eps = 0.005;
  for (double t : {0.5, 1.5, 3.0}) {
    const double exact = -std::log(std::pow(0.5 - eps, t) + std::pow(0.5 + eps, t));
    CHECK(std::fabs(very_noisy_gamma(t, eps) - exact) <= 10 * std::pow(std::max(1.0, t) * eps, 4));
  }
  CHECK(very_noisy_rho_star(0.4, 0.5) == Approx(0.8));
}
