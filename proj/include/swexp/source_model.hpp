#pragma once

// Memoryless joint sources P(x,y) over finite alphabets and the information
// measures used by the exponent computations. All quantities are in nats.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swexp/errors.hpp"

namespace swexp {

inline constexpr double kNormalizationTolerance = 1e-12;

// Probability vector over the Y alphabet (also used for X marginals).
class Distribution {
 public:
  Distribution() = default;
  // Throws InvalidInput unless entries are nonnegative and sum to 1.
  explicit Distribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

 private:
  std::vector<double> probs_;
};

using DistributionOverY = Distribution;

// Stochastic matrix W(x|y), stored column-wise: column(y) is a distribution
// over X.
class ConditionalXgivenY {
 public:
  ConditionalXgivenY() = default;
  ConditionalXgivenY(std::size_t size_x, std::size_t size_y, std::vector<double> by_column);

  std::size_t size_x() const { return size_x_; }
  std::size_t size_y() const { return size_y_; }
  double operator()(std::size_t x, std::size_t y) const { return data_[y * size_x_ + x]; }
  std::span<const double> column(std::size_t y) const {
    return std::span<const double>(data_).subspan(y * size_x_, size_x_);
  }

 private:
  std::size_t size_x_ = 0;
  std::size_t size_y_ = 0;
  std::vector<double> data_;
};

class JointSource {
 public:
  // pmf[x][y]. Rejects (never renormalizes) negative entries, a total off 1
  // by more than 1e-12, ragged rows, and all-zero rows or columns.
  JointSource(std::vector<std::string> alphabet_x, std::vector<std::string> alphabet_y,
              std::vector<std::vector<double>> pmf);
  // Labels default to "0", "1", ...
  explicit JointSource(const std::vector<std::vector<double>>& pmf);

  std::size_t size_x() const { return alphabet_x_.size(); }
  std::size_t size_y() const { return alphabet_y_.size(); }
  const std::vector<std::string>& alphabet_x() const { return alphabet_x_; }
  const std::vector<std::string>& alphabet_y() const { return alphabet_y_; }
  double operator()(std::size_t x, std::size_t y) const { return pmf_[x * size_y() + y]; }

  // Parses {"alphabet_x": [...], "alphabet_y": [...], "pmf": [[...], ...]}.
  static JointSource from_json(const std::string& text);
  std::string to_json() const;

 private:
  std::vector<std::string> alphabet_x_;
  std::vector<std::string> alphabet_y_;
  std::vector<double> pmf_;  // row-major, row = x
};

struct BinarySymmetricPair {
  double p;

  // Throws DomainError unless 0 < p <= 1/2.
  explicit BinarySymmetricPair(double crossover);
  JointSource joint() const;
};

Distribution marginal_x(const JointSource& src);
DistributionOverY marginal_y(const JointSource& src);
ConditionalXgivenY conditional_x_given_y(const JointSource& src);

double entropy(std::span<const double> probs);
double conditional_entropy(const JointSource& src);
// +inf when Q(i)=0 < P(i). Throws DomainError on size mismatch.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// h(delta) for delta in [0,1].
double binary_entropy(double delta);
// Inverse of h restricted to [0,1/2], for R in [0, ln 2].
double binary_entropy_inverse(double rate);
// D(a||b) between Bernoulli distributions.
double binary_divergence(double a, double b);

// ln sum_{i : p_i > 0} p_i^t, evaluated without overflow for large |t|.
double log_power_sum(std::span<const double> probs, double t);

// Treats 0^e as 0 for every exponent, so that terms from zero-probability
// symbols drop out continuously as e -> 0.
double pow_support(double base, double exponent);

}  // namespace swexp
