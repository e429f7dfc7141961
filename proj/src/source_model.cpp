#include "swexp/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace swexp {
namespace {

void check_probability_vector(std::span<const double> probs, const char* what) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      std::ostringstream msg;
      msg << what << ": entry " << i << " = " << probs[i] << " is not a probability";
      throw InvalidInput(msg.str());
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": entries sum to " << total << ", not 1";
    throw InvalidInput(msg.str());
  }
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

// ln 2 - h(1/2 - x), accurate near x = 0 where h is flat.
double entropy_deficit(double x) {
  const double a = 2.0 * x;
  double value = 0.5 * (1.0 + a) * std::log1p(a);
  if (a < 1.0) value += 0.5 * (1.0 - a) * std::log1p(-a);
  return value;
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("distribution: empty");
  check_probability_vector(probs_, "distribution");
}

ConditionalXgivenY::ConditionalXgivenY(std::size_t size_x, std::size_t size_y,
                                       std::vector<double> by_column)
    : size_x_(size_x), size_y_(size_y), data_(std::move(by_column)) {
  if (data_.size() != size_x_ * size_y_) throw InvalidInput("conditional: shape mismatch");
  for (std::size_t y = 0; y < size_y_; ++y) check_probability_vector(column(y), "conditional column");
}

JointSource::JointSource(std::vector<std::string> alphabet_x, std::vector<std::string> alphabet_y,
                         std::vector<std::vector<double>> pmf)
    : alphabet_x_(std::move(alphabet_x)), alphabet_y_(std::move(alphabet_y)) {
  if (alphabet_x_.empty() || alphabet_y_.empty()) throw InvalidInput("source: empty alphabet");
  if (pmf.size() != alphabet_x_.size()) {
    std::ostringstream msg;
    msg << "source: pmf has " << pmf.size() << " rows but alphabet_x has " << alphabet_x_.size()
        << " symbols";
    throw InvalidInput(msg.str());
  }
  pmf_.reserve(size_x() * size_y());
  double total = 0.0;
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    if (pmf[x].size() != size_y()) {
      std::ostringstream msg;
      msg << "source: pmf row " << x << " has " << pmf[x].size() << " entries, expected "
          << size_y();
      throw InvalidInput(msg.str());
    }
    for (std::size_t y = 0; y < size_y(); ++y) {
      const double v = pmf[x][y];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "source: pmf[" << x << "][" << y << "] = " << v << " is not a probability";
        throw InvalidInput(msg.str());
      }
      total += v;
      pmf_.push_back(v);
    }
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "source: pmf sums to " << total << ", not 1";
    throw InvalidInput(msg.str());
  }
  for (std::size_t x = 0; x < size_x(); ++x) {
    double row = 0.0;
    for (std::size_t y = 0; y < size_y(); ++y) row += (*this)(x, y);
    if (row == 0.0) throw InvalidInput("source: symbol x=" + alphabet_x_[x] + " has zero probability");
  }
  for (std::size_t y = 0; y < size_y(); ++y) {
    double col = 0.0;
    for (std::size_t x = 0; x < size_x(); ++x) col += (*this)(x, y);
    if (col == 0.0) throw InvalidInput("source: symbol y=" + alphabet_y_[y] + " has zero probability");
  }
}

JointSource::JointSource(const std::vector<std::vector<double>>& pmf)
    : JointSource(default_labels(pmf.size()), default_labels(pmf.empty() ? 0 : pmf.front().size()),
                  pmf) {}

JointSource JointSource::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("source spec: ") + e.what());
  }
  for (const char* key : {"alphabet_x", "alphabet_y", "pmf"}) {
    if (!doc.contains(key)) throw InvalidInput(std::string("source spec: missing key '") + key + "'");
  }
  try {
    return JointSource(doc.at("alphabet_x").get<std::vector<std::string>>(),
                       doc.at("alphabet_y").get<std::vector<std::string>>(),
                       doc.at("pmf").get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("source spec: ") + e.what());
  }
}

std::string JointSource::to_json() const {
  std::vector<std::vector<double>> rows(size_x(), std::vector<double>(size_y()));
  for (std::size_t x = 0; x < size_x(); ++x)
    for (std::size_t y = 0; y < size_y(); ++y) rows[x][y] = (*this)(x, y);
  nlohmann::json doc{{"alphabet_x", alphabet_x_}, {"alphabet_y", alphabet_y_}, {"pmf", rows}};
  return doc.dump();
}

BinarySymmetricPair::BinarySymmetricPair(double crossover) : p(crossover) {
  if (!(p > 0.0 && p <= 0.5)) throw DomainError("crossover probability must lie in (0, 1/2]");
}

JointSource BinarySymmetricPair::joint() const {
  return JointSource({{(1.0 - p) / 2.0, p / 2.0}, {p / 2.0, (1.0 - p) / 2.0}});
}

Distribution marginal_x(const JointSource& src) {
  std::vector<double> px(src.size_x(), 0.0);
  for (std::size_t x = 0; x < src.size_x(); ++x)
    for (std::size_t y = 0; y < src.size_y(); ++y) px[x] += src(x, y);
  return Distribution(std::move(px));
}

DistributionOverY marginal_y(const JointSource& src) {
  std::vector<double> py(src.size_y(), 0.0);
  for (std::size_t x = 0; x < src.size_x(); ++x)
    for (std::size_t y = 0; y < src.size_y(); ++y) py[y] += src(x, y);
  return Distribution(std::move(py));
}

ConditionalXgivenY conditional_x_given_y(const JointSource& src) {
  const auto py = marginal_y(src);
  std::vector<double> data(src.size_x() * src.size_y());
  for (std::size_t y = 0; y < src.size_y(); ++y) {
    if (py[y] <= 0.0) throw ZeroMarginal("P(y) = 0 for y=" + src.alphabet_y()[y]);
    for (std::size_t x = 0; x < src.size_x(); ++x) data[y * src.size_x() + x] = src(x, y) / py[y];
  }
  return ConditionalXgivenY(src.size_x(), src.size_y(), std::move(data));
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double v : probs)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

double conditional_entropy(const JointSource& src) {
  const auto py = marginal_y(src);
  const auto cond = conditional_x_given_y(src);
  double h = 0.0;
  for (std::size_t y = 0; y < src.size_y(); ++y) h += py[y] * entropy(cond.column(y));
  return h;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("kl_divergence: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d < 0.0 ? 0.0 : d;
}

double binary_entropy(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("binary_entropy: argument outside [0,1]");
  const double values[2] = {delta, 1.0 - delta};
  return entropy(values);
}

double binary_entropy_inverse(double rate) {
  constexpr double kLn2 = std::numbers::ln2;
  if (!(rate >= 0.0 && rate <= kLn2 + 1e-15))
    throw DomainError("binary_entropy_inverse: argument outside [0, ln 2]");
  const double deficit = kLn2 - rate;
  if (deficit <= 0.0) return 0.5;
  if (rate == 0.0) return 0.0;
  // Bisection on x = 1/2 - delta; the deficit is increasing in x.
  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (entropy_deficit(mid) < deficit)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 - 0.5 * (lo + hi);
}

double binary_divergence(double a, double b) {
  const double p[2] = {a, 1.0 - a};
  const double q[2] = {b, 1.0 - b};
  return kl_divergence(p, q);
}

double log_power_sum(std::span<const double> probs, double t) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : probs)
    if (v > 0.0) peak = std::max(peak, t * std::log(v));
  double total = 0.0;
  for (double v : probs)
    if (v > 0.0) total += std::exp(t * std::log(v) - peak);
  return peak + std::log(total);
}

double pow_support(double base, double exponent) {
  return base > 0.0 ? std::pow(base, exponent) : 0.0;
}

}  // namespace swexp
