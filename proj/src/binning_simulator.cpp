#include "swexp/binning_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "swexp/errors.hpp"

namespace swexp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
__extension__ typedef unsigned __int128 Wide;

constexpr std::uint64_t kMaxEnumeratedMaps = std::uint64_t{1} << 20;
constexpr int kMaxIndependentMembers = 20;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 stream; one per trial, keyed by (master seed, trial index).
class TrialRng {
 public:
  TrialRng(std::uint64_t master_seed, std::uint64_t trial)
      : state_(mix64(master_seed ^ mix64(trial + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<Wide>(next()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Per-configuration tables: log P(a,b), the sampling CDF, and letter rates.
class Model {
 public:
  explicit Model(const SimConfig& cfg)
      : n_(cfg.n),
        size_x_(cfg.source.size_x()),
        size_y_(cfg.source.size_y()),
        sequences_(cfg.sequence_count()),
        n_threshold_(cfg.n * cfg.threshold),
        fixed_bins_(cfg.bin_count()) {
    for (std::size_t a = 0; a < size_x_; ++a) {
      for (std::size_t b = 0; b < size_y_; ++b) {
        const double p = cfg.source(a, b);
        log_p_.push_back(p > 0.0 ? std::log(p) : kNegInf);
        cdf_.push_back((cdf_.empty() ? 0.0 : cdf_.back()) + p);
      }
    }
    if (cfg.letter_rates) letter_rates_ = *cfg.letter_rates;
  }

  bool variable() const { return !letter_rates_.empty(); }
  std::uint64_t sequences() const { return sequences_; }
  std::uint64_t fixed_bins() const { return fixed_bins_; }
  double n_threshold() const { return n_threshold_; }

  std::vector<std::uint32_t> digits(std::uint64_t index, std::size_t base) const {
    std::vector<std::uint32_t> d(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      d[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(index % base);
      index /= base;
    }
    return d;
  }

  // ln P(x', y) from the joint type, summed in a fixed cell order so that
  // sequences of equal type get bit-identical values.
  double log_joint(std::uint64_t x_index, const std::vector<std::uint32_t>& y) const {
    std::vector<int> counts(size_x_ * size_y_, 0);
    for (int i = 0; i < n_; ++i) {
      const auto a = x_index % size_x_;
      x_index /= size_x_;
      ++counts[a * size_y_ + y[static_cast<std::size_t>(i)]];
    }
    double total = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      if (log_p_[c] == kNegInf) return kNegInf;
      total += counts[c] * log_p_[c];
    }
    return total;
  }

  // Bin range of a sequence: fixed M, or round(exp(sum_i r(x_i))) >= 1.
  std::uint64_t bins_of(std::uint64_t x_index) const {
    if (!variable()) return fixed_bins_;
    std::vector<int> counts(size_x_, 0);
    for (int i = 0; i < n_; ++i) {
      ++counts[x_index % size_x_];
      x_index /= size_x_;
    }
    double exponent = 0.0;
    for (std::size_t a = 0; a < size_x_; ++a) exponent += counts[a] * letter_rates_[a];
    const double bins = std::round(std::exp(exponent));
    if (!(bins < 0x1.0p62)) throw ResourceError("variable-rate bin range exceeds 2^62");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(bins));
  }

  void sample_pair(TrialRng& rng, std::uint64_t& x_index, std::uint64_t& y_index,
                   std::vector<std::uint32_t>& y_digits) const {
    x_index = 0;
    y_index = 0;
    y_digits.assign(static_cast<std::size_t>(n_), 0);
    std::uint64_t x_scale = 1;
    std::uint64_t y_scale = 1;
    for (int i = 0; i < n_; ++i) {
      const double u = rng.uniform() * cdf_.back();
      auto cell = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
      // Never land on a zero-probability cell.
      while (cell >= cdf_.size() || log_p_[cell] == kNegInf) cell = cell == 0 ? 0 : cell - 1;
      const std::size_t a = cell / size_y_;
      const std::size_t b = cell % size_y_;
      x_index += a * x_scale;
      y_index += b * y_scale;
      y_digits[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(b);
      x_scale *= size_x_;
      y_scale *= size_y_;
    }
  }

  std::size_t size_x() const { return size_x_; }
  std::size_t size_y() const { return size_y_; }

 private:
  int n_;
  std::size_t size_x_;
  std::size_t size_y_;
  std::uint64_t sequences_;
  double n_threshold_;
  std::uint64_t fixed_bins_;
  std::vector<double> log_p_;
  std::vector<double> cdf_;
  std::vector<double> letter_rates_;
};

// One trial: draw (x, y), then the other members of x's bin. Every x' != x
// joins independently with probability Pr{f(x') = f(x)}; the membership
// pattern is drawn by geometric skipping over sequence indices, with
// thinning in variable-rate mode.
TrialRecord simulate_trial(const Model& model, std::uint64_t master_seed, std::uint64_t trial,
                           std::vector<double>& log_probs) {
  TrialRng rng(master_seed, trial);
  TrialRecord rec;
  rec.trial = trial;
  std::vector<std::uint32_t> y_digits;
  model.sample_pair(rng, rec.x, rec.y, y_digits);

  rec.bin.assign(1, rec.x);
  log_probs.assign(1, model.log_joint(rec.x, y_digits));

  double q_bound;
  std::uint64_t z = 0;
  if (model.variable()) {
    z = rng.below(model.bins_of(rec.x));
    q_bound = 1.0 / static_cast<double>(z + 1);
  } else {
    q_bound = 1.0 / static_cast<double>(model.fixed_bins());
  }

  auto offer = [&](std::uint64_t index) {
    if (index == rec.x) return;
    if (model.variable()) {
      const std::uint64_t bins = model.bins_of(index);
      if (bins <= z) return;
      if (!(rng.uniform() < static_cast<double>(z + 1) / static_cast<double>(bins))) return;
    }
    rec.bin.push_back(index);
    log_probs.push_back(model.log_joint(index, y_digits));
  };

  const std::uint64_t total = model.sequences();
  if (q_bound >= 1.0) {
    for (std::uint64_t index = 0; index < total; ++index) offer(index);
  } else {
    const double log_miss = std::log1p(-q_bound);
    std::uint64_t next = 0;
    while (true) {
      const double skip = std::floor(std::log1p(-rng.uniform()) / log_miss);
      if (!(skip < static_cast<double>(total - next))) break;
      next += static_cast<std::uint64_t>(skip);
      offer(next);
      ++next;
      if (next >= total) break;
    }
  }

  const auto outcome = decode_bin(log_probs, 0, model.n_threshold());
  rec.e1 = !outcome.truth_is_candidate;
  rec.candidates = outcome.candidates;
  return rec;
}

void tally(TrialBatch& batch, const DecodeOutcome& outcome) {
  if (outcome.candidates == 0)
    ++batch.erasure;
  else if (outcome.candidates == 1)
    ++(outcome.truth_is_candidate ? batch.correct_unique : batch.incorrect_unique);
  else
    ++batch.list_output;
  if (!outcome.truth_is_candidate) ++batch.e1_count;
  if (outcome.incorrect_candidates > 0) ++batch.e2_count;
  batch.incorrect_candidate_sum += outcome.incorrect_candidates;
  batch.list_size_sum += outcome.candidates;
  batch.max_list_size = std::max(batch.max_list_size, outcome.candidates);
  ++batch.incorrect_histogram[outcome.incorrect_candidates];
}

struct Accumulator {
  ExactProbabilities sum;
  void add(const DecodeOutcome& o, double weight) {
    if (o.candidates == 0)
      sum.erasure += weight;
    else if (o.candidates == 1)
      (o.truth_is_candidate ? sum.correct_unique : sum.incorrect_unique) += weight;
    else
      sum.list_output += weight;
    if (!o.truth_is_candidate) sum.e1 += weight;
    if (o.incorrect_candidates > 0) sum.e2 += weight;
    sum.mean_list_size += weight * o.candidates;
    sum.mean_incorrect += weight * o.incorrect_candidates;
  }
};

std::uint64_t y_sequence_count(const SimConfig& cfg) {
  std::uint64_t count = 1;
  for (int i = 0; i < cfg.n; ++i) {
    count *= cfg.source.size_y();
    if (count > kMaxSequences) throw ResourceError("|Y|^n exceeds the enumeration cap");
  }
  return count;
}

}  // namespace

std::uint64_t SimConfig::bin_count() const {
  const double bins = std::round(std::exp(n * rate));
  if (!(bins < 0x1.0p62)) throw ResourceError("bin count exceeds 2^62");
  return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(bins));
}

double SimConfig::actual_rate() const {
  return std::log(static_cast<double>(bin_count())) / n;
}

std::uint64_t SimConfig::sequence_count() const {
  std::uint64_t count = 1;
  for (int i = 0; i < n; ++i) {
    count *= source.size_x();
    if (count > kMaxSequences) throw ResourceError("|X|^n exceeds the 2^24 enumeration cap");
  }
  return count;
}

void SimConfig::validate() const {
  if (n < 1) throw DomainError("block length must be at least 1");
  if (!(rate >= 0.0) && !letter_rates) throw DomainError("rate must be nonnegative");
  if (!std::isfinite(threshold)) throw DomainError("threshold must be finite");
  if (letter_rates) {
    if (letter_rates->size() != source.size_x()) throw DomainError("one letter rate per X symbol required");
    for (double r : *letter_rates)
      if (!(r >= 0.0)) throw DomainError("letter rates must be nonnegative");
  }
  sequence_count();
  bin_count();
}

double TrialBatch::mean_list_size() const {
  return trials == 0 ? 0.0 : static_cast<double>(list_size_sum) / static_cast<double>(trials);
}

void TrialBatch::merge(const TrialBatch& other) {
  trials += other.trials;
  correct_unique += other.correct_unique;
  incorrect_unique += other.incorrect_unique;
  erasure += other.erasure;
  list_output += other.list_output;
  e1_count += other.e1_count;
  e2_count += other.e2_count;
  incorrect_candidate_sum += other.incorrect_candidate_sum;
  list_size_sum += other.list_size_sum;
  max_list_size = std::max(max_list_size, other.max_list_size);
  for (const auto& [k, v] : other.incorrect_histogram) incorrect_histogram[k] += v;
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
  std::sort(samples.begin(), samples.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.trial < b.trial; });
}

DecodeOutcome decode_bin(std::span<const double> log_probs, std::size_t truth, double n_threshold) {
  const std::size_t k = log_probs.size();
  const double peak = *std::max_element(log_probs.begin(), log_probs.end());
  std::vector<double> weights(k);
  for (std::size_t i = 0; i < k; ++i) weights[i] = std::exp(log_probs[i] - peak);
  // Sums excluding one member, from prefix and suffix sums (no cancellation).
  std::vector<double> prefix(k + 1, 0.0);
  std::vector<double> suffix(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + weights[i];
  for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] + weights[i];

  DecodeOutcome out;
  for (std::size_t i = 0; i < k; ++i) {
    if (log_probs[i] == kNegInf) continue;
    const double others = prefix[i] + suffix[i + 1];
    const bool candidate = others == 0.0 || (log_probs[i] - peak) - std::log(others) > n_threshold;
    if (!candidate) continue;
    ++out.candidates;
    if (i == truth)
      out.truth_is_candidate = true;
    else
      ++out.incorrect_candidates;
  }
  return out;
}

TrialBatch run_trials(const SimConfig& cfg) {
  cfg.validate();
  const Model model(cfg);
  const unsigned workers = std::max(1u, cfg.workers);

  std::vector<TrialBatch> partial(workers);
  auto work = [&](unsigned w) {
    TrialBatch& batch = partial[w];
    const std::uint64_t begin = cfg.trials * w / workers;
    const std::uint64_t end = cfg.trials * (w + 1) / workers;
    std::vector<double> log_probs;
    for (std::uint64_t t = begin; t < end; ++t) {
      auto rec = simulate_trial(model, cfg.master_seed, t, log_probs);
      const auto outcome = decode_bin(log_probs, 0, model.n_threshold());
      tally(batch, outcome);
      if (cfg.sample_stride > 0 && t % cfg.sample_stride == 0) batch.samples.push_back(std::move(rec));
    }
    batch.trials = end - begin;
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  TrialBatch out;
  out.seed = cfg.master_seed;
  for (const auto& batch : partial) out.merge(batch);
  return out;
}

TrialRecord replay_trial(const SimConfig& cfg, std::uint64_t trial) {
  cfg.validate();
  const Model model(cfg);
  std::vector<double> log_probs;
  return simulate_trial(model, cfg.master_seed, trial, log_probs);
}

ExactProbabilities exact_by_enumeration(const SimConfig& cfg) {
  cfg.validate();
  const Model model(cfg);
  const std::uint64_t sequences = model.sequences();
  const std::uint64_t y_count = y_sequence_count(cfg);
  std::vector<std::uint64_t> ranges(sequences);
  double log_maps = 0.0;
  for (std::uint64_t i = 0; i < sequences; ++i) {
    ranges[i] = model.bins_of(i);
    log_maps += std::log(static_cast<double>(ranges[i]));
  }
  if (log_maps > std::log(static_cast<double>(kMaxEnumeratedMaps)) + 1e-9)
    throw ResourceError("too many binning maps to enumerate");
  std::uint64_t maps = 1;
  for (auto r : ranges) maps *= r;

  std::vector<std::vector<double>> log_joint(y_count, std::vector<double>(sequences));
  for (std::uint64_t yi = 0; yi < y_count; ++yi) {
    const auto y = model.digits(yi, model.size_y());
    for (std::uint64_t xi = 0; xi < sequences; ++xi) log_joint[yi][xi] = model.log_joint(xi, y);
  }

  Accumulator acc;
  std::vector<std::uint64_t> f(sequences, 0);
  std::vector<double> bin_logs;
  for (std::uint64_t m = 0; m < maps; ++m) {
    for (std::uint64_t yi = 0; yi < y_count; ++yi) {
      for (std::uint64_t xi = 0; xi < sequences; ++xi) {
        if (log_joint[yi][xi] == kNegInf) continue;
        bin_logs.assign(1, log_joint[yi][xi]);
        for (std::uint64_t other = 0; other < sequences; ++other)
          if (other != xi && f[other] == f[xi]) bin_logs.push_back(log_joint[yi][other]);
        acc.add(decode_bin(bin_logs, 0, model.n_threshold()),
                std::exp(log_joint[yi][xi]) / static_cast<double>(maps));
      }
    }
    for (std::uint64_t i = 0; i < sequences; ++i) {
      if (++f[i] < ranges[i]) break;
      f[i] = 0;
    }
  }
  return acc.sum;
}

ExactProbabilities exact_by_independence(const SimConfig& cfg) {
  cfg.validate();
  const Model model(cfg);
  const std::uint64_t sequences = model.sequences();
  const std::uint64_t y_count = y_sequence_count(cfg);
  std::vector<std::uint64_t> ranges(sequences);
  for (std::uint64_t i = 0; i < sequences; ++i) ranges[i] = model.bins_of(i);

  Accumulator acc;
  std::vector<double> bin_logs;
  for (std::uint64_t yi = 0; yi < y_count; ++yi) {
    const auto y = model.digits(yi, model.size_y());
    std::vector<double> log_joint(sequences);
    for (std::uint64_t xi = 0; xi < sequences; ++xi) log_joint[xi] = model.log_joint(xi, y);

    for (std::uint64_t xi = 0; xi < sequences; ++xi) {
      if (log_joint[xi] == kNegInf) continue;
      const double weight = std::exp(log_joint[xi]);
      // The bin index z of x is uniform on [0, M(x)); the membership law of
      // the others only changes where z crosses some M(x').
      std::vector<std::uint64_t> cuts{0, ranges[xi]};
      for (auto r : ranges)
        if (r < ranges[xi]) cuts.push_back(r);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const std::uint64_t z = cuts[c];
        const double z_weight =
            static_cast<double>(cuts[c + 1] - cuts[c]) / static_cast<double>(ranges[xi]);
        std::vector<std::uint64_t> others;
        for (std::uint64_t o = 0; o < sequences; ++o)
          if (o != xi && ranges[o] > z) others.push_back(o);
        if (others.size() > static_cast<std::size_t>(kMaxIndependentMembers))
          throw ResourceError("too many membership patterns for exact evaluation");
        const std::uint64_t patterns = std::uint64_t{1} << others.size();
        for (std::uint64_t mask = 0; mask < patterns; ++mask) {
          double prob = 1.0;
          bin_logs.assign(1, log_joint[xi]);
          for (std::size_t j = 0; j < others.size(); ++j) {
            const double q = 1.0 / static_cast<double>(ranges[others[j]]);
            if (mask >> j & 1U) {
              prob *= q;
              bin_logs.push_back(log_joint[others[j]]);
            } else {
              prob *= 1.0 - q;
            }
          }
          acc.add(decode_bin(bin_logs, 0, model.n_threshold()), weight * z_weight * prob);
        }
      }
    }
  }
  return acc.sum;
}

ExactProbabilities exact_oracle(const SimConfig& cfg) {
  cfg.validate();
  const Model model(cfg);
  double log_maps = 0.0;
  for (std::uint64_t i = 0; i < model.sequences(); ++i)
    log_maps += std::log(static_cast<double>(model.bins_of(i)));
  if (log_maps <= std::log(static_cast<double>(kMaxEnumeratedMaps)) + 1e-9)
    return exact_by_enumeration(cfg);
  return exact_by_independence(cfg);
}

namespace {

double student_t_975(std::size_t dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086};
  if (dof == 0) return std::numeric_limits<double>::infinity();
  return dof <= 20 ? table[dof - 1] : 1.96;
}

}  // namespace

ExponentFit empirical_exponent(std::span<const RatePoint> points) {
  if (points.size() < 3) throw DomainError("empirical_exponent: at least 3 block lengths required");
  double bound = 0.0;
  bool degenerate = false;
  for (const auto& p : points) {
    if (!(p.rate >= 0.0 && p.rate <= 1.0) || p.n <= 0)
      throw DomainError("empirical_exponent: rates must lie in [0,1] and n be positive");
    if (p.rate == 0.0) {
      degenerate = true;
      // Rule of three: rate < 3/trials at about 95% confidence.
      if (p.trials > 0) bound = std::max(bound, std::log(static_cast<double>(p.trials) / 3.0) / p.n);
    }
  }
  if (degenerate)
    throw DegenerateData("empirical_exponent: a rate is zero; only a one-sided bound is available", bound);

  const bool weighted = std::all_of(points.begin(), points.end(), [](const RatePoint& p) {
    return p.trials > 0 && p.rate < 1.0;
  });
  double sw = 0.0, sx = 0.0, sy = 0.0;
  std::vector<double> w(points.size()), x(points.size()), y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    x[i] = points[i].n;
    y[i] = -std::log(points[i].rate);
    // Delta method: Var[ln rate_hat] = (1 - rate)/(rate trials).
    w[i] = weighted ? points[i].rate * static_cast<double>(points[i].trials) / (1.0 - points[i].rate) : 1.0;
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("empirical_exponent: block lengths must differ");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    chi2 += w[i] * r * r;
  }
  const std::size_t dof = points.size() - 2;
  const double reduced = chi2 / static_cast<double>(dof);
  if (weighted) {
    fit.std_error = std::sqrt(std::max(1.0, reduced) / sxx);
    fit.ci = 1.96 * fit.std_error;
  } else {
    fit.std_error = std::sqrt(reduced / sxx);
    fit.ci = student_t_975(dof) * fit.std_error;
  }
  return fit;
}

}  // namespace swexp
