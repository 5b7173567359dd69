#pragma once

// Independent reference implementations used only by the tests. None of these
// call into the library's own numerics.

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

struct Anova {
  double f;
  double df1;
  double df2;
  double p;
};

// Raw-sums ("computational formula") ANOVA in long double; p from Boost's F
// distribution. Samples are shifted by the first one so large offsets do not
// cancel catastrophically.
inline Anova naive_anova(const std::vector<std::vector<double>>& groups) {
  const long double origin = groups.front().front();
  long double sum = 0, sum_sq = 0, between_raw = 0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    long double gs = 0;
    for (double raw : g) {
      const long double x = raw - origin;
      gs += x;
      sum_sq += x * x;
    }
    sum += gs;
    n += g.size();
    between_raw += gs * gs / static_cast<long double>(g.size());
  }
  const long double correction = sum * sum / static_cast<long double>(n);
  const long double ss_between = between_raw - correction;
  const long double ss_total = sum_sq - correction;
  const long double ss_within = ss_total - ss_between;
  const double df1 = static_cast<double>(groups.size() - 1);
  const double df2 = static_cast<double>(n - groups.size());
  const double f = static_cast<double>((ss_between / df1) / (ss_within / df2));
  const boost::math::fisher_f_distribution<double> dist(df1, df2);
  const double p = f <= 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, f));
  return {f, df1, df2, p};
}

// P(F > f) by integrating the F density over (f, inf).
inline double f_tail_by_quadrature(double f, double d1, double d2) {
  const double log_norm = 0.5 * d1 * std::log(d1 / d2) -
                          (std::lgamma(0.5 * d1) + std::lgamma(0.5 * d2) - std::lgamma(0.5 * (d1 + d2)));
  auto density = [&](double x) {
    if (x <= 0) return 0.0;
    return std::exp(log_norm + (0.5 * d1 - 1.0) * std::log(x) - 0.5 * (d1 + d2) * std::log1p(d1 * x / d2));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(density, f, std::numeric_limits<double>::infinity(), 1e-13);
}

// Mean of the last `n` values of `xs` up to and including index i.
inline double window_mean(const std::vector<double>& xs, std::size_t i, std::size_t n) {
  const std::size_t first = i + 1 >= n ? i + 1 - n : 0;
  double s = 0;
  for (std::size_t k = first; k <= i; ++k) s += xs[k];
  return s / static_cast<double>(i + 1 - first);
}

inline double naive_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  long double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  const auto n = static_cast<long double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += static_cast<long double>(a[i]) * a[i];
    sbb += static_cast<long double>(b[i]) * b[i];
    sab += static_cast<long double>(a[i]) * b[i];
  }
  const long double cov = sab - sa * sb / n;
  return static_cast<double>(cov / std::sqrt((saa - sa * sa / n) * (sbb - sb * sb / n)));
}

// Mode trace checker. Works on the per-frame test/train flag only, plus the
// per-frame total scores, and re-derives what the adaptive schedule must have
// done: training runs are exactly `train` frames, test runs are split into
// `test`-frame blocks, and a completed block sends the session back to
// training iff its mean is below fraction * best (best seeded by `prior` or
// by the first block).
struct TraceFrame {
  bool testing;
  double total;
};

struct TraceVerdict {
  bool ok = true;
  std::string reason;
  int training_blocks = 0;
  int evaluations = 0;
};

inline TraceVerdict check_trace(const std::vector<TraceFrame>& frames, std::size_t train, std::size_t test,
                                std::size_t max_frames, double fraction, std::optional<double> prior) {
  TraceVerdict v;
  auto fail = [&](std::string why, std::size_t at) {
    v.ok = false;
    v.reason = why + " at frame " + std::to_string(at);
    return v;
  };
  if (frames.size() != max_frames) return fail("session length " + std::to_string(frames.size()), 0);

  std::optional<double> best = prior;
  std::size_t i = 0;
  bool expect_training = true;
  while (i < frames.size()) {
    if (expect_training) {
      ++v.training_blocks;
      for (std::size_t k = 0; k < train && i < frames.size(); ++k, ++i) {
        if (frames[i].testing) return fail("training block too short", i);
      }
      expect_training = false;
      continue;
    }
    // One testing block.
    double sum = 0;
    std::size_t k = 0;
    for (; k < test && i < frames.size(); ++k, ++i) {
      if (!frames[i].testing) return fail("testing block interrupted", i);
      sum += frames[i].total;
    }
    if (k < test) break;  // truncated by the session end
    ++v.evaluations;
    const double mean = sum / static_cast<double>(test);
    bool back = false;
    if (best) {
      back = mean < fraction * *best;
      best = std::max(*best, mean);
    } else {
      best = mean;
    }
    if (i == frames.size()) break;
    expect_training = back;
    if (!back && !frames[i].testing) return fail("left testing while above threshold", i);
    if (back && frames[i].testing) return fail("stayed in testing while below threshold", i);
  }
  return v;
}

}  // namespace oracle
