#include "polytrain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polytrain/error.hpp"
#include "polytrain/stats.hpp"

namespace polytrain {

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

void check_groups(const Groups& groups) {
  if (groups.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two groups");
  for (const auto& g : groups) {
    if (g.size() < 2) throw Error(ErrorCode::kInvalidArgument, "each group needs >= 2 samples");
  }
}

}  // namespace

std::vector<TestingSegment> segment_tests(const SessionLog& log) {
  std::vector<TestingSegment> segments;
  const double period = 1.0 / log.config.frame_rate;
  bool open = false;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const Frame& f = log.frames[i];
    if (i > 0 && !(f.t > log.frames[i - 1].t)) {
      throw LogError(ErrorCode::kMalformedLog, i + 1, "frame times are not strictly increasing");
    }
    if (f.mode != TrainingMode::kTest) {
      open = false;
      continue;
    }
    if (!open) {
      TestingSegment s;
      s.index = static_cast<int>(segments.size());
      s.start = f.t;
      segments.push_back(std::move(s));
      open = true;
    }
    segments.back().totals.push_back(f.scores.total);
    segments.back().end = f.t + period;
  }
  for (auto& s : segments) s.mean = mean_of(s.totals);
  return segments;
}

std::vector<std::optional<double>> percent_change(std::span<const double> means) {
  std::vector<std::optional<double>> out;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    if (means[i] == 0.0) {
      out.push_back(std::nullopt);
    } else {
      out.push_back((means[i + 1] - means[i]) / means[i] * 100.0);
    }
  }
  return out;
}

bool AnovaResult::f_infinite() const { return std::isinf(f); }

AnovaResult anova_oneway(const Groups& groups) {
  check_groups(groups);

  // F is shift invariant; centring on one sample keeps the sums small.
  const double origin = groups.front().front();
  std::size_t n = 0;
  double grand_sum = 0.0;
  std::vector<double> means;
  means.reserve(groups.size());
  for (const auto& g : groups) {
    double s = 0.0;
    for (double x : g) s += x - origin;
    means.push_back(s / static_cast<double>(g.size()));
    grand_sum += s;
    n += g.size();
  }
  const double grand = grand_sum / static_cast<double>(n);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const double m = means[k];
    ss_between += static_cast<double>(groups[k].size()) * (m - grand) * (m - grand);
    for (double x : groups[k]) {
      const double d = (x - origin) - m;
      ss_within += d * d;
    }
  }

  AnovaResult r;
  r.df1 = static_cast<int>(groups.size()) - 1;
  r.df2 = static_cast<int>(n - groups.size());
  if (ss_within == 0.0) {
    if (ss_between == 0.0) {
      throw Error(ErrorCode::kDegenerateGroups, "all samples are identical; F is undefined");
    }
    r.f = std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.f = (ss_between / r.df1) / (ss_within / r.df2);
  r.p = std::clamp(stats::f_survival(r.f, r.df1, r.df2), 0.0, 1.0);
  return r;
}

double welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "welch t-test needs >= 2 samples per group");
  }
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_variance(a, ma) / static_cast<double>(a.size());
  const double vb = sample_variance(b, mb) / static_cast<double>(b.size());
  const double se2 = va + vb;
  if (se2 == 0.0) return ma == mb ? 1.0 : 0.0;
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / static_cast<double>(a.size() - 1) +
                                 vb * vb / static_cast<double>(b.size() - 1));
  return std::clamp(stats::t_two_sided(t, df), 0.0, 1.0);
}

PairwiseTable posthoc_pairwise(const Groups& groups, PosthocMethod method) {
  check_groups(groups);
  const std::size_t k = groups.size();
  PairwiseTable table(k);
  switch (method) {
    case PosthocMethod::kWelchBonferroni: {
      const double comparisons = static_cast<double>(k * (k - 1) / 2);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          const double p = welch_t_test(groups[i], groups[j]);
          table.set(i, j, std::clamp(p * comparisons, 0.0, 1.0));
        }
      }
      break;
    }
  }
  return table;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "pearson needs equal lengths");
  if (a.size() < 2) throw Error(ErrorCode::kInvalidArgument, "pearson needs >= 2 samples");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(ErrorCode::kZeroVariance, "series has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> resample_linear(std::span<const double> series, std::size_t n) {
  if (series.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot resample an empty series");
  if (n == 0) return {};
  std::vector<double> out(n);
  if (series.size() == 1 || n == 1) {
    std::fill(out.begin(), out.end(), series.front());
    return out;
  }
  const double scale = static_cast<double>(series.size() - 1) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) * scale;
    const std::size_t lo = std::min(static_cast<std::size_t>(pos), series.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    out[i] = series[lo] + frac * (series[lo + 1] - series[lo]);
  }
  return out;
}

double pearson_resampled(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  const auto ra = a.size() == n ? std::vector<double>(a.begin(), a.end()) : resample_linear(a, n);
  const auto rb = b.size() == n ? std::vector<double>(b.begin(), b.end()) : resample_linear(b, n);
  return pearson(ra, rb);
}

}  // namespace polytrain
