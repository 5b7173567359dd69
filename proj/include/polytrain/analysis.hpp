#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "polytrain/session.hpp"

namespace polytrain {

// Maximal contiguous run of Test-mode frames.
struct TestingSegment {
  int index = 0;
  double start = 0.0;  // t of the first frame
  double end = 0.0;    // t of the last frame + one frame period
  std::vector<double> totals;
  double mean = 0.0;

  std::size_t frames() const { return totals.size(); }
  double duration() const { return end - start; }
};

// Throws LogError(kMalformedLog) if frame times are not strictly increasing.
std::vector<TestingSegment> segment_tests(const SessionLog& log);

// (mean[i+1] - mean[i]) / mean[i] * 100. An element is nullopt where mean[i]
// is zero. Fewer than two means yields an empty list.
std::vector<std::optional<double>> percent_change(std::span<const double> means);

using Groups = std::vector<std::vector<double>>;

struct AnovaResult {
  double f = 0.0;  // +inf when all groups have zero within-group variance
  int df1 = 0;     // K - 1
  int df2 = 0;     // N - K
  double p = 1.0;

  bool f_infinite() const;
};

// Classic one-way ANOVA. Needs K >= 2 groups with >= 2 samples each.
// Throws Error(kDegenerateGroups) when every sample is identical.
AnovaResult anova_oneway(const Groups& groups);

enum class PosthocMethod { kWelchBonferroni };

// Symmetric K x K matrix of corrected p-values; the diagonal is 1.
class PairwiseTable {
 public:
  PairwiseTable() = default;
  explicit PairwiseTable(std::size_t k) : k_(k), p_(k * k, 1.0) {}

  std::size_t size() const { return k_; }
  double at(std::size_t i, std::size_t j) const { return p_[i * k_ + j]; }
  void set(std::size_t i, std::size_t j, double p) {
    p_[i * k_ + j] = p;
    p_[j * k_ + i] = p;
  }

 private:
  std::size_t k_ = 0;
  std::vector<double> p_;
};

PairwiseTable posthoc_pairwise(const Groups& groups,
                               PosthocMethod method = PosthocMethod::kWelchBonferroni);

// Welch two-sample t-test, two-sided p (uncorrected).
double welch_t_test(std::span<const double> a, std::span<const double> b);

// Product-moment correlation of equal-length series (>= 2 samples).
// Throws Error(kZeroVariance) if either series is constant.
double pearson(std::span<const double> a, std::span<const double> b);

// Linear interpolation onto `n` points spanning the same normalized time.
std::vector<double> resample_linear(std::span<const double> series, std::size_t n);

// Resamples both series to the longer length, then correlates.
double pearson_resampled(std::span<const double> a, std::span<const double> b);

}  // namespace polytrain
