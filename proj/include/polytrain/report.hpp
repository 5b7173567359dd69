#pragma once

#include <string>
#include <vector>

#include "polytrain/config.hpp"
#include "polytrain/analysis.hpp"
#include "polytrain/session.hpp"

namespace polytrain {

struct NamedLog {
  std::string name;
  SessionLog log;
};

// Per-log testing segments, means, percent changes, ANOVA across segments
// and the post-hoc matrix, plus Pearson correlation of the Test-frame total
// score series for every pair of logs (resampled to a common length).
// Statistics that are undefined for a log are reported as {"error": ...}.
Json analysis_report(const std::vector<NamedLog>& logs,
                     PosthocMethod method = PosthocMethod::kWelchBonferroni);

}  // namespace polytrain
