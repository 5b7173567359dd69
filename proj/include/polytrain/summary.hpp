#pragma once

#include <optional>
#include <vector>

#include "polytrain/analysis.hpp"
#include "polytrain/config.hpp"
#include "polytrain/session.hpp"

namespace polytrain {

struct ScorePoint {
  double t = 0.0;
  TrainingMode mode = TrainingMode::kAdaptive;
  double position = 0.0;
  double velocity = 0.0;
  double total = 0.0;
  double current = 0.0;
};

struct SessionSummary {
  std::vector<ScorePoint> series;
  std::vector<TestingSegment> segments;
  // Mean total score over every Test frame; unset when there were none.
  std::optional<double> total_score;
  std::size_t test_frames = 0;
  int training_blocks = 0;
  int evaluated_blocks = 0;
  std::optional<double> best_block_score;
  double duration = 0.0;
};

// Throws Error(kEmptyLog) for a log without frames.
SessionSummary summarize(const SessionLog& log);

Json to_json(const SessionSummary& summary);

}  // namespace polytrain
