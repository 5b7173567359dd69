#include "polytrain/summary.hpp"

#include "polytrain/error.hpp"

namespace polytrain {

SessionSummary summarize(const SessionLog& log) {
  if (log.frames.empty()) throw Error(ErrorCode::kEmptyLog, "session log has no frames");

  SessionSummary s;
  s.series.reserve(log.frames.size());
  double test_sum = 0.0;
  for (const Frame& f : log.frames) {
    s.series.push_back({f.t, f.mode, f.scores.position, f.scores.velocity, f.scores.total,
                        f.scores.current});
    if (f.mode == TrainingMode::kTest) {
      test_sum += f.scores.total;
      ++s.test_frames;
    }
  }
  if (s.test_frames > 0) s.total_score = test_sum / static_cast<double>(s.test_frames);
  s.segments = segment_tests(log);

  for (const SessionEvent& e : log.events) {
    if (e.kind == EventKind::kTrainStart) ++s.training_blocks;
    if (e.kind == EventKind::kBlockEvaluated) {
      ++s.evaluated_blocks;
      s.best_block_score = e.best;
    }
  }
  s.duration = log.frames.back().t + 1.0 / log.config.frame_rate;
  return s;
}

Json to_json(const SessionSummary& s) {
  Json series = Json::array();
  for (const ScorePoint& p : s.series) {
    series.push_back(Json{{"t", p.t},
                          {"mode", std::string(to_string(p.mode))},
                          {"pos", p.position},
                          {"vel", p.velocity},
                          {"total", p.total},
                          {"current", p.current}});
  }
  Json segments = Json::array();
  Json means = Json::array();
  for (const TestingSegment& seg : s.segments) {
    segments.push_back(Json{{"index", seg.index},
                            {"start", seg.start},
                            {"end", seg.end},
                            {"frames", seg.frames()},
                            {"mean", seg.mean}});
    means.push_back(seg.mean);
  }
  Json j = Json::object();
  j["total_score"] = s.total_score ? Json(*s.total_score) : Json(nullptr);
  j["total_score_defined"] = s.total_score.has_value();
  j["test_frames"] = s.test_frames;
  j["training_blocks"] = s.training_blocks;
  j["evaluated_blocks"] = s.evaluated_blocks;
  j["best_block_score"] = s.best_block_score ? Json(*s.best_block_score) : Json(nullptr);
  j["duration"] = s.duration;
  j["segments"] = std::move(segments);
  j["segment_means"] = std::move(means);
  j["series"] = std::move(series);
  return j;
}

}  // namespace polytrain
