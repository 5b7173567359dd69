#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polytrain/scoring.hpp"
#include "polytrain/trainer.hpp"

namespace polytrain {

struct TrainerConfig {
  SpringParams spring;
  double radius = 30.0;             // mm, both hands
  double nd_angular_speed = 180.0;  // deg/s

  void validate() const;
};

struct SessionConfig {
  PolyrhythmRatio ratio;
  double frame_rate = 100.0;         // Hz
  double train_block = 10.0;         // s of adaptive training per block
  double test_block = 20.0;          // s between block evaluations
  double threshold_fraction = 0.8;   // of the best block mean
  double max_duration = 300.0;       // s
  // Highest score carried in from outside the session. Unset means the first
  // completed test block seeds it.
  std::optional<double> prior_best_score;
  bool reset_windows_on_transition = false;
  HandCenters centers;
  ScoringConfig scoring;
  TrainerConfig trainer;

  void validate() const;
  std::int64_t frames_for(double seconds) const;
};

enum class Phase { kTraining, kTesting };

enum class EventKind { kTrainStart, kTestStart, kBlockEvaluated, kSessionEnd };
std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);

enum class BlockDecision { kStayTesting, kGoTraining };
std::string_view to_string(BlockDecision decision);
std::optional<BlockDecision> block_decision_from_string(std::string_view name);

struct BlockEvaluation {
  BlockDecision decision = BlockDecision::kStayTesting;
  double best = 0.0;
};

// Below threshold_fraction of the best completed block -> back to training.
// With no best yet, the block seeds it and testing continues.
BlockEvaluation evaluate_block(double block_avg, std::optional<double> best,
                               double threshold_fraction = 0.8);

struct SessionEvent {
  double t = 0.0;
  EventKind kind = EventKind::kTrainStart;
  // Index of the first frame at or after this event (== frame count for
  // events emitted after the last frame).
  std::size_t frame_index = 0;
  // BlockEvaluated only.
  std::optional<double> block_mean;
  std::optional<double> best;
  std::optional<BlockDecision> decision;

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

struct Frame {
  double t = 0.0;
  TrainingMode mode = TrainingMode::kAdaptive;
  BimanualSample sensed;
  GuidanceForce nd_force;
  GuidanceForce dom_force;
  ScoreSample scores;
  std::optional<double> client_t;
};

struct SessionLog {
  SessionConfig config;
  // Free-form header fields (subject label, seed, subject parameters).
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  std::vector<Frame> frames;
  std::vector<SessionEvent> events;
};

struct StepResult {
  TrainingMode mode = TrainingMode::kAdaptive;
  TrainingPower power;
  GuidanceForce nd_force;
  GuidanceForce dom_force;
  // Reference targets; set only in training modes.
  std::optional<ReferenceState> nd_target;
  std::optional<ReferenceState> dom_target;
  ScoreSample sample;
  std::vector<SessionEvent> events;
  bool ended = false;
};

// The interactive training session: adaptive-training blocks alternate with
// silent testing blocks, and each completed testing block is checked against
// the best block so far. Single-threaded; one instance per session.
class Session {
 public:
  explicit Session(SessionConfig config,
                   nlohmann::ordered_json metadata = nlohmann::ordered_json::object());

  // Processes one frame. Throws Error(kOutOfWorkspace) for sensed positions
  // outside the workspace; the session state is left untouched in that case.
  StepResult step(const BimanualSample& sensed, std::optional<double> client_t = std::nullopt);

  // Ends the session early. Returns the SessionEnd event (empty if already ended).
  std::vector<SessionEvent> stop();

  bool ended() const { return ended_; }
  Phase phase() const { return phase_; }
  TrainingMode mode() const {
    return phase_ == Phase::kTraining ? TrainingMode::kAdaptive : TrainingMode::kTest;
  }
  // Timestamp of the next frame.
  double time() const;
  double phase_elapsed() const;
  std::int64_t frame_index() const { return frame_index_; }
  std::optional<double> best_block_score() const { return best_; }
  int completed_blocks() const { return completed_blocks_; }
  int training_blocks() const { return training_blocks_; }
  int resync_count() const { return resync_count_; }
  const ReferenceTrajectory& reference() const { return reference_; }
  const FrameScorer& scorer() const { return scorer_; }
  const SessionConfig& config() const { return log_.config; }
  const SessionLog& log() const { return log_; }
  SessionLog take_log() { return std::move(log_); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void enter_training(double t, std::vector<SessionEvent>& events);
  void enter_testing(double t, std::vector<SessionEvent>& events);
  BlockDecision close_block(double t, std::vector<SessionEvent>& events);
  SessionEvent make_event(double t, EventKind kind) const;

  SessionLog log_;
  FrameScorer scorer_;
  ReferenceTrajectory reference_;
  std::int64_t train_frames_;
  std::int64_t test_frames_;
  std::int64_t max_frames_;

  Phase phase_ = Phase::kTraining;
  std::int64_t frame_index_ = 0;
  std::int64_t phase_frames_ = 0;
  std::int64_t block_frames_ = 0;
  double block_sum_ = 0.0;
  std::optional<double> best_;
  int completed_blocks_ = 0;
  int training_blocks_ = 0;
  int resync_count_ = 0;
  bool ended_ = false;
  std::optional<double> last_client_t_;
  std::vector<std::string> warnings_;
};

}  // namespace polytrain
