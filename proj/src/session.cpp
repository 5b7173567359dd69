#include "polytrain/session.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "polytrain/error.hpp"

namespace polytrain {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 4> kEventNames{{
    {EventKind::kTrainStart, "TrainStart"},
    {EventKind::kTestStart, "TestStart"},
    {EventKind::kBlockEvaluated, "BlockEvaluated"},
    {EventKind::kSessionEnd, "SessionEnd"},
}};

bool finite_velocity(PlanarVelocity v) { return std::isfinite(v.vy) && std::isfinite(v.vz); }

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kEventNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(BlockDecision decision) {
  return decision == BlockDecision::kStayTesting ? "StayTesting" : "GoTraining";
}

std::optional<BlockDecision> block_decision_from_string(std::string_view name) {
  if (name == "StayTesting") return BlockDecision::kStayTesting;
  if (name == "GoTraining") return BlockDecision::kGoTraining;
  return std::nullopt;
}

void TrainerConfig::validate() const {
  spring.validate();
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidConfig, "trainer radius must be > 0");
  if (!(nd_angular_speed > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "non-dominant angular speed must be > 0");
  }
}

void SessionConfig::validate() const {
  if (!(frame_rate > 0.0)) throw Error(ErrorCode::kInvalidConfig, "frame_rate must be > 0");
  if (!(train_block > 0.0) || !(test_block > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "train_block and test_block must be > 0");
  }
  if (frames_for(train_block) < 1 || frames_for(test_block) < 1) {
    throw Error(ErrorCode::kInvalidConfig, "blocks must span at least one frame");
  }
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "threshold_fraction must be in (0, 1]");
  }
  if (!(max_duration >= train_block + test_block)) {
    throw Error(ErrorCode::kInvalidConfig, "max_duration must be >= train_block + test_block");
  }
  if (prior_best_score && !(*prior_best_score >= 0.0 && *prior_best_score <= 100.0)) {
    throw Error(ErrorCode::kInvalidConfig, "prior_best_score must be in [0, 100]");
  }
  if (!in_workspace(centers.nd) || !in_workspace(centers.dom)) {
    throw Error(ErrorCode::kInvalidConfig, "hand centers must lie inside the workspace");
  }
  scoring.validate();
  trainer.validate();
}

std::int64_t SessionConfig::frames_for(double seconds) const {
  return std::llround(seconds * frame_rate);
}

BlockEvaluation evaluate_block(double block_avg, std::optional<double> best,
                               double threshold_fraction) {
  if (!best) return {BlockDecision::kStayTesting, block_avg};
  const BlockDecision decision = block_avg < threshold_fraction * *best
                                     ? BlockDecision::kGoTraining
                                     : BlockDecision::kStayTesting;
  return {decision, std::max(*best, block_avg)};
}

Session::Session(SessionConfig config, nlohmann::ordered_json metadata)
    : scorer_(config.ratio, config.scoring, config.centers) {
  config.validate();
  log_.config = config;
  log_.metadata = std::move(metadata);

  reference_.centers = config.centers;
  reference_.nd_radius = config.trainer.radius;
  reference_.dom_radius = config.trainer.radius;
  reference_.nd_angular_speed = config.trainer.nd_angular_speed;
  reference_.ratio = config.ratio;

  train_frames_ = config.frames_for(config.train_block);
  test_frames_ = config.frames_for(config.test_block);
  max_frames_ = config.frames_for(config.max_duration);
  best_ = config.prior_best_score;
}

double Session::time() const {
  return static_cast<double>(frame_index_) / log_.config.frame_rate;
}

double Session::phase_elapsed() const {
  return static_cast<double>(phase_frames_) / log_.config.frame_rate;
}

SessionEvent Session::make_event(double t, EventKind kind) const {
  SessionEvent e;
  e.t = t;
  e.kind = kind;
  e.frame_index = log_.frames.size();
  return e;
}

void Session::enter_training(double t, std::vector<SessionEvent>& events) {
  phase_ = Phase::kTraining;
  phase_frames_ = 0;
  ++training_blocks_;
  events.push_back(make_event(t, EventKind::kTrainStart));
}

void Session::enter_testing(double t, std::vector<SessionEvent>& events) {
  phase_ = Phase::kTesting;
  phase_frames_ = 0;
  block_frames_ = 0;
  block_sum_ = 0.0;
  events.push_back(make_event(t, EventKind::kTestStart));
}

BlockDecision Session::close_block(double t, std::vector<SessionEvent>& events) {
  const double mean = block_sum_ / static_cast<double>(block_frames_);
  const BlockEvaluation eval = evaluate_block(mean, best_, log_.config.threshold_fraction);
  best_ = eval.best;
  ++completed_blocks_;
  block_frames_ = 0;
  block_sum_ = 0.0;

  SessionEvent e = make_event(t, EventKind::kBlockEvaluated);
  e.block_mean = mean;
  e.best = eval.best;
  e.decision = eval.decision;
  events.push_back(e);
  return eval.decision;
}

StepResult Session::step(const BimanualSample& sensed, std::optional<double> client_t) {
  if (ended_) throw Error(ErrorCode::kInvalidArgument, "session has ended");
  if (!in_workspace(sensed.nd.pos) || !in_workspace(sensed.dom.pos) ||
      !finite_velocity(sensed.nd.vel) || !finite_velocity(sensed.dom.vel)) {
    throw Error(ErrorCode::kOutOfWorkspace, "sensed position outside the workspace");
  }

  const SessionConfig& cfg = log_.config;
  const double t = time();
  StepResult out;

  if (client_t) {
    if (last_client_t_ && *client_t - *last_client_t_ > 5.0 / cfg.frame_rate) {
      warnings_.push_back("frame gap of " + std::to_string(*client_t - *last_client_t_) +
                          " s before t=" + std::to_string(t));
    }
    last_client_t_ = client_t;
  }

  // Block boundaries are decided from completed frames only.
  bool entering_training = false;
  bool transitioned = false;
  if (frame_index_ == 0) {
    enter_training(t, out.events);
    entering_training = true;
  } else if (phase_ == Phase::kTraining && phase_frames_ >= train_frames_) {
    enter_testing(t, out.events);
    transitioned = true;
  } else if (phase_ == Phase::kTesting && block_frames_ >= test_frames_) {
    if (close_block(t, out.events) == BlockDecision::kGoTraining) {
      enter_training(t, out.events);
      entering_training = true;
      transitioned = true;
    }
  }
  if (transitioned && cfg.reset_windows_on_transition) scorer_.reset_windows();

  out.sample = scorer_.score(sensed);

  if (entering_training) {
    reference_ = resync_reference(reference_, scorer_.nd_angle().degrees, t);
    ++resync_count_;
  }

  out.mode = mode();
  out.power = training_power(out.mode, out.sample.current);
  if (is_training(out.mode)) {
    out.nd_target = reference_state(reference_, t, Hand::kNonDominant);
    out.dom_target = reference_state(reference_, t, Hand::kDominant);
    out.nd_force = guidance_force(out.power.nd, *out.nd_target, sensed.nd, cfg.trainer.spring);
    out.dom_force = guidance_force(out.power.dom, *out.dom_target, sensed.dom, cfg.trainer.spring);
  } else {
    block_sum_ += out.sample.total;
    ++block_frames_;
  }

  for (const auto& e : out.events) log_.events.push_back(e);
  log_.frames.push_back(
      Frame{t, out.mode, sensed, out.nd_force, out.dom_force, out.sample, client_t});
  ++phase_frames_;
  ++frame_index_;

  if (frame_index_ >= max_frames_) {
    const double t_end = time();
    std::vector<SessionEvent> tail;
    if (phase_ == Phase::kTesting && block_frames_ >= test_frames_) close_block(t_end, tail);
    tail.push_back(make_event(t_end, EventKind::kSessionEnd));
    ended_ = true;
    for (const auto& e : tail) {
      log_.events.push_back(e);
      out.events.push_back(e);
    }
  }
  out.ended = ended_;
  return out;
}

std::vector<SessionEvent> Session::stop() {
  if (ended_) return {};
  ended_ = true;
  SessionEvent e = make_event(time(), EventKind::kSessionEnd);
  log_.events.push_back(e);
  return {e};
}

}  // namespace polytrain
