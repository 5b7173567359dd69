#pragma once

#include <optional>

#include "polytrain/kinematics.hpp"

namespace polytrain {

// Non-dominant : dominant cycle counts, e.g. 2:3. Terms must be coprime and
// neither may be an integer multiple of the other.
class PolyrhythmRatio {
 public:
  PolyrhythmRatio() = default;  // 2:3
  PolyrhythmRatio(int nd_cycles, int dom_cycles);

  int p() const { return p_; }
  int q() const { return q_; }

  // Desired dominant/non-dominant angle multiplier and speed ratio, q/p.
  double multiplier() const { return static_cast<double>(q_) / static_cast<double>(p_); }

  // Period after which the non-dominant angle can be re-based (p * 360).
  double nd_period() const { return 360.0 * p_; }
  double dom_period() const { return 360.0 * q_; }

  friend bool operator==(const PolyrhythmRatio&, const PolyrhythmRatio&) = default;

 private:
  int p_ = 2;
  int q_ = 3;
};

// How |current - desired| is turned into an error in [0, 180].
enum class ErrorFolding {
  kCircular,  // distance on the physical circle
  kClamp,     // min(|current - desired|, 180)
};

struct ScoreSample {
  double position = 0.0;
  double velocity = 0.0;
  double total = 0.0;
  double current = 0.0;  // windowed mean of totals
  bool stalled = false;  // non-dominant hand below the stall speed
};

double desired_angle(double nd_unwrapped_deg, const PolyrhythmRatio& ratio);

double position_score(double dom_deg, double desired_deg,
                      ErrorFolding folding = ErrorFolding::kCircular);

// dom/nd, or nullopt when the non-dominant hand is stalled.
std::optional<double> relative_velocity(double dom_avg_speed, double nd_avg_speed,
                                        double stall_speed = 1.0);

struct VelocityScoreShape {
  double amplitude = 100.0;  // A
  double sharpness = 1.0;    // B
};

// A * exp(-B * (rel_v - q/p)^2)
double velocity_score(double rel_v, const PolyrhythmRatio& ratio, VelocityScoreShape shape = {});

inline double total_score(double position, double velocity) {
  return position * 0.5 + velocity * 0.5;
}

struct ScoringConfig {
  int current_window = 20;  // frames of total score
  int speed_window = 40;    // frames of per-hand speed
  VelocityScoreShape velocity_shape;
  double stall_speed = 1.0;  // mm/s
  double dead_zone = kDefaultDeadZone;
  ErrorFolding folding = ErrorFolding::kCircular;

  void validate() const;
};

struct HandSample {
  PlanarPoint pos;
  PlanarVelocity vel;
};

struct BimanualSample {
  HandSample nd;
  HandSample dom;
};

struct HandCenters {
  PlanarPoint nd{0.0, -40.0};
  PlanarPoint dom{0.0, 40.0};
};

// Per-session scoring state: both hands' unwrapped angles, the two speed
// windows and the current-score window.
class FrameScorer {
 public:
  FrameScorer(PolyrhythmRatio ratio, ScoringConfig config, HandCenters centers);

  ScoreSample score(const BimanualSample& sample);

  const UnwrappedAngle& nd_angle() const { return nd_angle_; }
  const UnwrappedAngle& dom_angle() const { return dom_angle_; }
  const PolyrhythmRatio& ratio() const { return ratio_; }

  void reset_windows();

 private:
  void track(UnwrappedAngle& angle, bool& seen, PlanarPoint pos, PlanarPoint center,
             double period) const;

  PolyrhythmRatio ratio_;
  ScoringConfig config_;
  HandCenters centers_;
  UnwrappedAngle nd_angle_;
  UnwrappedAngle dom_angle_;
  bool nd_seen_ = false;
  bool dom_seen_ = false;
  MovingWindow nd_speed_;
  MovingWindow dom_speed_;
  MovingWindow totals_;
};

}  // namespace polytrain
