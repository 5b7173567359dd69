#pragma once

#include <optional>
#include <string_view>

#include "polytrain/kinematics.hpp"
#include "polytrain/scoring.hpp"

namespace polytrain {

// Maximum force the device can exert at orthogonal arm position, N.
inline constexpr double kMaxDeviceForce = 3.3;
// Device stiffness range, N/mm.
inline constexpr double kMinDeviceStiffness = 1.02;
inline constexpr double kMaxDeviceStiffness = 2.31;

enum class TrainingMode { kFull = 1, kAdaptive = 2, kHalf = 3, kTest = 4 };

std::string_view to_string(TrainingMode mode);
std::optional<TrainingMode> training_mode_from_string(std::string_view name);

inline bool is_training(TrainingMode mode) { return mode != TrainingMode::kTest; }

enum class Hand { kNonDominant, kDominant };

// Guidance power per hand, 0-100.
struct TrainingPower {
  double nd = 0.0;
  double dom = 0.0;

  friend bool operator==(TrainingPower, TrainingPower) = default;
};

TrainingPower training_power(TrainingMode mode, double current_score);

struct ReferenceTrajectory {
  HandCenters centers;
  double nd_radius = 30.0;   // mm
  double dom_radius = 30.0;  // mm
  double nd_angular_speed = 180.0;  // deg/s, one non-dominant cycle per 2 s
  PolyrhythmRatio ratio;
  double nd_phase_base = 0.0;   // deg at t = 0
  double dom_phase_base = 0.0;  // deg at t = 0

  double dom_angular_speed() const { return nd_angular_speed * ratio.multiplier(); }
};

struct ReferenceState {
  double angle = 0.0;  // deg, continuous
  PlanarPoint target;
  PlanarVelocity velocity;
};

ReferenceState reference_state(const ReferenceTrajectory& traj, double t, Hand hand);

// Re-anchors both references on the non-dominant hand's actual angle at time
// `t`: the nd reference passes through it and the dom reference sits at the
// matching polyrhythmic phase.
ReferenceTrajectory resync_reference(ReferenceTrajectory traj, double nd_unwrapped_deg, double t);

struct GuidanceForce {
  double fy = 0.0;
  double fz = 0.0;

  double magnitude() const { return std::hypot(fy, fz); }
  friend bool operator==(GuidanceForce, GuidanceForce) = default;
};

struct SpringParams {
  double stiffness = 1.0;      // N/mm
  double velocity_gain = 0.0;  // N·s/mm on (target velocity - hand velocity); off by default
  double force_cap = kMaxDeviceForce;

  void validate() const;
};

// (power/100) * K * (target - pos), magnitude-capped at force_cap.
GuidanceForce guidance_force(double power, PlanarPoint target, PlanarPoint pos,
                             const SpringParams& spring = {});

GuidanceForce guidance_force(double power, const ReferenceState& target, const HandSample& hand,
                             const SpringParams& spring);

}  // namespace polytrain
