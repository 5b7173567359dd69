#include "polytrain/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "polytrain/error.hpp"

namespace polytrain {

namespace {

constexpr std::array<std::pair<TrainingMode, std::string_view>, 4> kModeNames{{
    {TrainingMode::kFull, "Full"},
    {TrainingMode::kAdaptive, "Adaptive"},
    {TrainingMode::kHalf, "Half"},
    {TrainingMode::kTest, "Test"},
}};

GuidanceForce cap(GuidanceForce f, double limit) {
  const double mag = f.magnitude();
  if (mag > limit && mag > 0.0) {
    const double s = limit / mag;
    f.fy *= s;
    f.fz *= s;
    // Rounding can leave the rescaled vector an ulp above the limit.
    while (f.magnitude() > limit) {
      f.fy = std::nextafter(f.fy, 0.0);
      f.fz = std::nextafter(f.fz, 0.0);
    }
  }
  return f;
}

}  // namespace

std::string_view to_string(TrainingMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "Unknown";
}

std::optional<TrainingMode> training_mode_from_string(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

TrainingPower training_power(TrainingMode mode, double current_score) {
  const double score = std::clamp(current_score, 0.0, 100.0);
  TrainingPower power;
  switch (mode) {
    case TrainingMode::kFull: power = {100.0, 100.0}; break;
    case TrainingMode::kAdaptive: power = {100.0, 100.0 - score}; break;
    case TrainingMode::kHalf: power = {100.0, 0.0}; break;
    case TrainingMode::kTest: power = {0.0, 0.0}; break;
  }
  power.nd = std::clamp(power.nd, 0.0, 100.0);
  power.dom = std::clamp(power.dom, 0.0, 100.0);
  return power;
}

ReferenceState reference_state(const ReferenceTrajectory& traj, double t, Hand hand) {
  const bool nd = hand == Hand::kNonDominant;
  const double speed = nd ? traj.nd_angular_speed : traj.dom_angular_speed();
  const double radius = nd ? traj.nd_radius : traj.dom_radius;
  const PlanarPoint center = nd ? traj.centers.nd : traj.centers.dom;

  ReferenceState s;
  s.angle = (nd ? traj.nd_phase_base : traj.dom_phase_base) + speed * t;
  s.target = point_on_circle(center, radius, s.angle);
  const double a = s.angle * kRadPerDeg;
  const double omega = speed * kRadPerDeg;
  s.velocity = {-radius * omega * std::sin(a), radius * omega * std::cos(a)};
  return s;
}

ReferenceTrajectory resync_reference(ReferenceTrajectory traj, double nd_unwrapped_deg, double t) {
  traj.nd_phase_base = nd_unwrapped_deg - traj.nd_angular_speed * t;
  traj.dom_phase_base = desired_angle(nd_unwrapped_deg, traj.ratio) - traj.dom_angular_speed() * t;
  return traj;
}

void SpringParams::validate() const {
  if (!(stiffness >= 0.0 && stiffness <= kMaxDeviceStiffness)) {
    throw Error(ErrorCode::kInvalidConfig, "spring stiffness must be in [0, 2.31] N/mm");
  }
  if (!(velocity_gain >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "velocity gain must be >= 0");
  if (!(force_cap > 0.0 && force_cap <= kMaxDeviceForce)) {
    throw Error(ErrorCode::kInvalidConfig, "force cap must be in (0, 3.3] N");
  }
}

GuidanceForce guidance_force(double power, PlanarPoint target, PlanarPoint pos,
                             const SpringParams& spring) {
  const double gain = std::clamp(power, 0.0, 100.0) / 100.0 * spring.stiffness;
  const PlanarPoint err = target - pos;
  GuidanceForce f{gain * err.y, gain * err.z};
  if (!std::isfinite(f.fy) || !std::isfinite(f.fz)) return {};
  return cap(f, std::min(spring.force_cap, kMaxDeviceForce));
}

GuidanceForce guidance_force(double power, const ReferenceState& target, const HandSample& hand,
                             const SpringParams& spring) {
  const double scale = std::clamp(power, 0.0, 100.0) / 100.0;
  const PlanarPoint err = target.target - hand.pos;
  GuidanceForce f{scale * (spring.stiffness * err.y +
                           spring.velocity_gain * (target.velocity.vy - hand.vel.vy)),
                  scale * (spring.stiffness * err.z +
                           spring.velocity_gain * (target.velocity.vz - hand.vel.vz))};
  if (!std::isfinite(f.fy) || !std::isfinite(f.fz)) return {};
  return cap(f, std::min(spring.force_cap, kMaxDeviceForce));
}

}  // namespace polytrain
