#pragma once

#include <cstdint>
#include <random>

#include "polytrain/scoring.hpp"
#include "polytrain/trainer.hpp"

namespace polytrain {

// Synthetic stand-in for a human: two intent oscillators with cross-talk
// coupling toward 1:1 synchrony, a coupling that decays with guided practice,
// and a mass-spring-damper hand per side that tracks its intent point and is
// pushed by the guidance force.
struct SubjectParams {
  double coupling = 0.0;       // c0, 1/s
  double learning_rate = 0.0;  // lambda, 1/s of training exposure
  double motor_noise = 0.0;    // deg/sqrt(s), white noise on the intent phases
  double nd_speed = 180.0;     // deg/s
  double dom_speed = 270.0;    // deg/s
  double hand_stiffness = 0.5;  // N/mm
  double hand_damping = 0.03;   // N·s/mm
  double hand_mass = 0.5;       // kg
  // Intent phase correction per newton of tangential guidance force, deg/s/N.
  double compliance = 40.0;
  double radius = 30.0;  // mm, both hands
  double nd_start_phase = 0.0;   // deg
  double dom_start_phase = 0.0;  // deg
  std::uint64_t seed = 0;

  void validate() const;
};

// Slips out of the polyrhythm soon after guidance stops and never improves.
inline SubjectParams non_learner_params(std::uint64_t seed) {
  SubjectParams p;
  p.coupling = 0.5;
  p.motor_noise = 1.0;
  p.seed = seed;
  return p;
}

// Same starting cross-talk, but it decays with guided practice.
inline SubjectParams learner_params(std::uint64_t seed) {
  SubjectParams p = non_learner_params(seed);
  p.learning_rate = 0.05;
  return p;
}

struct SubjectHand {
  double intent_phase = 0.0;  // deg, continuous
  PlanarPoint pos;
  PlanarVelocity vel;
};

struct SubjectState {
  SubjectHand nd;
  SubjectHand dom;
  double coupling = 0.0;

  BimanualSample sensed() const { return {{nd.pos, nd.vel}, {dom.pos, dom.vel}}; }
};

// Hands at rest-free steady motion on their intent circles.
SubjectState initial_subject_state(const SubjectParams& params, const HandCenters& centers);

// Standard-normal draws for the two intent phases over one step.
struct PhaseNoise {
  double nd = 0.0;
  double dom = 0.0;
};

// One deterministic integration step. Coupling decays only on training frames.
// Throws Error(kNumericalBlowup) if any state value becomes non-finite.
SubjectState subject_step(const SubjectState& state, const SubjectParams& params,
                          const HandCenters& centers, GuidanceForce nd_force,
                          GuidanceForce dom_force, double dt, TrainingMode mode,
                          PhaseNoise noise = {});

// Seeded wrapper holding the state and the noise generator.
class VirtualSubject {
 public:
  VirtualSubject(SubjectParams params, HandCenters centers);

  BimanualSample sensed() const { return state_.sensed(); }
  const SubjectState& state() const { return state_; }
  const SubjectParams& params() const { return params_; }

  void step(GuidanceForce nd_force, GuidanceForce dom_force, double dt, TrainingMode mode);

 private:
  SubjectParams params_;
  HandCenters centers_;
  SubjectState state_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace polytrain
