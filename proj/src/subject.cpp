#include "polytrain/subject.hpp"

#include <cmath>
#include <string>

#include "polytrain/error.hpp"

namespace polytrain {

namespace {

struct PhaseRates {
  double nd = 0.0;
  double dom = 0.0;
};

// Clockwise unit tangent at the hand's angular position (intent phase if the
// hand sits on the center).
double tangential(GuidanceForce f, PlanarPoint pos, PlanarPoint center, double fallback_deg) {
  const double deg = raw_angle(pos, center, 1e-9).value_or(fallback_deg);
  const double a = deg * kRadPerDeg;
  return -f.fy * std::sin(a) + f.fz * std::cos(a);
}

PlanarPoint intent_point(PlanarPoint center, double radius, double phase_deg) {
  return point_on_circle(center, radius, phase_deg);
}

PlanarVelocity intent_velocity(double radius, double phase_deg, double rate_deg) {
  const double a = phase_deg * kRadPerDeg;
  const double w = rate_deg * kRadPerDeg;
  return {-radius * w * std::sin(a), radius * w * std::cos(a)};
}

void check_finite(const SubjectState& s) {
  const double values[] = {s.nd.intent_phase, s.nd.pos.y, s.nd.pos.z, s.nd.vel.vy, s.nd.vel.vz,
                           s.dom.intent_phase, s.dom.pos.y, s.dom.pos.z, s.dom.vel.vy,
                           s.dom.vel.vz, s.coupling};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNumericalBlowup,
                  "subject state became non-finite (nd phase " + std::to_string(s.nd.intent_phase) +
                      ", dom phase " + std::to_string(s.dom.intent_phase) + ", coupling " +
                      std::to_string(s.coupling) + ")");
    }
  }
}

}  // namespace

void SubjectParams::validate() const {
  const double nonneg[] = {coupling, learning_rate, motor_noise, nd_speed, dom_speed,
                           hand_stiffness, hand_damping, compliance, radius};
  for (double v : nonneg) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidConfig, "subject parameters must be finite and >= 0");
    }
  }
  if (!(hand_mass > 0.0)) throw Error(ErrorCode::kInvalidConfig, "subject hand_mass must be > 0");
}

SubjectState initial_subject_state(const SubjectParams& params, const HandCenters& centers) {
  SubjectState s;
  s.coupling = params.coupling;
  s.nd.intent_phase = params.nd_start_phase;
  s.dom.intent_phase = params.dom_start_phase;
  s.nd.pos = intent_point(centers.nd, params.radius, s.nd.intent_phase);
  s.dom.pos = intent_point(centers.dom, params.radius, s.dom.intent_phase);
  s.nd.vel = intent_velocity(params.radius, s.nd.intent_phase, params.nd_speed);
  s.dom.vel = intent_velocity(params.radius, s.dom.intent_phase, params.dom_speed);
  return s;
}

SubjectState subject_step(const SubjectState& state, const SubjectParams& params,
                          const HandCenters& centers, GuidanceForce nd_force,
                          GuidanceForce dom_force, double dt, TrainingMode mode,
                          PhaseNoise noise) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "subject step needs dt > 0");

  const double nd_push =
      params.compliance * tangential(nd_force, state.nd.pos, centers.nd, state.nd.intent_phase);
  const double dom_push = params.compliance *
                          tangential(dom_force, state.dom.pos, centers.dom, state.dom.intent_phase);
  const double c = state.coupling;

  // Cross-talk pulls the dominant intent toward 1:1 synchrony with the
  // non-dominant one.
  auto rates = [&](double nd_phase, double dom_phase) {
    PhaseRates r;
    r.nd = params.nd_speed + nd_push;
    r.dom = params.dom_speed + dom_push +
            c * kDegPerRad * std::sin((nd_phase - dom_phase) * kRadPerDeg);
    return r;
  };

  // Midpoint rule for the phases; noise enters as an Euler-Maruyama increment.
  const PhaseRates k1 = rates(state.nd.intent_phase, state.dom.intent_phase);
  const PhaseRates k2 = rates(state.nd.intent_phase + 0.5 * dt * k1.nd,
                              state.dom.intent_phase + 0.5 * dt * k1.dom);
  const double sq = params.motor_noise * std::sqrt(dt);

  SubjectState next;
  next.nd.intent_phase = state.nd.intent_phase + dt * k2.nd + sq * noise.nd;
  next.dom.intent_phase = state.dom.intent_phase + dt * k2.dom + sq * noise.dom;
  next.coupling = is_training(mode) ? c * std::exp(-params.learning_rate * dt) : c;
  const PhaseRates k_end = rates(next.nd.intent_phase, next.dom.intent_phase);

  // Each hand = intent point + deviation; the deviation is a damped
  // oscillator driven by the guidance force (semi-implicit Euler).
  const double accel_scale = 1000.0 / params.hand_mass;  // N/kg -> mm/s^2
  auto advance_hand = [&](const SubjectHand& h, SubjectHand& out, PlanarPoint center,
                          double rate_now, double rate_next, GuidanceForce f) {
    const PlanarPoint x0 = intent_point(center, params.radius, h.intent_phase);
    const PlanarVelocity v0 = intent_velocity(params.radius, h.intent_phase, rate_now);
    PlanarPoint e = h.pos - x0;
    PlanarVelocity ed{h.vel.vy - v0.vy, h.vel.vz - v0.vz};
    const double ay =
        accel_scale * (-params.hand_stiffness * e.y - params.hand_damping * ed.vy + f.fy);
    const double az =
        accel_scale * (-params.hand_stiffness * e.z - params.hand_damping * ed.vz + f.fz);
    ed.vy += ay * dt;
    ed.vz += az * dt;
    e.y += ed.vy * dt;
    e.z += ed.vz * dt;
    const PlanarPoint x1 = intent_point(center, params.radius, out.intent_phase);
    const PlanarVelocity v1 = intent_velocity(params.radius, out.intent_phase, rate_next);
    out.pos = x1 + e;
    out.vel = {v1.vy + ed.vy, v1.vz + ed.vz};
  };
  advance_hand(state.nd, next.nd, centers.nd, k1.nd, k_end.nd, nd_force);
  advance_hand(state.dom, next.dom, centers.dom, k1.dom, k_end.dom, dom_force);

  check_finite(next);
  return next;
}

VirtualSubject::VirtualSubject(SubjectParams params, HandCenters centers)
    : params_(params), centers_(centers), rng_(params.seed) {
  params_.validate();
  state_ = initial_subject_state(params_, centers_);
}

void VirtualSubject::step(GuidanceForce nd_force, GuidanceForce dom_force, double dt,
                          TrainingMode mode) {
  PhaseNoise noise;
  if (params_.motor_noise > 0.0) {
    noise.nd = normal_(rng_);
    noise.dom = normal_(rng_);
  }
  state_ = subject_step(state_, params_, centers_, nd_force, dom_force, dt, mode, noise);
}

}  // namespace polytrain
