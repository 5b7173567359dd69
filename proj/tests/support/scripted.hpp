#pragma once

// Analytic hand trajectories for driving the engine without a subject model.

#include <cmath>

#include "polytrain/scoring.hpp"

namespace scripted {

inline constexpr double kPi = 3.14159265358979323846;

// Hand at angle `deg` (clockwise from +y, +y up, +z right) on a circle,
// moving at `speed` deg/s.
inline polytrain::HandSample on_circle(polytrain::PlanarPoint center, double radius, double deg,
                                       double speed) {
  const double a = deg * kPi / 180.0;
  const double w = speed * kPi / 180.0;
  return {{center.y + radius * std::cos(a), center.z + radius * std::sin(a)},
          {-radius * w * std::sin(a), radius * w * std::cos(a)}};
}

// Both hands performing the p:q pattern; the dominant hand is shifted by
// `dom_lag` degrees behind its correct phase.
inline polytrain::BimanualSample polyrhythm(double t, double radius, double nd_speed,
                                            const polytrain::HandCenters& centers = {},
                                            double q_over_p = 1.5, double dom_lag = 0.0) {
  const double nd = nd_speed * t;
  const double dom = nd * q_over_p - dom_lag;
  return {on_circle(centers.nd, radius, nd, nd_speed), on_circle(centers.dom, radius, dom, nd_speed * q_over_p)};
}

}  // namespace scripted
