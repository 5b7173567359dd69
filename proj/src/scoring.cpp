#include "polytrain/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polytrain/error.hpp"

namespace polytrain {

PolyrhythmRatio::PolyrhythmRatio(int nd_cycles, int dom_cycles) : p_(nd_cycles), q_(dom_cycles) {
  const std::string label = std::to_string(nd_cycles) + ":" + std::to_string(dom_cycles);
  if (nd_cycles < 1 || dom_cycles < 1) {
    throw Error(ErrorCode::kInvalidArgument, "ratio terms must be positive: " + label);
  }
  if (std::gcd(nd_cycles, dom_cycles) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "ratio terms must be coprime: " + label);
  }
  if (dom_cycles % nd_cycles == 0 || nd_cycles % dom_cycles == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "not a polyrhythm (one term is a multiple of the other): " + label);
  }
}

double desired_angle(double nd_unwrapped_deg, const PolyrhythmRatio& ratio) {
  return nd_unwrapped_deg * ratio.multiplier();
}

double position_score(double dom_deg, double desired_deg, ErrorFolding folding) {
  double error = std::abs(dom_deg - desired_deg);
  if (folding == ErrorFolding::kCircular) {
    error = std::fmod(error, 360.0);
    if (error > 180.0) error = 360.0 - error;
  } else {
    error = std::min(error, 180.0);
  }
  return std::clamp((1.0 - error / 180.0) * 100.0, 0.0, 100.0);
}

std::optional<double> relative_velocity(double dom_avg_speed, double nd_avg_speed,
                                        double stall_speed) {
  if (!(nd_avg_speed >= stall_speed)) return std::nullopt;
  return dom_avg_speed / nd_avg_speed;
}

double velocity_score(double rel_v, const PolyrhythmRatio& ratio, VelocityScoreShape shape) {
  const double x = rel_v - ratio.multiplier();
  return shape.amplitude * std::exp(-shape.sharpness * x * x);
}

void ScoringConfig::validate() const {
  if (current_window < 1 || speed_window < 1) {
    throw Error(ErrorCode::kInvalidConfig, "scoring windows must be >= 1 frame");
  }
  if (!(velocity_shape.amplitude > 0.0 && velocity_shape.amplitude <= 100.0)) {
    throw Error(ErrorCode::kInvalidConfig, "velocity score amplitude must be in (0, 100]");
  }
  if (!(velocity_shape.sharpness > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "velocity score sharpness must be > 0");
  }
  if (!(stall_speed > 0.0)) throw Error(ErrorCode::kInvalidConfig, "stall speed must be > 0");
  if (!(dead_zone >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "dead zone must be >= 0");
}

FrameScorer::FrameScorer(PolyrhythmRatio ratio, ScoringConfig config, HandCenters centers)
    : ratio_(ratio),
      config_(config),
      centers_(centers),
      nd_speed_(static_cast<std::size_t>(std::max(config.speed_window, 1))),
      dom_speed_(static_cast<std::size_t>(std::max(config.speed_window, 1))),
      totals_(static_cast<std::size_t>(std::max(config.current_window, 1))) {
  config_.validate();
}

void FrameScorer::track(UnwrappedAngle& angle, bool& seen, PlanarPoint pos, PlanarPoint center,
                        double period) const {
  const auto raw = raw_angle(pos, center, config_.dead_zone);
  if (!raw) return;  // hold
  if (!seen) {
    angle = UnwrappedAngle::from_raw(*raw);
    seen = true;
    return;
  }
  angle = unwrap_step(angle, *raw, period);
}

ScoreSample FrameScorer::score(const BimanualSample& sample) {
  track(nd_angle_, nd_seen_, sample.nd.pos, centers_.nd, ratio_.nd_period());
  track(dom_angle_, dom_seen_, sample.dom.pos, centers_.dom, ratio_.dom_period());

  ScoreSample out;
  out.position = position_score(dom_angle_.degrees, desired_angle(nd_angle_.degrees, ratio_),
                                config_.folding);

  const double nd_avg = nd_speed_.push(speed_yz(sample.nd.vel));
  const double dom_avg = dom_speed_.push(speed_yz(sample.dom.vel));
  if (const auto rel = relative_velocity(dom_avg, nd_avg, config_.stall_speed)) {
    out.velocity = std::clamp(velocity_score(*rel, ratio_, config_.velocity_shape), 0.0, 100.0);
  } else {
    out.stalled = true;
    out.velocity = 0.0;
  }

  out.total = total_score(out.position, out.velocity);
  out.current = totals_.push(out.total);
  return out;
}

void FrameScorer::reset_windows() {
  nd_speed_.clear();
  dom_speed_.clear();
  totals_.clear();
}

}  // namespace polytrain
