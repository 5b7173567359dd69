#include "polytrain/kinematics.hpp"

#include "polytrain/error.hpp"

namespace polytrain {

bool is_finite(PlanarPoint p) { return std::isfinite(p.y) && std::isfinite(p.z); }

bool in_workspace(PlanarPoint p) {
  return is_finite(p) && std::abs(p.y) <= kWorkspaceBound && std::abs(p.z) <= kWorkspaceBound;
}

std::optional<double> raw_angle(PlanarPoint pos, PlanarPoint center, double dead_zone) {
  const PlanarPoint d = pos - center;
  if (!(d.norm() > dead_zone)) return std::nullopt;
  double deg = std::atan2(d.z, d.y) * kDegPerRad;
  if (deg < 0.0) deg += 360.0;
  // atan2 can round -tiny up to exactly 360 after the shift.
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

PlanarPoint point_on_circle(PlanarPoint center, double radius, double angle_deg) {
  const double a = angle_deg * kRadPerDeg;
  return {center.y + radius * std::cos(a), center.z + radius * std::sin(a)};
}

double shortest_arc(double from_deg, double to_deg) {
  double d = std::fmod(to_deg - from_deg, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

UnwrappedAngle unwrap_step(UnwrappedAngle state, double new_raw, double rebase_period) {
  state.degrees += shortest_arc(state.last_raw, new_raw);
  state.last_raw = new_raw;
  if (rebase_period > 0.0) {
    while (state.degrees >= rebase_period) {
      state.degrees -= rebase_period;
      ++state.basis;
    }
    while (state.degrees < 0.0) {
      state.degrees += rebase_period;
      --state.basis;
    }
  }
  return state;
}

MovingWindow::MovingWindow(std::size_t capacity) {
  if (capacity == 0) throw Error(ErrorCode::kInvalidArgument, "moving window capacity must be >= 1");
  buffer_.assign(capacity, 0.0);
}

double MovingWindow::push(double sample) {
  buffer_[head_] = sample;
  head_ = (head_ + 1) % buffer_.size();
  if (count_ < buffer_.size()) ++count_;
  return average();
}

double MovingWindow::average() const {
  if (count_ == 0) throw Error(ErrorCode::kInvalidArgument, "average of an empty window");
  // Summed oldest to newest from scratch; windows are small (20/40) and this
  // keeps the mean free of running-sum drift.
  const std::size_t cap = buffer_.size();
  std::size_t idx = (head_ + cap - count_) % cap;
  double sum = 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    sum += buffer_[idx];
    idx = (idx + 1) % cap;
  }
  return sum / static_cast<double>(count_);
}

void MovingWindow::clear() {
  head_ = 0;
  count_ = 0;
}

}  // namespace polytrain
