#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace polytrain {

// Generous bound around the 160 x 120 mm device workspace.
inline constexpr double kWorkspaceBound = 200.0;
inline constexpr double kDefaultDeadZone = 1.0;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegPerRad = 180.0 / kPi;
inline constexpr double kRadPerDeg = kPi / 180.0;

// A point in the circle-drawing (y, z) plane, millimeters. +y is up and +z is
// to the right; the device depth axis is dropped.
struct PlanarPoint {
  double y = 0.0;
  double z = 0.0;

  friend PlanarPoint operator+(PlanarPoint a, PlanarPoint b) { return {a.y + b.y, a.z + b.z}; }
  friend PlanarPoint operator-(PlanarPoint a, PlanarPoint b) { return {a.y - b.y, a.z - b.z}; }
  friend PlanarPoint operator*(double s, PlanarPoint a) { return {s * a.y, s * a.z}; }
  friend bool operator==(PlanarPoint, PlanarPoint) = default;

  double norm() const { return std::hypot(y, z); }
};

// Planar velocity, mm/s.
struct PlanarVelocity {
  double vy = 0.0;
  double vz = 0.0;

  friend bool operator==(PlanarVelocity, PlanarVelocity) = default;
};

bool is_finite(PlanarPoint p);
bool in_workspace(PlanarPoint p);

// Angle of `pos` around `center`, measured clockwise from +y, in [0, 360).
// With +y up and +z right this is atan2(dz, dy). Returns nullopt inside the
// dead zone, where the caller should hold its previous angle.
std::optional<double> raw_angle(PlanarPoint pos, PlanarPoint center,
                                double dead_zone = kDefaultDeadZone);

// Inverse of raw_angle: the point at `angle_deg` on a circle.
PlanarPoint point_on_circle(PlanarPoint center, double radius, double angle_deg);

// Shortest signed arc from `from_deg` to `to_deg`, in (-180, 180].
double shortest_arc(double from_deg, double to_deg);

// Continuous angle, re-based by a whole number of periods so that it stays in
// [0, period). `basis` counts re-bases (negative for net counter-rotation).
struct UnwrappedAngle {
  double degrees = 0.0;
  std::int64_t basis = 0;
  double last_raw = 0.0;

  static UnwrappedAngle from_raw(double raw_deg) { return {raw_deg, 0, raw_deg}; }
};

// Advances by the shortest arc from the previous raw angle. A non-positive
// `rebase_period` disables re-basing.
UnwrappedAngle unwrap_step(UnwrappedAngle state, double new_raw, double rebase_period = 0.0);

// Magnitude on the y and z axes only.
inline double speed_yz(PlanarVelocity v) { return std::hypot(v.vy, v.vz); }
inline double speed_yz(double vx, double vy, double vz) {
  (void)vx;
  return std::hypot(vy, vz);
}

// Fixed-capacity moving average. Before the window fills, the mean is taken
// over the samples received so far.
class MovingWindow {
 public:
  explicit MovingWindow(std::size_t capacity);

  // Appends a sample (evicting the oldest when full) and returns the mean.
  double push(double sample);

  double average() const;
  bool empty() const { return count_ == 0; }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return buffer_.size(); }
  void clear();

 private:
  std::vector<double> buffer_;
  std::size_t head_ = 0;  // next write slot
  std::size_t count_ = 0;
};

}  // namespace polytrain
