#pragma once

#include <optional>
#include <span>
#include <vector>

#include "actrack/random.hpp"

namespace actrack {

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle in degrees to the half-open range [-180, 180).
/// Non-finite input is a contract violation.
double wrap_angle(double degrees);

/// Pose and speed of one agent (robot or source) in the 2D plane.
/// theta is in degrees in [-180, 180); v is in m/s and never negative.
struct AgentState {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // deg
  double v = 0.0;      // m/s
};

struct WorldState {
  AgentState robot;
  AgentState source;
};

/// One element of the finite command set U. `angular_speed` is the commanded
/// change of heading per second; `stop` marks the hold-position command
/// (the displacement of that step is computed with speed 0, the stored speed
/// is untouched).
struct Action {
  double angular_speed = 0.0;  // deg/s
  bool stop = false;
  int index = 0;
};
using ActionSet = std::vector<Action>;

/// Per-coordinate standard deviations of the transition noise, one instance
/// per agent role.
struct MotionNoise {
  double sigma_x = 0.0;      // m
  double sigma_y = 0.0;      // m
  double sigma_v = 0.0;      // m/s
  double sigma_theta = 0.0;  // deg/s
};

struct TimeStep {
  double dt = 1.0;  // s, > 0
};

/// Residual tolerance for zero-variance coordinates in the transition
/// density: a deterministic coordinate matching within this bound
/// contributes log-density 0, anything else is impossible.
inline constexpr double kDeterministicTolerance = 1e-9;

/// Rectangular enclosure [0, width] x [0, height].
struct PlanarBounds {
  double width = 7.0;
  double height = 5.0;
};

/// Clamps an agent crossing a boundary onto it and reflects its heading
/// about the violated wall's normal; speed is preserved.
AgentState reflect_into_bounds(AgentState s, const PlanarBounds& bounds);

/// Samples the constant-velocity transition: heading update (wrapped), speed
/// update (clamped at 0), then the displacement computed with the *new*
/// heading and speed. Consumes exactly four normal draws.
AgentState sample_transition(const AgentState& s, const Action& u,
                             const MotionNoise& noise, TimeStep dt,
                             RandomStream& rng);

/// Noise-free image of the transition (all sigmas zero).
AgentState deterministic_transition(const AgentState& s, const Action& u,
                                    TimeStep dt);

/// Log-density of `next` given `prev` under the transition model, in nats.
/// Zero-variance coordinates contribute 0 within kDeterministicTolerance and
/// -inf otherwise. Never returns NaN.
double transition_log_density(const AgentState& next, const AgentState& prev,
                              const Action& u, const MotionNoise& noise,
                              TimeStep dt);

/// Joint transition of the robot/source pair. Only the robot takes commands;
/// the source always receives the zero action. With `source_bounds` set,
/// sampled source states reflect off the enclosure walls (a filter that
/// knows the room keeps its source hypotheses inside it); the log-density
/// ignores the reflection, which the source position noise absorbs.
class JointTransitionModel {
 public:
  JointTransitionModel(MotionNoise robot, MotionNoise source, TimeStep dt,
                       std::optional<PlanarBounds> source_bounds = std::nullopt)
      : robot_(robot), source_(source), dt_(dt), source_bounds_(source_bounds) {}

  WorldState sample(const WorldState& w, const Action& robot_action,
                    RandomStream& rng) const;

  double log_density(const WorldState& next, const WorldState& prev,
                     const Action& robot_action) const;

  /// out[i] = logsumexp_nu(log_prev_weights[nu] + log p(next[i]|prev[nu],u)).
  /// Batch form of the predictive-mixture term; mathematically identical to
  /// looping log_density but organized for throughput (the caller invokes it
  /// once per belief update on an I x I pair grid).
  void mixture_log_density(std::span<const WorldState> next,
                           std::span<const WorldState> prev,
                           std::span<const double> log_prev_weights,
                           const Action& robot_action,
                           std::span<double> out) const;

  const MotionNoise& robot_noise() const { return robot_; }
  const MotionNoise& source_noise() const { return source_; }
  TimeStep dt() const { return dt_; }

 private:
  MotionNoise robot_;
  MotionNoise source_;
  TimeStep dt_;
  std::optional<PlanarBounds> source_bounds_;
};

}  // namespace actrack
