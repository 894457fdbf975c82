#include "actrack/kinematics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace actrack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr Action kSourceAction{0.0, false, -1};

// Same reduction as wrap_angle without the contract check; inputs here are
// differences of already-validated angles.
inline double wrap_fast(double deg) {
  return deg - 360.0 * std::floor((deg + 180.0) * (1.0 / 360.0));
}

inline double gaussian_log_pdf(double residual, double sigma) {
  const double z = residual / sigma;
  return -0.5 * z * z - std::log(sigma * std::sqrt(2.0 * kPi));
}

// Log contribution of one coordinate: Gaussian when noisy, indicator within
// kDeterministicTolerance when the coordinate is deterministic.
inline double coordinate_log_density(double residual, double sigma) {
  if (sigma > 0.0) return gaussian_log_pdf(residual, sigma);
  return std::abs(residual) <= kDeterministicTolerance ? 0.0 : kNegInf;
}

}  // namespace

double wrap_angle(double degrees) {
  if (!std::isfinite(degrees)) {
    assert(false && "wrap_angle: non-finite input");
    throw std::domain_error("wrap_angle: non-finite input");
  }
  return wrap_fast(degrees);
}

AgentState sample_transition(const AgentState& s, const Action& u,
                             const MotionNoise& noise, TimeStep ts,
                             RandomStream& rng) {
  // Fixed draw order (theta, v, x, y) keeps streams reproducible.
  const double n_theta = rng.normal();
  const double n_v = rng.normal();
  const double n_x = rng.normal();
  const double n_y = rng.normal();

  AgentState out;
  out.theta =
      wrap_angle(s.theta + u.angular_speed * ts.dt + noise.sigma_theta * n_theta);
  out.v = std::max(0.0, s.v + noise.sigma_v * n_v);
  const double v_eff = u.stop ? 0.0 : out.v;
  out.x = s.x + std::cos(deg2rad(out.theta)) * ts.dt * v_eff + noise.sigma_x * n_x;
  out.y = s.y + std::sin(deg2rad(out.theta)) * ts.dt * v_eff + noise.sigma_y * n_y;
  return out;
}

AgentState deterministic_transition(const AgentState& s, const Action& u,
                                    TimeStep ts) {
  AgentState out;
  out.theta = wrap_angle(s.theta + u.angular_speed * ts.dt);
  out.v = s.v;
  const double v_eff = u.stop ? 0.0 : out.v;
  out.x = s.x + std::cos(deg2rad(out.theta)) * ts.dt * v_eff;
  out.y = s.y + std::sin(deg2rad(out.theta)) * ts.dt * v_eff;
  return out;
}

double transition_log_density(const AgentState& next, const AgentState& prev,
                              const Action& u, const MotionNoise& noise,
                              TimeStep ts) {
  const double dtheta =
      wrap_angle(next.theta - prev.theta - u.angular_speed * ts.dt);
  double lp = coordinate_log_density(dtheta, noise.sigma_theta);
  lp += coordinate_log_density(next.v - prev.v, noise.sigma_v);

  const double v_eff = u.stop ? 0.0 : next.v;
  const double rx =
      next.x - (prev.x + std::cos(deg2rad(next.theta)) * ts.dt * v_eff);
  const double ry =
      next.y - (prev.y + std::sin(deg2rad(next.theta)) * ts.dt * v_eff);
  lp += coordinate_log_density(rx, noise.sigma_x);
  lp += coordinate_log_density(ry, noise.sigma_y);
  return lp;
}

AgentState reflect_into_bounds(AgentState s, const PlanarBounds& bounds) {
  if (s.x < 0.0) {
    s.x = 0.0;
    s.theta = wrap_fast(180.0 - s.theta);
  } else if (s.x > bounds.width) {
    s.x = bounds.width;
    s.theta = wrap_fast(180.0 - s.theta);
  }
  if (s.y < 0.0) {
    s.y = 0.0;
    s.theta = wrap_fast(-s.theta);
  } else if (s.y > bounds.height) {
    s.y = bounds.height;
    s.theta = wrap_fast(-s.theta);
  }
  return s;
}

WorldState JointTransitionModel::sample(const WorldState& w,
                                        const Action& robot_action,
                                        RandomStream& rng) const {
  WorldState out;
  out.robot = sample_transition(w.robot, robot_action, robot_, dt_, rng);
  out.source = sample_transition(w.source, kSourceAction, source_, dt_, rng);
  if (source_bounds_) {
    out.source = reflect_into_bounds(out.source, *source_bounds_);
  }
  return out;
}

double JointTransitionModel::log_density(const WorldState& next,
                                         const WorldState& prev,
                                         const Action& robot_action) const {
  return transition_log_density(next.robot, prev.robot, robot_action, robot_,
                                dt_) +
         transition_log_density(next.source, prev.source, kSourceAction,
                                source_, dt_);
}

void JointTransitionModel::mixture_log_density(
    std::span<const WorldState> next, std::span<const WorldState> prev,
    std::span<const double> log_prev_weights, const Action& robot_action,
    std::span<double> out) const {
  const std::size_t n_next = next.size();
  const std::size_t n_prev = prev.size();
  assert(log_prev_weights.size() == n_prev);
  assert(out.size() == n_next);

  // Scratch buffers, structure-of-arrays over the parent set. This routine is
  // the O(I^2) core of the entropy reward, so parents are scanned linearly.
  thread_local std::vector<double> rx, ry, rth, rv, sx, sy, sth, sv, terms;
  rx.resize(n_prev);
  ry.resize(n_prev);
  rth.resize(n_prev);
  rv.resize(n_prev);
  sx.resize(n_prev);
  sy.resize(n_prev);
  sth.resize(n_prev);
  sv.resize(n_prev);
  terms.resize(n_prev);
  for (std::size_t nu = 0; nu < n_prev; ++nu) {
    rx[nu] = prev[nu].robot.x;
    ry[nu] = prev[nu].robot.y;
    rth[nu] = prev[nu].robot.theta;
    rv[nu] = prev[nu].robot.v;
    sx[nu] = prev[nu].source.x;
    sy[nu] = prev[nu].source.y;
    sth[nu] = prev[nu].source.theta;
    sv[nu] = prev[nu].source.v;
  }

  struct Coord {
    bool det;
    double inv_two_var;
    double log_norm;
  };
  const auto make_coord = [](double sigma) {
    Coord c;
    c.det = !(sigma > 0.0);
    c.inv_two_var = c.det ? 0.0 : 1.0 / (2.0 * sigma * sigma);
    c.log_norm = c.det ? 0.0 : -std::log(sigma * std::sqrt(2.0 * kPi));
    return c;
  };
  const Coord c_rx = make_coord(robot_.sigma_x);
  const Coord c_ry = make_coord(robot_.sigma_y);
  const Coord c_rv = make_coord(robot_.sigma_v);
  const Coord c_rth = make_coord(robot_.sigma_theta);
  const Coord c_sx = make_coord(source_.sigma_x);
  const Coord c_sy = make_coord(source_.sigma_y);
  const Coord c_sv = make_coord(source_.sigma_v);
  const Coord c_sth = make_coord(source_.sigma_theta);
  const double log_norm_sum = c_rx.log_norm + c_ry.log_norm + c_rv.log_norm +
                              c_rth.log_norm + c_sx.log_norm + c_sy.log_norm +
                              c_sv.log_norm + c_sth.log_norm;

  const double dt = dt_.dt;
  const double robot_turn = robot_action.angular_speed * dt;

  for (std::size_t i = 0; i < n_next; ++i) {
    const AgentState& nr = next[i].robot;
    const AgentState& ns = next[i].source;
    const double veff_r = robot_action.stop ? 0.0 : nr.v;
    const double base_rx = nr.x - std::cos(deg2rad(nr.theta)) * dt * veff_r;
    const double base_ry = nr.y - std::sin(deg2rad(nr.theta)) * dt * veff_r;
    const double target_rth = nr.theta - robot_turn;
    const double base_sx = ns.x - std::cos(deg2rad(ns.theta)) * dt * ns.v;
    const double base_sy = ns.y - std::sin(deg2rad(ns.theta)) * dt * ns.v;

    double max_term = kNegInf;
    for (std::size_t nu = 0; nu < n_prev; ++nu) {
      double quad = 0.0;

      // Deterministic coordinates reject cheaply; with the default noise
      // tables the robot position eliminates almost every cross pair.
      const double res_rx = base_rx - rx[nu];
      if (c_rx.det) {
        if (std::abs(res_rx) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_rx * res_rx * c_rx.inv_two_var;
      }
      const double res_ry = base_ry - ry[nu];
      if (c_ry.det) {
        if (std::abs(res_ry) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_ry * res_ry * c_ry.inv_two_var;
      }
      const double res_rv = nr.v - rv[nu];
      if (c_rv.det) {
        if (std::abs(res_rv) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_rv * res_rv * c_rv.inv_two_var;
      }
      const double res_rth = wrap_fast(target_rth - rth[nu]);
      if (c_rth.det) {
        if (std::abs(res_rth) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_rth * res_rth * c_rth.inv_two_var;
      }

      const double res_sx = base_sx - sx[nu];
      if (c_sx.det) {
        if (std::abs(res_sx) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_sx * res_sx * c_sx.inv_two_var;
      }
      const double res_sy = base_sy - sy[nu];
      if (c_sy.det) {
        if (std::abs(res_sy) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_sy * res_sy * c_sy.inv_two_var;
      }
      const double res_sv = ns.v - sv[nu];
      if (c_sv.det) {
        if (std::abs(res_sv) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_sv * res_sv * c_sv.inv_two_var;
      }
      const double res_sth = wrap_fast(ns.theta - sth[nu]);
      if (c_sth.det) {
        if (std::abs(res_sth) > kDeterministicTolerance) {
          terms[nu] = kNegInf;
          continue;
        }
      } else {
        quad += res_sth * res_sth * c_sth.inv_two_var;
      }

      const double t = log_prev_weights[nu] + log_norm_sum - quad;
      terms[nu] = t;
      if (t > max_term) max_term = t;
    }

    if (max_term == kNegInf) {
      out[i] = kNegInf;
      continue;
    }
    double sum = 0.0;
    for (std::size_t nu = 0; nu < n_prev; ++nu) {
      const double d = terms[nu] - max_term;
      if (d > -40.0) sum += std::exp(d);
    }
    out[i] = max_term + std::log(sum);
  }
}

}  // namespace actrack
