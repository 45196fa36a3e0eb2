// Copyright 2026 The tendon-relax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRELAX_CONTROL_HPP_
#define TRELAX_CONTROL_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "trelax/kinematics.hpp"
#include "trelax/model.hpp"
#include "trelax/qp.hpp"
#include "trelax/types.hpp"

namespace trelax {

struct ControlConfig {
  double t_min = 30.0;           // N, relaxation gate and QP lower bound
  double delta_l_plus = 0.03;    // mm added per static tick
  double delta_l_minus = 0.03;   // mm removed per moving tick
  double delta_l_max = 2.0;      // mm cap on accumulated relaxation
  double delta_theta_max = 0.1;  // rad, posture drift that halts relaxation
  double k_stiff = 100.0;        // N/mm, one-sided series stiffness
  MuscleVector t_bias;           // N, per-muscle tension floor
  int estimator_rate = 40;       // Hz, torque/QP refresh
  int control_rate = 125;        // Hz, command loop
  QpWeights qp_weights;
  double qp_tol = 1e-9;

  void validate(int n_muscles) const {
    if (t_min <= 0.0 || delta_l_plus <= 0.0 || delta_l_minus <= 0.0 || delta_l_max <= 0.0 ||
        delta_theta_max <= 0.0 || k_stiff <= 0.0)
      throw std::invalid_argument("control: constants must be strictly positive");
    if (delta_l_plus > delta_l_max)
      throw std::invalid_argument("control: delta_l_plus must not exceed delta_l_max");
    if (t_bias.size() != n_muscles)
      throw std::invalid_argument("control: t_bias needs one entry per muscle");
    if ((t_bias.array() < 0.0).any())
      throw std::invalid_argument("control: t_bias must be >= 0");
    if (estimator_rate <= 0 || control_rate <= 0 || estimator_rate > control_rate)
      throw std::invalid_argument("control: need 0 < estimator_rate <= control_rate");
    if (qp_weights.w1_scale <= 0.0 || qp_weights.w2_scale <= 0.0 || qp_tol <= 0.0)
      throw std::invalid_argument("control: bad qp parameters");
  }
};

inline ControlConfig default_control_config(int n_muscles = 10) {
  ControlConfig cfg;
  cfg.t_bias = MuscleVector::Constant(n_muscles, 2.0);
  return cfg;
}

enum class MrcMode { kStatic, kMoving, kStopped };

inline const char* to_string(MrcMode mode) {
  switch (mode) {
    case MrcMode::kStatic: return "STATIC";
    case MrcMode::kMoving: return "MOVING";
    case MrcMode::kStopped: return "STOPPED";
  }
  return "?";
}

// Relaxation bookkeeping carried across ticks: the accumulated per-muscle
// release, the posture snapshot the drift guard measures against, and the
// machine mode.
struct RelaxationState {
  MuscleVector delta_l;          // mm, in [0, delta_l_max]
  JointVector theta_previous;    // rad
  MrcMode mode = MrcMode::kStatic;
};

inline RelaxationState initial_relaxation_state(int n_muscles, const JointVector& theta) {
  return {MuscleVector::Zero(n_muscles), theta, MrcMode::kStatic};
}

// One-sided series-elastic law: stretched muscles pull with k_stiff per mm,
// slack muscles fall back to the bias floor.
inline MuscleVector stiffness_control(const MuscleVector& lengths_mm,
                                      const MuscleVector& l_command_mm,
                                      const ControlConfig& cfg) {
  return cfg.t_bias.array() +
         (cfg.k_stiff * (lengths_mm - l_command_mm).array()).max(0.0);
}

// Commanded muscle lengths: the geometric target plus the accumulated
// release, which lengthens the command and lets the series stiffness shed
// tension.
inline MuscleVector compose_command(const MuscleVector& l_base_mm,
                                    const RelaxationState& relax) {
  return l_base_mm + relax.delta_l;
}

namespace detail {

// Muscle visit order: ranked by necessary tension, ties resolved toward the
// lowest index so repeated runs take identical paths.
inline std::vector<int> rank_by_necessity(const MuscleVector& t_necessary, bool ascending) {
  std::vector<int> order(t_necessary.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ascending ? t_necessary[a] < t_necessary[b] : t_necessary[a] > t_necessary[b];
  });
  return order;
}

}  // namespace detail

// One relaxation tick.
//
// Moving: the machine unwinds — the release of the most necessary muscle
// that still carries one shrinks by delta_l_minus, and the posture snapshot
// tracks the current joints.
//
// Static: muscles are visited from least to most necessary; the first one
// whose measured tension exceeds t_min and whose release is not saturated
// gains delta_l_plus (capped at delta_l_max). At most one coordinate changes
// per tick.
//
// If the posture has drifted delta_theta_max from the snapshot, relaxation
// latches STOPPED and delta_l freezes until a motion arrives.
inline RelaxationState mrc_step(const MuscleVector& t_current,
                                const MuscleVector& t_necessary,
                                const RelaxationState& relax, bool moving,
                                const JointVector& theta_current, const ControlConfig& cfg) {
  RelaxationState next = relax;

  if (moving) {
    next.mode = MrcMode::kMoving;
    next.theta_previous = theta_current;
    for (int i : detail::rank_by_necessity(t_necessary, /*ascending=*/false)) {
      if (next.delta_l[i] > 0.0) {
        next.delta_l[i] = std::max(next.delta_l[i] - cfg.delta_l_minus, 0.0);
        break;
      }
    }
    return next;
  }

  if (next.mode == MrcMode::kMoving) {
    // First static tick: this posture is the drift reference.
    next.mode = MrcMode::kStatic;
    next.theta_previous = theta_current;
  }
  if (next.mode == MrcMode::kStopped) return next;

  if ((theta_current - next.theta_previous).norm() >= cfg.delta_theta_max) {
    next.mode = MrcMode::kStopped;
    return next;
  }

  for (int i : detail::rank_by_necessity(t_necessary, /*ascending=*/true)) {
    if (t_current[i] <= cfg.t_min) continue;
    if (next.delta_l[i] >= cfg.delta_l_max) continue;
    next.delta_l[i] = std::min(next.delta_l[i] + cfg.delta_l_plus, cfg.delta_l_max);
    break;
  }
  return next;
}

struct ControllerOutputs {
  MuscleVector l_command;    // mm
  MuscleVector t_target;     // N
  MuscleVector t_necessary;  // N
  std::vector<int> qp_active_set;
  MrcMode mode = MrcMode::kStatic;
  double drift_norm = 0.0;   // rad
};

// Closed-loop controller: geometric length targets at the control rate, the
// torque/QP refresh at the estimator rate, the relaxation machine in
// between, and the series-elastic law last. All scheduling is keyed to the
// tick counter, never to wall time.
class Controller {
 public:
  struct Sensors {
    MuscleVector lengths_mm;
    MuscleVector tensions;
    JointVector theta;
  };

  Controller(const RobotModel& model, const ControlConfig& cfg, bool relaxation_enabled)
      : model_(model),
        cfg_(cfg),
        relaxation_enabled_(relaxation_enabled),
        jacobian_(muscle_jacobian(model, JointVector::Zero(model.n_joints))),
        relax_(initial_relaxation_state(model.n_muscles, JointVector::Zero(model.n_joints))),
        t_necessary_(MuscleVector::Constant(model.n_muscles, cfg.t_min)),
        last_target_(JointVector::Zero(model.n_joints)) {
    cfg.validate(model.n_muscles);
  }

  ControllerOutputs tick(const JointVector& theta_target, const Sensors& sensors,
                         const Vec3& exerted_force, double payload_mass) {
    const bool first = tick_index_ == 0;
    if (first) {
      last_target_ = theta_target;
      relax_.theta_previous = sensors.theta;
    }
    const bool moving =
        !first && (theta_target - last_target_).cwiseAbs().maxCoeff() > 1e-9;
    last_target_ = theta_target;

    if (estimator_due()) refresh_necessary_tension(sensors.theta, exerted_force, payload_mass);

    if (relaxation_enabled_)
      relax_ = mrc_step(sensors.tensions, t_necessary_, relax_, moving, sensors.theta, cfg_);

    ControllerOutputs out;
    out.l_command = compose_command(muscle_lengths(model_, theta_target), relax_);
    out.t_target = stiffness_control(sensors.lengths_mm, out.l_command, cfg_);
    out.t_necessary = t_necessary_;
    out.qp_active_set = qp_active_set_;
    out.mode = relax_.mode;
    out.drift_norm = (sensors.theta - relax_.theta_previous).norm();
    ++tick_index_;
    return out;
  }

  const RelaxationState& relaxation() const { return relax_; }
  std::int64_t qp_failures() const { return qp_failures_; }

 private:
  bool estimator_due() const {
    if (tick_index_ == 0) return true;
    const std::int64_t num = static_cast<std::int64_t>(cfg_.estimator_rate);
    const std::int64_t den = static_cast<std::int64_t>(cfg_.control_rate);
    return (tick_index_ * num) / den > ((tick_index_ - 1) * num) / den;
  }

  void refresh_necessary_tension(const JointVector& theta, const Vec3& exerted_force,
                                 double payload_mass) {
    QpProblem problem{jacobian_, necessary_torque(model_, theta, exerted_force, payload_mass),
                      cfg_.qp_weights, cfg_.t_min};
    try {
      QpSolution sol = solve_necessary_tension(problem, cfg_.qp_tol);
      t_necessary_ = std::move(sol.x);
      qp_active_set_ = std::move(sol.active_set);
    } catch (const QpIterationLimit&) {
      // Keep the cached distribution in force; the first refresh has no
      // fallback so the failure must surface.
      if (tick_index_ == 0) throw;
      ++qp_failures_;
    }
  }

  RobotModel model_;
  ControlConfig cfg_;
  bool relaxation_enabled_;
  Matrix jacobian_;
  RelaxationState relax_;
  MuscleVector t_necessary_;
  std::vector<int> qp_active_set_;
  JointVector last_target_;
  std::int64_t tick_index_ = 0;
  std::int64_t qp_failures_ = 0;
};

}  // namespace trelax

#endif  // TRELAX_CONTROL_HPP_
