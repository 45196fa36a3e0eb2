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

#ifndef TRELAX_PLANT_HPP_
#define TRELAX_PLANT_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "trelax/kinematics.hpp"
#include "trelax/model.hpp"
#include "trelax/types.hpp"

namespace trelax {

// Ground-truth state of the simulated arm. hysteresis_memory keeps the last
// tension each muscle actually settled at; the stick band of realize_tension
// works against it.
struct PlantState {
  JointVector theta;            // rad
  JointVector theta_dot;        // rad/s
  MuscleVector tension;         // N, realized
  MuscleVector temperature;     // degC
  MuscleVector hysteresis_memory;  // N
  double time = 0.0;            // s
};

// Unilateral horizontal plane acting on the end effector. While in contact
// the surface also drags the hand laterally; without that friction a resting
// arm skews sideways on the plane.
struct DeskContact {
  double height = 0.0;       // m, world z of the surface
  double stiffness = 2.0e4;  // N/m
  double damping = 50.0;     // N s/m, normal
  double tangential_damping = 200.0;  // N s/m
};

// Bilateral circular guide in the frontal (y-z) plane: the end effector is
// pulled back onto the circle, the tangential direction stays free.
struct HandleContact {
  Vec3 center = Vec3::Zero();  // m
  double radius = 0.15;        // m
  double stiffness = 2.0e4;    // N/m
  double damping = 50.0;       // N s/m
};

struct ContactSet {
  std::optional<DeskContact> desk;
  std::optional<HandleContact> handle;
};

struct PlantConfig {
  JointVector joint_damping;        // Nm s/rad, per joint
  double joint_inertia = 0.05;      // kg m^2, per joint
  double friction_band = 8.0;       // N, Coulomb stick band on tension tracking
  double thermal_heating_coeff = 2.0;           // degC/s at reference tension
  double thermal_reference_tension = 490.0;     // N
  double thermal_cooling_time_constant = 120.0; // s
  double thermal_ambient = 25.0;                // degC
  double dt = 1.0e-3;               // s
  double payload_mass = 0.0;        // kg, point mass at the end effector
  double contact_stiffness = 2.0e4; // N/m, penalty gain for built contacts
  double contact_damping = 50.0;    // N s/m

  void validate(int n_joints) const {
    if (joint_damping.size() != n_joints)
      throw std::invalid_argument("plant: joint_damping needs one entry per joint");
    if ((joint_damping.array() <= 0.0).any())
      throw std::invalid_argument("plant: joint_damping must be positive");
    if (joint_inertia <= 0.0) throw std::invalid_argument("plant: joint_inertia must be > 0");
    if (friction_band < 0.0) throw std::invalid_argument("plant: friction_band must be >= 0");
    if (thermal_cooling_time_constant <= 0.0 || thermal_reference_tension <= 0.0 ||
        thermal_heating_coeff < 0.0)
      throw std::invalid_argument("plant: bad thermal parameters");
    if (dt <= 0.0) throw std::invalid_argument("plant: dt must be > 0");
    if (payload_mass < 0.0) throw std::invalid_argument("plant: payload_mass must be >= 0");
    if (contact_stiffness <= 0.0 || contact_damping <= 0.0)
      throw std::invalid_argument("plant: contact parameters must be > 0");
  }
};

inline PlantConfig default_plant_config(int n_joints = 5) {
  PlantConfig cfg;
  cfg.joint_damping = JointVector::Constant(n_joints, 2.0);
  return cfg;
}

// Stick-slip tension tracking. Inside the band the muscle holds its last
// settled tension; outside it follows the target lagging by the band width.
// The memory argument is updated in place.
inline MuscleVector realize_tension(const MuscleVector& t_target, MuscleVector& memory,
                                    double band) {
  if ((t_target.array() < 0.0).any())
    throw std::invalid_argument("realize_tension: negative target tension");
  MuscleVector realized(t_target.size());
  for (int i = 0; i < t_target.size(); ++i) {
    const double d = t_target[i] - memory[i];
    if (std::abs(d) <= band) {
      realized[i] = memory[i];
    } else {
      realized[i] = t_target[i] - (d > 0 ? band : -band);
      memory[i] = realized[i];
    }
    realized[i] = std::max(realized[i], 0.0);
  }
  return realized;
}

inline MuscleVector realize_tension(const MuscleVector& t_target, const PlantState& state,
                                    const PlantConfig& cfg) {
  MuscleVector memory = state.hysteresis_memory;
  return realize_tension(t_target, memory, cfg.friction_band);
}

struct ContactForces {
  JointVector torque;
  double normal_force = 0.0;  // N; constraint force magnitude for the handle
};

inline ContactForces contact_forces(const RobotModel& model, const FrameSet& frames,
                                    const JointVector& theta_dot, const ContactSet& contacts) {
  ContactForces out;
  out.torque = JointVector::Zero(model.n_joints);
  if (!contacts.desk && !contacts.handle) return out;

  const Matrix jac = end_effector_jacobian(model, frames);
  const Vec3 velocity = jac * theta_dot;

  if (contacts.desk) {
    const DeskContact& desk = *contacts.desk;
    const double gap = frames.end_effector.z() - desk.height;
    if (gap < 0.0) {
      const double fn =
          std::max(0.0, -desk.stiffness * gap - desk.damping * velocity.z());
      const Vec3 force(-desk.tangential_damping * velocity.x(),
                       -desk.tangential_damping * velocity.y(), fn);
      out.torque += jac.transpose() * force;
      out.normal_force += fn;
    }
  }
  if (contacts.handle) {
    const HandleContact& handle = *contacts.handle;
    const Vec3 d = frames.end_effector - handle.center;
    const Vec3 in_plane(0.0, d.y(), d.z());
    const double rho = in_plane.norm();
    Vec3 force = Vec3::Zero();
    if (rho > 1e-9) {
      const Vec3 radial = in_plane / rho;
      const Vec3 tangent = Vec3::UnitX().cross(radial);
      const Vec3 displacement = d.x() * Vec3::UnitX() + (rho - handle.radius) * radial;
      const Vec3 constrained_velocity = velocity - velocity.dot(tangent) * tangent;
      force = -handle.stiffness * displacement - handle.damping * constrained_velocity;
    }
    out.torque += jac.transpose() * force;
    out.normal_force += force.norm();
  }
  return out;
}

inline JointVector contact_torque(const RobotModel& model, const PlantState& state,
                                  const ContactSet& contacts) {
  return contact_forces(model, forward_kinematics(model, state.theta), state.theta_dot,
                        contacts)
      .torque;
}

inline double contact_normal_force(const RobotModel& model, const PlantState& state,
                                   const ContactSet& contacts) {
  return contact_forces(model, forward_kinematics(model, state.theta), state.theta_dot,
                        contacts)
      .normal_force;
}

// First-order thermal model: quadratic heating in tension, exponential
// cooling toward ambient.
inline MuscleVector thermal_step(const MuscleVector& temperature,
                                 const MuscleVector& tension, const PlantConfig& cfg,
                                 double dt) {
  const auto ratio = tension.array() / cfg.thermal_reference_tension;
  return temperature.array() +
         dt * (cfg.thermal_heating_coeff * ratio.square() -
               (temperature.array() - cfg.thermal_ambient) / cfg.thermal_cooling_time_constant);
}

// One plant time step: realize tensions through the stick band, apply muscle,
// gravity and contact torques to the damped joint dynamics (semi-implicit
// Euler), clamp to joint limits, and advance the thermal state.
inline PlantState step(const PlantState& state, const MuscleVector& t_target,
                       const ContactSet& contacts, const RobotModel& model,
                       const PlantConfig& cfg) {
  PlantState next = state;
  next.tension = realize_tension(t_target, next.hysteresis_memory, cfg.friction_band);

  const FrameSet frames = forward_kinematics(model, state.theta);
  const JointVector muscle_torque = model.moment_arms.transpose() * next.tension;  // -G'T
  const JointVector gravity_load = -gravity_torque(model, frames, cfg.payload_mass);
  const ContactForces contact = contact_forces(model, frames, state.theta_dot, contacts);
  const JointVector torque = muscle_torque + gravity_load + contact.torque;

  next.theta_dot +=
      cfg.dt * (torque - cfg.joint_damping.cwiseProduct(state.theta_dot)) / cfg.joint_inertia;
  next.theta += cfg.dt * next.theta_dot;
  for (int j = 0; j < model.n_joints; ++j) {
    if (next.theta[j] < model.joint_limit_min[j]) {
      next.theta[j] = model.joint_limit_min[j];
      if (next.theta_dot[j] < 0.0) next.theta_dot[j] = 0.0;
    } else if (next.theta[j] > model.joint_limit_max[j]) {
      next.theta[j] = model.joint_limit_max[j];
      if (next.theta_dot[j] > 0.0) next.theta_dot[j] = 0.0;
    }
  }

  next.temperature = thermal_step(state.temperature, next.tension, cfg, cfg.dt);
  next.time = state.time + cfg.dt;

  if (!next.theta.allFinite()) throw SimulationDiverged("joint angle", next.time);
  if (!next.theta_dot.allFinite()) throw SimulationDiverged("joint velocity", next.time);
  if (!next.tension.allFinite()) throw SimulationDiverged("muscle tension", next.time);
  if (!next.temperature.allFinite()) throw SimulationDiverged("muscle temperature", next.time);
  return next;
}

inline PlantState initial_state(const RobotModel& model, const JointVector& theta,
                                const PlantConfig& cfg, const MuscleVector& initial_tension) {
  PlantState s;
  s.theta = theta;
  s.theta_dot = JointVector::Zero(model.n_joints);
  s.tension = initial_tension;
  s.hysteresis_memory = s.tension;
  s.temperature = MuscleVector::Constant(model.n_muscles, cfg.thermal_ambient);
  s.time = 0.0;
  return s;
}

inline PlantState initial_state(const RobotModel& model, const JointVector& theta,
                                const PlantConfig& cfg, double initial_tension) {
  return initial_state(model, theta, cfg,
                       MuscleVector::Constant(model.n_muscles, initial_tension));
}

}  // namespace trelax

#endif  // TRELAX_PLANT_HPP_
