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

#ifndef TRELAX_KINEMATICS_HPP_
#define TRELAX_KINEMATICS_HPP_

#include <cmath>

#include "trelax/model.hpp"
#include "trelax/types.hpp"

namespace trelax {

namespace detail {

inline Mat3 rot_x(double a) {
  Mat3 r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}

inline Mat3 rot_y(double a) {
  Mat3 r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

inline Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

inline void check_theta(const RobotModel& model, const JointVector& theta) {
  if (theta.size() != model.n_joints)
    throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                " entries, model expects " + std::to_string(model.n_joints));
  if (!theta.allFinite()) throw std::invalid_argument("theta must be finite");
}

}  // namespace detail

// Frame: x forward, y left, z up, shoulder cluster at the origin. Rotation
// order is roll-pitch-yaw at the shoulder, pitch-yaw at the elbow; both links
// extend along local -z so the arm hangs straight down at theta = 0.
struct FrameSet {
  Mat3 shoulder_rotation;
  Mat3 elbow_rotation;
  Vec3 elbow;
  Vec3 end_effector;
  Vec3 upper_arm_com;
  Vec3 forearm_com;
  Vec3 joint_axis[5];
  Vec3 joint_pivot[5];
};

inline FrameSet forward_kinematics(const RobotModel& model, const JointVector& theta) {
  detail::check_theta(model, theta);
  const Mat3 rx = detail::rot_x(theta[0]);
  const Mat3 rxy = rx * detail::rot_y(theta[1]);
  const Mat3 rs = rxy * detail::rot_z(theta[2]);
  const Mat3 rsy = rs * detail::rot_y(theta[3]);
  const Mat3 re = rsy * detail::rot_z(theta[4]);

  FrameSet f;
  f.shoulder_rotation = rs;
  f.elbow_rotation = re;
  f.elbow = rs * Vec3(0, 0, -model.links[0].length);
  f.upper_arm_com = rs * Vec3(0, 0, -model.links[0].com_offset);
  f.forearm_com = f.elbow + re * Vec3(0, 0, -model.links[1].com_offset);
  const double forearm_reach = model.links[1].length + model.end_effector_offset;
  f.end_effector = f.elbow + re * Vec3(0, 0, -forearm_reach);
  f.joint_axis[0] = Vec3::UnitX();
  f.joint_axis[1] = rx * Vec3::UnitY();
  f.joint_axis[2] = rxy * Vec3::UnitZ();
  f.joint_axis[3] = rs * Vec3::UnitY();
  f.joint_axis[4] = rsy * Vec3::UnitZ();
  f.joint_pivot[0] = f.joint_pivot[1] = f.joint_pivot[2] = Vec3::Zero();
  f.joint_pivot[3] = f.joint_pivot[4] = f.elbow;
  return f;
}

// Muscle path lengths in mm under the constant-moment-arm law
// l(theta) = rest_lengths - moment_arms * theta.
inline MuscleVector muscle_lengths(const RobotModel& model, const JointVector& theta) {
  detail::check_theta(model, theta);
  return model.rest_lengths - 1000.0 * (model.moment_arms * theta);
}

// Muscle Jacobian G = dl/dtheta in m/rad. Constant moment arms make it
// independent of theta: G = -moment_arms. The transpose maps tension to
// joint torque as tau = -G' T.
inline Matrix muscle_jacobian(const RobotModel& model, const JointVector& theta) {
  detail::check_theta(model, theta);
  return -model.moment_arms;
}

inline Vec3 end_effector_position(const RobotModel& model, const JointVector& theta) {
  return forward_kinematics(model, theta).end_effector;
}

// Positional Jacobian of the end effector, 3 x n_joints, m/rad.
inline Matrix end_effector_jacobian(const RobotModel& model, const FrameSet& f) {
  Matrix j(3, model.n_joints);
  for (int k = 0; k < model.n_joints; ++k)
    j.col(k) = f.joint_axis[k].cross(f.end_effector - f.joint_pivot[k]);
  return j;
}

inline Matrix end_effector_jacobian(const RobotModel& model, const JointVector& theta) {
  return end_effector_jacobian(model, forward_kinematics(model, theta));
}

// Gravitational potential of links plus a point payload at the end effector,
// up to an additive constant.
inline double potential_energy(const RobotModel& model, const JointVector& theta,
                               double payload_mass) {
  const FrameSet f = forward_kinematics(model, theta);
  return kGravity * (model.links[0].mass * f.upper_arm_com.z() +
                     model.links[1].mass * f.forearm_com.z() +
                     payload_mass * f.end_effector.z());
}

// Joint torque required to statically support the link weights and payload,
// i.e. the gradient of the gravitational potential with respect to theta.
inline JointVector gravity_torque(const RobotModel& model, const FrameSet& f,
                                  double payload_mass) {
  if (payload_mass < 0.0) throw std::invalid_argument("payload_mass must be >= 0");
  JointVector tau = JointVector::Zero(model.n_joints);
  const struct {
    Vec3 position;
    double mass;
    int moved_by;  // number of proximal joints that move this mass point
  } points[] = {
      {f.upper_arm_com, model.links[0].mass, 3},
      {f.forearm_com, model.links[1].mass, 5},
      {f.end_effector, payload_mass, 5},
  };
  for (const auto& p : points) {
    if (p.mass == 0.0) continue;
    for (int k = 0; k < p.moved_by; ++k) {
      const Vec3 dpos = f.joint_axis[k].cross(p.position - f.joint_pivot[k]);
      tau[k] += p.mass * kGravity * dpos.z();
    }
  }
  return tau;
}

inline JointVector gravity_torque(const RobotModel& model, const JointVector& theta,
                                  double payload_mass) {
  return gravity_torque(model, forward_kinematics(model, theta), payload_mass);
}

// Torque the muscles must produce for the current task: static gravity
// support plus the torque needed to exert `exerted_force` (N, world frame)
// with the end effector.
inline JointVector necessary_torque(const RobotModel& model, const JointVector& theta,
                                    const Vec3& exerted_force, double payload_mass) {
  JointVector tau = gravity_torque(model, theta, payload_mass);
  if (exerted_force.squaredNorm() > 0.0)
    tau += end_effector_jacobian(model, theta).transpose() * exerted_force;
  return tau;
}

// Damped least-squares inverse kinematics for the end-effector position.
// Returns the clamped solution; `converged` reports whether the residual
// dropped below tol (m).
inline JointVector solve_ik(const RobotModel& model, const Vec3& target,
                            const JointVector& initial_guess, bool* converged = nullptr,
                            int max_iterations = 200, double tol = 1e-6) {
  JointVector theta = initial_guess;
  const double lambda2 = 0.05 * 0.05;
  bool ok = false;
  for (int it = 0; it < max_iterations; ++it) {
    const Vec3 err = target - end_effector_position(model, theta);
    if (err.norm() < tol) {
      ok = true;
      break;
    }
    const Matrix j = end_effector_jacobian(model, theta);
    const Mat3 jjt = j * j.transpose() + lambda2 * Mat3::Identity();
    theta += j.transpose() * jjt.ldlt().solve(err);
    theta = theta.cwiseMax(model.joint_limit_min).cwiseMin(model.joint_limit_max);
  }
  if (converged) *converged = ok;
  return theta;
}

}  // namespace trelax

#endif  // TRELAX_KINEMATICS_HPP_
