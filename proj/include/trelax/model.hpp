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

#ifndef TRELAX_MODEL_HPP_
#define TRELAX_MODEL_HPP_

#include <vector>

#include "trelax/types.hpp"

namespace trelax {

// Rigid link in the serial chain: the upper arm hangs from the shoulder
// cluster, the forearm from the elbow cluster. com_offset is measured from
// the proximal joint along the link axis.
struct LinkParams {
  double length = 0.0;      // m
  double mass = 0.0;        // kg
  double com_offset = 0.0;  // m
};

// Geometric description of the tendon-driven arm. The routing matrix holds
// signed moment arms in meters: entry (i, j) is the moment arm of muscle i
// about joint j, and muscle path lengths follow the constant-moment-arm law
// l(theta) = rest_lengths - moment_arms * theta (reported in mm).
//
// Joint ordering: shoulder roll, shoulder pitch, shoulder yaw, elbow pitch,
// elbow yaw. At theta = 0 the arm hangs straight down.
struct RobotModel {
  int n_joints = 5;
  int n_muscles = 10;
  Matrix moment_arms;          // n_muscles x n_joints, m
  MuscleVector rest_lengths;   // mm, path lengths at theta = 0
  std::vector<LinkParams> links;  // upper arm, forearm
  JointVector joint_limit_min;    // rad
  JointVector joint_limit_max;    // rad
  double end_effector_offset = 0.05;  // m beyond the distal forearm end

  // Throws std::invalid_argument on the first violated structural invariant.
  void validate() const {
    if (n_joints < 1 || n_muscles < n_joints)
      throw std::invalid_argument("model: need n_muscles >= n_joints >= 1");
    if (moment_arms.rows() != n_muscles || moment_arms.cols() != n_joints)
      throw std::invalid_argument("model: moment_arms must be n_muscles x n_joints");
    if (rest_lengths.size() != n_muscles)
      throw std::invalid_argument("model: rest_lengths must have n_muscles entries");
    if ((rest_lengths.array() <= 0.0).any())
      throw std::invalid_argument("model: rest_lengths must be strictly positive");
    if (links.size() != 2)
      throw std::invalid_argument("model: expected exactly two links");
    for (const LinkParams& link : links) {
      if (link.length <= 0.0 || link.mass < 0.0 || link.com_offset < 0.0 ||
          link.com_offset > link.length)
        throw std::invalid_argument("model: bad link geometry");
    }
    if (joint_limit_min.size() != n_joints || joint_limit_max.size() != n_joints)
      throw std::invalid_argument("model: joint limits must have n_joints entries");
    if ((joint_limit_min.array() >= joint_limit_max.array()).any())
      throw std::invalid_argument("model: joint_limit_min must be below joint_limit_max");
    if (end_effector_offset < 0.0)
      throw std::invalid_argument("model: end_effector_offset must be >= 0");
    // Antagonism: every joint needs at least one muscle pulling each way.
    for (int j = 0; j < n_joints; ++j) {
      if (moment_arms.col(j).minCoeff() >= 0.0 || moment_arms.col(j).maxCoeff() <= 0.0)
        throw std::invalid_argument("model: joint " + std::to_string(j) +
                                    " lacks an antagonistic muscle pair");
    }
  }
};

// Weights of the tension-distribution objective
// x' W1 x + (G' x + tau)' W2 (G' x + tau) with W1 = w1_scale * I and
// W2 = w2_scale * I.
struct QpWeights {
  double w1_scale = 1.0e-5;
  double w2_scale = 1.0;
};

// Default ten-muscle routing over the five-joint arm. Most muscles span two
// joints, the way shoulder muscles wrap a ball joint: a roll pair that also
// flexes the pitch axis, a pure pitch pair, roll-coupled yaw muscles,
// yaw-coupled elbow-yaw muscles, and a biarticular pair spanning shoulder
// pitch and elbow pitch that is the sole driver of the elbow pitch axis.
// Every joint column keeps muscles of both signs.
inline RobotModel default_model() {
  RobotModel m;
  m.n_joints = 5;
  m.n_muscles = 10;
  // Each joint column sums to zero (a balanced routing net), while the
  // ratios inside the couplings stay deliberately unequal.
  m.moment_arms.setZero(10, 5);
  m.moment_arms.row(0) << 0.025, 0.020, 0, 0, 0;
  m.moment_arms.row(1) << -0.025, -0.018, 0, 0, 0;
  m.moment_arms.row(2) << 0, 0.028, 0, 0, 0;
  m.moment_arms.row(3) << 0, -0.030, 0, 0, 0;
  m.moment_arms.row(4) << 0.018, 0, 0.020, 0, 0;
  m.moment_arms.row(5) << -0.018, 0, -0.020, 0, 0;
  m.moment_arms.row(6) << 0, 0, -0.015, 0, 0.016;
  m.moment_arms.row(7) << 0, 0, 0.015, 0, -0.016;
  m.moment_arms.row(8) << 0, 0.015, 0, 0.020, 0;
  m.moment_arms.row(9) << 0, -0.015, 0, -0.020, 0;
  m.rest_lengths.resize(10);
  m.rest_lengths << 280, 280, 320, 320, 250, 250, 200, 200, 420, 420;
  m.links = {{0.30, 0.9, 0.14}, {0.28, 0.68, 0.12}};
  m.joint_limit_min.resize(5);
  m.joint_limit_min << -0.55, -0.90, -0.55, -1.70, -0.55;
  m.joint_limit_max.resize(5);
  m.joint_limit_max << 0.55, 0.30, 0.55, 0.25, 0.55;
  m.end_effector_offset = 0.05;
  return m;
}

}  // namespace trelax

#endif  // TRELAX_MODEL_HPP_
