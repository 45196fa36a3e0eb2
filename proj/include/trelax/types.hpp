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

#ifndef TRELAX_TYPES_HPP_
#define TRELAX_TYPES_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace trelax {

// Joint-space quantities are N-dimensional (rad, rad/s, Nm), muscle-space
// quantities are M-dimensional. Muscle units depend on role: lengths in mm,
// tensions in N, temperatures in degC. Conversions between m and mm happen
// only inside the kinematics layer.
using JointVector = Eigen::VectorXd;
using MuscleVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Matrix = Eigen::MatrixXd;

inline constexpr double kGravity = 9.81;  // m/s^2

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : std::move(message)),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(std::string quantity, double time)
      : std::runtime_error("non-finite " + quantity + " at t=" + std::to_string(time) + " s"),
        quantity_(std::move(quantity)),
        time_(time) {}
  const std::string& quantity() const { return quantity_; }
  double time() const { return time_; }

 private:
  std::string quantity_;
  double time_;
};

}  // namespace trelax

#endif  // TRELAX_TYPES_HPP_
