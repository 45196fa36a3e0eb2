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

#ifndef TRELAX_CONFIG_HPP_
#define TRELAX_CONFIG_HPP_

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "trelax/control.hpp"
#include "trelax/model.hpp"
#include "trelax/plant.hpp"
#include "trelax/scenarios.hpp"
#include "trelax/types.hpp"

namespace trelax {

struct AppConfig {
  RobotModel model;
  PlantConfig plant;
  ControlConfig control;
  ScenarioParams scenario;
};

inline AppConfig default_config() {
  AppConfig cfg;
  cfg.model = default_model();
  cfg.plant = default_plant_config(cfg.model.n_joints);
  cfg.control = default_control_config(cfg.model.n_muscles);
  cfg.scenario = default_scenario_params();
  return cfg;
}

// Runs every structural invariant; throws ConfigError on the first failure.
inline void validate_config(const AppConfig& cfg) {
  try {
    cfg.model.validate();
    cfg.plant.validate(cfg.model.n_joints);
    cfg.control.validate(cfg.model.n_muscles);
    cfg.scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace detail {

struct ConfigEntry {
  int line;
  std::string key;
  std::string value;
};

inline std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  const auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  return std::string(s.substr(begin, end - begin + 1));
}

inline std::vector<ConfigEntry> tokenize_config(std::string_view text) {
  std::vector<ConfigEntry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'section.key = value'", line_no);
    ConfigEntry e{line_no, trim(std::string_view(stripped).substr(0, eq)),
                  trim(std::string_view(stripped).substr(eq + 1))};
    if (e.key.empty() || e.value.empty())
      throw ConfigError("expected 'section.key = value'", line_no);
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<double> parse_numbers(const ConfigEntry& e) {
  std::vector<double> values;
  std::istringstream in(e.value);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + token + "' for key " + e.key, e.line);
    }
  }
  if (values.empty()) throw ConfigError("no value for key " + e.key, e.line);
  return values;
}

inline double parse_scalar(const ConfigEntry& e) {
  const std::vector<double> v = parse_numbers(e);
  if (v.size() != 1) throw ConfigError("key " + e.key + " expects one value", e.line);
  return v[0];
}

inline int parse_int(const ConfigEntry& e) {
  const double v = parse_scalar(e);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("key " + e.key + " expects an integer", e.line);
  return i;
}

inline Eigen::VectorXd parse_vector(const ConfigEntry& e, int expected,
                                    bool allow_broadcast = false) {
  const std::vector<double> v = parse_numbers(e);
  if (allow_broadcast && v.size() == 1)
    return Eigen::VectorXd::Constant(expected, v[0]);
  if (static_cast<int>(v.size()) != expected)
    throw ConfigError("key " + e.key + " expects " + std::to_string(expected) + " values",
                      e.line);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expected);
}

// Shortest round-trip decimal form.
inline std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(const Eigen::VectorXd& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace detail

// Applies `section.key = value` lines over cfg. Unknown keys and malformed
// values are hard errors carrying the line number.
inline void apply_config_text(AppConfig& cfg, std::string_view text) {
  using detail::ConfigEntry;
  const std::vector<ConfigEntry> entries = detail::tokenize_config(text);

  // Size changes first so vector-valued keys know their expected lengths.
  for (const ConfigEntry& e : entries) {
    if (e.key == "model.n_joints" || e.key == "model.n_muscles") {
      const int n = detail::parse_int(e);
      if (n < 1) throw ConfigError(e.key + " must be >= 1", e.line);
      if (e.key == "model.n_joints") cfg.model.n_joints = n;
      else cfg.model.n_muscles = n;
    }
  }
  const int nj = cfg.model.n_joints;
  const int nm = cfg.model.n_muscles;
  if (cfg.model.moment_arms.rows() != nm || cfg.model.moment_arms.cols() != nj) {
    cfg.model.moment_arms.setZero(nm, nj);
    cfg.model.rest_lengths = MuscleVector::Constant(nm, 300.0);
    cfg.model.joint_limit_min = JointVector::Constant(nj, -2.0);
    cfg.model.joint_limit_max = JointVector::Constant(nj, 2.0);
    cfg.plant.joint_damping = JointVector::Constant(nj, cfg.plant.joint_damping[0]);
    cfg.control.t_bias = MuscleVector::Constant(nm, cfg.control.t_bias[0]);
    cfg.scenario.dumbbell_hold_posture = JointVector::Zero(nj);
  }

  for (const ConfigEntry& e : entries) {
    if (e.key == "model.n_joints" || e.key == "model.n_muscles") continue;

    static constexpr std::string_view kRowPrefix = "model.moment_arms_row";
    if (e.key.size() > kRowPrefix.size() && e.key.rfind(kRowPrefix, 0) == 0) {
      int row = -1;
      const std::string_view suffix = std::string_view(e.key).substr(kRowPrefix.size());
      const auto res = std::from_chars(suffix.data(), suffix.data() + suffix.size(), row);
      if (res.ec != std::errc() || res.ptr != suffix.data() + suffix.size() || row < 0 ||
          row >= nm)
        throw ConfigError("bad moment arm row in key " + e.key, e.line);
      cfg.model.moment_arms.row(row) = detail::parse_vector(e, nj).transpose();
      continue;
    }

    if (e.key == "model.rest_lengths") cfg.model.rest_lengths = detail::parse_vector(e, nm);
    else if (e.key == "model.link_lengths") {
      const Eigen::VectorXd v = detail::parse_vector(e, 2);
      cfg.model.links[0].length = v[0];
      cfg.model.links[1].length = v[1];
    } else if (e.key == "model.link_masses") {
      const Eigen::VectorXd v = detail::parse_vector(e, 2);
      cfg.model.links[0].mass = v[0];
      cfg.model.links[1].mass = v[1];
    } else if (e.key == "model.link_com_offsets") {
      const Eigen::VectorXd v = detail::parse_vector(e, 2);
      cfg.model.links[0].com_offset = v[0];
      cfg.model.links[1].com_offset = v[1];
    } else if (e.key == "model.joint_limits_min")
      cfg.model.joint_limit_min = detail::parse_vector(e, nj, true);
    else if (e.key == "model.joint_limits_max")
      cfg.model.joint_limit_max = detail::parse_vector(e, nj, true);
    else if (e.key == "model.end_effector_offset")
      cfg.model.end_effector_offset = detail::parse_scalar(e);
    else if (e.key == "plant.joint_damping")
      cfg.plant.joint_damping = detail::parse_vector(e, nj, true);
    else if (e.key == "plant.joint_inertia") cfg.plant.joint_inertia = detail::parse_scalar(e);
    else if (e.key == "plant.friction_band") cfg.plant.friction_band = detail::parse_scalar(e);
    else if (e.key == "plant.thermal_heating_coeff")
      cfg.plant.thermal_heating_coeff = detail::parse_scalar(e);
    else if (e.key == "plant.thermal_reference_tension")
      cfg.plant.thermal_reference_tension = detail::parse_scalar(e);
    else if (e.key == "plant.thermal_cooling_time_constant")
      cfg.plant.thermal_cooling_time_constant = detail::parse_scalar(e);
    else if (e.key == "plant.thermal_ambient")
      cfg.plant.thermal_ambient = detail::parse_scalar(e);
    else if (e.key == "plant.dt") cfg.plant.dt = detail::parse_scalar(e);
    else if (e.key == "plant.contact_stiffness")
      cfg.plant.contact_stiffness = detail::parse_scalar(e);
    else if (e.key == "plant.contact_damping")
      cfg.plant.contact_damping = detail::parse_scalar(e);
    else if (e.key == "control.t_min") cfg.control.t_min = detail::parse_scalar(e);
    else if (e.key == "control.delta_l_plus")
      cfg.control.delta_l_plus = detail::parse_scalar(e);
    else if (e.key == "control.delta_l_minus")
      cfg.control.delta_l_minus = detail::parse_scalar(e);
    else if (e.key == "control.delta_l_max") cfg.control.delta_l_max = detail::parse_scalar(e);
    else if (e.key == "control.delta_theta_max")
      cfg.control.delta_theta_max = detail::parse_scalar(e);
    else if (e.key == "control.k_stiff") cfg.control.k_stiff = detail::parse_scalar(e);
    else if (e.key == "control.t_bias")
      cfg.control.t_bias = detail::parse_vector(e, nm, true);
    else if (e.key == "control.estimator_rate")
      cfg.control.estimator_rate = detail::parse_int(e);
    else if (e.key == "control.control_rate") cfg.control.control_rate = detail::parse_int(e);
    else if (e.key == "control.qp_w1") cfg.control.qp_weights.w1_scale = detail::parse_scalar(e);
    else if (e.key == "control.qp_w2") cfg.control.qp_weights.w2_scale = detail::parse_scalar(e);
    else if (e.key == "control.qp_tol") cfg.control.qp_tol = detail::parse_scalar(e);
    else if (e.key == "scenario.basic_num_waypoints")
      cfg.scenario.basic_num_waypoints = detail::parse_int(e);
    else if (e.key == "scenario.basic_move_duration")
      cfg.scenario.basic_move_duration = detail::parse_scalar(e);
    else if (e.key == "scenario.basic_hold_duration")
      cfg.scenario.basic_hold_duration = detail::parse_scalar(e);
    else if (e.key == "scenario.dumbbell_payload")
      cfg.scenario.dumbbell_payload = detail::parse_scalar(e);
    else if (e.key == "scenario.dumbbell_hold_duration")
      cfg.scenario.dumbbell_hold_duration = detail::parse_scalar(e);
    else if (e.key == "scenario.dumbbell_hold_posture")
      cfg.scenario.dumbbell_hold_posture = detail::parse_vector(e, nj);
    else if (e.key == "scenario.desk_payload")
      cfg.scenario.desk_payload = detail::parse_scalar(e);
    else if (e.key == "scenario.desk_move_duration")
      cfg.scenario.desk_move_duration = detail::parse_scalar(e);
    else if (e.key == "scenario.desk_hold_duration")
      cfg.scenario.desk_hold_duration = detail::parse_scalar(e);
    else if (e.key == "scenario.desk_plane_offset")
      cfg.scenario.desk_plane_offset = detail::parse_scalar(e);
    else if (e.key == "scenario.handle_center") {
      const Eigen::VectorXd v = detail::parse_vector(e, 3);
      cfg.scenario.handle_center = Vec3(v[0], v[1], v[2]);
    } else if (e.key == "scenario.handle_radius")
      cfg.scenario.handle_radius = detail::parse_scalar(e);
    else if (e.key == "scenario.handle_grip_bias")
      cfg.scenario.handle_grip_bias = detail::parse_scalar(e);
    else if (e.key == "scenario.handle_cycles")
      cfg.scenario.handle_cycles = detail::parse_int(e);
    else if (e.key == "scenario.handle_rotate_duration")
      cfg.scenario.handle_rotate_duration = detail::parse_scalar(e);
    else if (e.key == "scenario.handle_hold_center")
      cfg.scenario.handle_hold_center = detail::parse_scalar(e);
    else if (e.key == "scenario.handle_hold_side")
      cfg.scenario.handle_hold_side = detail::parse_scalar(e);
    else
      throw ConfigError("unknown key '" + e.key + "'", e.line);
  }
}

inline AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  AppConfig cfg = default_config();
  apply_config_text(cfg, buffer.str());
  return cfg;
}

// Canonical listing of every key with its effective value. validate prints
// this, and the shipped default config file is exactly the output for the
// built-in defaults.
inline std::string format_effective_config(const AppConfig& cfg) {
  using detail::fmt;
  std::ostringstream out;
  out << "# tendon-relax configuration (all keys, effective values)\n";
  out << "model.n_joints = " << cfg.model.n_joints << "\n";
  out << "model.n_muscles = " << cfg.model.n_muscles << "\n";
  for (int i = 0; i < cfg.model.n_muscles; ++i)
    out << "model.moment_arms_row" << i << " = "
        << fmt(cfg.model.moment_arms.row(i).transpose()) << "\n";
  out << "model.rest_lengths = " << fmt(cfg.model.rest_lengths) << "\n";
  out << "model.link_lengths = " << fmt(cfg.model.links[0].length) << " "
      << fmt(cfg.model.links[1].length) << "\n";
  out << "model.link_masses = " << fmt(cfg.model.links[0].mass) << " "
      << fmt(cfg.model.links[1].mass) << "\n";
  out << "model.link_com_offsets = " << fmt(cfg.model.links[0].com_offset) << " "
      << fmt(cfg.model.links[1].com_offset) << "\n";
  out << "model.joint_limits_min = " << fmt(cfg.model.joint_limit_min) << "\n";
  out << "model.joint_limits_max = " << fmt(cfg.model.joint_limit_max) << "\n";
  out << "model.end_effector_offset = " << fmt(cfg.model.end_effector_offset) << "\n";
  out << "plant.joint_damping = " << fmt(cfg.plant.joint_damping) << "\n";
  out << "plant.joint_inertia = " << fmt(cfg.plant.joint_inertia) << "\n";
  out << "plant.friction_band = " << fmt(cfg.plant.friction_band) << "\n";
  out << "plant.thermal_heating_coeff = " << fmt(cfg.plant.thermal_heating_coeff) << "\n";
  out << "plant.thermal_reference_tension = " << fmt(cfg.plant.thermal_reference_tension)
      << "\n";
  out << "plant.thermal_cooling_time_constant = "
      << fmt(cfg.plant.thermal_cooling_time_constant) << "\n";
  out << "plant.thermal_ambient = " << fmt(cfg.plant.thermal_ambient) << "\n";
  out << "plant.dt = " << fmt(cfg.plant.dt) << "\n";
  out << "plant.contact_stiffness = " << fmt(cfg.plant.contact_stiffness) << "\n";
  out << "plant.contact_damping = " << fmt(cfg.plant.contact_damping) << "\n";
  out << "control.t_min = " << fmt(cfg.control.t_min) << "\n";
  out << "control.delta_l_plus = " << fmt(cfg.control.delta_l_plus) << "\n";
  out << "control.delta_l_minus = " << fmt(cfg.control.delta_l_minus) << "\n";
  out << "control.delta_l_max = " << fmt(cfg.control.delta_l_max) << "\n";
  out << "control.delta_theta_max = " << fmt(cfg.control.delta_theta_max) << "\n";
  out << "control.k_stiff = " << fmt(cfg.control.k_stiff) << "\n";
  out << "control.t_bias = " << fmt(cfg.control.t_bias) << "\n";
  out << "control.estimator_rate = " << cfg.control.estimator_rate << "\n";
  out << "control.control_rate = " << cfg.control.control_rate << "\n";
  out << "control.qp_w1 = " << fmt(cfg.control.qp_weights.w1_scale) << "\n";
  out << "control.qp_w2 = " << fmt(cfg.control.qp_weights.w2_scale) << "\n";
  out << "control.qp_tol = " << fmt(cfg.control.qp_tol) << "\n";
  out << "scenario.basic_num_waypoints = " << cfg.scenario.basic_num_waypoints << "\n";
  out << "scenario.basic_move_duration = " << fmt(cfg.scenario.basic_move_duration) << "\n";
  out << "scenario.basic_hold_duration = " << fmt(cfg.scenario.basic_hold_duration) << "\n";
  out << "scenario.dumbbell_payload = " << fmt(cfg.scenario.dumbbell_payload) << "\n";
  out << "scenario.dumbbell_hold_duration = " << fmt(cfg.scenario.dumbbell_hold_duration)
      << "\n";
  out << "scenario.dumbbell_hold_posture = " << fmt(cfg.scenario.dumbbell_hold_posture)
      << "\n";
  out << "scenario.desk_payload = " << fmt(cfg.scenario.desk_payload) << "\n";
  out << "scenario.desk_move_duration = " << fmt(cfg.scenario.desk_move_duration) << "\n";
  out << "scenario.desk_hold_duration = " << fmt(cfg.scenario.desk_hold_duration) << "\n";
  out << "scenario.desk_plane_offset = " << fmt(cfg.scenario.desk_plane_offset) << "\n";
  out << "scenario.handle_center = " << fmt(cfg.scenario.handle_center.x()) << " "
      << fmt(cfg.scenario.handle_center.y()) << " " << fmt(cfg.scenario.handle_center.z())
      << "\n";
  out << "scenario.handle_radius = " << fmt(cfg.scenario.handle_radius) << "\n";
  out << "scenario.handle_grip_bias = " << fmt(cfg.scenario.handle_grip_bias) << "\n";
  out << "scenario.handle_cycles = " << cfg.scenario.handle_cycles << "\n";
  out << "scenario.handle_rotate_duration = " << fmt(cfg.scenario.handle_rotate_duration)
      << "\n";
  out << "scenario.handle_hold_center = " << fmt(cfg.scenario.handle_hold_center) << "\n";
  out << "scenario.handle_hold_side = " << fmt(cfg.scenario.handle_hold_side) << "\n";
  return out.str();
}

}  // namespace trelax

#endif  // TRELAX_CONFIG_HPP_
