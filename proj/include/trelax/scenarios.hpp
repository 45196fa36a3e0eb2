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

#ifndef TRELAX_SCENARIOS_HPP_
#define TRELAX_SCENARIOS_HPP_

#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "trelax/control.hpp"
#include "trelax/plant.hpp"
#include "trelax/types.hpp"

namespace trelax {

// A waypoint is reached by linear joint-space interpolation from the
// previous target over move_duration, then held for hold_duration. The first
// waypoint is the initial posture and only its hold applies.
struct Waypoint {
  JointVector theta_target;
  double move_duration = 0.0;  // s
  double hold_duration = 0.0;  // s
};

struct Scenario {
  std::string name;
  double payload_mass = 0.0;  // kg at the end effector
  ContactSet contacts;
  std::vector<Waypoint> waypoints;
  std::uint64_t seed = 0;
  double total_time = 0.0;  // s
  JointVector initial_posture;  // empty: start at the first waypoint target
};

// Knobs of the experiment set. Durations and payloads mirror the published
// experiment protocol; postures and geometry are conventions of this
// simulator.
struct ScenarioParams {
  int basic_num_waypoints = 8;
  double basic_move_duration = 3.0;  // s
  double basic_hold_duration = 3.0;  // s
  double dumbbell_payload = 3.6;     // kg
  double dumbbell_hold_duration = 120.0;  // s
  JointVector dumbbell_hold_posture;      // rad; default set below
  double desk_payload = 5.0;         // kg
  double desk_move_duration = 8.0;   // s
  double desk_hold_duration = 15.0;  // s
  double desk_plane_offset = 0.012;  // m, plane shift from the state-2 hand
                                     // height; places the surface so the
                                     // loaded state-2 posture rests with
                                     // minimal fight and state 1 presses in
  Vec3 handle_center = Vec3(0.42, 0.05, -0.05);  // m
  double handle_radius = 0.15;       // m
  double handle_grip_bias = 0.015;   // m, commanded grip offset toward the hub,
                                     // standing in for recognition error
  int handle_cycles = 5;
  double handle_rotate_duration = 5.0;  // s per 45 deg leg
  double handle_hold_center = 5.0;      // s at 0 deg
  double handle_hold_side = 3.0;        // s at +/-45 deg

  void validate() const {
    if (basic_num_waypoints < 1) throw std::invalid_argument("scenario: need >= 1 waypoint");
    if (basic_move_duration <= 0 || basic_hold_duration <= 0 || dumbbell_hold_duration <= 0 ||
        desk_move_duration <= 0 || desk_hold_duration <= 0 || handle_rotate_duration <= 0 ||
        handle_hold_center <= 0 || handle_hold_side <= 0)
      throw std::invalid_argument("scenario: durations must be positive");
    if (dumbbell_payload < 0 || desk_payload < 0)
      throw std::invalid_argument("scenario: payloads must be >= 0");
    if (handle_radius <= 0) throw std::invalid_argument("scenario: handle_radius must be > 0");
    if (handle_grip_bias < 0 || handle_grip_bias >= handle_radius)
      throw std::invalid_argument("scenario: handle_grip_bias must be in [0, handle_radius)");
    if (handle_cycles < 1) throw std::invalid_argument("scenario: handle_cycles must be >= 1");
  }
};

inline ScenarioParams default_scenario_params() {
  ScenarioParams p;
  p.dumbbell_hold_posture = JointVector::Zero(5);
  p.dumbbell_hold_posture << 0.0, -0.10, 0.0, -0.50, 0.0;
  return p;
}

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "basic",       "dumbbell",    "desk_rest_1", "desk_rest_2",
      "desk_rest_3", "desk_rest_4", "desk_rest_5", "handle"};
  return names;
}

namespace detail {

inline double schedule_total(const std::vector<Waypoint>& wps) {
  double t = wps.front().hold_duration;
  for (std::size_t i = 1; i < wps.size(); ++i)
    t += wps[i].move_duration + wps[i].hold_duration;
  return t;
}

inline JointVector desk_state_target(int state) {
  // (shoulder pitch, elbow pitch) pairs in degrees for states 1..5.
  static constexpr double kStates[5][2] = {
      {-45, -80}, {-45, -85}, {-45, -90}, {-50, -90}, {-50, -95}};
  JointVector t = JointVector::Zero(5);
  t[1] = kStates[state - 1][0] * M_PI / 180.0;
  t[3] = kStates[state - 1][1] * M_PI / 180.0;
  return t;
}

inline Vec3 handle_grip_point(const ScenarioParams& p, double angle_rad, double radius) {
  // Angle 0 is the bottom of the wheel (the stable point of the circular
  // guide under gravity); positive angles move the grip toward +y.
  return p.handle_center + radius * Vec3(0.0, std::sin(angle_rad), -std::cos(angle_rad));
}

}  // namespace detail

// Builds one of the named experiments. Waypoints are deterministic in
// (name, seed); the basic scenario draws its random postures inside 70% of
// the joint limits.
inline Scenario build_scenario(const std::string& name, std::uint64_t seed,
                               const RobotModel& model, const ScenarioParams& params,
                               const PlantConfig& plant_cfg) {
  params.validate();
  Scenario sc;
  sc.name = name;
  sc.seed = seed;

  if (name == "basic") {
    JointVector home = JointVector::Zero(model.n_joints);
    home[1] = -0.35;
    home[3] = -0.52;
    sc.waypoints.push_back({home, 0.0, params.basic_hold_duration});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < params.basic_num_waypoints; ++i) {
      JointVector target(model.n_joints);
      for (int j = 0; j < model.n_joints; ++j) {
        const double mid = 0.5 * (model.joint_limit_min[j] + model.joint_limit_max[j]);
        const double half = 0.5 * (model.joint_limit_max[j] - model.joint_limit_min[j]);
        target[j] = mid + 0.7 * half * unit(rng);
      }
      sc.waypoints.push_back({target, params.basic_move_duration, params.basic_hold_duration});
    }
    // The battery ends back at the home posture.
    sc.waypoints.push_back({home, params.basic_move_duration, params.basic_hold_duration});
  } else if (name == "dumbbell") {
    sc.payload_mass = params.dumbbell_payload;
    JointVector start = JointVector::Zero(model.n_joints);
    start[1] = -0.02;
    start[3] = -0.08;
    JointVector hold = params.dumbbell_hold_posture;
    JointVector overshoot = hold;
    overshoot[1] -= 0.05;
    overshoot[3] -= 0.15;
    sc.waypoints.push_back({start, 0.0, 2.0});
    sc.waypoints.push_back({overshoot, 2.5, 1.5});
    sc.waypoints.push_back({hold, 1.5, params.dumbbell_hold_duration});
  } else if (name.rfind("desk_rest_", 0) == 0 && name.size() == 11 && name[10] >= '1' &&
             name[10] <= '5') {
    const int state = name[10] - '0';
    sc.payload_mass = params.desk_payload;
    JointVector approach = JointVector::Zero(model.n_joints);
    approach[1] = -30.0 * M_PI / 180.0;
    approach[3] = -60.0 * M_PI / 180.0;
    sc.waypoints.push_back({approach, 0.0, 2.0});
    sc.waypoints.push_back(
        {detail::desk_state_target(state), params.desk_move_duration, params.desk_hold_duration});
    // The plane is placed where the state-2 posture just touches once the
    // series sag is accounted for, so the five states sweep from pressing
    // into the surface to hovering above it.
    DeskContact desk;
    desk.height = end_effector_position(model, detail::desk_state_target(2)).z() +
                  params.desk_plane_offset;
    desk.stiffness = plant_cfg.contact_stiffness;
    desk.damping = plant_cfg.contact_damping;
    sc.contacts.desk = desk;
  } else if (name == "handle") {
    HandleContact handle;
    handle.center = params.handle_center;
    handle.radius = params.handle_radius;
    handle.stiffness = plant_cfg.contact_stiffness;
    handle.damping = plant_cfg.contact_damping;
    sc.contacts.handle = handle;

    const double quarter = 45.0 * M_PI / 180.0;
    // Commanded grips sit slightly inside the rim; the offset plays the role
    // of the recognition error between the commanded grasp and the real
    // wheel.
    const double command_radius = params.handle_radius - params.handle_grip_bias;
    JointVector guess = JointVector::Zero(model.n_joints);
    guess << 0.0, -0.7, 0.0, -1.0, 0.0;
    auto grip_waypoint = [&](double angle, double move, double hold) {
      bool ok = false;
      JointVector ik = solve_ik(
          model, detail::handle_grip_point(params, angle, command_radius), guess, &ok);
      if (!ok) throw std::invalid_argument("handle: grip point unreachable");
      guess = ik;
      return Waypoint{ik, move, hold};
    };
    sc.waypoints.push_back(grip_waypoint(0.0, 0.0, params.handle_hold_center));
    // The run begins with the hand actually on the rim, not at the biased
    // commanded point.
    bool on_rim = false;
    sc.initial_posture =
        solve_ik(model, detail::handle_grip_point(params, 0.0, params.handle_radius),
                 sc.waypoints.front().theta_target, &on_rim);
    if (!on_rim) throw std::invalid_argument("handle: rim start unreachable");
    for (int c = 0; c < params.handle_cycles; ++c) {
      sc.waypoints.push_back(
          grip_waypoint(quarter, params.handle_rotate_duration, params.handle_hold_side));
      sc.waypoints.push_back(
          grip_waypoint(0.0, params.handle_rotate_duration, params.handle_hold_center));
      sc.waypoints.push_back(
          grip_waypoint(-quarter, params.handle_rotate_duration, params.handle_hold_side));
      sc.waypoints.push_back(
          grip_waypoint(0.0, params.handle_rotate_duration, params.handle_hold_center));
    }
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }

  for (std::size_t i = 0; i < sc.waypoints.size(); ++i) {
    JointVector& target = sc.waypoints[i].theta_target;
    const JointVector clamped =
        target.cwiseMax(model.joint_limit_min).cwiseMin(model.joint_limit_max);
    if ((clamped.array() != target.array()).any())
      std::cerr << "warning: " << name << " waypoint " << i
                << " clamped to the joint limits\n";
    target = clamped;
  }
  sc.total_time = detail::schedule_total(sc.waypoints);
  return sc;
}

// Interpolated joint target at time t.
inline JointVector target_at(const Scenario& sc, double t) {
  double cursor = sc.waypoints.front().hold_duration;
  if (t < cursor) return sc.waypoints.front().theta_target;
  for (std::size_t i = 1; i < sc.waypoints.size(); ++i) {
    const Waypoint& wp = sc.waypoints[i];
    const JointVector& prev = sc.waypoints[i - 1].theta_target;
    if (t < cursor + wp.move_duration) {
      const double s = (t - cursor) / wp.move_duration;
      return prev + s * (wp.theta_target - prev);
    }
    cursor += wp.move_duration;
    if (t < cursor + wp.hold_duration) return wp.theta_target;
    cursor += wp.hold_duration;
  }
  return sc.waypoints.back().theta_target;
}

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

// Hold segments of the schedule, in order.
inline std::vector<TimeWindow> hold_windows(const Scenario& sc) {
  std::vector<TimeWindow> windows;
  double cursor = 0.0;
  windows.push_back({0.0, sc.waypoints.front().hold_duration});
  cursor = sc.waypoints.front().hold_duration;
  for (std::size_t i = 1; i < sc.waypoints.size(); ++i) {
    cursor += sc.waypoints[i].move_duration;
    windows.push_back({cursor, cursor + sc.waypoints[i].hold_duration});
    cursor += sc.waypoints[i].hold_duration;
  }
  return windows;
}

// One row per control tick.
struct TraceRecord {
  double time = 0.0;         // s
  JointVector theta;         // rad
  JointVector theta_target;  // rad
  MuscleVector tension;      // N, realized
  MuscleVector t_target;     // N
  MuscleVector t_necessary;  // N
  MuscleVector temperature;  // degC
  MuscleVector delta_l;      // mm
  MrcMode mode = MrcMode::kStatic;
  double contact_fn = 0.0;   // N
};

struct RunResult {
  std::vector<TraceRecord> records;
  bool diverged = false;
  std::string diagnostic;
};

// Full closed-loop run: plant substeps at 1/dt Hz, controller at the control
// rate, torque/QP refresh at the estimator rate. Disabling relaxation keeps
// every other code path identical with delta_l pinned to zero.
inline RunResult run_scenario(const Scenario& sc, bool relaxation_enabled,
                              const RobotModel& model, PlantConfig plant_cfg,
                              const ControlConfig& control_cfg) {
  model.validate();
  plant_cfg.payload_mass = sc.payload_mass;
  plant_cfg.validate(model.n_joints);
  control_cfg.validate(model.n_muscles);

  const double substeps_exact = 1.0 / (plant_cfg.dt * control_cfg.control_rate);
  const int substeps = static_cast<int>(std::lround(substeps_exact));
  if (substeps < 1 || std::abs(substeps_exact - substeps) > 1e-9)
    throw std::invalid_argument("run: control period must be a multiple of plant dt");

  RunResult result;
  const JointVector start_posture =
      sc.initial_posture.size() == model.n_joints ? sc.initial_posture : target_at(sc, 0.0);
  PlantState state = initial_state(model, start_posture, plant_cfg, control_cfg.t_bias);
  Controller controller(model, control_cfg, relaxation_enabled);

  const std::int64_t ticks =
      static_cast<std::int64_t>(std::llround(sc.total_time * control_cfg.control_rate));
  result.records.reserve(static_cast<std::size_t>(ticks));

  for (std::int64_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) / control_cfg.control_rate;
    const JointVector theta_target = target_at(sc, t);
    Controller::Sensors sensors{muscle_lengths(model, state.theta), state.tension,
                                state.theta};
    const ControllerOutputs out =
        controller.tick(theta_target, sensors, Vec3::Zero(), sc.payload_mass);

    TraceRecord rec;
    rec.time = t;
    rec.theta = state.theta;
    rec.theta_target = theta_target;
    rec.tension = state.tension;
    rec.t_target = out.t_target;
    rec.t_necessary = out.t_necessary;
    rec.temperature = state.temperature;
    rec.delta_l = controller.relaxation().delta_l;
    rec.mode = out.mode;
    rec.contact_fn = contact_normal_force(model, state, sc.contacts);
    result.records.push_back(std::move(rec));

    try {
      for (int s = 0; s < substeps; ++s)
        state = step(state, out.t_target, sc.contacts, model, plant_cfg);
    } catch (const SimulationDiverged& e) {
      result.diverged = true;
      result.diagnostic = e.what();
      break;
    }
  }
  return result;
}

// Windowed with/without comparison. Static statistics exclude the first
// settle_time of every hold.
struct ComparisonSummary {
  std::string scenario_name;
  std::uint64_t seed = 0;
  double mean_static_tension_with = 0.0;     // mean ||T||_2, N
  double mean_static_tension_without = 0.0;
  double peak_temperature_with = 0.0;        // degC
  double peak_temperature_without = 0.0;
  double final_hold_error_with = 0.0;        // mean ||theta - target||_2, rad
  double final_hold_error_without = 0.0;
  double cumulative_temp_rise_with = 0.0;    // sum over muscles of C_end - C_start
  double cumulative_temp_rise_without = 0.0;
  double delta_l_saturation_fraction = 0.0;  // with-run static ticks at the cap
};

namespace detail {

inline bool in_windows(const std::vector<TimeWindow>& windows, double t, double settle) {
  for (const TimeWindow& w : windows)
    if (t >= w.begin + settle && t < w.end) return true;
  return false;
}

}  // namespace detail

inline ComparisonSummary summarize(const std::vector<TraceRecord>& with_relaxation,
                                   const std::vector<TraceRecord>& without_relaxation,
                                   const Scenario& sc, double delta_l_max = 2.0,
                                   double settle_time = 0.5) {
  if (with_relaxation.size() != without_relaxation.size() || with_relaxation.empty())
    throw std::invalid_argument("summarize: traces do not match");
  for (std::size_t i = 0; i < with_relaxation.size(); i += 97) {
    if ((with_relaxation[i].theta_target.array() !=
         without_relaxation[i].theta_target.array())
            .any())
      throw std::invalid_argument("summarize: traces come from different schedules");
  }

  const std::vector<TimeWindow> holds = hold_windows(sc);
  const TimeWindow final_hold = holds.back();

  ComparisonSummary s;
  s.scenario_name = sc.name;
  s.seed = sc.seed;

  auto scan = [&](const std::vector<TraceRecord>& records, double& mean_static,
                  double& peak_temp, double& final_error, double& temp_rise) {
    double tension_sum = 0.0;
    std::int64_t tension_count = 0;
    double error_sum = 0.0;
    std::int64_t error_count = 0;
    peak_temp = 0.0;
    for (const TraceRecord& r : records) {
      if (detail::in_windows(holds, r.time, settle_time)) {
        tension_sum += r.tension.norm();
        ++tension_count;
      }
      if (r.time >= final_hold.begin + settle_time && r.time < final_hold.end) {
        error_sum += (r.theta - r.theta_target).norm();
        ++error_count;
      }
      peak_temp = std::max(peak_temp, r.temperature.maxCoeff());
    }
    mean_static = tension_count ? tension_sum / tension_count : 0.0;
    final_error = error_count ? error_sum / error_count : 0.0;
    temp_rise = (records.back().temperature - records.front().temperature).sum();
  };

  scan(with_relaxation, s.mean_static_tension_with, s.peak_temperature_with,
       s.final_hold_error_with, s.cumulative_temp_rise_with);
  scan(without_relaxation, s.mean_static_tension_without, s.peak_temperature_without,
       s.final_hold_error_without, s.cumulative_temp_rise_without);

  std::int64_t saturated = 0, static_cells = 0;
  for (const TraceRecord& r : with_relaxation) {
    if (!detail::in_windows(holds, r.time, settle_time)) continue;
    static_cells += r.delta_l.size();
    saturated += (r.delta_l.array() >= delta_l_max - 1e-12).count();
  }
  s.delta_l_saturation_fraction =
      static_cells ? static_cast<double>(saturated) / static_cells : 0.0;
  return s;
}

}  // namespace trelax

#endif  // TRELAX_SCENARIOS_HPP_
