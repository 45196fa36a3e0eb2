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

#ifndef TRELAX_TRACE_IO_HPP_
#define TRELAX_TRACE_IO_HPP_

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trelax/scenarios.hpp"
#include "trelax/types.hpp"

namespace trelax {

namespace detail {

// Locale-independent, 9 significant digits.
inline void append_number(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  out.append(buf, res.ptr);
}

inline void append_block(std::string& out, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) {
    out.push_back(',');
    append_number(out, v[i]);
  }
}

}  // namespace detail

// Temp-file-plus-rename so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string trace_csv_header(int n_joints, int n_muscles) {
  std::ostringstream h;
  h << "time";
  auto block = [&](const std::string& stem, int count) {
    for (int i = 0; i < count; ++i) h << ',' << stem << '_' << i;
  };
  block("theta", n_joints);
  block("theta_target", n_joints);
  block("T", n_muscles);
  block("T_target", n_muscles);
  block("T_nec", n_muscles);
  block("C", n_muscles);
  block("dl", n_muscles);
  h << ",mode,contact_fn";
  return h.str();
}

inline std::string format_trace_csv(const std::vector<TraceRecord>& records, int n_joints,
                                    int n_muscles) {
  std::string out = trace_csv_header(n_joints, n_muscles);
  out.push_back('\n');
  for (const TraceRecord& r : records) {
    detail::append_number(out, r.time);
    detail::append_block(out, r.theta);
    detail::append_block(out, r.theta_target);
    detail::append_block(out, r.tension);
    detail::append_block(out, r.t_target);
    detail::append_block(out, r.t_necessary);
    detail::append_block(out, r.temperature);
    detail::append_block(out, r.delta_l);
    out.push_back(',');
    out += to_string(r.mode);
    out.push_back(',');
    detail::append_number(out, r.contact_fn);
    out.push_back('\n');
  }
  return out;
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const std::vector<TraceRecord>& records, int n_joints,
                            int n_muscles) {
  write_file_atomic(path, format_trace_csv(records, n_joints, n_muscles));
}

inline std::string format_summary(const ComparisonSummary& s) {
  std::ostringstream out;
  out.precision(6);
  out << "scenario: " << s.scenario_name << " (seed " << s.seed << ")\n";
  out << "mean static ||T||_2 [N]     with: " << s.mean_static_tension_with
      << "   without: " << s.mean_static_tension_without << "\n";
  out << "peak temperature [degC]     with: " << s.peak_temperature_with
      << "   without: " << s.peak_temperature_without << "\n";
  out << "final hold joint error [rad] with: " << s.final_hold_error_with
      << "   without: " << s.final_hold_error_without << "\n";
  out << "cumulative temp rise [degC] with: " << s.cumulative_temp_rise_with
      << "   without: " << s.cumulative_temp_rise_without << "\n";
  out << "delta_l saturation fraction (with): " << s.delta_l_saturation_fraction << "\n";
  return out.str();
}

inline void write_summary(const std::filesystem::path& path, const ComparisonSummary& s) {
  write_file_atomic(path, format_summary(s));
}

// Gnuplot script with the panels the traces are usually inspected by:
// total tension, joint angles, temperatures, and accumulated relaxation.
inline std::string format_plot_script(const std::string& with_csv,
                                      const std::optional<std::string>& without_csv,
                                      int n_joints, int n_muscles) {
  const int t0 = 2 + 2 * n_joints;            // first tension column
  const int c0 = t0 + 3 * n_muscles;          // first temperature column
  const int d0 = c0 + n_muscles;              // first delta_l column
  std::ostringstream norm;
  norm << "sqrt(";
  for (int i = 0; i < n_muscles; ++i) {
    if (i) norm << "+";
    norm << "$" << (t0 + i) << "**2";
  }
  norm << ")";

  std::ostringstream out;
  out << "set datafile separator ','\n";
  out << "set key outside\n";
  out << "set multiplot layout 2,2 title 'tendon-relax trace'\n";
  out << "set xlabel 'time [s]'\n";
  out << "set ylabel '||T||_2 [N]'\n";
  out << "plot '" << with_csv << "' using 1:(" << norm.str() << ") with lines title 'with'";
  if (without_csv)
    out << ", '" << *without_csv << "' using 1:(" << norm.str()
        << ") with lines title 'without'";
  out << "\n";
  out << "set ylabel 'joint angle [rad]'\n";
  out << "plot ";
  for (int j = 0; j < n_joints; ++j) {
    if (j) out << ", ";
    out << "'" << with_csv << "' using 1:" << (2 + j) << " with lines title 'theta_" << j
        << "'";
  }
  out << "\n";
  out << "set ylabel 'muscle temperature [degC]'\n";
  out << "plot ";
  for (int i = 0; i < n_muscles; ++i) {
    if (i) out << ", ";
    out << "'" << with_csv << "' using 1:" << (c0 + i) << " with lines notitle";
  }
  out << "\n";
  out << "set ylabel 'delta_l [mm]'\n";
  out << "plot ";
  for (int i = 0; i < n_muscles; ++i) {
    if (i) out << ", ";
    out << "'" << with_csv << "' using 1:" << (d0 + i) << " with lines notitle";
  }
  out << "\n";
  out << "unset multiplot\n";
  return out.str();
}

inline void write_plot_script(const std::filesystem::path& path, const std::string& with_csv,
                              const std::optional<std::string>& without_csv, int n_joints,
                              int n_muscles) {
  write_file_atomic(path, format_plot_script(with_csv, without_csv, n_joints, n_muscles));
}

}  // namespace trelax

#endif  // TRELAX_TRACE_IO_HPP_
