#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "sirflock/integrator.hpp"

namespace sirflock {

struct RunReport;

// CSV schemas (all numbers in shortest round-trip form, particle indices 0-based):
//
//   trajectory:  t,particle,S,I,R,x1,...,xd
//   diagnostics: t,d_min,d_max,total_I,mean_I,com_1,...,com_d,max_speed
//   plot data:   t,log_total_I,minus_lambda_t,log_bound
//
// In plot data, minus_lambda_t = -lambda t and log_bound = ln N - lambda t;
// both are "nan" when the decay hypothesis fails.

void write_trajectory(const Trajectory& traj, std::ostream& out);
void write_diagnostics(const Trajectory& traj, std::ostream& out);
void write_plot_data(const Trajectory& traj, std::optional<double> lambda, std::ostream& out);
void write_report(const RunReport& report, std::ostream& out);

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);
void write_diagnostics(const Trajectory& traj, const std::filesystem::path& path);
void write_plot_data(const Trajectory& traj, std::optional<double> lambda, const std::filesystem::path& path);
void write_report(const RunReport& report, const std::filesystem::path& path);

} // namespace sirflock
