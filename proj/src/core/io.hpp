#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "core/detection.hpp"
#include "core/faults.hpp"
#include "core/stationary_model.hpp"
#include "core/weight_solver.hpp"

namespace owma::io {

// Shortest text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view where);
long long parse_int(std::string_view text, std::string_view where);
std::vector<std::string_view> split(std::string_view line, char sep);

// Header `set,j,x1..xp`; within a set j runs W..1.
void write_training(std::ostream& os, const TrainingSet& training);
TrainingSet read_training(std::istream& is, const std::string& name = "training");

// Header `t,x1..xp`.
void write_observations(std::ostream& os, const ObservationSeries& series);
ObservationSeries read_observations(std::istream& is, const std::string& name = "observations");

// Header `t,value,limit,alarm`.
void write_statistics(std::ostream& os, const StatisticSeries& stats);
StatisticSeries read_statistics(std::istream& is, const std::string& name = "statistics");

// Header `q,mu,nu,f,xi_1..xi_p`.
void write_schedule(std::ostream& os, const FaultSchedule& schedule);
FaultSchedule read_schedule(std::istream& is, const std::string& name = "schedule");

// One weight per line, a_1 (newest sample) first; `#` lines are comments.
void write_weights(std::ostream& os, const SolverReport& report, double ridge = 0.0);
void write_weights(std::ostream& os, const Eigen::VectorXd& weights);
Eigen::VectorXd read_weights(std::istream& is, const std::string& name = "weights");

// `key=value` lines followed by the episode table.
void write_metrics(std::ostream& os, const DetectionMetrics& metrics);

// Chart summary as `key=value` lines; vectors and matrices are comma separated, row-major.
void write_chart(std::ostream& os, const ControlChart& chart);
ControlChart read_chart(std::istream& is, const std::string& name = "chart");

// File helpers; throw Error(io) when the file cannot be opened.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

TrainingSet load_training(const std::filesystem::path& path);
ObservationSeries load_observations(const std::filesystem::path& path);
StatisticSeries load_statistics(const std::filesystem::path& path);
FaultSchedule load_schedule(const std::filesystem::path& path);
Eigen::VectorXd load_weights(const std::filesystem::path& path);
ControlChart load_chart(const std::filesystem::path& path);

}  // namespace owma::io
