#pragma once

#include "fracpot/experiments.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fracpot {

// All floating-point output uses the shortest decimal form that parses back
// to the exact same double.
std::string format_full(double x);

// Measurement file: eight `key,value` header lines (alpha, T, N, x0,
// delta_percent, epsilon, seed, g0) followed by N lines `t_n,g_delta(t_n)`.
struct MeasurementFile {
  double alpha = 0.5;
  Measurement meas;
};

void write_measurement(const std::string& path, const MeasurementFile& mf);
MeasurementFile read_measurement(const std::string& path);

// CSV emission for experiment outputs.
void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_potential_csv(const std::string& path, const TimeGrid& grid,
                         const Eigen::VectorXd& rho,
                         const Eigen::VectorXd* rho_true = nullptr);
void write_observation_csv(const std::string& path, const TimeGrid& grid,
                           double g0, const Eigen::VectorXd& g);
void write_iteration_csv(const std::string& path, const ReconstructionReport& report);

// Run manifest: JSON carrying the subcommand, every resolved parameter, the
// output files, and the library version.  `fracpot replay <manifest>` re-runs
// the recorded command and reproduces the outputs byte for byte.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& params,
                    const std::vector<std::string>& outputs);

struct Manifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> outputs;
};
Manifest read_manifest(const std::string& path);

extern const char* const kVersion;

}  // namespace fracpot
