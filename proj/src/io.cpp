#include "fracpot/io.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracpot {

const char* const kVersion = "0.1.0";

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot open '" + path + "' for reading");
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("io: failed writing '" + path + "'");
}

// one `key,value` line; the key is fixed, so a mismatch means a foreign file
std::string header_value(std::istream& in, const std::string& key, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("io: '" + path + "' ends before header line '" + key + "'");
  }
  const auto comma = line.find(',');
  if (comma == std::string::npos || line.substr(0, comma) != key) {
    throw std::runtime_error("io: '" + path + "' expected header '" + key + "', got '" + line +
                             "'");
  }
  return line.substr(comma + 1);
}

double parse_double(const std::string& s, const std::string& path) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("io: '" + path + "' bad number '" + s + "'");
  }
  if (used != s.size()) throw std::runtime_error("io: '" + path + "' bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_full(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_measurement(const std::string& path, const MeasurementFile& mf) {
  std::ofstream out = open_out(path);
  out << "alpha," << format_full(mf.alpha) << "\n";
  out << "T," << format_full(mf.meas.grid.horizon) << "\n";
  out << "N," << mf.meas.grid.steps << "\n";
  out << "x0," << format_full(mf.meas.x0) << "\n";
  out << "delta_percent," << format_full(mf.meas.delta_percent) << "\n";
  out << "epsilon," << format_full(mf.meas.epsilon) << "\n";
  out << "seed," << mf.meas.seed << "\n";
  out << "g0," << format_full(mf.meas.g0) << "\n";
  for (int n = 1; n <= mf.meas.grid.steps; ++n) {
    out << format_full(mf.meas.grid.time(n)) << "," << format_full(mf.meas.g(n - 1)) << "\n";
  }
  finish(out, path);
}

MeasurementFile read_measurement(const std::string& path) {
  std::ifstream in = open_in(path);
  MeasurementFile mf;
  mf.alpha = parse_double(header_value(in, "alpha", path), path);
  mf.meas.grid.horizon = parse_double(header_value(in, "T", path), path);
  const double n_raw = parse_double(header_value(in, "N", path), path);
  mf.meas.grid.steps = static_cast<int>(n_raw);
  if (mf.meas.grid.steps < 1 || n_raw != mf.meas.grid.steps) {
    throw std::runtime_error("io: '" + path + "' bad step count");
  }
  mf.meas.x0 = parse_double(header_value(in, "x0", path), path);
  mf.meas.delta_percent = parse_double(header_value(in, "delta_percent", path), path);
  mf.meas.epsilon = parse_double(header_value(in, "epsilon", path), path);
  const std::string seed = header_value(in, "seed", path);
  try {
    mf.meas.seed = std::stoull(seed);
  } catch (const std::exception&) {
    throw std::runtime_error("io: '" + path + "' bad seed '" + seed + "'");
  }
  mf.meas.g0 = parse_double(header_value(in, "g0", path), path);

  mf.meas.g.resize(mf.meas.grid.steps);
  for (int n = 0; n < mf.meas.grid.steps; ++n) {
    std::string line;
    if (!std::getline(in, line)) {
      throw std::runtime_error("io: '" + path + "' has fewer samples than its header claims");
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("io: '" + path + "' bad sample line '" + line + "'");
    }
    mf.meas.g(n) = parse_double(line.substr(comma + 1), path);
  }
  return mf;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  out << "param,error,error_weighted,rate,steps,cells,iterations\n";
  for (const SweepRow& row : result.rows) {
    out << format_full(row.param) << "," << format_full(row.error) << ","
        << format_full(row.error_weighted) << "," << format_full(row.rate) << "," << row.steps
        << "," << row.cells << "," << row.iterations << "\n";
  }
  finish(out, path);
}

void write_potential_csv(const std::string& path, const TimeGrid& grid,
                         const Eigen::VectorXd& rho, const Eigen::VectorXd* rho_true) {
  std::ofstream out = open_out(path);
  out << (rho_true != nullptr ? "t,rho,rho_true\n" : "t,rho\n");
  for (int n = 1; n <= grid.steps; ++n) {
    out << format_full(grid.time(n)) << "," << format_full(rho(n - 1));
    if (rho_true != nullptr) out << "," << format_full((*rho_true)(n - 1));
    out << "\n";
  }
  finish(out, path);
}

void write_observation_csv(const std::string& path, const TimeGrid& grid, double g0,
                           const Eigen::VectorXd& g) {
  std::ofstream out = open_out(path);
  out << "t,g\n";
  out << "0," << format_full(g0) << "\n";
  for (int n = 1; n <= grid.steps; ++n) {
    out << format_full(grid.time(n)) << "," << format_full(g(n - 1)) << "\n";
  }
  finish(out, path);
}

void write_iteration_csv(const std::string& path, const ReconstructionReport& report) {
  std::ofstream out = open_out(path);
  const bool with_errors = !report.error_lp.empty();
  out << (with_errors ? "iteration,change,change_weighted,error,error_weighted\n"
                      : "iteration,change,change_weighted\n");
  for (std::size_t k = 0; k < report.change_lp.size(); ++k) {
    out << (k + 1) << "," << format_full(report.change_lp[k]) << ","
        << format_full(report.change_lp_weighted[k]);
    if (with_errors) {
      out << "," << format_full(report.error_lp[k]) << ","
          << format_full(report.error_lp_weighted[k]);
    }
    out << "\n";
  }
  finish(out, path);
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& params,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = kVersion;
  // parameter order matters for replay, so pairs go into an array
  j["params"] = nlohmann::json::array();
  for (const auto& [key, value] : params) {
    j["params"].push_back(nlohmann::json::array({key, value}));
  }
  j["outputs"] = outputs;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("io: '" + path + "' is not valid JSON: " + e.what());
  }
  Manifest m;
  try {
    m.command = j.at("command").get<std::string>();
    for (const auto& pair : j.at("params")) {
      m.params.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
    }
    for (const auto& output : j.at("outputs")) {
      m.outputs.push_back(output.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("io: '" + path + "' manifest malformed: " + e.what());
  }
  return m;
}

}  // namespace fracpot
