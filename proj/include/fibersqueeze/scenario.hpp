#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fibersqueeze/fiber.hpp"
#include "fibersqueeze/io.hpp"
#include "fibersqueeze/measurement.hpp"
#include "fibersqueeze/propagator.hpp"
#include "fibersqueeze/quantum.hpp"
#include "fibersqueeze/spectrum.hpp"

namespace fsq {

struct GridConfig {
  int n_points = 1024;
  double time_window_ps = 5.0;
  double carrier_wavelength_nm = 810.0;
};

struct FiberConfig {
  double length_m = 0.3;
  double gamma_per_W_m = 0.0;
  // With a zero-GVD wavelength, beta2 is derived from it and beta3..beta5.
  std::optional<double> zero_gvd_wavelength_nm;
  std::array<double, 4> beta{};  // beta2..beta5 [ps^n/m]
  RamanModel raman_model = RamanModel::SingleOscillator;
  double raman_fraction = 0.18;
  double raman_tau1_fs = 12.2;
  double raman_tau2_fs = 32.0;
  bool self_steepening = true;
};

struct PulseConfig {
  std::string shape = "sech";
  std::vector<double> energies_pJ{118.0};
  double fwhm_fs = 38.0;
  double center_wavelength_nm = 810.0;
};

struct QuantumConfig {
  bool enabled = false;
  std::string method = "backprop";  // or "forward"
  bool raman_noise = true;
  double temperature_K = 300.0;
};

struct SweepConfig {
  FilterKind kind = FilterKind::LowPass;
  std::vector<double> edges_nm;
};

struct MeasurementConfig {
  std::vector<SweepConfig> sweeps;
  int coarse_bins = 0;  // 0: no correlation map
  std::array<double, 2> map_band_nm{750.0, 950.0};
  std::optional<std::array<double, 2>> detection_band_nm = std::array<double, 2>{750.0, 950.0};
  double efficiency = 0.75;
};

struct OutputConfig {
  std::string directory = "run";
  bool deterministic = true;
};

struct ScenarioConfig {
  std::string name = "custom";
  std::string note;
  GridConfig grid;
  FiberConfig fiber;
  PulseConfig pulse;
  SolverOptions solver;
  QuantumConfig quantum;
  MeasurementConfig measurement;
  OutputConfig output;
  std::vector<std::string> unknown_keys;  // collected while parsing
};

/// Microstructure-fiber constants used by every shipped scenario.
MfConfig default_mf();
/// The shipped default: 30 cm fiber, 118 pJ, 38 fs, both sweeps and the map.
ScenarioConfig default_config();
std::vector<std::string> builtin_names();
/// "fig1", "fig2a", "fig2b", "fig3" or "default"; throws ConfigurationError otherwise.
ScenarioConfig builtin_scenario(const std::string& name);

json to_json(const ScenarioConfig& cfg);
/// Throws ConfigurationError naming the key on type errors.
ScenarioConfig from_json(const json& j);
/// Parse errors report line and column.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);
/// A built-in name or a path to a config file.
ScenarioConfig resolve_config(const std::string& name_or_path);

/// Every violated precondition, empty if the config is runnable.
std::vector<std::string> validate(const ScenarioConfig& cfg);

Grid scenario_grid(const ScenarioConfig& cfg);
FiberSpec scenario_fiber(const ScenarioConfig& cfg);
Envelope scenario_pulse(const ScenarioConfig& cfg, const Grid& grid, double energy_pJ);

/// Strongest spectral peak on the anomalous side of the zero-GVD wavelength
/// (or beyond the carrier when beta2 is given directly).
double raman_peak_wavelength(const ScenarioConfig& cfg, const SpectralDensity& s);

/// Wavelength edges of the spectral segments the quantum stage resolves: all
/// sweep edges, map edges and detection band edges, plus open outer segments.
std::vector<double> segment_edges(const ScenarioConfig& cfg);

struct EnergyAnalysis {
  double energy_pJ = 0.0;
  Envelope output;
  std::vector<Snapshot> snapshots;
  bool quantum = false;
  std::vector<double> edges_nm;       // segment edges, outer ones 0 and +inf
  Eigen::VectorXd segment_lower_nm;   // lower bound of every segment
  Eigen::VectorXd photons;            // per segment
  Eigen::MatrixXd covariance;         // per segment, vacuum + reservoir
  Eigen::MatrixXd reservoir;          // reservoir share of covariance
  Eigen::VectorXd premask;            // detection band over segments
  std::vector<SqueezeCurve> curves;
  std::optional<CorrelationMap> map;
};

EnergyAnalysis analyze_energy(const ScenarioConfig& cfg, double energy_pJ);

/// Resolves cfg.output.directory under `root`; rejects absolute paths and "..".
std::filesystem::path resolve_output_dir(const std::filesystem::path& root, const std::string& directory);

/// Raised when validate() reports violations; carries the full list.
class ValidationFailure : public ConfigurationError {
 public:
  explicit ValidationFailure(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Validates, runs and writes the result bundle. Returns the summary. On a
/// runtime failure an error.json is written before the exception propagates.
json run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& output_root);

json error_record(const std::exception& e);

}  // namespace fsq
