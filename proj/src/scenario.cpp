#include "fibersqueeze/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "fibersqueeze/errors.hpp"
#include "fibersqueeze/units.hpp"

namespace fsq {

namespace {

constexpr const char* kModule = "scenarios_cli";

std::vector<double> edge_range(int first, int last, int step) {
  std::vector<double> e;
  for (int x = first; x <= last; x += step) e.push_back(x);
  return e;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string r;
  for (std::size_t i = 0; i < parts.size(); ++i) r += (i ? sep : "") + parts[i];
  return r;
}

}  // namespace

MfConfig default_mf() { return MfConfig{}; }

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.name = "default";
  const MfConfig mf = default_mf();
  c.grid = {1024, 5.0, mf.carrier_wavelength_nm};
  c.fiber.length_m = mf.length;
  c.fiber.gamma_per_W_m = mf.gamma;
  c.fiber.zero_gvd_wavelength_nm = mf.zero_gvd_wavelength_nm;
  c.fiber.beta = {0.0, mf.beta3, mf.beta4, mf.beta5};
  c.fiber.raman_model = mf.raman_model;
  c.fiber.raman_fraction = mf.raman_fraction;
  c.fiber.self_steepening = mf.self_steepening;
  c.pulse = {"sech", {118.0}, 38.0, 810.0};
  c.solver.step_count = 1000;
  c.quantum = {true, "backprop", true, 300.0};
  c.measurement.sweeps = {{FilterKind::LowPass, edge_range(755, 945, 5)},
                          {FilterKind::HighPass, edge_range(755, 945, 5)}};
  c.measurement.coarse_bins = 20;
  c.output.directory = "default";
  return c;
}

std::vector<std::string> builtin_names() { return {"default", "fig1", "fig2a", "fig2b", "fig3"}; }

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig c = default_config();
  c.name = name;
  c.output.directory = name;
  if (name == "default" || name == "fig3") return c;
  if (name == "fig1") {
    c.grid = {8192, 20.0, c.grid.carrier_wavelength_nm};
    c.pulse.energies_pJ = {63.0, 112.0, 118.0};
    c.quantum.enabled = false;
    c.measurement.sweeps.clear();
    c.measurement.coarse_bins = 0;
    return c;
  }
  if (name == "fig2a") {
    c.pulse.energies_pJ = {118.3};
    c.measurement.sweeps.resize(1);
    c.measurement.coarse_bins = 0;
    c.note = "launch energy 118.3 pJ; the alternative quoted value is 120 pJ";
    return c;
  }
  if (name == "fig2b") {
    c.pulse.energies_pJ = {111.7};
    c.measurement.sweeps.erase(c.measurement.sweeps.begin());
    c.measurement.coarse_bins = 0;
    c.note = "launch energy 111.7 pJ; the alternative quoted value is 112 pJ";
    return c;
  }
  throw ConfigurationError(kModule, "builtin_scenario",
                           "unknown scenario '" + name + "' (known: " + join(builtin_names(), ", ") + ")");
}

// ---------------------------------------------------------------- json

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  if (!c.note.empty()) j["note"] = c.note;
  j["grid"] = {{"n_points", c.grid.n_points},
               {"time_window_ps", c.grid.time_window_ps},
               {"carrier_wavelength_nm", c.grid.carrier_wavelength_nm}};
  json f;
  f["length_m"] = c.fiber.length_m;
  f["gamma_per_W_m"] = c.fiber.gamma_per_W_m;
  f["zero_gvd_wavelength_nm"] = c.fiber.zero_gvd_wavelength_nm ? json(*c.fiber.zero_gvd_wavelength_nm) : json(nullptr);
  f["beta2_ps2_per_m"] = c.fiber.beta[0];
  f["beta3_ps3_per_m"] = c.fiber.beta[1];
  f["beta4_ps4_per_m"] = c.fiber.beta[2];
  f["beta5_ps5_per_m"] = c.fiber.beta[3];
  f["raman_model"] = to_string(c.fiber.raman_model);
  f["raman_fraction"] = c.fiber.raman_fraction;
  f["raman_tau1_fs"] = c.fiber.raman_tau1_fs;
  f["raman_tau2_fs"] = c.fiber.raman_tau2_fs;
  f["self_steepening"] = c.fiber.self_steepening;
  j["fiber"] = f;
  j["pulse"] = {{"shape", c.pulse.shape},
                {"energies_pJ", c.pulse.energies_pJ},
                {"fwhm_fs", c.pulse.fwhm_fs},
                {"center_wavelength_nm", c.pulse.center_wavelength_nm}};
  j["solver"] = {{"scheme", c.solver.scheme == StepScheme::FixedSymmetrized ? "fixed" : "adaptive"},
                 {"step_count", c.solver.step_count},
                 {"initial_step_m", c.solver.initial_step},
                 {"local_error_goal", c.solver.local_error_goal},
                 {"record_interval_m", c.solver.record_interval},
                 {"aliasing_guard", c.solver.aliasing_guard}};
  j["quantum"] = {{"enabled", c.quantum.enabled},
                  {"method", c.quantum.method},
                  {"raman_noise", c.quantum.raman_noise},
                  {"temperature_K", c.quantum.temperature_K}};
  json sweeps = json::array();
  for (const auto& s : c.measurement.sweeps) sweeps.push_back({{"kind", to_string(s.kind)}, {"edges_nm", s.edges_nm}});
  j["measurement"] = {{"sweeps", sweeps},
                      {"coarse_bins", c.measurement.coarse_bins},
                      {"map_band_nm", c.measurement.map_band_nm},
                      {"detection_band_nm", c.measurement.detection_band_nm ? json(*c.measurement.detection_band_nm)
                                                                            : json(nullptr)},
                      {"efficiency", c.measurement.efficiency}};
  j["output"] = {{"directory", c.output.directory}, {"deterministic", c.output.deterministic}};
  return j;
}

namespace {

// Reads an object section, remembering which keys were consumed so leftovers
// can be reported.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string>& unknown)
      : j_(j), path_(std::move(path)), unknown_(unknown) {
    if (!j_.is_object()) throw ConfigurationError(kModule, "parse", where("") + "expected an object");
  }
  ~Section() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) unknown_.push_back("unknown key '" + path_ + it.key() + "'");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).template get<T>();
    } catch (const json::exception&) {
      throw ConfigurationError(kModule, "parse", where(key) + "has the wrong type (" +
                                                     std::string(j_.at(key).type_name()) + ")");
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    T v{};
    get(key, v);
    out = v;
  }

  void get_int(const char* key, int& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number() || (v.is_number_float() && v.get<double>() != std::floor(v.get<double>())))
      throw ConfigurationError(kModule, "parse", where(key) + "must be an integer");
    out = v.is_number_float() ? static_cast<int>(v.get<double>()) : v.get<int>();
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string child_path(const char* key) const { return path_ + key + "."; }

 private:
  std::string where(const std::string& key) const { return "key '" + path_ + key + "' "; }

  const json& j_;
  std::string path_;
  std::vector<std::string>& unknown_;
  std::set<std::string> seen_;
};

}  // namespace

ScenarioConfig from_json(const json& j) {
  ScenarioConfig c = default_config();
  c.unknown_keys.clear();
  auto& unknown = c.unknown_keys;
  Section root(j, "", unknown);
  root.get("name", c.name);
  root.get("note", c.note);
  if (root.has("grid")) {
    Section s(root.raw("grid"), "grid.", unknown);
    s.get_int("n_points", c.grid.n_points);
    s.get("time_window_ps", c.grid.time_window_ps);
    s.get("carrier_wavelength_nm", c.grid.carrier_wavelength_nm);
  }
  if (root.has("fiber")) {
    Section s(root.raw("fiber"), "fiber.", unknown);
    s.get("length_m", c.fiber.length_m);
    s.get("gamma_per_W_m", c.fiber.gamma_per_W_m);
    s.get_optional("zero_gvd_wavelength_nm", c.fiber.zero_gvd_wavelength_nm);
    s.get("beta2_ps2_per_m", c.fiber.beta[0]);
    s.get("beta3_ps3_per_m", c.fiber.beta[1]);
    s.get("beta4_ps4_per_m", c.fiber.beta[2]);
    s.get("beta5_ps5_per_m", c.fiber.beta[3]);
    std::string model = to_string(c.fiber.raman_model);
    s.get("raman_model", model);
    c.fiber.raman_model = raman_model_from_string(model);
    s.get("raman_fraction", c.fiber.raman_fraction);
    s.get("raman_tau1_fs", c.fiber.raman_tau1_fs);
    s.get("raman_tau2_fs", c.fiber.raman_tau2_fs);
    s.get("self_steepening", c.fiber.self_steepening);
  }
  if (root.has("pulse")) {
    Section s(root.raw("pulse"), "pulse.", unknown);
    s.get("shape", c.pulse.shape);
    s.get("energies_pJ", c.pulse.energies_pJ);
    s.get("fwhm_fs", c.pulse.fwhm_fs);
    s.get("center_wavelength_nm", c.pulse.center_wavelength_nm);
  }
  if (root.has("solver")) {
    Section s(root.raw("solver"), "solver.", unknown);
    std::string scheme = c.solver.scheme == StepScheme::FixedSymmetrized ? "fixed" : "adaptive";
    s.get("scheme", scheme);
    if (scheme == "fixed") c.solver.scheme = StepScheme::FixedSymmetrized;
    else if (scheme == "adaptive") c.solver.scheme = StepScheme::AdaptiveLocalError;
    else throw ConfigurationError(kModule, "parse", "key 'solver.scheme' must be \"fixed\" or \"adaptive\"");
    s.get_int("step_count", c.solver.step_count);
    s.get("initial_step_m", c.solver.initial_step);
    s.get("local_error_goal", c.solver.local_error_goal);
    s.get("record_interval_m", c.solver.record_interval);
    s.get("aliasing_guard", c.solver.aliasing_guard);
  }
  if (root.has("quantum")) {
    Section s(root.raw("quantum"), "quantum.", unknown);
    s.get("enabled", c.quantum.enabled);
    s.get("method", c.quantum.method);
    s.get("raman_noise", c.quantum.raman_noise);
    s.get("temperature_K", c.quantum.temperature_K);
  }
  if (root.has("measurement")) {
    Section s(root.raw("measurement"), "measurement.", unknown);
    if (s.has("sweeps")) {
      const json& arr = s.raw("sweeps");
      if (!arr.is_array()) throw ConfigurationError(kModule, "parse", "key 'measurement.sweeps' must be an array");
      c.measurement.sweeps.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Section e(arr[i], "measurement.sweeps[" + std::to_string(i) + "].", unknown);
        SweepConfig sw;
        std::string kind = "low_pass";
        e.get("kind", kind);
        sw.kind = filter_kind_from_string(kind);
        e.get("edges_nm", sw.edges_nm);
        c.measurement.sweeps.push_back(sw);
      }
    }
    s.get_int("coarse_bins", c.measurement.coarse_bins);
    s.get("map_band_nm", c.measurement.map_band_nm);
    s.get_optional("detection_band_nm", c.measurement.detection_band_nm);
    s.get("efficiency", c.measurement.efficiency);
  }
  if (root.has("output")) {
    Section s(root.raw("output"), "output.", unknown);
    s.get("directory", c.output.directory);
    s.get("deterministic", c.output.deterministic);
  }
  return c;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character
    const std::size_t pos = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto cut = msg.find(": ", msg.find("parse error"));
    std::ostringstream out;
    out << source << ":" << line << ":" << col << ": parse error"
        << (cut != std::string::npos ? msg.substr(cut) : ": " + msg);
    throw ConfigurationError(kModule, "parse", out.str());
  }
  return from_json(j);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError(kModule, "load_config", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

ScenarioConfig resolve_config(const std::string& name_or_path) {
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_scenario(name_or_path);
  return load_config(name_or_path);
}

// ---------------------------------------------------------------- validation

Grid scenario_grid(const ScenarioConfig& c) {
  return make_grid(c.grid.n_points, c.grid.time_window_ps, c.grid.carrier_wavelength_nm);
}

FiberSpec scenario_fiber(const ScenarioConfig& c) {
  FiberSpec spec;
  if (c.fiber.zero_gvd_wavelength_nm) {
    MfConfig mf;
    mf.carrier_wavelength_nm = c.grid.carrier_wavelength_nm;
    mf.zero_gvd_wavelength_nm = *c.fiber.zero_gvd_wavelength_nm;
    mf.beta3 = c.fiber.beta[1];
    mf.beta4 = c.fiber.beta[2];
    mf.beta5 = c.fiber.beta[3];
    mf.gamma = c.fiber.gamma_per_W_m;
    mf.length = c.fiber.length_m;
    mf.raman_fraction = c.fiber.raman_fraction;
    mf.raman_model = c.fiber.raman_model;
    mf.self_steepening = c.fiber.self_steepening;
    spec = make_mf_spec(mf);
  } else {
    spec.length = c.fiber.length_m;
    spec.gamma = c.fiber.gamma_per_W_m;
    spec.beta = c.fiber.beta;
    spec.raman_fraction = c.fiber.raman_fraction;
    spec.raman_model = c.fiber.raman_model;
    spec.self_steepening = c.fiber.self_steepening;
  }
  spec.raman_tau1 = c.fiber.raman_tau1_fs * 1e-3;
  spec.raman_tau2 = c.fiber.raman_tau2_fs * 1e-3;
  validate(spec);
  return spec;
}

Envelope scenario_pulse(const ScenarioConfig& c, const Grid& grid, double energy) {
  if (c.pulse.shape == "sech") return sech_pulse(grid, energy, c.pulse.fwhm_fs, c.pulse.center_wavelength_nm);
  if (c.pulse.shape == "gaussian") return gaussian_pulse(grid, energy, c.pulse.fwhm_fs, c.pulse.center_wavelength_nm);
  throw ConfigurationError(kModule, "scenario_pulse", "pulse shape must be \"sech\" or \"gaussian\"");
}

namespace {

template <typename F>
void collect(std::vector<std::string>& out, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    out.push_back(e.what());
  } catch (const std::exception& e) {
    out.push_back(e.what());
  }
}

bool in_band(const Grid& g, double lambda_nm) {
  const double omega = units::wavelength_to_detuning(lambda_nm, g.carrier_wavelength());
  return std::abs(omega) < g.nyquist();
}

std::string band_text(const Grid& g) {
  const double lo = units::detuning_to_wavelength(g.nyquist(), g.carrier_wavelength());
  const double hi = units::detuning_to_wavelength(-g.nyquist(), g.carrier_wavelength());
  std::ostringstream s;
  s.precision(4);
  s << lo << "-" << hi << " nm";
  return s.str();
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> v = c.unknown_keys;
  std::optional<Grid> grid;
  if (!is_power_of_two(c.grid.n_points) || c.grid.n_points < 64)
    v.push_back("grid.n_points = " + std::to_string(c.grid.n_points) + " must be a power of two >= 64");
  else
    collect(v, [&] { grid = scenario_grid(c); });

  std::optional<FiberSpec> spec;
  collect(v, [&] { spec = scenario_fiber(c); });
  if (grid && spec && spec->has_raman())
    collect(v, [&] { raman_kernel(spec->raman_model, *grid, spec->raman_tau1, spec->raman_tau2); });

  if (c.pulse.energies_pJ.empty()) v.push_back("pulse.energies_pJ must list at least one energy");
  for (double e : c.pulse.energies_pJ)
    if (!(e >= 0.0) || !std::isfinite(e)) v.push_back("pulse energy must be finite and >= 0");
  if (!(c.pulse.fwhm_fs > 0.0)) v.push_back("pulse.fwhm_fs must be > 0");
  if (c.pulse.shape != "sech" && c.pulse.shape != "gaussian") v.push_back("pulse.shape must be \"sech\" or \"gaussian\"");
  if (grid) {
    if (!(c.pulse.center_wavelength_nm > 0.0) || !in_band(*grid, c.pulse.center_wavelength_nm))
      v.push_back("pulse center wavelength " + format_number(c.pulse.center_wavelength_nm) +
                  " nm lies outside the grid's Nyquist band (" + band_text(*grid) + ")");
    if (c.pulse.fwhm_fs > 0.0 && c.pulse.fwhm_fs * 1e-3 < 4.0 * grid->dt())
      v.push_back("pulse.fwhm_fs must span at least 4 grid steps");
    if (c.pulse.fwhm_fs * 1e-3 * 8.0 > c.grid.time_window_ps)
      v.push_back("grid.time_window_ps must hold at least 8 pulse widths");
  }
  if (spec) collect(v, [&] { validate(c.solver, *spec); });

  if (c.quantum.method != "backprop" && c.quantum.method != "forward")
    v.push_back("quantum.method must be \"backprop\" or \"forward\"");
  if (c.quantum.enabled && c.quantum.method == "forward" && c.grid.n_points > 256)
    v.push_back("quantum.method \"forward\" builds dense 2N x 2N matrices and is limited to n_points <= 256");
  if (!(c.quantum.temperature_K >= 0.0)) v.push_back("quantum.temperature_K must be >= 0");

  const auto& m = c.measurement;
  if (!(m.efficiency > 0.0 && m.efficiency <= 1.0)) v.push_back("efficiency must lie in (0,1]");
  auto check_edge = [&](double e, const std::string& what) {
    if (grid && (!(e > 0.0) || !in_band(*grid, e)))
      v.push_back(what + " " + format_number(e) + " nm lies outside the grid's Nyquist band (" + band_text(*grid) + ")");
  };
  for (const auto& s : m.sweeps) {
    if (s.kind != FilterKind::LowPass && s.kind != FilterKind::HighPass)
      v.push_back("sweeps take low_pass or high_pass filters");
    if (s.edges_nm.empty()) v.push_back("every sweep needs at least one edge");
    for (double e : s.edges_nm) check_edge(e, "sweep edge");
  }
  if (m.coarse_bins != 0) {
    if (m.coarse_bins < 2) v.push_back("measurement.coarse_bins must be 0 (no map) or at least 2");
    if (!(m.map_band_nm[1] > m.map_band_nm[0])) v.push_back("measurement.map_band_nm must increase");
    check_edge(m.map_band_nm[0], "map band edge");
    check_edge(m.map_band_nm[1], "map band edge");
  }
  if (m.detection_band_nm) {
    if (!((*m.detection_band_nm)[1] > (*m.detection_band_nm)[0]))
      v.push_back("measurement.detection_band_nm must increase");
  }
  if ((!m.sweeps.empty() || m.coarse_bins != 0) && !c.quantum.enabled)
    v.push_back("sweeps and correlation maps need quantum.enabled = true");

  collect(v, [&] { resolve_output_dir("/", c.output.directory); });
  return v;
}

// ---------------------------------------------------------------- analysis

double raman_peak_wavelength(const ScenarioConfig& c, const SpectralDensity& s) {
  const double from = c.fiber.zero_gvd_wavelength_nm ? *c.fiber.zero_gvd_wavelength_nm : c.grid.carrier_wavelength_nm;
  return peak_wavelength(s, from, std::numeric_limits<double>::infinity());
}

std::vector<double> segment_edges(const ScenarioConfig& c) {
  std::set<double> e;
  for (const auto& s : c.measurement.sweeps) e.insert(s.edges_nm.begin(), s.edges_nm.end());
  if (c.measurement.coarse_bins >= 2)
    for (double x : uniform_edges(c.measurement.map_band_nm[0], c.measurement.map_band_nm[1], c.measurement.coarse_bins))
      e.insert(x);
  if (c.measurement.detection_band_nm) e.insert(c.measurement.detection_band_nm->begin(), c.measurement.detection_band_nm->end());
  std::vector<double> out{0.0};
  out.insert(out.end(), e.begin(), e.end());
  out.push_back(std::numeric_limits<double>::infinity());
  return out;
}

EnergyAnalysis analyze_energy(const ScenarioConfig& c, double energy) {
  const Grid grid = scenario_grid(c);
  const FiberSpec spec = scenario_fiber(c);
  const Envelope input = scenario_pulse(c, grid, energy);
  EnergyAnalysis a;
  a.energy_pJ = energy;
  PropagationResult pr = propagate(input, spec, c.solver, c.quantum.enabled);
  a.output = pr.output;
  a.snapshots = std::move(pr.snapshots);
  if (!c.quantum.enabled) return a;

  a.quantum = true;
  LinearizedRun run{spec, c.solver, input, pr.output, std::move(pr.checkpoints)};
  QuantumOptions q{c.quantum.raman_noise, c.quantum.temperature_K};
  a.edges_nm = segment_edges(c);
  const FrequencyBins segments = wavelength_bins(grid, a.edges_nm);
  const Eigen::MatrixXd p = segments.indicator(grid.n_points());
  a.segment_lower_nm = Eigen::Map<const Eigen::VectorXd>(a.edges_nm.data(), segments.size());
  a.photons = p * photons_per_bin(a.output);
  if (c.quantum.method == "forward") {
    const GreenMatrix g = green_matrix(run);
    const NoiseLedger ledger = noise_ledger(run, q);
    const NoiseLedger silent{Eigen::MatrixXd(), 0.0, false};
    const Eigen::MatrixXd full = p * photon_number_covariance(g, ledger, a.output) * p.transpose();
    const Eigen::MatrixXd vac = p * photon_number_covariance(g, silent, a.output) * p.transpose();
    a.covariance = full;
    a.reservoir = full - vac;
  } else {
    a.covariance = backprop_covariance(run, p, q, &a.reservoir);
  }
  a.premask = c.measurement.detection_band_nm
                  ? SpectralFilter::band((*c.measurement.detection_band_nm)[0], (*c.measurement.detection_band_nm)[1])
                        .transmission(a.segment_lower_nm)
                  : Eigen::VectorXd::Ones(segments.size());
  for (const auto& s : c.measurement.sweeps)
    a.curves.push_back(filter_sweep(a.covariance, a.photons, a.segment_lower_nm, s.kind, s.edges_nm, a.premask));
  if (c.measurement.coarse_bins >= 2)
    a.map = correlation_map(a.covariance, a.photons, a.segment_lower_nm,
                            uniform_edges(c.measurement.map_band_nm[0], c.measurement.map_band_nm[1],
                                          c.measurement.coarse_bins));
  return a;
}

// ---------------------------------------------------------------- running

std::filesystem::path resolve_output_dir(const std::filesystem::path& root, const std::string& directory) {
  const std::filesystem::path rel(directory);
  if (directory.empty()) throw ConfigurationError(kModule, "resolve_output_dir", "output.directory must not be empty");
  if (rel.is_absolute() || rel.has_root_name() || rel.has_root_directory())
    throw ConfigurationError(kModule, "resolve_output_dir", "output.directory must be relative to the output root");
  for (const auto& part : rel)
    if (part == "..")
      throw ConfigurationError(kModule, "resolve_output_dir", "output.directory must not contain '..'");
  return root / rel;
}

ValidationFailure::ValidationFailure(std::vector<std::string> violations)
    : ConfigurationError(kModule, "validate", "invalid configuration: " + join(violations, "; ")),
      violations_(std::move(violations)) {}

json error_record(const std::exception& e) {
  json j;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["kind"] = err->kind();
    j["module"] = err->module();
    j["operation"] = err->operation();
    j["message"] = err->what();
    if (err->z_position()) j["z_m"] = *err->z_position();
    if (const auto* alias = dynamic_cast<const AliasingError*>(&e)) j["suggested_n_points"] = alias->suggested_points();
    if (const auto* vf = dynamic_cast<const ValidationFailure*>(&e)) j["violations"] = vf->violations();
  } else {
    j["kind"] = "internal";
    j["module"] = kModule;
    j["operation"] = "run_scenario";
    j["message"] = e.what();
  }
  return j;
}

namespace {

std::string energy_tag(double e) { return format_number(e) + "pJ"; }

json curve_summary(const SqueezeCurve& curve, double eta) {
  json j;
  j["kind"] = to_string(curve.kind);
  int gaps = 0;
  for (const auto& p : curve.points) gaps += p.defined ? 0 : 1;
  j["gaps"] = gaps;
  if (const auto b = curve.best()) {
    const auto& p = curve.points[*b];
    j["best_edge_nm"] = p.edge_nm;
    j["best_fano"] = p.fano;
    j["best_fano_db"] = p.fano_db;
    const double measured = apply_detection_efficiency(p.fano, eta);
    j["best_fano_after_detection"] = measured;
    j["best_fano_after_detection_db"] = units::to_db(measured);
  } else {
    j["best_edge_nm"] = nullptr;
  }
  return j;
}

}  // namespace

json run_scenario(const ScenarioConfig& c, const std::filesystem::path& root) {
  const auto problems = validate(c);
  if (!problems.empty()) throw ValidationFailure(problems);
  const auto dir = resolve_output_dir(root, c.output.directory);
  std::filesystem::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();
  write_json(dir / "config.json", to_json(c));
  try {
    json summary;
    summary["name"] = c.name;
    summary["version"] = version_string();
    if (!c.note.empty()) summary["note"] = c.note;
    json runs = json::array();
    std::vector<PlotSeries> spectra;
    for (double energy : c.pulse.energies_pJ) {
      const EnergyAnalysis a = analyze_energy(c, energy);
      const std::string tag = energy_tag(energy);
      const SpectralDensity s = spectrum(a.output);
      write_spectrum_csv(dir / ("spectrum_" + tag + ".csv"), s);
      if (!a.snapshots.empty()) write_snapshots_csv(dir / ("snapshots_" + tag + ".csv"), a.snapshots, to_json(c));
      PlotSeries series{tag, {}, {}};
      const double peak = s.density.maxCoeff();
      for (Eigen::Index i = 0; i < s.wavelength.size(); ++i) {
        if (s.wavelength[i] < 600 || s.wavelength[i] > 1100) continue;
        series.x.push_back(s.wavelength[i]);
        series.y.push_back(std::max(units::to_db(s.density[i] / peak), -60.0));
      }
      spectra.push_back(series);

      json r;
      r["energy_pJ"] = energy;
      r["input_width_3dB_nm"] = spectral_width(spectrum(scenario_pulse(c, a.output.grid, energy)), -3.0);
      r["total_photons"] = photons_per_bin(a.output).sum();
      r["output_energy_pJ"] = a.output.energy();
      r["width_20dB_nm"] = spectral_width(s, -20.0);
      r["raman_peak_nm"] = raman_peak_wavelength(c, s);
      if (a.quantum) {
        r["detected_photons"] = a.premask.dot(a.photons);
        json curves = json::array();
        std::vector<PlotSeries> sweep_plot;
        for (const auto& curve : a.curves) {
          const std::string kind = to_string(curve.kind);
          write_squeeze_curve_csv(dir / ("sweep_" + kind + "_" + tag + ".csv"), curve);
          curves.push_back(curve_summary(curve, c.measurement.efficiency));
          PlotSeries ps{kind, {}, {}};
          for (const auto& p : curve.points) {
            ps.x.push_back(p.edge_nm);
            ps.y.push_back(p.defined ? p.fano_db : NAN);
          }
          sweep_plot.push_back(ps);
        }
        if (!sweep_plot.empty())
          write_line_plot_svg(dir / ("sweep_" + tag + ".svg"), sweep_plot, "Fano factor vs filter edge, " + tag,
                              "edge wavelength (nm)", "Fano factor (dB)");
        r["sweeps"] = curves;
        if (a.map) {
          write_correlation_map_csv(dir / ("correlation_" + tag + ".csv"), *a.map);
          write_heatmap_svg(dir / ("correlation_" + tag + ".svg"), *a.map, "photon-number correlation, " + tag);
          std::vector<double> undefined;
          for (int i = 0; i < a.map->size(); ++i)
            if (!a.map->defined[i]) undefined.push_back(a.map->edges_nm[i]);
          r["map_undefined_bins_nm"] = undefined;
        }
      }
      runs.push_back(r);
    }
    write_line_plot_svg(dir / "spectra.svg", spectra, "output spectra", "wavelength (nm)", "density (dB rel. peak)");
    summary["runs"] = runs;
    summary["efficiency"] = c.measurement.efficiency;
    summary["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(dir / "summary.json", summary);
    return summary;
  } catch (const std::exception& e) {
    write_json(dir / "error.json", error_record(e));
    throw;
  }
}

}  // namespace fsq
