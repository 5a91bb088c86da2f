#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fibersqueeze/measurement.hpp"
#include "fibersqueeze/propagator.hpp"
#include "fibersqueeze/quantum.hpp"
#include "fibersqueeze/spectrum.hpp"

namespace fsq {

using json = nlohmann::ordered_json;

std::string version_string();

/// Shortest round-trip decimal representation.
std::string format_number(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& value);

/// wavelength_nm,density_pJ_per_nm
void write_spectrum_csv(const std::filesystem::path& path, const SpectralDensity& s);

/// z_m,wavelength_nm,density_pJ_per_nm, preceded by "# " + header JSON on one line.
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snapshots,
                         const json& header);

/// edge_nm,fano,fano_db  (empty cells for gaps)
void write_squeeze_curve_csv(const std::filesystem::path& path, const SqueezeCurve& curve);

/// Lower/upper edges for each row followed by the rho row; undefined bins are empty cells.
void write_correlation_map_csv(const std::filesystem::path& path, const CorrelationMap& map);

/// Complex matrix as CSV with columns re_0,im_0,re_1,im_1,...
void write_complex_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& m);

/// mu.csv, nu.csv and green.json (grid, spec, options, version) under `dir`.
void write_green_matrix(const std::filesystem::path& dir, const GreenMatrix& g, const json& sidecar);

void write_heatmap_svg(const std::filesystem::path& path, const CorrelationMap& map, const std::string& title);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_line_plot_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                         const std::string& title, const std::string& x_label, const std::string& y_label);

}  // namespace fsq
