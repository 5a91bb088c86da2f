#include "fibersqueeze/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fibersqueeze/errors.hpp"

#ifndef FIBERSQUEEZE_VERSION
#define FIBERSQUEEZE_VERSION "0.0.0"
#endif

namespace fsq {

std::string version_string() { return FIBERSQUEEZE_VERSION; }

std::string format_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("scenarios_cli", "write", "cannot open " + path.string() + " for writing");
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_json(const std::filesystem::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

void write_spectrum_csv(const std::filesystem::path& path, const SpectralDensity& s) {
  auto out = open_out(path);
  out << "wavelength_nm,density_pJ_per_nm\n";
  for (Eigen::Index i = 0; i < s.wavelength.size(); ++i)
    out << format_number(s.wavelength[i]) << ',' << format_number(s.density[i]) << '\n';
}

void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snapshots,
                         const json& header) {
  auto out = open_out(path);
  out << "# " << header.dump() << '\n';
  out << "z_m,wavelength_nm,density_pJ_per_nm\n";
  for (const auto& snap : snapshots) {
    const SpectralDensity s = spectrum(snap.field);
    const std::string z = format_number(snap.z);
    for (Eigen::Index i = 0; i < s.wavelength.size(); ++i)
      out << z << ',' << format_number(s.wavelength[i]) << ',' << format_number(s.density[i]) << '\n';
  }
}

void write_squeeze_curve_csv(const std::filesystem::path& path, const SqueezeCurve& curve) {
  auto out = open_out(path);
  out << "edge_nm,fano,fano_db\n";
  for (const auto& p : curve.points) {
    out << format_number(p.edge_nm) << ',';
    if (p.defined) out << format_number(p.fano) << ',' << format_number(p.fano_db);
    else out << ',';
    out << '\n';
  }
}

void write_correlation_map_csv(const std::filesystem::path& path, const CorrelationMap& map) {
  auto out = open_out(path);
  const int m = map.size();
  out << "lo_nm,hi_nm";
  for (int j = 0; j < m; ++j) out << ",rho_" << j;
  out << '\n';
  for (int i = 0; i < m; ++i) {
    out << format_number(map.edges_nm[i]) << ',' << format_number(map.edges_nm[i + 1]);
    for (int j = 0; j < m; ++j) {
      out << ',';
      if (map.defined[i] && map.defined[j]) out << format_number(map.rho(i, j));
    }
    out << '\n';
  }
}

void write_complex_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& m) {
  auto out = open_out(path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << "re_" << j << ",im_" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << format_number(m(i, j).real()) << ',' << format_number(m(i, j).imag());
    out << '\n';
  }
}

void write_green_matrix(const std::filesystem::path& dir, const GreenMatrix& g, const json& sidecar) {
  write_complex_matrix_csv(dir / "mu.csv", g.mu);
  write_complex_matrix_csv(dir / "nu.csv", g.nu);
  json meta = sidecar;
  meta["version"] = version_string();
  meta["basis"] = "frequency bins, FFT order, photon-normalized amplitudes";
  meta["grid"] = {{"n_points", g.grid.n_points()},
                  {"time_window_ps", g.grid.time_window()},
                  {"carrier_wavelength_nm", g.grid.carrier_wavelength()}};
  write_json(dir / "green.json", meta);
}

namespace {

// Diverging blue-white-red colour for rho in [-1, 1].
std::string rho_colour(double r) {
  r = std::clamp(r, -1.0, 1.0);
  int red, green, blue;
  if (r >= 0) {
    red = 255;
    green = blue = static_cast<int>(std::lround(255 * (1 - r)));
  } else {
    blue = 255;
    red = green = static_cast<int>(std::lround(255 * (1 + r)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", red, green, blue);
  return buf;
}

}  // namespace

void write_heatmap_svg(const std::filesystem::path& path, const CorrelationMap& map, const std::string& title) {
  const int m = map.size();
  const double cell = std::max(6.0, 480.0 / std::max(m, 1));
  const double left = 70, top = 40, side = cell * m;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + side + 90 << "\" height=\""
      << top + side + 60 << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  // Row 0 is the shortest wavelength; draw it at the bottom so wavelength grows upward.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const std::string fill = map.defined[i] && map.defined[j] ? rho_colour(map.rho(i, j)) : "#bbbbbb";
      svg << "<rect x=\"" << left + j * cell << "\" y=\"" << top + (m - 1 - i) * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  const int stride = std::max(1, m / 8);
  for (int i = 0; i <= m; i += stride) {
    svg << "<text x=\"" << left + i * cell << "\" y=\"" << top + side + 15 << "\" text-anchor=\"middle\">"
        << std::lround(map.edges_nm[i]) << "</text>\n";
    svg << "<text x=\"" << left - 5 << "\" y=\"" << top + side - i * cell + 4 << "\" text-anchor=\"end\">"
        << std::lround(map.edges_nm[i]) << "</text>\n";
  }
  svg << "<text x=\"" << left + side / 2 << "\" y=\"" << top + side + 35 << "\" text-anchor=\"middle\">wavelength (nm)</text>\n";
  for (int k = 0; k <= 10; ++k) {
    const double r = 1.0 - 0.2 * k;
    svg << "<rect x=\"" << left + side + 20 << "\" y=\"" << top + k * side / 11 << "\" width=\"15\" height=\""
        << side / 11 << "\" fill=\"" << rho_colour(r) << "\"/>\n";
    svg << "<text x=\"" << left + side + 40 << "\" y=\"" << top + k * side / 11 + side / 22 + 4 << "\">"
        << format_number(std::round(r * 10) / 10) << "</text>\n";
  }
  svg << "</svg>\n";
  write_text(path, svg.str());
}

void write_line_plot_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                         const std::string& title, const std::string& x_label, const std::string& y_label) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const double w = 560, h = 340, left = 70, top = 40;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + h - (y - y0) / (y1 - y0) * h; };
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + w + 150 << "\" height=\"" << top + h + 60
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = x0 + (x1 - x0) * k / 4, y = y0 + (y1 - y0) * k / 4;
    char bx[32], by[32];
    std::snprintf(bx, sizeof bx, "%.4g", x);
    std::snprintf(by, sizeof by, "%.4g", y);
    svg << "<text x=\"" << px(x) << "\" y=\"" << top + h + 15 << "\" text-anchor=\"middle\">" << bx << "</text>\n";
    svg << "<text x=\"" << left - 5 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << by << "</text>\n";
  }
  svg << "<text x=\"" << left + w / 2 << "\" y=\"" << top + h + 35 << "\" text-anchor=\"middle\">"
      << xml_escape(x_label) << "</text>\n";
  svg << "<text x=\"15\" y=\"" << top + h / 2 << "\" transform=\"rotate(-90 15 " << top + h / 2
      << ")\" text-anchor=\"middle\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = colours[k % 6];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts += format_number(px(s.x[i])) + "," + format_number(py(s.y[i])) + " ";
    }
    flush();
    svg << "<text x=\"" << left + w + 10 << "\" y=\"" << top + 15 * (k + 1) << "\" fill=\"" << colour << "\">"
        << xml_escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  write_text(path, svg.str());
}

}  // namespace fsq
