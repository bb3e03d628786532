#include "nfloc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace nfloc {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

struct Metric {
  const char* name;
  double NmseTriple::*field;
};

constexpr Metric kMetrics[] = {
    {"distance", &NmseTriple::distance},
    {"angle", &NmseTriple::angle},
    {"location", &NmseTriple::location},
};

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  os << kSweepCsvHeader << '\n';
  for (const SweepRow& row : table.rows) {
    for (const Metric& m : kMetrics) {
      os << table.sweep_param << ',' << format_double(row.sweep_value) << ',' << estimator_name(row.estimator)
         << ',' << row.waveband << ',' << m.name << ',' << format_double(row.nmse.*m.field) << ','
         << row.failures << ',' << row.trials << '\n';
    }
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table) {
  auto os = open_output(path);
  write_sweep_csv(os, table);
  finish(os, path);
}

void write_sweep_svg(std::ostream& os, const SweepTable& table) {
  constexpr double kPanelW = 420, kPanelH = 300, kMarginL = 70, kMarginB = 45, kMarginT = 30, kMarginR = 20;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  const bool log_x = table.sweep_param == "bandwidth_hz";

  // Series keyed by (estimator, waveband), in first-appearance order.
  std::vector<std::string> keys;
  std::map<std::string, std::vector<const SweepRow*>> series;
  for (const SweepRow& row : table.rows) {
    const std::string key = std::string(estimator_name(row.estimator)) + " " + row.waveband;
    if (!series.count(key)) keys.push_back(key);
    series[key].push_back(&row);
  }
  auto xval = [&](double v) { return log_x ? std::log10(v) : v; };
  double x_lo = 0, x_hi = 1;
  if (!table.rows.empty()) {
    x_lo = x_hi = xval(table.rows.front().sweep_value);
    for (const SweepRow& r : table.rows) {
      x_lo = std::min(x_lo, xval(r.sweep_value));
      x_hi = std::max(x_hi, xval(r.sweep_value));
    }
  }
  if (x_hi == x_lo) {
    x_lo -= 1;
    x_hi += 1;
  }

  const double width = 3 * kPanelW;
  const double height = kPanelH + 30 + 18.0 * static_cast<double>(keys.size());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (int panel = 0; panel < 3; ++panel) {
    const Metric& metric = kMetrics[panel];
    const double ox = panel * kPanelW;
    const double pw = kPanelW - kMarginL - kMarginR;
    const double ph = kPanelH - kMarginT - kMarginB;
    double y_lo = 0, y_hi = 0;
    bool any = false;
    for (const SweepRow& r : table.rows) {
      const double v = r.nmse.*metric.field;
      if (!(v > 0) || !std::isfinite(v)) continue;
      const double ly = std::log10(v);
      y_lo = any ? std::min(y_lo, ly) : ly;
      y_hi = any ? std::max(y_hi, ly) : ly;
      any = true;
    }
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
    if (y_hi <= y_lo) y_hi = y_lo + 1;
    auto px = [&](double x) { return ox + kMarginL + (xval(x) - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double ly) { return kMarginT + (y_hi - ly) / (y_hi - y_lo) * ph; };

    os << "<g>\n<text x=\"" << ox + kMarginL + pw / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
       << metric.name << " NMSE</text>\n";
    os << "<rect x=\"" << ox + kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(y_lo); e <= static_cast<int>(y_hi); ++e) {
      const double y = py(e);
      os << "<line x1=\"" << ox + kMarginL << "\" x2=\"" << ox + kMarginL + pw << "\" y1=\"" << y << "\" y2=\"" << y
         << "\" stroke=\"#ddd\"/>\n<text x=\"" << ox + kMarginL - 4 << "\" y=\"" << y + 4
         << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    std::vector<double> ticks;
    for (const SweepRow& r : table.rows)
      if (std::find(ticks.begin(), ticks.end(), r.sweep_value) == ticks.end()) ticks.push_back(r.sweep_value);
    for (double t : ticks) {
      char label[32];
      std::snprintf(label, sizeof label, "%g", t);
      os << "<text x=\"" << px(t) << "\" y=\"" << kMarginT + ph + 15 << "\" text-anchor=\"middle\">" << label
         << "</text>\n";
    }
    os << "<text x=\"" << ox + kMarginL + pw / 2 << "\" y=\"" << kMarginT + ph + 35 << "\" text-anchor=\"middle\">"
       << table.sweep_param << "</text>\n";

    for (std::size_t s = 0; s < keys.size(); ++s) {
      const char* color = kColors[s % std::size(kColors)];
      std::string points;
      for (const SweepRow* r : series[keys[s]]) {
        const double v = r->nmse.*metric.field;
        if (!(v > 0) || !std::isfinite(v)) continue;
        points += format_double(px(r->sweep_value)) + "," + format_double(py(std::log10(v))) + " ";
        os << "<circle cx=\"" << px(r->sweep_value) << "\" cy=\"" << py(std::log10(v)) << "\" r=\"2.5\" fill=\""
           << color << "\"/>\n";
      }
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
         << "\"/>\n";
    }
    os << "</g>\n";
  }
  for (std::size_t s = 0; s < keys.size(); ++s) {
    const double y = kPanelH + 18.0 * static_cast<double>(s + 1);
    os << "<line x1=\"" << kMarginL << "\" x2=\"" << kMarginL + 24 << "\" y1=\"" << y - 4 << "\" y2=\"" << y - 4
       << "\" stroke=\"" << kColors[s % std::size(kColors)] << "\" stroke-width=\"2\"/>\n<text x=\""
       << kMarginL + 30 << "\" y=\"" << y << "\">" << keys[s] << "</text>\n";
  }
  os << "</svg>\n";
}

void write_sweep_svg(const std::filesystem::path& path, const SweepTable& table) {
  auto os = open_output(path);
  write_sweep_svg(os, table);
  finish(os, path);
}

void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spectrum) {
  os << "r_m,theta_rad,J\n";
  const auto& r = spectrum.grid.r_axis();
  const auto& th = spectrum.grid.theta_axis();
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < th.size(); ++j)
      os << format_double(r[i]) << ',' << format_double(th[j]) << ','
         << format_double(spectrum.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumGrid& spectrum) {
  auto os = open_output(path);
  write_spectrum_csv(os, spectrum);
  finish(os, path);
}

void write_angle_spectrum_csv(const std::filesystem::path& path, const AngleSpectrum& spectrum) {
  auto os = open_output(path);
  os << "theta_rad,value\n";
  for (std::size_t i = 0; i < spectrum.theta_axis.size(); ++i)
    os << format_double(spectrum.theta_axis[i]) << ',' << format_double(spectrum.values[i]) << '\n';
  finish(os, path);
}

void write_distance_spectrum_csv(const std::filesystem::path& path, const DistanceSpectrum& spectrum) {
  auto os = open_output(path);
  os << "r_m,value\n";
  for (std::size_t i = 0; i < spectrum.r_axis.size(); ++i)
    os << format_double(spectrum.r_axis[i]) << ',' << format_double(spectrum.values[i]) << '\n';
  finish(os, path);
}

void write_received_csv(std::ostream& os, const ReceivedData& data) {
  os << "subcarrier,freq_hz,element,snapshot,re,im\n";
  for (std::size_t m = 0; m < data.per_subcarrier.size(); ++m) {
    const Eigen::MatrixXcd& y = data.per_subcarrier[m];
    const std::string f = format_double(data.freq_grid.frequency(static_cast<int>(m)));
    for (Eigen::Index n = 0; n < y.rows(); ++n)
      for (Eigen::Index k = 0; k < y.cols(); ++k)
        os << m << ',' << f << ',' << n << ',' << k << ',' << format_double(y(n, k).real()) << ','
           << format_double(y(n, k).imag()) << '\n';
  }
}

void write_received_csv(const std::filesystem::path& path, const ReceivedData& data) {
  auto os = open_output(path);
  write_received_csv(os, data);
  finish(os, path);
}

}  // namespace nfloc
