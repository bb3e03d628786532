#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfloc/estimator_fresnel.hpp"
#include "nfloc/experiment.hpp"
#include "nfloc/search.hpp"
#include "nfloc/signal.hpp"

namespace nfloc {

inline constexpr const char* kSweepCsvHeader = "sweep_param,sweep_value,estimator,waveband,metric,nmse,failures,trials";

/// Three lines (distance, angle, location) per table row. Doubles use %.17g
/// so the text round-trips; NaN (all trials failed) is written as "nan".
void write_sweep_csv(std::ostream& os, const SweepTable& table);
void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table);

/// Self-contained SVG, one log-scale line chart per metric, one series per
/// (estimator, waveband).
void write_sweep_svg(std::ostream& os, const SweepTable& table);
void write_sweep_svg(const std::filesystem::path& path, const SweepTable& table);

/// `r_m,theta_rad,J`, r-major.
void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spectrum);
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumGrid& spectrum);

/// `theta_rad,value`
void write_angle_spectrum_csv(const std::filesystem::path& path, const AngleSpectrum& spectrum);
/// `r_m,value`
void write_distance_spectrum_csv(const std::filesystem::path& path, const DistanceSpectrum& spectrum);

/// `subcarrier,freq_hz,element,snapshot,re,im`
void write_received_csv(std::ostream& os, const ReceivedData& data);
void write_received_csv(const std::filesystem::path& path, const ReceivedData& data);

/// %.17g, or "nan" / "inf" / "-inf".
std::string format_double(double x);

}  // namespace nfloc
