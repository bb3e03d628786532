#include "nfloc/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nfloc {

ArrayConfig::ArrayConfig(int n_elements, double carrier_freq_hz, double spacing_m)
    : n_elements_(n_elements), carrier_freq_hz_(carrier_freq_hz), spacing_m_(spacing_m) {
  if (n_elements_ < 2) throw std::invalid_argument("array needs at least 2 elements");
  if (!(carrier_freq_hz_ > 0.0) || !std::isfinite(carrier_freq_hz_))
    throw std::invalid_argument("carrier frequency must be positive");
  if (spacing_m_ <= 0.0) spacing_m_ = 0.5 * carrier_wavelength();
  if (!std::isfinite(spacing_m_)) throw std::invalid_argument("element spacing must be finite");
}

Target::Target(double range_m, double angle_rad) : range_m_(range_m), angle_rad_(angle_rad) {
  if (!(range_m_ > 0.0) || !std::isfinite(range_m_))
    throw std::invalid_argument("target range must be positive, got " + std::to_string(range_m));
  if (!(angle_rad_ > 0.0 && angle_rad_ < kPi))
    throw std::invalid_argument("target angle must lie in (0, pi), got " +
                                std::to_string(angle_rad));
}

FrequencyGrid::FrequencyGrid(int n_subcarriers, double spacing_hz, double carrier_freq_hz)
    : n_subcarriers_(n_subcarriers), spacing_hz_(spacing_hz), carrier_freq_hz_(carrier_freq_hz) {
  if (n_subcarriers_ < 1) throw std::invalid_argument("need at least one subcarrier");
  if (!(spacing_hz_ > 0.0)) throw std::invalid_argument("subcarrier spacing must be positive");
  if (!(carrier_freq_hz_ > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
}

std::vector<double> element_offsets(const ArrayConfig& array) {
  std::vector<double> out(static_cast<std::size_t>(array.n_elements()));
  for (int i = 0; i < array.n_elements(); ++i) out[static_cast<std::size_t>(i)] = array.offset(i);
  return out;
}

namespace {

void check_element(const ArrayConfig& array, int element) {
  if (element < 0 || element >= array.n_elements())
    throw std::out_of_range("element index " + std::to_string(element) + " outside [0, " +
                            std::to_string(array.n_elements()) + ")");
}

}  // namespace

double exact_distance(const ArrayConfig& array, const Target& target, int element) {
  check_element(array, element);
  const double x = array.offset(element) * array.spacing_m();
  const double r = target.range_m();
  return std::sqrt(r * r + x * x - 2.0 * r * x * std::cos(target.angle_rad()));
}

double fresnel_distance(const ArrayConfig& array, const Target& target, int element) {
  check_element(array, element);
  const double x = array.offset(element) * array.spacing_m();
  const double r = target.range_m();
  const double s = std::sin(target.angle_rad());
  return r - x * std::cos(target.angle_rad()) + x * x * s * s / (2.0 * r);
}

void element_distances(const ArrayConfig& array, double range_m, double angle_rad,
                       std::vector<double>& out) {
  const int n = array.n_elements();
  out.resize(static_cast<std::size_t>(n));
  const double c2 = 2.0 * range_m * std::cos(angle_rad);
  const double r2 = range_m * range_m;
  const double d = array.spacing_m();
  for (int i = 0; i < n; ++i) {
    const double x = array.offset(i) * d;
    out[static_cast<std::size_t>(i)] = std::sqrt(r2 + x * x - c2 * x);
  }
}

Eigen::VectorXcd steering_vector(const ArrayConfig& array, double freq_hz, const Target& target) {
  std::vector<double> dist;
  element_distances(array, target.range_m(), target.angle_rad(), dist);
  const double k = 2.0 * kPi * freq_hz / kSpeedOfLight;
  Eigen::VectorXcd a(array.n_elements());
  for (int i = 0; i < array.n_elements(); ++i) a(i) = std::polar(1.0, -k * dist[static_cast<std::size_t>(i)]);
  return a;
}

FresnelPhase fresnel_phase_params(const ArrayConfig& array, double freq_hz, const Target& target) {
  const double lambda = kSpeedOfLight / freq_hz;
  const double d = array.spacing_m();
  const double r = target.range_m();
  const double s = std::sin(target.angle_rad());
  return FresnelPhase{
      -2.0 * kPi * r / lambda,
      2.0 * kPi * d / lambda * std::cos(target.angle_rad()),
      -kPi * d * d / (lambda * r) * s * s,
  };
}

Eigen::VectorXcd fresnel_steering_vector(const ArrayConfig& array, double freq_hz,
                                         const Target& target) {
  const FresnelPhase ph = fresnel_phase_params(array, freq_hz, target);
  Eigen::VectorXcd a(array.n_elements());
  for (int i = 0; i < array.n_elements(); ++i) {
    const double u = array.offset(i);
    a(i) = std::polar(1.0, ph.phi + ph.gamma * u + ph.eta * u * u);
  }
  return a;
}

double rayleigh_distance(const ArrayConfig& array) {
  const double D = array.aperture_m();
  return 2.0 * D * D / array.carrier_wavelength();
}

}  // namespace nfloc
