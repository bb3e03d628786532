#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace nfloc {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

/// Uniform linear array along the x-axis, centered at the origin.
///
/// Element i (0-based) sits at x = offset(i) * spacing, where
/// offset(i) = i - (N - 1) / 2. Spacing defaults to half the carrier
/// wavelength.
class ArrayConfig {
 public:
  /// spacing_m <= 0 selects lambda_c / 2.
  ArrayConfig(int n_elements, double carrier_freq_hz, double spacing_m = 0.0);

  int n_elements() const { return n_elements_; }
  double carrier_freq_hz() const { return carrier_freq_hz_; }
  double spacing_m() const { return spacing_m_; }
  double carrier_wavelength() const { return kSpeedOfLight / carrier_freq_hz_; }
  double aperture_m() const { return n_elements_ * spacing_m_; }

  /// Centered element offset in units of spacing.
  double offset(int i) const { return i - 0.5 * (n_elements_ - 1); }

 private:
  int n_elements_;
  double carrier_freq_hz_;
  double spacing_m_;
};

/// Point source in polar coordinates about the array center. The angle is
/// measured from the positive array axis and must lie strictly in (0, pi).
class Target {
 public:
  Target(double range_m, double angle_rad);

  double range_m() const { return range_m_; }
  double angle_rad() const { return angle_rad_; }

 private:
  double range_m_;
  double angle_rad_;
};

/// f_m = f_c + m * spacing for m = 0..M-1.
class FrequencyGrid {
 public:
  FrequencyGrid(int n_subcarriers, double spacing_hz, double carrier_freq_hz);

  int n_subcarriers() const { return n_subcarriers_; }
  double spacing_hz() const { return spacing_hz_; }
  double carrier_freq_hz() const { return carrier_freq_hz_; }
  double bandwidth_hz() const { return n_subcarriers_ * spacing_hz_; }

  double frequency(int m) const { return carrier_freq_hz_ + m * spacing_hz_; }
  double wavelength(int m) const { return kSpeedOfLight / frequency(m); }
  double wavenumber(int m) const { return 2.0 * kPi / wavelength(m); }

 private:
  int n_subcarriers_;
  double spacing_hz_;
  double carrier_freq_hz_;
};

/// Phase parameters of the second-order (Fresnel) steering model:
/// phase(i) = phi + gamma * offset(i) + eta * offset(i)^2.
struct FresnelPhase {
  double phi;
  double gamma;
  double eta;
};

std::vector<double> element_offsets(const ArrayConfig& array);

/// Exact element-to-target distance. `element` is 0-based.
double exact_distance(const ArrayConfig& array, const Target& target, int element);

/// Second-order Taylor approximation of exact_distance.
double fresnel_distance(const ArrayConfig& array, const Target& target, int element);

/// Exact near-field steering vector at frequency `freq_hz`:
/// entry i = exp(-j 2 pi f r_i / c).
Eigen::VectorXcd steering_vector(const ArrayConfig& array, double freq_hz, const Target& target);

FresnelPhase fresnel_phase_params(const ArrayConfig& array, double freq_hz, const Target& target);

/// Steering vector built from the Fresnel phase parameters.
Eigen::VectorXcd fresnel_steering_vector(const ArrayConfig& array, double freq_hz,
                                         const Target& target);

/// 2 D^2 / lambda_c with D = N d.
double rayleigh_distance(const ArrayConfig& array);

/// Distances from every element to (range, angle), written into `out`
/// (resized to N). Unchecked; used on hot search paths.
void element_distances(const ArrayConfig& array, double range_m, double angle_rad,
                       std::vector<double>& out);

}  // namespace nfloc
