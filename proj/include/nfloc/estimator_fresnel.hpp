#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nfloc/estimator_sf.hpp"
#include "nfloc/geometry.hpp"
#include "nfloc/search.hpp"
#include "nfloc/signal.hpp"
#include "nfloc/subspace.hpp"

namespace nfloc {

// Low-complexity estimator. Under the Fresnel model the anti-diagonal of an
// odd-sized covariance, Sigma[n, N-1-n], carries phase 2 * offset(n) * gamma
// with gamma = (2 pi d / lambda) cos(theta), independent of range. Angles come
// from MUSIC on a spatially smoothed version of that vector (a virtual array
// with spacing 2d); each angle then gets a 1D range search on the full-array
// near-field spectrum.

/// Anti-diagonal of a (2N'+1) x (2N'+1) covariance; values(i) = Sigma[i, 2N' - i].
struct AntiDiagonalVector {
  Eigen::VectorXcd values;
  int n_half = 0;
};

struct SmoothedCovariance {
  Eigen::MatrixXcd matrix;  // window_len x window_len
  int window_len = 0;
  int n_windows = 0;
};

struct FresnelConfig {
  std::vector<double> theta_axis;
  std::vector<double> r_axis;
  int smoothing_len = 50;  // L, number of overlapping windows
  int refine_iters = 20;

  /// Same axes and refinement as SearchGrid::default_grid(), L = 50.
  static FresnelConfig defaults();
};

struct AngleCandidate {
  double angle_rad = 0.0;
  int cluster = 0;  // index of the spectrum peak that produced it
  bool alias = false;
};

struct AngleSpectrum {
  std::vector<double> theta_axis;
  std::vector<double> values;
  std::vector<double> peaks;  // refined peak angles, descending spectrum value
  std::vector<double> peak_values;
  std::vector<AngleCandidate> candidates;
  bool detection_failed = false;
  std::string diagnostic;
};

struct DistanceSpectrum {
  double angle_rad = 0.0;
  std::vector<double> r_axis;
  std::vector<double> values;
  double range_m = 0.0;
  double peak_value = 0.0;
};

/// Throws std::invalid_argument for even or non-square input.
AntiDiagonalVector antidiagonal_vector(const Eigen::MatrixXcd& covariance);

/// (1/L) sum_l y_l y_l^H over the L contiguous windows of length 2N'+2-L.
/// Requires 1 <= L <= 2N'+1.
SmoothedCovariance spatial_smooth(const AntiDiagonalVector& ybar, int n_windows);

/// Number of leading elements the Fresnel path uses: 2 floor((N-1)/2) + 1.
int odd_subarray_size(int n_elements);

/// Virtual-array MUSIC spectrum over theta, accumulated over subcarriers:
///   1 / sum_m ||U~_m^H a~_m(theta)||^2,  a~_m(theta)[i] = exp(j 2 i gamma_m(theta)).
///
/// Returns up to `n_peaks` refined local maxima (n_peaks = 0 means
/// n_targets), skipping maxima within one virtual_resolution_cell of a
/// stronger one, and their grating-lobe aliases cos(theta') = cos(theta) +-
/// k lambda_c / (2d) that fall inside the axis. Fewer than n_targets maxima
/// sets detection_failed.
AngleSpectrum angle_spectrum(std::span<const SmoothedCovariance> smoothed, const FrequencyGrid& freq,
                             const ArrayConfig& array, const std::vector<double>& theta_axis,
                             int n_targets, int n_peaks = 0, int refine_iters = 0);

/// 1D range search of the full-array near-field spectrum at a fixed angle,
/// golden-section refined inside the winning cell.
DistanceSpectrum distance_spectrum(double angle_rad, const NearFieldSpectrum& spectrum,
                                   const std::vector<double>& r_axis, int refine_iters);

/// Full pipeline on received data.
Estimate estimate_fresnel(const ReceivedData& received, int n_targets, const FresnelConfig& config);

/// Pipeline on precomputed full-array covariances and subspaces.
Estimate estimate_fresnel(const SubcarrierData& data, const FrequencyGrid& freq, const ArrayConfig& array,
                          int n_targets, const FresnelConfig& config);

/// Width in cos(theta) of one resolution cell of the 2d-spaced virtual
/// array with `window_len` elements at the carrier: lambda_c / (2 d W).
double virtual_resolution_cell(const ArrayConfig& array, int window_len);

/// Smoothed anti-diagonal covariances for every subcarrier (first
/// odd_subarray_size(N) elements).
std::vector<SmoothedCovariance> smoothed_covariances(std::span<const Eigen::MatrixXcd> covariances,
                                                     int n_windows);

}  // namespace nfloc
