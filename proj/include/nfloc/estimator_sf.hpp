#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nfloc/geometry.hpp"
#include "nfloc/search.hpp"
#include "nfloc/signal.hpp"
#include "nfloc/subspace.hpp"

namespace nfloc {

enum class ProjectionForm {
  kAuto,    // signal form when P < N - P
  kSignal,  // sum_m ||a_m||^2 - ||V_s^H a_m||^2
  kNoise,   // sum_m ||U_n^H a_m||^2
};

/// Wideband near-field MUSIC pseudospectrum
///   J(r, theta) = 1 / sum_m ||U_nm^H a_m(r, theta)||^2
/// with exact spherical-wavefront steering vectors. The denominator is
/// floored at 1e-12 * M * N.
///
/// Holds copies of the per-subcarrier bases; evaluation is const and
/// thread-safe.
class NearFieldSpectrum {
 public:
  NearFieldSpectrum(const ArrayConfig& array, const FrequencyGrid& freq,
                    std::span<const SubspaceDecomposition> subspaces,
                    ProjectionForm form = ProjectionForm::kAuto);

  double denominator(double range_m, double angle_rad) const;
  double operator()(double range_m, double angle_rad) const { return 1.0 / denominator(range_m, angle_rad); }

  const ArrayConfig& array() const { return array_; }
  int n_subcarriers() const { return freq_.n_subcarriers(); }

 private:
  ArrayConfig array_;
  FrequencyGrid freq_;
  bool signal_form_;
  std::vector<Eigen::MatrixXcd> bases_adj_;  // V^H or U^H per subcarrier
  double floor_;
};

/// J(r, theta) computed through the noise subspaces.
double sf_spectrum_value(double range_m, double angle_rad,
                         std::span<const SubspaceDecomposition> subspaces, const FrequencyGrid& freq,
                         const ArrayConfig& array);

/// Dense evaluation over the grid; rows follow r_axis, columns theta_axis.
SpectrumGrid evaluate_spectrum(const SearchGrid& grid, const NearFieldSpectrum& spectrum);

SpectrumGrid evaluate_spectrum(const SearchGrid& grid, std::span<const SubspaceDecomposition> subspaces,
                               const FrequencyGrid& freq, const ArrayConfig& array);

/// The P highest local maxima of the sampled spectrum, in descending order.
/// With an objective and grid.refine_iters() > 0 each peak is polished by
/// alternating golden-section searches in r and theta inside its cell
/// neighbourhood. Fewer than P maxima sets detection_failed.
Estimate pick_peaks(const SpectrumGrid& spectrum, int n_targets,
                    const std::function<double(double, double)>& objective = {});

/// Covariance, subspace split, spectrum and peak picking in one call.
Estimate estimate_sf(const ReceivedData& received, int n_targets, const SearchGrid& grid);

/// Same as above on precomputed subspaces.
Estimate estimate_sf(std::span<const SubspaceDecomposition> subspaces, const FrequencyGrid& freq,
                     const ArrayConfig& array, int n_targets, const SearchGrid& grid);

}  // namespace nfloc
