#include "nfloc/estimator_fresnel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nfloc {

FresnelConfig FresnelConfig::defaults() {
  const SearchGrid grid = SearchGrid::default_grid();
  return FresnelConfig{grid.theta_axis(), grid.r_axis(), 50, grid.refine_iters()};
}

AntiDiagonalVector antidiagonal_vector(const Eigen::MatrixXcd& covariance) {
  const Eigen::Index n = covariance.rows();
  if (n != covariance.cols()) throw std::invalid_argument("anti-diagonal needs a square matrix");
  if (n % 2 == 0) throw std::invalid_argument("anti-diagonal needs an odd-sized matrix, got " + std::to_string(n));
  AntiDiagonalVector out{Eigen::VectorXcd(n), static_cast<int>((n - 1) / 2)};
  for (Eigen::Index i = 0; i < n; ++i) out.values(i) = covariance(i, n - 1 - i);
  return out;
}

SmoothedCovariance spatial_smooth(const AntiDiagonalVector& ybar, int n_windows) {
  const auto len = static_cast<int>(ybar.values.size());
  if (n_windows < 1 || n_windows > len)
    throw std::invalid_argument("smoothing length " + std::to_string(n_windows) + " outside [1, " +
                                std::to_string(len) + "]");
  const int w = len + 1 - n_windows;
  SmoothedCovariance out{Eigen::MatrixXcd::Zero(w, w), w, n_windows};
  for (int l = 0; l < n_windows; ++l) {
    const auto seg = ybar.values.segment(l, w);
    out.matrix.noalias() += seg * seg.adjoint();
  }
  out.matrix /= static_cast<double>(n_windows);
  out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
  return out;
}

int odd_subarray_size(int n_elements) { return 2 * ((n_elements - 1) / 2) + 1; }

double virtual_resolution_cell(const ArrayConfig& array, int window_len) {
  return array.carrier_wavelength() / (2.0 * array.spacing_m() * window_len);
}

std::vector<SmoothedCovariance> smoothed_covariances(std::span<const Eigen::MatrixXcd> covariances,
                                                     int n_windows) {
  std::vector<SmoothedCovariance> out;
  out.reserve(covariances.size());
  for (const Eigen::MatrixXcd& cov : covariances) {
    const int n = odd_subarray_size(static_cast<int>(cov.rows()));
    out.push_back(spatial_smooth(antidiagonal_vector(cov.topLeftCorner(n, n)), n_windows));
  }
  return out;
}

namespace {

// Virtual-array MUSIC objective over theta.
class VirtualArraySpectrum {
 public:
  VirtualArraySpectrum(std::span<const SmoothedCovariance> smoothed, const FrequencyGrid& freq,
                       double spacing_m, int n_targets)
      : freq_(freq), spacing_(spacing_m) {
    if (static_cast<int>(smoothed.size()) != freq.n_subcarriers())
      throw std::invalid_argument("need one smoothed covariance per subcarrier");
    window_ = smoothed.front().window_len;
    if (n_targets >= window_)
      throw std::invalid_argument("smoothing window must exceed the number of targets");
    signal_form_ = n_targets < window_ - n_targets;
    for (const SmoothedCovariance& s : smoothed) {
      const SubspaceDecomposition sub = split_subspaces(hermitian_eig(s.matrix), n_targets);
      bases_adj_.push_back(signal_form_ ? sub.signal_basis.adjoint() : sub.noise_basis.adjoint());
    }
    floor_ = 1e-12 * freq.n_subcarriers() * window_;
  }

  double operator()(double angle_rad) const {
    const double c = std::cos(angle_rad);
    Eigen::VectorXcd a(window_);
    Eigen::VectorXcd proj;
    double total = 0.0;
    for (int m = 0; m < freq_.n_subcarriers(); ++m) {
      const double gamma = 2.0 * kPi * spacing_ * c / freq_.wavelength(m);
      const cplx step = std::polar(1.0, 2.0 * gamma);
      cplx v(1.0, 0.0);
      for (int i = 0; i < window_; ++i) {
        a(i) = v;
        v *= step;
      }
      proj.noalias() = bases_adj_[static_cast<std::size_t>(m)] * a;
      total += signal_form_ ? a.squaredNorm() - proj.squaredNorm() : proj.squaredNorm();
    }
    return 1.0 / std::max(total, floor_);
  }

 private:
  FrequencyGrid freq_;
  double spacing_;
  int window_ = 0;
  bool signal_form_ = false;
  std::vector<Eigen::MatrixXcd> bases_adj_;
  double floor_ = 0.0;
};

}  // namespace

AngleSpectrum angle_spectrum(std::span<const SmoothedCovariance> smoothed, const FrequencyGrid& freq,
                             const ArrayConfig& array, const std::vector<double>& theta_axis,
                             int n_targets, int n_peaks, int refine_iters) {
  if (theta_axis.size() < 2) throw std::invalid_argument("angle axis needs at least 2 points");
  if (n_peaks <= 0) n_peaks = n_targets;
  const VirtualArraySpectrum objective(smoothed, freq, array.spacing_m(), n_targets);

  AngleSpectrum out;
  out.theta_axis = theta_axis;
  out.values.reserve(theta_axis.size());
  for (double th : theta_axis) out.values.push_back(objective(th));

  const auto maxima = local_maxima_1d(out.values);
  const double period = array.carrier_wavelength() / (2.0 * array.spacing_m());
  const double cell = virtual_resolution_cell(array, smoothed.front().window_len);
  const double lo = theta_axis.front();
  const double hi = theta_axis.back();

  // Maxima within one resolution cell of a stronger one are sidelobe splits.
  std::vector<int> distinct;
  for (int idx : maxima) {
    const double c = std::cos(theta_axis[static_cast<std::size_t>(idx)]);
    const bool near = std::any_of(distinct.begin(), distinct.end(), [&](int j) {
      return std::abs(std::cos(theta_axis[static_cast<std::size_t>(j)]) - c) < cell;
    });
    if (!near) distinct.push_back(idx);
  }

  const int found = std::min<int>(n_peaks, static_cast<int>(distinct.size()));
  for (int p = 0; p < found; ++p) {
    const int idx = distinct[static_cast<std::size_t>(p)];
    const auto [b_lo, b_hi] = cell_bracket(theta_axis, idx);
    const auto [th, value] = golden_section_max(objective, b_lo, b_hi,
                                                theta_axis[static_cast<std::size_t>(idx)], refine_iters);
    out.peaks.push_back(th);
    out.peak_values.push_back(value);
    out.candidates.push_back(AngleCandidate{th, p, false});
    // Grating lobes of the 2d-spaced virtual array.
    for (int k = -3; k <= 3; ++k) {
      if (k == 0) continue;
      const double c = std::cos(th) + k * period;
      if (c <= -1.0 || c >= 1.0) continue;
      const double alias = std::acos(c);
      if (alias >= lo && alias <= hi) out.candidates.push_back(AngleCandidate{alias, p, true});
    }
  }
  if (static_cast<int>(distinct.size()) < n_targets) {
    out.detection_failed = true;
    out.diagnostic = "angle spectrum has " + std::to_string(distinct.size()) + " distinct local maxima, " +
                     std::to_string(n_targets) + " requested";
  }
  return out;
}

DistanceSpectrum distance_spectrum(double angle_rad, const NearFieldSpectrum& spectrum,
                                   const std::vector<double>& r_axis, int refine_iters) {
  if (r_axis.size() < 2) throw std::invalid_argument("range axis needs at least 2 points");
  DistanceSpectrum out;
  out.angle_rad = angle_rad;
  out.r_axis = r_axis;
  out.values.reserve(r_axis.size());
  for (double r : r_axis) out.values.push_back(spectrum(r, angle_rad));
  const auto best = std::max_element(out.values.begin(), out.values.end());
  const auto idx = static_cast<int>(best - out.values.begin());
  const auto [lo, hi] = cell_bracket(r_axis, idx);
  std::tie(out.range_m, out.peak_value) = golden_section_max(
      [&](double r) { return spectrum(r, angle_rad); }, lo, hi, r_axis[static_cast<std::size_t>(idx)],
      refine_iters);
  return out;
}

Estimate estimate_fresnel(const SubcarrierData& data, const FrequencyGrid& freq, const ArrayConfig& array,
                          int n_targets, const FresnelConfig& config) {
  if (n_targets < 1) throw std::invalid_argument("need at least one target");
  const int n_odd = odd_subarray_size(array.n_elements());
  const int L = config.smoothing_len;
  const int window = n_odd + 1 - L;
  if (L <= n_targets || window <= n_targets)
    throw std::invalid_argument("smoothing length " + std::to_string(L) + " leaves " + std::to_string(L) +
                                " windows of length " + std::to_string(window) +
                                "; both must exceed the number of targets");

  const auto smoothed = smoothed_covariances(data.covariances, L);
  const AngleSpectrum angles = angle_spectrum(smoothed, freq, array, config.theta_axis, n_targets,
                                              2 * n_targets, config.refine_iters);

  const NearFieldSpectrum full(array, freq, data.subspaces);
  struct Scored {
    AngleCandidate candidate;
    double range_m;
    double value;
  };
  std::vector<Scored> scored;
  scored.reserve(angles.candidates.size());
  for (const AngleCandidate& c : angles.candidates) {
    const DistanceSpectrum ds = distance_spectrum(c.angle_rad, full, config.r_axis, config.refine_iters);
    scored.push_back(Scored{c, ds.range_m, ds.peak_value});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.value > b.value; });

  // At most one pick per cluster, and never two picks inside one resolution
  // cell (a peak and another peak's alias can coincide).
  const double cell = virtual_resolution_cell(array, window);
  std::vector<int> used_clusters;
  Estimate est;
  for (const Scored& s : scored) {
    if (static_cast<int>(est.targets.size()) == n_targets) break;
    if (std::find(used_clusters.begin(), used_clusters.end(), s.candidate.cluster) != used_clusters.end())
      continue;
    const bool duplicate = std::any_of(est.targets.begin(), est.targets.end(), [&](const Location& t) {
      return std::abs(std::cos(t.angle_rad) - std::cos(s.candidate.angle_rad)) < cell;
    });
    if (duplicate) continue;
    used_clusters.push_back(s.candidate.cluster);
    est.targets.push_back(Location{s.range_m, s.candidate.angle_rad});
    est.peak_values.push_back(s.value);
  }
  if (static_cast<int>(est.targets.size()) < n_targets) {
    est.detection_failed = true;
    est.diagnostic = angles.detection_failed
                         ? angles.diagnostic
                         : "only " + std::to_string(est.targets.size()) + " distinct angle clusters resolved";
  }
  return est;
}

Estimate estimate_fresnel(const ReceivedData& received, int n_targets, const FresnelConfig& config) {
  return estimate_fresnel(analyze_subcarriers(received, n_targets), received.freq_grid, received.array,
                          n_targets, config);
}

}  // namespace nfloc
