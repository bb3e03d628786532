#include "nfloc/estimator_sf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nfloc {

namespace {

// Alternating r / theta golden-section passes per refined peak.
constexpr int kRefineSweeps = 4;

}  // namespace

NearFieldSpectrum::NearFieldSpectrum(const ArrayConfig& array, const FrequencyGrid& freq,
                                     std::span<const SubspaceDecomposition> subspaces,
                                     ProjectionForm form)
    : array_(array), freq_(freq), signal_form_(false), floor_(0.0) {
  if (static_cast<int>(subspaces.size()) != freq.n_subcarriers())
    throw std::invalid_argument("need one subspace decomposition per subcarrier");
  const int N = array.n_elements();
  const auto P = static_cast<int>(subspaces.front().signal_basis.cols());
  signal_form_ = form == ProjectionForm::kSignal || (form == ProjectionForm::kAuto && P < N - P);
  bases_adj_.reserve(subspaces.size());
  for (const SubspaceDecomposition& s : subspaces) {
    if (s.signal_basis.rows() != N) throw std::invalid_argument("subspace dimension does not match the array");
    bases_adj_.push_back(signal_form_ ? s.signal_basis.adjoint() : s.noise_basis.adjoint());
  }
  floor_ = 1e-12 * freq.n_subcarriers() * N;
}

double NearFieldSpectrum::denominator(double range_m, double angle_rad) const {
  thread_local std::vector<double> dist;
  element_distances(array_, range_m, angle_rad, dist);
  const int N = array_.n_elements();
  const double k0 = 2.0 * kPi * freq_.carrier_freq_hz() / kSpeedOfLight;
  const double dk = 2.0 * kPi * freq_.spacing_hz() / kSpeedOfLight;

  // a_m = a_0 .* z^m since f_m = f_c + m * df.
  Eigen::VectorXcd a(N);
  Eigen::VectorXcd z(N);
  for (int i = 0; i < N; ++i) {
    const double r = dist[static_cast<std::size_t>(i)];
    a(i) = std::polar(1.0, -k0 * r);
    z(i) = std::polar(1.0, -dk * r);
  }
  Eigen::VectorXcd proj;
  double total = 0.0;
  for (std::size_t m = 0; m < bases_adj_.size(); ++m) {
    if (m > 0) a.array() *= z.array();
    proj.noalias() = bases_adj_[m] * a;
    total += signal_form_ ? a.squaredNorm() - proj.squaredNorm() : proj.squaredNorm();
  }
  return std::max(total, floor_);
}

double sf_spectrum_value(double range_m, double angle_rad,
                         std::span<const SubspaceDecomposition> subspaces, const FrequencyGrid& freq,
                         const ArrayConfig& array) {
  return NearFieldSpectrum(array, freq, subspaces, ProjectionForm::kNoise)(range_m, angle_rad);
}

SpectrumGrid evaluate_spectrum(const SearchGrid& grid, const NearFieldSpectrum& spectrum) {
  const auto& r = grid.r_axis();
  const auto& th = grid.theta_axis();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(th.size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < th.size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spectrum(r[i], th[j]);
  return SpectrumGrid{std::move(values), grid};
}

SpectrumGrid evaluate_spectrum(const SearchGrid& grid, std::span<const SubspaceDecomposition> subspaces,
                               const FrequencyGrid& freq, const ArrayConfig& array) {
  return evaluate_spectrum(grid, NearFieldSpectrum(array, freq, subspaces));
}

Estimate pick_peaks(const SpectrumGrid& spectrum, int n_targets,
                    const std::function<double(double, double)>& objective) {
  if (n_targets < 1) throw std::invalid_argument("need at least one target");
  const auto& r_axis = spectrum.grid.r_axis();
  const auto& th_axis = spectrum.grid.theta_axis();
  const auto peaks = local_maxima_2d(spectrum.values);

  Estimate est;
  const int found = std::min<int>(n_targets, static_cast<int>(peaks.size()));
  for (int p = 0; p < found; ++p) {
    const auto [i, j] = peaks[static_cast<std::size_t>(p)];
    double r = r_axis[static_cast<std::size_t>(i)];
    double th = th_axis[static_cast<std::size_t>(j)];
    double value = spectrum.values(i, j);
    const int iters = spectrum.grid.refine_iters();
    if (objective && iters > 0) {
      const auto [r_lo, r_hi] = cell_bracket(r_axis, i);
      const auto [t_lo, t_hi] = cell_bracket(th_axis, j);
      for (int sweep = 0; sweep < kRefineSweeps; ++sweep) {
        std::tie(r, value) =
            golden_section_max([&](double x) { return objective(x, th); }, r_lo, r_hi, r, iters);
        std::tie(th, value) =
            golden_section_max([&](double x) { return objective(r, x); }, t_lo, t_hi, th, iters);
      }
    }
    est.targets.push_back(Location{r, th});
    est.peak_values.push_back(value);
  }
  if (found < n_targets) {
    est.detection_failed = true;
    est.diagnostic = "spectrum has " + std::to_string(peaks.size()) + " local maxima, " +
                     std::to_string(n_targets) + " requested";
  }
  return est;
}

Estimate estimate_sf(std::span<const SubspaceDecomposition> subspaces, const FrequencyGrid& freq,
                     const ArrayConfig& array, int n_targets, const SearchGrid& grid) {
  const NearFieldSpectrum spectrum(array, freq, subspaces);
  return pick_peaks(evaluate_spectrum(grid, spectrum), n_targets,
                    [&](double r, double th) { return spectrum(r, th); });
}

Estimate estimate_sf(const ReceivedData& received, int n_targets, const SearchGrid& grid) {
  const auto subspaces = decompose_subcarriers(received, n_targets);
  return estimate_sf(subspaces, received.freq_grid, received.array, n_targets, grid);
}

}  // namespace nfloc
