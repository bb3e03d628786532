#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nfloc/estimator_fresnel.hpp"
#include "nfloc/estimator_sf.hpp"
#include "nfloc/geometry.hpp"
#include "nfloc/search.hpp"
#include "nfloc/signal.hpp"

namespace nfloc {

enum class EstimatorKind { kSubspaceFitting, kFresnel };

std::string_view estimator_name(EstimatorKind kind);  // "sf" / "fresnel"
EstimatorKind parse_estimator(std::string_view name);

/// Named subcarrier spacing, e.g. {"NB", 480} or {"WB", 48e6}.
struct Waveband {
  std::string label;
  double spacing_hz;
};

/// Uniform random scenes with a minimum pairwise separation in both range
/// and angle.
struct SceneSampler {
  double r_min = 5.0;
  double r_max = 60.0;
  double theta_min = 40.0 * kPi / 180.0;
  double theta_max = 140.0 * kPi / 180.0;
  double min_sep_r = 2.0;
  double min_sep_theta = 4.0 * kPi / 180.0;
  // When non-empty, ranges / angles are drawn uniformly from these values
  // (e.g. search-grid points) instead of the continuous intervals.
  std::vector<double> r_choices;
  std::vector<double> theta_choices;

  /// Rejection sampling; throws std::runtime_error if the constraints
  /// cannot be met.
  Scene sample(int n_targets, std::uint64_t seed) const;
};

struct ExperimentConfig {
  ArrayConfig array{128, 28e9};
  OfdmConfig ofdm{64, 480e3, 200};
  int n_targets = 2;
  int n_trials = 200;
  std::vector<double> snr_list_db{-30.0, -20.0, -15.0, -10.0, 0.0, 10.0};
  std::vector<double> bandwidth_list_hz{1e6, 1e8, 1e10};
  double bandwidth_snr_db = 0.0;
  std::vector<Waveband> wavebands{{"NB", 480.0}, {"WB", 480e5}};
  SceneSampler sampler{};
  std::uint64_t base_seed = 1;
  std::vector<EstimatorKind> estimators{EstimatorKind::kSubspaceFitting, EstimatorKind::kFresnel};
  SearchGrid sf_grid = SearchGrid::default_grid();
  FresnelConfig fresnel = FresnelConfig::defaults();
  int threads = 1;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct NmseTriple {
  double distance = 0.0;
  double angle = 0.0;
  double location = 0.0;

  bool operator==(const NmseTriple&) const = default;
};

struct SweepRow {
  double sweep_value = 0.0;
  EstimatorKind estimator = EstimatorKind::kSubspaceFitting;
  std::string waveband;
  NmseTriple nmse;
  int failures = 0;  // undetected targets, summed over trials
  int trials = 0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepTable {
  std::string sweep_param;  // "snr_db" or "bandwidth_hz"
  std::vector<SweepRow> rows;
};

/// perm[p] is the estimate index assigned to truth p, minimizing the total
/// cost ((dr / r_scale)^2 + (dtheta / theta_scale)^2) over all P!
/// assignments. P <= 4.
std::vector<int> match_estimates(const std::vector<Location>& truth, const std::vector<Location>& estimates,
                                 double r_scale, double theta_scale = kPi);

/// Running sums for NMSE = sum (x_hat - x)^2 / sum x^2; locations are
/// compared in Cartesian coordinates.
class NmseAccumulator {
 public:
  void add(const Location& truth, const Location& estimate);
  void merge(const NmseAccumulator& other);
  bool empty() const { return count_ == 0; }
  /// Throws std::logic_error when empty.
  NmseTriple result() const;

 private:
  double err_r_ = 0.0, ref_r_ = 0.0;
  double err_t_ = 0.0, ref_t_ = 0.0;
  double err_p_ = 0.0, ref_p_ = 0.0;
  long count_ = 0;
};

/// NMSE over matched (truth, estimate) pairs.
NmseTriple nmse(const std::vector<std::pair<Location, Location>>& pairs);

/// One row per (snr, waveband, estimator).
SweepTable run_snr_sweep(const ExperimentConfig& config);

/// One row per (bandwidth, estimator); spacing = B / M, SNR fixed at
/// config.bandwidth_snr_db.
SweepTable run_bandwidth_sweep(const ExperimentConfig& config);

/// Highest per-row failure rate failures / (trials * P).
double max_failure_rate(const SweepTable& table, int n_targets);

}  // namespace nfloc
