#include "nfloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "nfloc/random.hpp"
#include "nfloc/subspace.hpp"

namespace nfloc {

std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kSubspaceFitting:
      return "sf";
    case EstimatorKind::kFresnel:
      return "fresnel";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "sf") return EstimatorKind::kSubspaceFitting;
  if (name == "fresnel") return EstimatorKind::kFresnel;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "' (expected sf or fresnel)");
}

Scene SceneSampler::sample(int n_targets, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> range(r_min, r_max);
  std::uniform_real_distribution<double> angle(theta_min, theta_max);
  constexpr int kMaxAttempts = 10000;
  auto pick = [&rng](const std::vector<double>& choices, std::uniform_real_distribution<double>& dist) {
    if (choices.empty()) return dist(rng);
    std::uniform_int_distribution<std::size_t> idx(0, choices.size() - 1);
    return choices[idx(rng)];
  };
  std::vector<Target> targets;
  for (int attempt = 0; attempt < kMaxAttempts && static_cast<int>(targets.size()) < n_targets; ++attempt) {
    const double r = pick(r_choices, range);
    const double th = pick(theta_choices, angle);
    const bool clear = std::all_of(targets.begin(), targets.end(), [&](const Target& t) {
      return std::abs(t.range_m() - r) >= min_sep_r && std::abs(t.angle_rad() - th) >= min_sep_theta;
    });
    if (clear) targets.emplace_back(r, th);
  }
  if (static_cast<int>(targets.size()) < n_targets)
    throw std::runtime_error("scene sampler could not place " + std::to_string(n_targets) +
                             " separated targets");
  return Scene(std::move(targets));
}

void ExperimentConfig::validate() const {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
  if (n_targets < 1 || n_targets > 4) throw std::invalid_argument("n_targets must be in [1, 4]");
  if (n_targets >= array.n_elements()) throw std::invalid_argument("n_targets must be below n_elements");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (estimators.empty()) throw std::invalid_argument("at least one estimator is required");
  if (!(sampler.r_min > 0.0) || !(sampler.r_max > sampler.r_min))
    throw std::invalid_argument("scene range interval must satisfy 0 < r_min < r_max");
  if (sampler.r_max >= rayleigh_distance(array))
    throw std::invalid_argument("scene range must stay below the Rayleigh distance (" +
                                std::to_string(rayleigh_distance(array)) + " m)");
  if (!(sampler.theta_min > 0.0) || !(sampler.theta_max < kPi) || !(sampler.theta_max > sampler.theta_min))
    throw std::invalid_argument("scene angle interval must lie inside (0, pi)");
  for (const Waveband& w : wavebands)
    if (!(w.spacing_hz > 0.0)) throw std::invalid_argument("waveband '" + w.label + "' needs a positive spacing");
  for (double b : bandwidth_list_hz)
    if (!(b > 0.0)) throw std::invalid_argument("bandwidths must be positive");
  const bool uses_fresnel = std::find(estimators.begin(), estimators.end(), EstimatorKind::kFresnel) != estimators.end();
  if (uses_fresnel) {
    const int window = odd_subarray_size(array.n_elements()) + 1 - fresnel.smoothing_len;
    if (fresnel.smoothing_len <= n_targets || window <= n_targets)
      throw std::invalid_argument("fresnel smoothing_len must leave more than n_targets windows of length > n_targets");
    if (fresnel.theta_axis.size() < 2 || fresnel.r_axis.size() < 2)
      throw std::invalid_argument("fresnel search axes need at least 2 points");
  }
}

std::vector<int> match_estimates(const std::vector<Location>& truth, const std::vector<Location>& estimates,
                                 double r_scale, double theta_scale) {
  if (truth.size() != estimates.size())
    throw std::invalid_argument("match_estimates: truth and estimate lists differ in length");
  if (truth.size() > 4) throw std::invalid_argument("match_estimates supports at most 4 targets");
  std::vector<int> perm(truth.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t p = 0; p < truth.size(); ++p) {
      const Location& e = estimates[static_cast<std::size_t>(perm[p])];
      const double dr = (e.range_m - truth[p].range_m) / r_scale;
      const double dt = (e.angle_rad - truth[p].angle_rad) / theta_scale;
      cost += dr * dr + dt * dt;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void NmseAccumulator::add(const Location& truth, const Location& estimate) {
  const double dr = estimate.range_m - truth.range_m;
  const double dt = estimate.angle_rad - truth.angle_rad;
  err_r_ += dr * dr;
  ref_r_ += truth.range_m * truth.range_m;
  err_t_ += dt * dt;
  ref_t_ += truth.angle_rad * truth.angle_rad;
  const double tx = truth.range_m * std::cos(truth.angle_rad);
  const double ty = truth.range_m * std::sin(truth.angle_rad);
  const double ex = estimate.range_m * std::cos(estimate.angle_rad);
  const double ey = estimate.range_m * std::sin(estimate.angle_rad);
  err_p_ += (ex - tx) * (ex - tx) + (ey - ty) * (ey - ty);
  ref_p_ += tx * tx + ty * ty;
  ++count_;
}

void NmseAccumulator::merge(const NmseAccumulator& other) {
  err_r_ += other.err_r_;
  ref_r_ += other.ref_r_;
  err_t_ += other.err_t_;
  ref_t_ += other.ref_t_;
  err_p_ += other.err_p_;
  ref_p_ += other.ref_p_;
  count_ += other.count_;
}

NmseTriple NmseAccumulator::result() const {
  if (count_ == 0) throw std::logic_error("NMSE of an empty set");
  return NmseTriple{err_r_ / ref_r_, err_t_ / ref_t_, err_p_ / ref_p_};
}

NmseTriple nmse(const std::vector<std::pair<Location, Location>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("nmse needs at least one matched pair");
  NmseAccumulator acc;
  for (const auto& [truth, est] : pairs) acc.add(truth, est);
  return acc.result();
}

namespace {

struct PointSpec {
  double sweep_value;
  double snr_db;
  std::uint64_t seed_index;
  std::vector<Waveband> wavebands;
};

// Outcome of one (trial, waveband, estimator) cell.
struct CellResult {
  NmseAccumulator acc;
  int failures = 0;
};

std::vector<CellResult> run_trial(const ExperimentConfig& cfg, const PointSpec& point, int trial) {
  const std::uint64_t trial_seed =
      derive_seed(cfg.base_seed, {point.seed_index, static_cast<std::uint64_t>(trial)});
  const Scene scene = cfg.sampler.sample(cfg.n_targets, derive_seed(trial_seed, {kTagScene}));
  std::vector<Location> truth;
  for (const Target& t : scene.targets()) truth.push_back(Location{t.range_m(), t.angle_rad()});

  std::vector<CellResult> out;
  out.reserve(point.wavebands.size() * cfg.estimators.size());
  for (const Waveband& band : point.wavebands) {
    const OfdmConfig ofdm(cfg.ofdm.n_subcarriers(), band.spacing_hz, cfg.ofdm.n_symbols(), cfg.ofdm.cp_fraction(),
                          cfg.ofdm.modulation());
    const ReceivedData rx = synthesize_received(cfg.array, ofdm, scene, point.snr_db, trial_seed);
    const SubcarrierData data = analyze_subcarriers(rx, cfg.n_targets);
    for (EstimatorKind kind : cfg.estimators) {
      const Estimate est = kind == EstimatorKind::kSubspaceFitting
                               ? estimate_sf(data.subspaces, rx.freq_grid, cfg.array, cfg.n_targets, cfg.sf_grid)
                               : estimate_fresnel(data, rx.freq_grid, cfg.array, cfg.n_targets, cfg.fresnel);
      CellResult cell;
      if (est.detection_failed || static_cast<int>(est.targets.size()) != cfg.n_targets) {
        cell.failures = cfg.n_targets - static_cast<int>(est.targets.size());
        if (cell.failures <= 0) cell.failures = 1;
      } else {
        const auto perm = match_estimates(truth, est.targets, cfg.sampler.r_max);
        for (std::size_t p = 0; p < truth.size(); ++p)
          cell.acc.add(truth[p], est.targets[static_cast<std::size_t>(perm[p])]);
      }
      out.push_back(cell);
    }
  }
  return out;
}

SweepTable run_sweep(const ExperimentConfig& cfg, const std::string& param, const std::vector<PointSpec>& points) {
  cfg.validate();
  const std::size_t n_jobs = points.size() * static_cast<std::size_t>(cfg.n_trials);
  std::vector<std::vector<CellResult>> results(n_jobs);

  // Trials are independent; results land in fixed slots and are reduced in
  // order, so the table does not depend on the thread count.
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const std::size_t pi = job / static_cast<std::size_t>(cfg.n_trials);
      const int trial = static_cast<int>(job % static_cast<std::size_t>(cfg.n_trials));
      results[job] = run_trial(cfg, points[pi], trial);
    }
  };
  const int n_threads = std::min<int>(cfg.threads, static_cast<int>(n_jobs));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepTable table{param, {}};
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const PointSpec& point = points[pi];
    for (std::size_t b = 0; b < point.wavebands.size(); ++b) {
      for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        const std::size_t cell = b * cfg.estimators.size() + e;
        NmseAccumulator acc;
        int failures = 0;
        for (int trial = 0; trial < cfg.n_trials; ++trial) {
          const CellResult& r = results[pi * static_cast<std::size_t>(cfg.n_trials) + static_cast<std::size_t>(trial)][cell];
          acc.merge(r.acc);
          failures += r.failures;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        table.rows.push_back(SweepRow{point.sweep_value, cfg.estimators[e], point.wavebands[b].label,
                                      acc.empty() ? NmseTriple{nan, nan, nan} : acc.result(), failures,
                                      cfg.n_trials});
      }
    }
  }
  return table;
}

}  // namespace

SweepTable run_snr_sweep(const ExperimentConfig& config) {
  if (config.snr_list_db.empty()) throw std::invalid_argument("snr_list_db is empty");
  if (config.wavebands.empty()) throw std::invalid_argument("at least one waveband is required");
  std::vector<PointSpec> points;
  for (std::size_t i = 0; i < config.snr_list_db.size(); ++i)
    points.push_back(PointSpec{config.snr_list_db[i], config.snr_list_db[i], i, config.wavebands});
  return run_sweep(config, "snr_db", points);
}

SweepTable run_bandwidth_sweep(const ExperimentConfig& config) {
  if (config.bandwidth_list_hz.empty()) throw std::invalid_argument("bandwidth_list_hz is empty");
  std::vector<PointSpec> points;
  const int M = config.ofdm.n_subcarriers();
  // Same seed index for every bandwidth: all points see identical scenes,
  // symbols and noise draws.
  for (double b : config.bandwidth_list_hz)
    points.push_back(PointSpec{b, config.bandwidth_snr_db, 0, {Waveband{"B", b / M}}});
  return run_sweep(config, "bandwidth_hz", points);
}

double max_failure_rate(const SweepTable& table, int n_targets) {
  double worst = 0.0;
  for (const SweepRow& row : table.rows)
    worst = std::max(worst, static_cast<double>(row.failures) / (static_cast<double>(row.trials) * n_targets));
  return worst;
}

}  // namespace nfloc
