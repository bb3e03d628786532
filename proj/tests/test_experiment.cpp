#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "nfloc/experiment.hpp"

using namespace nfloc;

namespace {

constexpr double kDeg = kPi / 180.0;

// Small but realistic configuration that runs in well under a second per
// trial.
ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.array = ArrayConfig(33, 28e9);  // Rayleigh distance about 5.8 m
  c.ofdm = OfdmConfig(4, 1e6, 30);
  c.n_trials = 3;
  c.snr_list_db = {0.0, 10.0};
  c.wavebands = {{"NB", 480.0}, {"WB", 48e6}};
  c.sampler.r_min = 1.5;
  c.sampler.r_max = 5.0;
  c.sampler.min_sep_r = 0.5;
  c.sf_grid = SearchGrid::uniform(1.0, 5.5, 0.1, 40 * kDeg, 140 * kDeg, 0.5 * kDeg, 5);
  c.fresnel = FresnelConfig{c.sf_grid.theta_axis(), c.sf_grid.r_axis(), 12, 5};
  c.bandwidth_list_hz = {1e6, 1e8};
  return c;
}

// Independent brute force: enumerate permutations recursively.
double best_cost(const std::vector<Location>& truth, const std::vector<Location>& est, std::vector<int>& used,
                 std::size_t p, double r_scale) {
  if (p == truth.size()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < est.size(); ++j) {
    if (used[j]) continue;
    used[j] = 1;
    const double dr = (est[j].range_m - truth[p].range_m) / r_scale;
    const double dt = (est[j].angle_rad - truth[p].angle_rad) / kPi;
    best = std::min(best, dr * dr + dt * dt + best_cost(truth, est, used, p + 1, r_scale));
    used[j] = 0;
  }
  return best;
}

}  // namespace

TEST_CASE("estimate matching") {
  CHECK(match_estimates({{10, 1}}, {{12, 1.2}}, 60.0) == std::vector<int>{0});
  CHECK(match_estimates({{10, 1}, {30, 2}}, {{31, 2.01}, {9, 0.98}}, 60.0) == std::vector<int>{1, 0});
  CHECK_THROWS_AS(match_estimates({{10, 1}}, {}, 60.0), std::invalid_argument);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ur(5, 60), ut(0.7, 2.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Location> truth, est;
    for (int p = 0; p < 3; ++p) {
      truth.push_back({ur(rng), ut(rng)});
      est.push_back({ur(rng), ut(rng)});
    }
    const auto perm = match_estimates(truth, est, 60.0);
    double cost = 0.0;
    for (std::size_t p = 0; p < 3; ++p) {
      const Location& e = est[static_cast<std::size_t>(perm[p])];
      cost += std::pow((e.range_m - truth[p].range_m) / 60.0, 2) + std::pow((e.angle_rad - truth[p].angle_rad) / kPi, 2);
    }
    std::vector<int> used(3, 0);
    CHECK(cost == doctest::Approx(best_cost(truth, est, used, 0, 60.0)).epsilon(1e-14));
  }
}

TEST_CASE("nmse") {
  const NmseTriple zero = nmse({{{10, 1}, {10, 1}}, {{20, 2}, {20, 2}}});
  CHECK(zero.distance == 0.0);
  CHECK(zero.angle == 0.0);
  CHECK(zero.location == 0.0);

  CHECK(nmse({{{10, 1}, {11, 1}}}).distance == doctest::Approx(0.01));
  CHECK_THROWS_AS(nmse({}), std::invalid_argument);

  // Two trials, two targets each, summed by hand.
  const std::vector<std::pair<Location, Location>> pairs{
      {{10, 1.0}, {10.5, 1.1}}, {{20, 2.0}, {19, 2.0}}, {{30, 1.5}, {30, 1.4}}, {{40, 0.5}, {42, 0.5}}};
  double er = 0, rr = 0, et = 0, rt = 0, ep = 0, rp = 0;
  for (const auto& [t, e] : pairs) {
    er += (e.range_m - t.range_m) * (e.range_m - t.range_m);
    rr += t.range_m * t.range_m;
    et += (e.angle_rad - t.angle_rad) * (e.angle_rad - t.angle_rad);
    rt += t.angle_rad * t.angle_rad;
    const double dx = e.range_m * std::cos(e.angle_rad) - t.range_m * std::cos(t.angle_rad);
    const double dy = e.range_m * std::sin(e.angle_rad) - t.range_m * std::sin(t.angle_rad);
    ep += dx * dx + dy * dy;
    rp += t.range_m * t.range_m;
  }
  const NmseTriple got = nmse(pairs);
  CHECK(got.distance == doctest::Approx(er / rr).epsilon(1e-14));
  CHECK(got.angle == doctest::Approx(et / rt).epsilon(1e-14));
  CHECK(got.location == doctest::Approx(ep / rp).epsilon(1e-12));
  CHECK(got.distance == doctest::Approx(5.25 / 3000.0).epsilon(1e-14));
}

TEST_CASE("scene sampler") {
  SceneSampler s;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Scene scene = s.sample(2, seed);
    REQUIRE(scene.size() == 2);
    const Target& a = scene.targets()[0];
    const Target& b = scene.targets()[1];
    for (const Target& t : scene.targets()) {
      CHECK(t.range_m() >= 5.0);
      CHECK(t.range_m() <= 60.0);
      CHECK(t.angle_rad() >= 40 * kDeg);
      CHECK(t.angle_rad() <= 140 * kDeg);
    }
    CHECK(std::abs(a.range_m() - b.range_m()) >= 2.0);
    CHECK(std::abs(a.angle_rad() - b.angle_rad()) >= 4 * kDeg);
  }
  CHECK(s.sample(2, 9).targets()[1].range_m() == s.sample(2, 9).targets()[1].range_m());

  SceneSampler cramped;
  cramped.r_min = 5.0;
  cramped.r_max = 5.5;
  CHECK_THROWS_AS(cramped.sample(2, 1), std::runtime_error);
}

TEST_CASE("config validation") {
  ExperimentConfig c = tiny_config();
  CHECK_NOTHROW(c.validate());
  c.n_trials = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.sampler.r_max = 6.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.sampler.theta_max = kPi;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.fresnel.smoothing_len = 2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(estimator_name(parse_estimator("fresnel")) == "fresnel");
  CHECK_THROWS_AS(parse_estimator("music"), std::invalid_argument);
}

TEST_CASE("noiseless on-grid sweep has zero error") {
  ExperimentConfig c = tiny_config();
  c.n_trials = 2;
  c.snr_list_db = {std::numeric_limits<double>::infinity()};
  c.sf_grid = SearchGrid(c.sf_grid.r_axis(), c.sf_grid.theta_axis(), 0);
  c.fresnel.refine_iters = 0;
  const auto& r = c.sf_grid.r_axis();
  const auto& t = c.sf_grid.theta_axis();
  c.sampler.r_choices.assign(r.begin() + 6, r.begin() + 40);
  c.sampler.theta_choices.assign(t.begin() + 20, t.end() - 20);
  c.sampler.min_sep_theta = 10 * kDeg;
  const SweepTable table = run_snr_sweep(c);
  REQUIRE(table.rows.size() == 4);
  for (const SweepRow& row : table.rows) {
    CHECK(row.failures == 0);
    CHECK(row.nmse.distance == 0.0);
    CHECK(row.nmse.angle == 0.0);
    CHECK(row.nmse.location == 0.0);
  }
}

TEST_CASE("sweeps are deterministic and thread-count independent") {
  ExperimentConfig c = tiny_config();
  const SweepTable a = run_snr_sweep(c);
  const SweepTable b = run_snr_sweep(c);
  c.threads = 3;
  const SweepTable threaded = run_snr_sweep(c);
  REQUIRE(a.rows.size() == 2 * 2 * 2);
  CHECK(a.sweep_param == "snr_db");
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i] == b.rows[i]);
    CHECK(a.rows[i] == threaded.rows[i]);
    CHECK(a.rows[i].trials == 3);
    CHECK(a.rows[i].failures <= 3 * 2);
    if (a.rows[i].failures < 6) {
      CHECK(a.rows[i].nmse.distance >= 0.0);
      CHECK(std::isfinite(a.rows[i].nmse.location));
    }
  }
  c.base_seed = 2;
  const SweepTable other = run_snr_sweep(c);
  CHECK_FALSE(other.rows[0] == a.rows[0]);
}

TEST_CASE("bandwidth sweep") {
  ExperimentConfig c = tiny_config();
  c.n_trials = 2;
  c.estimators = {EstimatorKind::kFresnel};
  const SweepTable t = run_bandwidth_sweep(c);
  CHECK(t.sweep_param == "bandwidth_hz");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].sweep_value == 1e6);
  CHECK(t.rows[1].sweep_value == 1e8);
  c.bandwidth_list_hz = {5e7};
  CHECK(run_bandwidth_sweep(c).rows.size() == 1);
  c.bandwidth_list_hz.clear();
  CHECK_THROWS_AS(run_bandwidth_sweep(c), std::invalid_argument);
}

TEST_CASE("default wavebands and sizes") {
  const ExperimentConfig c;
  REQUIRE(c.wavebands.size() == 2);
  CHECK(c.wavebands[0].spacing_hz == 480.0);
  CHECK(c.wavebands[1].spacing_hz == 480e5);
  CHECK(c.array.n_elements() == 128);
  CHECK(c.ofdm.n_subcarriers() == 64);
  CHECK(c.ofdm.n_symbols() == 200);
  CHECK(c.fresnel.smoothing_len == 50);
  CHECK(c.n_trials == 200);
  CHECK(c.bandwidth_snr_db == 0.0);
}

TEST_CASE("distance NMSE falls with SNR") {
  ExperimentConfig c = tiny_config();
  c.n_trials = 50;
  c.estimators = {EstimatorKind::kFresnel};
  c.wavebands = {{"WB", 48e6}};
  c.snr_list_db = {-25.0, -15.0, -5.0, 5.0, 15.0, 25.0};
  const SweepTable t = run_snr_sweep(c);
  REQUIRE(t.rows.size() == 6);
  // Spearman rank correlation between SNR and distance NMSE.
  std::vector<double> y;
  for (const SweepRow& r : t.rows) y.push_back(r.nmse.distance);
  std::vector<int> idx(6);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return y[static_cast<std::size_t>(i)] < y[static_cast<std::size_t>(j)]; });
  std::vector<double> rank(6);
  for (int k = 0; k < 6; ++k) rank[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = k;
  double d2 = 0.0;
  for (int i = 0; i < 6; ++i) d2 += std::pow(i - rank[static_cast<std::size_t>(i)], 2);
  const double rho = 1.0 - 6.0 * d2 / (6.0 * 35.0);
  CHECK(rho <= -0.8);
}

TEST_CASE("failure rate") {
  SweepTable t{"snr_db", {}};
  t.rows.push_back(SweepRow{0.0, EstimatorKind::kFresnel, "WB", {}, 3, 10});
  t.rows.push_back(SweepRow{1.0, EstimatorKind::kFresnel, "WB", {}, 12, 10});
  CHECK(max_failure_rate(t, 2) == doctest::Approx(0.6));
}
