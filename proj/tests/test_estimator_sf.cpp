#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "nfloc/estimator_sf.hpp"
#include "nfloc/subspace.hpp"
#include "oracles.hpp"

using namespace nfloc;

namespace {

constexpr double kDeg = kPi / 180.0;
constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct Fixture {
  ArrayConfig array;
  ReceivedData rx;
  std::vector<SubspaceDecomposition> subspaces;
};

Fixture make(int n, int m, double df, int k, const std::vector<Target>& targets, double snr, std::uint64_t seed) {
  const ArrayConfig a(n, 28e9);
  ReceivedData rx = synthesize_received(a, OfdmConfig(m, df, k), Scene(targets), snr, seed);
  auto subs = decompose_subcarriers(rx, static_cast<int>(targets.size()));
  return Fixture{a, std::move(rx), std::move(subs)};
}

}  // namespace

TEST_CASE("noise projection vanishes at the true location") {
  const Fixture f = make(32, 4, 2e7, 20, {Target(3.0, 80 * kDeg)}, kNoNoise, 1);
  const NearFieldSpectrum j(f.array, f.rx.freq_grid, f.subspaces, ProjectionForm::kNoise);
  CHECK(j.denominator(3.0, 80 * kDeg) < 1e-8 * 4 * 32);
  CHECK(j.denominator(3.5, 80 * kDeg) > 1e-3);
}

TEST_CASE("signal and noise forms agree") {
  const Fixture f = make(32, 6, 2e7, 30, {Target(3.0, 80 * kDeg), Target(2.0, 110 * kDeg)}, 5.0, 2);
  const NearFieldSpectrum noise(f.array, f.rx.freq_grid, f.subspaces, ProjectionForm::kNoise);
  const NearFieldSpectrum signal(f.array, f.rx.freq_grid, f.subspaces, ProjectionForm::kSignal);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(1.0, 5.0), ut(0.3, 2.8);
  for (int i = 0; i < 100; ++i) {
    const double r = ur(rng), th = ut(rng);
    CHECK(std::abs(noise.denominator(r, th) - signal.denominator(r, th)) / noise.denominator(r, th) < 1e-6);
    CHECK(sf_spectrum_value(r, th, f.subspaces, f.rx.freq_grid, f.array) ==
          doctest::Approx(noise(r, th)).epsilon(1e-12));
  }
}

TEST_CASE("projection bound") {
  // sum_m tr(P_a V V^H) = sum_m ||V^H a||^2 / ||a||^2 <= M min(1, P).
  const Fixture f = make(24, 5, 2e7, 30, {Target(1.5, 70 * kDeg), Target(2.5, 95 * kDeg)}, 0.0, 4);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ur(1.0, 8.0), ut(0.3, 2.8);
  for (int i = 0; i < 50; ++i) {
    const Target t(ur(rng), ut(rng));
    double total = 0.0;
    for (int m = 0; m < 5; ++m) {
      const auto a = steering_vector(f.array, f.rx.freq_grid.frequency(m), t);
      total += (f.subspaces[static_cast<std::size_t>(m)].signal_basis.adjoint() * a).squaredNorm() / a.squaredNorm();
    }
    CHECK(total <= 5.0 + 1e-12);
  }
}

TEST_CASE("single subcarrier matches narrowband MUSIC") {
  const ArrayConfig a(12, 28e9);
  const OfdmConfig ofdm(1, 1e6, 40);
  const Scene scene({Target(0.4, 70 * kDeg), Target(0.65, 120 * kDeg)});
  const ReceivedData rx = synthesize_received(a, ofdm, scene, 10.0, 7);
  const auto subs = decompose_subcarriers(rx, 2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ur(0.2, 1.0), ut(0.4, 2.7);
  for (int i = 0; i < 10; ++i) {
    const double r = ur(rng), th = ut(rng);
    const double ref = oracle::narrowband_music(rx.per_subcarrier[0], 2, a.spacing_m(), 28e9, r, th);
    CHECK(std::abs(sf_spectrum_value(r, th, subs, rx.freq_grid, a) - ref) / ref < 1e-10);
  }
}

TEST_CASE("grid evaluation and subspace invariance") {
  const Fixture f = make(16, 3, 2e7, 20, {Target(1.0, 75 * kDeg)}, 10.0, 10);
  const SearchGrid grid({0.5, 1.0, 1.5}, {70 * kDeg, 75 * kDeg, 80 * kDeg}, 0);
  const SpectrumGrid s = evaluate_spectrum(grid, f.subspaces, f.rx.freq_grid, f.array);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(s.values(i, j) == doctest::Approx(sf_spectrum_value(grid.r_axis()[static_cast<std::size_t>(i)],
                                                                grid.theta_axis()[static_cast<std::size_t>(j)],
                                                                f.subspaces, f.rx.freq_grid, f.array))
                                  .epsilon(1e-12));

  std::mt19937_64 rng(11);
  auto rotated = f.subspaces;
  for (auto& sub : rotated) {
    sub.signal_basis = sub.signal_basis * oracle::random_unitary(static_cast<int>(sub.signal_basis.cols()), rng);
    sub.noise_basis = sub.noise_basis * oracle::random_unitary(static_cast<int>(sub.noise_basis.cols()), rng);
  }
  for (ProjectionForm form : {ProjectionForm::kNoise, ProjectionForm::kSignal}) {
    const NearFieldSpectrum a(f.array, f.rx.freq_grid, f.subspaces, form);
    const NearFieldSpectrum b(f.array, f.rx.freq_grid, rotated, form);
    for (double r : {0.7, 1.0, 1.3})
      for (double th : {0.9, 1.3, 2.0}) CHECK(a(r, th) == doctest::Approx(b(r, th)).epsilon(1e-9));
  }
}

TEST_CASE("relabeling antennas consistently leaves the spectrum unchanged") {
  const Fixture f = make(10, 2, 2e7, 20, {Target(0.4, 75 * kDeg)}, 5.0, 12);
  std::vector<int> perm{3, 0, 9, 1, 7, 2, 8, 4, 6, 5};
  Eigen::PermutationMatrix<Eigen::Dynamic> pm(10);
  for (int i = 0; i < 10; ++i) pm.indices()(i) = perm[static_cast<std::size_t>(i)];
  double max_rel = 0.0;
  for (double r : {0.3, 0.4, 0.5})
    for (double th : {1.0, 1.3, 1.9}) {
      double permuted = 0.0;
      for (int m = 0; m < 2; ++m) {
        const Eigen::MatrixXcd y = pm * f.rx.per_subcarrier[static_cast<std::size_t>(m)];
        const auto sub = split_subspaces(hermitian_eig(sample_covariance(y)), 1);
        const Eigen::VectorXcd a = pm * steering_vector(f.array, f.rx.freq_grid.frequency(m), Target(r, th));
        permuted += (sub.noise_basis.adjoint() * a).squaredNorm();
      }
      const NearFieldSpectrum j(f.array, f.rx.freq_grid, f.subspaces, ProjectionForm::kNoise);
      max_rel = std::max(max_rel, std::abs(permuted - j.denominator(r, th)) / permuted);
    }
  CHECK(max_rel < 1e-9);
}

TEST_CASE("peak picking") {
  const SearchGrid grid = SearchGrid::uniform(1.0, 5.0, 0.5, 0.5, 2.5, 0.25, 0);
  const auto nr = static_cast<Eigen::Index>(grid.r_axis().size());
  const auto nt = static_cast<Eigen::Index>(grid.theta_axis().size());

  SUBCASE("gaussian bump") {
    Eigen::MatrixXd v(nr, nt);
    for (Eigen::Index i = 0; i < nr; ++i)
      for (Eigen::Index j = 0; j < nt; ++j) {
        const double dr = grid.r_axis()[static_cast<std::size_t>(i)] - 3.0;
        const double dt = grid.theta_axis()[static_cast<std::size_t>(j)] - 1.5;
        v(i, j) = std::exp(-dr * dr - 4 * dt * dt);
      }
    const Estimate e = pick_peaks(SpectrumGrid{v, grid}, 1);
    REQUIRE(e.targets.size() == 1);
    CHECK(e.targets[0].range_m == 3.0);
    CHECK(e.targets[0].angle_rad == 1.5);
    CHECK_FALSE(e.detection_failed);
  }
  SUBCASE("equal peaks keep row-major order") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Ones(nr, nt);
    v(6, 2) = 5.0;
    v(2, 6) = 5.0;
    const Estimate e = pick_peaks(SpectrumGrid{v, grid}, 2);
    REQUIRE(e.targets.size() == 2);
    CHECK(e.targets[0].range_m == grid.r_axis()[2]);
    CHECK(e.targets[1].range_m == grid.r_axis()[6]);
  }
  SUBCASE("too few maxima is reported, not padded") {
    // A single cone has one local maximum.
    Eigen::MatrixXd v(nr, nt);
    for (Eigen::Index i = 0; i < nr; ++i)
      for (Eigen::Index j = 0; j < nt; ++j) v(i, j) = -static_cast<double>(std::abs(i - 3) + std::abs(j - 3));
    const Estimate e = pick_peaks(SpectrumGrid{v, grid}, 2);
    CHECK(e.detection_failed);
    CHECK(e.targets.size() == 1);
    CHECK_FALSE(e.diagnostic.empty());
  }
}

TEST_CASE("noiseless on-grid recovery is exact") {
  const SearchGrid grid = SearchGrid::uniform(4.0, 20.0, 0.25, 50 * kDeg, 130 * kDeg, 0.25 * kDeg, 0);
  const auto& r = grid.r_axis();
  const auto& t = grid.theta_axis();
  SUBCASE("one target") {
    const Fixture f = make(65, 4, 3e6, 20, {Target(r[33], t[101])}, kNoNoise, 13);
    const Estimate e = estimate_sf(f.subspaces, f.rx.freq_grid, f.array, 1, grid);
    REQUIRE(e.targets.size() == 1);
    CHECK(e.targets[0].range_m == r[33]);
    CHECK(e.targets[0].angle_rad == t[101]);
  }
  SUBCASE("two targets") {
    const Fixture f = make(65, 4, 3e6, 20, {Target(r[20], t[60]), Target(r[45], t[230])}, kNoNoise, 14);
    const Estimate e = estimate_sf(f.rx, 2, grid);
    REQUIRE(e.targets.size() == 2);
    std::vector<std::pair<double, double>> got;
    for (const Location& l : e.targets) got.emplace_back(l.range_m, l.angle_rad);
    std::sort(got.begin(), got.end());
    CHECK(got[0] == std::make_pair(r[20], t[60]));
    CHECK(got[1] == std::make_pair(r[45], t[230]));
  }
}

TEST_CASE("noiseless end-to-end with refinement") {
  const SearchGrid grid = SearchGrid::uniform(3.0, 60.0, 0.25, 30 * kDeg, 150 * kDeg, 0.25 * kDeg, 20);
  SUBCASE("full-scale example location") {
    const Fixture f = make(128, 4, 48e6, 20, {Target(20.0, 80 * kDeg)}, kNoNoise, 15);
    const Estimate e = estimate_sf(f.subspaces, f.rx.freq_grid, f.array, 1, grid);
    REQUIRE(e.targets.size() == 1);
    CHECK(std::abs(e.targets[0].range_m - 20.0) < 0.25);
    CHECK(std::abs(e.targets[0].angle_rad - 80 * kDeg) < 0.25 * kDeg);
  }
  SUBCASE("two off-grid targets") {
    const Fixture f =
        make(128, 4, 48e6, 20, {Target(17.3, 71.1 * kDeg), Target(41.7, 103.4 * kDeg)}, kNoNoise, 16);
    Estimate e = estimate_sf(f.subspaces, f.rx.freq_grid, f.array, 2, grid);
    REQUIRE(e.targets.size() == 2);
    if (e.targets[0].range_m > e.targets[1].range_m) std::swap(e.targets[0], e.targets[1]);
    CHECK(std::abs(e.targets[0].range_m - 17.3) < 0.25);
    CHECK(std::abs(e.targets[0].angle_rad - 71.1 * kDeg) < 0.25 * kDeg);
    CHECK(std::abs(e.targets[1].range_m - 41.7) < 0.25);
    CHECK(std::abs(e.targets[1].angle_rad - 103.4 * kDeg) < 0.25 * kDeg);
  }
}

TEST_CASE("search grid validation") {
  CHECK_THROWS_AS(SearchGrid({1.0}, {1.0, 2.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(SearchGrid({0.0, 1.0}, {1.0, 2.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(SearchGrid({1.0, 2.0}, {0.0, 1.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(SearchGrid({2.0, 1.0}, {1.0, 2.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(SearchGrid({1.0, 2.0}, {1.0, 2.0}, -1), std::invalid_argument);
  const SearchGrid d = SearchGrid::default_grid();
  CHECK(d.r_axis().size() == 309);
  CHECK(d.theta_axis().size() == 481);
  CHECK(d.refine_iters() == 20);
}
