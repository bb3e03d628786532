#include "nfloc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "nfloc/random.hpp"

namespace nfloc {

OfdmConfig::OfdmConfig(int n_subcarriers, double spacing_hz, int n_symbols, double cp_fraction,
                       Modulation modulation)
    : n_subcarriers_(n_subcarriers),
      spacing_hz_(spacing_hz),
      n_symbols_(n_symbols),
      cp_fraction_(cp_fraction),
      modulation_(modulation) {
  if (n_subcarriers_ < 1) throw std::invalid_argument("need at least one subcarrier");
  if (n_symbols_ < 1) throw std::invalid_argument("need at least one OFDM symbol");
  if (!(spacing_hz_ > 0.0) || !std::isfinite(spacing_hz_))
    throw std::invalid_argument("subcarrier spacing must be positive");
  if (!(cp_fraction_ >= 0.0) || !std::isfinite(cp_fraction_))
    throw std::invalid_argument("cyclic prefix fraction must be non-negative");
}

Scene::Scene(std::vector<Target> targets) : targets_(std::move(targets)) {
  if (targets_.empty()) throw std::invalid_argument("scene needs at least one target");
}

Scene::Scene(std::vector<Target> targets, std::vector<double> gain_override)
    : targets_(std::move(targets)), gain_override_(std::move(gain_override)) {
  if (targets_.empty()) throw std::invalid_argument("scene needs at least one target");
  if (gain_override_.size() != targets_.size())
    throw std::invalid_argument("gain override must have one entry per target");
}

SymbolTensor::SymbolTensor(int n_symbols, int n_subcarriers, int n_targets)
    : k_(n_symbols),
      m_(n_subcarriers),
      p_(n_targets),
      data_(static_cast<std::size_t>(n_symbols) * static_cast<std::size_t>(n_subcarriers) *
            static_cast<std::size_t>(n_targets)) {}

Eigen::MatrixXcd SymbolTensor::subcarrier_matrix(int m) const {
  Eigen::MatrixXcd s(p_, k_);
  for (int k = 0; k < k_; ++k)
    for (int p = 0; p < p_; ++p) s(p, k) = (*this)(k, m, p);
  return s;
}

double path_loss(double carrier_freq_hz, double range_m) {
  if (!(carrier_freq_hz > 0.0) || !(range_m > 0.0))
    throw std::invalid_argument("path loss needs positive frequency and range");
  return kSpeedOfLight / (4.0 * kPi * carrier_freq_hz * range_m);
}

SymbolTensor generate_symbols(const OfdmConfig& ofdm, int n_targets, std::uint64_t seed) {
  if (n_targets < 1) throw std::invalid_argument("need at least one target");
  const int K = ofdm.n_symbols();
  const int M = ofdm.n_subcarriers();
  SymbolTensor s(K, M, n_targets);
  const double a = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < M; ++m) {
    std::mt19937_64 rng(derive_seed(seed, {kTagSymbols, static_cast<std::uint64_t>(m)}));
    for (int k = 0; k < K; ++k) {
      for (int p = 0; p < n_targets; ++p) {
        const std::uint64_t bits = rng() >> 62;
        s(k, m, p) = cplx((bits & 1U) ? -a : a, (bits & 2U) ? -a : a);
      }
    }
  }
  return s;
}

SceneRealization realize_scene(const ArrayConfig& array, const OfdmConfig& ofdm, const Scene& scene,
                               std::uint64_t seed) {
  SceneRealization out{scene, generate_symbols(ofdm, scene.size(), seed), {}, seed};
  out.path_gains.reserve(static_cast<std::size_t>(scene.size()));
  for (int p = 0; p < scene.size(); ++p) {
    out.path_gains.push_back(scene.has_gain_override()
                                 ? scene.gain_override()[static_cast<std::size_t>(p)]
                                 : path_loss(array.carrier_freq_hz(),
                                             scene.targets()[static_cast<std::size_t>(p)].range_m()));
  }
  return out;
}

namespace {

void check_scene(const ArrayConfig& array, const Scene& scene) {
  if (scene.size() >= array.n_elements())
    throw std::invalid_argument("number of targets (" + std::to_string(scene.size()) +
                                ") must be below the element count (" +
                                std::to_string(array.n_elements()) + ")");
  const double limit = rayleigh_distance(array);
  for (const Target& t : scene.targets()) {
    if (t.range_m() >= limit)
      throw std::invalid_argument("target at " + std::to_string(t.range_m()) +
                                  " m lies outside the near-field region (Rayleigh distance " +
                                  std::to_string(limit) + " m)");
  }
}

}  // namespace

ReceivedData synthesize_received(const ArrayConfig& array, const OfdmConfig& ofdm,
                                 const SceneRealization& realization, double snr_db) {
  const Scene& scene = realization.scene;
  check_scene(array, scene);
  const int N = array.n_elements();
  const int M = ofdm.n_subcarriers();
  const int K = ofdm.n_symbols();
  const int P = scene.size();
  if (realization.symbols.n_symbols() != K || realization.symbols.n_subcarriers() != M ||
      realization.symbols.n_targets() != P)
    throw std::invalid_argument("symbol tensor shape does not match the OFDM config and scene");

  ReceivedData out{{}, ofdm.frequency_grid(array.carrier_freq_hz()), array, 0.0};
  out.per_subcarrier.reserve(static_cast<std::size_t>(M));

  double power = 0.0;
  for (int m = 0; m < M; ++m) {
    Eigen::MatrixXcd A(N, P);
    for (int p = 0; p < P; ++p)
      A.col(p) = realization.path_gains[static_cast<std::size_t>(p)] *
                 steering_vector(array, out.freq_grid.frequency(m),
                                 scene.targets()[static_cast<std::size_t>(p)]);
    out.per_subcarrier.push_back(A * realization.symbols.subcarrier_matrix(m));
    power += out.per_subcarrier.back().squaredNorm();
  }
  power /= static_cast<double>(N) * M * K;

  if (std::isinf(snr_db) && snr_db > 0) return out;
  if (std::isnan(snr_db)) throw std::invalid_argument("SNR must not be NaN");

  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  out.noise_std = sigma;
  const double component = sigma / std::sqrt(2.0);
  for (int m = 0; m < M; ++m) {
    std::mt19937_64 rng(derive_seed(realization.seed, {kTagNoise, static_cast<std::uint64_t>(m)}));
    std::normal_distribution<double> gauss(0.0, component);
    Eigen::MatrixXcd& Y = out.per_subcarrier[static_cast<std::size_t>(m)];
    for (int k = 0; k < K; ++k)
      for (int n = 0; n < N; ++n) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        Y(n, k) += cplx(re, im);
      }
  }
  return out;
}

ReceivedData synthesize_received(const ArrayConfig& array, const OfdmConfig& ofdm,
                                 const Scene& scene, double snr_db, std::uint64_t seed) {
  return synthesize_received(array, ofdm, realize_scene(array, ofdm, scene, seed), snr_db);
}

double time_domain_roundtrip(const ArrayConfig& array, const OfdmConfig& ofdm, const Scene& scene,
                             std::uint64_t seed, bool frequency_dependent_gain) {
  const int N = array.n_elements();
  const int M = ofdm.n_subcarriers();
  const int K = ofdm.n_symbols();
  const int P = scene.size();
  if (N > 8 || M > 16 || K > 4)
    throw std::invalid_argument("round-trip validator is limited to N <= 8, M <= 16, K <= 4");

  const SceneRealization real = realize_scene(array, ofdm, scene, seed);
  const ReceivedData direct = synthesize_received(array, ofdm, real, std::numeric_limits<double>::infinity());

  const double fc = array.carrier_freq_hz();
  const double df = ofdm.spacing_hz();
  const double Ts = ofdm.sample_interval_s();
  const double norm = 1.0 / std::sqrt(static_cast<double>(M));

  std::vector<std::vector<double>> delay(static_cast<std::size_t>(P), std::vector<double>(static_cast<std::size_t>(N)));
  for (int p = 0; p < P; ++p)
    for (int n = 0; n < N; ++n)
      delay[static_cast<std::size_t>(p)][static_cast<std::size_t>(n)] =
          exact_distance(array, scene.targets()[static_cast<std::size_t>(p)], n) / kSpeedOfLight;

  double max_dev = 0.0;
  double max_ref = 0.0;
  std::vector<cplx> samples(static_cast<std::size_t>(M));
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < N; ++n) {
      // y_{k,n}[i] after CP removal, sampled at i * Ts within the symbol.
      for (int i = 0; i < M; ++i) {
        cplx acc(0.0, 0.0);
        for (int p = 0; p < P; ++p) {
          const double tau = delay[static_cast<std::size_t>(p)][static_cast<std::size_t>(n)];
          for (int m = 0; m < M; ++m) {
            const double beta =
                frequency_dependent_gain
                    ? kSpeedOfLight / (4.0 * kPi * (fc + m * df) * tau * kSpeedOfLight)
                    : real.path_gains[static_cast<std::size_t>(p)];
            const double phase = 2.0 * kPi * m * df * (i * Ts - tau) - 2.0 * kPi * fc * tau;
            acc += beta * real.symbols(k, m, p) * std::polar(1.0, phase);
          }
        }
        samples[static_cast<std::size_t>(i)] = norm * acc;
      }
      for (int m = 0; m < M; ++m) {
        cplx bin(0.0, 0.0);
        for (int i = 0; i < M; ++i)
          bin += samples[static_cast<std::size_t>(i)] * std::polar(1.0, -2.0 * kPi * m * i / M);
        bin *= norm;
        const cplx ref = direct.per_subcarrier[static_cast<std::size_t>(m)](n, k);
        max_dev = std::max(max_dev, std::abs(bin - ref));
        max_ref = std::max(max_ref, std::abs(ref));
      }
    }
  }
  return max_ref > 0.0 ? max_dev / max_ref : max_dev;
}

}  // namespace nfloc
