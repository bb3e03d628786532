#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nfloc/geometry.hpp"

namespace nfloc {

enum class Modulation {
  kQpsk,  // unit-modulus quaternary alphabet (+-1 +-j) / sqrt(2)
};

/// OFDM frame layout. Elementary symbol duration is 1 / spacing; the
/// cyclic prefix is cp_fraction of that.
class OfdmConfig {
 public:
  OfdmConfig(int n_subcarriers, double spacing_hz, int n_symbols, double cp_fraction = 0.25,
             Modulation modulation = Modulation::kQpsk);

  int n_subcarriers() const { return n_subcarriers_; }
  double spacing_hz() const { return spacing_hz_; }
  int n_symbols() const { return n_symbols_; }
  double cp_fraction() const { return cp_fraction_; }
  Modulation modulation() const { return modulation_; }

  double bandwidth_hz() const { return n_subcarriers_ * spacing_hz_; }
  double symbol_duration_s() const { return 1.0 / spacing_hz_; }
  double guard_duration_s() const { return cp_fraction_ * symbol_duration_s(); }
  double total_duration_s() const { return symbol_duration_s() + guard_duration_s(); }
  double sample_interval_s() const { return 1.0 / bandwidth_hz(); }

  FrequencyGrid frequency_grid(double carrier_freq_hz) const {
    return FrequencyGrid(n_subcarriers_, spacing_hz_, carrier_freq_hz);
  }

 private:
  int n_subcarriers_;
  double spacing_hz_;
  int n_symbols_;
  double cp_fraction_;
  Modulation modulation_;
};

/// Targets plus optional per-target amplitude overrides. Without overrides
/// the free-space gain c / (4 pi f_c r) is used.
class Scene {
 public:
  explicit Scene(std::vector<Target> targets);
  Scene(std::vector<Target> targets, std::vector<double> gain_override);

  const std::vector<Target>& targets() const { return targets_; }
  int size() const { return static_cast<int>(targets_.size()); }
  bool has_gain_override() const { return !gain_override_.empty(); }
  const std::vector<double>& gain_override() const { return gain_override_; }

 private:
  std::vector<Target> targets_;
  std::vector<double> gain_override_;
};

/// Data symbols s[k, m, p], stored contiguously with p fastest.
class SymbolTensor {
 public:
  SymbolTensor() = default;
  SymbolTensor(int n_symbols, int n_subcarriers, int n_targets);

  int n_symbols() const { return k_; }
  int n_subcarriers() const { return m_; }
  int n_targets() const { return p_; }

  cplx& operator()(int k, int m, int p) { return data_[index(k, m, p)]; }
  cplx operator()(int k, int m, int p) const { return data_[index(k, m, p)]; }

  /// S_m as a P x K matrix.
  Eigen::MatrixXcd subcarrier_matrix(int m) const;

  bool operator==(const SymbolTensor&) const = default;

 private:
  std::size_t index(int k, int m, int p) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(m)) *
               static_cast<std::size_t>(p_) +
           static_cast<std::size_t>(p);
  }

  int k_ = 0;
  int m_ = 0;
  int p_ = 0;
  std::vector<cplx> data_;
};

struct SceneRealization {
  Scene scene;
  SymbolTensor symbols;
  std::vector<double> path_gains;
  std::uint64_t seed = 0;
};

/// Per-subcarrier N x K received matrices.
struct ReceivedData {
  std::vector<Eigen::MatrixXcd> per_subcarrier;
  FrequencyGrid freq_grid;
  ArrayConfig array;
  double noise_std = 0.0;
};

/// Free-space amplitude gain c / (4 pi f_c r).
double path_loss(double carrier_freq_hz, double range_m);

/// i.i.d. unit-modulus symbols. Each subcarrier draws from its own stream
/// derived from `seed`, so the tensor is identical for a given seed
/// regardless of evaluation order.
SymbolTensor generate_symbols(const OfdmConfig& ofdm, int n_targets, std::uint64_t seed);

/// Draws symbols and fixes the path gains for `scene`.
SceneRealization realize_scene(const ArrayConfig& array, const OfdmConfig& ofdm, const Scene& scene,
                               std::uint64_t seed);

/// Y_m = sum_p beta_p a_m(r_p, theta_p) s_{m,p}^T + W_m for every subcarrier.
///
/// Noise variance per complex entry is the mean noiseless |Y| power divided
/// by 10^(snr_db / 10); snr_db = +inf disables noise. Noise streams are
/// derived from realization.seed per subcarrier.
ReceivedData synthesize_received(const ArrayConfig& array, const OfdmConfig& ofdm,
                                 const SceneRealization& realization, double snr_db);

ReceivedData synthesize_received(const ArrayConfig& array, const OfdmConfig& ofdm,
                                 const Scene& scene, double snr_db, std::uint64_t seed);

/// Builds the sampled time-domain OFDM signal at every element, applies a
/// DFT per symbol and returns max |DFT output - direct frequency-domain
/// model| / max |direct model|.
///
/// With `frequency_dependent_gain` the time-domain side uses the per
/// element, per subcarrier gain c / (4 pi f_m r_{p,n}) instead of the
/// common c / (4 pi f_c r_p); the returned value then measures that
/// simplification rather than numerical round-off.
double time_domain_roundtrip(const ArrayConfig& array, const OfdmConfig& ofdm, const Scene& scene,
                             std::uint64_t seed, bool frequency_dependent_gain = false);

}  // namespace nfloc
