#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfloc/experiment.hpp"
#include "nfloc/search.hpp"
#include "nfloc/signal.hpp"

namespace nfloc {

inline constexpr int kConfigSchemaVersion = 1;

/// Config parse or validation failure. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Fixed scene used by the `spectrum` and `simulate` commands.
struct SceneSpec {
  std::vector<Target> targets{Target(20.0, 60.0 * kPi / 180.0), Target(35.0, 110.0 * kPi / 180.0)};
  double snr_db = 10.0;
  std::string waveband;  // label from ExperimentConfig::wavebands; empty uses ofdm.spacing_hz
};

/// Search axes as written in the file (angles in degrees). Shared by both
/// estimators.
struct GridSpec {
  double r_min_m = 3.0, r_max_m = 80.0, r_step_m = 0.25;
  double theta_min_deg = 30.0, theta_max_deg = 150.0, theta_step_deg = 0.25;
  int refine_iters = 20;

  SearchGrid materialize() const;
};

/// Everything a run needs. Defaults are the full-scale configuration:
/// 28 GHz, 128 half-wavelength elements, 64 subcarriers at 480 kHz, 200
/// snapshots, L = 50, two targets, 200 trials.
struct RunConfig {
  ExperimentConfig experiment;  // sf_grid and fresnel axes built from `grid`
  GridSpec grid;
  SceneSpec scene;
};

/// YAML text. Every key is optional; unknown keys and wrong types raise
/// ConfigError naming the key and its line.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved YAML; parse_config(to_yaml(c)) reproduces c.
std::string to_yaml(const RunConfig& config);

}  // namespace nfloc
