// nfloc: near-field localization simulations from the command line.
//
//   nfloc [--config FILE] [--seed N] [--trials N] [--estimator sf|fresnel|both]
//         [--threads N] [--out DIR] <spectrum [--scene r:deg,...] | sweep snr |
//         sweep bandwidth | simulate>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "nfloc/config.hpp"
#include "nfloc/estimator_fresnel.hpp"
#include "nfloc/estimator_sf.hpp"
#include "nfloc/experiment.hpp"
#include "nfloc/report.hpp"
#include "nfloc/signal.hpp"
#include "nfloc/subspace.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDetection = 3;
constexpr double kMaxFailureRate = 0.5;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string estimator;
  std::optional<int> threads;
  std::string out = "out";
  std::string scene;
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

ordered_json yaml_to_json(const YAML::Node& node) {
  if (node.IsMap()) {
    ordered_json obj = ordered_json::object();
    for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
    return obj;
  }
  if (node.IsSequence()) {
    ordered_json arr = ordered_json::array();
    for (const auto& item : node) arr.push_back(yaml_to_json(item));
    return arr;
  }
  if (!node.IsScalar()) return nullptr;
  const std::string& s = node.Scalar();
  long long i = 0;
  double d = 0.0;
  if (YAML::convert<long long>::decode(node, i)) return i;
  if (YAML::convert<double>::decode(node, d)) return d;
  return s;
}

std::vector<nfloc::Target> parse_scene(const std::string& text) {
  std::vector<nfloc::Target> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--scene", "expected r:deg pairs, got '" + item + "'");
    const double r = std::stod(item.substr(0, colon));
    const double deg = std::stod(item.substr(colon + 1));
    out.emplace_back(r, deg * nfloc::kPi / 180.0);
  }
  if (out.empty()) throw CLI::ValidationError("--scene", "no targets given");
  return out;
}

nfloc::RunConfig resolve(const Options& opt) {
  nfloc::RunConfig cfg = opt.config_path.empty() ? nfloc::parse_config("", "<defaults>")
                                                 : nfloc::load_config(opt.config_path);
  nfloc::ExperimentConfig& x = cfg.experiment;
  if (opt.seed) x.base_seed = *opt.seed;
  if (opt.trials) x.n_trials = *opt.trials;
  if (opt.threads) x.threads = *opt.threads;
  if (opt.estimator == "both")
    x.estimators = {nfloc::EstimatorKind::kSubspaceFitting, nfloc::EstimatorKind::kFresnel};
  else if (!opt.estimator.empty())
    x.estimators = {nfloc::parse_estimator(opt.estimator)};
  if (!opt.scene.empty()) cfg.scene.targets = parse_scene(opt.scene);
  x.validate();
  return cfg;
}

class Manifest {
 public:
  Manifest(const nfloc::RunConfig& cfg, const std::string& command, int argc, char** argv) {
    doc_["tool"] = "nfloc";
    doc_["version"] = NFLOC_VERSION;
    doc_["command"] = command;
    ordered_json args = ordered_json::array();
    for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
    doc_["argv"] = args;
    doc_["seed"] = cfg.experiment.base_seed;
    doc_["threads"] = cfg.experiment.threads;
    doc_["config"] = yaml_to_json(YAML::Load(nfloc::to_yaml(cfg)));
    doc_["outputs"] = ordered_json::array();
    doc_["timings_s"] = ordered_json::object();
  }

  void output(const fs::path& p) { doc_["outputs"].push_back(p.filename().string()); }
  void timing(const std::string& name, double seconds) { doc_["timings_s"][name] = seconds; }
  ordered_json& doc() { return doc_; }

  void write(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
    os << doc_.dump(2) << '\n';
  }

 private:
  ordered_json doc_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << text;
}

// Writes the resolved config next to the outputs; rerunning with it as
// --config reproduces the run.
void snapshot_config(const nfloc::RunConfig& cfg, const fs::path& out, const std::string& stem, Manifest& m) {
  const fs::path p = out / (stem + ".config.yaml");
  write_text(p, nfloc::to_yaml(cfg));
  m.output(p);
}

nfloc::ReceivedData scene_data(const nfloc::RunConfig& cfg) {
  const nfloc::ExperimentConfig& x = cfg.experiment;
  double spacing = x.ofdm.spacing_hz();
  for (const nfloc::Waveband& w : x.wavebands)
    if (w.label == cfg.scene.waveband) spacing = w.spacing_hz;
  const nfloc::OfdmConfig ofdm(x.ofdm.n_subcarriers(), spacing, x.ofdm.n_symbols(), x.ofdm.cp_fraction(),
                               x.ofdm.modulation());
  return nfloc::synthesize_received(x.array, ofdm, nfloc::Scene(cfg.scene.targets), cfg.scene.snr_db, x.base_seed);
}

ordered_json locations_json(const nfloc::Estimate& est) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < est.targets.size(); ++i)
    arr.push_back({{"range_m", est.targets[i].range_m},
                   {"angle_deg", est.targets[i].angle_rad * 180.0 / nfloc::kPi},
                   {"peak_value", est.peak_values[i]}});
  return arr;
}

int cmd_spectrum(const nfloc::RunConfig& cfg, const fs::path& out, Manifest& m) {
  Stopwatch clock;
  const nfloc::ExperimentConfig& x = cfg.experiment;
  const int P = static_cast<int>(cfg.scene.targets.size());
  const nfloc::ReceivedData rx = scene_data(cfg);
  const nfloc::SubcarrierData data = nfloc::analyze_subcarriers(rx, P);
  m.timing("synthesis_and_eig", clock.lap());
  snapshot_config(cfg, out, "spectrum", m);

  ordered_json truth = ordered_json::array();
  for (const nfloc::Target& t : cfg.scene.targets)
    truth.push_back({{"range_m", t.range_m()}, {"angle_deg", t.angle_rad() * 180.0 / nfloc::kPi}});
  m.doc()["scene"] = {{"snr_db", cfg.scene.snr_db}, {"waveband", cfg.scene.waveband}, {"targets", truth}};

  for (nfloc::EstimatorKind kind : x.estimators) {
    if (kind == nfloc::EstimatorKind::kSubspaceFitting) {
      const nfloc::NearFieldSpectrum spectrum(x.array, rx.freq_grid, data.subspaces);
      const nfloc::SpectrumGrid grid = nfloc::evaluate_spectrum(x.sf_grid, spectrum);
      const nfloc::Estimate est =
          nfloc::pick_peaks(grid, P, [&](double r, double th) { return spectrum(r, th); });
      m.timing("sf", clock.lap());
      const fs::path p = out / "spectrum_sf.csv";
      nfloc::write_spectrum_csv(p, grid);
      m.output(p);
      m.doc()["estimates"]["sf"] = locations_json(est);
      if (est.detection_failed) std::cerr << "sf: " << est.diagnostic << '\n';
    } else {
      const auto smoothed = nfloc::smoothed_covariances(data.covariances, x.fresnel.smoothing_len);
      const nfloc::AngleSpectrum angles = nfloc::angle_spectrum(smoothed, rx.freq_grid, x.array,
                                                                x.fresnel.theta_axis, P, 2 * P,
                                                                x.fresnel.refine_iters);
      const nfloc::Estimate est = nfloc::estimate_fresnel(data, rx.freq_grid, x.array, P, x.fresnel);
      m.timing("fresnel", clock.lap());
      fs::path p = out / "spectrum_fresnel_theta.csv";
      nfloc::write_angle_spectrum_csv(p, angles);
      m.output(p);
      const nfloc::NearFieldSpectrum full(x.array, rx.freq_grid, data.subspaces);
      for (std::size_t i = 0; i < est.targets.size(); ++i) {
        const auto ds = nfloc::distance_spectrum(est.targets[i].angle_rad, full, x.fresnel.r_axis, 0);
        p = out / ("spectrum_fresnel_r" + std::to_string(i) + ".csv");
        nfloc::write_distance_spectrum_csv(p, ds);
        m.output(p);
      }
      m.doc()["estimates"]["fresnel"] = locations_json(est);
      if (est.detection_failed) std::cerr << "fresnel: " << est.diagnostic << '\n';
    }
  }
  m.write(out / "spectrum.manifest.json");
  return 0;
}

int cmd_sweep(const nfloc::RunConfig& cfg, const std::string& kind, const fs::path& out, Manifest& m) {
  Stopwatch clock;
  const nfloc::SweepTable table =
      kind == "snr" ? nfloc::run_snr_sweep(cfg.experiment) : nfloc::run_bandwidth_sweep(cfg.experiment);
  m.timing("sweep", clock.lap());
  const std::string stem = "sweep_" + kind;
  snapshot_config(cfg, out, stem, m);
  nfloc::write_sweep_csv(out / (stem + ".csv"), table);
  m.output(out / (stem + ".csv"));
  nfloc::write_sweep_svg(out / (stem + ".svg"), table);
  m.output(out / (stem + ".svg"));

  const double rate = nfloc::max_failure_rate(table, cfg.experiment.n_targets);
  m.doc()["max_failure_rate"] = rate;
  m.write(out / (stem + ".manifest.json"));
  std::cout << "wrote " << (out / (stem + ".csv")).string() << " (" << table.rows.size() << " rows)\n";
  if (rate > kMaxFailureRate) {
    std::cerr << "error: detection-failure rate " << rate << " exceeds " << kMaxFailureRate
              << " at one or more sweep points\n";
    return kExitDetection;
  }
  return 0;
}

int cmd_simulate(const nfloc::RunConfig& cfg, const fs::path& out, Manifest& m) {
  Stopwatch clock;
  const nfloc::ReceivedData rx = scene_data(cfg);
  m.timing("synthesis", clock.lap());
  snapshot_config(cfg, out, "received", m);
  const fs::path p = out / "received.csv";
  nfloc::write_received_csv(p, rx);
  m.output(p);
  m.doc()["noise_std"] = rx.noise_std;
  m.timing("write", clock.lap());
  m.write(out / "received.manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wideband near-field localization: subspace-fitting and Fresnel MUSIC"};
  app.set_version_flag("--version", std::string(NFLOC_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "YAML config (defaults to the built-in full-scale configuration)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", opt.seed, "Base seed");
  app.add_option("--trials", opt.trials, "Monte Carlo trials per sweep point")->check(CLI::PositiveNumber);
  app.add_option("--estimator", opt.estimator, "Estimator to run")
      ->check(CLI::IsMember({"sf", "fresnel", "both"}));
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", opt.out, "Output directory (created if missing)");

  auto* spectrum = app.add_subcommand("spectrum", "Dump MUSIC spectra for the configured scene");
  spectrum->add_option("--scene", opt.scene, "Targets as r_m:angle_deg pairs, e.g. 20:60,35:110");
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo NMSE sweep");
  sweep->require_subcommand(1);
  sweep->fallthrough();
  auto* sweep_snr = sweep->add_subcommand("snr", "NMSE versus SNR for every waveband");
  auto* sweep_bw = sweep->add_subcommand("bandwidth", "NMSE versus bandwidth at fixed subcarrier count");
  auto* simulate = app.add_subcommand("simulate", "Write received per-subcarrier snapshots to CSV");
  simulate->add_option("--scene", opt.scene, "Targets as r_m:angle_deg pairs");

  CLI11_PARSE(app, argc, argv);

  nfloc::RunConfig cfg;
  try {
    cfg = resolve(opt);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const fs::path out(opt.out);
    fs::create_directories(out);
    if (*spectrum) {
      Manifest m(cfg, "spectrum", argc, argv);
      return cmd_spectrum(cfg, out, m);
    }
    if (*sweep) {
      const std::string kind = *sweep_snr ? "snr" : "bandwidth";
      (void)sweep_bw;
      Manifest m(cfg, "sweep " + kind, argc, argv);
      return cmd_sweep(cfg, kind, out, m);
    }
    Manifest m(cfg, "simulate", argc, argv);
    return cmd_simulate(cfg, out, m);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
