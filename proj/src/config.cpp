#include "nfloc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace nfloc {

namespace {

constexpr double kDeg = kPi / 180.0;

std::string type_name(const int*) { return "an integer"; }
std::string type_name(const std::uint64_t*) { return "a non-negative integer"; }
std::string type_name(const double*) { return "a number"; }
std::string type_name(const std::string*) { return "a string"; }

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

// Reads one mapping, remembering which keys were consumed so leftovers can
// be reported.
class Section {
 public:
  Section(const std::string& source, YAML::Node node, std::string path)
      : source_(source), node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError(source_, line_of(node_), "'" + label() + "' must be a mapping");
  }

  bool present(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    return present(key) ? node_[key] : YAML::Node();
  }

  Section section(const std::string& key) { return Section(source_, child(key), qualified(key)); }

  template <typename T>
  void read(const std::string& key, T& value) {
    const YAML::Node n = child(key);
    if (!n || n.IsNull()) return;
    value = scalar<T>(n, qualified(key));
  }

  template <typename T>
  void read_list(const std::string& key, std::vector<T>& value) {
    const YAML::Node n = child(key);
    if (!n || n.IsNull()) return;
    if (!n.IsSequence()) throw ConfigError(source_, line_of(n), "'" + qualified(key) + "' must be a list");
    std::vector<T> out;
    for (std::size_t i = 0; i < n.size(); ++i)
      out.push_back(scalar<T>(n[i], qualified(key) + "[" + std::to_string(i) + "]"));
    value = std::move(out);
  }

  template <typename T>
  T scalar(const YAML::Node& n, const std::string& name) const {
    if (!n.IsScalar())
      throw ConfigError(source_, line_of(n), "'" + name + "' must be " + type_name(static_cast<T*>(nullptr)));
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      throw ConfigError(source_, line_of(n), "'" + name + "' must be " + type_name(static_cast<T*>(nullptr)) +
                                                 ", got '" + n.Scalar() + "'");
    }
  }

  void reject_unknown() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(source_, line_of(kv.first), "unknown key '" + qualified(key) + "'");
    }
  }

  int line() const { return node_ ? line_of(node_) : 0; }
  const std::string& source() const { return source_; }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  const std::string& source_;
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

GridSpec read_grid(Section s) {
  GridSpec g;
  s.read("r_min_m", g.r_min_m);
  s.read("r_max_m", g.r_max_m);
  s.read("r_step_m", g.r_step_m);
  s.read("theta_min_deg", g.theta_min_deg);
  s.read("theta_max_deg", g.theta_max_deg);
  s.read("theta_step_deg", g.theta_step_deg);
  s.read("refine_iters", g.refine_iters);
  s.reject_unknown();
  return g;
}

template <typename F>
auto checked(const Section& s, F&& make) {
  try {
    return make();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.source(), s.line(), e.what());
  }
}

}  // namespace

SearchGrid GridSpec::materialize() const {
  return SearchGrid::uniform(r_min_m, r_max_m, r_step_m, theta_min_deg * kDeg, theta_max_deg * kDeg,
                             theta_step_deg * kDeg, refine_iters);
}

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  Section top(source, root, "");

  int schema = kConfigSchemaVersion;
  top.read("schema_version", schema);
  if (schema != kConfigSchemaVersion)
    throw ConfigError(source, line_of(root["schema_version"]),
                      "unsupported schema_version " + std::to_string(schema) + " (expected " +
                          std::to_string(kConfigSchemaVersion) + ")");

  RunConfig cfg;
  ExperimentConfig& x = cfg.experiment;
  top.read("seed", x.base_seed);
  top.read("threads", x.threads);
  top.read("n_targets", x.n_targets);
  top.read("n_trials", x.n_trials);

  if (top.present("estimators")) {
    std::vector<std::string> names;
    const int line = line_of(root["estimators"]);
    top.read_list("estimators", names);
    x.estimators.clear();
    for (const std::string& n : names) {
      try {
        x.estimators.push_back(parse_estimator(n == "subspace_fitting" ? "sf" : n));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(source, line, e.what());
      }
    }
  }

  {
    Section s = top.section("array");
    int n = x.array.n_elements();
    double fc = x.array.carrier_freq_hz();
    double d = 0.0;
    s.read("n_elements", n);
    s.read("carrier_freq_hz", fc);
    s.read("spacing_m", d);
    s.reject_unknown();
    x.array = checked(s, [&] { return ArrayConfig(n, fc, d); });
  }
  {
    Section s = top.section("ofdm");
    int m = x.ofdm.n_subcarriers();
    double df = x.ofdm.spacing_hz();
    int k = x.ofdm.n_symbols();
    double cp = x.ofdm.cp_fraction();
    std::string modulation = "qpsk";
    s.read("n_subcarriers", m);
    s.read("spacing_hz", df);
    s.read("n_symbols", k);
    s.read("cp_fraction", cp);
    s.read("modulation", modulation);
    s.reject_unknown();
    if (modulation != "qpsk") throw ConfigError(source, s.line(), "unsupported modulation '" + modulation + "'");
    x.ofdm = checked(s, [&] { return OfdmConfig(m, df, k, cp, Modulation::kQpsk); });
  }

  top.read_list("snr_list_db", x.snr_list_db);

  if (top.present("wavebands")) {
    const YAML::Node list = top.child("wavebands");
    if (!list.IsSequence()) throw ConfigError(source, line_of(list), "'wavebands' must be a list");
    x.wavebands.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section s(source, list[i], "wavebands[" + std::to_string(i) + "]");
      Waveband w{"", 0.0};
      s.read("label", w.label);
      s.read("spacing_hz", w.spacing_hz);
      s.reject_unknown();
      if (w.label.empty()) throw ConfigError(source, s.line(), "'" + s.qualified("label") + "' is required");
      x.wavebands.push_back(w);
    }
  }
  {
    Section s = top.section("bandwidth");
    s.read_list("list_hz", x.bandwidth_list_hz);
    s.read("snr_db", x.bandwidth_snr_db);
    s.reject_unknown();
  }
  {
    Section s = top.section("scene_sampler");
    SceneSampler& sm = x.sampler;
    double th_min = sm.theta_min / kDeg, th_max = sm.theta_max / kDeg, sep_th = sm.min_sep_theta / kDeg;
    s.read("r_min_m", sm.r_min);
    s.read("r_max_m", sm.r_max);
    s.read("theta_min_deg", th_min);
    s.read("theta_max_deg", th_max);
    s.read("min_sep_r_m", sm.min_sep_r);
    s.read("min_sep_theta_deg", sep_th);
    s.reject_unknown();
    sm.theta_min = th_min * kDeg;
    sm.theta_max = th_max * kDeg;
    sm.min_sep_theta = sep_th * kDeg;
  }
  {
    Section s = top.section("grid");
    cfg.grid = read_grid(s);
    x.sf_grid = checked(s, [&] { return cfg.grid.materialize(); });
    x.fresnel.r_axis = x.sf_grid.r_axis();
    x.fresnel.theta_axis = x.sf_grid.theta_axis();
    x.fresnel.refine_iters = x.sf_grid.refine_iters();
  }
  {
    Section s = top.section("fresnel");
    s.read("smoothing_len", x.fresnel.smoothing_len);
    s.reject_unknown();
  }
  {
    Section s = top.section("scene");
    s.read("snr_db", cfg.scene.snr_db);
    s.read("waveband", cfg.scene.waveband);
    if (s.present("targets")) {
      const YAML::Node list = s.child("targets");
      if (!list.IsSequence()) throw ConfigError(source, line_of(list), "'scene.targets' must be a list");
      cfg.scene.targets.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        Section t(source, list[i], "scene.targets[" + std::to_string(i) + "]");
        double r = 0.0, deg = 0.0;
        t.read("range_m", r);
        t.read("angle_deg", deg);
        t.reject_unknown();
        cfg.scene.targets.push_back(checked(t, [&] { return Target(r, deg * kDeg); }));
      }
    }
    s.reject_unknown();
    if (!cfg.scene.waveband.empty()) {
      bool known = false;
      for (const Waveband& w : x.wavebands) known = known || w.label == cfg.scene.waveband;
      if (!known) throw ConfigError(source, s.line(), "scene.waveband '" + cfg.scene.waveband + "' is not defined");
    }
  }
  top.reject_unknown();

  try {
    x.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, 0, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::string to_yaml(const RunConfig& config) {
  const ExperimentConfig& x = config.experiment;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << kConfigSchemaVersion;
  out << YAML::Key << "seed" << YAML::Value << x.base_seed;
  out << YAML::Key << "threads" << YAML::Value << x.threads;
  out << YAML::Key << "n_targets" << YAML::Value << x.n_targets;
  out << YAML::Key << "n_trials" << YAML::Value << x.n_trials;
  out << YAML::Key << "estimators" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (EstimatorKind k : x.estimators) out << std::string(estimator_name(k));
  out << YAML::EndSeq;

  out << YAML::Key << "array" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_elements" << YAML::Value << x.array.n_elements();
  out << YAML::Key << "carrier_freq_hz" << YAML::Value << x.array.carrier_freq_hz();
  out << YAML::Key << "spacing_m" << YAML::Value << x.array.spacing_m();
  out << YAML::EndMap;

  out << YAML::Key << "ofdm" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_subcarriers" << YAML::Value << x.ofdm.n_subcarriers();
  out << YAML::Key << "spacing_hz" << YAML::Value << x.ofdm.spacing_hz();
  out << YAML::Key << "n_symbols" << YAML::Value << x.ofdm.n_symbols();
  out << YAML::Key << "cp_fraction" << YAML::Value << x.ofdm.cp_fraction();
  out << YAML::Key << "modulation" << YAML::Value << "qpsk";
  out << YAML::EndMap;

  out << YAML::Key << "snr_list_db" << YAML::Value << YAML::Flow << x.snr_list_db;
  out << YAML::Key << "wavebands" << YAML::Value << YAML::BeginSeq;
  for (const Waveband& w : x.wavebands)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "label" << YAML::Value << w.label << YAML::Key
        << "spacing_hz" << YAML::Value << w.spacing_hz << YAML::EndMap;
  out << YAML::EndSeq;

  out << YAML::Key << "bandwidth" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "list_hz" << YAML::Value << YAML::Flow << x.bandwidth_list_hz;
  out << YAML::Key << "snr_db" << YAML::Value << x.bandwidth_snr_db;
  out << YAML::EndMap;

  const SceneSampler& sm = x.sampler;
  out << YAML::Key << "scene_sampler" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "r_min_m" << YAML::Value << sm.r_min;
  out << YAML::Key << "r_max_m" << YAML::Value << sm.r_max;
  out << YAML::Key << "theta_min_deg" << YAML::Value << sm.theta_min / kDeg;
  out << YAML::Key << "theta_max_deg" << YAML::Value << sm.theta_max / kDeg;
  out << YAML::Key << "min_sep_r_m" << YAML::Value << sm.min_sep_r;
  out << YAML::Key << "min_sep_theta_deg" << YAML::Value << sm.min_sep_theta / kDeg;
  out << YAML::EndMap;

  const GridSpec& g = config.grid;
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "r_min_m" << YAML::Value << g.r_min_m;
  out << YAML::Key << "r_max_m" << YAML::Value << g.r_max_m;
  out << YAML::Key << "r_step_m" << YAML::Value << g.r_step_m;
  out << YAML::Key << "theta_min_deg" << YAML::Value << g.theta_min_deg;
  out << YAML::Key << "theta_max_deg" << YAML::Value << g.theta_max_deg;
  out << YAML::Key << "theta_step_deg" << YAML::Value << g.theta_step_deg;
  out << YAML::Key << "refine_iters" << YAML::Value << g.refine_iters;
  out << YAML::EndMap;

  out << YAML::Key << "fresnel" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "smoothing_len" << YAML::Value << x.fresnel.smoothing_len;
  out << YAML::EndMap;

  out << YAML::Key << "scene" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "snr_db" << YAML::Value << config.scene.snr_db;
  out << YAML::Key << "waveband" << YAML::Value << config.scene.waveband;
  out << YAML::Key << "targets" << YAML::Value << YAML::BeginSeq;
  for (const Target& t : config.scene.targets)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "range_m" << YAML::Value << t.range_m() << YAML::Key
        << "angle_deg" << YAML::Value << t.angle_rad() / kDeg << YAML::EndMap;
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace nfloc
