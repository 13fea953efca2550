#pragma once

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qls/errors.hpp"
#include "qls/grid.hpp"
#include "qls/matter_response.hpp"
#include "qls/phase_matching.hpp"
#include "qls/pulses.hpp"
#include "qls/signal_engine.hpp"

namespace qls {

enum class Experiment { Conventional, Heralded, Pqip, Equivalence, Terms, Geometry };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Conventional: return "conventional";
    case Experiment::Heralded: return "heralded";
    case Experiment::Pqip: return "pqip";
    case Experiment::Equivalence: return "equivalence";
    case Experiment::Terms: return "terms";
    case Experiment::Geometry: return "geometry";
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::Conventional, Experiment::Heralded, Experiment::Pqip,
                       Experiment::Equivalence, Experiment::Terms, Experiment::Geometry}) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

/// Fully resolved run parameters. Every physical key in the config file
/// carries its unit as a suffix (_cm1, _fs); defaults reproduce the reference
/// figure set. The quadrature window defaults depend on the experiment: the
/// broadband conventional probe needs the wide window, everything else the
/// standard one.
struct RunConfig {
  Experiment experiment = Experiment::Conventional;

  // matter model
  double omega_fe_cm1 = 11000.0;
  double delta_cm1 = 200.0;
  double k_transfer_cm1 = 120.0;
  double gamma_cm1 = 100.0;
  double matter_scale = 20.0;

  // biphoton source
  double pump_center_cm1 = 22000.0;
  double pump_sigma_cm1 = 1000.0;
  double beta = 0.04822;
  double t1_fs = -19.69;
  double t2_fs = 70.31;
  double joint_min_cm1 = 7500.0;
  double joint_max_cm1 = 14500.0;
  int joint_points = 1401;

  std::optional<double> omega_r_cm1;  // required for heralded / pqip / equivalence
  double mean_photons = 1e6;

  // conventional probe
  double probe_center_cm1 = 11000.0;
  double probe_width_cm1 = 600.0;

  // detection axes
  double omega_min_cm1 = 9000.0;
  double omega_max_cm1 = 13000.0;
  int omega_points = 161;
  double t0_min_fs = 0.0;
  double t0_max_fs = 150.0;
  int t0_points = 76;

  // inner quadrature (resolved per experiment when omitted)
  std::optional<double> quad_min_cm1;
  std::optional<double> quad_max_cm1;
  std::optional<int> quad_points;
  bool quad_verify = false;

  // term expansion / geometry
  int n_classical = 1;
  int max_classical_interactions = 4;
  int max_order = 6;
  WaveVector k_probe{1.0, 0.0, 0.0};
  std::vector<WaveVector> k_classical{{0.92387953251128674, 0.38268343236508977, 0.0}};

  double threshold = 1e-9;
  int threads = 1;
  bool write_gnuplot = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  MatterParams matter() const {
    return MatterParams(omega_fe_cm1, delta_cm1, k_transfer_cm1, gamma_cm1, matter_scale);
  }

  FrequencyGrid joint_grid() const {
    return FrequencyGrid(joint_min_cm1, joint_max_cm1, joint_points);
  }

  BiphotonGaussianParams biphoton() const {
    return make_biphoton_params(pump_center_cm1, pump_sigma_cm1, beta, t1_fs, t2_fs,
                                joint_grid());
  }

  FrequencyGrid omega_axis() const {
    return FrequencyGrid(omega_min_cm1, omega_max_cm1, omega_points);
  }

  std::vector<double> t0_axis() const {
    std::vector<double> t0(static_cast<std::size_t>(t0_points));
    if (t0_points == 1) {
      t0[0] = t0_min_fs;
      return t0;
    }
    const double step = (t0_max_fs - t0_min_fs) / (t0_points - 1);
    for (int j = 0; j < t0_points; ++j) t0[static_cast<std::size_t>(j)] = t0_min_fs + step * j;
    return t0;
  }

  QuadratureSpec quadrature() const {
    return {FrequencyGrid(quad_min_cm1.value(), quad_max_cm1.value(), quad_points.value()),
            quad_verify};
  }

  BeamGeometry geometry() const { return {k_probe, k_classical}; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] inline void parse_fail(const std::string& source, int line,
                                    const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

inline double parse_double(const std::string& source, int line, const std::string& key,
                           const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    parse_fail(source, line, "key '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

inline int parse_int(const std::string& source, int line, const std::string& key,
                     const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    parse_fail(source, line, "key '" + key + "' expects an integer, got '" + value + "'");
  }
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& source, int line, const std::string& key,
                       const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  parse_fail(source, line, "key '" + key + "' expects true or false, got '" + value + "'");
}

inline WaveVector parse_wavevector(const std::string& source, int line, const std::string& key,
                                   const std::string& value) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    parse_fail(source, line, "key '" + key + "' expects [x, y, z], got '" + value + "'");
  }
  std::vector<double> comps;
  std::string body = value.substr(1, value.size() - 2);
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = body.find(',', pos);
    const std::string piece = trim(body.substr(pos, comma - pos));
    if (piece.empty()) parse_fail(source, line, "key '" + key + "' has an empty component");
    comps.push_back(parse_double(source, line, key, piece));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (comps.size() != 3) {
    parse_fail(source, line, "key '" + key + "' expects exactly 3 components");
  }
  return {comps[0], comps[1], comps[2]};
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_wavevector(const WaveVector& k) {
  return "[" + format_double(k.x) + ", " + format_double(k.y) + ", " + format_double(k.z) + "]";
}

}  // namespace detail

/// Semantic validation beyond per-key syntax: required fields per experiment
/// and all type invariants. Throws ValidationError naming the violated rule.
inline void validate_config(const RunConfig& cfg) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  require(cfg.quad_min_cm1.has_value() && cfg.quad_max_cm1.has_value() &&
              cfg.quad_points.has_value(),
          "quadrature window is unresolved (quad_min_cm1/quad_max_cm1/quad_points)");
  try {
    (void)cfg.matter();
    (void)cfg.joint_grid();
    (void)cfg.omega_axis();
    (void)cfg.quadrature();
    BiphotonGaussianParams(cfg.pump_center_cm1, cfg.pump_sigma_cm1, cfg.beta, cfg.t1_fs,
                           cfg.t2_fs, 1.0);
    GaussianProfile(cfg.probe_center_cm1, cfg.probe_width_cm1);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  require(cfg.mean_photons > 0.0, "mean_photons must be > 0");
  require(cfg.t0_points >= 1, "t0_points must be >= 1");
  require(cfg.t0_points == 1 || cfg.t0_max_fs > cfg.t0_min_fs,
          "t0_max_fs must exceed t0_min_fs");
  require(cfg.threshold > 0.0, "threshold must be > 0");
  require(cfg.threads >= 1, "threads must be >= 1");
  require(cfg.n_classical >= 0 && cfg.n_classical <= 4, "n_classical must be in [0, 4]");
  require(cfg.max_classical_interactions >= 0 && cfg.max_classical_interactions <= 6,
          "max_classical_interactions must be in [0, 6]");
  require(cfg.max_order >= 1 && cfg.max_order <= 12, "max_order must be in [1, 12]");
  require(norm(cfg.k_probe) > 0.0, "k_probe must be a nonzero vector");
  for (std::size_t i = 0; i < cfg.k_classical.size(); ++i) {
    require(norm(cfg.k_classical[i]) > 0.0,
            "k_classical_" + std::to_string(i + 1) + " must be a nonzero vector");
  }
  const bool needs_omega_r = cfg.experiment == Experiment::Heralded ||
                             cfg.experiment == Experiment::Pqip ||
                             cfg.experiment == Experiment::Equivalence;
  require(!needs_omega_r || cfg.omega_r_cm1.has_value(),
          std::string("omega_r_cm1 is required for experiment '") +
              to_string(cfg.experiment) + "'");
  require(cfg.experiment != Experiment::Terms ||
              cfg.k_classical.size() == static_cast<std::size_t>(cfg.n_classical),
          "terms experiment needs exactly n_classical k_classical_i vectors (got " +
              std::to_string(cfg.k_classical.size()) + " for n_classical = " +
              std::to_string(cfg.n_classical) + ")");
}

/// Parse a config text. Lines are `key = value`, `#` starts a comment, keys
/// are unit-suffixed, unknown or duplicate keys are errors. `source_name`
/// appears in diagnostics; `experiment_override` (the CLI positional) wins
/// over the file's own `experiment` key and participates in default
/// resolution of the quadrature window.
inline RunConfig parse_config(const std::string& text, const std::string& source_name,
                              std::optional<Experiment> experiment_override = std::nullopt) {
  RunConfig cfg;
  std::vector<WaveVector> classical(4);
  std::array<bool, 4> classical_seen{};
  bool any_classical_key = false;
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::size_t hash = raw_line.find('#');
    std::string line = detail::trim(hash == std::string::npos ? raw_line
                                                              : raw_line.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      detail::parse_fail(source_name, line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) detail::parse_fail(source_name, line_no, "empty key");
    if (value.empty()) {
      detail::parse_fail(source_name, line_no, "key '" + key + "' has an empty value");
    }
    if (!seen.insert(key).second) {
      detail::parse_fail(source_name, line_no, "duplicate key '" + key + "'");
    }

    auto num = [&] { return detail::parse_double(source_name, line_no, key, value); };
    auto integer = [&] { return detail::parse_int(source_name, line_no, key, value); };
    auto boolean = [&] { return detail::parse_bool(source_name, line_no, key, value); };
    auto vec = [&] { return detail::parse_wavevector(source_name, line_no, key, value); };

    if (key == "experiment") {
      const auto e = parse_experiment(value);
      if (!e) {
        detail::parse_fail(source_name, line_no, "unknown experiment '" + value + "'");
      }
      cfg.experiment = *e;
    } else if (key == "omega_fe_cm1") {
      cfg.omega_fe_cm1 = num();
    } else if (key == "delta_cm1") {
      cfg.delta_cm1 = num();
    } else if (key == "k_transfer_cm1") {
      cfg.k_transfer_cm1 = num();
    } else if (key == "gamma_cm1") {
      cfg.gamma_cm1 = num();
    } else if (key == "matter_scale") {
      cfg.matter_scale = num();
    } else if (key == "pump_center_cm1") {
      cfg.pump_center_cm1 = num();
    } else if (key == "pump_sigma_cm1") {
      cfg.pump_sigma_cm1 = num();
    } else if (key == "beta") {
      cfg.beta = num();
    } else if (key == "t1_fs") {
      cfg.t1_fs = num();
    } else if (key == "t2_fs") {
      cfg.t2_fs = num();
    } else if (key == "joint_min_cm1") {
      cfg.joint_min_cm1 = num();
    } else if (key == "joint_max_cm1") {
      cfg.joint_max_cm1 = num();
    } else if (key == "joint_points") {
      cfg.joint_points = integer();
    } else if (key == "omega_r_cm1") {
      cfg.omega_r_cm1 = num();
    } else if (key == "mean_photons") {
      cfg.mean_photons = num();
    } else if (key == "probe_center_cm1") {
      cfg.probe_center_cm1 = num();
    } else if (key == "probe_width_cm1") {
      cfg.probe_width_cm1 = num();
    } else if (key == "omega_min_cm1") {
      cfg.omega_min_cm1 = num();
    } else if (key == "omega_max_cm1") {
      cfg.omega_max_cm1 = num();
    } else if (key == "omega_points") {
      cfg.omega_points = integer();
    } else if (key == "t0_min_fs") {
      cfg.t0_min_fs = num();
    } else if (key == "t0_max_fs") {
      cfg.t0_max_fs = num();
    } else if (key == "t0_points") {
      cfg.t0_points = integer();
    } else if (key == "quad_min_cm1") {
      cfg.quad_min_cm1 = num();
    } else if (key == "quad_max_cm1") {
      cfg.quad_max_cm1 = num();
    } else if (key == "quad_points") {
      cfg.quad_points = integer();
    } else if (key == "quad_verify") {
      cfg.quad_verify = boolean();
    } else if (key == "n_classical") {
      cfg.n_classical = integer();
    } else if (key == "max_classical_interactions") {
      cfg.max_classical_interactions = integer();
    } else if (key == "max_order") {
      cfg.max_order = integer();
    } else if (key == "k_probe") {
      cfg.k_probe = vec();
    } else if (key.rfind("k_classical_", 0) == 0) {
      const std::string idx = key.substr(12);
      if (idx.size() != 1 || idx[0] < '1' || idx[0] > '4') {
        detail::parse_fail(source_name, line_no,
                           "unknown key '" + key + "' (classical beams are k_classical_1..4)");
      }
      const std::size_t i = static_cast<std::size_t>(idx[0] - '1');
      classical[i] = vec();
      classical_seen[i] = true;
      any_classical_key = true;
    } else if (key == "threshold") {
      cfg.threshold = num();
    } else if (key == "threads") {
      cfg.threads = integer();
    } else if (key == "write_gnuplot") {
      cfg.write_gnuplot = boolean();
    } else {
      detail::parse_fail(source_name, line_no, "unknown key '" + key + "'");
    }
  }

  if (any_classical_key) {
    cfg.k_classical.clear();
    for (std::size_t i = 0; i < classical.size(); ++i) {
      if (!classical_seen[i]) {
        // indices must be contiguous from 1
        for (std::size_t j = i + 1; j < classical.size(); ++j) {
          if (classical_seen[j]) {
            throw ParseError(source_name + ": k_classical_" + std::to_string(j + 1) +
                             " given but k_classical_" + std::to_string(i + 1) + " missing");
          }
        }
        break;
      }
      cfg.k_classical.push_back(classical[i]);
    }
  }

  if (experiment_override) cfg.experiment = *experiment_override;

  // experiment-dependent quadrature defaults
  const QuadratureSpec fallback = cfg.experiment == Experiment::Conventional
                                      ? wide_quadrature()
                                      : default_quadrature();
  if (!cfg.quad_min_cm1) cfg.quad_min_cm1 = fallback.grid.omega_min;
  if (!cfg.quad_max_cm1) cfg.quad_max_cm1 = fallback.grid.omega_max;
  if (!cfg.quad_points) cfg.quad_points = fallback.grid.n_points;

  validate_config(cfg);
  return cfg;
}

inline RunConfig load_config(const std::string& path,
                             std::optional<Experiment> experiment_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path, experiment_override);
}

/// Canonical textual form: parses back to an equal RunConfig.
inline std::string serialize_config(const RunConfig& cfg) {
  using detail::format_double;
  std::ostringstream out;
  out << "experiment = " << to_string(cfg.experiment) << "\n";
  out << "omega_fe_cm1 = " << format_double(cfg.omega_fe_cm1) << "\n";
  out << "delta_cm1 = " << format_double(cfg.delta_cm1) << "\n";
  out << "k_transfer_cm1 = " << format_double(cfg.k_transfer_cm1) << "\n";
  out << "gamma_cm1 = " << format_double(cfg.gamma_cm1) << "\n";
  out << "matter_scale = " << format_double(cfg.matter_scale) << "\n";
  out << "pump_center_cm1 = " << format_double(cfg.pump_center_cm1) << "\n";
  out << "pump_sigma_cm1 = " << format_double(cfg.pump_sigma_cm1) << "\n";
  out << "beta = " << format_double(cfg.beta) << "\n";
  out << "t1_fs = " << format_double(cfg.t1_fs) << "\n";
  out << "t2_fs = " << format_double(cfg.t2_fs) << "\n";
  out << "joint_min_cm1 = " << format_double(cfg.joint_min_cm1) << "\n";
  out << "joint_max_cm1 = " << format_double(cfg.joint_max_cm1) << "\n";
  out << "joint_points = " << cfg.joint_points << "\n";
  if (cfg.omega_r_cm1) out << "omega_r_cm1 = " << format_double(*cfg.omega_r_cm1) << "\n";
  out << "mean_photons = " << format_double(cfg.mean_photons) << "\n";
  out << "probe_center_cm1 = " << format_double(cfg.probe_center_cm1) << "\n";
  out << "probe_width_cm1 = " << format_double(cfg.probe_width_cm1) << "\n";
  out << "omega_min_cm1 = " << format_double(cfg.omega_min_cm1) << "\n";
  out << "omega_max_cm1 = " << format_double(cfg.omega_max_cm1) << "\n";
  out << "omega_points = " << cfg.omega_points << "\n";
  out << "t0_min_fs = " << format_double(cfg.t0_min_fs) << "\n";
  out << "t0_max_fs = " << format_double(cfg.t0_max_fs) << "\n";
  out << "t0_points = " << cfg.t0_points << "\n";
  out << "quad_min_cm1 = " << format_double(cfg.quad_min_cm1.value()) << "\n";
  out << "quad_max_cm1 = " << format_double(cfg.quad_max_cm1.value()) << "\n";
  out << "quad_points = " << cfg.quad_points.value() << "\n";
  out << "quad_verify = " << (cfg.quad_verify ? "true" : "false") << "\n";
  out << "n_classical = " << cfg.n_classical << "\n";
  out << "max_classical_interactions = " << cfg.max_classical_interactions << "\n";
  out << "max_order = " << cfg.max_order << "\n";
  out << "k_probe = " << detail::format_wavevector(cfg.k_probe) << "\n";
  for (std::size_t i = 0; i < cfg.k_classical.size(); ++i) {
    out << "k_classical_" << (i + 1) << " = " << detail::format_wavevector(cfg.k_classical[i])
        << "\n";
  }
  out << "threshold = " << format_double(cfg.threshold) << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "write_gnuplot = " << (cfg.write_gnuplot ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace qls
