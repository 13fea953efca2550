#pragma once

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qls/config.hpp"
#include "qls/errors.hpp"
#include "qls/signal_engine.hpp"
#include "qls/term_expansion.hpp"

namespace qls {

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed while writing " + path.string());
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// CSV serialization of a spectrum: header `omega_cm1,t0_fs,signal`, rows in
/// t0-outer order. Numbers use %.17g so the file round-trips doubles exactly
/// and identical inputs give byte-identical files.
inline std::string spectrum_to_csv(const Spectrum2D& s) {
  std::string out = "omega_cm1,t0_fs,signal\n";
  char buf[128];
  for (std::size_t jt = 0; jt < s.t0_axis_fs.size(); ++jt) {
    for (int i = 0; i < s.omega_axis.n_points; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.omega_axis.point(i),
                    s.t0_axis_fs[jt], s.values[static_cast<std::size_t>(i)][jt]);
      out += buf;
    }
  }
  return out;
}

/// gnuplot `splot ... nonuniform matrix` layout: first row is the omega axis,
/// each following row is a delay followed by its signals.
inline std::string spectrum_to_gnuplot_matrix(const Spectrum2D& s) {
  char buf[64];
  std::string out;
  std::snprintf(buf, sizeof buf, "%d", s.omega_axis.n_points);
  out += buf;
  for (int i = 0; i < s.omega_axis.n_points; ++i) {
    std::snprintf(buf, sizeof buf, " %.17g", s.omega_axis.point(i));
    out += buf;
  }
  out += "\n";
  for (std::size_t jt = 0; jt < s.t0_axis_fs.size(); ++jt) {
    std::snprintf(buf, sizeof buf, "%.17g", s.t0_axis_fs[jt]);
    out += buf;
    for (int i = 0; i < s.omega_axis.n_points; ++i) {
      std::snprintf(buf, sizeof buf, " %.17g", s.values[static_cast<std::size_t>(i)][jt]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term listing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string interaction_symbol(const Interaction& i) {
  std::string s = i.is_probe() ? "p" : "c" + std::to_string(i.field);
  s += i.daggered ? '+' : '-';
  return s;
}

inline std::string branch_symbol(const std::vector<Interaction>& chain, bool bare,
                                 bool daggered_head) {
  if (bare) return daggered_head ? "a^dag" : "a";
  std::string s = "L[";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) s += ' ';
    s += interaction_symbol(chain[i]);
  }
  s += ']';
  return s;
}

}  // namespace detail

/// Net signed wavevector of a term as a symbol over {k_pr, k_1..k_n}, e.g.
/// "+k_pr", "+k_1 -k_2", or "0". Left-chain (conjugate branch) contributions
/// enter with flipped sign, matching signal_wavevector.
inline std::string k_signature_symbol(const TermDescriptor& term) {
  std::map<int, int> coeff;  // field index -> net integer coefficient
  for (const Interaction& i : term.right_chain) coeff[i.field] += i.daggered ? 1 : -1;
  for (const Interaction& i : term.left_chain) coeff[i.field] += i.daggered ? -1 : 1;
  std::string out;
  for (const auto& [field, c] : coeff) {
    if (c == 0) continue;
    if (!out.empty()) out += ' ';
    out += c > 0 ? '+' : '-';
    const int mag = c > 0 ? c : -c;
    if (mag != 1) out += std::to_string(mag);
    out += field == kProbeField ? "k_pr" : "k_" + std::to_string(field);
  }
  return out.empty() ? "0" : out;
}

/// One line per term: class, branches (left ; right), k-signature, and the
/// survival verdict per probe statistics in the given geometry.
inline std::string format_term_line(const TermDescriptor& term, const BeamGeometry& geometry) {
  const TermClass cls = classify(term);
  const bool left_bare =
      term.outer_field == OuterField::Both || term.outer_field == OuterField::ADag;
  const bool right_bare =
      term.outer_field == OuterField::Both || term.outer_field == OuterField::A;
  auto verdict = [&](ProbeKind k) -> std::string {
    if (field_signature(term, k, 1.0).vanishes) return "vanishes";
    return survives_in_probe_direction(term, geometry) ? "survives" : "not_phase_matched";
  };
  std::string line = to_string(cls);
  line += " | ";
  line += detail::branch_symbol(term.left_chain, left_bare, true);
  line += " ; ";
  line += detail::branch_symbol(term.right_chain, right_bare, false);
  line += " | k_sig = ";
  line += k_signature_symbol(term);
  line += " | fock1: " + verdict(ProbeKind::Fock1);
  line += " | coherent: " + verdict(ProbeKind::CoherentM);
  return line;
}

/// Full listing for the `terms` experiment; header lines start with '#'.
inline std::string terms_listing(int n_classical, int max_classical_interactions,
                                 const BeamGeometry& geometry, int max_order) {
  const auto terms = enumerate_terms(n_classical, max_classical_interactions);
  const GeometryCheck geo = is_geometry_valid(geometry, max_order);
  std::set<std::string> fock_classes;
  std::set<std::string> coherent_classes;
  std::string body;
  for (const auto& term : terms) {
    body += format_term_line(term, geometry);
    body += '\n';
    if (!field_signature(term, ProbeKind::Fock1, 1.0).vanishes &&
        survives_in_probe_direction(term, geometry)) {
      fock_classes.insert(to_string(classify(term)));
    }
    if (!field_signature(term, ProbeKind::CoherentM, 1.0).vanishes &&
        survives_in_probe_direction(term, geometry)) {
      coherent_classes.insert(to_string(classify(term)));
    }
  }
  std::string out;
  out += "# perturbative expansion of the detected probe signal\n";
  out += "# n_classical = " + std::to_string(n_classical) +
         ", max_classical_interactions = " + std::to_string(max_classical_interactions) +
         ", terms = " + std::to_string(terms.size()) + "\n";
  out += std::string("# geometry valid through order ") + std::to_string(max_order) + ": " +
         (geo.valid ? "yes" : "no") + "\n";
  auto join = [](const std::set<std::string>& s) {
    std::string j;
    for (const auto& c : s) {
      if (!j.empty()) j += ", ";
      j += c;
    }
    return j.empty() ? std::string("none") : j;
  };
  out += "# surviving classes (fock1): " + join(fock_classes) + "\n";
  out += "# surviving classes (coherent): " + join(coherent_classes) + "\n";
  out += body;
  return out;
}

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["omega_fe_cm1"] = cfg.omega_fe_cm1;
  j["delta_cm1"] = cfg.delta_cm1;
  j["k_transfer_cm1"] = cfg.k_transfer_cm1;
  j["gamma_cm1"] = cfg.gamma_cm1;
  j["matter_scale"] = cfg.matter_scale;
  j["pump_center_cm1"] = cfg.pump_center_cm1;
  j["pump_sigma_cm1"] = cfg.pump_sigma_cm1;
  j["beta"] = cfg.beta;
  j["t1_fs"] = cfg.t1_fs;
  j["t2_fs"] = cfg.t2_fs;
  j["joint_min_cm1"] = cfg.joint_min_cm1;
  j["joint_max_cm1"] = cfg.joint_max_cm1;
  j["joint_points"] = cfg.joint_points;
  if (cfg.omega_r_cm1) j["omega_r_cm1"] = *cfg.omega_r_cm1;
  j["mean_photons"] = cfg.mean_photons;
  j["probe_center_cm1"] = cfg.probe_center_cm1;
  j["probe_width_cm1"] = cfg.probe_width_cm1;
  j["omega_min_cm1"] = cfg.omega_min_cm1;
  j["omega_max_cm1"] = cfg.omega_max_cm1;
  j["omega_points"] = cfg.omega_points;
  j["t0_min_fs"] = cfg.t0_min_fs;
  j["t0_max_fs"] = cfg.t0_max_fs;
  j["t0_points"] = cfg.t0_points;
  j["quad_min_cm1"] = cfg.quad_min_cm1.value();
  j["quad_max_cm1"] = cfg.quad_max_cm1.value();
  j["quad_points"] = cfg.quad_points.value();
  j["quad_verify"] = cfg.quad_verify;
  j["n_classical"] = cfg.n_classical;
  j["max_classical_interactions"] = cfg.max_classical_interactions;
  j["max_order"] = cfg.max_order;
  j["k_probe"] = {cfg.k_probe.x, cfg.k_probe.y, cfg.k_probe.z};
  for (std::size_t i = 0; i < cfg.k_classical.size(); ++i) {
    j["k_classical_" + std::to_string(i + 1)] = {cfg.k_classical[i].x, cfg.k_classical[i].y,
                                                 cfg.k_classical[i].z};
  }
  j["threshold"] = cfg.threshold;
  j["threads"] = cfg.threads;
  j["write_gnuplot"] = cfg.write_gnuplot;
  return j;
}

/// Metadata sidecar: the one file that may differ between identical runs
/// (it carries the timestamp). Everything else is byte-deterministic.
inline void write_metadata(const std::filesystem::path& path, const RunConfig& cfg,
                           const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["generated_at_utc"] = detail::utc_timestamp();
  j["negative_delays"] = cfg.t0_min_fs < 0.0;
  j["outputs"] = outputs;
  j["resolved_config"] = config_to_json(cfg);
  detail::write_text_file(path, j.dump(2) + "\n");
}

inline nlohmann::ordered_json report_to_json(const EquivalenceRun& run, double m,
                                             double threshold) {
  nlohmann::ordered_json j;
  j["analytic_scale"] = run.report.analytic_scale;
  j["fitted_scale"] = run.report.fitted_scale;
  j["max_abs_deviation"] = run.report.max_abs_deviation;
  j["max_rel_deviation"] = run.report.max_rel_deviation;
  j["herald_weight"] = run.herald_weight;
  j["mean_photons"] = m;
  j["threshold"] = threshold;
  j["pass"] = run.report.max_rel_deviation <= threshold;
  return j;
}

inline nlohmann::ordered_json geometry_to_json(const BeamGeometry& geometry,
                                               const GeometryCheck& check, int max_order) {
  nlohmann::ordered_json j;
  j["valid"] = check.valid;
  j["max_order"] = max_order;
  j["k_probe"] = {geometry.k_probe.x, geometry.k_probe.y, geometry.k_probe.z};
  auto beams = nlohmann::ordered_json::array();
  for (const auto& k : geometry.k_classical) beams.push_back({k.x, k.y, k.z});
  j["k_classical"] = beams;
  if (!check.valid) {
    j["witness"]["b"] = check.b;
    j["witness"]["signs"] = check.signs;
    const WaveVector v = check.combination(geometry);
    j["witness"]["combination"] = {v.x, v.y, v.z};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

/// Runs the configured experiment, writing its outputs into out_dir.
/// Returns 0 on success, 2 when a check fails (equivalence deviation above
/// threshold, or an invalid geometry). Module errors propagate as exceptions
/// for the caller to report.
inline int run(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const std::string name = to_string(cfg.experiment);
  const MatterParams matter = cfg.matter();
  const QuadratureSpec quad = cfg.quadrature();
  std::vector<std::string> outputs;

  auto emit_spectrum = [&](const std::string& stem, const Spectrum2D& s) {
    detail::write_text_file(dir / (stem + ".csv"), spectrum_to_csv(s));
    outputs.push_back(stem + ".csv");
    if (cfg.write_gnuplot) {
      detail::write_text_file(dir / (stem + ".matrix"), spectrum_to_gnuplot_matrix(s));
      outputs.push_back(stem + ".matrix");
    }
  };

  int status = 0;
  switch (cfg.experiment) {
    case Experiment::Conventional: {
      const SpectralProfile probe =
          conventional_probe(cfg.probe_center_cm1, cfg.probe_width_cm1, quad.grid);
      const Spectrum2D s = spectrum(ProbeState(CoherentM(probe, cfg.mean_photons)), matter,
                                    cfg.omega_axis(), cfg.t0_axis(), quad, cfg.threads);
      emit_spectrum(name, s);
      log << name << ": wrote " << outputs.front() << "\n";
      break;
    }
    case Experiment::Heralded: {
      const Spectrum2D s =
          spectrum(ProbeState(HeraldedBiphoton{cfg.biphoton(), cfg.omega_r_cm1.value()}),
                   matter, cfg.omega_axis(), cfg.t0_axis(), quad, cfg.threads);
      emit_spectrum(name, s);
      log << name << ": wrote " << outputs.front() << "\n";
      break;
    }
    case Experiment::Pqip: {
      HeraldedReduction red =
          condition_on_reference(cfg.biphoton(), cfg.omega_r_cm1.value(), quad.grid);
      const Spectrum2D s =
          spectrum(ProbeState(CoherentM(std::move(red.profile), cfg.mean_photons)), matter,
                   cfg.omega_axis(), cfg.t0_axis(), quad, cfg.threads);
      emit_spectrum(name, s);
      log << name << ": wrote " << outputs.front() << "\n";
      break;
    }
    case Experiment::Equivalence: {
      const EquivalenceRun eq = equivalence_run(cfg.biphoton(), cfg.omega_r_cm1.value(),
                                                cfg.mean_photons, matter, cfg.omega_axis(),
                                                cfg.t0_axis(), quad, cfg.threads);
      emit_spectrum("heralded", eq.heralded);
      emit_spectrum("pqip", eq.pqip);
      const auto j = report_to_json(eq, cfg.mean_photons, cfg.threshold);
      detail::write_text_file(dir / "equivalence_report.json", j.dump(2) + "\n");
      outputs.push_back("equivalence_report.json");
      log << "equivalence: analytic_scale = " << eq.report.analytic_scale
          << ", fitted_scale = " << eq.report.fitted_scale
          << ", max_rel_deviation = " << eq.report.max_rel_deviation
          << " (threshold " << cfg.threshold << ")\n";
      if (eq.report.max_rel_deviation > cfg.threshold) {
        log << "equivalence: FAILED the threshold check\n";
        status = 2;
      } else {
        log << "equivalence: PASS\n";
      }
      break;
    }
    case Experiment::Terms: {
      const std::string listing = terms_listing(cfg.n_classical, cfg.max_classical_interactions,
                                                cfg.geometry(), cfg.max_order);
      detail::write_text_file(dir / "terms.txt", listing);
      outputs.push_back("terms.txt");
      log << "terms: wrote terms.txt\n";
      break;
    }
    case Experiment::Geometry: {
      const GeometryCheck check = is_geometry_valid(cfg.geometry(), cfg.max_order);
      const auto j = geometry_to_json(cfg.geometry(), check, cfg.max_order);
      detail::write_text_file(dir / "geometry.json", j.dump(2) + "\n");
      outputs.push_back("geometry.json");
      if (check.valid) {
        log << "geometry: valid through order " << cfg.max_order << "\n";
      } else {
        log << "geometry: INVALID; witness b = [";
        for (std::size_t i = 0; i < check.b.size(); ++i) {
          log << (i ? ", " : "") << check.b[i];
        }
        log << "], signs = [";
        for (std::size_t i = 0; i < check.signs.size(); ++i) {
          log << (i ? ", " : "") << (check.signs[i] > 0 ? "+" : "-");
        }
        log << "]\n";
        status = 2;
      }
      break;
    }
  }

  write_metadata(dir / (name + "_meta.json"), cfg, outputs);
  return status;
}

}  // namespace qls
