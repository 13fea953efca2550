#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qls/correlators.hpp"
#include "qls/errors.hpp"
#include "qls/phase_matching.hpp"
#include "qls/pulses.hpp"

namespace qls {

inline constexpr int kProbeField = 0;

/// One matter-field interaction inside a nested-commutator branch.
/// `field` is kProbeField for the quantized probe, otherwise the 1-based
/// index of a classical pulse. `daggered` marks the matter-raising component
/// (excitation by that field, wavevector +k) versus matter-lowering (-k).
struct Interaction {
  int field = kProbeField;
  bool daggered = false;

  bool is_probe() const { return field == kProbeField; }
  friend bool operator==(const Interaction&, const Interaction&) = default;
};

/// Which probe-field operators of the detected pair remain uncontracted by a
/// matter polarization. `Both` means both branch heads are bare field
/// operators; `ADag` keeps the left (conjugate) head bare; `A` keeps the
/// right head bare; `None` means both heads were replaced by polarizations.
enum class OuterField { None, ADag, A, Both };

/// One term of the perturbative expansion of the detected two-point signal.
/// Each branch is either a bare field operator (empty chain, flagged via
/// outer_field) or a matter polarization whose chain lists the interactions
/// it nests, ordered outermost to innermost. `left_chain` belongs to the
/// conjugated branch of the detected pair.
struct TermDescriptor {
  std::vector<Interaction> left_chain;
  std::vector<Interaction> right_chain;
  int lpr_order = 0;  // polarization heads + quantized-probe interactions, <= 2
  OuterField outer_field = OuterField::Both;

  friend bool operator==(const TermDescriptor&, const TermDescriptor&) = default;
};

enum class TermClass {
  Zeroth,
  FirstOrder,
  SecondOrderType1,
  SecondOrderType2Absorption,
  SecondOrderType2Anomalous,
};

inline const char* to_string(TermClass c) {
  switch (c) {
    case TermClass::Zeroth: return "zeroth";
    case TermClass::FirstOrder: return "first_order";
    case TermClass::SecondOrderType1: return "type1";
    case TermClass::SecondOrderType2Absorption: return "type2_absorption";
    case TermClass::SecondOrderType2Anomalous: return "type2_anomalous";
  }
  return "?";
}

/// Order-of-magnitude scales behind the second-order truncation of the
/// expansion: one quantized emission event carries sqrt(eta/tau_emission)
/// while one classical (or coherent-probe) interaction carries
/// sqrt(m/tau_pulse).
struct ScaleEstimate {
  double l_scale = 0.0;
  double field_scale = 0.0;

  double ratio() const { return field_scale / l_scale; }
};

inline ScaleEstimate interaction_scale(double eta, double tau_emission_fs,
                                       double tau_pulse_fs, double m) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw ValidationError("interaction_scale: eta must lie in (0, 1]");
  }
  if (!(tau_emission_fs > 0.0) || !(tau_pulse_fs > 0.0)) {
    throw ValidationError("interaction_scale: time scales must be positive");
  }
  if (!(m > 0.0)) throw ValidationError("interaction_scale: m must be positive");
  return {std::sqrt(eta / tau_emission_fs), std::sqrt(m / tau_pulse_fs)};
}

namespace detail {

inline int probe_interactions(const TermDescriptor& t) {
  auto is_probe = [](const Interaction& i) { return i.is_probe(); };
  return static_cast<int>(std::count_if(t.left_chain.begin(), t.left_chain.end(), is_probe) +
                          std::count_if(t.right_chain.begin(), t.right_chain.end(), is_probe));
}

inline int polarization_heads(const TermDescriptor& t) {
  switch (t.outer_field) {
    case OuterField::Both: return 0;
    case OuterField::ADag:
    case OuterField::A: return 1;
    case OuterField::None: return 2;
  }
  return 0;
}

inline bool left_is_bare(const TermDescriptor& t) {
  return t.outer_field == OuterField::Both || t.outer_field == OuterField::ADag;
}

inline bool right_is_bare(const TermDescriptor& t) {
  return t.outer_field == OuterField::Both || t.outer_field == OuterField::A;
}

inline void check_well_formed(const TermDescriptor& t, const char* where) {
  if (left_is_bare(t) && !t.left_chain.empty()) {
    throw ValidationError(std::string(where) + ": bare left branch must have an empty chain");
  }
  if (right_is_bare(t) && !t.right_chain.empty()) {
    throw ValidationError(std::string(where) + ": bare right branch must have an empty chain");
  }
  if (t.lpr_order != polarization_heads(t) + probe_interactions(t)) {
    throw ValidationError(std::string(where) + ": lpr_order inconsistent with chains");
  }
  if (t.lpr_order > 2) {
    throw ValidationError(std::string(where) + ": lpr_order exceeds the truncation order 2");
  }
  for (const auto* chain : {&t.left_chain, &t.right_chain}) {
    for (const Interaction& i : *chain) {
      if (i.field < 0) throw ValidationError(std::string(where) + ": negative field index");
    }
  }
}

inline bool interaction_less(const Interaction& a, const Interaction& b) {
  if (a.field != b.field) return a.field < b.field;
  return a.daggered < b.daggered;
}

inline bool chain_less(const std::vector<Interaction>& a, const std::vector<Interaction>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      interaction_less);
}

}  // namespace detail

/// Canonical ordering for deterministic listings.
inline bool term_less(const TermDescriptor& a, const TermDescriptor& b) {
  if (a.outer_field != b.outer_field) {
    return static_cast<int>(a.outer_field) < static_cast<int>(b.outer_field);
  }
  if (a.left_chain != b.left_chain) return detail::chain_less(a.left_chain, b.left_chain);
  return detail::chain_less(a.right_chain, b.right_chain);
}

inline TermClass classify(const TermDescriptor& term) {
  detail::check_well_formed(term, "classify");
  if (term.lpr_order == 0) return TermClass::Zeroth;
  if (term.lpr_order == 1) return TermClass::FirstOrder;
  if (term.outer_field == OuterField::None) return TermClass::SecondOrderType1;

  // One bare head, one polarization carrying exactly one quantized-probe
  // interaction. The contraction is number-like (<a^dag a>) when the bare
  // head's dagger matches the matter-raising character of that interaction.
  const auto& chain = term.outer_field == OuterField::ADag ? term.right_chain : term.left_chain;
  auto it = std::find_if(chain.begin(), chain.end(),
                         [](const Interaction& i) { return i.is_probe(); });
  if (it == chain.end()) {
    throw ValidationError("classify: second-order term lacks its probe interaction");
  }
  const bool number_like = (term.outer_field == OuterField::ADag) == it->daggered;
  return number_like ? TermClass::SecondOrderType2Absorption
                     : TermClass::SecondOrderType2Anomalous;
}

/// The probe-field correlator a term factors into, if it has one. Terms whose
/// heads are both polarizations carry no probe field operator at all.
inline std::optional<CorrelatorKind> probe_correlator(const TermDescriptor& term) {
  switch (classify(term)) {
    case TermClass::Zeroth: return CorrelatorKind::Normal;
    case TermClass::FirstOrder:
      return term.outer_field == OuterField::ADag ? CorrelatorKind::OnePointADag
                                                  : CorrelatorKind::OnePointA;
    case TermClass::SecondOrderType1: return std::nullopt;
    case TermClass::SecondOrderType2Absorption: return CorrelatorKind::Normal;
    case TermClass::SecondOrderType2Anomalous:
      return term.outer_field == OuterField::ADag ? CorrelatorKind::AnomalousADagADag
                                                  : CorrelatorKind::AnomalousAA;
  }
  return std::nullopt;
}

/// How a term's factored probe-field correlator behaves for a given input
/// state: whether it vanishes identically, and the power of the mean photon
/// number m it scales by. Single-photon states (including the heralded
/// biphoton, which conditions to one) kill every one-point and anomalous
/// correlator; coherent states kill nothing.
struct FieldSignature {
  bool vanishes = false;
  double m_exponent = 0.0;
  double m_factor = 1.0;
};

inline FieldSignature field_signature(const TermDescriptor& term, ProbeKind state_kind,
                                      double m) {
  const TermClass c = classify(term);
  FieldSignature sig;
  switch (c) {
    case TermClass::Zeroth:
    case TermClass::SecondOrderType2Absorption: sig.m_exponent = 1.0; break;
    case TermClass::FirstOrder: sig.m_exponent = 0.5; break;
    case TermClass::SecondOrderType1: sig.m_exponent = 0.0; break;
    case TermClass::SecondOrderType2Anomalous: sig.m_exponent = 1.0; break;
  }
  const bool single_photon =
      state_kind == ProbeKind::Fock1 || state_kind == ProbeKind::HeraldedBiphoton;
  if (single_photon &&
      (c == TermClass::FirstOrder || c == TermClass::SecondOrderType2Anomalous)) {
    sig.vanishes = true;
  }
  const double m_eff = single_photon ? 1.0 : m;
  if (sig.m_exponent == 1.0) {
    sig.m_factor = m_eff;  // exact linearity in m, no pow() rounding
  } else if (sig.m_exponent == 0.0) {
    sig.m_factor = 1.0;
  } else {
    sig.m_factor = std::sqrt(m_eff);
  }
  return sig;
}

inline FieldSignature field_signature(const TermDescriptor& term, const ProbeState& state) {
  return field_signature(term, kind(state), mean_photons(state));
}

/// Signed sum of interaction wavevectors radiated by a term's polarizations.
/// Within the right chain each matter-raising interaction contributes +k of
/// its field and each matter-lowering one -k; the left chain is the
/// conjugated branch, so its contributions enter with the opposite sign.
/// Branch heads contribute nothing (they are the detected field itself).
inline WaveVector signal_wavevector(const TermDescriptor& term, const BeamGeometry& geometry) {
  // Net signed count per field first, in exact integer arithmetic: a term
  // whose contributions cancel symbolically must yield the exact zero vector.
  // Summing wavevectors interaction by interaction instead can leave ~1e-16
  // roundoff pointing along the probe, faking a phase match.
  std::vector<int> net(geometry.n_classical() + 1, 0);  // slot 0 = probe
  auto add = [&](const Interaction& i, int sign) {
    if (i.is_probe()) {
      net[0] += sign;
      return;
    }
    const std::size_t idx = static_cast<std::size_t>(i.field);
    if (i.field < 1 || idx > geometry.n_classical()) {
      throw IndexOutOfRange("signal_wavevector: classical field index " +
                            std::to_string(i.field) + " outside [1, " +
                            std::to_string(geometry.n_classical()) + "]");
    }
    net[idx] += sign;
  };
  for (const Interaction& i : term.right_chain) add(i, i.daggered ? +1 : -1);
  for (const Interaction& i : term.left_chain) add(i, i.daggered ? -1 : +1);
  WaveVector sum = static_cast<double>(net[0]) * geometry.k_probe;
  for (std::size_t b = 1; b < net.size(); ++b) {
    sum = sum + static_cast<double>(net[b]) * geometry.k_classical[b - 1];
  }
  return sum;
}

/// Phase-matching filter: polarization-radiated signal must point along the
/// probe. Terms with no polarization (pure transmission) and terms with no
/// probe field operator (spontaneous-emission-like, both heads polarized)
/// survive unconditionally.
inline bool survives_in_probe_direction(const TermDescriptor& term,
                                        const BeamGeometry& geometry) {
  const TermClass c = classify(term);
  if (c == TermClass::Zeroth || c == TermClass::SecondOrderType1) return true;
  return parallel_same_direction(signal_wavevector(term, geometry), geometry.k_probe);
}

/// Full expansion of the detected two-point signal: every distinct term with
/// at most two quantized-probe factors and at most `max_classical_interactions`
/// classical interactions, in canonical order.
inline std::vector<TermDescriptor> enumerate_terms(int n_classical,
                                                   int max_classical_interactions) {
  if (n_classical < 0 || max_classical_interactions < 0) {
    throw ValidationError("enumerate_terms: counts must be non-negative");
  }
  if (n_classical > 4) {
    throw CombinatorialLimitExceeded("enumerate_terms: n_classical > 4");
  }
  if (max_classical_interactions > 6) {
    throw CombinatorialLimitExceeded("enumerate_terms: max_classical_interactions > 6");
  }

  // All ordered classical-interaction sequences of length <= max, grouped by
  // length: choices per slot are (field index, dagger).
  std::vector<std::vector<std::vector<Interaction>>> seqs_by_len(
      static_cast<std::size_t>(max_classical_interactions) + 1);
  seqs_by_len[0] = {{}};
  for (int len = 1; len <= max_classical_interactions; ++len) {
    auto& out = seqs_by_len[static_cast<std::size_t>(len)];
    for (const auto& shorter : seqs_by_len[static_cast<std::size_t>(len - 1)]) {
      for (int f = 1; f <= n_classical; ++f) {
        for (bool dag : {false, true}) {
          auto seq = shorter;
          seq.push_back({f, dag});
          out.push_back(std::move(seq));
        }
      }
    }
  }

  std::vector<TermDescriptor> terms;
  // Pure transmission: both heads bare.
  terms.push_back({{}, {}, 0, OuterField::Both});

  // One bare head, one polarization with classical interactions only.
  for (OuterField outer : {OuterField::ADag, OuterField::A}) {
    for (const auto& group : seqs_by_len) {
      for (const auto& seq : group) {
        TermDescriptor t;
        t.outer_field = outer;
        (outer == OuterField::ADag ? t.right_chain : t.left_chain) = seq;
        t.lpr_order = 1;
        terms.push_back(std::move(t));
      }
    }
  }

  // Both heads polarized, classical interactions split across the chains.
  for (int s_left = 0; s_left <= max_classical_interactions; ++s_left) {
    for (int s_right = 0; s_left + s_right <= max_classical_interactions; ++s_right) {
      for (const auto& left : seqs_by_len[static_cast<std::size_t>(s_left)]) {
        for (const auto& right : seqs_by_len[static_cast<std::size_t>(s_right)]) {
          terms.push_back({left, right, 2, OuterField::None});
        }
      }
    }
  }

  // One bare head, one polarization that also absorbs or emits a quantized
  // probe photon somewhere inside its classical sequence.
  for (OuterField outer : {OuterField::ADag, OuterField::A}) {
    for (const auto& group : seqs_by_len) {
      for (const auto& seq : group) {
        for (std::size_t pos = 0; pos <= seq.size(); ++pos) {
          for (bool dag : {false, true}) {
            TermDescriptor t;
            t.outer_field = outer;
            auto& chain = outer == OuterField::ADag ? t.right_chain : t.left_chain;
            chain = seq;
            chain.insert(chain.begin() + static_cast<std::ptrdiff_t>(pos),
                         Interaction{kProbeField, dag});
            t.lpr_order = 2;
            terms.push_back(std::move(t));
          }
        }
      }
    }
  }

  std::sort(terms.begin(), terms.end(), term_less);
  return terms;
}

/// enumerate -> classify -> field_signature -> phase matching, keeping the
/// terms that are both non-vanishing for the state and radiated into the
/// probe direction.
inline std::vector<std::pair<TermDescriptor, TermClass>> surviving_terms(
    int n_classical, int max_classical_interactions, const BeamGeometry& geometry,
    ProbeKind state_kind) {
  std::vector<std::pair<TermDescriptor, TermClass>> out;
  for (auto& term : enumerate_terms(n_classical, max_classical_interactions)) {
    const TermClass c = classify(term);
    if (field_signature(term, state_kind, 1.0).vanishes) continue;
    if (!survives_in_probe_direction(term, geometry)) continue;
    out.emplace_back(std::move(term), c);
  }
  return out;
}

inline std::vector<std::pair<TermDescriptor, TermClass>> surviving_terms(
    int n_classical, int max_classical_interactions, const BeamGeometry& geometry,
    const ProbeState& state) {
  return surviving_terms(n_classical, max_classical_interactions, geometry, kind(state));
}

}  // namespace qls
