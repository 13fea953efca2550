#pragma once

#include <cmath>
#include <complex>

#include "qls/pulses.hpp"
#include "qls/units.hpp"

namespace qls {

/// The complete set of field correlators the detection scheme can produce;
/// nothing else is representable.
enum class CorrelatorKind {
  OnePointA,          // <a>
  OnePointADag,       // <a^dag>
  Normal,             // <a^dag a>
  AnomalousAA,        // <a a>
  AnomalousADagADag,  // <a^dag a^dag>
  HeraldedFourPoint,  // <a_r^dag a_r a^dag a>
};

inline const char* to_string(CorrelatorKind k) {
  switch (k) {
    case CorrelatorKind::OnePointA: return "<a>";
    case CorrelatorKind::OnePointADag: return "<a^dag>";
    case CorrelatorKind::Normal: return "<a^dag a>";
    case CorrelatorKind::AnomalousAA: return "<a a>";
    case CorrelatorKind::AnomalousADagADag: return "<a^dag a^dag>";
    case CorrelatorKind::HeraldedFourPoint: return "<a_r^dag a_r a^dag a>";
  }
  return "?";
}

namespace detail {

[[noreturn]] inline void reject_heralded(const char* which) {
  throw UnsupportedState(std::string(which) +
                         ": heralded biphoton states have no reduced two-point form here; "
                         "use heralded_four_point");
}

inline const SpectralProfile& profile_of(const ProbeState& s, const char* which) {
  if (const auto* f = std::get_if<Fock1>(&s)) return f->profile;
  if (const auto* c = std::get_if<CoherentM>(&s)) return c->profile;
  reject_heralded(which);
}

}  // namespace detail

/// <a^dag(omega2) a(omega1)> = m xi*(omega2) xi(omega1), with m = 1 for the
/// single-photon Fock state.
inline cplx normal_two_point(const ProbeState& state, double omega2, double omega1) {
  const SpectralProfile& xi = detail::profile_of(state, "normal_two_point");
  return mean_photons(state) * std::conj(xi.value_at(omega2)) * xi.value_at(omega1);
}

/// <a(omega)> (daggered: <a^dag(omega)>). Zero for Fock states; the coherent
/// state factorizes to sqrt(m) xi(omega).
inline cplx one_point(const ProbeState& state, double omega, bool daggered) {
  if (std::holds_alternative<Fock1>(state)) return {0.0, 0.0};
  if (const auto* c = std::get_if<CoherentM>(&state)) {
    const cplx v = std::sqrt(c->mean_photons) * c->profile.value_at(omega);
    return daggered ? std::conj(v) : v;
  }
  detail::reject_heralded("one_point");
}

/// <a(omega2) a(omega1)> (daggered: <a^dag a^dag>). Zero for Fock states;
/// m xi(omega2) xi(omega1) for the coherent state.
inline cplx anomalous_two_point(const ProbeState& state, double omega2, double omega1,
                                bool daggered) {
  if (std::holds_alternative<Fock1>(state)) return {0.0, 0.0};
  if (const auto* c = std::get_if<CoherentM>(&state)) {
    const cplx v = c->mean_photons * c->profile.value_at(omega2) * c->profile.value_at(omega1);
    return daggered ? std::conj(v) : v;
  }
  detail::reject_heralded("anomalous_two_point");
}

/// Four-point correlator of the delayed biphoton state, conditioned on the
/// reference-photon frequency omega_r:
///   <a_r^dag(w_r) a_r(w_r) a^dag(w) a(w')> = Phi*(w, w_r) Phi(w', w_r)
///                                            * exp(i (w' - w) t0~).
inline cplx heralded_four_point(const BiphotonGaussianParams& params, double omega_r,
                                double omega, double omega_prime, double t0_fs) {
  const double left = biphoton_amplitude(params, omega, omega_r);
  const double right = biphoton_amplitude(params, omega_prime, omega_r);
  return left * right * std::polar(1.0, (omega_prime - omega) * angular_time(t0_fs));
}

}  // namespace qls
