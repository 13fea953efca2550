#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qls/errors.hpp"
#include "qls/grid.hpp"
#include "qls/units.hpp"

namespace qls {

// ---------------------------------------------------------------------------
// Biphoton wavefunction
// ---------------------------------------------------------------------------

/// Parameters of the Gaussian biphoton joint spectral amplitude
///   Phi(w, w_r) = N * exp(-(w + w_r - omega0)^2 / (2 sigma^2))
///                   * exp(-beta * ((w - omega0/2) T2~ + (w_r - omega0/2) T1~)^2)
/// where T~ = 2*pi*c*T is the angular-converted entanglement time (cm), so
/// every omega*T product is a plain phase argument. `norm` is fixed by the
/// joint normalization  iint |Phi|^2 dw dw_r = 1  on a declared grid.
struct BiphotonGaussianParams {
  double omega0 = 0.0;   // pump-sum center (cm^-1)
  double sigma = 0.0;    // pump bandwidth (cm^-1)
  double beta = 0.0;     // entanglement-time curvature (dimensionless in angular convention)
  double t1_fs = 0.0;    // entanglement time T1 (fs)
  double t2_fs = 0.0;    // entanglement time T2 (fs)
  double norm = 1.0;     // joint normalization N

  BiphotonGaussianParams() = default;
  BiphotonGaussianParams(double omega0_, double sigma_, double beta_, double t1_fs_,
                         double t2_fs_, double norm_)
      : omega0(omega0_), sigma(sigma_), beta(beta_), t1_fs(t1_fs_), t2_fs(t2_fs_), norm(norm_) {
    if (!(sigma > 0.0)) throw std::invalid_argument("BiphotonGaussianParams: sigma must be > 0");
    if (beta < 0.0) throw std::invalid_argument("BiphotonGaussianParams: beta must be >= 0");
    if (!(norm > 0.0)) throw std::invalid_argument("BiphotonGaussianParams: norm must be > 0");
  }
};

/// Unnormalized amplitude (norm factor excluded); shared by the normalization
/// integral and biphoton_amplitude.
inline double biphoton_amplitude_raw(const BiphotonGaussianParams& p, double omega,
                                     double omega_r) {
  const double t1a = angular_time(p.t1_fs);
  const double t2a = angular_time(p.t2_fs);
  const double s = omega + omega_r - p.omega0;
  const double e = (omega - 0.5 * p.omega0) * t2a + (omega_r - 0.5 * p.omega0) * t1a;
  return std::exp(-s * s / (2.0 * p.sigma * p.sigma)) * std::exp(-p.beta * e * e);
}

/// Joint spectral amplitude Phi(omega, omega_r). Real and positive for this
/// Gaussian parameterization.
inline double biphoton_amplitude(const BiphotonGaussianParams& p, double omega, double omega_r) {
  return p.norm * biphoton_amplitude_raw(p, omega, omega_r);
}

/// Grid wide enough that the joint density's tails are < 1e-8 in total mass
/// for the default parameter set (the omega_r marginal has std ~ 569 cm^-1,
/// so [7500, 14500] is a +-6.2 sigma window around omega0/2).
inline FrequencyGrid default_joint_norm_grid() { return FrequencyGrid(7500.0, 14500.0, 1401); }

/// Build params with `norm` fixed by 2-D trapezoid integration of |Phi|^2
/// over joint_grid x joint_grid.
inline BiphotonGaussianParams make_biphoton_params(double omega0, double sigma, double beta,
                                                   double t1_fs, double t2_fs,
                                                   const FrequencyGrid& joint_grid) {
  BiphotonGaussianParams p(omega0, sigma, beta, t1_fs, t2_fs, 1.0);
  double total = 0.0;
  for (int i = 0; i < joint_grid.n_points; ++i) {
    const double wi = trapezoid_weight(joint_grid, i);
    const double w = joint_grid.point(i);
    double row = 0.0;
    for (int j = 0; j < joint_grid.n_points; ++j) {
      const double a = biphoton_amplitude_raw(p, w, joint_grid.point(j));
      row += trapezoid_weight(joint_grid, j) * a * a;
    }
    total += wi * row;
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw GridTooNarrow("make_biphoton_params: |Phi|^2 has no mass on the joint grid");
  p.norm = 1.0 / std::sqrt(total);
  return p;
}

inline BiphotonGaussianParams make_biphoton_params(double omega0, double sigma, double beta,
                                                   double t1_fs, double t2_fs) {
  return make_biphoton_params(omega0, sigma, beta, t1_fs, t2_fs, default_joint_norm_grid());
}

// ---------------------------------------------------------------------------
// Gaussian reduction of the conditioned profile
// ---------------------------------------------------------------------------

/// A plain Gaussian amplitude profile exp(-(w - center)^2 / (2 width^2)).
struct GaussianProfile {
  double center = 0.0;  // cm^-1
  double width = 0.0;   // cm^-1

  GaussianProfile() = default;
  GaussianProfile(double center_, double width_) : center(center_), width(width_) {
    if (!(width > 0.0)) throw std::invalid_argument("GaussianProfile: width must be > 0");
  }
};

/// Closed form of the single-variable Gaussian that Phi(., omega_r) reduces
/// to at fixed omega_r (complete the square in omega):
///   width   sigma' = (1/sigma^2 + 2 beta T2~^2)^(-1/2)
///   center  w0'    = sigma'^2 [ (omega0 - w_r)/sigma^2
///                               + 2 beta T2~ ((omega0/2)(T1~ + T2~) - w_r T1~) ]
inline GaussianProfile gaussian_reduction(const BiphotonGaussianParams& p, double omega_r) {
  const double t1a = angular_time(p.t1_fs);
  const double t2a = angular_time(p.t2_fs);
  const double inv_var = 1.0 / (p.sigma * p.sigma) + 2.0 * p.beta * t2a * t2a;
  const double width = 1.0 / std::sqrt(inv_var);
  const double lin = (p.omega0 - omega_r) / (p.sigma * p.sigma) +
                     2.0 * p.beta * t2a * (0.5 * p.omega0 * (t1a + t2a) - omega_r * t1a);
  return GaussianProfile(lin / inv_var, width);
}

// ---------------------------------------------------------------------------
// Spectral profiles
// ---------------------------------------------------------------------------

/// Sampled spectral amplitude xi(omega) with unit trapezoid norm on its grid:
/// int |xi|^2 domega = 1, so |xi|^2 is a spectral density per cm^-1 and the
/// amplitude has units cm^(1/2). Profiles built by the factories below also
/// carry the normalized closed form as `eval`, so off-grid evaluation (used
/// by quadrature-refinement checks) is exact rather than interpolated.
struct SpectralProfile {
  FrequencyGrid grid;
  std::vector<cplx> amplitude;
  std::function<cplx(double)> eval;  // may be empty for raw sampled profiles

  cplx value_at(double omega) const {
    if (eval) return eval(omega);
    // linear interpolation between samples, exact at the nodes
    const double h = grid.spacing();
    double x = (omega - grid.omega_min) / h;
    if (x <= 0.0) return amplitude.front();
    if (x >= grid.n_points - 1) return amplitude.back();
    const int i = static_cast<int>(x);
    const double f = x - i;
    return (1.0 - f) * amplitude[i] + f * amplitude[i + 1];
  }

  /// Trapezoid norm of |xi|^2 on the grid (should be 1 within 1e-10).
  double density_norm() const {
    double acc = 0.0;
    for (int i = 0; i < grid.n_points; ++i)
      acc += trapezoid_weight(grid, i) * std::norm(amplitude[i]);
    return acc;
  }
};

namespace detail {

/// Sample a raw (unnormalized) real amplitude on the grid, check that the
/// grid contains its support, and return the unit-norm profile together with
/// the raw density integral int |raw|^2 domega.
template <typename RawFn>
std::pair<SpectralProfile, double> normalize_profile(const FrequencyGrid& grid, RawFn raw,
                                                     const std::string& what) {
  std::vector<double> samples(grid.n_points);
  double peak = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    samples[i] = raw(grid.point(i));
    peak = std::max(peak, std::abs(samples[i]));
  }
  if (!(peak > 0.0) || !std::isfinite(peak))
    throw GridTooNarrow(what + ": profile has no support on the grid");
  const double edge = std::max(std::abs(samples.front()), std::abs(samples.back()));
  if (edge > 1e-8 * peak)
    throw GridTooNarrow(what + ": edge amplitude is " + std::to_string(edge / peak) +
                        " of peak (limit 1e-8); widen the grid");
  double raw_norm = 0.0;
  for (int i = 0; i < grid.n_points; ++i)
    raw_norm += trapezoid_weight(grid, i) * samples[i] * samples[i];
  const double scale = 1.0 / std::sqrt(raw_norm);

  SpectralProfile profile;
  profile.grid = grid;
  profile.amplitude.resize(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) profile.amplitude[i] = cplx(samples[i] * scale, 0.0);
  profile.eval = [raw, scale](double w) { return cplx(raw(w) * scale, 0.0); };
  return {std::move(profile), raw_norm};
}

}  // namespace detail

/// Unit-normalized real Gaussian probe, amplitude ~ exp(-(w-center)^2 / (2 width^2)).
inline SpectralProfile conventional_probe(double center, double width,
                                          const FrequencyGrid& grid) {
  if (!(width > 0.0)) throw std::invalid_argument("conventional_probe: width must be > 0");
  auto raw = [center, width](double w) {
    const double d = (w - center) / width;
    return std::exp(-0.5 * d * d);
  };
  return detail::normalize_profile(grid, raw, "conventional_probe").first;
}

/// Result of heralding on a reference-photon frequency: the unit-norm
/// conditioned profile and the heralding spectral density
///   herald_weight = int |Phi(w, w_r)|^2 dw.
struct HeraldedReduction {
  SpectralProfile profile;
  double herald_weight = 0.0;
};

/// Condition the biphoton on reference frequency omega_r:
/// profile(w) = Phi(w, w_r) / sqrt(herald_weight).
inline HeraldedReduction condition_on_reference(const BiphotonGaussianParams& p, double omega_r,
                                                const FrequencyGrid& grid) {
  auto raw = [p, omega_r](double w) { return biphoton_amplitude(p, w, omega_r); };
  auto [profile, raw_norm] = detail::normalize_profile(grid, raw, "condition_on_reference");
  return HeraldedReduction{std::move(profile), raw_norm};
}

// ---------------------------------------------------------------------------
// Probe states
// ---------------------------------------------------------------------------

/// Single-photon Fock state with spectral profile xi; mean photon number is
/// exactly 1 by definition of the state.
struct Fock1 {
  SpectralProfile profile;
};

/// Coherent state with spectral amplitude sqrt(m) xi; m photons on average.
struct CoherentM {
  SpectralProfile profile;
  double mean_photons = 1.0;

  CoherentM() = default;
  CoherentM(SpectralProfile profile_, double mean_photons_)
      : profile(std::move(profile_)), mean_photons(mean_photons_) {
    if (mean_photons < 0.0)
      throw std::invalid_argument("CoherentM: mean_photons must be >= 0");
  }
};

/// One photon of a biphoton pair, heralded on the partner's frequency omega_r.
struct HeraldedBiphoton {
  BiphotonGaussianParams biphoton;
  double omega_r = 0.0;
};

using ProbeState = std::variant<Fock1, CoherentM, HeraldedBiphoton>;

enum class ProbeKind { Fock1, CoherentM, HeraldedBiphoton };

inline ProbeKind kind(const ProbeState& s) {
  if (std::holds_alternative<Fock1>(s)) return ProbeKind::Fock1;
  if (std::holds_alternative<CoherentM>(s)) return ProbeKind::CoherentM;
  return ProbeKind::HeraldedBiphoton;
}

inline double mean_photons(const ProbeState& s) {
  if (const auto* c = std::get_if<CoherentM>(&s)) return c->mean_photons;
  return 1.0;  // Fock1 by definition; heralded state holds a single photon
}

inline const char* to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::Fock1: return "Fock1";
    case ProbeKind::CoherentM: return "CoherentM";
    case ProbeKind::HeraldedBiphoton: return "HeraldedBiphoton";
  }
  return "?";
}

}  // namespace qls
