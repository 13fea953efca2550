#pragma once

#include <complex>

namespace qls {

using cplx = std::complex<double>;

// Unit convention used throughout: frequencies are wavenumbers in cm^-1,
// times are in fs. A product omega * t is a plain phase only after the time
// has been converted to angular form, t_ang = 2*pi*c * t, with c in cm/fs.
inline constexpr double kSpeedOfLightCmPerFs = 2.99792458e-5;
inline constexpr double kTwoPiCCmPerFs = 2.0 * 3.141592653589793238462643383279502884 *
                                         kSpeedOfLightCmPerFs;

/// Angular-converted time in cm: multiply by a wavenumber to get a phase.
inline double angular_time(double t_fs) { return kTwoPiCCmPerFs * t_fs; }

}  // namespace qls
