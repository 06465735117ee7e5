#pragma once

#include <cmath>

namespace trires {
namespace consts {

inline constexpr double pi      = 3.14159265358979323846;
inline constexpr double two_pi  = 2.0 * pi;
inline constexpr double hbar    = 1.054571817e-34;   // J s
inline constexpr double k_B     = 1.380649e-23;      // J/K
inline constexpr double c0      = 299792458.0;       // m/s
inline constexpr double eps0    = 8.8541878128e-12;  // F/m

} // namespace consts

// All internal frequencies and rates are angular (rad/s). Ordinary hertz
// appear only at user-facing surfaces (config files, CSV columns, CLI text).
inline constexpr double to_angular(double f_hz) { return consts::two_pi * f_hz; }
inline constexpr double to_hz(double omega) { return omega / consts::two_pi; }

// sin(x)/x with the removable singularity filled in; unnormalized convention.
inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(x) / x;
}

} // namespace trires
