#pragma once

#include <cmath>
#include <string>

#include "trires/constants.hpp"
#include "trires/couplings.hpp"
#include "trires/errors.hpp"
#include "trires/params.hpp"

namespace trires {

enum class DisplacementConvention { driven_peak, rms_pair };

inline std::string to_string(DisplacementConvention c) {
    return c == DisplacementConvention::driven_peak ? "driven_peak" : "rms_pair";
}

// Zero-point displacement U0 of the longitudinal acoustic mode.
inline double zero_point_displacement(const SystemParams& p) {
    if (p.material.rho <= 0.0) throw validation_error("material density not set");
    if (p.Omega_m <= 0.0) throw validation_error("acoustic frequency not set");
    if (p.L_m <= 0.0) throw validation_error("acoustic cavity length must be positive");
    return std::sqrt(2.0 * consts::hbar / (p.material.rho * p.Omega_m * p.A_m() * p.L_m));
}

// Motional amplitude for n phonons. driven_peak: U0 sqrt(n); rms_pair:
// U0 sqrt(2n). Neither convention is canonical; callers must label which
// one a report uses.
inline double displacement(const SystemParams& p, double n, DisplacementConvention conv) {
    if (n < 0.0) throw validation_error("phonon number must be non-negative");
    const double u0 = zero_point_displacement(p);
    return (conv == DisplacementConvention::driven_peak) ? u0 * std::sqrt(n)
                                                         : u0 * std::sqrt(2.0 * n);
}

// Detected optical signal power for n_m coherently driven phonons.
inline double phonons_to_signal_power(const SystemParams& p, const CouplingSet& cs, double n_m) {
    if (n_m < 0.0) throw validation_error("phonon number must be non-negative");
    if (cs.g_om == 0.0) throw validation_error("no optomechanical readout: g_om is zero");
    if (p.kappa_opt <= 0.0) throw validation_error("kappa_opt must be positive");
    return consts::hbar * p.omega_p() * (4.0 * cs.g_om * cs.g_om / p.kappa_opt) * n_m;
}

inline double signal_power_to_phonons(double P_sig, const SystemParams& p, const CouplingSet& cs) {
    if (P_sig < 0.0) throw validation_error("signal power must be non-negative");
    if (cs.g_om == 0.0) throw validation_error("no optomechanical readout: g_om is zero");
    if (p.kappa_opt <= 0.0) throw validation_error("kappa_opt must be positive");
    return P_sig / (consts::hbar * p.omega_p() * 4.0 * cs.g_om * cs.g_om / p.kappa_opt);
}

// Steady-state phonon number generated by a resonant microwave drive of
// power P_mu through the piezo coupling g_em (general expression; reduces to
// the familiar weak-coupling form when 2 g_em^2/kappa_mu << Gamma/2).
inline double driven_phonons(const SystemParams& p, double g_em, double P_mu) {
    if (P_mu < 0.0) throw validation_error("drive power must be non-negative");
    if (p.kappa_mu <= 0.0 || p.Gamma <= 0.0)
        throw validation_error("driven phonons require positive kappa_mu and Gamma");
    if (p.Omega_mu <= 0.0) throw validation_error("microwave frequency not set");
    if (g_em == 0.0 || P_mu == 0.0) return 0.0;
    const double flux = P_mu / (consts::hbar * p.Omega_mu);
    const double denom = 2.0 * g_em * g_em / p.kappa_mu + 0.5 * p.Gamma;
    const double amp = g_em / denom;
    return (4.0 * p.kappa_mu_c / (p.kappa_mu * p.kappa_mu)) * amp * amp * flux;
}

namespace detail {

inline double drive_response_scale(const SystemParams& p, double n_m, double P_mu) {
    if (n_m < 0.0) throw validation_error("phonon number must be non-negative");
    if (P_mu <= 0.0) throw validation_error("drive power must be positive");
    if (p.kappa_mu <= 0.0 || p.kappa_mu_c <= 0.0 || p.Gamma <= 0.0)
        throw validation_error("extraction requires positive kappa_mu, kappa_mu_c, Gamma");
    if (p.Omega_mu <= 0.0) throw validation_error("microwave frequency not set");
    const double flux = P_mu / (consts::hbar * p.Omega_mu);
    const double A = 4.0 * p.kappa_mu_c / (p.kappa_mu * p.kappa_mu);
    return std::sqrt(n_m / (A * flux));  // = g / (2g^2/kappa_mu + Gamma/2)
}

// Weak-regime inverse of driven_phonons; exact square-root drive law.
inline double extract_gem_weak(const SystemParams& p, double n_m, double P_mu) {
    if (n_m == 0.0) return 0.0;
    return 0.5 * p.Gamma * drive_response_scale(p, n_m, P_mu);
}

} // namespace detail

// Exact inverse of driven_phonons (smaller root of the quadratic response;
// the branch that joins the weak-coupling formula as n_m -> 0).
inline double extract_gem(const SystemParams& p, double n_m, double P_mu) {
    if (n_m == 0.0) {
        detail::drive_response_scale(p, 0.0, P_mu);
        return 0.0;
    }
    const double q = detail::drive_response_scale(p, n_m, P_mu);
    const double disc = 1.0 - 4.0 * q * q * p.Gamma / p.kappa_mu;
    if (disc < 0.0)
        throw numeric_error("drive inconsistent with model: phonon number exceeds the "
                            "saturation of the electromechanical response");
    return q * p.Gamma / (1.0 + std::sqrt(disc));
}

// Effective piezoelectric constant that reproduces g_em under the
// distribution configured in params.
inline double extract_d33(const SystemParams& p, double g_em) {
    const double f = piezo_distribution_factor(p);
    if (f == 0.0)
        throw validation_error("parity-forbidden: d33 unconstrained for an even bulk mode");
    return g_em / g_em_per_d33(p);
}

struct ThermalOccupancy {
    double n_bath = 0.0;
    double n_eff = 0.0;
};

// Bose occupation of the bath plus the standard sideband-cooling reduction
// by the pumped optomechanical interaction.
inline ThermalOccupancy thermal_occupancy(double Omega, double T, double C_om = 0.0) {
    if (T <= 0.0) throw validation_error("temperature must be positive");
    if (Omega <= 0.0) throw validation_error("frequency must be positive");
    if (C_om < 0.0) throw validation_error("cooperativity must be non-negative");
    ThermalOccupancy out;
    const double x = consts::hbar * Omega / (consts::k_B * T);
    out.n_bath = 1.0 / std::expm1(x);
    out.n_eff = out.n_bath / (1.0 + C_om);
    return out;
}

struct SensitivityFloor {
    double displacement_density = 0.0;  // m per sqrt(Hz), rms_pair convention
    double d33_sensitivity = 0.0;       // m/V resolvable at the stated bandwidth
    double bandwidth = 0.0;             // Hz
};

// Noise-floor figures at the stated detection bandwidth. The d33 limb uses
// the weak-regime extraction so the sqrt(bandwidth) scaling of a white
// phonon-noise floor is algebraically exact.
inline SensitivityFloor sensitivity_floor(const SystemParams& p, double n_floor,
                                          double bandwidth_hz) {
    if (bandwidth_hz <= 0.0) throw validation_error("bandwidth must be positive");
    if (n_floor < 0.0) throw validation_error("phonon floor must be non-negative");
    SensitivityFloor out;
    out.bandwidth = bandwidth_hz;
    if (n_floor == 0.0) return out;
    out.displacement_density =
        displacement(p, n_floor, DisplacementConvention::rms_pair) / std::sqrt(bandwidth_hz);
    const double g_floor = detail::extract_gem_weak(p, n_floor, p.P_mu);
    out.d33_sensitivity = extract_d33(p, g_floor);
    return out;
}

struct EnhancementRatio {
    double direct = 0.0;   // cavity/free-space detected power ratio, evaluated from both chains
    double formula = 0.0;  // (16/pi^2) eta_opt^2 F^2
    double finesse = 0.0;
};

// Detected-signal enhancement from enclosing the crystal in the optical
// cavity, for the same phonon amplitude and pump power.
inline double signal_power_cavity(const SystemParams& p, const CouplingSet& cs, double n_m) {
    if (p.kappa_opt <= 0.0) throw validation_error("kappa_opt must be positive");
    const double frac = p.kappa_opt_c1 / (p.kappa_opt * p.kappa_opt);
    return 16.0 * frac * frac * cs.g_om0 * cs.g_om0 * p.P_p * n_m;
}

inline double signal_power_single_pass(const SystemParams& p, const CouplingSet& cs, double n_m) {
    const double transit = cs.g_om0_sp * p.L_m / p.v_o();
    return transit * transit * p.P_p * n_m;
}

inline EnhancementRatio signal_enhancement_ratio(const SystemParams& p) {
    SystemParams q = p;
    if (q.P_p <= 0.0) q.P_p = 1.0;  // ratio is power-independent
    CouplingSet cs;
    cs.g_om0 = g_om0_cavity(q);
    cs.g_om0_sp = g_om0_single_pass(q);
    EnhancementRatio out;
    const double cav = signal_power_cavity(q, cs, 1.0);
    const double fs = signal_power_single_pass(q, cs, 1.0);
    if (fs <= 0.0) throw numeric_error("single-pass signal vanished; ratio undefined");
    out.direct = cav / fs;
    out.finesse = consts::pi * q.v_o() / (q.L_opt * q.kappa_opt);
    const double eta = q.kappa_opt_c1 / q.kappa_opt;
    out.formula = (16.0 / (consts::pi * consts::pi)) * eta * eta * out.finesse * out.finesse;
    return out;
}

} // namespace trires
