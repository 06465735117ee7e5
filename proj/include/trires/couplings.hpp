#pragma once

#include <cmath>
#include <vector>

#include "trires/constants.hpp"
#include "trires/errors.hpp"
#include "trires/params.hpp"

namespace trires {

// Brillouin phase-matching frequency 2 omega_p n v_m / c (angular).
inline double brillouin_frequency(const MaterialProps& m, double lambda_p) {
    if (lambda_p <= 0.0) throw validation_error("pump wavelength must be positive");
    if (m.n < 1.0) throw validation_error("material '" + m.name + "': refractive index not set");
    const double v = sound_velocity(m);
    return 4.0 * consts::pi * m.n * v / lambda_p;
}

inline double brillouin_frequency(const SystemParams& p) {
    return brillouin_frequency(p.material, p.lambda_p);
}

// Angular spacing of the longitudinal acoustic ladder, pi v_m / L_m
// (v_m / 2 L_m in ordinary frequency).
inline double mechanical_fsr(const SystemParams& p) {
    if (p.L_m <= 0.0) throw validation_error("acoustic cavity length must be positive");
    return consts::pi * p.v_m() / p.L_m;
}

// Nearest longitudinal mode number to the angular frequency omega; exact
// half-integer ties resolve to the odd neighbor (the piezo-active parity).
inline long longitudinal_index(double omega, double delta_m) {
    if (delta_m <= 0.0) throw validation_error("mode spacing must be positive");
    const double x = omega / delta_m;
    const double lo = std::floor(x);
    if (x - lo == 0.5) {
        const long l = static_cast<long>(lo);
        return (l % 2 != 0) ? l : l + 1;
    }
    return std::lround(x);
}

inline long longitudinal_index(const SystemParams& p) {
    if (p.Omega_m <= 0.0) throw validation_error("acoustic frequency not set");
    return longitudinal_index(p.Omega_m, mechanical_fsr(p));
}

struct AcousticMode {
    long index = 0;        // longitudinal mode number j
    double Omega = 0.0;    // j * mechanical FSR (angular)
    bool odd = false;
};

// `count` consecutive ladder modes centered on the mode nearest `center`.
inline std::vector<AcousticMode> acoustic_mode_ladder(const SystemParams& p,
                                                      double center, int count) {
    if (count < 1 || count % 2 == 0)
        throw validation_error("acoustic mode count must be a positive odd number");
    const double dm = mechanical_fsr(p);
    const long j0 = longitudinal_index(center, dm);
    std::vector<AcousticMode> out;
    out.reserve(static_cast<std::size_t>(count));
    const int half = (count - 1) / 2;
    for (int k = -half; k <= half; ++k) {
        const long j = j0 + k;
        if (j < 1)
            throw validation_error("acoustic ladder extends below the fundamental");
        out.push_back({j, static_cast<double>(j) * dm, (j % 2) != 0});
    }
    return out;
}

// sinc^2 suppression of the optomechanical overlap away from phase matching.
inline double phase_match_envelope(double Omega, double Omega_B, double delta_m) {
    if (delta_m <= 0.0) throw validation_error("mode spacing must be positive");
    const double s = sinc((Omega - Omega_B) / (4.0 * delta_m));
    return s * s;
}

// Acoustic wavelength at the operating frequency.
inline double lambda_m(const SystemParams& p) {
    if (p.Omega_m <= 0.0) throw validation_error("acoustic frequency not set");
    return consts::two_pi * p.v_m() / p.Omega_m;
}

// Wavelength of the ladder mode nearest the operating frequency, 2 L_m / j.
// The overlap integral is against the standing-wave mode shape, so this —
// not the free-running wavelength — sets the spatial period.
inline double lambda_mode(const SystemParams& p) {
    const long j = longitudinal_index(p);
    return 2.0 * p.L_m / static_cast<double>(j);
}

// Fraction of the full piezo-acoustic overlap realized by the transducer
// profile. Even-parity longitudinal modes have zero net overlap for
// symmetric profiles and return exactly zero.
inline double piezo_distribution_factor(const SystemParams& p) {
    if (p.t_pz <= 0.0) throw validation_error("piezo thickness not set");
    const double x = consts::pi * p.t_pz / lambda_mode(p);
    const bool odd = (longitudinal_index(p) % 2) != 0;
    switch (p.piezo_distribution) {
        case PiezoDistribution::bulk: {
            if (!odd) return 0.0;
            const double s = std::sin(x);
            return s * s;
        }
        case PiezoDistribution::surface_one_side:
            return x * x;
        case PiezoDistribution::surface_two_sides: {
            if (!odd) return 0.0;
            const double s = std::sin(x);
            return 2.0 * s * s;
        }
    }
    throw validation_error("unknown piezo distribution");
}

// Everything in g_em except the piezoelectric constant itself; used both for
// the forward rate and for extracting d33 from a calibrated rate.
inline double g_em_per_d33(const SystemParams& p) {
    if (p.E_sim <= 0.0) throw validation_error("simulated drive field E_sim not set");
    if (p.Omega_m <= 0.0) throw validation_error("acoustic frequency not set");
    if (p.material.c33 <= 0.0) throw validation_error("material stiffness not set");
    if (p.L_m <= 0.0) throw validation_error("acoustic cavity length must be positive");
    const double Am = p.A_m();
    const double lj = lambda_mode(p);
    const double root = std::sqrt(p.Omega_m * p.material.c33 * Am / (2.0 * consts::hbar * p.L_m));
    return p.E_sim * (lj / consts::pi) * root * piezo_distribution_factor(p);
}

// Electromechanical rate at unit microwave drive (angular rad/s).
inline double g_em_rate(const SystemParams& p) {
    return p.material.d33 * g_em_per_d33(p);
}

namespace detail {

inline double g_om0_prefactor(const SystemParams& p) {
    if (p.material.rho <= 0.0) throw validation_error("material density not set");
    if (p.Omega_m <= 0.0) throw validation_error("acoustic frequency not set");
    if (p.L_m <= 0.0) throw validation_error("acoustic cavity length must be positive");
    const double wp = p.omega_p();
    const double n = p.material.n;
    const double Am = p.A_m();
    const double zp = std::sqrt(2.0 * consts::hbar / (p.Omega_m * p.material.rho * Am * p.L_m));
    return (wp * wp * n * n * n * p.material.p13 / (8.0 * consts::c0)) * zp;
}

} // namespace detail

// Single-photon optomechanical rate for the composite cavity; the acoustic
// section fills only L_m of the optical length L_opt.
inline double g_om0_cavity(const SystemParams& p) {
    if (p.L_opt <= 0.0) throw validation_error("optical cavity length must be positive");
    return detail::g_om0_prefactor(p) * (p.L_m / p.L_opt);
}

// Same rate for a single pass through the bare crystal (no optical cavity).
inline double g_om0_single_pass(const SystemParams& p) {
    return detail::g_om0_prefactor(p);
}

// Steady-state intracavity photon number for a pump resonant with the lower
// mode, injected through port 1.
inline double intracavity_photons(const SystemParams& p) {
    if (p.P_p < 0.0) throw validation_error("pump power must be non-negative");
    if (p.P_p == 0.0) return 0.0;
    if (p.kappa_opt <= 0.0)
        throw validation_error("degenerate lossless resonator: kappa_opt must be positive");
    const double half = 0.5 * p.kappa_opt;
    return p.kappa_opt_c1 * (p.P_p / (consts::hbar * p.omega_p())) / (half * half);
}

// Photons present in the crystal during one pass of the pump beam.
inline double single_pass_photons(const SystemParams& p) {
    if (p.P_p < 0.0) throw validation_error("pump power must be non-negative");
    if (p.P_p == 0.0) return 0.0;
    if (p.L_m <= 0.0) throw validation_error("acoustic cavity length must be positive");
    return p.P_p * p.L_m / (consts::hbar * p.omega_p() * p.v_o());
}

// Single-photon electro-optic rate (angular).
inline double g_eo0_rate(const SystemParams& p) {
    if (p.E_sim <= 0.0) throw validation_error("simulated drive field E_sim not set");
    if (p.L_opt <= 0.0) throw validation_error("optical cavity length must be positive");
    const double n = p.material.n;
    const double eps1 = n * n;
    return 0.25 * eps1 * p.material.r13 * p.E_sim * p.omega_p() * (p.L_m / p.L_opt);
}

struct CouplingSet {
    double g_om0 = 0.0;     // single-photon optomechanical, cavity form
    double g_om = 0.0;      // pump-enhanced optomechanical
    double g_em = 0.0;      // electromechanical at unit drive
    double g_eo0 = 0.0;     // single-photon electro-optic
    double g_eo = 0.0;      // pump-enhanced electro-optic
    double N_p = 0.0;       // intracavity photon number
    double g_om0_sp = 0.0;  // single-pass single-photon rate
    double g_om_sp = 0.0;   // single-pass pump-enhanced rate
    double N_p_sp = 0.0;    // single-pass photon number
    double C_om = 0.0;
    double C_em = 0.0;
    double C_eo = 0.0;
    double C_sp = 0.0;      // single-pass optomechanical cooperativity
};

// Fill the cooperativities from the rates already present in `cs`.
inline void cooperativities(const SystemParams& p, CouplingSet& cs) {
    if (p.kappa_opt <= 0.0 || p.kappa_mu <= 0.0 || p.Gamma <= 0.0)
        throw validation_error("cooperativities require positive kappa_opt, kappa_mu, Gamma");
    cs.C_om = 4.0 * cs.g_om * cs.g_om / (p.kappa_opt * p.Gamma);
    cs.C_em = 4.0 * cs.g_em * cs.g_em / (p.kappa_mu * p.Gamma);
    cs.C_eo = 4.0 * cs.g_eo * cs.g_eo / (p.kappa_opt * p.kappa_mu);
    if (cs.g_om_sp != 0.0) {
        const double tau = p.L_m * p.material.n / consts::c0;  // single-pass transit time
        cs.C_sp = cs.g_om_sp * cs.g_om_sp * tau / p.Gamma;
    } else {
        cs.C_sp = 0.0;
    }
}

// Full rate set for the configured drive conditions.
inline CouplingSet compute_couplings(const SystemParams& p) {
    CouplingSet cs;
    cs.g_om0 = g_om0_cavity(p);
    cs.N_p = intracavity_photons(p);
    cs.g_om = std::sqrt(cs.N_p) * cs.g_om0;
    cs.g_em = g_em_rate(p);
    cs.g_eo0 = g_eo0_rate(p);
    cs.g_eo = std::sqrt(cs.N_p) * cs.g_eo0;
    cs.g_om0_sp = g_om0_single_pass(p);
    cs.N_p_sp = single_pass_photons(p);
    cs.g_om_sp = std::sqrt(cs.N_p_sp) * cs.g_om0_sp;
    cooperativities(p, cs);
    return cs;
}

} // namespace trires
