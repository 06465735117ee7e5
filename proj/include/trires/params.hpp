#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "trires/constants.hpp"
#include "trires/errors.hpp"
#include "trires/materials.hpp"

namespace trires {

enum class PiezoDistribution { bulk, surface_one_side, surface_two_sides };

inline std::string to_string(PiezoDistribution d) {
    switch (d) {
        case PiezoDistribution::bulk:              return "bulk";
        case PiezoDistribution::surface_one_side:  return "surface_one_side";
        case PiezoDistribution::surface_two_sides: return "surface_two_sides";
    }
    return "?";
}

inline PiezoDistribution piezo_distribution_from_string(const std::string& s) {
    const std::string k = detail::lower(detail::trim(s));
    if (k == "bulk")              return PiezoDistribution::bulk;
    if (k == "surface_one_side")  return PiezoDistribution::surface_one_side;
    if (k == "surface_two_sides") return PiezoDistribution::surface_two_sides;
    throw validation_error("unknown piezo distribution '" + s + "'");
}

// One triply resonant device: geometry, loss rates, operating frequencies,
// drive conditions. Frequencies and rates are angular (rad/s); lengths are
// meters; powers are watts.
struct SystemParams {
    MaterialProps material;

    // geometry
    double L_m   = 0.0;   // acoustic cavity length
    double L_opt = 0.0;   // optical cavity length
    double r_opt = 0.0;   // optical mode waist radius
    std::optional<double> A_m_explicit;  // acoustic mode area override
    double t_pz  = 0.0;   // piezoelectrically active thickness
    PiezoDistribution piezo_distribution = PiezoDistribution::bulk;

    // loss rates (angular)
    double kappa_opt    = 0.0;
    double kappa_opt_c1 = 0.0;  // pump port
    double kappa_opt_c2 = 0.0;  // output port
    double kappa_opt_i  = 0.0;
    double kappa_mu     = 0.0;
    double kappa_mu_c   = 0.0;
    double kappa_mu_i   = 0.0;
    double Gamma        = 0.0;

    // operating frequencies (angular)
    double Omega_mu  = 0.0;
    double Omega_m   = 0.0;
    double Delta_opt = 0.0;  // pump-cavity detuning of the upper optical mode
    double lambda_p  = 0.0;  // pump wavelength, m

    // drive
    double E_sim = 0.0;   // simulated microwave field amplitude at unit drive, V/m
    double P_p   = 0.0;   // pump optical power, W
    double P_mu  = 0.0;   // microwave drive power, W
    double T_bath = 0.0;  // K

    double omega_p() const {
        if (lambda_p <= 0.0) throw validation_error("pump wavelength not set");
        return consts::two_pi * consts::c0 / lambda_p;
    }
    // Acoustic waist is 1/sqrt(2) of the optical waist (intensity-driven).
    double r_m() const {
        if (r_opt <= 0.0) throw validation_error("optical waist not set");
        return r_opt / std::sqrt(2.0);
    }
    double A_m() const {
        if (A_m_explicit) return *A_m_explicit;
        const double rm = r_m();
        return consts::pi * rm * rm;
    }
    // The simulation field E_sim refers to the standing-wave antinode;
    // the traveling-wave amplitude entering overlap integrals is half.
    double E_0() const { return 0.5 * E_sim; }
    double v_m() const { return sound_velocity(material); }
    double v_o() const {
        if (material.n < 1.0) throw validation_error("material refractive index not set");
        return consts::c0 / material.n;
    }
};

inline std::vector<std::string> validate(const SystemParams& p) {
    std::vector<std::string> warnings = validate(p.material);
    auto nonneg = [](double v, const char* what) {
        if (v < 0.0) throw validation_error(std::string(what) + " must be non-negative");
    };
    nonneg(p.kappa_opt, "kappa_opt");
    nonneg(p.kappa_opt_c1, "kappa_opt_c1");
    nonneg(p.kappa_opt_c2, "kappa_opt_c2");
    nonneg(p.kappa_opt_i, "kappa_opt_i");
    nonneg(p.kappa_mu, "kappa_mu");
    nonneg(p.kappa_mu_c, "kappa_mu_c");
    nonneg(p.kappa_mu_i, "kappa_mu_i");
    nonneg(p.Gamma, "Gamma");
    nonneg(p.P_p, "pump power");
    nonneg(p.P_mu, "microwave power");
    nonneg(p.T_bath, "bath temperature");
    if (p.L_m < 0.0 || p.L_opt < 0.0)
        throw validation_error("cavity lengths must be non-negative");
    if (p.L_m > 0.0 && p.L_opt > 0.0 && p.L_m > p.L_opt)
        throw validation_error("acoustic length exceeds optical cavity length");
    if (p.t_pz < 0.0)
        throw validation_error("piezo thickness must be non-negative");
    if (p.t_pz > 0.0 && p.L_m > 0.0 && p.t_pz > p.L_m + 1e-15 * p.L_m)
        throw validation_error("piezo thickness exceeds acoustic cavity length");
    if (p.A_m_explicit && *p.A_m_explicit <= 0.0)
        throw validation_error("acoustic mode area must be positive");

    const double opt_sum = p.kappa_opt_c1 + p.kappa_opt_c2 + p.kappa_opt_i;
    if (opt_sum > 0.0 && p.kappa_opt > 0.0 &&
        std::abs(opt_sum - p.kappa_opt) > 1e-9 * p.kappa_opt)
        throw validation_error("optical loss components do not sum to kappa_opt");
    const double mu_sum = p.kappa_mu_c + p.kappa_mu_i;
    if (p.kappa_mu_c > 0.0 && p.kappa_mu_i > 0.0 && p.kappa_mu > 0.0 &&
        std::abs(mu_sum - p.kappa_mu) > 1e-9 * p.kappa_mu)
        throw validation_error("microwave loss components do not sum to kappa_mu");
    if (p.kappa_opt_c1 > p.kappa_opt && p.kappa_opt > 0.0)
        throw validation_error("kappa_opt_c1 exceeds kappa_opt");
    if (p.kappa_mu_c > p.kappa_mu && p.kappa_mu > 0.0)
        throw validation_error("kappa_mu_c exceeds kappa_mu");
    return warnings;
}

} // namespace trires
