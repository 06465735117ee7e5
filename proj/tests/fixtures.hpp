#pragma once

// Canonical parameter sets used across the test suite. Values mirror the
// shipped config documents; rates are angular (rad/s) as everywhere inside
// the library.

#include "trires/constants.hpp"
#include "trires/params.hpp"

inline trires::SystemParams quartz_params() {
    using trires::consts::two_pi;
    trires::SystemParams p;
    p.material.name = "quartz_xcut";
    p.material.n = 1.528;
    p.material.rho = 2650.0;
    p.material.c33 = 86.6e9;
    p.material.d33 = 2.3e-12;
    p.material.p13 = 0.27;
    p.material.r13 = 0.45e-12;
    p.material.eps_r = 4.43;
    p.material.v_m = 5750.0;
    p.L_m = 0.5e-3;
    p.L_opt = 11.5e-3;
    p.r_opt = 50e-6;
    p.t_pz = 0.5e-3;
    p.piezo_distribution = trires::PiezoDistribution::bulk;
    p.kappa_opt = two_pi * 2.2e6;
    p.kappa_opt_c1 = two_pi * 0.7e6;
    p.kappa_opt_c2 = two_pi * 1.166e6;
    p.kappa_opt_i = two_pi * 0.334e6;
    p.kappa_mu = two_pi * 17.1e6;
    p.kappa_mu_c = two_pi * 7.33e6;
    p.kappa_mu_i = two_pi * 9.77e6;
    p.Gamma = two_pi * 0.5e6;
    p.Omega_mu = two_pi * 11.366e9;
    p.Omega_m = two_pi * 11.366e9;
    p.Delta_opt = two_pi * 11.366e9;
    p.lambda_p = 1546.4e-9;
    p.E_sim = 1.1314e-3;
    p.P_p = 0.0238;
    p.P_mu = 1e-3;
    p.T_bath = 9.0;
    return p;
}

inline trires::SystemParams caf2_params() {
    using trires::consts::two_pi;
    trires::SystemParams p;
    p.material.name = "caf2";
    p.material.n = 1.43;
    p.material.rho = 3180.0;
    p.material.c33 = 165e9;
    p.material.d33 = 0.0;
    p.material.p13 = 0.226;
    p.material.r13 = 0.0;
    p.material.eps_r = 6.47;
    p.material.v_m = 7221.0;
    p.L_m = 0.5e-3;
    p.L_opt = 11.5e-3;
    p.r_opt = 50e-6;
    p.A_m_explicit = 2.0 * trires::consts::pi * 64e-6 * 64e-6;
    p.t_pz = 0.5e-3;
    p.piezo_distribution = trires::PiezoDistribution::bulk;
    p.kappa_opt = two_pi * 2.1e6;
    p.kappa_opt_c1 = two_pi * 0.598e6;
    p.kappa_opt_c2 = 0.0;
    p.kappa_opt_i = two_pi * 1.502e6;
    p.kappa_mu = two_pi * 22.4e6;
    p.kappa_mu_c = two_pi * 10.9e6;
    p.kappa_mu_i = two_pi * 11.5e6;
    p.Gamma = two_pi * 535e3;
    p.Omega_mu = two_pi * 13.354e9;
    p.Omega_m = two_pi * 13.354e9;
    p.Delta_opt = two_pi * 13.354e9;
    p.lambda_p = 1546.4e-9;
    p.E_sim = 1.02e-3;
    p.P_p = 0.023;
    p.P_mu = 0.1;
    p.T_bath = 8.7;
    return p;
}
