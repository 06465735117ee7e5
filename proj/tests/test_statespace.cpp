#include <catch2/catch_amalgamated.hpp>

#include "trires/couplings.hpp"
#include "trires/statespace.hpp"
#include "fixtures.hpp"

using namespace trires;
using Catch::Approx;

namespace {

// Quoted quartz operating rates (angular).
struct Quoted {
    double kappa_opt = consts::two_pi * 2.2e6;
    double kappa_c1 = consts::two_pi * 0.7e6;
    double kappa_c2 = consts::two_pi * 1.166e6;
    double kappa_mu = consts::two_pi * 17.1e6;
    double kappa_mu_c = consts::two_pi * 7.33e6;
    double Gamma = consts::two_pi * 0.5e6;
    double Omega = consts::two_pi * 11.366e9;
    double g_om = consts::two_pi * 643e3;
    double g_em = consts::two_pi * 347.0;
    double g_eo = consts::two_pi * 162.0;
};

StateSpaceModel quoted_model(const Quoted& q, double kappa_ext, double g_om, double g_em,
                             double g_eo) {
    return build_model(q.Omega, q.kappa_opt, kappa_ext, q.Omega, q.kappa_mu, q.kappa_mu_c,
                       {{1977, q.Omega, q.Gamma, g_om, g_em}}, g_eo);
}

} // namespace

TEST_CASE("matrix scattering matches the closed-form efficiency") {
    const Quoted q;
    const auto m = quoted_model(q, q.kappa_c2, q.g_om, q.g_em, q.g_eo);
    const double C_om = 4.0 * q.g_om * q.g_om / (q.kappa_opt * q.Gamma);
    const double C_em = 4.0 * q.g_em * q.g_em / (q.kappa_mu * q.Gamma);
    const double C_eo = 4.0 * q.g_eo * q.g_eo / (q.kappa_opt * q.kappa_mu);
    const auto grid = linspace(q.Omega - consts::two_pi * 8e6, q.Omega + consts::two_pi * 8e6, 257);
    for (const double w : grid) {
        const double matrix = std::norm(scattering(m, w)(0, 1));
        const double closed = closed_form_eta(w, C_om, C_em, C_eo, q.kappa_opt, q.kappa_mu,
                                              q.Gamma, q.Omega, q.Omega, q.Omega,
                                              m.eta_opt(), m.eta_mu());
        CHECK(matrix == Approx(closed).epsilon(1e-12).margin(1e-300));
    }
}

TEST_CASE("transduction is reciprocal: S_oe equals S_eo") {
    const Quoted q;
    const auto m = quoted_model(q, q.kappa_c2, q.g_om, q.g_em, q.g_eo);
    for (const double off : {-3e6, 0.0, 1e6, 5e6}) {
        const auto S = scattering(m, q.Omega + consts::two_pi * off);
        CHECK(std::abs(S(0, 1) - S(1, 0)) <= 1e-15 * std::abs(S(0, 1)) + 1e-300);
    }
}

TEST_CASE("resonant reflection reproduces the OMIT depth formula") {
    const Quoted q;
    const auto m = quoted_model(q, q.kappa_c1, q.g_om, 0.0, 0.0);
    const double C_om = 4.0 * q.g_om * q.g_om / (q.kappa_opt * q.Gamma);
    const std::complex<double> S00 = scattering(m, q.Omega)(0, 0);
    const double expected = q.kappa_c1 / (0.5 * q.kappa_opt) / (1.0 + C_om) - 1.0;
    CHECK(S00.real() == Approx(expected).epsilon(1e-9));
    CHECK(std::abs(S00.imag()) < 1e-9);
}

TEST_CASE("peak conversion matches the quoted maximum") {
    const Quoted q;
    // C_om = 1.53 at the transduction operating point
    const double g_om = 0.5 * std::sqrt(1.53 * q.kappa_opt * q.Gamma);
    const auto m = quoted_model(q, q.kappa_c2, g_om, q.g_em, q.g_eo);
    const double eta = std::norm(scattering(m, q.Omega)(0, 1));
    CHECK(eta == Approx(1.2632e-8).epsilon(1e-3));
    const double C_em = 4.0 * q.g_em * q.g_em / (q.kappa_mu * q.Gamma);
    const double C_eo = 4.0 * q.g_eo * q.g_eo / (q.kappa_opt * q.kappa_mu);
    CHECK(eta == Approx(closed_form_eta_peak(1.53, C_em, C_eo, m.eta_opt(), m.eta_mu()))
                     .epsilon(1e-9));
}

TEST_CASE("strong coupling hybridizes the optical and acoustic modes") {
    const Quoted q;
    const double g = consts::two_pi * 1.4e6;
    const auto m = quoted_model(q, q.kappa_c1, g, 0.0, 0.0);
    const auto modes = eigenmodes(m);
    REQUIRE(modes.size() == 3);
    // the two hybrid branches sit around Omega with near-equal weights
    std::vector<std::pair<double, Eigen::VectorXd>> hybrids;
    for (const auto& em : modes) {
        if (em.weight(1) > 0.5) continue;  // microwave mode, untouched
        hybrids.emplace_back(-em.lambda.imag(), em.weight);
    }
    REQUIRE(hybrids.size() == 2);
    const double split = std::abs(hybrids[0].first - hybrids[1].first);
    const double quarter = 0.25 * (q.kappa_opt - q.Gamma);
    const double analytic = 2.0 * std::sqrt(g * g - quarter * quarter);
    CHECK(split == Approx(analytic).epsilon(1e-9));
    for (const auto& [freq, w] : hybrids) {
        CHECK(w(0) == Approx(0.5).margin(0.1));
        CHECK(w(2) == Approx(0.5).margin(0.1));
    }
}

TEST_CASE("parameter-driven build wires ports, ladder, and parity") {
    const auto p = quartz_params();
    CouplingSet cs;
    cs.g_om = consts::two_pi * 643e3;
    cs.g_em = consts::two_pi * 347.0;
    cs.g_eo = consts::two_pi * 162.0;
    cooperativities(p, cs);

    const auto m1 = build(p, cs, 1, OpticalPort::port1);
    CHECK(m1.kappa_opt_ext == Approx(p.kappa_opt_c1).epsilon(1e-15));
    const auto m2 = build(p, cs, 1, OpticalPort::port2);
    CHECK(m2.kappa_opt_ext == Approx(p.kappa_opt_c2).epsilon(1e-15));
    const auto ml = build(p, cs, 1, OpticalPort::lumped);
    CHECK(ml.kappa_opt_ext == Approx(p.kappa_opt_c1 + p.kappa_opt_c2).epsilon(1e-15));
    CHECK(m2.eta_opt() == Approx(1.166 / 2.2).epsilon(1e-12));
    CHECK(m2.eta_mu() == Approx(7.33 / 17.1).epsilon(1e-12));

    const auto m5 = build(p, cs, 5, OpticalPort::port2);
    REQUIRE(m5.dim() == 7);
    REQUIRE(m5.g_om.size() == 5);
    const double OmegaB = brillouin_frequency(p);
    const double dm = mechanical_fsr(p);
    const double env0 = sinc((m5.modes[4].Omega - OmegaB) / (4.0 * dm));
    for (int k = 0; k < 5; ++k) {
        const long j = m5.acoustic_index[static_cast<std::size_t>(k)];
        CHECK(j == 1975 + k);
        const double env = sinc((m5.modes[static_cast<std::size_t>(2 + k)].Omega - OmegaB) /
                                (4.0 * dm));
        CHECK(m5.g_om[static_cast<std::size_t>(k)] ==
              Approx(cs.g_om * env / env0).epsilon(1e-12));
        if (j % 2 == 0)
            CHECK(m5.g_em[static_cast<std::size_t>(k)] == 0.0);
        else
            CHECK(m5.g_em[static_cast<std::size_t>(k)] == Approx(cs.g_em).epsilon(1e-15));
    }
    // center mode keeps the measured g_om exactly
    CHECK(m5.g_om[2] == Approx(cs.g_om).epsilon(1e-15));

    CHECK_THROWS_AS(build(p, cs, 2, OpticalPort::port1), validation_error);
}

TEST_CASE("omit spectrum normalizes to the off-resonant baseline") {
    const Quoted q;
    const auto m = quoted_model(q, q.kappa_c1, q.g_om, 0.0, 0.0);
    const auto grid = linspace(q.Omega - 20.0 * q.kappa_opt, q.Omega + 20.0 * q.kappa_opt, 801);
    const auto s = omit_spectrum(m, grid);
    CHECK(s.kind == SpectrumKind::omit);
    CHECK(s.power.front() == Approx(1.0).margin(0.02));
    CHECK(s.power.back() == Approx(1.0).margin(0.02));
    CHECK(s.metadata.count("baseline_raw_power") == 1);
    CHECK(s.metadata.at("normalization") == "edge_baseline");
    CHECK(s.metadata.count("warning") == 0);

    const auto narrow = linspace(q.Omega - q.kappa_opt, q.Omega + q.kappa_opt, 64);
    CHECK(omit_spectrum(m, narrow).metadata.count("warning") == 1);
}

TEST_CASE("model construction rejects inconsistent rates") {
    const Quoted q;
    CHECK_THROWS_AS(build_model(q.Omega, q.kappa_opt, 1.5 * q.kappa_opt, q.Omega, q.kappa_mu,
                                q.kappa_mu_c, {{1, q.Omega, q.Gamma, 0.0, 0.0}}, 0.0),
                    validation_error);
    CHECK_THROWS_AS(build_model(q.Omega, q.kappa_opt, q.kappa_c1, q.Omega, q.kappa_mu,
                                q.kappa_mu_c, {{1, q.Omega, 0.0, 0.0, 0.0}}, 0.0),
                    validation_error);
    CHECK_THROWS_AS(build_model(q.Omega, q.kappa_opt, q.kappa_c1, q.Omega, q.kappa_mu,
                                q.kappa_mu_c, {}, 0.0),
                    validation_error);
}
