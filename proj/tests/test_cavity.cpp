#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "trires/cavity.hpp"

using namespace trires;
using Catch::Approx;

namespace {

CavityStack quartz_stack(double n_inner = 1.528) {
    CavityStack s;
    s.segments = {{1.0, 5.5e-3}, {n_inner, 0.5e-3}, {1.0, 5.5e-3}};
    s.mirror_R = 0.999;
    s.piezo_travel = 500e-9;
    return s;
}

constexpr double kF0 = consts::c0 / 1546.4e-9;
const double kBandLo = consts::two_pi * (kF0 - 45e9);
const double kBandHi = consts::two_pi * (kF0 + 45e9);

double peak_to_peak(const std::vector<ModeSpacing>& sp) {
    double mn = sp.front().spacing, mx = mn;
    for (const auto& m : sp) {
        mn = std::min(mn, m.spacing);
        mx = std::max(mx, m.spacing);
    }
    return mx - mn;
}

} // namespace

TEST_CASE("transfer matrices conserve energy for matched lossless stacks") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> un(1.0, 2.5);
    std::uniform_real_distribution<double> uL(0.1e-3, 5e-3);
    std::uniform_real_distribution<double> uR(0.9, 0.9999);
    std::uniform_real_distribution<double> uf(kF0 - 40e9, kF0 + 40e9);
    std::uniform_int_distribution<int> useg(0, 3);
    for (int draw = 0; draw < 50; ++draw) {
        CavityStack s;
        s.mirror_R = uR(rng);
        s.segments.push_back({1.0, uL(rng)});
        const int inner = useg(rng);
        for (int k = 0; k < inner; ++k) s.segments.push_back({un(rng), uL(rng)});
        s.segments.push_back({1.0, uL(rng)});
        const auto resp = cavity_response(s, consts::two_pi * uf(rng));
        CHECK(std::norm(resp.t) + std::norm(resp.r) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("uniform cavity reproduces c/2L exactly") {
    CavityStack s;
    s.segments = {{1.0, 11.5e-3}};
    s.mirror_R = 0.999;
    const auto sp = mode_spacings(s, kBandLo, kBandHi, consts::two_pi * 1.0);
    REQUIRE(sp.size() >= 4);
    const double expected = consts::two_pi * consts::c0 / (2.0 * 11.5e-3);
    for (const auto& m : sp)
        CHECK(m.spacing == Approx(expected).epsilon(1e-9));
}

TEST_CASE("dielectric stack modulates the free spectral range") {
    const auto sp = mode_spacings(quartz_stack(), kBandLo, kBandHi, consts::two_pi * 1.0);
    REQUIRE(sp.size() == 6);  // seven modes in the 90 GHz band
    double mean = 0.0;
    for (const auto& m : sp) mean += m.spacing;
    mean /= static_cast<double>(sp.size());
    CHECK(mean / consts::two_pi == Approx(12.4029e9).epsilon(1e-3));
    CHECK(peak_to_peak(sp) / consts::two_pi == Approx(4.7875e9).epsilon(1e-3));
    // wavelengths are reported for the lower-frequency mode of each pair
    for (std::size_t k = 0; k + 1 < sp.size(); ++k)
        CHECK(sp[k].lambda > sp[k + 1].lambda);
}

TEST_CASE("modulation amplitude grows with the internal index contrast") {
    double prev = -1.0;
    for (const double n : {1.0, 1.2, 1.528, 2.0}) {
        const auto sp = mode_spacings(quartz_stack(n), kBandLo, kBandHi, consts::two_pi * 1.0);
        REQUIRE(sp.size() >= 4);
        const double pkpk = peak_to_peak(sp);
        CHECK(pkpk >= prev);
        prev = pkpk;
    }
    const auto sp12 = mode_spacings(quartz_stack(1.2), kBandLo, kBandHi, consts::two_pi * 1.0);
    CHECK(peak_to_peak(sp12) / consts::two_pi == Approx(1.1035e9).epsilon(2e-3));
    const auto sp20 = mode_spacings(quartz_stack(2.0), kBandLo, kBandHi, consts::two_pi * 1.0);
    CHECK(peak_to_peak(sp20) / consts::two_pi == Approx(10.2499e9).epsilon(2e-3));
}

TEST_CASE("match_fsr returns zero displacement when the first-scanned pair already matches") {
    // the wavelength-ascending scan visits the highest-frequency pair first,
    // so a target equal to its rest spacing must come back untuned
    const auto s = quartz_stack();
    const auto sp = mode_spacings(s, kBandLo, kBandHi);
    REQUIRE(sp.size() >= 3);
    const double target = sp.back().spacing;
    const auto m = match_fsr(s, target, consts::two_pi * 1e6, kBandLo, kBandHi);
    REQUIRE(m.has_value());
    CHECK(m->displacement == 0.0);
    CHECK(m->lambda == sp.back().lambda);
    CHECK(std::abs(m->achieved - target) <= consts::two_pi * 1e6);
}

TEST_CASE("match_fsr reaches the acoustic frequency within the piezo travel") {
    const auto s = quartz_stack();
    const auto m = match_fsr(s, consts::two_pi * 11.366e9, consts::two_pi * 2e6,
                             kBandLo, kBandHi);
    REQUIRE(m.has_value());
    CHECK(m->displacement >= 0.0);
    CHECK(m->displacement <= 500e-9);
    CHECK(std::abs(m->achieved - consts::two_pi * 11.366e9) <= consts::two_pi * 2e6);
}

TEST_CASE("match_fsr reports no match for unreachable targets") {
    const auto s = quartz_stack();
    CHECK_FALSE(match_fsr(s, consts::two_pi * 40e9, consts::two_pi * 2e6,
                          kBandLo, kBandHi).has_value());
}

TEST_CASE("stack validation and helpers") {
    CavityStack s = quartz_stack();
    CHECK(optical_path_length(s) == Approx(5.5e-3 + 1.528 * 0.5e-3 + 5.5e-3).epsilon(1e-15));
    const auto moved = displaced(s, 100e-9);
    CHECK(moved.segments.back().L == Approx(5.5e-3 + 100e-9).epsilon(1e-15));
    CHECK_THROWS_AS(displaced(s, -6e-3), validation_error);

    CavityStack bad = s;
    bad.segments[1].n = 0.5;
    CHECK_THROWS_AS(validate(bad), validation_error);
    bad = s;
    bad.mirror_R = 1.0;
    CHECK_THROWS_AS(validate(bad), validation_error);
    bad = s;
    bad.segments.clear();
    CHECK_THROWS_AS(validate(bad), validation_error);
    CHECK_THROWS_AS(resonances(s, kBandHi, kBandLo), validation_error);
}
