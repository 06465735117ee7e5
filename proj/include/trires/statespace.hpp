#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "trires/constants.hpp"
#include "trires/couplings.hpp"
#include "trires/errors.hpp"
#include "trires/params.hpp"
#include "trires/spectrum.hpp"

namespace trires {

// Which physical optical coupler feeds the scattering port: the pump input
// mirror, the output mirror, or both lumped together.
enum class OpticalPort { port1, port2, lumped };

inline std::string to_string(OpticalPort p) {
    switch (p) {
        case OpticalPort::port1:  return "port1";
        case OpticalPort::port2:  return "port2";
        case OpticalPort::lumped: return "lumped";
    }
    return "?";
}

inline OpticalPort optical_port_from_string(const std::string& s) {
    if (s == "port1")  return OpticalPort::port1;
    if (s == "port2")  return OpticalPort::port2;
    if (s == "lumped") return OpticalPort::lumped;
    throw validation_error("unknown optical port '" + s + "'");
}

struct ModeEntry {
    double Omega = 0.0;  // resonance in the rotating frame (angular)
    double loss = 0.0;   // total energy decay rate (angular)
};

// Linearized beam-splitter model around a strong red-detuned pump. State
// order: [optical anti-Stokes, microwave, acoustic...]; two scattering
// channels (optical, microwave).
struct StateSpaceModel {
    std::vector<ModeEntry> modes;
    std::vector<long> acoustic_index;  // ladder mode numbers, one per acoustic entry
    std::vector<double> g_om;          // per acoustic mode
    std::vector<double> g_em;          // per acoustic mode
    double g_eo = 0.0;
    double kappa_opt_ext = 0.0;
    double kappa_mu_ext = 0.0;
    Eigen::MatrixXcd A;
    Eigen::MatrixXd B;

    int dim() const { return static_cast<int>(modes.size()); }
    double eta_opt() const { return kappa_opt_ext / modes[0].loss; }
    double eta_mu() const { return kappa_mu_ext / modes[1].loss; }
};

// Assemble the dynamical matrix from explicit per-mode rates. The acoustic
// list supplies (Omega_j, Gamma_j, g_om_j, g_em_j) per retained mode.
struct AcousticModeSpec {
    long index = 0;
    double Omega = 0.0;
    double Gamma = 0.0;
    double g_om = 0.0;
    double g_em = 0.0;
};

inline StateSpaceModel build_model(double Delta_opt, double kappa_opt, double kappa_opt_ext,
                                   double Omega_mu, double kappa_mu, double kappa_mu_ext,
                                   const std::vector<AcousticModeSpec>& acoustic,
                                   double g_eo) {
    if (acoustic.empty())
        throw validation_error("state-space model needs at least one acoustic mode");
    if (kappa_opt <= 0.0 || kappa_mu <= 0.0)
        throw validation_error("state-space model requires positive total losses");
    if (kappa_opt_ext < 0.0 || kappa_opt_ext > kappa_opt ||
        kappa_mu_ext < 0.0 || kappa_mu_ext > kappa_mu)
        throw validation_error("external coupling must lie within the total loss");

    StateSpaceModel m;
    const int N = static_cast<int>(acoustic.size());
    const int dim = 2 + N;
    m.modes.push_back({Delta_opt, kappa_opt});
    m.modes.push_back({Omega_mu, kappa_mu});
    m.g_eo = g_eo;
    m.kappa_opt_ext = kappa_opt_ext;
    m.kappa_mu_ext = kappa_mu_ext;

    m.A = Eigen::MatrixXcd::Zero(dim, dim);
    const std::complex<double> I(0.0, 1.0);
    m.A(0, 0) = -I * Delta_opt - 0.5 * kappa_opt;
    m.A(1, 1) = -I * Omega_mu - 0.5 * kappa_mu;
    m.A(0, 1) = m.A(1, 0) = I * g_eo;
    for (int k = 0; k < N; ++k) {
        const auto& a = acoustic[static_cast<std::size_t>(k)];
        if (a.Gamma <= 0.0)
            throw validation_error("acoustic modes require positive damping");
        m.modes.push_back({a.Omega, a.Gamma});
        m.acoustic_index.push_back(a.index);
        m.g_om.push_back(a.g_om);
        m.g_em.push_back(a.g_em);
        m.A(2 + k, 2 + k) = -I * a.Omega - 0.5 * a.Gamma;
        m.A(0, 2 + k) = m.A(2 + k, 0) = I * a.g_om;
        m.A(1, 2 + k) = m.A(2 + k, 1) = I * a.g_em;
    }

    m.B = Eigen::MatrixXd::Zero(dim, 2);
    m.B(0, 0) = std::sqrt(kappa_opt_ext);
    m.B(1, 1) = std::sqrt(kappa_mu_ext);
    return m;
}

// Build from a parameter set: the retained acoustic ladder is centered on the
// operating mode; neighbor optomechanical rates are scaled by the
// phase-match envelope relative to the center mode, and piezo rates follow
// the parity rule.
inline StateSpaceModel build(const SystemParams& p, const CouplingSet& cs,
                             int n_acoustic = 1, OpticalPort port = OpticalPort::port1) {
    if (n_acoustic < 1 || n_acoustic % 2 == 0)
        throw validation_error("acoustic mode count must be a positive odd number");
    double kext = 0.0;
    switch (port) {
        case OpticalPort::port1:  kext = p.kappa_opt_c1; break;
        case OpticalPort::port2:  kext = p.kappa_opt_c2; break;
        case OpticalPort::lumped: kext = p.kappa_opt_c1 + p.kappa_opt_c2; break;
    }
    const long j0 = longitudinal_index(p);
    const double OmegaB = brillouin_frequency(p);
    const double dm = mechanical_fsr(p);
    const int half = (n_acoustic - 1) / 2;
    if (j0 - half < 1)
        throw validation_error("acoustic ladder extends below the fundamental");
    const double env0 = sinc((p.Omega_m - OmegaB) / (4.0 * dm));
    std::vector<AcousticModeSpec> acoustic;
    acoustic.reserve(static_cast<std::size_t>(n_acoustic));
    for (int k = -half; k <= half; ++k) {
        AcousticModeSpec a;
        a.index = j0 + k;
        // the measured operating frequency anchors the ladder; neighbors sit at
        // FSR offsets from it rather than at ideal multiples of the FSR
        a.Omega = p.Omega_m + k * dm;
        a.Gamma = p.Gamma;
        const double env = sinc((a.Omega - OmegaB) / (4.0 * dm));
        // measured g_om refers to the operating mode; neighbors scale relative to it
        a.g_om = (std::abs(env0) > 1e-12) ? cs.g_om * (env / env0) : cs.g_om * env;
        // even-parity neighbors are piezo-dark; the operating mode keeps the
        // measured rate regardless of parity
        const bool odd = ((j0 + k) % 2) != 0;
        a.g_em = (odd || k == 0) ? cs.g_em : 0.0;
        acoustic.push_back(a);
    }
    return build_model(p.Delta_opt, p.kappa_opt, kext,
                       p.Omega_mu, p.kappa_mu, p.kappa_mu_c,
                       acoustic, cs.g_eo);
}

// Two-port scattering matrix at angular probe frequency omega; channel order
// (optical, microwave). S = B^T (-i w I - A)^{-1} B - I.
inline Eigen::Matrix2cd scattering(const StateSpaceModel& m, double omega) {
    const int dim = m.dim();
    Eigen::MatrixXcd M = -m.A;
    const std::complex<double> iw(0.0, omega);
    for (int k = 0; k < dim; ++k) M(k, k) -= iw;
    const Eigen::MatrixXcd X = M.partialPivLu().solve(m.B.cast<std::complex<double>>());
    Eigen::Matrix2cd S = (m.B.transpose().cast<std::complex<double>>() * X)
                         - Eigen::Matrix2cd::Identity();
    if (!S.allFinite())
        throw numeric_error("scattering solve produced non-finite values (lossless singularity?)");
    return S;
}

namespace detail {

inline void stamp_common_metadata(Spectrum& s, const StateSpaceModel& m) {
    std::ostringstream os;
    os.precision(17);
    os << m.dim() - 2;
    s.metadata["n_acoustic"] = os.str();
    auto put = [&s](const char* key, double v) {
        std::ostringstream o;
        o.precision(17);
        o << v;
        s.metadata[key] = o.str();
    };
    put("kappa_opt_ext_rad_s", m.kappa_opt_ext);
    put("kappa_mu_ext_rad_s", m.kappa_mu_ext);
    put("eta_opt", m.eta_opt());
    put("eta_mu", m.eta_mu());
}

} // namespace detail

// Bidirectional transduction response; kind selects microwave-to-optical
// (moc) or optical-to-microwave (om). Power is photon-number conversion
// efficiency including both extraction efficiencies.
inline Spectrum transduction_spectrum(const StateSpaceModel& m,
                                      const std::vector<double>& grid,
                                      SpectrumKind kind = SpectrumKind::moc) {
    if (kind != SpectrumKind::moc && kind != SpectrumKind::om)
        throw validation_error("transduction spectrum kind must be moc or om");
    Spectrum s;
    s.kind = kind;
    s.freq = grid;
    s.amplitude.reserve(grid.size());
    s.power.reserve(grid.size());
    for (const double w : grid) {
        const Eigen::Matrix2cd S = scattering(m, w);
        const std::complex<double> a = (kind == SpectrumKind::moc) ? S(0, 1) : S(1, 0);
        s.amplitude.push_back(a);
        s.power.push_back(std::norm(a));
    }
    detail::stamp_common_metadata(s, m);
    validate(s);
    return s;
}

// Optical reflection |S_oo|^2 normalized to its off-resonant baseline (mean
// of the first and last 5% of grid points). Raw power is baseline * power.
inline Spectrum omit_spectrum(const StateSpaceModel& m, const std::vector<double>& grid) {
    Spectrum s;
    s.kind = SpectrumKind::omit;
    s.freq = grid;
    s.amplitude.reserve(grid.size());
    s.power.reserve(grid.size());
    for (const double w : grid) {
        const Eigen::Matrix2cd S = scattering(m, w);
        s.amplitude.push_back(S(0, 0));
        s.power.push_back(std::norm(S(0, 0)));
    }
    const std::size_t n = grid.size();
    std::size_t edge = n / 20;
    if (edge == 0) edge = 1;
    double baseline = 0.0;
    for (std::size_t i = 0; i < edge; ++i)
        baseline += s.power[i] + s.power[n - 1 - i];
    baseline /= static_cast<double>(2 * edge);
    if (baseline <= 0.0)
        throw numeric_error("degenerate baseline in reflection normalization");
    for (double& v : s.power) v /= baseline;
    detail::stamp_common_metadata(s, m);
    {
        std::ostringstream os;
        os.precision(17);
        os << baseline;
        s.metadata["baseline_raw_power"] = os.str();
    }
    s.metadata["normalization"] = "edge_baseline";
    const double span = grid.back() - grid.front();
    if (span < 10.0 * m.modes[0].loss)
        s.metadata["warning"] = "grid span below 10 kappa_opt; baseline estimate may be biased";
    validate(s);
    return s;
}

// Microwave reflection |S_ee|^2, unnormalized.
inline Spectrum reflection_spectrum(const StateSpaceModel& m, const std::vector<double>& grid) {
    Spectrum s;
    s.kind = SpectrumKind::reflection;
    s.freq = grid;
    s.amplitude.reserve(grid.size());
    s.power.reserve(grid.size());
    for (const double w : grid) {
        const Eigen::Matrix2cd S = scattering(m, w);
        s.amplitude.push_back(S(1, 1));
        s.power.push_back(std::norm(S(1, 1)));
    }
    detail::stamp_common_metadata(s, m);
    validate(s);
    return s;
}

// Closed-form photon conversion efficiency of the three-mode model.
inline double closed_form_eta(double omega,
                              double C_om, double C_em, double C_eo,
                              double kappa_opt, double kappa_mu, double Gamma,
                              double Delta_opt, double Omega_mu, double Omega_m,
                              double eta_opt, double eta_mu) {
    if (kappa_opt <= 0.0 || kappa_mu <= 0.0 || Gamma <= 0.0)
        throw validation_error("closed-form efficiency requires positive losses");
    const std::complex<double> I(0.0, 1.0);
    const std::complex<double> xo = 1.0 - I * (omega - Delta_opt) / (0.5 * kappa_opt);
    const std::complex<double> xu = 1.0 - I * (omega - Omega_mu) / (0.5 * kappa_mu);
    const std::complex<double> xm = 1.0 - I * (omega - Omega_m) / (0.5 * Gamma);
    const double rem_om = std::sqrt(C_em * C_om);
    const std::complex<double> alpha = 2.0 * (-rem_om + I * std::sqrt(C_eo) * xm);
    const std::complex<double> beta = 2.0 * I * std::sqrt(C_em * C_om * C_eo)
        + C_em * xo + C_om * xu + C_eo * xm + xo * xu * xm;
    return eta_opt * eta_mu * std::norm(alpha / beta);
}

// Peak efficiency on triple resonance.
inline double closed_form_eta_peak(double C_om, double C_em, double C_eo,
                                   double eta_opt, double eta_mu) {
    if (C_om < 0.0 || C_em < 0.0 || C_eo < 0.0)
        throw validation_error("cooperativities must be non-negative");
    const double num = 4.0 * (C_em * C_om + C_eo);
    const double s = C_em + C_om + C_eo + 1.0;
    const double den = 4.0 * C_em * C_om * C_eo + s * s;
    return eta_opt * eta_mu * num / den;
}

struct EigenMode {
    std::complex<double> lambda;   // -i Omega_eff - loss_eff / 2
    Eigen::VectorXd weight;        // |component|^2 per mode, sums to 1
};

// Complex normal-mode decomposition, sorted by effective frequency -Im(lambda).
inline std::vector<EigenMode> eigenmodes(const StateSpaceModel& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m.A);
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigenmode decomposition failed to converge");
    std::vector<EigenMode> out;
    const int dim = m.dim();
    for (int k = 0; k < dim; ++k) {
        EigenMode em;
        em.lambda = solver.eigenvalues()(k);
        Eigen::VectorXd w(dim);
        for (int i = 0; i < dim; ++i) w(i) = std::norm(solver.eigenvectors()(i, k));
        const double total = w.sum();
        if (total > 0.0) w /= total;
        em.weight = w;
        out.push_back(std::move(em));
    }
    std::sort(out.begin(), out.end(), [](const EigenMode& a, const EigenMode& b) {
        return -a.lambda.imag() < -b.lambda.imag();
    });
    return out;
}

} // namespace trires
