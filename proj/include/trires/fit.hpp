#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "trires/errors.hpp"
#include "trires/spectrum.hpp"
#include "trires/statespace.hpp"

namespace trires {

enum class ResidualSpace { linear, log_power };

struct FitParam {
    std::string name;
    double init = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

// Default bounds: rates and scale factors are non-negative; frequencies and
// the additive baseline are unconstrained.
inline FitParam make_fit_param(const std::string& name, double init) {
    FitParam p;
    p.name = name;
    p.init = init;
    if (name == "g_om" || name == "g_em" || name == "g_eo" || name == "Gamma" ||
        name == "kappa_opt" || name == "kappa_mu" || name == "amplitude_scale")
        p.lo = 0.0;
    return p;
}

struct FitProblem {
    SystemParams params;
    CouplingSet couplings;
    OpticalPort port = OpticalPort::port1;
    int n_acoustic = 1;
    SpectrumKind kind = SpectrumKind::omit;
    Spectrum data;
    std::vector<FitParam> free_params;
    ResidualSpace space = ResidualSpace::linear;
    double amplitude_scale = 1.0;
    double baseline = 0.0;
};

struct FitResult {
    std::map<std::string, double> best;
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    double condition_number = 0.0;
    std::vector<double> objective_history;
    std::string message;
};

namespace fitdetail {

inline const std::vector<std::string>& known_names() {
    static const std::vector<std::string> names = {
        "g_om", "g_em", "g_eo", "Gamma", "kappa_opt", "kappa_mu",
        "Delta_opt", "Omega_m", "amplitude_scale", "baseline"};
    return names;
}

inline bool is_known(const std::string& n) {
    for (const auto& k : known_names())
        if (k == n) return true;
    return false;
}

// Model power on the data grid with the free parameters applied. The
// acoustic center follows Omega_m continuously (no ladder snapping) so the
// objective stays differentiable.
inline std::vector<double> model_power(const FitProblem& prob,
                                       const Eigen::VectorXd& x) {
    SystemParams P = prob.params;
    CouplingSet C = prob.couplings;
    double scale = prob.amplitude_scale;
    double base = prob.baseline;
    for (std::size_t j = 0; j < prob.free_params.size(); ++j) {
        const std::string& name = prob.free_params[j].name;
        const double v = x(static_cast<Eigen::Index>(j));
        if (name == "g_om")                 C.g_om = v;
        else if (name == "g_em")            C.g_em = v;
        else if (name == "g_eo")            C.g_eo = v;
        else if (name == "Gamma")           P.Gamma = v;
        else if (name == "kappa_opt")       P.kappa_opt = v;
        else if (name == "kappa_mu")        P.kappa_mu = v;
        else if (name == "Delta_opt")       P.Delta_opt = v;
        else if (name == "Omega_m")         P.Omega_m = v;
        else if (name == "amplitude_scale") scale = v;
        else if (name == "baseline")        base = v;
    }

    double kext = 0.0;
    switch (prob.port) {
        case OpticalPort::port1:  kext = P.kappa_opt_c1; break;
        case OpticalPort::port2:  kext = P.kappa_opt_c2; break;
        case OpticalPort::lumped: kext = P.kappa_opt_c1 + P.kappa_opt_c2; break;
    }
    if (kext > P.kappa_opt) kext = P.kappa_opt;
    double mu_ext = P.kappa_mu_c;
    if (mu_ext > P.kappa_mu) mu_ext = P.kappa_mu;

    std::vector<AcousticModeSpec> acoustic;
    const int half = (prob.n_acoustic - 1) / 2;
    if (half == 0) {
        acoustic.push_back({0, P.Omega_m, P.Gamma, C.g_om, C.g_em});
    } else {
        const double dm = mechanical_fsr(P);
        const double OmegaB = brillouin_frequency(P);
        const double env0 = sinc((P.Omega_m - OmegaB) / (4.0 * dm));
        const long j0 = longitudinal_index(P);
        for (int k = -half; k <= half; ++k) {
            const double W = P.Omega_m + k * dm;
            const double env = sinc((W - OmegaB) / (4.0 * dm));
            const double gom = (std::abs(env0) > 1e-12) ? C.g_om * env / env0 : C.g_om * env;
            const bool odd = ((j0 + k) % 2) != 0;
            acoustic.push_back({j0 + k, W, P.Gamma, gom, (odd || k == 0) ? C.g_em : 0.0});
        }
    }
    StateSpaceModel model = build_model(P.Delta_opt, P.kappa_opt, kext,
                                        P.Omega_mu, P.kappa_mu, mu_ext,
                                        acoustic, C.g_eo);
    Spectrum s;
    switch (prob.kind) {
        case SpectrumKind::omit: s = omit_spectrum(model, prob.data.freq); break;
        case SpectrumKind::moc:  s = transduction_spectrum(model, prob.data.freq, SpectrumKind::moc); break;
        case SpectrumKind::om:   s = transduction_spectrum(model, prob.data.freq, SpectrumKind::om); break;
        default:
            throw validation_error("unsupported spectrum kind for fitting");
    }
    std::vector<double> y(s.power.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = scale * s.power[i] + base;
    return y;
}

inline std::string snapshot(const FitProblem& prob, const Eigen::VectorXd& x) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t j = 0; j < prob.free_params.size(); ++j) {
        if (j) os << ", ";
        os << prob.free_params[j].name << "=" << x(static_cast<Eigen::Index>(j));
    }
    return os.str();
}

inline Eigen::VectorXd residuals(const FitProblem& prob, const Eigen::VectorXd& x) {
    const std::vector<double> y = model_power(prob, x);
    Eigen::VectorXd r(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = y[i];
        const double d = prob.data.power[i];
        if (!std::isfinite(m))
            throw numeric_error("non-finite model value during search at " + snapshot(prob, x));
        if (prob.space == ResidualSpace::log_power) {
            if (m <= 0.0)
                throw numeric_error("non-positive model power in log-space fit at " +
                                    snapshot(prob, x));
            r(static_cast<Eigen::Index>(i)) = 10.0 * (std::log10(m) - std::log10(d));
        } else {
            r(static_cast<Eigen::Index>(i)) = m - d;
        }
    }
    return r;
}

inline Eigen::MatrixXd jacobian(const FitProblem& prob, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& r0) {
    const auto n = static_cast<Eigen::Index>(prob.free_params.size());
    Eigen::MatrixXd J(r0.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double h = std::max(1e-6 * std::abs(x(j)), 1e-12);
        const auto& fp = prob.free_params[static_cast<std::size_t>(j)];
        if (x(j) + h > fp.hi) h = -h;  // step toward the interior at a bound
        Eigen::VectorXd xs = x;
        xs(j) += h;
        const Eigen::VectorXd rs = residuals(prob, xs);
        J.col(j) = (rs - r0) / h;
    }
    return J;
}

inline void clamp(const FitProblem& prob, Eigen::VectorXd& x) {
    for (std::size_t j = 0; j < prob.free_params.size(); ++j) {
        const auto& fp = prob.free_params[j];
        auto& v = x(static_cast<Eigen::Index>(j));
        if (v < fp.lo) v = fp.lo;
        if (v > fp.hi) v = fp.hi;
    }
}

inline void check_problem(const FitProblem& prob) {
    if (prob.free_params.empty())
        throw validation_error("fit needs at least one free parameter");
    validate(prob.data);
    for (std::size_t j = 0; j < prob.free_params.size(); ++j) {
        const auto& fp = prob.free_params[j];
        if (!is_known(fp.name))
            throw validation_error("unknown fit parameter '" + fp.name + "'");
        for (std::size_t i = 0; i < j; ++i)
            if (prob.free_params[i].name == fp.name)
                throw validation_error("fit parameter '" + fp.name + "' listed twice");
        if (!(fp.init >= fp.lo && fp.init <= fp.hi))
            throw validation_error("initial guess for '" + fp.name + "' lies outside its bounds");
    }
    const auto [mn, mx] = std::minmax_element(prob.data.power.begin(), prob.data.power.end());
    if (*mn == *mx) throw validation_error("flat data: spectrum has zero variance");
    if (prob.space == ResidualSpace::log_power)
        for (const double v : prob.data.power)
            if (v <= 0.0)
                throw validation_error("log-space fit requires strictly positive data power");
}

} // namespace fitdetail

// Gradient of the sum-of-squares objective at the initial guess, using the
// same forward-difference scheme as the solver.
inline Eigen::VectorXd fit_gradient(const FitProblem& prob) {
    fitdetail::check_problem(prob);
    Eigen::VectorXd x(static_cast<Eigen::Index>(prob.free_params.size()));
    for (std::size_t j = 0; j < prob.free_params.size(); ++j)
        x(static_cast<Eigen::Index>(j)) = prob.free_params[j].init;
    const Eigen::VectorXd r = fitdetail::residuals(prob, x);
    const Eigen::MatrixXd J = fitdetail::jacobian(prob, x, r);
    return 2.0 * J.transpose() * r;
}

// Damped least squares with multiplicative (Levenberg) damping adapted on
// residual decrease. Stops when the relative objective change drops below
// 1e-10 or after 500 iterations; diagnostics returned either way.
inline FitResult fit(const FitProblem& prob) {
    fitdetail::check_problem(prob);
    const auto n = static_cast<Eigen::Index>(prob.free_params.size());
    Eigen::VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j)
        x(j) = prob.free_params[static_cast<std::size_t>(j)].init;

    FitResult out;
    Eigen::VectorXd r = fitdetail::residuals(prob, x);
    double obj = r.squaredNorm();
    out.objective_history.push_back(obj);

    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    std::string message;
    for (; iter < 500; ++iter) {
        const Eigen::MatrixXd J = fitdetail::jacobian(prob, x, r);
        const Eigen::MatrixXd H = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        for (int attempt = 0; attempt < 25; ++attempt) {
            Eigen::MatrixXd Hd = H;
            for (Eigen::Index k = 0; k < n; ++k)
                Hd(k, k) += lambda * std::max(H(k, k), 1e-30);
            const Eigen::VectorXd step = Hd.ldlt().solve(-g);
            Eigen::VectorXd xs = x + step;
            fitdetail::clamp(prob, xs);
            const Eigen::VectorXd rs = fitdetail::residuals(prob, xs);
            const double objs = rs.squaredNorm();
            if (objs < obj) {
                const double rel = (obj - objs) / std::max(obj, 1e-300);
                x = xs;
                r = rs;
                obj = objs;
                out.objective_history.push_back(obj);
                lambda = std::max(lambda / 3.0, 1e-14);
                accepted = true;
                if (rel < 1e-10) converged = true;
                break;
            }
            lambda = std::min(lambda * 3.0, 1e14);
        }
        if (!accepted) {
            converged = true;  // no downhill direction left at damping limit
            message = "terminated: no further residual decrease";
            break;
        }
        if (converged) break;
    }
    if (message.empty())
        message = converged ? "converged" : "iteration limit reached";

    out.converged = converged;
    out.iterations = iter + 1;
    out.residual_norm = std::sqrt(obj);
    for (std::size_t j = 0; j < prob.free_params.size(); ++j)
        out.best[prob.free_params[j].name] = x(static_cast<Eigen::Index>(j));

    const Eigen::MatrixXd J = fitdetail::jacobian(prob, x, r);
    const Eigen::MatrixXd H = J.transpose() * J;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    out.condition_number = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    const auto m = static_cast<double>(r.size());
    const double dof = std::max(m - static_cast<double>(n), 1.0);
    const double sigma2 = obj / dof;
    out.covariance = sigma2 * H.fullPivLu().inverse();
    out.message = message;
    return out;
}

struct PowerSeriesResult {
    double slope = 0.0;      // C_om per watt, regression through the origin
    double r_squared = 0.0;
    std::vector<double> powers;
    std::vector<double> C_om;
    std::vector<double> g_om;
};

// Fit each OMIT spectrum of a pump-power series for g_om and regress the
// implied cooperativity on power.
inline PowerSeriesResult cooperativity_vs_power(
    const SystemParams& params, const std::vector<std::pair<double, Spectrum>>& series,
    OpticalPort port = OpticalPort::port1) {
    if (series.size() < 3)
        throw validation_error("power series needs at least three spectra");
    if (params.kappa_opt <= 0.0 || params.Gamma <= 0.0)
        throw validation_error("power series requires positive kappa_opt and Gamma");
    PowerSeriesResult out;
    for (const auto& [P_p, spec] : series) {
        if (P_p <= 0.0) throw validation_error("pump powers must be positive");
        FitProblem prob;
        prob.params = params;
        prob.params.P_p = P_p;
        prob.port = port;
        prob.kind = SpectrumKind::omit;
        prob.space = ResidualSpace::linear;
        prob.data = spec;

        // seed from a coarse cooperativity scan
        double best_g = 0.0;
        double best_obj = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 40; ++k) {
            const double C = std::pow(10.0, -2.0 + 4.0 * k / 40.0);
            const double g = std::sqrt(C * params.kappa_opt * params.Gamma / 4.0);
            FitProblem scan = prob;
            scan.free_params = {make_fit_param("g_om", g)};
            Eigen::VectorXd x(1);
            x(0) = g;
            const double obj = fitdetail::residuals(scan, x).squaredNorm();
            if (obj < best_obj) { best_obj = obj; best_g = g; }
        }
        prob.free_params = {make_fit_param("g_om", best_g)};
        const FitResult res = fit(prob);
        const double g = res.best.at("g_om");
        out.powers.push_back(P_p);
        out.g_om.push_back(g);
        out.C_om.push_back(4.0 * g * g / (params.kappa_opt * params.Gamma));
    }
    double spp = 0.0, spc = 0.0, cbar = 0.0;
    for (std::size_t i = 0; i < out.powers.size(); ++i) {
        spp += out.powers[i] * out.powers[i];
        spc += out.powers[i] * out.C_om[i];
        cbar += out.C_om[i];
    }
    cbar /= static_cast<double>(out.C_om.size());
    out.slope = spc / spp;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < out.powers.size(); ++i) {
        const double e = out.C_om[i] - out.slope * out.powers[i];
        ss_res += e * e;
        ss_tot += (out.C_om[i] - cbar) * (out.C_om[i] - cbar);
    }
    out.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return out;
}

} // namespace trires
