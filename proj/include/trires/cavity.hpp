#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "trires/constants.hpp"
#include "trires/errors.hpp"

namespace trires {

struct CavitySegment {
    double n = 1.0;  // refractive index
    double L = 0.0;  // physical length, m
};

// Fabry-Perot cavity with lumped end mirrors of power reflectivity R and a
// piecewise-homogeneous dielectric stack between them.
struct CavityStack {
    std::vector<CavitySegment> segments;
    double mirror_R = 0.999;
    double piezo_travel = 0.0;  // available end-mirror displacement, m
};

inline void validate(const CavityStack& s) {
    if (s.segments.empty())
        throw validation_error("cavity stack needs at least one segment");
    for (const auto& seg : s.segments) {
        if (seg.L <= 0.0) throw validation_error("cavity segment lengths must be positive");
        if (seg.n < 1.0) throw validation_error("cavity segment index must be >= 1");
    }
    if (!(s.mirror_R > 0.0 && s.mirror_R < 1.0))
        throw validation_error("mirror reflectivity must lie in (0, 1)");
    if (s.piezo_travel < 0.0)
        throw validation_error("piezo travel must be non-negative");
}

inline double optical_path_length(const CavityStack& s) {
    double opl = 0.0;
    for (const auto& seg : s.segments) opl += seg.n * seg.L;
    return opl;
}

namespace tmm {

using cplx = std::complex<double>;
struct Mat2 {
    cplx a, b, c, d;  // [[a, b], [c, d]]
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

inline Mat2 mirror_matrix(double R) {
    const cplx r = std::sqrt(R);
    const cplx t = cplx(0.0, 1.0) * std::sqrt(1.0 - R);
    return {(t * t - r * r) / t, r / t, -r / t, 1.0 / t};
}

inline Mat2 interface_matrix(double n1, double n2) {
    const double r = (n1 - n2) / (n1 + n2);
    const double t = 2.0 * n1 / (n1 + n2);
    return {cplx(1.0 / t), cplx(r / t), cplx(r / t), cplx(1.0 / t)};
}

inline Mat2 propagation_matrix(double n, double L, double omega) {
    const double phi = n * L * omega / consts::c0;
    return {std::polar(1.0, -phi), cplx(0.0), cplx(0.0), std::polar(1.0, phi)};
}

inline Mat2 stack_matrix(const CavityStack& s, double omega) {
    Mat2 M = mirror_matrix(s.mirror_R);
    double prev_n = 0.0;
    bool first = true;
    for (const auto& seg : s.segments) {
        if (!first) M = M * interface_matrix(prev_n, seg.n);
        M = M * propagation_matrix(seg.n, seg.L, omega);
        prev_n = seg.n;
        first = false;
    }
    M = M * mirror_matrix(s.mirror_R);
    return M;
}

} // namespace tmm

struct CavityResponse {
    std::complex<double> t;  // transmission amplitude
    std::complex<double> r;  // reflection amplitude
};

inline CavityResponse cavity_response(const CavityStack& s, double omega) {
    const tmm::Mat2 M = tmm::stack_matrix(s, omega);
    if (M.d == tmm::cplx(0.0))
        throw numeric_error("singular transfer matrix");
    return {1.0 / M.d, M.b / M.d};
}

inline double transmission(const CavityStack& s, double omega) {
    return std::norm(cavity_response(s, omega).t);
}

namespace detail {

// Golden-section refinement of a transmission maximum inside [a, b].
inline double refine_maximum(const CavityStack& s, double a, double b, double tol) {
    const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = transmission(s, x1);
    double f2 = transmission(s, x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = transmission(s, x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = transmission(s, x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

// All transmission maxima in the angular band [band_lo, band_hi], located on
// a coarse grid of ~50 points per estimated free spectral range and refined
// to `tol` (angular).
inline std::vector<double> resonances(const CavityStack& s, double band_lo, double band_hi,
                                      double tol = consts::two_pi * 1.0e3) {
    validate(s);
    if (!(band_hi > band_lo) || band_lo <= 0.0)
        throw validation_error("resonance band must be positive and ordered");
    if (tol <= 0.0) throw validation_error("refinement tolerance must be positive");
    const double fsr_est = consts::pi * consts::c0 / optical_path_length(s);
    const double step = fsr_est / 50.0;
    const int npts = std::max(51, static_cast<int>(std::ceil((band_hi - band_lo) / step)) + 1);
    std::vector<double> w(static_cast<std::size_t>(npts));
    std::vector<double> T(static_cast<std::size_t>(npts));
    const double h = (band_hi - band_lo) / (npts - 1);
    for (int i = 0; i < npts; ++i) {
        w[static_cast<std::size_t>(i)] = band_lo + h * i;
        T[static_cast<std::size_t>(i)] = transmission(s, w[static_cast<std::size_t>(i)]);
    }
    std::vector<double> peaks;
    for (int i = 1; i + 1 < npts; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (T[u] > T[u - 1] && T[u] >= T[u + 1]) {
            const double x = detail::refine_maximum(s, w[u - 1], w[u + 1], tol);
            if (!peaks.empty() && x - peaks.back() < 10.0 * tol) {
                if (transmission(s, x) > transmission(s, peaks.back())) peaks.back() = x;
            } else {
                peaks.push_back(x);
            }
        }
    }
    return peaks;
}

struct ModeSpacing {
    double lambda = 0.0;   // vacuum wavelength of the lower-frequency mode, m
    double spacing = 0.0;  // angular spacing to the next mode
};

inline std::vector<ModeSpacing> mode_spacings(const CavityStack& s, double band_lo,
                                              double band_hi,
                                              double tol = consts::two_pi * 1.0e3) {
    const auto res = resonances(s, band_lo, band_hi, tol);
    std::vector<ModeSpacing> out;
    for (std::size_t k = 0; k + 1 < res.size(); ++k)
        out.push_back({consts::two_pi * consts::c0 / res[k], res[k + 1] - res[k]});
    return out;
}

inline CavityStack displaced(const CavityStack& s, double displacement) {
    CavityStack out = s;
    out.segments.back().L += displacement;
    if (out.segments.back().L <= 0.0)
        throw validation_error("displacement collapses the end segment");
    return out;
}

struct FsrMatch {
    double lambda = 0.0;        // wavelength of the matched pair's lower mode at rest
    double displacement = 0.0;  // end-mirror displacement, m
    double achieved = 0.0;      // pair spacing at the solution (angular)
};

namespace detail {

// Spacing of the mode pair nearest `center` at a given displacement; updates
// `center` so a scan can follow the same physical pair.
inline std::optional<double> tracked_spacing(const CavityStack& s, double displacement,
                                             double band_lo, double band_hi,
                                             double tol, double& center) {
    const auto res = resonances(displaced(s, displacement), band_lo, band_hi, tol);
    if (res.size() < 2) return std::nullopt;
    std::size_t best = 0;
    double best_d = std::abs(0.5 * (res[0] + res[1]) - center);
    for (std::size_t k = 1; k + 1 < res.size(); ++k) {
        const double d = std::abs(0.5 * (res[k] + res[k + 1]) - center);
        if (d < best_d) { best_d = d; best = k; }
    }
    center = 0.5 * (res[best] + res[best + 1]);
    return res[best + 1] - res[best];
}

} // namespace detail

// Search for an end-mirror displacement in [0, piezo_travel] that brings some
// mode pair's spacing within `tolerance` of `target`. Pairs are tried in
// ascending wavelength order and the smallest displacement wins, so ties
// resolve to (smallest wavelength, smallest displacement).
inline std::optional<FsrMatch> match_fsr(const CavityStack& s, double target,
                                         double tolerance, double band_lo, double band_hi,
                                         double res_tol = consts::two_pi * 1.0e3) {
    validate(s);
    if (target <= 0.0 || tolerance <= 0.0)
        throw validation_error("target spacing and tolerance must be positive");
    const auto rest = mode_spacings(s, band_lo, band_hi, res_tol);
    if (rest.empty()) return std::nullopt;

    // rest pairs in ascending wavelength = descending frequency
    std::vector<std::size_t> order(rest.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = rest.size() - 1 - i;

    const auto rest_res = resonances(s, band_lo, band_hi, res_tol);
    const int coarse = 25;
    const double travel = s.piezo_travel;

    for (const std::size_t k : order) {
        const double lambda0 = rest[k].lambda;
        double center0 = 0.5 * (rest_res[k] + rest_res[k + 1]);

        double prev_delta = 0.0;
        double center_prev = center0;
        std::optional<double> prev_sp =
            detail::tracked_spacing(s, 0.0, band_lo, band_hi, res_tol, center_prev);
        if (prev_sp && std::abs(*prev_sp - target) <= tolerance)
            return FsrMatch{lambda0, 0.0, *prev_sp};

        for (int i = 1; i <= coarse && travel > 0.0; ++i) {
            const double delta = travel * i / coarse;
            double center_here = center_prev;
            const auto sp = detail::tracked_spacing(s, delta, band_lo, band_hi, res_tol, center_here);
            if (sp && std::abs(*sp - target) <= tolerance)
                return FsrMatch{lambda0, delta, *sp};
            if (sp && prev_sp && (*prev_sp - target) * (*sp - target) < 0.0) {
                // bracketed crossing: bisect on displacement
                double lo = prev_delta, hi = delta;
                double f_lo = *prev_sp - target;
                double c_lo = center_prev;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    double c_mid = c_lo;
                    const auto sm = detail::tracked_spacing(s, mid, band_lo, band_hi, res_tol, c_mid);
                    if (!sm) break;
                    if (std::abs(*sm - target) <= tolerance)
                        return FsrMatch{lambda0, mid, *sm};
                    if (f_lo * (*sm - target) < 0.0) {
                        hi = mid;
                    } else {
                        lo = mid; f_lo = *sm - target; c_lo = c_mid;
                    }
                    if (hi - lo < 1.0e-13) break;
                }
            }
            prev_delta = delta;
            prev_sp = sp;
            center_prev = center_here;
        }
    }
    return std::nullopt;
}

} // namespace trires
