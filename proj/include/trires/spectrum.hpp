#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "trires/constants.hpp"
#include "trires/errors.hpp"

namespace trires {

enum class SpectrumKind { omit, moc, om, reflection };

inline std::string to_string(SpectrumKind k) {
    switch (k) {
        case SpectrumKind::omit:       return "omit";
        case SpectrumKind::moc:        return "moc";
        case SpectrumKind::om:         return "om";
        case SpectrumKind::reflection: return "reflection";
    }
    return "?";
}

inline SpectrumKind spectrum_kind_from_string(const std::string& s) {
    if (s == "omit")       return SpectrumKind::omit;
    if (s == "moc")        return SpectrumKind::moc;
    if (s == "om")         return SpectrumKind::om;
    if (s == "reflection") return SpectrumKind::reflection;
    throw validation_error("unknown spectrum kind '" + s + "'");
}

// A sampled scattering response. `freq` is angular (rad/s) and strictly
// increasing; `power` matches |amplitude|^2 except where a normalization is
// recorded in the metadata.
struct Spectrum {
    SpectrumKind kind = SpectrumKind::omit;
    std::vector<double> freq;
    std::vector<std::complex<double>> amplitude;
    std::vector<double> power;
    std::map<std::string, std::string> metadata;
};

inline void validate(const Spectrum& s) {
    if (s.freq.size() != s.amplitude.size() || s.freq.size() != s.power.size())
        throw validation_error("spectrum arrays have mismatched lengths");
    if (s.freq.size() < 2)
        throw validation_error("spectrum needs at least two points");
    for (std::size_t i = 1; i < s.freq.size(); ++i)
        if (!(s.freq[i] > s.freq[i - 1]))
            throw validation_error("spectrum frequency grid must be strictly increasing");
}

// Uniform angular-frequency grid, endpoints included.
inline std::vector<double> linspace(double start, double stop, int points) {
    if (points < 2) throw validation_error("grid needs at least two points");
    if (!(stop > start)) throw validation_error("grid stop must exceed start");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = (stop - start) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = start + step * i;
    g.back() = stop;
    return g;
}

} // namespace trires
