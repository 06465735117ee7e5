#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trires/errors.hpp"

namespace trires {

// Zero-valued fields are "unset"; operations that need them validate at the
// point of use. v_m is the measured longitudinal sound velocity; when absent
// it is derived from c33 and rho.
struct MaterialProps {
    std::string name;
    double n     = 0.0;   // refractive index at the pump wavelength
    double rho   = 0.0;   // density, kg/m^3
    double c33   = 0.0;   // longitudinal stiffness, Pa
    double d33   = 0.0;   // piezoelectric strain constant, m/V
    double p13   = 0.0;   // photoelastic constant
    double r13   = 0.0;   // electro-optic constant, m/V
    double eps_r = 0.0;   // microwave-band relative permittivity
    std::optional<double> v_m;  // m/s
};

inline std::vector<std::string> validate(const MaterialProps& m) {
    std::vector<std::string> warnings;
    if (m.name.empty())
        throw validation_error("material record has no name");
    if (m.n != 0.0 && m.n < 1.0)
        throw validation_error("material '" + m.name + "': refractive index must be >= 1");
    if (m.rho < 0.0)
        throw validation_error("material '" + m.name + "': density must be positive");
    if (m.c33 < 0.0)
        throw validation_error("material '" + m.name + "': stiffness must be positive");
    if (m.eps_r != 0.0 && m.eps_r < 1.0)
        throw validation_error("material '" + m.name + "': relative permittivity must be >= 1");
    if (m.v_m && *m.v_m <= 0.0)
        throw validation_error("material '" + m.name + "': sound velocity must be positive");
    if (m.v_m && m.c33 > 0.0 && m.rho > 0.0) {
        const double derived = std::sqrt(m.c33 / m.rho);
        if (std::abs(*m.v_m - derived) / *m.v_m >= 0.25) {
            std::ostringstream os;
            os << "material '" << m.name << "': explicit sound velocity " << *m.v_m
               << " m/s differs from sqrt(c33/rho) = " << derived << " m/s by >= 25%";
            warnings.push_back(os.str());
        }
    }
    return warnings;
}

// Explicit measured velocity wins over the elastic estimate.
inline double sound_velocity(const MaterialProps& m) {
    if (m.v_m) return *m.v_m;
    if (m.c33 > 0.0 && m.rho > 0.0) return std::sqrt(m.c33 / m.rho);
    throw validation_error("material '" + m.name +
                           "': sound velocity requires either v_m or both c33 and rho");
}

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos != text.size())
            throw validation_error(context + ": trailing characters in number '" + text + "'");
        return v;
    } catch (const validation_error&) {
        throw;
    } catch (const std::exception&) {
        throw validation_error(context + ": cannot parse number '" + text + "'");
    }
}

} // namespace detail

class MaterialRegistry {
public:
    static MaterialRegistry from_string(const std::string& text, const std::string& origin = "<string>") {
        MaterialRegistry reg;
        MaterialProps cur;
        bool open = false;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        auto flush = [&]() {
            if (!open) return;
            validate(cur);
            reg.insert(cur);
            cur = MaterialProps{};
            open = false;
        };
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) { flush(); continue; }
            const auto eq = line.find('=');
            const std::string where = origin + ":" + std::to_string(lineno);
            if (eq == std::string::npos)
                throw validation_error(where + ": expected 'key = value'");
            const std::string key = detail::lower(detail::trim(line.substr(0, eq)));
            const std::string val = detail::trim(line.substr(eq + 1));
            if (key.empty() || val.empty())
                throw validation_error(where + ": empty key or value");
            open = true;
            if (key == "name")        cur.name  = detail::lower(val);
            else if (key == "n")      cur.n     = detail::parse_double(val, where);
            else if (key == "rho")    cur.rho   = detail::parse_double(val, where);
            else if (key == "c33")    cur.c33   = detail::parse_double(val, where);
            else if (key == "d33")    cur.d33   = detail::parse_double(val, where);
            else if (key == "p13")    cur.p13   = detail::parse_double(val, where);
            else if (key == "r13")    cur.r13   = detail::parse_double(val, where);
            else if (key == "eps_r")  cur.eps_r = detail::parse_double(val, where);
            else if (key == "v_m")    cur.v_m   = detail::parse_double(val, where);
            else
                throw validation_error(where + ": unknown material field '" + key + "'");
        }
        flush();
        return reg;
    }

    static MaterialRegistry from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw validation_error("cannot open materials file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_string(buf.str(), path);
    }

    void insert(const MaterialProps& m) {
        table_[detail::lower(m.name)] = m;
    }

    bool contains(const std::string& name) const {
        return table_.count(detail::lower(name)) != 0;
    }

    const MaterialProps& lookup(const std::string& name) const {
        const auto it = table_.find(detail::lower(name));
        if (it == table_.end()) {
            std::ostringstream os;
            os << "unknown material '" << name << "'; registered:";
            for (const auto& [k, v] : table_) os << " " << k;
            throw validation_error(os.str());
        }
        return it->second;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(table_.size());
        for (const auto& [k, v] : table_) out.push_back(k);
        return out;
    }

    std::size_t size() const { return table_.size(); }

private:
    std::map<std::string, MaterialProps> table_;
};

} // namespace trires
