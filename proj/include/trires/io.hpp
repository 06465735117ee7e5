#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "trires/cavity.hpp"
#include "trires/errors.hpp"
#include "trires/materials.hpp"
#include "trires/params.hpp"
#include "trires/spectrum.hpp"

namespace trires {

// Shortest representation that round-trips exactly.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct GridSpec {
    double start_hz = 0.0;
    double stop_hz = 0.0;
    int points = 0;
    bool is_set() const { return points >= 2; }
};

inline GridSpec parse_grid(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = (c1 == std::string::npos) ? std::string::npos : text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
        throw validation_error("grid must be start:stop:points, got '" + text + "'");
    GridSpec g;
    g.start_hz = detail::parse_double(detail::trim(text.substr(0, c1)), "grid start");
    g.stop_hz = detail::parse_double(detail::trim(text.substr(c1 + 1, c2 - c1 - 1)), "grid stop");
    const std::string pts = detail::trim(text.substr(c2 + 1));
    const double p = detail::parse_double(pts, "grid points");
    if (p != std::floor(p))
        throw validation_error("grid points must be an integer, got '" + pts + "'");
    if (p < 2 || p > 5e7)
        throw validation_error("grid points out of range [2, 5e7]");
    g.points = static_cast<int>(p);
    if (!(g.stop_hz > g.start_hz))
        throw validation_error("grid stop must exceed start");
    return g;
}

inline std::vector<double> grid_to_angular(const GridSpec& g) {
    return linspace(consts::two_pi * g.start_hz, consts::two_pi * g.stop_hz, g.points);
}

// ---------------------------------------------------------------------------
// Spectrum CSV: header `freq_hz,re,im,power` (optional trailing power_db),
// `#` comment lines preserved into metadata, frequencies in ordinary Hz.
// ---------------------------------------------------------------------------

inline void write_spectrum_csv(const Spectrum& s, std::ostream& out, bool with_db = false) {
    validate(s);
    out << "# kind: " << to_string(s.kind) << "\n";
    out << "freq_hz,re,im,power";
    if (with_db) out << ",power_db";
    out << "\n";
    for (std::size_t i = 0; i < s.freq.size(); ++i) {
        out << fmt_double(s.freq[i] / consts::two_pi) << ","
            << fmt_double(s.amplitude[i].real()) << ","
            << fmt_double(s.amplitude[i].imag()) << ","
            << fmt_double(s.power[i]);
        if (with_db) out << "," << fmt_double(10.0 * std::log10(s.power[i]));
        out << "\n";
    }
}

inline Spectrum read_spectrum_csv(std::istream& in, const std::string& origin = "<stream>") {
    Spectrum s;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    int ncols = 4;
    std::vector<std::string> comments;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = detail::trim(t.substr(1));
            if (body.rfind("kind:", 0) == 0)
                s.kind = spectrum_kind_from_string(detail::trim(body.substr(5)));
            else
                comments.push_back(body);
            continue;
        }
        if (!header_seen) {
            if (t.rfind("freq_hz,re,im,power", 0) != 0)
                throw validation_error(where + ": expected header 'freq_hz,re,im,power'");
            ncols = 4 + (t.find("power_db") != std::string::npos ? 1 : 0);
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const auto comma = t.find(',', pos);
            cells.push_back(t.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (static_cast<int>(cells.size()) != ncols)
            throw validation_error(where + ": expected " + std::to_string(ncols) + " columns");
        const double f = detail::parse_double(cells[0], where);
        const double re = detail::parse_double(cells[1], where);
        const double im = detail::parse_double(cells[2], where);
        const double pw = detail::parse_double(cells[3], where);
        s.freq.push_back(consts::two_pi * f);
        s.amplitude.emplace_back(re, im);
        s.power.push_back(pw);
    }
    if (!header_seen)
        throw validation_error(origin + ": no CSV header found");
    if (!comments.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < comments.size(); ++i) {
            if (i) joined += "\n";
            joined += comments[i];
        }
        s.metadata["comments"] = joined;
    }
    validate(s);
    return s;
}

inline Spectrum read_spectrum_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open spectrum file '" + path + "'");
    return read_spectrum_csv(in, path);
}

inline void write_metadata_sidecar(const Spectrum& s, const std::string& path) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    j["points"] = s.freq.size();
    j["freq_start_hz"] = s.freq.front() / consts::two_pi;
    j["freq_stop_hz"] = s.freq.back() / consts::two_pi;
    nlohmann::ordered_json meta;
    for (const auto& [k, v] : s.metadata) meta[k] = v;
    j["metadata"] = meta;
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write sidecar '" + path + "'");
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Config documents (JSON). All frequencies and rates in Hz; converted to
// rad/s only when a SystemParams is materialized.
// ---------------------------------------------------------------------------

struct ConfigDocument {
    std::string material = "vacuum";
    std::map<std::string, double> material_overrides;

    double L_m_m = 0.0, L_opt_m = 0.0, r_opt_m = 0.0, t_pz_m = 0.0;
    std::optional<double> A_m_m2;
    double t_pz_surface_m = 1.0e-9;
    std::string piezo_distribution = "bulk";

    double kappa_opt_hz = 0.0, kappa_opt_c1_hz = 0.0, kappa_opt_c2_hz = 0.0, kappa_opt_i_hz = 0.0;
    double kappa_mu_hz = 0.0, kappa_mu_c_hz = 0.0, kappa_mu_i_hz = 0.0, Gamma_hz = 0.0;

    double Omega_mu_hz = 0.0, Omega_m_hz = 0.0, Delta_opt_hz = 0.0;

    double lambda_p_nm = 1550.0, P_p_w = 0.0, P_mu_w = 0.0, E_sim_v_m = 0.0, T_k = 0.0;

    std::string optical_port = "port1";
    int n_acoustic = 1;

    CavityStack stack;
    GridSpec grid;

    double n_floor = 0.0;
    double bandwidth_hz = 1000.0;

    std::string ledger_path;
    std::string config_dir;

    std::map<std::string, bool> defaulted;  // provenance: true if the key was not in the file
    std::vector<std::string> warnings;
};

namespace cfgdetail {

inline double num(const nlohmann::json& j, const std::string& key) {
    if (!j.is_number())
        throw validation_error("config key '" + key + "' must be a number");
    return j.get<double>();
}

struct Section {
    const nlohmann::json* obj;
    std::string prefix;
    ConfigDocument* doc;
    bool lax;
    std::vector<std::string> consumed;

    bool has(const std::string& key) {
        consumed.push_back(key);
        return obj && obj->contains(key);
    }
    void take(const std::string& key, double& field) {
        if (has(key)) {
            field = num((*obj)[key], prefix + key);
            doc->defaulted[prefix + key] = false;
        } else {
            doc->defaulted[prefix + key] = true;
        }
    }
    void take_int(const std::string& key, int& field) {
        if (has(key)) {
            const double v = num((*obj)[key], prefix + key);
            if (v != std::floor(v))
                throw validation_error("config key '" + prefix + key + "' must be an integer");
            field = static_cast<int>(v);
            doc->defaulted[prefix + key] = false;
        } else {
            doc->defaulted[prefix + key] = true;
        }
    }
    void take_str(const std::string& key, std::string& field) {
        if (has(key)) {
            if (!(*obj)[key].is_string())
                throw validation_error("config key '" + prefix + key + "' must be a string");
            field = (*obj)[key].get<std::string>();
            doc->defaulted[prefix + key] = false;
        } else {
            doc->defaulted[prefix + key] = true;
        }
    }
    void finish() {
        if (!obj) return;
        for (const auto& [k, v] : obj->items()) {
            bool known = false;
            for (const auto& c : consumed)
                if (c == k) { known = true; break; }
            if (!known) {
                const std::string msg = "unknown config key '" + prefix + k + "'";
                if (lax)
                    doc->warnings.push_back(msg);
                else
                    throw validation_error(msg);
            }
        }
    }
};

} // namespace cfgdetail

inline ConfigDocument parse_config_text(const std::string& text, bool lax = false,
                                        const std::string& origin = "<string>") {
    std::string body = detail::trim(text);
    if (body.empty()) body = "{}";
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error(origin + ": " + e.what());
    }
    if (!root.is_object())
        throw validation_error(origin + ": config root must be an object");

    ConfigDocument doc;
    auto section = [&](const char* name) -> cfgdetail::Section {
        const nlohmann::json* obj = nullptr;
        if (root.contains(name)) {
            if (!root[name].is_object())
                throw validation_error("config section '" + std::string(name) + "' must be an object");
            obj = &root[name];
        }
        return cfgdetail::Section{obj, std::string(name) + ".", &doc, lax, {}};
    };

    {
        cfgdetail::Section top{&root, "", &doc, lax, {}};
        top.take_str("material", doc.material);
        top.take_str("ledger", doc.ledger_path);
        // section names count as consumed at top level
        for (const char* s : {"material_overrides", "geometry", "rates_hz", "frequencies_hz",
                              "drive", "statespace", "cavity", "grid", "sense"})
            top.has(s);
        top.finish();
    }
    if (root.contains("material_overrides")) {
        const auto& ov = root["material_overrides"];
        if (!ov.is_object())
            throw validation_error("config section 'material_overrides' must be an object");
        for (const auto& [k, v] : ov.items()) {
            const bool known = (k == "n" || k == "rho" || k == "c33" || k == "d33" ||
                                k == "p13" || k == "r13" || k == "eps_r" || k == "v_m");
            if (!known) {
                const std::string msg = "unknown config key 'material_overrides." + k + "'";
                if (lax) { doc.warnings.push_back(msg); continue; }
                throw validation_error(msg);
            }
            doc.material_overrides[k] = cfgdetail::num(v, "material_overrides." + k);
        }
        doc.defaulted["material_overrides"] = false;
    } else {
        doc.defaulted["material_overrides"] = true;
    }
    {
        auto s = section("geometry");
        s.take("L_m_m", doc.L_m_m);
        s.take("L_opt_m", doc.L_opt_m);
        s.take("r_opt_m", doc.r_opt_m);
        s.take("t_pz_m", doc.t_pz_m);
        s.take("t_pz_surface_m", doc.t_pz_surface_m);
        if (s.has("A_m_m2")) {
            doc.A_m_m2 = cfgdetail::num((*s.obj)["A_m_m2"], "geometry.A_m_m2");
            doc.defaulted["geometry.A_m_m2"] = false;
        } else {
            doc.defaulted["geometry.A_m_m2"] = true;
        }
        s.take_str("piezo_distribution", doc.piezo_distribution);
        s.finish();
    }
    {
        auto s = section("rates_hz");
        s.take("kappa_opt", doc.kappa_opt_hz);
        s.take("kappa_opt_c1", doc.kappa_opt_c1_hz);
        s.take("kappa_opt_c2", doc.kappa_opt_c2_hz);
        s.take("kappa_opt_i", doc.kappa_opt_i_hz);
        s.take("kappa_mu", doc.kappa_mu_hz);
        s.take("kappa_mu_c", doc.kappa_mu_c_hz);
        s.take("kappa_mu_i", doc.kappa_mu_i_hz);
        s.take("Gamma", doc.Gamma_hz);
        s.finish();
    }
    {
        auto s = section("frequencies_hz");
        s.take("Omega_mu", doc.Omega_mu_hz);
        s.take("Omega_m", doc.Omega_m_hz);
        s.take("Delta_opt", doc.Delta_opt_hz);
        s.finish();
    }
    {
        auto s = section("drive");
        s.take("lambda_p_nm", doc.lambda_p_nm);
        s.take("P_p_w", doc.P_p_w);
        s.take("P_mu_w", doc.P_mu_w);
        s.take("E_sim_v_m", doc.E_sim_v_m);
        s.take("T_k", doc.T_k);
        s.finish();
    }
    {
        auto s = section("statespace");
        s.take_str("optical_port", doc.optical_port);
        s.take_int("n_acoustic", doc.n_acoustic);
        s.finish();
    }
    {
        auto s = section("cavity");
        s.take("mirror_R", doc.stack.mirror_R);
        s.take("piezo_travel_m", doc.stack.piezo_travel);
        if (s.has("segments")) {
            const auto& segs = (*s.obj)["segments"];
            if (!segs.is_array())
                throw validation_error("config key 'cavity.segments' must be an array");
            for (const auto& seg : segs) {
                if (!seg.is_object() || !seg.contains("n") || !seg.contains("L_m"))
                    throw validation_error("cavity segments must be objects with keys n and L_m");
                for (const auto& [k, v] : seg.items())
                    if (k != "n" && k != "L_m") {
                        const std::string msg = "unknown config key 'cavity.segments." + k + "'";
                        if (lax) { doc.warnings.push_back(msg); continue; }
                        throw validation_error(msg);
                    }
                doc.stack.segments.push_back({cfgdetail::num(seg["n"], "cavity.segments.n"),
                                              cfgdetail::num(seg["L_m"], "cavity.segments.L_m")});
            }
            doc.defaulted["cavity.segments"] = false;
        } else {
            doc.defaulted["cavity.segments"] = true;
        }
        s.finish();
    }
    {
        auto s = section("grid");
        s.take("start_hz", doc.grid.start_hz);
        s.take("stop_hz", doc.grid.stop_hz);
        s.take_int("points", doc.grid.points);
        s.finish();
        if (doc.grid.points != 0) {
            if (doc.grid.points < 2)
                throw validation_error("config grid.points must be >= 2");
            if (!(doc.grid.stop_hz > doc.grid.start_hz))
                throw validation_error("config grid.stop_hz must exceed grid.start_hz");
        }
    }
    {
        auto s = section("sense");
        s.take("n_floor", doc.n_floor);
        s.take("bandwidth_hz", doc.bandwidth_hz);
        s.finish();
    }

    auto nonneg = [](double v, const char* what) {
        if (v < 0.0) throw validation_error(std::string("config rate '") + what + "' must be non-negative");
    };
    nonneg(doc.kappa_opt_hz, "rates_hz.kappa_opt");
    nonneg(doc.kappa_opt_c1_hz, "rates_hz.kappa_opt_c1");
    nonneg(doc.kappa_opt_c2_hz, "rates_hz.kappa_opt_c2");
    nonneg(doc.kappa_opt_i_hz, "rates_hz.kappa_opt_i");
    nonneg(doc.kappa_mu_hz, "rates_hz.kappa_mu");
    nonneg(doc.kappa_mu_c_hz, "rates_hz.kappa_mu_c");
    nonneg(doc.kappa_mu_i_hz, "rates_hz.kappa_mu_i");
    nonneg(doc.Gamma_hz, "rates_hz.Gamma");
    if (doc.n_acoustic < 1 || doc.n_acoustic % 2 == 0)
        throw validation_error("config statespace.n_acoustic must be a positive odd number");
    piezo_distribution_from_string(doc.piezo_distribution);
    return doc;
}

inline ConfigDocument parse_config(const std::string& path, bool lax = false) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    ConfigDocument doc = parse_config_text(buf.str(), lax, path);
    doc.config_dir = std::filesystem::path(path).parent_path().string();
    return doc;
}

// Resolve `--config` arguments: explicit paths pass through; bare names look
// in $TRIRES_CONFIG_DIR, then ./configs, then the installed config directory.
inline std::string resolve_config_path(const std::string& name) {
    namespace fs = std::filesystem;
    const bool pathlike = name.find('/') != std::string::npos ||
                          (name.size() > 5 && name.substr(name.size() - 5) == ".json");
    if (pathlike) {
        if (fs::exists(name)) return name;
        throw validation_error("config file '" + name + "' not found");
    }
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("TRIRES_CONFIG_DIR")) dirs.push_back(env);
    dirs.push_back("configs");
#ifdef TRIRES_SOURCE_CONFIG_DIR
    dirs.push_back(TRIRES_SOURCE_CONFIG_DIR);
#endif
    for (const auto& d : dirs) {
        const fs::path p = fs::path(d) / (name + ".json");
        if (fs::exists(p)) return p.string();
    }
    std::ostringstream os;
    os << "config '" << name << "' not found in";
    for (const auto& d : dirs) os << " " << d;
    throw validation_error(os.str());
}

inline std::string default_materials_path() {
#ifdef TRIRES_SOURCE_DATA_DIR
    return std::string(TRIRES_SOURCE_DATA_DIR) + "/materials.dat";
#else
    return "data/materials.dat";
#endif
}

inline std::string default_ledger_path(const ConfigDocument& doc) {
    namespace fs = std::filesystem;
    if (!doc.ledger_path.empty()) {
        fs::path p(doc.ledger_path);
        if (p.is_relative() && !doc.config_dir.empty()) p = fs::path(doc.config_dir) / p;
        return p.string();
    }
#ifdef TRIRES_SOURCE_DATA_DIR
    return std::string(TRIRES_SOURCE_DATA_DIR) + "/improvements.dat";
#else
    return "data/improvements.dat";
#endif
}

// Hz -> rad/s happens here, nowhere else.
inline SystemParams make_system_params(const ConfigDocument& doc, const MaterialRegistry& reg) {
    SystemParams p;
    p.material = reg.lookup(doc.material);
    for (const auto& [k, v] : doc.material_overrides) {
        if (k == "n") p.material.n = v;
        else if (k == "rho") p.material.rho = v;
        else if (k == "c33") p.material.c33 = v;
        else if (k == "d33") p.material.d33 = v;
        else if (k == "p13") p.material.p13 = v;
        else if (k == "r13") p.material.r13 = v;
        else if (k == "eps_r") p.material.eps_r = v;
        else if (k == "v_m") p.material.v_m = v;
    }
    p.L_m = doc.L_m_m;
    p.L_opt = doc.L_opt_m;
    p.r_opt = doc.r_opt_m;
    p.t_pz = doc.t_pz_m;
    p.A_m_explicit = doc.A_m_m2;
    p.piezo_distribution = piezo_distribution_from_string(doc.piezo_distribution);
    p.kappa_opt = to_angular(doc.kappa_opt_hz);
    p.kappa_opt_c1 = to_angular(doc.kappa_opt_c1_hz);
    p.kappa_opt_c2 = to_angular(doc.kappa_opt_c2_hz);
    p.kappa_opt_i = to_angular(doc.kappa_opt_i_hz);
    p.kappa_mu = to_angular(doc.kappa_mu_hz);
    p.kappa_mu_c = to_angular(doc.kappa_mu_c_hz);
    p.kappa_mu_i = to_angular(doc.kappa_mu_i_hz);
    p.Gamma = to_angular(doc.Gamma_hz);
    p.Omega_mu = to_angular(doc.Omega_mu_hz);
    p.Omega_m = to_angular(doc.Omega_m_hz);
    p.Delta_opt = to_angular(doc.Delta_opt_hz);
    p.lambda_p = doc.lambda_p_nm * 1e-9;
    p.E_sim = doc.E_sim_v_m;
    p.P_p = doc.P_p_w;
    p.P_mu = doc.P_mu_w;
    p.T_bath = doc.T_k;
    validate(p);
    return p;
}

} // namespace trires
