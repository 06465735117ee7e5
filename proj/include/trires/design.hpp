#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trires/errors.hpp"
#include "trires/materials.hpp"
#include "trires/statespace.hpp"

namespace trires {

struct LedgerEntry {
    std::string label;
    std::optional<double> g_em_factor;
    std::optional<double> C_em_factor;
    std::optional<double> eta_opt_target;
    std::optional<double> eta_mu_target;
    bool only_gem = false;  // entry acts through g_em alone; implies C factor = g factor^2
    std::string note;
};

struct LedgerBaseline {
    double g_em = 0.0;  // rad/s
    double C_em = 0.0;
    double C_om = 0.0;
    double C_eo = 0.0;
    double eta_opt = 0.0;
    double eta_mu = 0.0;
};

inline void validate(const LedgerEntry& e) {
    if (e.label.empty()) throw validation_error("ledger entry has no label");
    auto positive = [&e](const std::optional<double>& v, const char* what) {
        if (v && *v <= 0.0)
            throw validation_error("ledger entry '" + e.label + "': " + what + " must be positive");
    };
    positive(e.g_em_factor, "g_em factor");
    positive(e.C_em_factor, "C_em factor");
    auto efficiency = [&e](const std::optional<double>& v, const char* what) {
        if (v && !(*v > 0.0 && *v <= 1.0))
            throw validation_error("ledger entry '" + e.label + "': " + what + " must lie in (0, 1]");
    };
    efficiency(e.eta_opt_target, "eta_opt target");
    efficiency(e.eta_mu_target, "eta_mu target");
    if (e.only_gem && e.g_em_factor && e.C_em_factor) {
        const double implied = *e.g_em_factor * *e.g_em_factor;
        if (std::abs(*e.C_em_factor - implied) > 1e-9 * implied)
            throw validation_error("ledger entry '" + e.label +
                                   "': C_em factor must equal g_em factor squared for a "
                                   "g_em-only upgrade");
    }
}

struct ImprovementLedger {
    LedgerBaseline baseline;
    std::vector<LedgerEntry> entries;

    const LedgerEntry& find(const std::string& label) const {
        for (const auto& e : entries)
            if (e.label == label) return e;
        std::ostringstream os;
        os << "unknown ledger entry '" << label << "'; available:";
        for (const auto& e : entries) os << " " << e.label;
        throw validation_error(os.str());
    }

    static ImprovementLedger from_string(const std::string& text,
                                         const std::string& origin = "<string>") {
        ImprovementLedger led;
        bool have_baseline = false;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        std::vector<std::pair<std::string, std::string>> record;
        auto flush = [&]() {
            if (record.empty()) return;
            if (record.front().first != "name")
                throw validation_error(origin + ": each record must start with 'name = ...'");
            const std::string name = record.front().second;
            if (name == "baseline") {
                if (have_baseline)
                    throw validation_error(origin + ": duplicate baseline record");
                for (std::size_t i = 1; i < record.size(); ++i) {
                    const auto& [k, v] = record[i];
                    const double x = detail::parse_double(v, origin + " baseline." + k);
                    if (k == "g_em_hz")       led.baseline.g_em = consts::two_pi * x;
                    else if (k == "c_em")     led.baseline.C_em = x;
                    else if (k == "c_om")     led.baseline.C_om = x;
                    else if (k == "c_eo")     led.baseline.C_eo = x;
                    else if (k == "eta_opt")  led.baseline.eta_opt = x;
                    else if (k == "eta_mu")   led.baseline.eta_mu = x;
                    else
                        throw validation_error(origin + ": unknown baseline field '" + k + "'");
                }
                have_baseline = true;
            } else {
                LedgerEntry e;
                e.label = detail::lower(name);
                for (std::size_t i = 1; i < record.size(); ++i) {
                    const auto& [k, v] = record[i];
                    if (k == "note") { e.note = v; continue; }
                    if (k == "only_gem") {
                        e.only_gem = (v == "1" || detail::lower(v) == "true");
                        continue;
                    }
                    const double x = detail::parse_double(v, origin + " " + e.label + "." + k);
                    if (k == "g_em_factor")          e.g_em_factor = x;
                    else if (k == "c_em_factor")     e.C_em_factor = x;
                    else if (k == "eta_opt_target")  e.eta_opt_target = x;
                    else if (k == "eta_mu_target")   e.eta_mu_target = x;
                    else
                        throw validation_error(origin + ": unknown ledger field '" + k + "'");
                }
                validate(e);
                for (const auto& prev : led.entries)
                    if (prev.label == e.label)
                        throw validation_error(origin + ": duplicate ledger entry '" + e.label + "'");
                led.entries.push_back(std::move(e));
            }
            record.clear();
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
            record.emplace_back(key, val);
        }
        flush();
        if (!have_baseline)
            throw validation_error(origin + ": ledger has no baseline record");
        return led;
    }

    static ImprovementLedger from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw validation_error("cannot open ledger file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_string(buf.str(), path);
    }
};

struct Projection {
    double g_em = 0.0;  // rad/s
    double C_em = 0.0;
    double C_om = 0.0;
    double C_eo = 0.0;
    double eta_opt = 0.0;
    double eta_mu = 0.0;
    double eta = 0.0;
    bool matched = false;
};

// Apply the selected upgrade factors onto the baseline. Selection has set
// semantics (order-free, duplicates rejected); an empty selection returns
// the baseline itself. With `matched`, the projected C_om tracks the
// projected C_em (the ledger's matched-cooperativity scenario); otherwise
// the baseline C_om is kept.
inline Projection project(const ImprovementLedger& led, const std::vector<std::string>& selection,
                          bool matched = false) {
    std::set<std::string> seen;
    for (const auto& raw : selection) {
        const std::string label = detail::lower(detail::trim(raw));
        if (!seen.insert(label).second)
            throw validation_error("ledger entry '" + label + "' selected twice");
    }
    Projection out;
    out.g_em = led.baseline.g_em;
    out.C_em = led.baseline.C_em;
    out.C_eo = led.baseline.C_eo;
    out.eta_opt = led.baseline.eta_opt;
    out.eta_mu = led.baseline.eta_mu;
    out.matched = matched;
    for (const auto& label : seen) {
        const LedgerEntry& e = led.find(label);
        if (e.g_em_factor) out.g_em *= *e.g_em_factor;
        if (e.C_em_factor)
            out.C_em *= *e.C_em_factor;
        else if (e.g_em_factor)
            out.C_em *= *e.g_em_factor * *e.g_em_factor;
        if (e.eta_opt_target) out.eta_opt = *e.eta_opt_target;
        if (e.eta_mu_target) out.eta_mu = *e.eta_mu_target;
    }
    out.C_om = matched ? out.C_em : led.baseline.C_om;
    out.eta = closed_form_eta_peak(out.C_om, out.C_em, out.C_eo, out.eta_opt, out.eta_mu);
    return out;
}

} // namespace trires
