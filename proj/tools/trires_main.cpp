// trires — triply resonant transduction toolkit, command-line front end.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "trires/cavity.hpp"
#include "trires/couplings.hpp"
#include "trires/design.hpp"
#include "trires/fit.hpp"
#include "trires/io.hpp"
#include "trires/sensing.hpp"
#include "trires/statespace.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace trires;

double hz(double omega) { return omega / consts::two_pi; }

MaterialRegistry load_registry(const std::string& override_path) {
    const std::string path = override_path.empty() ? default_materials_path() : override_path;
    return MaterialRegistry::from_file(path);
}

struct Loaded {
    ConfigDocument doc;
    SystemParams params;
};

Loaded load_config(const std::string& name, const std::string& materials, bool lax) {
    if (name.empty()) throw validation_error("--config is required for this subcommand");
    Loaded l;
    l.doc = parse_config(resolve_config_path(name), lax);
    for (const auto& w : l.doc.warnings) std::cerr << "warning: " << w << "\n";
    const MaterialRegistry reg = load_registry(materials);
    l.params = make_system_params(l.doc, reg);
    for (const auto& w : validate(l.params.material)) std::cerr << "warning: " << w << "\n";
    return l;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw validation_error("cannot write output file '" + out_path + "'");
    out << text;
}

// Grid precedence: --grid flag, then the config grid, then an automatic
// window around the acoustic resonance wide enough for OMIT baselines.
std::vector<double> choose_grid(const std::string& flag, const ConfigDocument& doc,
                                const SystemParams& p) {
    if (!flag.empty()) return grid_to_angular(parse_grid(flag));
    if (doc.grid.is_set()) return grid_to_angular(doc.grid);
    const double center = hz(p.Omega_m);
    if (center <= 0.0)
        throw validation_error("no grid given and Omega_m unset; pass --grid start:stop:points");
    const double half = std::max(25.0 * hz(p.Gamma), 5.5 * hz(p.kappa_opt));
    if (half <= 0.0)
        throw validation_error("no grid given and rates unset; pass --grid start:stop:points");
    return grid_to_angular(GridSpec{center - half, center + half, 2001});
}

// ---------------------------------------------------------------------- //

void cmd_materials(const std::string& materials, const std::string& out_path) {
    const MaterialRegistry reg = load_registry(materials);
    std::ostringstream os;
    os << "registered materials (" << reg.size() << ")\n";
    for (const auto& name : reg.names()) {
        const MaterialProps& m = reg.lookup(name);
        os << "  " << name << ": n=" << fmt_double(m.n) << " rho=" << fmt_double(m.rho)
           << " c33=" << fmt_double(m.c33) << " d33=" << fmt_double(m.d33)
           << " p13=" << fmt_double(m.p13) << " r13=" << fmt_double(m.r13)
           << " eps_r=" << fmt_double(m.eps_r);
        if (m.v_m) os << " v_m=" << fmt_double(*m.v_m);
        os << "\n";
    }
    emit(os.str(), out_path);
}

json couple_report(const SystemParams& p, const CouplingSet& cs) {
    json j;
    j["material"] = p.material.name;
    j["Omega_B_hz"] = hz(brillouin_frequency(p));
    j["mechanical_fsr_hz"] = hz(mechanical_fsr(p));
    j["longitudinal_index"] = longitudinal_index(p);
    j["phase_match_envelope"] = phase_match_envelope(p.Omega_m, brillouin_frequency(p),
                                                     mechanical_fsr(p));
    j["piezo_distribution"] = to_string(p.piezo_distribution);
    j["piezo_distribution_factor"] = p.t_pz > 0.0 ? piezo_distribution_factor(p) : 0.0;
    j["g_om0_hz"] = hz(cs.g_om0);
    j["g_om_hz"] = hz(cs.g_om);
    j["g_em_hz"] = hz(cs.g_em);
    j["g_eo0_hz"] = hz(cs.g_eo0);
    j["g_eo_hz"] = hz(cs.g_eo);
    j["N_p"] = cs.N_p;
    j["g_om0_single_pass_hz"] = hz(cs.g_om0_sp);
    j["g_om_single_pass_hz"] = hz(cs.g_om_sp);
    j["N_p_single_pass"] = cs.N_p_sp;
    j["C_om"] = cs.C_om;
    j["C_em"] = cs.C_em;
    j["C_eo"] = cs.C_eo;
    j["C_sp"] = cs.C_sp;
    return j;
}

void cmd_couple(const std::string& config, const std::string& materials, bool lax,
                const std::string& out_path) {
    const Loaded l = load_config(config, materials, lax);
    const CouplingSet cs = compute_couplings(l.params);
    const json j = couple_report(l.params, cs);
    std::ostringstream os;
    os << "coupling report (" << l.params.material.name << ")\n";
    for (const auto& [k, v] : j.items()) {
        os << "  " << k << " = ";
        if (v.is_string())
            os << v.get<std::string>();
        else if (v.is_number_integer())
            os << v.get<long>();
        else
            os << fmt_double(v.get<double>());
        os << "\n";
    }
    std::cout << os.str();
    if (!out_path.empty()) emit(j.dump(2) + "\n", out_path);
}

void cmd_spectrum(const std::string& kind_name, const std::string& config,
                  const std::string& materials, bool lax, const std::string& grid_flag,
                  bool db, const std::string& out_path) {
    const SpectrumKind kind = spectrum_kind_from_string(kind_name);
    const Loaded l = load_config(config, materials, lax);
    const CouplingSet cs = compute_couplings(l.params);
    const OpticalPort port = optical_port_from_string(l.doc.optical_port);
    const StateSpaceModel model = build(l.params, cs, l.doc.n_acoustic, port);
    const std::vector<double> grid = choose_grid(grid_flag, l.doc, l.params);
    Spectrum s;
    if (kind == SpectrumKind::omit)
        s = omit_spectrum(model, grid);
    else if (kind == SpectrumKind::reflection)
        s = reflection_spectrum(model, grid);
    else
        s = transduction_spectrum(model, grid, kind);
    std::ostringstream os;
    write_spectrum_csv(s, os, db);
    emit(os.str(), out_path);
    if (!out_path.empty()) write_metadata_sidecar(s, out_path + ".meta.json");
}

std::pair<double, double> fsr_band(const std::string& band_flag, const SystemParams& p) {
    if (!band_flag.empty()) {
        const auto colon = band_flag.find(':');
        if (colon == std::string::npos || band_flag.find(':', colon + 1) != std::string::npos)
            throw validation_error("--band must be lo_hz:hi_hz");
        const double lo = detail::parse_double(band_flag.substr(0, colon), "band lo");
        const double hi = detail::parse_double(band_flag.substr(colon + 1), "band hi");
        if (!(hi > lo) || lo <= 0.0) throw validation_error("--band needs 0 < lo < hi");
        return {consts::two_pi * lo, consts::two_pi * hi};
    }
    const double f0 = consts::c0 / p.lambda_p;
    return {consts::two_pi * (f0 - 45e9), consts::two_pi * (f0 + 45e9)};
}

void cmd_fsr(const std::string& config, const std::string& materials, bool lax,
             const std::string& band_flag, const std::string& out_path) {
    const Loaded l = load_config(config, materials, lax);
    if (l.doc.stack.segments.empty())
        throw validation_error("config has no cavity.segments; fsr needs a stack");
    validate(l.doc.stack);
    const auto [lo, hi] = fsr_band(band_flag, l.params);
    const auto spacings = mode_spacings(l.doc.stack, lo, hi);
    if (spacings.empty())
        throw validation_error("fewer than two cavity modes in the requested band");
    double mean = 0.0, mn = spacings.front().spacing, mx = mn;
    for (const auto& sp : spacings) {
        mean += sp.spacing;
        mn = std::min(mn, sp.spacing);
        mx = std::max(mx, sp.spacing);
    }
    mean /= static_cast<double>(spacings.size());
    std::ostringstream os;
    os << "# mean_fsr_ghz: " << fmt_double(hz(mean) / 1e9) << "\n";
    os << "# pkpk_ghz: " << fmt_double(hz(mx - mn) / 1e9) << "\n";
    os << "wavelength_nm,spacing_ghz\n";
    for (const auto& sp : spacings)
        os << fmt_double(sp.lambda * 1e9) << "," << fmt_double(hz(sp.spacing) / 1e9) << "\n";
    emit(os.str(), out_path);
}

void cmd_fsr_match(const std::string& config, const std::string& materials, bool lax,
                   const std::string& band_flag, double target_ghz, double tolerance_mhz,
                   const std::string& out_path) {
    const Loaded l = load_config(config, materials, lax);
    if (l.doc.stack.segments.empty())
        throw validation_error("config has no cavity.segments; fsr needs a stack");
    validate(l.doc.stack);
    if (target_ghz <= 0.0) throw validation_error("--target-ghz must be positive");
    if (tolerance_mhz <= 0.0) throw validation_error("--tolerance-mhz must be positive");
    const auto [lo, hi] = fsr_band(band_flag, l.params);
    const auto m = match_fsr(l.doc.stack, consts::two_pi * target_ghz * 1e9,
                             consts::two_pi * tolerance_mhz * 1e6, lo, hi);
    json j;
    j["target_ghz"] = target_ghz;
    j["tolerance_mhz"] = tolerance_mhz;
    j["matched"] = m.has_value();
    if (m) {
        j["wavelength_nm"] = m->lambda * 1e9;
        j["displacement_nm"] = m->displacement * 1e9;
        j["achieved_ghz"] = hz(m->achieved) / 1e9;
        std::cout << "match: lambda = " << fmt_double(m->lambda * 1e9)
                  << " nm, displacement = " << fmt_double(m->displacement * 1e9)
                  << " nm, spacing = " << fmt_double(hz(m->achieved) / 1e9) << " GHz\n";
    } else {
        std::cout << "no mode pair reaches " << fmt_double(target_ghz)
                  << " GHz within the piezo travel\n";
    }
    if (!out_path.empty()) emit(j.dump(2) + "\n", out_path);
}

void cmd_sense(const std::string& config, const std::string& materials, bool lax, double nm,
               bool have_nm, double pmu_dbm, bool have_pmu, double bandwidth_flag,
               const std::string& out_path) {
    Loaded l = load_config(config, materials, lax);
    if (have_pmu) l.params.P_mu = 1e-3 * std::pow(10.0, pmu_dbm / 10.0);
    const double bandwidth = bandwidth_flag > 0.0 ? bandwidth_flag : l.doc.bandwidth_hz;
    const CouplingSet cs = compute_couplings(l.params);
    json j;
    std::ostringstream os;
    os << "calibration report (" << l.params.material.name << ")\n";

    const double u0 = zero_point_displacement(l.params);
    j["zero_point_m"] = u0;
    os << "  zero-point displacement     = " << fmt_double(u0) << " m\n";

    const ThermalOccupancy th = thermal_occupancy(l.params.Omega_m, l.params.T_bath, cs.C_om);
    j["n_bath"] = th.n_bath;
    j["n_eff"] = th.n_eff;
    j["C_om"] = cs.C_om;
    os << "  thermal occupancy (bath)    = " << fmt_double(th.n_bath) << "\n";
    os << "  thermal occupancy (cooled)  = " << fmt_double(th.n_eff) << "\n";

    if (have_nm) {
        if (nm < 0.0) throw validation_error("--nm must be non-negative");
        j["n_m"] = nm;
        const double x_pk = displacement(l.params, nm, DisplacementConvention::driven_peak);
        const double x_rms = displacement(l.params, nm, DisplacementConvention::rms_pair);
        j["displacement_driven_peak_m"] = x_pk;
        j["displacement_rms_pair_m"] = x_rms;
        os << "  displacement (driven peak)  = " << fmt_double(x_pk) << " m\n";
        os << "  displacement (rms pair)     = " << fmt_double(x_rms) << " m\n";
        const double P_sig = phonons_to_signal_power(l.params, cs, nm);
        j["signal_power_w"] = P_sig;
        os << "  detected signal power       = " << fmt_double(P_sig) << " W\n";
        const double g = extract_gem(l.params, nm, l.params.P_mu);
        j["g_em_extracted_hz"] = hz(g);
        os << "  extracted g_em              = " << fmt_double(hz(g)) << " Hz\n";
        const double d33 = extract_d33(l.params, g);
        j["d33_extracted_m_per_v"] = d33;
        os << "  extracted d33               = " << fmt_double(d33) << " m/V\n";
        // alternative hypothesis: the response originates in a thin surface layer
        if (l.params.piezo_distribution == PiezoDistribution::bulk &&
            l.doc.t_pz_surface_m > 0.0) {
            SystemParams sp = l.params;
            sp.piezo_distribution = PiezoDistribution::surface_one_side;
            sp.t_pz = l.doc.t_pz_surface_m;
            const double d33_s = extract_d33(sp, g);
            j["d33_surface_m_per_v"] = d33_s;
            j["t_pz_surface_m"] = l.doc.t_pz_surface_m;
            os << "  d33 (surface-layer model)   = " << fmt_double(d33_s) << " m/V over "
               << fmt_double(l.doc.t_pz_surface_m) << " m\n";
        }
    }

    const SensitivityFloor fl = sensitivity_floor(l.params, l.doc.n_floor, bandwidth);
    j["noise_floor_phonons"] = l.doc.n_floor;
    j["bandwidth_hz"] = fl.bandwidth;
    j["displacement_density_m_per_rthz"] = fl.displacement_density;
    j["d33_sensitivity_m_per_v"] = fl.d33_sensitivity;
    os << "  displacement density        = " << fmt_double(fl.displacement_density)
       << " m/rtHz (rms pair, n_floor = " << fmt_double(l.doc.n_floor) << ")\n";
    os << "  d33 sensitivity             = " << fmt_double(fl.d33_sensitivity) << " m/V at "
       << fmt_double(fl.bandwidth) << " Hz\n";

    const EnhancementRatio er = signal_enhancement_ratio(l.params);
    j["cavity_enhancement"] = er.direct;
    j["cavity_enhancement_formula"] = er.formula;
    j["finesse"] = er.finesse;
    os << "  cavity signal enhancement   = " << fmt_double(er.direct) << " (formula "
       << fmt_double(er.formula) << ", finesse " << fmt_double(er.finesse) << ")\n";

    std::cout << os.str();
    if (!out_path.empty()) emit(j.dump(2) + "\n", out_path);
}

void cmd_design(const std::string& config, const std::string& materials, bool lax,
                const std::string& ledger_flag, const std::string& select, bool matched,
                const std::string& out_path) {
    std::string ledger_path = ledger_flag;
    if (ledger_path.empty()) {
        if (!config.empty()) {
            ConfigDocument doc = parse_config(resolve_config_path(config), lax);
            ledger_path = default_ledger_path(doc);
        } else {
            ledger_path = default_ledger_path(ConfigDocument{});
        }
    }
    (void)materials;
    const ImprovementLedger led = ImprovementLedger::from_file(ledger_path);
    std::vector<std::string> selection;
    if (!select.empty()) {
        if (detail::lower(select) == "all") {
            for (const auto& e : led.entries) selection.push_back(e.label);
        } else {
            std::size_t pos = 0;
            while (pos <= select.size()) {
                const auto comma = select.find(',', pos);
                const std::string label =
                    detail::trim(select.substr(pos, comma == std::string::npos
                                                        ? std::string::npos
                                                        : comma - pos));
                if (!label.empty()) selection.push_back(detail::lower(label));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
    }
    const Projection pr = project(led, selection, matched);
    json j;
    j["ledger"] = ledger_path;
    j["selected"] = selection;
    j["matched"] = matched;
    json base;
    base["g_em_hz"] = hz(led.baseline.g_em);
    base["C_em"] = led.baseline.C_em;
    base["C_om"] = led.baseline.C_om;
    base["C_eo"] = led.baseline.C_eo;
    base["eta_opt"] = led.baseline.eta_opt;
    base["eta_mu"] = led.baseline.eta_mu;
    j["baseline"] = base;
    json proj;
    proj["g_em_hz"] = hz(pr.g_em);
    proj["C_em"] = pr.C_em;
    proj["C_om"] = pr.C_om;
    proj["C_eo"] = pr.C_eo;
    proj["eta_opt"] = pr.eta_opt;
    proj["eta_mu"] = pr.eta_mu;
    proj["eta_peak"] = pr.eta;
    j["projected"] = proj;
    std::ostringstream os;
    os << "improvement projection (" << ledger_path << ")\n";
    os << "  selected:";
    if (selection.empty())
        os << " (none — baseline)";
    else
        for (const auto& s : selection) os << " " << s;
    os << "\n";
    os << "  g_em    " << fmt_double(hz(led.baseline.g_em)) << " Hz -> "
       << fmt_double(hz(pr.g_em)) << " Hz\n";
    os << "  C_em    " << fmt_double(led.baseline.C_em) << " -> " << fmt_double(pr.C_em) << "\n";
    os << "  C_om    " << fmt_double(led.baseline.C_om) << " -> " << fmt_double(pr.C_om)
       << (matched ? "  (matched)" : "") << "\n";
    os << "  C_eo    " << fmt_double(led.baseline.C_eo) << " -> " << fmt_double(pr.C_eo) << "\n";
    os << "  eta_opt " << fmt_double(led.baseline.eta_opt) << " -> " << fmt_double(pr.eta_opt)
       << "\n";
    os << "  eta_mu  " << fmt_double(led.baseline.eta_mu) << " -> " << fmt_double(pr.eta_mu)
       << "\n";
    os << "  eta     " << fmt_double(pr.eta) << " (peak photon-number efficiency)\n";
    std::cout << os.str();
    if (!out_path.empty()) emit(j.dump(2) + "\n", out_path);
}

void cmd_fit(const std::string& kind_name, const std::string& config,
             const std::string& materials, bool lax, const std::string& data_path,
             const std::string& free_list, const std::string& space_name,
             const std::string& out_path) {
    const SpectrumKind kind = spectrum_kind_from_string(kind_name);
    const Loaded l = load_config(config, materials, lax);
    if (data_path.empty()) throw validation_error("--data is required");
    FitProblem prob;
    prob.params = l.params;
    prob.couplings = compute_couplings(l.params);
    prob.port = optical_port_from_string(l.doc.optical_port);
    prob.n_acoustic = l.doc.n_acoustic;
    prob.kind = kind;
    prob.data = read_spectrum_csv_file(data_path);
    if (space_name.empty())
        prob.space = (kind == SpectrumKind::omit) ? ResidualSpace::linear
                                                  : ResidualSpace::log_power;
    else if (space_name == "linear")
        prob.space = ResidualSpace::linear;
    else if (space_name == "log")
        prob.space = ResidualSpace::log_power;
    else
        throw validation_error("--space must be linear or log");

    std::size_t pos = 0;
    while (pos <= free_list.size()) {
        const auto comma = free_list.find(',', pos);
        const std::string name = detail::trim(
            free_list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!name.empty()) {
            double init = 0.0;
            if (name == "g_om") init = prob.couplings.g_om;
            else if (name == "g_em") init = prob.couplings.g_em;
            else if (name == "g_eo") init = prob.couplings.g_eo;
            else if (name == "Gamma") init = l.params.Gamma;
            else if (name == "kappa_opt") init = l.params.kappa_opt;
            else if (name == "kappa_mu") init = l.params.kappa_mu;
            else if (name == "Delta_opt") init = l.params.Delta_opt;
            else if (name == "Omega_m") init = l.params.Omega_m;
            else if (name == "amplitude_scale") init = 1.0;
            else if (name == "baseline") init = 0.0;
            else throw validation_error("unknown fit parameter '" + name + "'");
            prob.free_params.push_back(make_fit_param(name, init));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (prob.free_params.empty()) throw validation_error("--free lists no parameters");

    const FitResult res = fit(prob);
    json j;
    j["kind"] = kind_name;
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["residual_norm"] = res.residual_norm;
    j["condition_number"] = res.condition_number;
    j["message"] = res.message;
    json best;
    json sigma;
    for (std::size_t i = 0; i < prob.free_params.size(); ++i) {
        const std::string& name = prob.free_params[i].name;
        const bool angular = (name != "amplitude_scale" && name != "baseline");
        const double scale = angular ? consts::two_pi : 1.0;
        const std::string label = angular ? name + "_hz" : name;
        best[label] = res.best.at(name) / scale;
        const double var = res.covariance(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(i));
        sigma[label] = var > 0.0 ? std::sqrt(var) / scale : 0.0;
    }
    j["best"] = best;
    j["sigma"] = sigma;
    std::cout << "fit " << kind_name << ": " << (res.converged ? "converged" : "not converged")
              << " in " << res.iterations << " iterations, residual norm "
              << fmt_double(res.residual_norm) << "\n";
    for (const auto& [k, v] : best.items())
        std::cout << "  " << k << " = " << fmt_double(v.get<double>()) << "\n";
    if (!out_path.empty()) emit(j.dump(2) + "\n", out_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"triply resonant microwave-acoustic-optical transduction toolkit"};
    app.require_subcommand(1);

    std::string config, materials, out, grid, band, select, ledger, data, free_list, space;
    bool lax = false, db = false, matched = false;
    double nm = 0.0, pmu_dbm = 0.0, bandwidth = 0.0, target_ghz = 0.0, tolerance_mhz = 2.0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config, "config name or path (.json)");
        sub->add_option("--materials", materials, "materials data file");
        sub->add_option("--out", out, "write output to this file");
        sub->add_flag("--lax", lax, "warn on unknown config keys instead of failing");
    };

    std::function<void()> run;

    CLI::App* sub_materials = app.add_subcommand("materials", "list the material registry");
    add_common(sub_materials, false);
    sub_materials->callback([&] { run = [&] { cmd_materials(materials, out); }; });

    CLI::App* sub_couple = app.add_subcommand("couple", "coupling rates and cooperativities");
    add_common(sub_couple, true);
    sub_couple->callback([&] { run = [&] { cmd_couple(config, materials, lax, out); }; });

    CLI::App* sub_spectrum = app.add_subcommand("spectrum", "simulate a spectrum");
    std::string kind;
    sub_spectrum->add_option("kind", kind, "omit, moc, or om")
        ->required()
        ->check(CLI::IsMember({"omit", "moc", "om", "reflection"}));
    add_common(sub_spectrum, true);
    sub_spectrum->add_option("--grid", grid, "start:stop:points in Hz");
    sub_spectrum->add_flag("--db", db, "append a power_db column");
    sub_spectrum->callback(
        [&] { run = [&] { cmd_spectrum(kind, config, materials, lax, grid, db, out); }; });

    CLI::App* sub_fsr = app.add_subcommand("fsr", "composite-cavity mode spacings");
    add_common(sub_fsr, true);
    sub_fsr->add_option("--band", band, "optical band lo_hz:hi_hz (default: pump +/- 45 GHz)");
    CLI::App* sub_match = sub_fsr->add_subcommand("match", "tune a spacing onto a target");
    sub_match->fallthrough();  // let parent options (--config, ...) appear after `match`
    sub_match->add_option("--target-ghz", target_ghz, "target spacing in GHz")->required();
    sub_match->add_option("--tolerance-mhz", tolerance_mhz, "acceptance tolerance in MHz");
    sub_fsr->callback([&] {
        if (sub_match->parsed())
            run = [&] {
                cmd_fsr_match(config, materials, lax, band, target_ghz, tolerance_mhz, out);
            };
        else
            run = [&] { cmd_fsr(config, materials, lax, band, out); };
    });

    CLI::App* sub_sense = app.add_subcommand("sense", "piezo calibration report");
    add_common(sub_sense, true);
    CLI::Option* opt_nm = sub_sense->add_option("--nm", nm, "measured phonon occupancy");
    CLI::Option* opt_pmu =
        sub_sense->add_option("--pmu-dbm", pmu_dbm, "microwave drive power in dBm");
    sub_sense->add_option("--bandwidth-hz", bandwidth, "detection bandwidth");
    sub_sense->callback([&] {
        const bool have_nm = opt_nm->count() > 0;
        const bool have_pmu = opt_pmu->count() > 0;
        run = [&, have_nm, have_pmu] {
            cmd_sense(config, materials, lax, nm, have_nm, pmu_dbm, have_pmu, bandwidth, out);
        };
    });

    CLI::App* sub_design = app.add_subcommand("design", "improvement-ledger projection");
    CLI::App* sub_project = sub_design->add_subcommand("project", "apply selected upgrades");
    sub_design->require_subcommand(1);
    add_common(sub_project, false);
    sub_project->add_option("--config", config, "config name or path (for its ledger)");
    sub_project->add_option("--ledger", ledger, "ledger file (overrides config)");
    sub_project->add_option("--select", select, "comma-separated entry labels, or 'all'");
    sub_project->add_flag("--matched", matched, "project C_om matched to C_em");
    sub_project->callback([&] {
        run = [&] { cmd_design(config, materials, lax, ledger, select, matched, out); };
    });

    CLI::App* sub_fit = app.add_subcommand("fit", "fit the model to a measured spectrum");
    std::string fit_kind;
    sub_fit->add_option("kind", fit_kind, "omit, moc, or om")
        ->required()
        ->check(CLI::IsMember({"omit", "moc", "om"}));
    add_common(sub_fit, true);
    sub_fit->add_option("--data", data, "spectrum CSV to fit")->required();
    sub_fit->add_option("--free", free_list, "comma-separated free parameters")->required();
    sub_fit->add_option("--space", space, "residual space: linear or log");
    sub_fit->callback([&] {
        run = [&] { cmd_fit(fit_kind, config, materials, lax, data, free_list, space, out); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 1;
    }

    try {
        if (run) run();
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
