#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trires/io.hpp"

using namespace trires;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

fs::path scratch_path(const std::string& name) {
    return fs::temp_directory_path() / ("trires_test_" + name);
}

Spectrum sample_spectrum() {
    Spectrum s;
    s.kind = SpectrumKind::moc;
    s.freq = {consts::two_pi * 11.350e9, consts::two_pi * 11.366e9, consts::two_pi * 11.382e9};
    s.amplitude = {{0.1, -0.2}, {-0.3333333333333333, 0.7}, {1e-12, 2.5e8}};
    for (const auto& a : s.amplitude) s.power.push_back(std::norm(a));
    return s;
}

} // namespace

TEST_CASE("doubles are printed in shortest round-trip form") {
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(fmt_double(2.0) == "2");
    CHECK(fmt_double(std::nan("")) == "nan");
    CHECK(fmt_double(HUGE_VAL) == "inf");
    CHECK(fmt_double(-HUGE_VAL) == "-inf");
    for (const double v : {1.0 / 3.0, 1e300, -2.5e-7, 11.366e9, 6.2831853e-23}) {
        const std::string text = fmt_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
}

TEST_CASE("grid grammar") {
    const GridSpec g = parse_grid("11.350e9:11.382e9:3201");
    CHECK(g.start_hz == 11.350e9);
    CHECK(g.stop_hz == 11.382e9);
    CHECK(g.points == 3201);
    CHECK(g.is_set());

    const auto w = grid_to_angular(parse_grid("1e9 : 2e9 : 5"));
    REQUIRE(w.size() == 5);
    CHECK(w.front() == Approx(consts::two_pi * 1e9).epsilon(1e-15));
    CHECK(w.back() == Approx(consts::two_pi * 2e9).epsilon(1e-15));
    CHECK(w[1] - w[0] == Approx(consts::two_pi * 0.25e9).epsilon(1e-12));

    CHECK_THROWS_AS(parse_grid("1e9:2e9"), validation_error);
    CHECK_THROWS_AS(parse_grid("1e9:2e9:3:4"), validation_error);
    CHECK_THROWS_AS(parse_grid("1e9:2e9:10.5"), validation_error);
    CHECK_THROWS_AS(parse_grid("1e9:2e9:1"), validation_error);
    CHECK_THROWS_AS(parse_grid("1e9:2e9:6e7"), validation_error);
    CHECK_THROWS_AS(parse_grid("2e9:1e9:11"), validation_error);
    CHECK_THROWS_AS(parse_grid("abc:1e9:11"), validation_error);
}

TEST_CASE("spectrum CSV round trip") {
    const Spectrum s = sample_spectrum();
    std::ostringstream os;
    os << "# run: alpha\n";
    write_spectrum_csv(s, os);
    os << "# note: beta\n";

    std::istringstream in(os.str());
    const Spectrum r = read_spectrum_csv(in);
    CHECK(r.kind == SpectrumKind::moc);
    REQUIRE(r.freq.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.freq[i] == Approx(s.freq[i]).epsilon(1e-14));
        CHECK(r.amplitude[i].real() == s.amplitude[i].real());
        CHECK(r.amplitude[i].imag() == s.amplitude[i].imag());
        CHECK(r.power[i] == s.power[i]);
    }
    REQUIRE(r.metadata.count("comments") == 1);
    CHECK(r.metadata.at("comments") == "run: alpha\nnote: beta");

    SECTION("the optional dB column is emitted but not re-read") {
        std::ostringstream osdb;
        write_spectrum_csv(s, osdb, true);
        CHECK_THAT(osdb.str(), ContainsSubstring("power_db"));
        std::istringstream indb(osdb.str());
        const Spectrum rdb = read_spectrum_csv(indb);
        for (std::size_t i = 0; i < 3; ++i) CHECK(rdb.power[i] == s.power[i]);
    }
}

TEST_CASE("spectrum CSV rejects malformed input") {
    CHECK_THROWS_WITH(
        [] {
            std::istringstream in("1e9,0,0,0\n2e9,0,0,0\n");
            return read_spectrum_csv(in);
        }(),
        ContainsSubstring("expected header"));
    CHECK_THROWS_WITH(
        [] {
            std::istringstream in("# just a comment\n");
            return read_spectrum_csv(in);
        }(),
        ContainsSubstring("no CSV header"));
    CHECK_THROWS_WITH(
        [] {
            std::istringstream in("freq_hz,re,im,power\n1e9,0,0\n");
            return read_spectrum_csv(in, "bad.csv");
        }(),
        ContainsSubstring("bad.csv:2"));
    CHECK_THROWS_AS(
        [] {
            std::istringstream in("freq_hz,re,im,power\n1e9,zero,0,0\n2e9,0,0,0\n");
            return read_spectrum_csv(in);
        }(),
        validation_error);
    CHECK_THROWS_WITH(
        [] {
            std::istringstream in("freq_hz,re,im,power\n2e9,0,0,1\n1e9,0,0,1\n");
            return read_spectrum_csv(in);
        }(),
        ContainsSubstring("strictly increasing"));
}

TEST_CASE("metadata sidecar") {
    Spectrum s = sample_spectrum();
    s.metadata["normalization"] = "edge_baseline";
    const fs::path path = scratch_path("sidecar.json");
    write_metadata_sidecar(s, path.string());

    std::ifstream in(path);
    REQUIRE(in.good());
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("kind") == "moc");
    CHECK(j.at("points") == 3);
    CHECK(j.at("freq_start_hz").get<double>() == Approx(11.350e9).epsilon(1e-14));
    CHECK(j.at("freq_stop_hz").get<double>() == Approx(11.382e9).epsilon(1e-14));
    CHECK(j.at("metadata").at("normalization") == "edge_baseline");
    fs::remove(path);
}

TEST_CASE("an empty config document is all defaults") {
    const ConfigDocument doc = parse_config_text("");
    CHECK(doc.material == "vacuum");
    CHECK(doc.lambda_p_nm == 1550.0);
    CHECK(doc.bandwidth_hz == 1000.0);
    CHECK(doc.n_acoustic == 1);
    CHECK(doc.optical_port == "port1");
    CHECK(doc.piezo_distribution == "bulk");
    CHECK_FALSE(doc.grid.is_set());
    CHECK_FALSE(doc.A_m_m2.has_value());
    CHECK(doc.defaulted.at("geometry.L_m_m"));
    CHECK(doc.defaulted.at("rates_hz.kappa_opt"));
    CHECK(doc.defaulted.at("drive.lambda_p_nm"));
    CHECK(doc.warnings.empty());
}

TEST_CASE("config keys are validated strictly unless lax") {
    const std::string text = R"({"rates_hz": {"kappa_opt": 1e6, "kappa_optt": 2e6}})";
    CHECK_THROWS_WITH(parse_config_text(text),
                      ContainsSubstring("unknown config key 'rates_hz.kappa_optt'"));
    const ConfigDocument doc = parse_config_text(text, true);
    CHECK(doc.kappa_opt_hz == 1e6);
    REQUIRE(doc.warnings.size() == 1);
    CHECK_THAT(doc.warnings.front(), ContainsSubstring("kappa_optt"));
    CHECK_FALSE(doc.defaulted.at("rates_hz.kappa_opt"));

    CHECK_THROWS_WITH(parse_config_text(R"({"gemoetry": {}})"),
                      ContainsSubstring("unknown config key 'gemoetry'"));
    CHECK_THROWS_AS(parse_config_text(R"({"rates_hz": {"Gamma": -1}})"), validation_error);
    CHECK_THROWS_AS(parse_config_text(R"({"statespace": {"n_acoustic": 2}})"), validation_error);
    CHECK_THROWS_AS(parse_config_text(R"({"geometry": {"piezo_distribution": "sideways"}})"),
                    validation_error);
    CHECK_THROWS_AS(parse_config_text(R"({"rates_hz": {"kappa_opt": "fast"}})"),
                    validation_error);
    CHECK_THROWS_AS(parse_config_text(R"({"grid": {"start_hz": 2e9, "stop_hz": 1e9, "points": 5}})"),
                    validation_error);
    CHECK_THROWS_AS(parse_config_text(R"({"cavity": {"segments": [{"n": 1.0}]}})"),
                    validation_error);
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), validation_error);
    CHECK_THROWS_AS(parse_config_text("{not json"), validation_error);
}

TEST_CASE("shipped configs materialize into angular-rate parameters") {
    const std::string cfg_dir = TRIRES_SOURCE_CONFIG_DIR;
    const ConfigDocument doc = parse_config(cfg_dir + "/quartz_experiment.json");
    CHECK(doc.material == "quartz_xcut");
    CHECK(doc.kappa_opt_hz == 2.2e6);
    CHECK(doc.optical_port == "port2");
    CHECK(doc.grid.points == 3201);
    CHECK(doc.stack.segments.size() == 3);
    CHECK(doc.config_dir == cfg_dir);

    const MaterialRegistry reg = MaterialRegistry::from_file(default_materials_path());
    const SystemParams p = make_system_params(doc, reg);
    CHECK(p.kappa_opt == Approx(consts::two_pi * 2.2e6).epsilon(1e-15));
    CHECK(p.Omega_m == Approx(consts::two_pi * 11.366e9).epsilon(1e-15));
    CHECK(p.lambda_p == Approx(1546.4e-9).epsilon(1e-15));
    CHECK(p.material.n == 1.528);
    CHECK(p.T_bath == 9.0);

    const ConfigDocument caf2 = parse_config(cfg_dir + "/caf2_experiment.json");
    REQUIRE(caf2.A_m_m2.has_value());
    CHECK(*caf2.A_m_m2 == 2.5736e-8);
    CHECK(caf2.n_floor == 0.21);
    CHECK(caf2.t_pz_surface_m == 1e-9);
    const SystemParams pc = make_system_params(caf2, reg);
    CHECK(pc.A_m() == 2.5736e-8);
    CHECK(pc.kappa_mu == Approx(consts::two_pi * 22.4e6).epsilon(1e-15));

    ConfigDocument ov = doc;
    ov.material_overrides["d33"] = 9.9e-12;
    CHECK(make_system_params(ov, reg).material.d33 == 9.9e-12);
}

TEST_CASE("config name resolution") {
    CHECK_THROWS_WITH(resolve_config_path("/no/such/dir/x.json"), ContainsSubstring("not found"));

    const std::string direct = std::string(TRIRES_SOURCE_CONFIG_DIR) + "/quartz_experiment.json";
    CHECK(resolve_config_path(direct) == direct);
    CHECK_THAT(resolve_config_path("quartz_experiment"), ContainsSubstring("quartz_experiment.json"));

    const fs::path dir = scratch_path("cfgdir");
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "mini.json");
        out << "{}";
    }
    setenv("TRIRES_CONFIG_DIR", dir.string().c_str(), 1);
    CHECK(resolve_config_path("mini") == (dir / "mini.json").string());
    unsetenv("TRIRES_CONFIG_DIR");
    CHECK_THROWS_AS(resolve_config_path("mini"), validation_error);
    fs::remove_all(dir);
}

TEST_CASE("ledger path resolution") {
    ConfigDocument doc;
    CHECK_THAT(default_ledger_path(doc), ContainsSubstring("improvements.dat"));
    doc.ledger_path = "../data/improvements.dat";
    doc.config_dir = "/opt/exp/configs";
    CHECK(default_ledger_path(doc) == "/opt/exp/configs/../data/improvements.dat");
    doc.ledger_path = "/abs/ledger.dat";
    CHECK(default_ledger_path(doc) == "/abs/ledger.dat");
}
