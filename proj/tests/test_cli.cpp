#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "mimodf/cli.hpp"

using namespace mimodf;

TEST_CASE("config parsing: defaults, conversions, errors")
{
    const auto cfg = parse_config("protocols = MAC, CMAC\nsnr_db = 10\ntrials =\n# comment\n");
    CHECK(cfg.trials == 100000);
    CHECK(cfg.nodes == 500);
    CHECK(cfg.sensor.p_f == 0.05);
    CHECK(cfg.sensor.p_d == 0.5);
    CHECK(cfg.protocols.size() == 2);
    CHECK(db_to_linear(cfg.snr_db.at(0)) == doctest::Approx(10));
    CHECK(db_to_linear(0) == 1);
    CHECK(cfg.scenarios().size() == 2);

    const auto full = parse_config(
        "protocols = mac,pac,cmac,cpac\nK = 2,3\nN = 2\nsnr_db = -5, 0, 5, 10\nconstraint = power, energy\n"
        "engine = analytic\nnodes = 1000\nbackend = determinant\ngrid = -4, 8\ngrid_points = 31\n"
        "seed = 0xdeadbeef\nworkers = 0\noutput_dir = results\ncommon_random_numbers = yes\np_0 = 0.3\n");
    CHECK(full.scenarios().size() == 4 * 2 * 4 * 2);
    CHECK(full.engine == EngineSelection::Analytic);
    CHECK(full.backend == MgfBackend::Determinant);
    CHECK(full.grid_range->second == 8);
    CHECK(full.seed == 0xdeadbeefULL);
    CHECK(full.common_random_numbers);
    CHECK(full.sensor.p_1 == doctest::Approx(0.7));

    auto line_of = [](const char* text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("protocols = MAC\ntrials = -5\n") == 2);
    CHECK(line_of("protocols = MAC\n\ncolour = red\n") == 3);
    CHECK(line_of("protocols = MAC\nnodes = 501\n") == 2);
    CHECK(line_of("protocols = MAC\np_f = 1.2\n") == 2);
    CHECK(line_of("protocols = TDMA\n") == 1);
    CHECK(line_of("protocols = MAC\nK = 2\nK = 3\n") == 3);
    CHECK(line_of("protocols = MAC\njust words\n") == 2);
    CHECK(line_of("snr_db = 1\n") == 0);
    CHECK_THROWS_WITH_AS(parse_config("protocols = MAC\ntrials = -5\n"), doctest::Contains("line 2"), ConfigError);
}

TEST_CASE("CSV round trip")
{
    ResultTable t;
    t.push_back({"MAC_K2_N2_power_snr0dB", "MAC", 2, 2, 0, "power", "analytic", -1.2345678901234567,
                 0.1 + 0.2, 0.7, 1 - 0.7});
    t.push_back({"CMAC_K3_N1_energy_snrm5dB", "CMAC", 3, 1, -5, "energy", "mc", 3e-300, 0, 1, 0});
    t.push_back({"x", "PAC", 2, 2, 2.5, "power", "bound", 1, 0.0975, 0.75, 0.25});
    const std::string csv = emit_csv(t);
    CHECK(csv.rfind(std::string(kCsvHeader), 0) == 0);
    CHECK(parse_csv(csv) == t);
    CHECK(emit_csv(parse_csv(csv)) == csv);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n"), ConfigError);
    CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\nonly,three,fields\n"), ConfigError);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-5) == "-5");
}

TEST_CASE("sweep writes per-scenario and combined tables")
{
    const auto dir = std::filesystem::temp_directory_path() / "mimodf_sweep_test";
    std::filesystem::remove_all(dir);
    auto cfg = parse_config("protocols = CMAC\nK = 2\nN = 2\nsnr_db = 10\nengine = both\ntrials = 20000\n"
                            "grid_points = 21\n");
    cfg.output_dir = dir;
    const auto rep = run_sweep(cfg);
    CHECK(rep.ok());
    CHECK(rep.files.size() == 3);  // scenario, combined, diagnostics
    CHECK(std::filesystem::exists(dir / "CMAC_K2_N2_power_snr10dB.csv"));
    CHECK(std::filesystem::exists(dir / "diagnostics.csv"));
    std::size_t mc = 0, an = 0, bound = 0;
    for (const auto& r : rep.table) {
        CHECK(r.q_f >= 0);
        CHECK(r.q_f <= 1);
        CHECK(std::abs(r.q_m - (1 - r.q_d)) <= 1e-12);
        mc += r.engine == "mc";
        an += r.engine == "analytic";
        bound += r.engine == "bound";
    }
    CHECK(mc == 21);
    CHECK(an == 21);
    CHECK(bound == 4);

    std::ifstream f(dir / "combined.csv");
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(parse_csv(buf.str()) == rep.table);

    cfg.engine = EngineSelection::Analytic;
    std::filesystem::remove_all(dir);
    const auto single = run_sweep(cfg);
    CHECK(single.files.size() == 2);

    // an engine failure is recorded and the remaining output kept
    cfg.backend = MgfBackend::ClosedForm;
    cfg.K = {4};
    const auto failed = run_sweep(cfg);
    CHECK_FALSE(failed.ok());
    CHECK(failed.table.size() == 6);  // bound rows survive
    std::filesystem::remove_all(dir);
}

TEST_CASE("output directory can be overridden from the environment")
{
    const auto dir = std::filesystem::temp_directory_path() / "mimodf_env_test";
    const auto conf = std::filesystem::temp_directory_path() / "mimodf_env_test.conf";
    std::ofstream(conf) << "protocols = MAC\noutput_dir = somewhere_else\n";
    ::setenv(kOutputDirEnv, dir.c_str(), 1);
    CHECK(load_config(conf).output_dir == dir);
    ::unsetenv(kOutputDirEnv);
    CHECK(load_config(conf).output_dir == "somewhere_else");
    std::filesystem::remove(conf);
}

TEST_CASE("SVG rendering is deterministic and handles log-zero points")
{
    ResultTable t;
    for (int i = 0; i < 5; ++i) {
        const double qf = std::pow(10.0, -i * 0.5);
        t.push_back({"A", "MAC", 2, 2, 0, "power", "analytic", double(i), qf, 1 - 0.1 * i, 0.1 * i});
        t.push_back({"A", "MAC", 2, 2, 0, "power", "mc", double(i), qf, 1 - 0.1 * i, 0.1 * i});
        t.push_back({"B", "CPAC", 2, 1, 10, "power", "analytic", double(i), qf * 0.5, 1 - 0.2 * i, 0.2 * i});
    }
    t.push_back({"A", "MAC", 2, 2, 0, "power", "bound", 1, 0.0975, 0.75, 0.25});
    const std::string a = render_plot(t, "test"), b = render_plot(t, "test");
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    // two analytic polylines; MC drawn as markers because analytic exists for A
    std::size_t lines = 0;
    for (std::size_t p = a.find("<polyline"); p != std::string::npos; p = a.find("<polyline", p + 1)) ++lines;
    CHECK(lines == 2);
    CHECK(a.find("<circle") != std::string::npos);
    CHECK(a.find("[1 off-axis]") != std::string::npos);  // the q_m = 0 point
    CHECK(a.find("#d62728") != std::string::npos);
    CHECK(a.find("#00a5b5") != std::string::npos);
    CHECK_THROWS_AS(render_plot({}), std::invalid_argument);
}
