#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "slpulse/cli.hpp"
#include "slpulse/config_io.hpp"
#include "slpulse/output.hpp"

using namespace slpulse;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("slpulse_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_cli(std::initializer_list<std::string> args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli_dispatch(std::vector<std::string>(args), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

const char* kTinyConfig =
    "decay.model = cold_linear\n"
    "decay.a = 0\n"
    "l0 = 2\n"
    "ell = 2\n"
    "dz = 0.1\n"
    "total_time = 5\n"
    "z_max = 8\n";

}  // namespace

TEST_CASE("config parsing") {
    SECTION("defaults reproduce the reference parameters") {
        const ParsedConfig parsed = parse_config("decay.a = 0.2\n");
        CHECK(parsed.config.params.gamma == 1.0);
        CHECK(parsed.config.params.omega_c == 0.69);
        CHECK(parsed.config.params.g2n == 138.0);
        CHECK(parsed.config.params.light_speed() == 138.0);
        CHECK(parsed.config.l0 == 5.0);
        CHECK(parsed.config.ell == 30);
        CHECK(parsed.config.grid.dz == 0.05);
        CHECK(parsed.config.cfl == 0.5);
        CHECK(parsed.config.total_time == 100.0);
        CHECK(parsed.config.auto_domain);
        CHECK(parsed.config.auto_stride);
        CHECK(parsed.output_dir == "out");
        CHECK(std::get<decay::ColdLinear>(parsed.config.decay.variant()).a == 0.2);
    }

    SECTION("comments, blanks and spacing are tolerated") {
        const ParsedConfig parsed = parse_config(
            "# run parameters\n"
            "\n"
            "  decay.a =   0.01   # cold gas\n"
            "l0=2\n");
        CHECK(std::get<decay::ColdLinear>(parsed.config.decay.variant()).a == 0.01);
        CHECK(parsed.config.l0 == 2.0);
    }

    SECTION("an empty decay section requires decay.a") {
        CHECK_THROWS_MATCHES(parse_config("l0 = 5\n"), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("decay.a")));
    }

    SECTION("oversized CFL numbers are rejected at parse time") {
        CHECK_THROWS_MATCHES(parse_config("decay.a = 0\ncfl = 1.5\n"), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("CFL")));
    }

    SECTION("unknown keys are rejected with their line number") {
        CHECK_THROWS_MATCHES(parse_config("decay.a = 0\n\nomega = 3\n"), ConfigError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("line 3")));
    }

    SECTION("duplicates, bad numbers and stray decay keys are diagnosed") {
        CHECK_THROWS_AS(parse_config("decay.a = 0\ndecay.a = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("decay.a = fast\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("decay.model = zero\ndecay.a = 0.1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("decay.model = rainbow\n"), ConfigError);
    }

    SECTION("all missing required keys are listed together") {
        try {
            parse_config("decay.model = bec\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            CHECK(what.find("decay.k_c") != std::string::npos);
            CHECK(what.find("decay.hbar_over_m") != std::string::npos);
            CHECK(what.find("decay.length") != std::string::npos);
        }
    }

    SECTION("decay tables parse and validate") {
        const ParsedConfig parsed =
            parse_config("decay.model = table\ndecay.table = 0, 0.5, 1.25\n");
        const auto& table = std::get<decay::CustomTable>(parsed.config.decay.variant());
        REQUIRE(table.rates.size() == 3);
        CHECK(table.rates[2] == 1.25);
        CHECK_THROWS_AS(parse_config("decay.model = table\ndecay.table = 0.5, 1\n"),
                        ConfigError);
    }
}

TEST_CASE("config round trip") {
    auto roundtrip = [](const ParsedConfig& parsed) {
        const ParsedConfig again = parse_config(render_config(parsed));
        CHECK(again == parsed);
    };

    SECTION("hand-written examples") {
        roundtrip(parse_config("decay.a = 0\n"));
        roundtrip(parse_config(kTinyConfig));
        roundtrip(parse_config("decay.model = zero\nsnapshot_stride = 17\nz_max = 20\n"
                               "l0 = 3\noutput_dir = results/run1\n"));
        roundtrip(parse_config("decay.model = laser_cooled\ndecay.k_c = 7.1\n"
                               "decay.v_s = 0.003\n"));
        roundtrip(parse_config("decay.model = bec\ndecay.k_c = 7.1\n"
                               "decay.hbar_over_m = 0.4\ndecay.length = 12\n"));
        roundtrip(parse_config("decay.model = table\ndecay.table = 0,0.125,0.5\n"));
    }

    SECTION("randomized configurations") {
        std::mt19937 rng(42u);
        std::uniform_real_distribution<double> unit(0.1, 3.0);
        for (int trial = 0; trial < 25; ++trial) {
            std::ostringstream text;
            text << "gamma = " << unit(rng) << "\n";
            text << "omega_c = " << unit(rng) << "\n";
            text << "g2n = " << 50.0 * unit(rng) << "\n";
            text << "decay.a = " << 0.1 * unit(rng) << "\n";
            text << "l0 = " << unit(rng) << "\n";
            text << "ell = " << 1 + trial % 7 << "\n";
            text << "dz = " << 0.05 * unit(rng) << "\n";
            text << "cfl = " << 0.3 * unit(rng) << "\n";
            text << "total_time = " << 10.0 * unit(rng) << "\n";
            if (trial % 2) text << "z_max = " << 100.0 + unit(rng) << "\n";
            if (trial % 3 == 0) text << "snapshot_stride = " << 5 + trial << "\n";
            roundtrip(parse_config(text.str()));
        }
    }
}

TEST_CASE("trajectory outputs") {
    const ParsedConfig parsed = parse_config(kTinyConfig);
    const Trajectory traj = simulate(parsed.config);

    SECTION("deterministic byte-identical files") {
        const fs::path dir1 = fresh_dir("det1");
        const fs::path dir2 = fresh_dir("det2");
        write_trajectory(traj, dir1);
        write_trajectory(simulate(parsed.config), dir2);
        for (const char* name :
             {"strength.csv", "peaks.csv", "intensity.csv", "intensity.pgm", "intensity.ppm"})
            CHECK(slurp(dir1 / name) == slurp(dir2 / name));
        fs::remove_all(dir1);
        fs::remove_all(dir2);
    }

    SECTION("heatmap dimensions follow the trajectory") {
        const std::string pgm = render_heatmap_pgm(traj);
        std::istringstream header(pgm);
        std::string magic;
        int w = 0, h = 0, depth = 0;
        header >> magic >> w >> h >> depth;
        CHECK(magic == "P5");
        CHECK(w == static_cast<int>(traj.times.size()));
        CHECK(h == parsed.config.grid.n_z);
        CHECK(depth == 255);
        CHECK(pgm.size() > static_cast<std::size_t>(w * h));
    }

    SECTION("a dark run writes an all-zero strength column") {
        SimulationConfig cfg = parsed.config;
        FieldState dark(cfg.ell, cfg.grid.n_z);
        const Trajectory zero = simulate(cfg, dark);
        const fs::path dir = fresh_dir("zero");
        write_trajectory(zero, dir);
        std::istringstream in(slurp(dir / "strength.csv"));
        std::string line;
        std::getline(in, line);
        CHECK(line == "t,strength");
        while (std::getline(in, line))
            CHECK(line.substr(line.find(',') + 1) == "0");
        fs::remove_all(dir);
    }
}

TEST_CASE("command line") {
    SECTION("analytic table") {
        std::string out;
        REQUIRE(run_cli({"analytic", "--ell-max", "3"}, &out) == 0);
        std::istringstream lines(out);
        std::string line;
        std::getline(lines, line);
        CHECK(line == "ell,c0_exact,c0_slowlight,c0_exact_labs");
        int rows = 0;
        double first_value = 0.0;
        while (std::getline(lines, line)) {
            if (rows == 0) first_value = std::stod(line.substr(2));
            ++rows;
        }
        CHECK(rows == 3);
        CHECK(first_value == Approx(1.72).margin(0.005));
    }

    SECTION("unknown subcommands fail with usage text") {
        std::string out, err;
        CHECK(run_cli({"transmogrify"}, &out, &err) != 0);
        CHECK_FALSE(err.empty());
    }

    SECTION("a CFL-violating config fails without partial outputs") {
        const fs::path dir = fresh_dir("clifail");
        const fs::path cfgfile = dir / "bad.cfg";
        std::ofstream(cfgfile) << "decay.a = 0\ncfl = 1.5\noutput_dir = " << (dir / "out").string()
                               << "\n";
        std::string out, err;
        CHECK(run_cli({"simulate", cfgfile.string()}, &out, &err) != 0);
        CHECK(err.find("CFL") != std::string::npos);
        CHECK_FALSE(fs::exists(dir / "out"));
        fs::remove_all(dir);
    }

    SECTION("simulate writes the full output set") {
        const fs::path dir = fresh_dir("clisim");
        const fs::path cfgfile = dir / "run.cfg";
        std::ofstream(cfgfile) << kTinyConfig << "output_dir = " << (dir / "out").string()
                               << "\n";
        std::string out;
        REQUIRE(run_cli({"simulate", cfgfile.string()}, &out) == 0);
        for (const char* name :
             {"strength.csv", "peaks.csv", "intensity.csv", "intensity.pgm", "intensity.ppm"})
            CHECK(fs::exists(dir / "out" / name));
        CHECK(out.find("behavior:") != std::string::npos);
        CHECK_FALSE(fs::exists(dir / "out" / "strength.csv.tmp"));
        fs::remove_all(dir);
    }

    SECTION("vgroup emits a monotone table on a short schedule") {
        const fs::path dir = fresh_dir("clivg");
        const fs::path cfgfile = dir / "run.cfg";
        std::ofstream(cfgfile) << "decay.a = 0\nl0 = 2\ndz = 0.1\ntotal_time = 10\n"
                               << "output_dir = " << (dir / "out").string() << "\n";
        std::string out;
        REQUIRE(run_cli({"vgroup", cfgfile.string(), "--ell-max", "3", "--jobs", "2"}, &out) ==
                0);
        REQUIRE(fs::exists(dir / "out" / "vgroup.csv"));
        std::istringstream csv(slurp(dir / "out" / "vgroup.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line == "ell,vg,vg_stderr,c0_exact");
        std::vector<double> vg;
        while (std::getline(csv, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            vg.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
        }
        REQUIRE(vg.size() == 3);
        CHECK(vg[0] > vg[1]);
        CHECK(vg[1] > vg[2]);
        fs::remove_all(dir);
    }

    SECTION("dispersion writes the branch table") {
        const fs::path dir = fresh_dir("clidsp");
        const fs::path cfgfile = dir / "run.cfg";
        std::ofstream(cfgfile) << "decay.a = 0.2\noutput_dir = " << (dir / "out").string()
                               << "\n";
        std::string out;
        REQUIRE(run_cli({"dispersion", cfgfile.string(), "--omega-min", "0.05", "--omega-max",
                         "1.0", "--points", "20"},
                        &out) == 0);
        std::istringstream csv(slurp(dir / "out" / "dispersion.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line == "omega,re_k_plus,im_k_plus,re_k_minus,im_k_minus");
        int rows = 0;
        while (std::getline(csv, line)) ++rows;
        CHECK(rows == 20);
        fs::remove_all(dir);
    }

    SECTION("sweep classifies each point") {
        const fs::path dir = fresh_dir("clisweep");
        const fs::path cfgfile = dir / "run.cfg";
        std::ofstream(cfgfile) << kTinyConfig << "output_dir = " << (dir / "out").string()
                               << "\n";
        std::string out;
        REQUIRE(run_cli({"sweep", cfgfile.string(), "--vary", "a=0,0.5", "--jobs", "2"},
                        &out) == 0);
        REQUIRE(fs::exists(dir / "out" / "sweep.csv"));
        CHECK(fs::exists(dir / "out" / "a_0" / "strength.csv"));
        CHECK(fs::exists(dir / "out" / "a_0.5" / "strength.csv"));
        std::istringstream csv(slurp(dir / "out" / "sweep.csv"));
        std::string line;
        std::getline(csv, line);
        int rows = 0;
        while (std::getline(csv, line)) ++rows;
        CHECK(rows == 2);
        fs::remove_all(dir);
    }
}
