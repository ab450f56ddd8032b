// End-to-end tests of the fracvar binary: golden files with fixed seeds,
// determinism across reruns and worker counts, exit-code contract.
// argv[1] = path to the binary, argv[2] = golden file directory.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "fracvar/estimators.hpp"
#include "fracvar/json_io.hpp"
#include "fracvar/quadvar.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_binary;
std::string g_golden_dir;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.output.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("help and usage errors") {
    CHECK(run("--help").exit_code == 0);
    for (const char* sub : {"constants", "cov", "simulate", "quadvar", "estimate", "mc"})
        CHECK(run(std::string(sub) + " --help").exit_code == 0);
    CHECK(run("frobnicate").exit_code == 1);
    CHECK(run("constants --model fbm --no-such-flag 3").exit_code == 1);
    // missing model entirely
    CHECK(run("constants").exit_code == 1);
}

TEST_CASE("constants subcommand") {
    RunResult r = run("constants --model fbm --hurst 0.5");
    REQUIRE(r.exit_code == 0);
    auto j = fracvar::json::parse(r.output);
    CHECK(j["sigma_sq"].get<double>() == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(j["as_limit"].get<double>() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(j["sigma_star_sq"].get<double>() == doctest::Approx(6.0).epsilon(1e-12));

    CHECK(run(std::string("constants --config ") + g_golden_dir +
              "/afbm_twolevel.json")
              .exit_code == 0);

    SUBCASE("golden file") {
        const std::string golden = read_file(g_golden_dir + "/constants_fbm05.golden");
        CHECK(r.output == golden);
    }

    SUBCASE("invalid model parameters exit 2") {
        CHECK(run("constants --model fbm --hurst 1.5").exit_code == 2);
        CHECK(run("constants --model bifbm --hurst 0.5 --k 0.5 --t1 2 --t2 1")
                  .exit_code == 2);
    }

    SUBCASE("config/flag conflict is an error") {
        CHECK(run(std::string("constants --config ") + g_golden_dir +
                  "/afbm_twolevel.json --model fbm")
                  .exit_code == 1);
    }
}

TEST_CASE("simulate determinism and golden path") {
    const std::string args = "simulate --model fbm --hurst 0.7 --n 64 --seed 42";
    RunResult a = run(args);
    RunResult b = run(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.rfind("t,value\n", 0) == 0);

    const std::string golden = read_file(g_golden_dir + "/simulate_fbm07_n64.golden");
    CHECK(a.output == golden);
}

TEST_CASE("cov subcommand") {
    RunResult r = run("cov --model fbm --hurst 0.5 --n 4");
    REQUIRE(r.exit_code == 0);
    std::istringstream is(r.output);
    std::string line;
    int row = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string cell;
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            CHECK(std::stod(cell) ==
                  doctest::Approx(std::min(row, col) / 4.0).epsilon(1e-14));
            ++col;
        }
        CHECK(col == 5);
        ++row;
    }
    CHECK(row == 5);

    RunResult p = run("cov --model bifbm --hurst 0.6 --k 0.5 --t1 1 --t2 2 --s 0.5 --t 0.25");
    REQUIRE(p.exit_code == 0);
    auto j = fracvar::json::parse(p.output);
    CHECK(j["value"].get<double>() ==
          doctest::Approx(fracvar::bifbm_cov(1.5, 1.25, 0.6, 0.5)).epsilon(1e-13));
}

TEST_CASE("quadvar subcommand") {
    write_file("cli_alt.csv", "t,value\n0,0\n0.25,1\n0.5,0\n0.75,1\n1,0\n");
    RunResult r = run("quadvar --input cli_alt.csv");
    REQUIRE(r.exit_code == 0);
    auto j = fracvar::json::parse(r.output);
    CHECK(j["n"].get<long>() == 4);
    CHECK(j["vn"].get<double>() == doctest::Approx(12.0).epsilon(1e-15));
    std::remove("cli_alt.csv");
}

TEST_CASE("round trip: simulate then estimate equals the in-process pipeline") {
    RunResult sim =
        run("simulate --model fbm --hurst 0.7 --n 128 --seed 11 -o cli_path.csv");
    REQUIRE(sim.exit_code == 0);
    RunResult est = run("estimate --input cli_path.csv --model fbm --hurst 0.7");
    REQUIRE(est.exit_code == 0);
    auto j = fracvar::json::parse(est.output);

    std::ifstream in("cli_path.csv");
    std::vector<double> fine = fracvar::read_path_csv(in);
    std::vector<double> coarse(65);
    for (int k = 0; k <= 64; ++k) coarse[k] = fine[2 * k];
    const double v_n = fracvar::vn(std::span<const double>(coarse));
    const double v_2n = fracvar::vn(std::span<const double>(fine));
    fracvar::TheoreticalConstants c = fracvar::fbm_constants(0.7);
    fracvar::EstimateReport rep = fracvar::make_report(&c, 64, v_n, v_2n, "");

    CHECK(j["vn"].get<double>() == doctest::Approx(v_n).epsilon(1e-15));
    CHECK(j["v2n"].get<double>() == doctest::Approx(v_2n).epsilon(1e-15));
    CHECK(j["estimate"]["value"].get<double>() ==
          doctest::Approx(rep.ratio.value).epsilon(1e-15));
    CHECK(j["stderr"].get<double>() ==
          doctest::Approx(rep.ratio_stderr).epsilon(1e-15));
    std::remove("cli_path.csv");
}

TEST_CASE("estimate on a degenerate ramp exits 2") {
    std::ostringstream os;
    os << "t,value\n";
    for (int k = 0; k <= 16; ++k)
        os << (k / 16.0) << "," << (0.5 + 2.0 * k / 16.0) << "\n";
    write_file("cli_ramp.csv", os.str());
    RunResult r = run("estimate --input cli_ramp.csv");
    CHECK(r.exit_code == 2);
    std::remove("cli_ramp.csv");
}

TEST_CASE("mc golden report and worker invariance") {
    const std::string base =
        "mc --model fbm --hurst 0.7 --n 16 --reps 64 --seed 5 --no-exact";
    RunResult w1 = run(base + " --threads 1");
    RunResult w4 = run(base + " --threads 4");
    REQUIRE(w1.exit_code == 0);
    CHECK(w1.output == w4.output);

    const std::string golden = read_file(g_golden_dir + "/mc_fbm07_small.golden");
    CHECK(w1.output == golden);
}

TEST_CASE("mc config file with flag overrides") {
    write_file("cli_mc_config.json",
               R"({"model":{"type":"fbm","hurst":0.6},"n":[16],"replications":8,"seed":3})");
    RunResult a = run("mc --config cli_mc_config.json");
    REQUIRE(a.exit_code == 0);
    auto ja = fracvar::json::parse(a.output);
    CHECK(ja["replications"].get<long>() == 8);

    RunResult b = run("mc --config cli_mc_config.json --reps 16 --seed 4");
    auto jb = fracvar::json::parse(b.output);
    CHECK(jb["replications"].get<long>() == 16);
    CHECK(jb["seed"].get<std::uint64_t>() == 4);
    std::remove("cli_mc_config.json");
}

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: test_cli <binary> <golden_dir>\n");
        return 1;
    }
    g_binary = argv[1];
    g_golden_dir = argv[2];
    doctest::Context ctx;
    return ctx.run();
}
