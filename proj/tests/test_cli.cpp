// End-to-end tests that drive the built command-line binary. The path to the
// binary is supplied via the PHASESLIP_BIN environment variable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;
using std::numbers::pi;

namespace {

std::string binary() {
    const char* p = std::getenv("PHASESLIP_BIN");
    REQUIRE_MESSAGE(p != nullptr, "PHASESLIP_BIN must point at the CLI binary");
    return p;
}

struct Scratch {
    fs::path dir;
    Scratch(const std::string& name) {
        dir = fs::temp_directory_path() / ("phaseslip_cli_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
};

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), "missing output file: " << p.string());
    json j;
    in >> j;
    return j;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, size_t ncols) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), "missing output file: " << p.string());
    std::string line;
    REQUIRE(std::getline(in, line)); // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        // Manual split that keeps trailing empty cells (empty parses as 0).
        std::vector<double> row;
        size_t start = 0;
        while (true) {
            const size_t comma = line.find(',', start);
            const std::string cell = line.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            row.push_back(cell.empty() ? 0.0 : std::stod(cell));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        REQUIRE(row.size() == ncols);
        rows.push_back(row);
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("potential subcommand reports the double well") {
    Scratch s("potential");
    REQUIRE(run("--out " + s.dir.string() + " --set grid.points=1024 potential") == 0);
    const auto j = read_json(s.dir / "potential_summary.json");
    CHECK(j["n_minima"].get<int>() == 2);
    CHECK(j["double_well"].get<bool>());
    CHECK(j["separation_pi"].get<double>() == doctest::Approx(2.9409338).epsilon(1e-5));
    CHECK(j["barrier_height_GHz"].get<double>() ==
          doctest::Approx(20.498091).epsilon(1e-5));
    CHECK(j["anticrossing_gap_GHz"].get<double>() ==
          doctest::Approx(0.05).epsilon(1e-9));

    const auto rows = read_csv(s.dir / "potential.csv", 5);
    CHECK(rows.size() == 1024);
    // Even and odd sector potentials mirror in the junction term; adiabatic
    // bands bracket both.
    for (size_t i = 0; i < rows.size(); i += 97) {
        CHECK(rows[i][3] >= rows[i][4] - 1e-12); // u_plus >= u_minus... columns
    }
}

TEST_CASE("potential at zero bias has a single minimum") {
    Scratch s("potential0");
    REQUIRE(run("--out " + s.dir.string() +
                " --set grid.points=1024 potential --phi-e-pi 0") == 0);
    const auto j = read_json(s.dir / "potential_summary.json");
    CHECK(j["n_minima"].get<int>() == 1);
    CHECK_FALSE(j["double_well"].get<bool>());
}

TEST_CASE("spectrum subcommand reproduces the headline splitting") {
    Scratch s("spectrum");
    REQUIRE(run("--out " + s.dir.string() + " spectrum") == 0);
    const auto j = read_json(s.dir / "spectrum_summary.json");
    const double de = j["delta_e_GHz"].get<double>();
    CHECK(de == doctest::Approx(0.025018177468467684).epsilon(1e-8));
    CHECK(j["grid_points"].get<int>() == 4096);

    const auto rows = read_csv(s.dir / "spectrum.csv", 2);
    REQUIRE(rows.size() == 6);
    // CSV round-trips the same numbers the summary reports.
    CHECK(rows[1][1] - rows[0][1] == doctest::Approx(de).epsilon(1e-12));
}

TEST_CASE("spectrum harmonic limit under the pair-charge convention") {
    Scratch s("harmonic");
    REQUIRE(run("--out " + s.dir.string() +
                " --set circuit.e_m_ghz=0 --set circuit.transparency=0"
                " --set circuit.charge_convention=cooper_pair"
                " spectrum --phi-e-pi 0") == 0);
    const auto rows = read_csv(s.dir / "spectrum.csv", 2);
    CHECK(rows[1][1] - rows[0][1] ==
          doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-3));
}

TEST_CASE("protocol subcommand emits scan and fit artifacts") {
    Scratch s("protocol");
    const std::string common =
        " --set grid.points=512 --set dynamics.dt_ns=0.002"
        " --set protocol.measurement=expectation"
        " --set protocol.poisoning_rate_per_ns=0"
        " --set protocol.hold_times_ns=0,10,20,30,40,50,60,70,80 protocol";
    REQUIRE(run("--out " + s.dir.string() + common) == 0);
    const auto rows = read_csv(s.dir / "scan.csv", 4);
    REQUIRE(rows.size() == 9);
    const auto j = read_json(s.dir / "fit.json");
    const double de = j["delta_e_spectral_GHz"].get<double>();
    CHECK(std::abs(j["frequency_GHz"].get<double>() / de - 1.0) < 0.01);
    CHECK(j["visibility"].get<double>() > 0.9);
    CHECK_FALSE(j["fit_degenerate"].get<bool>());
}

TEST_CASE("identical configuration yields byte-identical outputs") {
    Scratch a("rerun_a"), b("rerun_b");
    const std::string common =
        " --seed 4242 --set grid.points=256"
        " --set dynamics.dt_ns=0.002 --set protocol.shots_per_point=50"
        " --set protocol.poisoning_rate_per_ns=0.001"
        " --set protocol.hold_times_ns=0,10,20 protocol";
    REQUIRE(run("--out " + a.dir.string() + common) == 0);
    REQUIRE(run("--out " + b.dir.string() + common) == 0);
    CHECK(slurp(a.dir / "scan.csv") == slurp(b.dir / "scan.csv"));
    CHECK(slurp(a.dir / "fit.json") == slurp(b.dir / "fit.json"));
    CHECK_FALSE(slurp(a.dir / "scan.csv").empty());
}

TEST_CASE("the default output directory comes from the environment") {
    Scratch s("envout");
    const std::string cmd = "PHASESLIP_OUT=" + s.dir.string() + " " + binary() +
                            " --set grid.points=512 spectrum >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(s.dir / "spectrum_summary.json"));
}

TEST_CASE("sweep subcommand writes one row per value") {
    Scratch s("sweep");
    REQUIRE(run("--out " + s.dir.string() +
                " sweep --param circuit.e_l_ghz --values 0.5,1,2"
                " --target separation") == 0);
    const auto text = slurp(s.dir / "sweep.csv");
    CHECK(text.find("value,epsilon_GHz,separation,error") == 0);
    const auto rows = read_csv(s.dir / "sweep.csv", 4);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][2] > rows[1][2]);
    CHECK(rows[1][2] > rows[2][2]);
}

TEST_CASE("exit codes distinguish config from numerical failures") {
    Scratch s("exitcodes");
    // Unknown key: config error, exit 1.
    CHECK(run("--out " + s.dir.string() + " --set nope.key=1 spectrum") == 1);
    // Malformed --set: config error.
    CHECK(run("--out " + s.dir.string() + " --set justakey spectrum") == 1);
    // Absurdly coarse grid: numerical failure, exit 2.
    CHECK(run("--out " + s.dir.string() + " --set grid.points=16 spectrum") == 2);
    // Sweep demands exactly one range flavor.
    CHECK(run("--out " + s.dir.string() +
              " sweep --param circuit.e_l_ghz --values 1 --lin 1,2,2"
              " --target separation") == 1);
}
