// Command-line front end: potential landscapes, spectra, the full
// quench-hold-measure protocol, and one-parameter sweeps, all emitted as
// plot-ready CSV plus flat JSON summaries.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phaseslip/analysis.hpp"
#include "phaseslip/config.hpp"
#include "phaseslip/dynamics.hpp"
#include "phaseslip/io.hpp"
#include "phaseslip/model.hpp"
#include "phaseslip/protocol.hpp"
#include "phaseslip/spectral.hpp"
#include "phaseslip/sweep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace phaseslip;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    std::int64_t seed = -1;
};

RunConfig build_config(const GlobalOpts& g) {
    RunConfig cfg;
    if (!g.config_path.empty()) cfg = load_config(g.config_path);
    for (const auto& kv : g.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.apply(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);
    return cfg;
}

fs::path resolve_out_dir(const GlobalOpts& g) {
    std::string dir = g.out_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("PHASESLIP_OUT")) dir = env;
        else dir = ".";
    }
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    out << j.dump(2) << "\n";
}

int cmd_potential(const GlobalOpts& g, double phi_e_pi) {
    RunConfig cfg = build_config(g);
    cfg.finalize();
    const double phi_e = phi_e_pi * std::numbers::pi;
    const fs::path out = resolve_out_dir(g);

    CsvWriter csv((out / "potential.csv").string(),
                  {"phi_rad", "u_even_GHz", "u_odd_GHz", "u_plus_GHz", "u_minus_GHz"});
    for (int j = 0; j < cfg.grid.n; ++j) {
        const double phi = cfg.grid.point(j);
        const auto sp = potential_spinor(phi, phi_e, cfg.circuit);
        const auto bands = sp.bands();
        csv.row({phi, potential_scalar(phi, phi_e, cfg.circuit, ParitySector::even),
                 potential_scalar(phi, phi_e, cfg.circuit, ParitySector::odd),
                 bands[1], bands[0]});
    }

    const auto rep = find_wells(cfg.circuit, phi_e, ParitySector::even, cfg.grid);
    json j;
    j["phi_e_rad"] = phi_e;
    j["n_minima"] = rep.minima.size();
    json minima = json::array();
    for (const auto& m : rep.minima)
        minima.push_back({{"phi_rad", m.phi}, {"u_GHz", m.energy}});
    j["minima"] = minima;
    j["double_well"] = rep.has_double_well();
    if (rep.has_double_well()) {
        j["separation_rad"] = rep.separation;
        j["separation_pi"] = rep.separation / std::numbers::pi;
        j["barrier_phi_rad"] = rep.barrier_top->phi;
        j["barrier_height_GHz"] = rep.barrier_height;
    }
    j["anticrossing_gap_GHz"] = anticrossing_gap(cfg.circuit, 0);
    write_json(out / "potential_summary.json", j);
    std::cout << "potential: " << rep.minima.size() << " minima";
    if (rep.has_double_well())
        std::cout << ", separation " << format_g15(rep.separation / std::numbers::pi)
                  << " pi, barrier " << format_g15(rep.barrier_height) << " GHz";
    std::cout << "\n";
    return 0;
}

int cmd_spectrum(const GlobalOpts& g, int k, double phi_e_pi, bool spinor,
                 bool dump_wavefunctions) {
    if (k < 2) throw ConfigError("spectrum: k must be >= 2");
    RunConfig cfg = build_config(g);
    cfg.finalize();
    const double phi_e = phi_e_pi * std::numbers::pi;
    const fs::path out = resolve_out_dir(g);

    const HamiltonianMatrix hm =
        spinor ? assemble_spinor(cfg.grid, cfg.circuit, phi_e)
               : assemble_scalar(cfg.grid, cfg.circuit, phi_e, ParitySector::even);
    const Spectrum sp = eigensolve(hm, spinor ? 2 * k : k);

    CsvWriter csv((out / "spectrum.csv").string(), {"index", "energy_GHz"});
    for (int i = 0; i < sp.k; ++i) csv.row({static_cast<double>(i), sp.eigenvalues[i]});

    if (dump_wavefunctions) {
        std::vector<std::string> cols = {"phi_rad"};
        for (int i = 0; i < sp.k; ++i) cols.push_back("psi_" + std::to_string(i));
        CsvWriter wf((out / "wavefunctions.csv").string(), cols);
        for (int j = 0; j < cfg.grid.n; ++j) {
            std::vector<double> row = {cfg.grid.point(j)};
            for (int i = 0; i < sp.k; ++i)
                row.push_back(spinor ? sp.vec(i)[2 * j] : sp.vec(i)[j]);
            wf.row(row);
        }
    }

    json j;
    j["phi_e_rad"] = phi_e;
    j["spinor"] = spinor;
    j["k"] = sp.k;
    j["delta_e_GHz"] = sp.eigenvalues[1] - sp.eigenvalues[0];
    j["grid_points"] = cfg.grid.n;
    j["phi_min_rad"] = cfg.grid.phi_min;
    j["phi_max_rad"] = cfg.grid.phi_max;
    write_json(out / "spectrum_summary.json", j);
    std::cout << "spectrum: delta_e = " << format_g15(sp.eigenvalues[1] - sp.eigenvalues[0])
              << " GHz (" << sp.k << " levels)\n";
    return 0;
}

int cmd_protocol(const GlobalOpts& g) {
    RunConfig cfg = build_config(g);
    cfg.finalize();
    const fs::path out = resolve_out_dir(g);

    const ProtocolResult res = run_scan(cfg.to_protocol());

    CsvWriter csv((out / "scan.csv").string(), {"dt_ns", "p2phi0", "stderr", "n_shots"});
    for (const auto& pt : res.points)
        csv.row({pt.hold_ns, pt.p2phi0, pt.stderr_p, static_cast<double>(pt.n_shots)});

    json j;
    j["frequency_GHz"] = res.frequency;
    j["visibility"] = res.visibility;
    j["residual"] = res.fit_residual;
    j["delta_e_spectral_GHz"] = res.delta_e_spectral;
    j["mean_phase_rad"] = res.mean_phase_avg;
    j["mean_phase_phi0"] = res.mean_phase_avg / (2.0 * std::numbers::pi);
    j["fit_degenerate"] = res.fit_degenerate;
    write_json(out / "fit.json", j);
    if (res.fit_degenerate)
        std::cerr << "warning: hold-time scan spans less than half an oscillation period\n";
    std::cout << "protocol: f = " << format_g15(res.frequency)
              << " GHz, visibility = " << format_g15(res.visibility)
              << ", spectral delta_e = " << format_g15(res.delta_e_spectral) << " GHz\n";
    return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& param, const std::string& target_s,
              const std::string& values_s, const std::string& lin_s,
              const std::string& log_s) {
    RunConfig base = build_config(g);
    const SweepTarget target = parse_sweep_target(target_s);

    SweepSpec spec;
    spec.path = param;
    const int given = (!values_s.empty()) + (!lin_s.empty()) + (!log_s.empty());
    if (given != 1)
        throw ConfigError("sweep: give exactly one of --values, --lin, --log");
    if (!values_s.empty()) {
        spec.values = phaseslip::detail::parse_list("sweep values", values_s);
    } else {
        const std::string& range = !lin_s.empty() ? lin_s : log_s;
        const auto parts = phaseslip::detail::parse_list("sweep range", range);
        if (parts.size() != 3)
            throw ConfigError("sweep range: expected start,stop,count");
        const int count = static_cast<int>(parts[2]);
        spec.values = !lin_s.empty()
                          ? SweepSpec::linear_range(parts[0], parts[1], count)
                          : SweepSpec::log_range(parts[0], parts[1], count);
    }

    const auto rows = run_sweep(base, spec, target);
    const fs::path out = resolve_out_dir(g);
    CsvWriter csv((out / "sweep.csv").string(),
                  {"value", "epsilon_GHz", target_s, "error"});
    for (const auto& r : rows) {
        csv.row_raw({format_g15(r.value), format_g15(r.epsilon),
                     r.ok ? format_g15(r.target) : "",
                     r.ok ? "" : "\"" + r.error + "\""});
    }
    std::cout << "sweep: " << rows.size() << " points over " << param << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological RF SQUID phase-slip simulator"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "run configuration file");
    app.add_option("--out", g.out_dir, "output directory (default $PHASESLIP_OUT or .)");
    app.add_option("--seed", g.seed, "override protocol.seed");
    app.add_option("--set", g.sets, "override a config key, section.key=value")
        ->take_all();

    double phi_e_pi = 2.0;
    auto* pot = app.add_subcommand("potential", "potential landscape and well report");
    pot->add_option("--phi-e-pi", phi_e_pi, "external bias in units of pi (default 2)");

    int k = 6;
    bool spinor = false, dump_wf = false;
    double phi_e_pi_s = 2.0;
    auto* spec = app.add_subcommand("spectrum", "low-lying eigenvalues and splitting");
    spec->add_option("-k,--levels", k, "number of levels (default 6)");
    spec->add_option("--phi-e-pi", phi_e_pi_s, "external bias in units of pi (default 2)");
    spec->add_flag("--spinor", spinor, "two-component parity-mixing model");
    spec->add_flag("--dump-wavefunctions", dump_wf, "also write wavefunctions.csv");

    auto* proto = app.add_subcommand("protocol", "quench-hold-measure scan");

    std::string sw_param, sw_target, sw_values, sw_lin, sw_log;
    auto* sw = app.add_subcommand("sweep", "one-parameter sweep of a figure of merit");
    sw->add_option("--param", sw_param, "config key to sweep, e.g. circuit.e_l_ghz")
        ->required();
    sw->add_option("--target", sw_target, "splitting | separation | visibility")
        ->required();
    sw->add_option("--values", sw_values, "explicit comma-separated values");
    sw->add_option("--lin", sw_lin, "linear range start,stop,count");
    sw->add_option("--log", sw_log, "log range start,stop,count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pot->parsed()) return cmd_potential(g, phi_e_pi);
        if (spec->parsed()) return cmd_spectrum(g, k, phi_e_pi_s, spinor, dump_wf);
        if (proto->parsed()) return cmd_protocol(g);
        if (sw->parsed()) return cmd_sweep(g, sw_param, sw_target, sw_values, sw_lin, sw_log);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
