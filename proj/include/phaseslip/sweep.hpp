#pragma once

// One-parameter sweeps over any config key, reporting a scalar figure of
// merit per value. Failed points are recorded and the sweep continues.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "phaseslip/analysis.hpp"
#include "phaseslip/config.hpp"
#include "phaseslip/errors.hpp"
#include "phaseslip/io.hpp"
#include "phaseslip/protocol.hpp"
#include "phaseslip/spectral.hpp"

namespace phaseslip {

enum class SweepTarget { splitting, separation, visibility };

inline SweepTarget parse_sweep_target(const std::string& s) {
    if (s == "splitting") return SweepTarget::splitting;
    if (s == "separation") return SweepTarget::separation;
    if (s == "visibility") return SweepTarget::visibility;
    throw ConfigError("unknown sweep target '" + s + "'");
}

struct SweepSpec {
    std::string path;           // config key, e.g. "circuit.e_l_ghz"
    std::vector<double> values; // sweep points, in order

    static std::vector<double> linear_range(double start, double stop, int count) {
        if (count < 1) throw ConfigError("sweep range: count must be >= 1");
        std::vector<double> v;
        for (int i = 0; i < count; ++i)
            v.push_back(count == 1 ? start
                                   : start + (stop - start) * i / (count - 1));
        return v;
    }

    static std::vector<double> log_range(double start, double stop, int count) {
        if (count < 1) throw ConfigError("sweep range: count must be >= 1");
        if (start <= 0.0 || stop <= 0.0)
            throw ConfigError("sweep log range: endpoints must be positive");
        std::vector<double> v;
        const double la = std::log(start), lb = std::log(stop);
        for (int i = 0; i < count; ++i)
            v.push_back(std::exp(count == 1 ? la : la + (lb - la) * i / (count - 1)));
        return v;
    }
};

struct SweepRow {
    double value;
    double epsilon; // resolved circuit epsilon at this point, GHz
    bool ok;
    double target;
    std::string error;
};

namespace detail {

// Doublet splitting of the two lowest even-polarized states in the
// two-component model; reduces to the scalar doublet when parity mixing is
// off or irrelevant.
inline double spinor_splitting(const CircuitParams& p, const PhaseGrid& g) {
    const double phi_e = 2.0 * std::numbers::pi;
    const bool majorana = p.mode == JunctionMode::topological ||
                          p.mode == JunctionMode::combined;
    if (!majorana || p.epsilon == 0.0) return tunnel_splitting(p, g);

    const auto hm = assemble_spinor(g, p, phi_e);
    for (int k = 8; k <= 32; k *= 2) {
        const auto sp = eigensolve(hm, std::min(k, hm.dim));
        std::vector<double> even_levels;
        for (int i = 0; i < sp.k; ++i) {
            const auto v = sp.vec(i);
            double pz = 0.0;
            for (int j = 0; j < g.n; ++j)
                pz += v[2 * j] * v[2 * j] - v[2 * j + 1] * v[2 * j + 1];
            if (pz * sp.h > 0.0) even_levels.push_back(sp.eigenvalues[i]);
            if (even_levels.size() == 2)
                return even_levels[1] - even_levels[0];
        }
    }
    throw NumericalError("spinor_splitting: could not locate an even-polarized doublet");
}

} // namespace detail

inline double evaluate_sweep_target(const RunConfig& cfg, SweepTarget target) {
    switch (target) {
    case SweepTarget::splitting:
        return detail::spinor_splitting(cfg.circuit, cfg.grid);
    case SweepTarget::separation: {
        const auto rep = find_wells(cfg.circuit, 2.0 * std::numbers::pi,
                                    ParitySector::even, cfg.grid);
        rep.require_double_well();
        return rep.separation;
    }
    case SweepTarget::visibility:
        return run_scan(cfg.to_protocol()).visibility;
    }
    throw ConfigError("unhandled sweep target");
}

inline std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepSpec& spec,
                                       SweepTarget target) {
    if (spec.values.empty()) throw ConfigError("sweep: no values given");
    std::vector<SweepRow> rows;
    for (double v : spec.values) {
        SweepRow row{v, 0.0, false, 0.0, ""};
        try {
            RunConfig cfg = base;
            cfg.apply(spec.path, format_g15(v));
            cfg.finalize();
            row.epsilon = cfg.circuit.epsilon;
            row.target = evaluate_sweep_target(cfg, target);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace phaseslip
