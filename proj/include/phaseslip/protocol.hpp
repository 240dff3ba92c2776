#pragma once

// End-to-end simulation of the detection protocol: reset at phi_e = 0,
// quench to phi_e = 2*pi, hold for dt, measure which side of the barrier the
// phase sits on. Shot ensembles with optional Poisson parity flips, and
// extraction of the P(2*phi0) oscillation curve.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "phaseslip/analysis.hpp"
#include "phaseslip/dynamics.hpp"
#include "phaseslip/errors.hpp"
#include "phaseslip/model.hpp"
#include "phaseslip/rng.hpp"
#include "phaseslip/spectral.hpp"

namespace phaseslip {

enum class InitMode { quench_ground, ideal_left };
enum class Measurement { projective_sampling, expectation };

struct ProtocolConfig {
    CircuitParams circuit;
    PhaseGrid grid;
    InitMode init_mode = InitMode::ideal_left;
    std::vector<double> hold_times;      // ns
    int shots_per_point = 400;
    double poisoning_rate = 1e-4;        // flips per ns (1/tau_qp)
    Measurement measurement = Measurement::projective_sampling;
    std::uint64_t seed = 12345;
    double ramp_time = 0.0;              // ns, 0 = sudden quench
    double dt = 1e-3;                    // ns
    double phi_e_hold = 2.0 * std::numbers::pi;

    void validate() const {
        circuit.validate();
        grid.validate();
        if (hold_times.empty())
            throw ConfigError("ProtocolConfig: hold_times must be nonempty");
        for (double t : hold_times)
            if (t < 0.0) throw ConfigError("ProtocolConfig: hold times must be >= 0");
        if (shots_per_point < 1)
            throw ConfigError("ProtocolConfig: shots_per_point must be >= 1");
        if (poisoning_rate < 0.0)
            throw ConfigError("ProtocolConfig: poisoning_rate must be >= 0");
        if (ramp_time < 0.0)
            throw ConfigError("ProtocolConfig: ramp_time must be >= 0");
        if (dt <= 0.0) throw ConfigError("ProtocolConfig: dt must be > 0");
    }
};

enum class FluxOutcome : std::uint8_t { flux_0 = 0, flux_2phi0 = 1 };

struct ShotRecord {
    std::uint32_t dt_index;
    std::uint32_t shot_index;
    FluxOutcome outcome;
    std::uint16_t flip_count;
    double p_right;
    double mean_phase;
};

struct ScanPoint {
    double hold_ns;
    double p2phi0;
    double stderr_p;
    long n_shots;
};

struct ProtocolResult {
    std::vector<ScanPoint> points;
    double frequency = 0.0;         // GHz
    double visibility = 0.0;        // [0, 1]
    double fit_residual = 0.0;      // RMS of fit misfit
    double delta_e_spectral = 0.0;  // GHz
    double mean_phase_avg = 0.0;    // rad, averaged over all shots
    bool fit_degenerate = false;
    std::vector<ShotRecord> shots;
};

// Initial state of a shot. quench_ground: even-parity ground state of the
// reset bias phi_e = 0 (the bias then jumps to the hold value). ideal_left:
// left-localized (psi0 +/- psi1)/sqrt(2) built from the lowest even doublet
// at the hold bias. A conventional junction has no doublet to superpose; its
// well pins the flux, so ideal_left falls back to the hold-bias ground state.
inline SpinorState prepare_initial(const ProtocolConfig& cfg) {
    cfg.validate();
    const PhaseGrid& g = cfg.grid;

    auto embed_even = [&](std::span<const double> v, double phi_e) {
        SpinorState s;
        s.grid = g;
        s.even.assign(g.n, cplx{0.0, 0.0});
        s.odd.assign(g.n, cplx{0.0, 0.0});
        for (int j = 0; j < g.n; ++j) s.even[j] = v[j];
        s.time = 0.0;
        s.phi_e = phi_e;
        return s;
    };

    if (cfg.init_mode == InitMode::quench_ground) {
        const auto h0 = assemble_scalar(g, cfg.circuit, 0.0, ParitySector::even);
        const auto sp = eigensolve(h0, 1);
        auto s = embed_even(sp.vec(0), 0.0);
        s.phi_e = cfg.phi_e_hold; // sudden quench: state unchanged, bias switched
        return s;
    }

    const auto wells = find_wells(cfg.circuit, cfg.phi_e_hold, ParitySector::even, g);
    const auto hh = assemble_scalar(g, cfg.circuit, cfg.phi_e_hold, ParitySector::even);
    if (!wells.has_double_well()) {
        const auto sp = eigensolve(hh, 1);
        return embed_even(sp.vec(0), cfg.phi_e_hold);
    }

    const auto sp = eigensolve(hh, 2);
    SpinorState s = embed_even(sp.vec(0), cfg.phi_e_hold);
    const double inv = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < g.n; ++j)
        s.even[j] = inv * (sp.vec(0)[j] + sp.vec(1)[j]);
    if (observables(s).p_right >= 0.5) {
        for (int j = 0; j < g.n; ++j)
            s.even[j] = inv * (sp.vec(0)[j] - sp.vec(1)[j]);
    }
    return s;
}

namespace detail {

struct CosineFit {
    double frequency = 0.0;
    double offset = 0.0;    // A in  A - B cos(2 pi f t)
    double amplitude = 0.0; // B
    double residual = 0.0;
};

// Least squares of y = A - B cos(2 pi f t) at fixed f.
inline double fit_at_frequency(const std::vector<double>& t, const std::vector<double>& y,
                               double f, double* a_out, double* b_out) {
    const size_t n = t.size();
    double sc = 0.0, scc = 0.0, sy = 0.0, syc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double c = std::cos(2.0 * std::numbers::pi * f * t[i]);
        sc += c;
        scc += c * c;
        sy += y[i];
        syc += y[i] * c;
    }
    const double det = static_cast<double>(n) * scc - sc * sc;
    double a, b;
    if (std::abs(det) < 1e-14 * static_cast<double>(n)) {
        a = sy / static_cast<double>(n);
        b = 0.0;
    } else {
        // Solve [n  -sc; -sc  scc]? regressors are (1, -cos)
        a = (scc * sy - sc * syc) / det;
        b = (sc * sy - static_cast<double>(n) * syc) / det;
    }
    double sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double c = std::cos(2.0 * std::numbers::pi * f * t[i]);
        const double r = y[i] - (a - b * c);
        sse += r * r;
    }
    if (a_out) *a_out = a;
    if (b_out) *b_out = b;
    return sse;
}

// Frequency grid around f_center, refined by golden-section search.
inline CosineFit fit_cosine(const std::vector<double>& t, const std::vector<double>& y,
                            double f_center) {
    CosineFit fit;
    const size_t n = t.size();
    if (n == 0) return fit;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    fit.offset = mean;
    fit.frequency = std::max(f_center, 0.0);
    if (n < 3) return fit;

    const double f_lo = std::max(1e-9, 0.25 * f_center);
    const double f_hi = 2.0 * f_center;
    if (!(f_hi > f_lo)) return fit;

    const int ngrid = 385;
    double best_f = f_lo, best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ngrid; ++i) {
        const double f = f_lo + (f_hi - f_lo) * i / (ngrid - 1);
        const double sse = fit_at_frequency(t, y, f, nullptr, nullptr);
        if (sse < best_sse) {
            best_sse = sse;
            best_f = f;
        }
    }
    const double step = (f_hi - f_lo) / (ngrid - 1);
    double lo = std::max(f_lo, best_f - step), hi = std::min(f_hi, best_f + step);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double s1 = fit_at_frequency(t, y, x1, nullptr, nullptr);
    double s2 = fit_at_frequency(t, y, x2, nullptr, nullptr);
    for (int it = 0; it < 100; ++it) {
        if (s1 < s2) {
            hi = x2;
            x2 = x1;
            s2 = s1;
            x1 = hi - gr * (hi - lo);
            s1 = fit_at_frequency(t, y, x1, nullptr, nullptr);
        } else {
            lo = x1;
            x1 = x2;
            s1 = s2;
            x2 = lo + gr * (hi - lo);
            s2 = fit_at_frequency(t, y, x2, nullptr, nullptr);
        }
    }
    const double f = 0.5 * (lo + hi);
    double a, b;
    const double sse = fit_at_frequency(t, y, f, &a, &b);
    fit.frequency = f;
    fit.offset = a;
    fit.amplitude = b;
    fit.residual = std::sqrt(sse / static_cast<double>(n));
    return fit;
}

} // namespace detail

// Shared per-scan machinery: the prepared initial state, the spectral
// splitting, and a cached flip-free reference trajectory. Shots without
// poisoning events read the cache; a poisoned shot restarts Cayley evolution
// from the cached state just before its first flip.
class ShotEngine {
public:
    explicit ShotEngine(const ProtocolConfig& cfg)
        : cfg_(cfg), sched_(BiasSchedule::quench(0.0, cfg.phi_e_hold, cfg.ramp_time)) {
        cfg_.validate();

        const auto hh = assemble_scalar(cfg_.grid, cfg_.circuit, cfg_.phi_e_hold,
                                        ParitySector::even);
        const auto sp = eigensolve(hh, 2);
        delta_e_spectral_ = sp.eigenvalues[1] - sp.eigenvalues[0];

        const auto wells =
            find_wells(cfg_.circuit, cfg_.phi_e_hold, ParitySector::even, cfg_.grid);
        double_well_ = wells.has_double_well();

        initial_ = prepare_initial(cfg_);
        const auto hs = assemble_spinor(cfg_.grid, cfg_.circuit, sched_.value(0.0));
        prop_.emplace(cfg_.circuit, cfg_.grid, energy_expectation(initial_, hs));
        build_reference();
    }

    double delta_e_spectral() const { return delta_e_spectral_; }
    bool has_double_well() const { return double_well_; }
    const SpinorState& initial_state() const { return initial_; }

    ShotRecord run_shot(std::uint32_t dt_index, std::uint32_t shot_index) {
        const double hold = cfg_.hold_times[dt_index];
        SplitMix64 rng(SplitMix64::mix(SplitMix64::mix(cfg_.seed, dt_index),
                                       0x73686f74ULL + shot_index));
        std::vector<double> flips;
        if (cfg_.poisoning_rate > 0.0) {
            double t = 0.0;
            while (true) {
                t += rng.exponential(cfg_.poisoning_rate);
                if (t > hold) break;
                flips.push_back(t);
            }
        }

        Observables obs{};
        if (flips.empty()) {
            obs = reference_at(hold);
        } else {
            SpinorState s = cached_state_before(flips.front());
            prop_->advance(s, hold, sched_, flips, cfg_.dt);
            obs = observables(s);
        }

        const double p = double_well_ ? obs.p_right : 0.0;
        FluxOutcome out = FluxOutcome::flux_0;
        double p_recorded = p;
        if (cfg_.measurement == Measurement::projective_sampling) {
            out = rng.uniform() < p ? FluxOutcome::flux_2phi0 : FluxOutcome::flux_0;
            p_recorded = p;
        } else {
            out = p >= 0.5 ? FluxOutcome::flux_2phi0 : FluxOutcome::flux_0;
        }
        return {dt_index, shot_index, out,
                static_cast<std::uint16_t>(std::min<size_t>(flips.size(), 0xffff)),
                p_recorded, obs.mean_phase};
    }

private:
    void build_reference() {
        const double t_max =
            *std::max_element(cfg_.hold_times.begin(), cfg_.hold_times.end());
        const double cache_dt = 0.5; // ns between cached restart states
        std::vector<double> targets = cfg_.hold_times;
        for (double t = cache_dt; t < t_max; t += cache_dt) targets.push_back(t);
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

        SpinorState s = initial_;
        cache_.emplace(0.0, s);
        hold_obs_[0.0] = observables(s);
        for (double t : targets) {
            if (t <= 0.0) continue;
            prop_->advance(s, t, sched_, {}, cfg_.dt);
            cache_.emplace(t, s);
            hold_obs_[t] = observables(s);
        }
    }

    Observables reference_at(double hold) const {
        const auto it = hold_obs_.find(hold);
        if (it == hold_obs_.end())
            throw NumericalError("ShotEngine: no cached reference at requested hold");
        return it->second;
    }

    SpinorState cached_state_before(double t) const {
        auto it = cache_.upper_bound(t);
        if (it == cache_.begin())
            throw NumericalError("ShotEngine: reference cache is empty");
        --it;
        return it->second;
    }

    ProtocolConfig cfg_;
    BiasSchedule sched_;
    std::optional<CayleyPropagator> prop_;
    SpinorState initial_;
    std::map<double, SpinorState> cache_;
    std::map<double, Observables> hold_obs_;
    double delta_e_spectral_ = 0.0;
    bool double_well_ = false;
};

inline ProtocolResult run_scan(const ProtocolConfig& cfg) {
    ShotEngine engine(cfg);
    ProtocolResult res;
    res.delta_e_spectral = engine.delta_e_spectral();

    const bool deterministic_point =
        cfg.measurement == Measurement::expectation && cfg.poisoning_rate == 0.0;
    const long shots = deterministic_point ? 1 : cfg.shots_per_point;

    std::vector<double> t_axis, p_axis;
    double phase_sum = 0.0;
    long phase_n = 0;
    for (std::uint32_t di = 0; di < cfg.hold_times.size(); ++di) {
        double acc = 0.0, acc2 = 0.0;
        for (long si = 0; si < shots; ++si) {
            const ShotRecord rec = engine.run_shot(di, static_cast<std::uint32_t>(si));
            const double v = cfg.measurement == Measurement::projective_sampling
                                 ? (rec.outcome == FluxOutcome::flux_2phi0 ? 1.0 : 0.0)
                                 : rec.p_right;
            acc += v;
            acc2 += v * v;
            phase_sum += rec.mean_phase;
            ++phase_n;
            res.shots.push_back(rec);
        }
        const double p = acc / static_cast<double>(shots);
        double se = 0.0;
        if (shots > 1) {
            if (cfg.measurement == Measurement::projective_sampling) {
                se = std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(shots)));
            } else {
                const double var =
                    std::max(0.0, acc2 / shots - p * p) / static_cast<double>(shots - 1);
                se = std::sqrt(var);
            }
        }
        res.points.push_back({cfg.hold_times[di], p, se, shots});
        t_axis.push_back(cfg.hold_times[di]);
        p_axis.push_back(p);
    }
    res.mean_phase_avg = phase_n > 0 ? phase_sum / static_cast<double>(phase_n) : 0.0;

    const auto fit = detail::fit_cosine(t_axis, p_axis, res.delta_e_spectral);
    res.frequency = std::max(0.0, fit.frequency);
    res.visibility =
        std::clamp(fit.amplitude / std::max(fit.offset, 1e-12), 0.0, 1.0);
    res.fit_residual = fit.residual;

    const auto [tmin, tmax] = std::minmax_element(t_axis.begin(), t_axis.end());
    if (res.delta_e_spectral > 0.0 &&
        (*tmax - *tmin) < 0.5 / res.delta_e_spectral)
        res.fit_degenerate = true;
    return res;
}

// Single-shot convenience entry point matching the protocol description.
inline ShotRecord run_shot(double hold_ns, const ProtocolConfig& cfg,
                           std::uint32_t shot_index) {
    ProtocolConfig c = cfg;
    c.hold_times = {hold_ns};
    ShotEngine engine(c);
    return engine.run_shot(0, shot_index);
}

} // namespace phaseslip
