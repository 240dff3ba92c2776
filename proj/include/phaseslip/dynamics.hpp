#pragma once

// Norm-preserving time evolution of the two-parity-component wavefunction
// under a time-dependent flux bias, with instantaneous quasiparticle
// parity-flip events at given times.
//
// The propagator is the Cayley (trapezoidal) form of the midpoint rule:
//   psi(t+dt) = (1 + i*pi*dt*H)^{-1} (1 - i*pi*dt*H) psi(t),
// exactly unitary up to linear-solver tolerance. H is in GHz, t in ns, and
// the 2*pi of E = h*f is carried explicitly (hence pi = 2*pi/2 per half step).

#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "phaseslip/errors.hpp"
#include "phaseslip/grid.hpp"
#include "phaseslip/lapack.hpp"
#include "phaseslip/model.hpp"
#include "phaseslip/rng.hpp"
#include "phaseslip/spectral.hpp"

namespace phaseslip {

using cplx = std::complex<double>;

struct SpinorState {
    PhaseGrid grid;
    std::vector<cplx> even;
    std::vector<cplx> odd;
    double time = 0.0;  // ns
    double phi_e = 0.0; // bias at `time`; barrier reference for observables

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : even) s += std::norm(a);
        for (const auto& a : odd) s += std::norm(a);
        return s * grid.spacing();
    }
    double norm() const { return std::sqrt(norm_sq()); }

    void normalize() {
        const double n = norm();
        if (n == 0.0) throw NumericalError("SpinorState: cannot normalize zero state");
        for (auto& a : even) a /= n;
        for (auto& a : odd) a /= n;
    }
};

// Piecewise-linear bias schedule; evaluation clamps outside the knot range.
struct BiasSchedule {
    std::vector<std::pair<double, double>> knots; // (t_ns, phi_e)

    static BiasSchedule constant(double phi_e) { return {{{0.0, phi_e}}}; }

    // 0 ramp time degenerates to a constant hold at phi_to.
    static BiasSchedule quench(double phi_from, double phi_to, double ramp_ns) {
        if (ramp_ns <= 0.0) return constant(phi_to);
        return {{{0.0, phi_from}, {ramp_ns, phi_to}}};
    }

    void validate() const {
        if (knots.empty()) throw ConfigError("BiasSchedule: needs at least one knot");
        for (size_t i = 1; i < knots.size(); ++i)
            if (!(knots[i].first > knots[i - 1].first))
                throw ConfigError("BiasSchedule: knot times must be strictly increasing");
    }

    double value(double t) const {
        if (t <= knots.front().first) return knots.front().second;
        if (t >= knots.back().first) return knots.back().second;
        for (size_t i = 1; i < knots.size(); ++i) {
            if (t <= knots[i].first) {
                const auto& [t0, v0] = knots[i - 1];
                const auto& [t1, v1] = knots[i];
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        return knots.back().second;
    }

    bool is_constant_after(double t) const {
        return knots.size() == 1 || t >= knots.back().first;
    }
};

struct FlipEvents {
    std::vector<double> times; // ns, ascending

    void validate(double t_end) const {
        for (size_t i = 0; i < times.size(); ++i) {
            if (times[i] < 0.0 || times[i] > t_end)
                throw ConfigError("FlipEvents: time outside [0, t_end]");
            if (i > 0 && times[i] < times[i - 1])
                throw ConfigError("FlipEvents: times must be ascending");
        }
    }
};

// Poisson parity-flip times with exponential inter-arrival sampling.
// Deterministic for a fixed seed, empty for rate = 0.
inline FlipEvents sample_flip_times(double rate_per_ns, double t_end,
                                    std::uint64_t seed) {
    if (rate_per_ns < 0.0) throw ConfigError("sample_flip_times: rate must be >= 0");
    FlipEvents ev;
    if (rate_per_ns == 0.0 || t_end <= 0.0) return ev;
    SplitMix64 rng(SplitMix64::mix(seed, 0x666c6970ULL));
    double t = 0.0;
    while (true) {
        t += rng.exponential(rate_per_ns);
        if (t > t_end) break;
        ev.times.push_back(t);
    }
    return ev;
}

// sigma_x in parity space: swap the component arrays, spatial profile kept.
inline SpinorState apply_parity_flip(SpinorState s) {
    std::swap(s.even, s.odd);
    return s;
}

struct Observables {
    double mean_phase; // <phi>, rad
    double p_right;    // probability mass at phi > phi_e
    double parity_z;   // <sigma_z> in [-1, 1]
    double norm;
};

inline Observables observables(const SpinorState& s) {
    const double h = s.grid.spacing();
    double nrm = 0.0, phase = 0.0, right = 0.0, pz = 0.0;
    for (int j = 0; j < s.grid.n; ++j) {
        const double we = std::norm(s.even[j]);
        const double wo = std::norm(s.odd[j]);
        const double w = we + wo;
        nrm += w;
        phase += s.grid.point(j) * w;
        pz += we - wo;
        if (s.grid.point(j) > s.phi_e) right += w;
    }
    nrm *= h;
    if (nrm == 0.0) return {0.0, 0.0, 0.0, 0.0};
    return {phase * h / nrm, right * h / nrm, pz * h / nrm, std::sqrt(nrm)};
}

// <psi|H|psi> for a real symmetric banded H in the interleaved spinor layout.
inline double energy_expectation(const SpinorState& s, const HamiltonianMatrix& hm) {
    if (hm.dim != 2 * s.grid.n)
        throw ConfigError("energy_expectation: dimension mismatch");
    const int n = hm.dim;
    std::vector<cplx> x(n), y(n, 0.0);
    for (int j = 0; j < s.grid.n; ++j) {
        x[2 * j] = s.even[j];
        x[2 * j + 1] = s.odd[j];
    }
    for (int j = 0; j < n; ++j) {
        y[j] += hm.ab[static_cast<size_t>(j) * (hm.kd + 1)] * x[j];
        const int top = std::min(hm.kd, n - 1 - j);
        for (int d = 1; d <= top; ++d) {
            const double a = hm.ab[static_cast<size_t>(j) * (hm.kd + 1) + d];
            y[j + d] += a * x[j];
            y[j] += a * x[j + d];
        }
    }
    double e = 0.0;
    for (int j = 0; j < n; ++j) e += (std::conj(x[j]) * y[j]).real();
    return e * s.grid.spacing() / s.norm_sq();
}

// One-step Cayley propagator with a cache of banded LU factorizations keyed
// by (phi_e, dt). A constant global energy shift is removed from H before
// propagation; it only changes an overall phase but keeps the scheme's phase
// errors tied to the dynamically relevant energy differences.
class CayleyPropagator {
public:
    CayleyPropagator(CircuitParams params, PhaseGrid grid, double energy_shift = 0.0)
        : params_(std::move(params)), grid_(grid), shift_(energy_shift) {
        params_.validate();
        grid_.validate();
    }

    const CircuitParams& params() const { return params_; }
    const PhaseGrid& grid() const { return grid_; }
    double energy_shift() const { return shift_; }

    // Largest junction/circuit energy scale, for the dt accuracy guard.
    double energy_scale() const {
        double junction = 0.0;
        switch (params_.mode) {
        case JunctionMode::topological: junction = params_.e_m; break;
        case JunctionMode::trivial_tunneling: junction = params_.e_j(); break;
        case JunctionMode::trivial_full: junction = params_.delta_gap * params_.transparency / 2.0; break;
        case JunctionMode::combined: junction = params_.e_m + params_.e_j(); break;
        }
        return std::max({params_.e_c, params_.e_l, junction, 1e-12});
    }

    // Advance state to t_target, applying flips whose times fall in
    // (state.time, t_target]. Steps within a flip-free segment are uniform
    // and no larger than dt.
    void advance(SpinorState& state, double t_target, const BiasSchedule& sched,
                 std::span<const double> flips, double dt) {
        check_dt(dt);
        sched.validate();
        if (t_target < state.time)
            throw ConfigError("CayleyPropagator: cannot advance backwards in time");

        size_t fi = 0;
        while (fi < flips.size() && flips[fi] <= state.time) ++fi;

        while (state.time < t_target - 1e-15 || fi < flips.size()) {
            double t_ev = t_target;
            bool is_flip = false;
            if (fi < flips.size() && flips[fi] <= t_target) {
                t_ev = flips[fi];
                is_flip = true;
            }
            run_segment(state, t_ev, sched, dt);
            if (is_flip) {
                std::swap(state.even, state.odd);
                ++fi;
            }
            if (!is_flip && state.time >= t_target - 1e-15) break;
        }
        state.time = t_target;
        state.phi_e = sched.value(t_target);
    }

    void check_dt(double dt) const {
        if (dt <= 0.0) throw ConfigError("CayleyPropagator: dt must be > 0");
        if (dt > 0.1 / energy_scale())
            throw ConfigError("CayleyPropagator: dt exceeds 0.1/max energy scale");
    }

private:
    struct Factor {
        HamiltonianMatrix h_shifted;     // real banded H - shift*I
        std::vector<cplx> lu;            // zgbtrf of (1 + i*pi*dt*H')
        std::vector<lapack_int> ipiv;
        double a;                        // pi*dt
    };

    // Full steps of exactly dt, then one remainder step, so that constant
    // schedules reuse a single factorization.
    void run_segment(SpinorState& state, double t_ev, const BiasSchedule& sched,
                     double dt) {
        const double span = t_ev - state.time;
        if (span <= 1e-15) {
            state.time = t_ev;
            return;
        }
        const long nfull = static_cast<long>(std::floor(span / dt + 1e-9));
        double rem = span - static_cast<double>(nfull) * dt;
        if (rem < 1e-12) rem = 0.0;
        const double t0 = state.time;
        for (long k = 0; k < nfull; ++k) {
            const double t_mid = t0 + (static_cast<double>(k) + 0.5) * dt;
            step(state, dt, sched.value(t_mid));
            state.time = t0 + (static_cast<double>(k) + 1.0) * dt;
        }
        if (rem > 0.0)
            step(state, rem, sched.value(t0 + static_cast<double>(nfull) * dt + 0.5 * rem));
        state.time = t_ev;
    }

    void step(SpinorState& state, double dt, double phi_e) {
        const Factor& f = factor(phi_e, dt);
        const int n = 2 * grid_.n;
        const int kd = 2;
        rhs_.resize(n);
        // rhs = (1 - i*a*H') psi
        for (int j = 0; j < grid_.n; ++j) {
            rhs_[2 * j] = state.even[j];
            rhs_[2 * j + 1] = state.odd[j];
        }
        tmp_.assign(n, cplx{0.0, 0.0});
        for (int j = 0; j < n; ++j) {
            tmp_[j] += f.h_shifted.ab[static_cast<size_t>(j) * (kd + 1)] * rhs_[j];
            const int top = std::min(kd, n - 1 - j);
            for (int d = 1; d <= top; ++d) {
                const double a = f.h_shifted.ab[static_cast<size_t>(j) * (kd + 1) + d];
                tmp_[j + d] += a * rhs_[j];
                tmp_[j] += a * rhs_[j + d];
            }
        }
        const cplx ia{0.0, f.a};
        for (int j = 0; j < n; ++j) rhs_[j] -= ia * tmp_[j];

        const double norm_before = state.norm_sq();
        const int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1,
                                        f.lu.data(), 3 * kd + 1,
                                        f.ipiv.data(), rhs_.data(), n);
        if (info != 0)
            throw NumericalError("CayleyPropagator: zgbtrs failed, info=" +
                                 std::to_string(info));
        for (int j = 0; j < grid_.n; ++j) {
            state.even[j] = rhs_[2 * j];
            state.odd[j] = rhs_[2 * j + 1];
        }
        const double drift = std::abs(state.norm_sq() - norm_before);
        if (drift > 1e-8 * std::max(1.0, norm_before))
            throw StepRejectionError("CayleyPropagator: single-step norm drift " +
                                     std::to_string(drift));
    }

    const Factor& factor(double phi_e, double dt) {
        const auto key = std::make_pair(phi_e, dt);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        if (cache_.size() > 64) cache_.clear(); // ramps and odd remainders stay bounded

        Factor f;
        f.a = std::numbers::pi * dt;
        f.h_shifted = assemble_spinor(grid_, params_, phi_e);
        const int n = f.h_shifted.dim;
        const int kd = f.h_shifted.kd;
        for (int j = 0; j < n; ++j)
            f.h_shifted.ab[static_cast<size_t>(j) * (kd + 1)] -= shift_;

        // General banded storage for zgbtrf: ldab = 2*kl + ku + 1.
        const int kl = kd, ku = kd, ldab = 2 * kl + ku + 1;
        f.lu.assign(static_cast<size_t>(ldab) * n, cplx{0.0, 0.0});
        const cplx ia{0.0, f.a};
        for (int j = 0; j < n; ++j) {
            for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) {
                const cplx aij = ia * f.h_shifted.at(i, j) +
                                 (i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0});
                f.lu[static_cast<size_t>(j) * ldab + (kl + ku + i - j)] = aij;
            }
        }
        f.ipiv.assign(n, 0);
        const int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, f.lu.data(),
                                        ldab, f.ipiv.data());
        if (info != 0)
            throw NumericalError("CayleyPropagator: zgbtrf failed, info=" +
                                 std::to_string(info));
        return cache_.emplace(key, std::move(f)).first->second;
    }

    CircuitParams params_;
    PhaseGrid grid_;
    double shift_;
    std::map<std::pair<double, double>, Factor> cache_;
    std::vector<cplx> rhs_, tmp_;
};

// Full-trajectory driver: advances from s0 to t_end, emitting a snapshot
// every `stride` steps of length dt plus the final state. The energy shift
// defaults to <H> of the initial state at the initial bias.
inline std::vector<SpinorState> evolve(const CircuitParams& p, const SpinorState& s0,
                                       const BiasSchedule& sched, double dt, double t_end,
                                       const FlipEvents& flips, int stride = 500,
                                       double energy_shift = std::nan("")) {
    if (std::abs(s0.norm() - 1.0) > 1e-6)
        throw ConfigError("evolve: initial state must be normalized");
    sched.validate();
    flips.validate(t_end);
    if (stride < 1) throw ConfigError("evolve: stride must be >= 1");

    double shift = energy_shift;
    if (std::isnan(shift)) {
        const auto h0 = assemble_spinor(s0.grid, p, sched.value(s0.time));
        shift = energy_expectation(s0, h0);
    }
    CayleyPropagator prop(p, s0.grid, shift);
    prop.check_dt(dt);

    std::vector<SpinorState> traj;
    SpinorState s = s0;
    s.phi_e = sched.value(s.time);
    traj.push_back(s);
    const double span = t_end - s.time;
    if (span <= 0.0) return traj;
    const long total = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-12)));
    const long nsnap = (total + stride - 1) / stride;
    const double t0 = s.time;
    for (long k = 1; k <= nsnap; ++k) {
        const double target = (k == nsnap) ? t_end
                              : t0 + span * static_cast<double>(k * stride) /
                                     static_cast<double>(total);
        prop.advance(s, target, sched, flips.times, dt);
        traj.push_back(s);
    }
    return traj;
}

} // namespace phaseslip
