#pragma once

// Static characterization of the potential landscape: well minima, the
// barrier between them, anticrossing gaps, and the two parity-transfer
// estimates.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "phaseslip/errors.hpp"
#include "phaseslip/grid.hpp"
#include "phaseslip/model.hpp"

namespace phaseslip {

struct WellPoint {
    double phi;
    double energy;
};

struct WellReport {
    std::vector<WellPoint> minima;          // sorted by phi
    std::optional<WellPoint> barrier_top;   // between the two deepest minima
    double separation = 0.0;                // rad, 0 when fewer than two minima
    double barrier_height = 0.0;            // barrier energy minus lower minimum

    bool has_double_well() const { return minima.size() >= 2 && barrier_top.has_value(); }

    void require_double_well() const {
        if (!has_double_well())
            throw NoDoubleWellError("potential has no double well at this bias");
    }
};

namespace detail {

// Bisection on dU/dphi. The potential is smooth; robustness over speed.
template <typename F>
double bisect_root(F&& deriv, double lo, double hi) {
    double flo = deriv(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = deriv(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

// Locate local minima of the scalar potential over the grid window via sign
// changes of dU/dphi refined by bisection; when two or more minima exist,
// report the barrier between the two deepest ones.
inline WellReport find_wells(const CircuitParams& p, double phi_e,
                             ParitySector sector = ParitySector::even,
                             const PhaseGrid& g = PhaseGrid{}) {
    p.validate();
    g.validate();
    auto deriv = [&](double phi) { return potential_scalar_deriv(phi, phi_e, p, sector); };
    auto value = [&](double phi) { return potential_scalar(phi, phi_e, p, sector); };

    WellReport rep;
    std::vector<double> maxima;
    double prev_phi = g.point(0);
    double prev_d = deriv(prev_phi);
    for (int j = 1; j < g.n; ++j) {
        const double phi = g.point(j);
        const double d = deriv(phi);
        if (prev_d < 0.0 && d >= 0.0) {
            const double root = detail::bisect_root(deriv, prev_phi, phi);
            rep.minima.push_back({root, value(root)});
        } else if (prev_d > 0.0 && d <= 0.0) {
            maxima.push_back(detail::bisect_root(deriv, prev_phi, phi));
        }
        prev_phi = phi;
        prev_d = d;
    }

    if (rep.minima.size() >= 2) {
        // Two deepest minima, then restore phi order.
        auto deepest = rep.minima;
        std::sort(deepest.begin(), deepest.end(),
                  [](const WellPoint& a, const WellPoint& b) { return a.energy < b.energy; });
        WellPoint left = deepest[0], right = deepest[1];
        if (left.phi > right.phi) std::swap(left, right);
        rep.separation = right.phi - left.phi;

        double best_phi = 0.0, best_u = -std::numeric_limits<double>::infinity();
        for (double m : maxima) {
            if (m > left.phi && m < right.phi && value(m) > best_u) {
                best_phi = m;
                best_u = value(m);
            }
        }
        if (best_u > -std::numeric_limits<double>::infinity()) {
            rep.barrier_top = WellPoint{best_phi, best_u};
            rep.barrier_height = best_u - std::min(left.energy, right.energy);
        }
    }
    return rep;
}

// Gap between the adiabatic bands at phi = (2k+1)*pi, where the sigma_z term
// vanishes and the anticrossing gap reduces to 2*epsilon.
inline double anticrossing_gap(const CircuitParams& p, int k) {
    p.validate();
    const double phi = (2.0 * k + 1.0) * std::numbers::pi;
    const auto bands = potential_spinor(phi, 0.0, p).bands();
    return bands[1] - bands[0];
}

// Parity-transfer amplitude ratio eps / sqrt(eps^2 + E_m^2 cos^2(phi/2)),
// clamped to [0,1].
inline double parity_transfer_amplitude(double phi, const CircuitParams& p) {
    p.validate();
    const double bias = p.e_m * std::cos(0.5 * phi);
    const double denom = std::sqrt(p.epsilon * p.epsilon + bias * bias);
    if (denom == 0.0)
        throw DegeneracyError("parity_transfer_amplitude: undefined at exact degeneracy");
    return std::clamp(p.epsilon / denom, 0.0, 1.0);
}

// Exact maximum population transfer of a static two-level system with bias
// E_m cos(phi/2) and coupling eps, starting in even parity:
// eps^2 / (eps^2 + bias^2).
inline double parity_transfer_rabi(double phi, const CircuitParams& p) {
    p.validate();
    const double bias = p.e_m * std::cos(0.5 * phi);
    const double denom = p.epsilon * p.epsilon + bias * bias;
    if (denom == 0.0)
        throw DegeneracyError("parity_transfer_rabi: undefined at exact degeneracy");
    return std::clamp(p.epsilon * p.epsilon / denom, 0.0, 1.0);
}

} // namespace phaseslip
