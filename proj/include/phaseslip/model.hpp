#pragma once

// Circuit parameters and closed-form energy expressions for a topological
// RF SQUID: a superconducting loop closed by a Majorana-hosting junction.
// All energies are E/h in GHz, all angles in radians, lengths in micrometers.

#include <array>
#include <cmath>
#include <string>

#include "phaseslip/errors.hpp"

namespace phaseslip {

enum class JunctionMode {
    topological,       // parity-dependent -E_m cos(phi/2) coupling
    trivial_tunneling, // -E_J cos(phi) tunneling limit
    trivial_full,      // -Delta sqrt(1 - D sin^2(phi/2)) single channel
    combined,          // topological plus the full conventional term
};

// Convention for the charge operator conjugate to phi in the kinetic term.
// single_electron counts charge in units of e (n -> -2i d/dphi, coefficient
// 4 E_c); cooper_pair counts pairs (n -> -i d/dphi, coefficient E_c).
enum class ChargeConvention { single_electron, cooper_pair };

enum class ParitySector { even, odd };

inline double parity_sign(ParitySector s) {
    return s == ParitySector::even ? +1.0 : -1.0;
}

inline std::string to_string(JunctionMode m) {
    switch (m) {
    case JunctionMode::topological: return "topological";
    case JunctionMode::trivial_tunneling: return "trivial_tunneling";
    case JunctionMode::trivial_full: return "trivial_full";
    case JunctionMode::combined: return "combined";
    }
    return "?";
}

struct DerivedCouplings {
    double e_m; // GHz, topological amplitude Delta*sqrt(D)
    double e_j; // GHz, tunneling-limit amplitude Delta*D/4
};

// Both junction amplitudes from the gap and the channel transparency.
// The identity e_j = e_m^2 / (4 delta) holds by construction.
inline DerivedCouplings derived_couplings(double delta_ghz, double transparency) {
    if (delta_ghz <= 0.0)
        throw ConfigError("derived_couplings: delta must be > 0");
    if (transparency < 0.0 || transparency > 1.0)
        throw ConfigError("derived_couplings: transparency must lie in [0,1]");
    return {delta_ghz * std::sqrt(transparency), delta_ghz * transparency / 4.0};
}

// Zeeman splitting past the critical field B_c = sqrt(delta^2 + mu^2)?
inline bool is_topological(double zeeman_ghz, double delta_ghz, double mu_ghz) {
    if (delta_ghz <= 0.0)
        throw ConfigError("is_topological: delta must be > 0");
    return zeeman_ghz > std::sqrt(delta_ghz * delta_ghz + mu_ghz * mu_ghz);
}

struct CircuitParams {
    double e_c = 3.0;             // charging energy, GHz
    double e_l = 1.0;             // inductive energy, GHz
    double e_m = 25.0;            // topological Josephson amplitude, GHz
    double delta_gap = 200.0;     // superconducting gap, GHz
    double transparency = 0.015625; // junction conductance D in [0,1]
    double epsilon = 0.025;       // same-wire Majorana hybridization, GHz
    JunctionMode mode = JunctionMode::topological;
    ChargeConvention convention = ChargeConvention::single_electron;

    // Coefficient of -d^2/dphi^2 in the circuit Hamiltonian.
    double kinetic_scale() const {
        return convention == ChargeConvention::single_electron ? 4.0 * e_c : e_c;
    }

    double e_j() const { return delta_gap * transparency / 4.0; }

    void validate() const {
        if (e_c <= 0.0) throw ConfigError("CircuitParams: e_c must be > 0");
        if (e_l <= 0.0) throw ConfigError("CircuitParams: e_l must be > 0");
        if (e_m < 0.0) throw ConfigError("CircuitParams: e_m must be >= 0");
        if (delta_gap <= 0.0) throw ConfigError("CircuitParams: delta_gap must be > 0");
        if (transparency < 0.0 || transparency > 1.0)
            throw ConfigError("CircuitParams: transparency must lie in [0,1]");
        if (epsilon < 0.0) throw ConfigError("CircuitParams: epsilon must be >= 0");
        // When both routes to E_m are supplied they must agree.
        if (e_m > 0.0 && transparency > 0.0) {
            const double ref = delta_gap * std::sqrt(transparency);
            if (std::abs(e_m - ref) > 1e-9 * std::max(e_m, ref))
                throw ConfigError("CircuitParams: e_m inconsistent with delta*sqrt(D); got e_m=" +
                                  std::to_string(e_m) + " vs " + std::to_string(ref));
        }
    }
};

struct WireParams {
    double zeeman = 0.0;    // GHz
    double mu = 0.0;        // GHz
    double length = 2.0;    // topological-section length, um
    double xi = 0.2413;     // coherence length, um
    double epsilon0 = 100.0; // hybridization prefactor, GHz

    void validate() const {
        if (length < 0.0) throw ConfigError("WireParams: length must be >= 0");
        if (xi <= 0.0) throw ConfigError("WireParams: xi must be > 0");
        if (epsilon0 < 0.0) throw ConfigError("WireParams: epsilon0 must be >= 0");
    }
};

// Exponential envelope of the same-wire Majorana coupling. The coupling also
// oscillates with the wire length; only the magnitude enters the analysis,
// so the envelope is what we model.
inline double majorana_epsilon(const WireParams& w) {
    w.validate();
    return w.epsilon0 * std::exp(-w.length / w.xi);
}

// Even-parity potential E_L (phi - phi_e)^2 - E_m cos(phi/2).
inline double potential_even(double phi, double phi_e, const CircuitParams& p) {
    const double x = phi - phi_e;
    return p.e_l * x * x - p.e_m * std::cos(0.5 * phi);
}

inline double potential_sector(double phi, double phi_e, const CircuitParams& p,
                               ParitySector s) {
    const double x = phi - phi_e;
    return p.e_l * x * x - parity_sign(s) * p.e_m * std::cos(0.5 * phi);
}

// Single-channel conventional junction energy -Delta sqrt(1 - D sin^2(phi/2)).
inline double junction_energy_conventional(double phi, double delta_ghz,
                                           double transparency) {
    if (transparency < 0.0 || transparency > 1.0)
        throw ConfigError("junction_energy_conventional: transparency must lie in [0,1]");
    const double s = std::sin(0.5 * phi);
    return -delta_ghz * std::sqrt(1.0 - transparency * s * s);
}

// Scalar potential actually entering the Hamiltonian for a given junction
// mode and parity sector. Trivial modes carry no parity dependence.
inline double potential_scalar(double phi, double phi_e, const CircuitParams& p,
                               ParitySector s) {
    const double x = phi - phi_e;
    const double inductive = p.e_l * x * x;
    switch (p.mode) {
    case JunctionMode::topological:
        return inductive - parity_sign(s) * p.e_m * std::cos(0.5 * phi);
    case JunctionMode::trivial_tunneling:
        return inductive - p.e_j() * std::cos(phi);
    case JunctionMode::trivial_full:
        return inductive + junction_energy_conventional(phi, p.delta_gap, p.transparency);
    case JunctionMode::combined:
        return inductive - parity_sign(s) * p.e_m * std::cos(0.5 * phi) +
               junction_energy_conventional(phi, p.delta_gap, p.transparency);
    }
    return inductive;
}

// d/dphi of potential_scalar, used by the well finder.
inline double potential_scalar_deriv(double phi, double phi_e, const CircuitParams& p,
                                     ParitySector s) {
    const double x = phi - phi_e;
    double d = 2.0 * p.e_l * x;
    const double topo = 0.5 * parity_sign(s) * p.e_m * std::sin(0.5 * phi);
    switch (p.mode) {
    case JunctionMode::topological:
        return d + topo;
    case JunctionMode::trivial_tunneling:
        return d + p.e_j() * std::sin(phi);
    case JunctionMode::trivial_full: {
        const double sh = std::sin(0.5 * phi);
        const double root = std::sqrt(1.0 - p.transparency * sh * sh);
        return d + p.delta_gap * p.transparency * std::sin(phi) / (4.0 * root);
    }
    case JunctionMode::combined: {
        const double sh = std::sin(0.5 * phi);
        const double root = std::sqrt(1.0 - p.transparency * sh * sh);
        return d + topo + p.delta_gap * p.transparency * std::sin(phi) / (4.0 * root);
    }
    }
    return d;
}

// Two-component potential in the {even, odd} parity basis:
//   E_L (phi-phi_e)^2 I - E_m cos(phi/2) sigma_z + epsilon sigma_x.
// Stored as a symmetric 2x2 matrix.
struct SpinorPotential {
    double u_ee; // even diagonal
    double u_oo; // odd diagonal
    double u_eo; // parity coupling

    // Adiabatic bands: eigenvalues of the 2x2 matrix, lower first.
    std::array<double, 2> bands() const {
        const double avg = 0.5 * (u_ee + u_oo);
        const double half = 0.5 * (u_ee - u_oo);
        const double r = std::sqrt(half * half + u_eo * u_eo);
        return {avg - r, avg + r};
    }
};

inline SpinorPotential potential_spinor(double phi, double phi_e,
                                        const CircuitParams& p) {
    const double ue = potential_scalar(phi, phi_e, p, ParitySector::even);
    const double uo = potential_scalar(phi, phi_e, p, ParitySector::odd);
    const bool has_majorana = p.mode == JunctionMode::topological ||
                              p.mode == JunctionMode::combined;
    return {ue, uo, has_majorana ? p.epsilon : 0.0};
}

} // namespace phaseslip
