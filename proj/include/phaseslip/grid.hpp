#pragma once

#include <cmath>
#include <numbers>

#include "phaseslip/errors.hpp"

namespace phaseslip {

// Uniform discretization of the phase coordinate. Wavefunctions obey
// Dirichlet conditions one spacing outside both ends.
struct PhaseGrid {
    double phi_min = -6.0 * std::numbers::pi;
    double phi_max = 10.0 * std::numbers::pi;
    int n = 4096;

    double spacing() const { return (phi_max - phi_min) / (n - 1); }
    double point(int j) const { return phi_min + j * spacing(); }

    void validate() const {
        if (n < 16) throw ConfigError("PhaseGrid: need at least 16 points");
        if (!(phi_max > phi_min)) throw ConfigError("PhaseGrid: phi_max must exceed phi_min");
    }

    bool operator==(const PhaseGrid&) const = default;
};

} // namespace phaseslip
