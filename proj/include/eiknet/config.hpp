#pragma once

#include <cstdint>
#include <stdexcept>

namespace eiknet {

// Numeric knobs shared by every module. The defaults are the reference
// configuration; all outputs echo the values actually used.
struct Config {
    // Samples per arc for support-function grids and emitted fields.
    // Must be odd and >= 33 so panel boundaries align with grid nodes.
    int grid = 257;
    // Simpson panels across a full arc; subintervals get a prorated count.
    int panels = 256;
    // Relative tolerance for scalar root finding and 1-d minimization.
    double root_tol = 1e-10;
    // Bracket half-width for critical-value bisection, relative.
    double critical_tol = 1e-8;
    // Degeneracy detection threshold on m_gamma(s) vs the critical value.
    double energy_tol = 1e-7;
    // Pairwise/report checks (admissibility, subsolution slack), relative.
    double check_tol = 1e-7;
    // Fixed-point / solution agreement threshold, relative.
    double solution_tol = 1e-6;
    // Per-edge scale of the negative-cycle tolerance.
    double cycle_tol_factor = 1e-9;
    // Static-class equivalence threshold on symmetric costs, relative.
    double class_tol = 1e-6;
    // Geometry tolerances are relative to the network diameter.
    double coord_tol = 1e-9;
    // Cap on paths explored by the enumeration oracle.
    std::uint64_t enumeration_cap = 2'000'000;
    // RNG seed for randomized harness runs.
    std::uint64_t seed = 2024;

    void validate() const {
        if (grid < 33 || grid % 2 == 0)
            throw std::invalid_argument("config: grid must be odd and >= 33");
        if (panels < 1)
            throw std::invalid_argument("config: panels must be positive");
        if (root_tol <= 0 || critical_tol <= 0 || energy_tol <= 0 || check_tol <= 0 ||
            solution_tol <= 0 || cycle_tol_factor <= 0 || class_tol <= 0 || coord_tol <= 0)
            throw std::invalid_argument("config: tolerances must be positive");
    }
};

} // namespace eiknet
