#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hampath/timegrid.hpp"

namespace hampath::verify {

/// Ordered (quantity, value) lines plus an overall verdict.
struct Report {
    std::string suite;
    std::vector<std::pair<std::string, double>> lines;
    bool pass = true;

    void add(std::string name, double value) { lines.emplace_back(std::move(name), value); }
    void check(bool ok) { pass = pass && ok; }
};

/// Truncated product vs closed form vs dense-matrix determinant.
Report determinant(double k, double t, int terms, int grid_n);

/// Leading five eigenvalues of A on grids n/4, n/2, n with observed orders.
Report spectrum(double t, int grid_n);

/// Schroedinger residual at h and h/2 on the interior 5 x 5 grid of
/// (0.2, 1.4) x (-2, 2), with the observed order at each point.
Report pde(double k, double h);

/// Cosine-basis oracle (Richardson over dim/4, dim/2, dim) against the
/// oscillator propagator and the eps-regularized free expectation.
Report oracle_agreement(double k, double t, double p, int dim, double eps, double p0, int grid_n);

/// Weak pairing of the eps-expectation with a unit-mass bump for
/// eps in {0.1, 0.05, 0.025}: errors and successive ratios.
Report free_limit(double p0, double t, int grid_n);

/// |pairing - phi(p0) exp(-i p0^2 t / 2)| for one eps, with a unit-mass
/// Gaussian bump phi centred at p0.
double free_limit_error(double p0, double t, double eps, int grid_n);

}  // namespace hampath::verify
