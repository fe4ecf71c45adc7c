#pragma once

#include <complex>
#include <random>

#include "hampath/timegrid.hpp"

namespace testing {

inline double rel(std::complex<double> a, std::complex<double> b) {
    return std::abs(a - b) / std::abs(b);
}

inline hampath::DiscreteFunction random_function(const hampath::TimeGrid& grid,
                                                 std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXcd v(grid.n());
    for (int i = 0; i < grid.n(); ++i) v[i] = {normal(rng), normal(rng)};
    return hampath::DiscreteFunction(grid, v);
}

inline hampath::PhaseFunction random_phase_function(const hampath::TimeGrid& grid,
                                                    std::mt19937_64& rng, double scale = 1.0) {
    return hampath::PhaseFunction(random_function(grid, rng, scale),
                                  random_function(grid, rng, scale));
}

inline std::complex<double> random_complex(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    return {normal(rng), normal(rng)};
}

}  // namespace testing
