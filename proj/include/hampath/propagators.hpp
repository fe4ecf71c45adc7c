#pragma once

#include "hampath/gausskernel.hpp"

namespace hampath {

/// Free particle: initial momentum p0, final momentum p1, time t, regularization eps.
struct FreeParams {
    double p0 = 0.0;
    double p1 = 0.0;
    double t = 1.0;
    double eps = 0.01;

    void validate() const;
};

/// Harmonic oscillator V(x) = k x^2 / 2 started at p0 = 0, pinned at p1.
struct HOParams {
    double k = 1.0;
    double t = 1.0;
    double p1 = 0.0;

    /// Checks k > 0, t > 0 and that t is not a caustic.
    void validate() const;
    /// sqrt(k) t beyond pi/2: the square-root prefactor is past its first
    /// caustic and its branch is not fixed by the construction.
    bool beyond_first_caustic() const;
};

/// Regularized free integrand on one grid. The drift, pin and N_eps^-1
/// (closed-form inverse with +eps on the pp block) are built once.
class FreeParticle {
public:
    FreeParticle(double p0, double t, double eps, const TimeGrid& grid);

    TTransformValue t_transform(double p1, const PhaseFunction& f) const;
    cplx expectation(double p1) const;

    const GaussKernelSpec& spec() const noexcept { return spec_; }
    const BlockOperator& inverse() const noexcept { return inverse_; }

private:
    double p0_;
    GaussKernelSpec spec_;
    BlockOperator inverse_;
};

TTransformValue free_t_transform_eps(const FreeParams& params, const PhaseFunction& f);

/// T-transform at f = 0 on a grid of `grid_n` cells.
cplx free_expectation_eps(const FreeParams& params, int grid_n = 256);

/// The factored closed form of the eps-expectation, with the elementary
/// integrals of (s - t) and (s - t)^2 done analytically.
cplx free_expectation_reference(const FreeParams& params);

/// Oscillator integrand on one grid. Uses N^-1 = closed_inverse_ho, the
/// determinant factor (1 / cos(sqrt(k) t))^(1/2), and the pin matrix
/// i sqrt(k) tan(sqrt(k) t) evaluated as a spectral series.
class HarmonicOscillator {
public:
    HarmonicOscillator(double k, double t, const TimeGrid& grid, int spectral_terms = 100000);

    TTransformValue t_transform(double p1, const PhaseFunction& f) const;
    cplx expectation(double p1) const;

    const GaussKernelSpec& spec() const noexcept { return spec_; }
    const BlockOperator& inverse() const noexcept { return inverse_; }
    cplx det_factor() const noexcept { return det_factor_; }
    const Eigen::MatrixXcd& pin_matrix() const noexcept { return pin_matrix_; }

private:
    GaussKernelSpec spec_;
    BlockOperator inverse_;
    cplx det_factor_;
    Eigen::MatrixXcd pin_matrix_;
};

TTransformValue ho_t_transform(const HOParams& params, const PhaseFunction& f);

/// Closed-form momentum-space propagator
///   sqrt(1 / (2 pi i sqrt(k) sin(sqrt(k) t))) exp(i p1^2 / (2 sqrt(k) tan(sqrt(k) t))),
/// principal branches.
cplx ho_propagator(const HOParams& params);

/// |i dG/dt - p^2/2 G + k/2 d^2G/dp^2| at (t, p1) by second-order central
/// differences of ho_propagator.
double schrodinger_residual(const HOParams& params, double h_t, double h_p);

/// Weak pairing of ho_propagator over p1 against `test`, for small k (sqrt(k) t < 0.1).
/// The window is +-window_scale (k t^2)^(1/4); steps = 0 picks a step that
/// resolves the kernel's fastest oscillation.
cplx ho_free_limit(double k, double t, const TestFunctionSpec& test, double window_scale = 20.0,
                   int steps = 0);

}  // namespace hampath
