#include "hampath/propagators.hpp"

#include <cmath>
#include <numbers>

#include "hampath/errors.hpp"
#include "hampath/oracle.hpp"

namespace hampath {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

DiscreteFunction ramp(const TimeGrid& grid) {
    Eigen::VectorXcd v(grid.n());
    for (int i = 0; i < grid.n(); ++i) v[i] = grid.node(i) - grid.t_end();
    return DiscreteFunction(grid, std::move(v));
}

// eta = (0, 1_[0,t) / t)
PhaseFunction momentum_pin(const TimeGrid& grid) {
    return PhaseFunction::momentum((1.0 / grid.t_end()) * indicator(grid, 0.0, grid.t_end()));
}

void require_matching_time(const TimeGrid& grid, double t) {
    if (std::abs(grid.t_end() - t) > 1e-12 * t) {
        throw GridMismatch("grid covers [0, " + std::to_string(grid.t_end()) +
                           ") but the propagator time is " + std::to_string(t));
    }
}

}  // namespace

void FreeParams::validate() const {
    if (!(t > 0.0)) throw InvalidParameter("free particle needs t > 0");
    if (!(eps > 0.0)) throw InvalidParameter("free particle needs eps > 0");
}

void HOParams::validate() const {
    if (!(k > 0.0)) throw InvalidParameter("oscillator needs k > 0");
    if (!(t > 0.0)) throw InvalidParameter("oscillator needs t > 0");
    require_regular_time(k, t);
}

bool HOParams::beyond_first_caustic() const { return std::sqrt(k) * t > kPi / 2.0; }

// ---------------------------------------------------------------------------

FreeParticle::FreeParticle(double p0, double t, double eps, const TimeGrid& grid)
    : p0_(p0),
      spec_{std::make_shared<const BlockOperator>(assemble_K_free(grid)),
            std::make_shared<const BlockOperator>(BlockOperator::zero(grid)),
            PhaseFunction::momentum((p0 / t) * ramp(grid)), -kI * p0 * p0 * t / 2.0,
            {Pin{momentum_pin(grid), 0.0}}},
      inverse_(closed_inverse_free(grid)) {
    FreeParams{p0, p0, t, eps}.validate();
    require_matching_time(grid, t);
    inverse_.pp.diagonal().array() += eps;
}

TTransformValue FreeParticle::t_transform(double p1, const PhaseFunction& f) const {
    GaussKernelSpec spec = spec_;
    spec.pins.front().y = p1 - p0_;
    // L = 0, so det(Id + L (Id + K)^-1) = 1.
    return hampath::t_transform(spec, inverse_, 1.0, f);
}

cplx FreeParticle::expectation(double p1) const {
    return t_transform(p1, PhaseFunction(spec_.grid())).value;
}

TTransformValue free_t_transform_eps(const FreeParams& params, const PhaseFunction& f) {
    params.validate();
    require_matching_time(f.grid(), params.t);
    return FreeParticle(params.p0, params.t, params.eps, f.grid()).t_transform(params.p1, f);
}

cplx free_expectation_eps(const FreeParams& params, int grid_n) {
    params.validate();
    return FreeParticle(params.p0, params.t, params.eps, build_grid(params.t, grid_n))
        .expectation(params.p1);
}

cplx free_expectation_reference(const FreeParams& params) {
    params.validate();
    const double t = params.t, eps = params.eps, p0 = params.p0, dp = params.p1 - params.p0;
    const double ramp_integral = -t * t / 2.0;      // int_0^t (s - t) ds
    const double ramp_sq_integral = t * t * t / 3.0;  // int_0^t (s - t)^2 ds
    return std::sqrt(t / (2.0 * kPi * eps)) * std::exp(-t * dp * dp / (2.0 * eps)) *
           std::exp(-kI * p0 * p0 * t / 2.0) *
           std::exp(-eps / (2.0 * t * t) * p0 * p0 * ramp_sq_integral) *
           std::exp(p0 * p0 * eps / (2.0 * t * t * t) * ramp_integral * ramp_integral) *
           std::exp(kI * (p0 / t) * dp * ramp_integral);
}

// ---------------------------------------------------------------------------

HarmonicOscillator::HarmonicOscillator(double k, double t, const TimeGrid& grid,
                                       int spectral_terms)
    : spec_{std::make_shared<const BlockOperator>(assemble_K_free(grid)),
            std::make_shared<const BlockOperator>(assemble_L_ho(grid, k)), PhaseFunction(grid), 0.0,
            {Pin{momentum_pin(grid), 0.0}}},
      inverse_(closed_inverse_ho(grid, k)),
      det_factor_(std::sqrt(cplx(fredholm_det(k, t, spectral_terms).closed_form))),
      pin_matrix_(Eigen::MatrixXcd::Constant(1, 1, ho_pin_spectral_sum(k, t, spectral_terms))) {
    HOParams{k, t, 0.0}.validate();
    require_matching_time(grid, t);
}

TTransformValue HarmonicOscillator::t_transform(double p1, const PhaseFunction& f) const {
    GaussKernelSpec spec = spec_;
    spec.pins.front().y = p1;
    return hampath::t_transform(spec, inverse_, det_factor_, pin_matrix_, f);
}

cplx HarmonicOscillator::expectation(double p1) const {
    return t_transform(p1, PhaseFunction(spec_.grid())).value;
}

TTransformValue ho_t_transform(const HOParams& params, const PhaseFunction& f) {
    params.validate();
    require_matching_time(f.grid(), params.t);
    return HarmonicOscillator(params.k, params.t, f.grid()).t_transform(params.p1, f);
}

cplx ho_propagator(const HOParams& params) {
    params.validate();
    const double w = std::sqrt(params.k);
    const double wt = w * params.t;
    const cplx prefactor = std::sqrt(1.0 / (2.0 * kPi * kI * w * std::sin(wt)));
    return prefactor * std::exp(kI * params.p1 * params.p1 / (2.0 * w * std::tan(wt)));
}

double schrodinger_residual(const HOParams& params, double h_t, double h_p) {
    params.validate();
    if (!(h_t > 0.0) || !(h_p > 0.0)) throw InvalidParameter("stencil steps must be > 0");
    if (!(params.t - h_t > 0.0)) throw InvalidParameter("time stencil reaches t <= 0");
    const double k = params.k, t = params.t, p = params.p1;
    auto g = [k](double time, double mom) { return ho_propagator(HOParams{k, time, mom}); };

    const cplx center = g(t, p);
    const cplx dt = (g(t + h_t, p) - g(t - h_t, p)) / (2.0 * h_t);
    const cplx dpp = (g(t, p + h_p) - 2.0 * center + g(t, p - h_p)) / (h_p * h_p);
    return std::abs(kI * dt - 0.5 * p * p * center + 0.5 * k * dpp);
}

cplx ho_free_limit(double k, double t, const TestFunctionSpec& test, double window_scale,
                   int steps) {
    HOParams{k, t, 0.0}.validate();
    test.validate();
    if (!(std::sqrt(k) * t < 0.1)) {
        throw InvalidParameter("ho_free_limit needs a small oscillator, sqrt(k) t < 0.1");
    }
    if (!(window_scale > 0.0)) throw InvalidParameter("window scale must be > 0");
    const double w = std::sqrt(k);
    const double window = window_scale * std::pow(k * t * t, 0.25);
    if (steps <= 0) {
        // phase p^2 / (2 w tan(w t)) turns at most 0.2 rad per step at the edge
        const double max_rate = window / (w * std::tan(w * t));
        const double count = std::ceil(2.0 * window * max_rate / 0.2) + 1.0;
        if (count > 1e8) throw InvalidParameter("ho_free_limit: kernel too oscillatory to resolve");
        steps = std::max(3, static_cast<int>(count));
    }
    return oracle::weak_delta_pairing([&](double p) { return ho_propagator(HOParams{k, t, p}); },
                                      [&](double p) { return test(p); }, -window, window, steps);
}

}  // namespace hampath
