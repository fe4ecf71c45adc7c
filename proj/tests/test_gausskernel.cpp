#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hampath/errors.hpp"
#include "hampath/gausskernel.hpp"
#include "support.hpp"

using namespace hampath;
using testing::rel;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

GaussKernelSpec plain_spec(const TimeGrid& g, std::vector<Pin> pins = {}) {
    return GaussKernelSpec{std::make_shared<const BlockOperator>(BlockOperator::zero(g)),
                           std::make_shared<const BlockOperator>(BlockOperator::zero(g)),
                           PhaseFunction(g), 0.0, std::move(pins)};
}

// Complex symmetric operator Id + i S with S real symmetric: Re part positive definite.
BlockOperator random_inverse(const TimeGrid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 0.3);
    const int n2 = 2 * g.n();
    Eigen::MatrixXd s(n2, n2);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = normal(rng) / std::sqrt(n2);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n2, n2) + kI * s.cast<cplx>();
    return BlockOperator::from_dense(g, m / g.step(), true);
}

// Two orthogonal pins built from the halves [0, t/2) and [t/2, t).
std::vector<Pin> two_pins(const TimeGrid& g, double y0, double y1) {
    const double t = g.t_end();
    return {Pin{PhaseFunction::momentum(indicator(g, 0.0, t / 2)), y0},
            Pin{PhaseFunction(indicator(g, 0.0, t / 2), indicator(g, t / 2, t)), y1}};
}

}  // namespace

TEST_CASE("T-transform of the plain white noise measure") {
    std::mt19937_64 rng(1);
    const TimeGrid g = build_grid(1.0, 16);
    const GaussKernelSpec spec = plain_spec(g);
    const BlockOperator id = BlockOperator::identity(g);
    for (int trial = 0; trial < 10; ++trial) {
        const PhaseFunction f = testing::random_phase_function(g, rng, 0.5);
        const TTransformValue v = t_transform(spec, id, 1.0, f);
        CHECK(rel(v.value, std::exp(-0.5 * pair(f, f))) < 1e-13);
    }
}

TEST_CASE("Donsker delta closed form") {
    const TimeGrid g = build_grid(1.0, 32);
    const PhaseFunction eta = PhaseFunction::momentum(indicator(g, 0.0, 1.0));
    const PhaseFunction zero(g);
    CHECK(std::abs(donsker_t_transform(eta, 0.0, zero) - 0.39894228040143268) < 1e-15);
    CHECK(std::abs(donsker_t_transform(eta, 1.0, zero) - 0.24197072451914335) < 1e-15);
    CHECK_THROWS_AS(donsker_t_transform(zero, 0.0, zero), PinDegenerate);

    // pin factor of the plain Gauss kernel at f = 0
    const TTransformValue v = t_transform(plain_spec(g, {Pin{eta, 0.0}}), BlockOperator::identity(g),
                                          1.0, zero);
    CHECK(std::abs(v.value - 0.39894228040143268) < 1e-15);
}

TEST_CASE("property: Donsker delta agrees with the one-pin Gauss kernel") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    const TimeGrid g = build_grid(1.0, 24);
    const BlockOperator id = BlockOperator::identity(g);
    for (int trial = 0; trial < 20; ++trial) {
        const PhaseFunction eta = testing::random_phase_function(g, rng);
        const PhaseFunction real_eta(DiscreteFunction(g, eta.fx().values().real().cast<cplx>()),
                                     DiscreteFunction(g, eta.fp().values().real().cast<cplx>()));
        const double x = normal(rng);
        const PhaseFunction f = testing::random_phase_function(g, rng, 0.3);
        const cplx closed = donsker_t_transform(real_eta, x, f);
        const cplx kernel = t_transform(plain_spec(g, {Pin{real_eta, x}}), id, 1.0, f).value;
        CHECK(rel(kernel, closed) < 1e-12);
    }
}

TEST_CASE("pin matrix admissibility") {
    const TimeGrid g = build_grid(1.0, 64);
    const PhaseFunction eta = PhaseFunction::momentum(indicator(g, 0.0, 1.0));
    GaussKernelSpec spec = plain_spec(g, {Pin{eta, 0.0}});

    // free particle: (eta, N^-1 eta) vanishes
    CHECK_THROWS_AS(pin_matrix(spec, closed_inverse_free(g)), PinDegenerate);

    // eps on the pp block makes it eps t for eta = (0, 1)
    BlockOperator shifted = closed_inverse_free(g);
    shifted.pp.diagonal().array() += 0.05;
    const Eigen::MatrixXcd m = pin_matrix(spec, shifted);
    CHECK(std::abs(m(0, 0) - cplx(0.05)) < 1e-14);

    Eigen::MatrixXcd bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(check_pin_admissible(bad), PinDegenerate);
    bad << kI, kI, kI, kI;
    CHECK_THROWS_AS(check_pin_admissible(bad), PinDegenerate);
    bad << kI, 0.0, 0.0, -2.0 * kI;
    CHECK_NOTHROW(check_pin_admissible(bad));
    CHECK_THROWS_AS(check_pin_admissible(Eigen::MatrixXcd::Zero(1, 1)), PinDegenerate);
}

TEST_CASE("oscillator pin matrix on the grid") {
    const TimeGrid g = build_grid(1.0, 400);
    const PhaseFunction eta = PhaseFunction::momentum(indicator(g, 0.0, 1.0));
    const Eigen::MatrixXcd m = pin_matrix(plain_spec(g, {Pin{eta, 0.0}}), closed_inverse_ho(g, 1.0));
    CHECK(rel(m(0, 0), kI * 1.5574077246549022) < 1e-3);
}

TEST_CASE("pin normalization takes principal roots pivot by pivot") {
    Eigen::MatrixXcd m(2, 2);
    m << kI, 0.0, 0.0, kI;
    CHECK(std::abs(pin_normalization(m) - (-kI) / (2.0 * kPi)) < 1e-15);
    m << -kI, 0.0, 0.0, -kI;
    CHECK(std::abs(pin_normalization(m) - kI / (2.0 * kPi)) < 1e-15);
    Eigen::MatrixXcd one(1, 1);
    one << 4.0;
    CHECK(std::abs(pin_normalization(one) - 0.5 / std::sqrt(2.0 * kPi)) < 1e-15);
    CHECK(pin_normalization(Eigen::MatrixXcd(0, 0)) == cplx(1.0));
}

TEST_CASE("spec validation") {
    const TimeGrid g = build_grid(1.0, 8);
    const PhaseFunction a = PhaseFunction::momentum(indicator(g, 0.0, 0.5));
    const PhaseFunction b = PhaseFunction::momentum(indicator(g, 0.25, 1.0));
    CHECK_THROWS_AS(plain_spec(g, {Pin{a, 0.0}, Pin{b, 0.0}}).validate(), InvalidParameter);
    CHECK_THROWS_AS(plain_spec(g, {Pin{PhaseFunction(g), 0.0}}).validate(), InvalidParameter);
    const TimeGrid other = build_grid(1.0, 9);
    CHECK_THROWS_AS(plain_spec(g, {Pin{PhaseFunction::momentum(indicator(other, 0.0, 1.0)), 0.0}})
                        .validate(),
                    GridMismatch);
    GaussKernelSpec missing = plain_spec(g);
    missing.L.reset();
    CHECK_THROWS_AS(missing.validate(), InvalidParameter);

    const GaussKernelSpec spec = plain_spec(g, {Pin{a, 0.0}});
    const BlockOperator id = BlockOperator::identity(g);
    CHECK_THROWS_AS(t_transform(spec, id, 0.0, PhaseFunction(g)), DegenerateDeterminant);
    CHECK_THROWS_AS(t_transform(spec, id, 1.0, PhaseFunction(other)), GridMismatch);
    CHECK_THROWS_AS(t_transform(spec, id, 1.0, Eigen::MatrixXcd::Identity(2, 2), PhaseFunction(g)),
                    InvalidParameter);
}

TEST_CASE("property: factorization, pin order and linear shift") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        const TimeGrid g = build_grid(0.5 + 0.1 * trial, 6 + 2 * (trial % 4));
        const BlockOperator ninv = random_inverse(g, rng);
        const double y0 = normal(rng), y1 = normal(rng);
        GaussKernelSpec spec = plain_spec(g, two_pins(g, y0, y1));
        spec.drift = testing::random_phase_function(g, rng, 0.3);
        spec.phase = testing::random_complex(rng, 0.2);
        const PhaseFunction f = testing::random_phase_function(g, rng, 0.3);
        const cplx det = testing::random_complex(rng) + 2.0;

        const TTransformValue v = t_transform(spec, ninv, det, f);
        CHECK(rel(v.value, v.det_factor * v.quad_factor * v.pin_factor * std::exp(spec.phase)) <
              1e-15);

        GaussKernelSpec swapped = spec;
        std::swap(swapped.pins[0], swapped.pins[1]);
        CHECK(rel(t_transform(swapped, ninv, det, f).value, v.value) < 1e-12);

        GaussKernelSpec bare = spec;
        bare.drift = PhaseFunction(g);
        bare.phase = 0.0;
        const cplx shifted = t_transform(bare, ninv, det, f + spec.drift).value * std::exp(spec.phase);
        CHECK(rel(shifted, v.value) < 1e-13);
    }
}

TEST_CASE("ray restriction of the plain kernel is exactly quadratic") {
    std::mt19937_64 rng(4);
    const TimeGrid g = build_grid(1.0, 16);
    const PhaseFunction f = testing::random_phase_function(g, rng, 0.2);
    const PhaseFunction g2 = testing::random_phase_function(g, rng, 0.2);
    const RayFit fit =
        ray_restriction(plain_spec(g), BlockOperator::identity(g), 1.0, f, g2, 21, 1.0);
    CHECK(fit.max_residual < 1e-10);
    CHECK(std::abs(fit.c2 + 0.5 * pair(g2, g2)) < 1e-10);
    CHECK(std::abs(fit.c1 + pair(f, g2)) < 1e-10);
    CHECK(std::isfinite(fit.growth));
    CHECK(fit.growth >= 0.0);

    CHECK_THROWS_AS(
        ray_restriction(plain_spec(g), BlockOperator::identity(g), 1.0, f, g2, 3, 1.0),
        InvalidParameter);
}

TEST_CASE("fast phase winding along a ray is reported") {
    const TimeGrid g = build_grid(1.0, 4);
    // log T = -1/2 (f + lambda g2)^2 with f = 5i, g2 = 1: phase winds 5 rad per unit lambda
    const PhaseFunction f = PhaseFunction::momentum(cplx(0.0, 5.0) * indicator(g, 0.0, 1.0));
    const PhaseFunction g2 = PhaseFunction::momentum(indicator(g, 0.0, 1.0));
    CHECK_THROWS_AS(ray_restriction(plain_spec(g), BlockOperator::identity(g), 1.0, f, g2, 4, 1.0),
                    BranchCrossing);
    CHECK_NOTHROW(ray_restriction(plain_spec(g), BlockOperator::identity(g), 1.0, f, g2, 41, 1.0));
}
