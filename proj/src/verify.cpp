#include "hampath/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hampath/errors.hpp"
#include "hampath/operators.hpp"
#include "hampath/oracle.hpp"
#include "hampath/propagators.hpp"

namespace hampath::verify {

namespace {

constexpr cplx kI{0.0, 1.0};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

Report determinant(double k, double t, int terms, int grid_n) {
    Report r{"det", {}, true};
    const FredholmDeterminant fd = fredholm_det(k, t, terms);
    const cplx dense = dense_fredholm_det(build_grid(t, grid_n), k);
    const double dense_rel = rel(dense, fd.closed_form);
    r.add("product", fd.product);
    r.add("dense_re", dense.real());
    r.add("dense_im", dense.imag());
    r.add("closed_form", fd.closed_form);
    r.add("product_rel", fd.discrepancy);
    r.add("dense_rel", dense_rel);
    r.add("max_rel", std::max(fd.discrepancy, dense_rel));
    r.check(fd.discrepancy <= 1e-6);
    r.check(dense_rel <= 1e-2);
    return r;
}

Report spectrum(double t, int grid_n) {
    if (grid_n < 20) throw InvalidParameter("spectrum suite needs grid-n >= 20");
    Report r{"spectrum", {}, true};
    constexpr int kCount = 5;
    const int sizes[3] = {grid_n / 4, grid_n / 2, grid_n};
    double err[3][kCount];
    for (int g = 0; g < 3; ++g) {
        const SpectralData sd = spectrum_A(build_grid(t, sizes[g]), kCount);
        for (int m = 0; m < kCount; ++m) {
            const double exact = exact_eigenvalue_A(t, m + 1);
            err[g][m] = std::abs(sd.eigenvalues[m] - exact) / exact;
        }
    }
    for (int m = 0; m < kCount; ++m) {
        const std::string tag = std::to_string(m + 1);
        const double order = std::log2(err[1][m] / err[2][m]);
        r.add("eigenvalue_" + tag, exact_eigenvalue_A(t, m + 1));
        r.add("rel_" + tag, err[2][m]);
        r.add("order_" + tag, order);
        r.check(err[2][m] <= 1e-3);
        r.check(order >= 1.9);
    }
    return r;
}

Report pde(double k, double h) {
    if (!(h > 0.0) || !(h < 0.1)) throw InvalidParameter("pde suite needs 0 < h < 0.1");
    Report r{"pde", {}, true};
    double max_res = 0.0, max_scaled = 0.0, min_order = 1e300, max_order = -1e300;
    for (int i = 1; i <= 5; ++i) {
        const double t = 0.2 + 1.2 * i / 6.0;
        for (int j = 1; j <= 5; ++j) {
            const double p = -2.0 + 4.0 * j / 6.0;
            const HOParams params{k, t, p};
            const double coarse = schrodinger_residual(params, h, h);
            const double fine = schrodinger_residual(params, h / 2.0, h / 2.0);
            const double order = std::log2(coarse / fine);
            max_res = std::max(max_res, coarse);
            max_scaled = std::max(max_scaled, coarse / std::abs(ho_propagator(params)));
            min_order = std::min(min_order, order);
            max_order = std::max(max_order, order);
        }
    }
    r.add("max_residual", max_res);
    r.add("max_residual_over_abs_g", max_scaled);
    r.add("min_order", min_order);
    r.add("max_order", max_order);
    r.check(max_res < 1e-5);
    r.check(std::abs(min_order - 2.0) <= 0.3 && std::abs(max_order - 2.0) <= 0.3);
    return r;
}

Report oracle_agreement(double k, double t, double p, int dim, double eps, double p0,
                        int grid_n) {
    if (dim < 8 || dim % 4 != 0) throw InvalidParameter("oracle suite needs dim >= 8, divisible by 4");
    Report r{"oracle", {}, true};

    const HOParams ho{k, t, p};
    ho.validate();
    cplx v[3];
    for (int g = 0; g < 3; ++g) {
        const int d = dim >> (2 - g);
        const oracle::FiniteModel model = oracle::ho_model(t, d, k, p);
        v[g] = oracle::finite_dim_t_transform(model, Eigen::VectorXcd::Zero(2 * d));
    }
    const cplx ho_limit = oracle::richardson_limit(v[0], v[1], v[2]);
    const cplx ho_exact = ho_propagator(ho);
    const double ho_rel = rel(ho_limit, ho_exact);
    r.add("ho_oracle_re", ho_limit.real());
    r.add("ho_oracle_im", ho_limit.imag());
    r.add("ho_closed_re", ho_exact.real());
    r.add("ho_closed_im", ho_exact.imag());
    r.add("ho_rel", ho_rel);
    r.check(ho_rel <= 1e-4);

    const FreeParams fp{p0, p, t, eps};
    for (int g = 0; g < 3; ++g) {
        const int d = dim >> (2 - g);
        const oracle::FiniteModel model = oracle::free_model(t, d, p0, p, eps);
        v[g] = oracle::finite_dim_t_transform(model, Eigen::VectorXcd::Zero(2 * d));
    }
    const cplx free_limit_value = oracle::richardson_limit(v[0], v[1], v[2]);
    const cplx free_grid = free_expectation_eps(fp, grid_n);
    const cplx free_ref = free_expectation_reference(fp);
    const double free_rel = rel(free_limit_value, free_ref);
    const double grid_rel = rel(free_grid, free_ref);
    r.add("free_oracle_re", free_limit_value.real());
    r.add("free_oracle_im", free_limit_value.imag());
    r.add("free_grid_re", free_grid.real());
    r.add("free_grid_im", free_grid.imag());
    r.add("free_reference_re", free_ref.real());
    r.add("free_reference_im", free_ref.imag());
    r.add("free_oracle_rel", free_rel);
    r.add("free_grid_rel", grid_rel);
    r.check(free_rel <= 1e-4);
    r.check(grid_rel <= 1e-4);
    return r;
}

double free_limit_error(double p0, double t, double eps, int grid_n) {
    const FreeParticle particle(p0, t, eps, build_grid(t, grid_n));
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    auto bump = [&](double q) { return cplx(norm * std::exp(-0.5 * (q - p0) * (q - p0))); };
    const cplx pairing = oracle::weak_delta_pairing(
        [&](double p1) { return particle.expectation(p1); }, bump, p0 - 10.0, p0 + 10.0, 40001);
    const cplx target = bump(p0) * std::exp(-kI * p0 * p0 * t / 2.0);
    return std::abs(pairing - target);
}

Report free_limit(double p0, double t, int grid_n) {
    Report r{"free-limit", {}, true};
    const double eps[3] = {0.1, 0.05, 0.025};
    double err[3];
    for (int i = 0; i < 3; ++i) {
        err[i] = free_limit_error(p0, t, eps[i], grid_n);
        r.add("error_eps_" + std::to_string(i + 1), err[i]);
    }
    for (int i = 0; i < 2; ++i) {
        const double ratio = err[i] / err[i + 1];
        r.add("ratio_" + std::to_string(i + 1), ratio);
        r.check(std::abs(ratio - 2.0) <= 0.3);
    }
    return r;
}

}  // namespace hampath::verify
