#pragma once

#include <functional>
#include <vector>

#include "hampath/timegrid.hpp"

namespace hampath::oracle {

/// Real pin direction in the model basis with its pinned value.
struct FinitePin {
    Eigen::VectorXd eta;
    double y = 0.0;
};

/// A Gauss kernel written in the analytic cosine basis
///   e_n(s) = sqrt(2/t) cos((n - 1/2) pi s / t),  n = 1..dim,
/// placed in both slots: coordinates [0, dim) are the x-slot, [dim, 2 dim)
/// the p-slot. Nothing here touches a TimeGrid.
struct FiniteModel {
    double t = 1.0;
    int dim = 1;
    Eigen::MatrixXcd kmat;  // 2dim x 2dim, complex symmetric
    Eigen::MatrixXcd lmat;
    Eigen::VectorXcd gvec;
    cplx phase{0.0, 0.0};
    std::vector<FinitePin> pins;
    /// Added to the pp block of N^-1 after inversion (free-particle regularization).
    double inverse_shift_pp = 0.0;

    static FiniteModel empty(double t, int dim);

    void validate() const;
    /// Value of basis function `index` (0-based over both slots) at s.
    double basis_value(int index, double s) const;
};

double cosine_mode(double t, int n, double s);  // n is 1-based

/// <e_n, 1_[0,t)> for n = 1..dim.
Eigen::VectorXd indicator_coefficients(double t, int dim);
/// <e_n, (s - t) 1_[0,t)> for n = 1..dim.
Eigen::VectorXd ramp_coefficients(double t, int dim);
/// <e_n, h> by composite Gauss-Legendre quadrature on [0, t).
Eigen::VectorXcd coefficients(double t, int dim, const std::function<cplx(double)>& h);

/// Gram matrix of the first `dim` cosine modes by Gauss-Legendre quadrature.
Eigen::MatrixXd cosine_gram(double t, int dim);

/// Free particle with the eps-regularized inverse: drift (0, p0/t (s-t)),
/// pin (0, 1/t) at p1 - p0, phase -i p0^2 t / 2.
FiniteModel free_model(double t, int dim, double p0, double p1, double eps);

/// Harmonic oscillator V = k x^2 / 2 with p0 = 0, pin (0, 1/t) at p1.
FiniteModel ho_model(double t, int dim, double k, double p1);

/// Coordinates of (f_x, f_p) in the model basis.
Eigen::VectorXcd project(const FiniteModel& model, const std::function<cplx(double)>& fx,
                         const std::function<cplx(double)>& fp);

/// Normalized T-transform by explicit 2dim x 2dim linear algebra and
/// pin-by-pin Gaussian integration over the Donsker parameters.
cplx finite_dim_t_transform(const FiniteModel& model, const Eigen::VectorXcd& fvec);

/// Limit of a sequence with error a/d + b/d^2 from values at d, 2d, 4d.
cplx richardson_limit(cplx at_d, cplx at_2d, cplx at_4d);

/// (1 / 2 pi) int exp(-i lambda y) tfun(lambda) d lambda along lambda = e^{-i alpha} s,
/// |s| <= radius, trapezoid with `steps` points.
cplx contour_pin_integral(const std::function<cplx(cplx)>& tfun, double y, double alpha,
                          double radius, int steps = 4096);

/// Radius beyond which |exp(-lambda^2 M / 2 - lambda u)| on the rotated ray is
/// negligible (well under 1e-8 of its peak); ContourDivergent if it does not decay.
double gaussian_contour_radius(cplx m, cplx u, double alpha);

/// Trapezoid quadrature of int amplitude(p) test(p) dp on [p_lo, p_hi].
cplx weak_delta_pairing(const std::function<cplx(double)>& amplitude,
                        const std::function<cplx(double)>& test, double p_lo, double p_hi,
                        int steps);

}  // namespace hampath::oracle
