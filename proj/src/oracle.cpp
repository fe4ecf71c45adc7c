#include "hampath/oracle.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "hampath/errors.hpp"

namespace hampath::oracle {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// Panels sized so each holds at most a few oscillations of the highest mode.
int panel_count(int dim) { return std::max(16, dim / 2); }

template <typename F>
auto composite_gauss(F&& f, double t, int panels) {
    using boost::math::quadrature::gauss;
    const double width = t / panels;
    decltype(f(0.0)) sum{};
    for (int p = 0; p < panels; ++p) {
        sum += gauss<double, 20>::integrate(f, p * width, (p + 1) * width);
    }
    return sum;
}

}  // namespace

FiniteModel FiniteModel::empty(double t, int dim) {
    if (!(t > 0.0)) throw InvalidParameter("finite model needs t > 0");
    if (dim < 1) throw InvalidParameter("finite model needs dim >= 1");
    FiniteModel m;
    m.t = t;
    m.dim = dim;
    m.kmat = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
    m.lmat = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
    m.gvec = Eigen::VectorXcd::Zero(2 * dim);
    return m;
}

void FiniteModel::validate() const {
    const int size = 2 * dim;
    if (kmat.rows() != size || kmat.cols() != size || lmat.rows() != size ||
        lmat.cols() != size || gvec.size() != size) {
        throw InvalidParameter("finite model matrices must be 2dim x 2dim");
    }
    for (const auto* m : {&kmat, &lmat}) {
        const double scale = std::max(m->norm(), 1.0);
        if ((*m - m->transpose()).norm() > 1e-12 * scale) {
            throw InvalidParameter("finite model K and L must be complex symmetric");
        }
    }
    for (const auto& pin : pins) {
        if (pin.eta.size() != size) throw InvalidParameter("pin vector has the wrong size");
    }
}

double cosine_mode(double t, int n, double s) {
    return std::sqrt(2.0 / t) * std::cos((n - 0.5) * kPi * s / t);
}

double FiniteModel::basis_value(int index, double s) const {
    return cosine_mode(t, index % dim + 1, s);
}

Eigen::VectorXd indicator_coefficients(double t, int dim) {
    Eigen::VectorXd c(dim);
    for (int n = 1; n <= dim; ++n) {
        c[n - 1] = std::sqrt(2.0 * t) * ((n % 2 == 1) ? 1.0 : -1.0) / ((n - 0.5) * kPi);
    }
    return c;
}

Eigen::VectorXd ramp_coefficients(double t, int dim) {
    // int_0^t cos(theta s) (s - t) ds = (cos(theta t) - 1) / theta^2 = -1 / theta^2
    Eigen::VectorXd c(dim);
    for (int n = 1; n <= dim; ++n) {
        const double theta = (n - 0.5) * kPi / t;
        c[n - 1] = -std::sqrt(2.0 / t) / (theta * theta);
    }
    return c;
}

Eigen::VectorXcd coefficients(double t, int dim, const std::function<cplx(double)>& h) {
    Eigen::VectorXcd c(dim);
    const int panels = panel_count(dim);
    for (int n = 1; n <= dim; ++n) {
        c[n - 1] = composite_gauss([&](double s) { return cosine_mode(t, n, s) * h(s); }, t, panels);
    }
    return c;
}

Eigen::MatrixXd cosine_gram(double t, int dim) {
    Eigen::MatrixXd g(dim, dim);
    const int panels = panel_count(dim);
    for (int a = 1; a <= dim; ++a) {
        for (int b = a; b <= dim; ++b) {
            g(a - 1, b - 1) = g(b - 1, a - 1) = composite_gauss(
                [&](double s) { return cosine_mode(t, a, s) * cosine_mode(t, b, s); }, t, panels);
        }
    }
    return g;
}

namespace {

// K_mom in the cosine basis: A is diagonal with eigenvalues (t / ((n - 1/2) pi))^2.
Eigen::MatrixXcd free_kinetic(double t, int dim) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
    for (int n = 1; n <= dim; ++n) {
        const double lambda = std::pow(t / ((n - 0.5) * kPi), 2);
        const int x = n - 1;
        const int p = dim + n - 1;
        k(x, x) = -1.0;
        k(x, p) = kI;
        k(p, x) = kI;
        k(p, p) = -1.0 + kI * lambda / (t * t);
    }
    return k;
}

Eigen::VectorXd momentum_pin(double t, int dim) {
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(2 * dim);
    eta.tail(dim) = indicator_coefficients(t, dim) / t;
    return eta;
}

}  // namespace

FiniteModel free_model(double t, int dim, double p0, double p1, double eps) {
    if (!(eps > 0.0)) throw InvalidParameter("free model needs eps > 0");
    FiniteModel m = FiniteModel::empty(t, dim);
    m.kmat = free_kinetic(t, dim);
    m.gvec.tail(dim) = (p0 / t) * ramp_coefficients(t, dim).cast<cplx>();
    m.phase = -kI * p0 * p0 * t / 2.0;
    m.pins.push_back({momentum_pin(t, dim), p1 - p0});
    m.inverse_shift_pp = eps;
    return m;
}

FiniteModel ho_model(double t, int dim, double k, double p1) {
    if (!(k >= 0.0)) throw InvalidParameter("ho model needs k >= 0");
    FiniteModel m = FiniteModel::empty(t, dim);
    m.kmat = free_kinetic(t, dim);
    for (int n = 0; n < dim; ++n) m.lmat(n, n) = kI * k * t * t;
    m.pins.push_back({momentum_pin(t, dim), p1});
    return m;
}

Eigen::VectorXcd project(const FiniteModel& model, const std::function<cplx(double)>& fx,
                         const std::function<cplx(double)>& fp) {
    Eigen::VectorXcd v(2 * model.dim);
    v.head(model.dim) = coefficients(model.t, model.dim, fx);
    v.tail(model.dim) = coefficients(model.t, model.dim, fp);
    return v;
}

cplx finite_dim_t_transform(const FiniteModel& model, const Eigen::VectorXcd& fvec) {
    model.validate();
    const int size = 2 * model.dim;
    if (fvec.size() != size) throw InvalidParameter("test vector has the wrong size");

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(size, size);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> one_plus_k(id + model.kmat);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> total(id + model.kmat + model.lmat);
    if (std::abs(one_plus_k.determinant()) < 1e-300 || std::abs(total.determinant()) < 1e-300) {
        throw DegenerateDeterminant("Id + K or Id + K + L is singular in the finite model");
    }
    Eigen::MatrixXcd ninv = total.inverse();
    ninv.bottomRightCorner(model.dim, model.dim).diagonal().array() += model.inverse_shift_pp;

    const Eigen::MatrixXcd shifted_l = id + model.lmat * one_plus_k.inverse();
    const cplx det = shifted_l.partialPivLu().determinant();
    if (std::abs(det) == 0.0) throw DegenerateDeterminant("det(Id + L (Id + K)^-1) vanishes");
    const cplx det_factor = std::sqrt(1.0 / det);

    const Eigen::VectorXcd big_f = fvec + model.gvec;
    const Eigen::VectorXcd image = ninv * big_f;
    cplx exponent = -0.5 * (big_f.array() * image.array()).sum();
    cplx prefactor = det_factor;

    // Integrate the Donsker parameters one at a time:
    //   (1/2pi)^J int exp(-1/2 l^T Q l - l^T b) dl,  Q = H^T N^-1 H,  b = H^T N^-1 F + i y.
    const auto j = static_cast<Eigen::Index>(model.pins.size());
    if (j > 0) {
        Eigen::MatrixXcd h(size, j);
        Eigen::VectorXcd b(j);
        for (Eigen::Index c = 0; c < j; ++c) {
            const FinitePin& pin = model.pins[static_cast<std::size_t>(c)];
            h.col(c) = pin.eta.cast<cplx>();
            b[c] = (h.col(c).array() * image.array()).sum() + kI * pin.y;
        }
        Eigen::MatrixXcd q = h.transpose() * ninv * h;
        while (q.rows() > 0) {
            const cplx q0 = q(0, 0);
            if (std::abs(q0) == 0.0 || q0.real() < -1e-12 * std::abs(q0)) {
                throw PinDegenerate("Donsker parameter integral does not converge");
            }
            const cplx b0 = b[0];
            prefactor /= std::sqrt(2.0 * kPi * q0);
            exponent += 0.5 * b0 * b0 / q0;
            const Eigen::Index rest = q.rows() - 1;
            const Eigen::VectorXcd coupling = q.col(0).tail(rest);
            const Eigen::MatrixXcd next =
                q.bottomRightCorner(rest, rest) - coupling * coupling.transpose() / q0;
            const Eigen::VectorXcd next_b = b.tail(rest) - (b0 / q0) * coupling;
            q = next;
            b = next_b;
        }
    }
    return prefactor * std::exp(exponent + model.phase);
}

cplx richardson_limit(cplx at_d, cplx at_2d, cplx at_4d) {
    return (at_d - 6.0 * at_2d + 8.0 * at_4d) / 3.0;
}

cplx contour_pin_integral(const std::function<cplx(cplx)>& tfun, double y, double alpha,
                          double radius, int steps) {
    if (!(alpha >= 0.0 && alpha <= kPi / 4.0)) {
        throw InvalidParameter("contour angle alpha must lie in [0, pi/4]");
    }
    if (!(radius > 0.0)) throw InvalidParameter("contour radius must be > 0");
    if (steps < 2) throw InvalidParameter("contour integral needs at least 2 steps");

    const cplx rotation = std::exp(-kI * alpha);
    auto integrand = [&](double s) {
        const cplx lambda = rotation * s;
        return std::exp(-kI * lambda * y) * tfun(lambda) * rotation;
    };
    const double ds = 2.0 * radius / (steps - 1);
    const cplx first = integrand(-radius);
    const cplx last = integrand(radius);
    cplx sum = 0.5 * (first + last);
    for (int i = 1; i < steps - 1; ++i) sum += integrand(-radius + i * ds);
    sum *= ds;

    const double tail = (std::abs(first) + std::abs(last)) * radius;
    if (!std::isfinite(std::abs(sum)) || tail > 1e-3 * std::abs(sum)) {
        throw ContourDivergent("integrand does not decay along the rotated contour");
    }
    return sum / (2.0 * kPi);
}

double gaussian_contour_radius(cplx m, cplx u, double alpha) {
    const double decay = (m * std::exp(-2.0 * kI * alpha)).real();
    if (!(decay > 0.0)) {
        throw ContourDivergent("Gaussian does not decay along the contour at this angle");
    }
    // Envelope exp(-decay s^2 / 2) reaches exp(-60) this far beyond the saddle u / M.
    return std::abs(u / m) + std::sqrt(2.0 * 60.0 / decay);
}

cplx weak_delta_pairing(const std::function<cplx(double)>& amplitude,
                        const std::function<cplx(double)>& test, double p_lo, double p_hi,
                        int steps) {
    if (steps < 2) throw InvalidParameter("weak_delta_pairing needs steps >= 2");
    if (!(p_hi > p_lo)) throw InvalidParameter("weak_delta_pairing needs p_hi > p_lo");
    const double dp = (p_hi - p_lo) / (steps - 1);
    cplx sum = 0.5 * (amplitude(p_lo) * test(p_lo) + amplitude(p_hi) * test(p_hi));
    for (int i = 1; i < steps - 1; ++i) {
        const double p = p_lo + i * dp;
        sum += amplitude(p) * test(p);
    }
    return sum * dp;
}

}  // namespace hampath::oracle
