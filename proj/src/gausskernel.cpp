#include "hampath/gausskernel.hpp"

#include <cmath>
#include <numbers>

#include "hampath/errors.hpp"

namespace hampath {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

void GaussKernelSpec::validate() const {
    if (!K || !L) throw InvalidParameter("Gauss kernel needs both K and L operators");
    K->validate();
    L->validate();
    const TimeGrid& g = K->grid;
    if (!(L->grid == g) || !(drift.grid() == g)) throw GridMismatch();
    for (std::size_t i = 0; i < pins.size(); ++i) {
        if (!(pins[i].eta.grid() == g)) throw GridMismatch();
        if (!(norm_squared(pins[i].eta) > 0.0)) {
            throw InvalidParameter("pin direction eta must be nonzero");
        }
    }
    for (std::size_t i = 0; i < pins.size(); ++i) {
        for (std::size_t j = i + 1; j < pins.size(); ++j) {
            const double scale =
                std::sqrt(norm_squared(pins[i].eta) * norm_squared(pins[j].eta));
            if (std::abs(pair(pins[i].eta, pins[j].eta)) > 1e-10 * scale) {
                throw InvalidParameter("pin directions must be mutually orthogonal");
            }
        }
    }
}

Eigen::MatrixXcd pin_matrix(const GaussKernelSpec& spec, const BlockOperator& ninv) {
    spec.validate();
    if (!(ninv.grid == spec.grid())) throw GridMismatch();
    const auto j = static_cast<Eigen::Index>(spec.pins.size());
    Eigen::MatrixXcd m(j, j);
    for (Eigen::Index c = 0; c < j; ++c) {
        const PhaseFunction image = apply(ninv, spec.pins[static_cast<std::size_t>(c)].eta);
        for (Eigen::Index r = 0; r < j; ++r) {
            m(r, c) = pair(spec.pins[static_cast<std::size_t>(r)].eta, image);
        }
    }
    check_pin_admissible(m);
    return m;
}

void check_pin_admissible(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return;
    const double scale = m.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
        throw PinDegenerate("pin matrix (eta, N^-1 eta) vanishes; regularize N^-1");
    }
    const Eigen::MatrixXd re = 0.5 * (m.real() + m.real().transpose());
    const Eigen::MatrixXd im = 0.5 * (m.imag() + m.imag().transpose());
    if (re.cwiseAbs().maxCoeff() <= 1e-10 * scale) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(im);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv.minCoeff() <= 1e-12 * sv.maxCoeff()) {
            throw PinDegenerate("pin matrix is purely imaginary but Im M is singular");
        }
        return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(re, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-14 * scale)) {
        throw PinDegenerate("pin matrix has Re M neither positive definite nor zero");
    }
}

cplx pin_normalization(const Eigen::MatrixXcd& m) {
    const Eigen::Index j = m.rows();
    Eigen::MatrixXcd a = m;
    const double scale = j > 0 ? a.cwiseAbs().maxCoeff() : 1.0;
    cplx result = std::pow(kTwoPi, -0.5 * static_cast<double>(j));
    for (Eigen::Index p = 0; p < j; ++p) {
        const cplx pivot = a(p, p);
        if (std::abs(pivot) <= 1e-14 * scale) {
            throw PinDegenerate("pin matrix has a vanishing leading minor");
        }
        result /= std::sqrt(pivot);
        for (Eigen::Index r = p + 1; r < j; ++r) {
            const cplx factor = a(r, p) / pivot;
            a.row(r).tail(j - p - 1) -= factor * a.row(p).tail(j - p - 1);
        }
    }
    return result;
}

TTransformValue t_transform(const GaussKernelSpec& spec, const BlockOperator& ninv,
                            cplx det_factor, const PhaseFunction& f) {
    return t_transform(spec, ninv, det_factor, pin_matrix(spec, ninv), f);
}

TTransformValue t_transform(const GaussKernelSpec& spec, const BlockOperator& ninv,
                            cplx det_factor, const Eigen::MatrixXcd& pin_matrix,
                            const PhaseFunction& f) {
    spec.validate();
    if (!(ninv.grid == spec.grid()) || !(f.grid() == spec.grid())) throw GridMismatch();
    if (std::abs(det_factor) == 0.0 || !std::isfinite(std::abs(det_factor))) {
        throw DegenerateDeterminant("determinant factor must be finite and nonzero");
    }
    const auto j = static_cast<Eigen::Index>(spec.pins.size());
    if (pin_matrix.rows() != j || pin_matrix.cols() != j) {
        throw InvalidParameter("pin matrix size does not match the number of pins");
    }
    check_pin_admissible(pin_matrix);

    const PhaseFunction shifted = f + spec.drift;
    const PhaseFunction image = apply(ninv, shifted);
    const cplx quad_factor = std::exp(-0.5 * pair(shifted, image));

    cplx pin_factor = 1.0;
    if (j > 0) {
        Eigen::VectorXcd u(j);
        for (Eigen::Index r = 0; r < j; ++r) {
            const Pin& pin = spec.pins[static_cast<std::size_t>(r)];
            u[r] = kI * pin.y + pair(pin.eta, image);
        }
        const Eigen::VectorXcd solved = pin_matrix.partialPivLu().solve(u);
        // bilinear u^T M^-1 u, no conjugation
        const cplx exponent = 0.5 * (u.array() * solved.array()).sum();
        pin_factor = pin_normalization(pin_matrix) * std::exp(exponent);
    }

    TTransformValue out{det_factor * quad_factor * pin_factor * std::exp(spec.phase), det_factor,
                        quad_factor, pin_factor, pin_matrix};
    return out;
}

cplx donsker_t_transform(const PhaseFunction& eta, double x, const PhaseFunction& f) {
    if (!(eta.grid() == f.grid())) throw GridMismatch();
    const cplx eta_eta = pair(eta, eta);
    if (!(std::abs(eta_eta) > 1e-14 * norm_squared(eta)) || norm_squared(eta) == 0.0) {
        throw PinDegenerate("Donsker delta needs <eta, eta> != 0");
    }
    const cplx a = pair(eta, f);
    const cplx z = kI * a - x;
    return std::exp(-z * z / (2.0 * eta_eta) - 0.5 * pair(f, f)) / std::sqrt(kTwoPi * eta_eta);
}

RayFit ray_restriction(const GaussKernelSpec& spec, const BlockOperator& ninv, cplx det_factor,
                       const PhaseFunction& f, const PhaseFunction& g2, int samples,
                       double span) {
    return ray_restriction(spec, ninv, det_factor, pin_matrix(spec, ninv), f, g2, samples, span);
}

RayFit ray_restriction(const GaussKernelSpec& spec, const BlockOperator& ninv, cplx det_factor,
                       const Eigen::MatrixXcd& pin_matrix, const PhaseFunction& f,
                       const PhaseFunction& g2, int samples, double span) {
    if (samples < 4) throw InvalidParameter("ray_restriction needs at least 4 samples");
    if (!(span > 0.0)) throw InvalidParameter("ray_restriction needs span > 0");

    Eigen::MatrixXd design(samples, 3);
    Eigen::VectorXd log_abs(samples), phase(samples);
    double previous = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double lambda = -span + 2.0 * span * s / (samples - 1);
        const cplx value =
            t_transform(spec, ninv, det_factor, pin_matrix, f + cplx(lambda) * g2).value;
        design.row(s) << 1.0, lambda, lambda * lambda;
        log_abs[s] = std::log(std::abs(value));
        double arg = std::arg(value);
        if (s > 0) {
            double step = std::remainder(arg - previous, 2.0 * std::numbers::pi);
            if (std::abs(step) > 0.5 * std::numbers::pi) {
                throw BranchCrossing("phase of T jumps by more than pi/2 between ray samples; "
                                     "increase the sample count");
            }
            arg = previous + step;
        }
        phase[s] = arg;
        previous = arg;
    }

    const auto qr = design.colPivHouseholderQr();
    const Eigen::Vector3d re = qr.solve(log_abs);
    const Eigen::Vector3d im = qr.solve(phase);
    const Eigen::VectorXd res_re = design * re - log_abs;
    const Eigen::VectorXd res_im = design * im - phase;
    double residual = 0.0;
    for (int s = 0; s < samples; ++s) {
        residual = std::max(residual, std::hypot(res_re[s], res_im[s]));
    }
    const double g2_norm = norm_squared(g2);
    return RayFit{cplx(re[0], im[0]), cplx(re[1], im[1]), cplx(re[2], im[2]), residual,
                  g2_norm > 0.0 ? std::max(re[2], 0.0) / g2_norm : 0.0};
}

}  // namespace hampath
