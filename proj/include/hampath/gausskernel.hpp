#pragma once

#include <memory>
#include <vector>

#include "hampath/operators.hpp"

namespace hampath {

/// Donsker delta factor delta(<eta, .> - y).
struct Pin {
    PhaseFunction eta;
    double y = 0.0;
};

/// Data of the generalized Gauss kernel
///   Nexp(-1/2 <., K .>) exp(-1/2 <., L .>) exp(i <g, .> + c) prod_j delta(<eta_j, .> - y_j).
///
/// K and L are shared and immutable, so copies that only change pin values are cheap.
struct GaussKernelSpec {
    std::shared_ptr<const BlockOperator> K;
    std::shared_ptr<const BlockOperator> L;
    PhaseFunction drift;
    cplx phase{0.0, 0.0};
    std::vector<Pin> pins;

    /// Checks grids agree and the pins form a nonzero orthogonal system.
    void validate() const;
    const TimeGrid& grid() const noexcept { return K->grid; }
};

/// T-transform at one test function, with its factors.
///   value = det_factor * quad_factor * pin_factor * exp(phase)
struct TTransformValue {
    cplx value;
    cplx det_factor;
    cplx quad_factor;
    cplx pin_factor;
    Eigen::MatrixXcd pin_matrix;
};

/// M_ij = (eta_i, N^-1 eta_j). Throws PinDegenerate unless Re M is positive
/// definite, or Re M = 0 with Im M nonsingular.
Eigen::MatrixXcd pin_matrix(const GaussKernelSpec& spec, const BlockOperator& ninv);

/// Throws PinDegenerate if M fails the admissibility condition above.
void check_pin_admissible(const Eigen::MatrixXcd& m);

/// (2 pi)^(-J/2) det(M)^(-1/2), the square root taken pivot by pivot along an
/// unpivoted LDL^T factorization so each factor is a principal root.
cplx pin_normalization(const Eigen::MatrixXcd& m);

/// Evaluates
///   det_factor (2 pi)^(-J/2) det(M)^(-1/2) exp(-1/2 (F, N^-1 F)) exp(+1/2 u^T M^-1 u) exp(c)
/// with F = f + g and u_j = i y_j + (eta_j, N^-1 F). `det_factor` is
/// det(Id + L (Id + K)^-1)^(-1/2), supplied by the caller.
TTransformValue t_transform(const GaussKernelSpec& spec, const BlockOperator& ninv,
                            cplx det_factor, const PhaseFunction& f);

/// Same, with a pin matrix computed elsewhere (e.g. from a spectral series).
TTransformValue t_transform(const GaussKernelSpec& spec, const BlockOperator& ninv,
                            cplx det_factor, const Eigen::MatrixXcd& pin_matrix,
                            const PhaseFunction& f);

/// Closed-form T-transform of Donsker's delta delta(<eta, .> - x) at f.
cplx donsker_t_transform(const PhaseFunction& eta, double x, const PhaseFunction& f);

/// Quadratic fit of log T(f + lambda g2) over real lambda in [-span, span].
struct RayFit {
    cplx c0, c1, c2;
    double max_residual;
    /// max(Re c2, 0) / ||g2||^2: the growth constant D in |T(lambda g2)| <= C exp(D lambda^2 ||g2||^2).
    double growth;
};

/// Throws BranchCrossing if the sampled phase of T jumps by more than pi/2
/// between adjacent samples, which makes the continuous logarithm ambiguous.
RayFit ray_restriction(const GaussKernelSpec& spec, const BlockOperator& ninv, cplx det_factor,
                       const PhaseFunction& f, const PhaseFunction& g2, int samples,
                       double span = 1.0);

/// Variant for a caller-supplied pin matrix.
RayFit ray_restriction(const GaussKernelSpec& spec, const BlockOperator& ninv, cplx det_factor,
                       const Eigen::MatrixXcd& pin_matrix, const PhaseFunction& f,
                       const PhaseFunction& g2, int samples, double span = 1.0);

}  // namespace hampath
