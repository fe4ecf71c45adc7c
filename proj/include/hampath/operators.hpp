#pragma once

#include <vector>

#include "hampath/timegrid.hpp"

namespace hampath {

/// 2x2 block of n x n complex matrices acting on PhaseFunction (f_x, f_p).
///
/// Every operator here is supported on [0, t); the identity acting on the
/// complement of [0, t) is never represented because all functions live on
/// the grid.
struct BlockOperator {
    TimeGrid grid;
    Eigen::MatrixXcd xx, xp, px, pp;
    bool symmetric = false;

    static BlockOperator zero(const TimeGrid& grid);
    static BlockOperator identity(const TimeGrid& grid);
    static BlockOperator from_dense(const TimeGrid& grid, const Eigen::MatrixXcd& m,
                                    bool symmetric = false);

    Eigen::MatrixXcd to_dense() const;

    /// Throws InvalidParameter if the block dimensions disagree with the grid,
    /// or if `symmetric` is set but xp != px^T or xx, pp are not symmetric
    /// (relative tolerance 1e-12).
    void validate() const;

    BlockOperator& operator+=(const BlockOperator& other);
    friend BlockOperator operator+(BlockOperator a, const BlockOperator& b) { return a += b; }
};

PhaseFunction apply(const BlockOperator& op, const PhaseFunction& f);

/// (f, Op g) under the bilinear pairing.
cplx bilinear(const PhaseFunction& f, const BlockOperator& op, const PhaseFunction& g);

// ---------------------------------------------------------------------------
// The Volterra-type operator A f(s) = int_s^t int_0^tau f(r) dr dtau on [0, t).
// Its kernel is t - max(s, r); the midpoint Nystrom discretization below is
// symmetric and positive definite.

DiscreteFunction apply_A(const TimeGrid& grid, const DiscreteFunction& f);

/// Nystrom matrix M with (A f)(s_i) ~ sum_j M_ij f_j.
Eigen::MatrixXd matrix_A(const TimeGrid& grid);

/// Leading eigenpairs of the discretized A.
struct SpectralData {
    TimeGrid grid;
    std::vector<double> eigenvalues;     // decreasing
    Eigen::MatrixXd eigenvectors;        // column m is e_m at the nodes, sum_i w_i e_m e_l = delta
    DiscreteFunction eigenfunction(int m) const;  // 0-based
};

/// Eigenfunctions carry the sign convention e_m(s_0) > 0. Full decompositions
/// are cached per grid.
SpectralData spectrum_A(const TimeGrid& grid, int count);

/// Analytic eigenvalue (t / ((m - 1/2) pi))^2 of A, m >= 1.
double exact_eigenvalue_A(double t, int m);

// ---------------------------------------------------------------------------
// Block operators of the free particle and the harmonic oscillator.

BlockOperator assemble_K_free(const TimeGrid& grid);
BlockOperator assemble_L_ho(const TimeGrid& grid, double k);

BlockOperator closed_inverse_free(const TimeGrid& grid);

/// (Id + K + L)^-1 for the oscillator, with (kA - 1)^-1 taken in A's spectral
/// basis. Throws SingularTime at caustics.
BlockOperator closed_inverse_ho(const TimeGrid& grid, double k);

/// Dense LU inverse, used as an independent check of the closed forms.
BlockOperator numeric_inverse(const BlockOperator& op);

// ---------------------------------------------------------------------------
// Fredholm determinant det(Id + L (Id + K)^-1) = cos(sqrt(k) t) and the
// oscillator pin matrix.

constexpr double kSingularTimeTolerance = 1e-8;

bool is_singular_time(double k, double t);
/// Throws SingularTime when |cos(sqrt(k) t)| <= 1e-8.
void require_regular_time(double k, double t);

/// Both routes to det(Id + L (Id + K)^-1)^-1.
struct FredholmDeterminant {
    double product;      // truncated product with analytic tail correction
    double closed_form;  // 1 / cos(sqrt(k) t)
    double discrepancy;  // |product - closed_form| / |closed_form|
};

FredholmDeterminant fredholm_det(double k, double t, int terms);

/// 1 / det(Id + L (Id + K)^-1) from the discretized block matrices.
cplx dense_fredholm_det(const TimeGrid& grid, double k);

/// (eta, N^-1 eta) for eta = (0, 1_[0,t) / t) as the spectral series
/// i k sum_n <e_n, 1>^2 / (1 - l_n) with analytic eigendata plus tail.
cplx ho_pin_spectral_sum(double k, double t, int terms);

/// Hurwitz zeta sum_{j >= 0} (x + j)^-s for integer s >= 2, x > 0.
double hurwitz_zeta(int s, double x);

}  // namespace hampath
