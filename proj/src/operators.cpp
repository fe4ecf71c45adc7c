#include "hampath/operators.hpp"

#include <cmath>
#include <deque>
#include <mutex>
#include <numbers>
#include <utility>

#include "hampath/errors.hpp"

namespace hampath {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
    if (!(a == b)) throw GridMismatch();
}

bool near_symmetric(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const double scale = std::max({a.norm(), b.norm(), 1e-300});
    return (a - b).norm() <= 1e-12 * scale;
}

// Full eigendecomposition of the Nystrom matrix, shared between callers.
struct FullSpectrum {
    Eigen::VectorXd eigenvalues;   // decreasing
    Eigen::MatrixXd orthonormal;   // Euclidean-orthonormal eigenvectors (columns)
};

std::shared_ptr<const FullSpectrum> full_spectrum(const TimeGrid& grid) {
    static std::mutex mutex;
    static std::deque<std::pair<std::pair<double, int>, std::shared_ptr<const FullSpectrum>>> cache;
    const auto key = std::make_pair(grid.t_end(), grid.n());
    {
        std::lock_guard lock(mutex);
        for (const auto& [k, v] : cache) {
            if (k == key) return v;
        }
    }

    // Uniform weights make the Nystrom matrix itself symmetric.
    const Eigen::MatrixXd m = matrix_A(grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error("eigensolver failed for the discretized operator A");
    }
    const int n = grid.n();
    auto full = std::make_shared<FullSpectrum>();
    full->eigenvalues = solver.eigenvalues().reverse();
    full->orthonormal = solver.eigenvectors().rowwise().reverse();
    for (int c = 0; c < n; ++c) {
        if (full->orthonormal(0, c) < 0.0) full->orthonormal.col(c) *= -1.0;
    }

    std::lock_guard lock(mutex);
    cache.emplace_back(key, full);
    if (cache.size() > 6) cache.pop_front();
    return full;
}

}  // namespace

// ---------------------------------------------------------------------------

BlockOperator BlockOperator::zero(const TimeGrid& grid) {
    const int n = grid.n();
    const Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(n, n);
    return BlockOperator{grid, z, z, z, z, true};
}

BlockOperator BlockOperator::identity(const TimeGrid& grid) {
    BlockOperator op = zero(grid);
    op.xx.setIdentity();
    op.pp.setIdentity();
    return op;
}

BlockOperator BlockOperator::from_dense(const TimeGrid& grid, const Eigen::MatrixXcd& m,
                                        bool symmetric) {
    const int n = grid.n();
    if (m.rows() != 2 * n || m.cols() != 2 * n) {
        throw InvalidParameter("dense block matrix must be 2n x 2n");
    }
    return BlockOperator{grid,
                         m.topLeftCorner(n, n),
                         m.topRightCorner(n, n),
                         m.bottomLeftCorner(n, n),
                         m.bottomRightCorner(n, n),
                         symmetric};
}

Eigen::MatrixXcd BlockOperator::to_dense() const {
    const int n = grid.n();
    Eigen::MatrixXcd m(2 * n, 2 * n);
    m << xx, xp, px, pp;
    return m;
}

void BlockOperator::validate() const {
    const int n = grid.n();
    for (const auto* b : {&xx, &xp, &px, &pp}) {
        if (b->rows() != n || b->cols() != n) {
            throw InvalidParameter("block operator blocks must be n x n with n = grid.n");
        }
    }
    if (symmetric) {
        if (!near_symmetric(xp, px.transpose()) || !near_symmetric(xx, xx.transpose()) ||
            !near_symmetric(pp, pp.transpose())) {
            throw InvalidParameter("block operator marked symmetric is not symmetric");
        }
    }
}

BlockOperator& BlockOperator::operator+=(const BlockOperator& other) {
    require_same_grid(grid, other.grid);
    xx += other.xx;
    xp += other.xp;
    px += other.px;
    pp += other.pp;
    symmetric = symmetric && other.symmetric;
    return *this;
}

PhaseFunction apply(const BlockOperator& op, const PhaseFunction& f) {
    require_same_grid(op.grid, f.grid());
    const auto& x = f.fx().values();
    const auto& p = f.fp().values();
    return PhaseFunction(DiscreteFunction(op.grid, op.xx * x + op.xp * p),
                         DiscreteFunction(op.grid, op.px * x + op.pp * p));
}

cplx bilinear(const PhaseFunction& f, const BlockOperator& op, const PhaseFunction& g) {
    return pair(f, apply(op, g));
}

// ---------------------------------------------------------------------------

DiscreteFunction apply_A(const TimeGrid& grid, const DiscreteFunction& f) {
    require_same_grid(grid, f.grid());
    const int n = grid.n();
    const double h = grid.step();
    const double t = grid.t_end();
    const auto& v = f.values();

    // (A f)_i = h [ (t - s_i) sum_{j<=i} f_j + sum_{j>i} (t - s_j) f_j ]
    Eigen::VectorXcd out(n);
    cplx suffix = 0.0;
    std::vector<cplx> tail(static_cast<std::size_t>(n));
    for (int j = n - 1; j >= 0; --j) {
        tail[static_cast<std::size_t>(j)] = suffix;
        suffix += (t - grid.node(j)) * v[j];
    }
    cplx prefix = 0.0;
    for (int i = 0; i < n; ++i) {
        prefix += v[i];
        out[i] = h * ((t - grid.node(i)) * prefix + tail[static_cast<std::size_t>(i)]);
    }
    return DiscreteFunction(grid, std::move(out));
}

Eigen::MatrixXd matrix_A(const TimeGrid& grid) {
    const int n = grid.n();
    const double h = grid.step();
    const double t = grid.t_end();
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            m(i, j) = h * (t - std::max(grid.node(i), grid.node(j)));
        }
    }
    return m;
}

DiscreteFunction SpectralData::eigenfunction(int m) const {
    return DiscreteFunction(grid, eigenvectors.col(m).cast<cplx>());
}

SpectralData spectrum_A(const TimeGrid& grid, int count) {
    if (count < 1 || count > grid.n()) {
        throw InvalidParameter("spectrum_A: requested " + std::to_string(count) +
                               " eigenpairs on a grid of " + std::to_string(grid.n()));
    }
    const auto full = full_spectrum(grid);
    SpectralData out{grid, {}, full->orthonormal.leftCols(count) / std::sqrt(grid.step())};
    out.eigenvalues.assign(full->eigenvalues.data(), full->eigenvalues.data() + count);
    return out;
}

double exact_eigenvalue_A(double t, int m) {
    const double d = (m - 0.5) * kPi;
    return (t / d) * (t / d);
}

// ---------------------------------------------------------------------------

BlockOperator assemble_K_free(const TimeGrid& grid) {
    const int n = grid.n();
    const double t = grid.t_end();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    BlockOperator k{grid, -id, kI * id, kI * id,
                    -id + (kI / (t * t)) * matrix_A(grid).cast<cplx>(), true};
    return k;
}

BlockOperator assemble_L_ho(const TimeGrid& grid, double k) {
    if (!(k >= 0.0)) throw InvalidParameter("oscillator strength k must be >= 0");
    BlockOperator l = BlockOperator::zero(grid);
    const double t = grid.t_end();
    l.xx.diagonal().setConstant(kI * k * t * t);
    return l;
}

BlockOperator closed_inverse_free(const TimeGrid& grid) {
    const int n = grid.n();
    const double t = grid.t_end();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    return BlockOperator{grid, (kI / (t * t)) * matrix_A(grid).cast<cplx>(), -kI * id, -kI * id,
                         Eigen::MatrixXcd::Zero(n, n), true};
}

BlockOperator closed_inverse_ho(const TimeGrid& grid, double k) {
    if (!(k >= 0.0)) throw InvalidParameter("oscillator strength k must be >= 0");
    const double t = grid.t_end();
    require_regular_time(k, t);

    const auto full = full_spectrum(grid);
    const Eigen::MatrixXd& q = full->orthonormal;
    const Eigen::VectorXd& lam = full->eigenvalues;
    const int n = grid.n();

    // R = (kA - 1)^-1 and A R in the eigenbasis of A.
    Eigen::VectorXd r(n), ar(n);
    for (int m = 0; m < n; ++m) {
        const double denom = k * lam[m] - 1.0;
        if (std::abs(denom) <= kSingularTimeTolerance) {
            throw SingularTime("discretized kA - 1 is singular at t = " + std::to_string(t));
        }
        r[m] = 1.0 / denom;
        ar[m] = lam[m] / denom;
    }
    const Eigen::MatrixXd res = q * r.asDiagonal() * q.transpose();
    const Eigen::MatrixXd a_res = q * ar.asDiagonal() * q.transpose();

    // N^-1 = (1/i) [[ A R / t^2, -R ], [ -R, k t^2 R ]]
    BlockOperator inv{grid,
                      (-kI / (t * t)) * a_res.cast<cplx>(),
                      kI * res.cast<cplx>(),
                      kI * res.cast<cplx>(),
                      (-kI * k * t * t) * res.cast<cplx>(),
                      true};
    return inv;
}

BlockOperator numeric_inverse(const BlockOperator& op) {
    op.validate();
    const Eigen::MatrixXcd dense = op.to_dense();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dense);
    const double det_abs = std::abs(lu.determinant());
    if (!(det_abs > 0.0) || !std::isfinite(det_abs)) {
        throw DegenerateDeterminant("block operator is not invertible");
    }
    return BlockOperator::from_dense(op.grid, lu.inverse(), op.symmetric);
}

// ---------------------------------------------------------------------------

bool is_singular_time(double k, double t) {
    return std::abs(std::cos(std::sqrt(k) * t)) <= kSingularTimeTolerance;
}

void require_regular_time(double k, double t) {
    if (is_singular_time(k, t)) {
        throw SingularTime("singular time: cos(sqrt(k) t) = 0 at k = " + std::to_string(k) +
                           ", t = " + std::to_string(t) +
                           " (t must avoid (2m-1) pi / (2 sqrt(k)))");
    }
}

double hurwitz_zeta(int s, double x) {
    if (s < 2 || !(x > 0.0)) throw InvalidParameter("hurwitz_zeta needs s >= 2 and x > 0");
    // Euler-Maclaurin after shifting the argument past 20.
    double direct = 0.0;
    double y = x;
    while (y < 20.0) {
        direct += std::pow(y, -s);
        y += 1.0;
    }
    constexpr double bernoulli[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
    double sum = std::pow(y, 1 - s) / (s - 1) + 0.5 * std::pow(y, -s);
    double rising = s;          // s (s+1) ... (s+2k-2)
    double factorial = 2.0;     // (2k)!
    for (int k = 1; k <= 5; ++k) {
        sum += bernoulli[k - 1] / factorial * rising * std::pow(y, -s - 2 * k + 1);
        rising *= (s + 2 * k - 1) * (s + 2 * k);
        factorial *= (2 * k + 1) * (2 * k + 2);
    }
    return direct + sum;
}

FredholmDeterminant fredholm_det(double k, double t, int terms) {
    if (!(k >= 0.0)) throw InvalidParameter("oscillator strength k must be >= 0");
    if (!(t > 0.0)) throw InvalidParameter("time t must be > 0");
    if (terms < 1) throw InvalidParameter("fredholm_det needs terms >= 1");
    require_regular_time(k, t);

    const double closed = 1.0 / std::cos(std::sqrt(k) * t);
    if (k == 0.0) return {1.0, 1.0, 0.0};

    // prod_n (1 - c/(n-1/2)^2), c = k t^2 / pi^2, accumulated as a log sum.
    const double c = k * t * t / (kPi * kPi);
    double log_abs = 0.0;
    double compensation = 0.0;
    int sign = 1;
    for (int n = terms; n >= 1; --n) {
        const double x = c / ((n - 0.5) * (n - 0.5));
        double term;
        if (x < 1.0) {
            term = std::log1p(-x);
        } else {
            term = std::log(x - 1.0);
            sign = -sign;
        }
        const double y = term - compensation;
        const double s = log_abs + y;
        compensation = (s - log_abs) - y;
        log_abs = s;
    }
    // log(1 - x) = -x - x^2/2 - ... summed over n > terms.
    if ((terms + 0.5) * (terms + 0.5) <= c) {
        throw InvalidParameter("fredholm_det: too few terms for the tail expansion");
    }
    const double tail = c * hurwitz_zeta(2, terms + 0.5) + 0.5 * c * c * hurwitz_zeta(4, terms + 0.5) +
                        c * c * c / 3.0 * hurwitz_zeta(6, terms + 0.5);
    const double det = sign * std::exp(log_abs - tail);
    const double product = 1.0 / det;
    return {product, closed, std::abs(product - closed) / std::abs(closed)};
}

namespace {

// log det by LU, summing logs of the pivots so large n neither overflows nor underflows
cplx log_determinant(const Eigen::MatrixXcd& m) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    cplx sum = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const cplx pivot = lu.matrixLU()(i, i);
        if (pivot == 0.0) throw DegenerateDeterminant("matrix in the dense determinant is singular");
        sum += std::log(pivot);
    }
    if (lu.permutationP().determinant() < 0) sum += cplx(0.0, kPi);
    return sum;
}

}  // namespace

cplx dense_fredholm_det(const TimeGrid& grid, double k) {
    // det(Id + L (Id + K)^-1) = det(Id + K + L) / det(Id + K)
    const Eigen::MatrixXcd one_plus_k =
        (BlockOperator::identity(grid) + assemble_K_free(grid)).to_dense();
    const Eigen::MatrixXcd l = assemble_L_ho(grid, k).to_dense();
    return std::exp(log_determinant(one_plus_k) - log_determinant(one_plus_k + l));
}

cplx ho_pin_spectral_sum(double k, double t, int terms) {
    if (!(k >= 0.0)) throw InvalidParameter("oscillator strength k must be >= 0");
    if (!(t > 0.0)) throw InvalidParameter("time t must be > 0");
    if (terms < 1) throw InvalidParameter("ho_pin_spectral_sum needs terms >= 1");
    require_regular_time(k, t);

    const double kt2 = k * t * t;
    const double c = kt2 / (kPi * kPi);
    if ((terms + 0.5) * (terms + 0.5) <= 4.0 * c) {
        throw InvalidParameter("ho_pin_spectral_sum: too few terms for the tail expansion");
    }
    // <e_n, 1>^2 / (1 - l_n) = 2t / ((n - 1/2)^2 pi^2 - k t^2), smallest first.
    double sum = 0.0;
    for (int n = terms; n >= 1; --n) {
        const double d = (n - 0.5) * kPi;
        sum += 2.0 * t / (d * d - kt2);
    }
    const double x = terms + 0.5;
    sum += 2.0 * t / (kPi * kPi) *
           (hurwitz_zeta(2, x) + c * hurwitz_zeta(4, x) + c * c * hurwitz_zeta(6, x) +
            c * c * c * hurwitz_zeta(8, x));
    return kI * k * sum;
}

}  // namespace hampath
