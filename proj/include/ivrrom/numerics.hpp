#pragma once

/// Dense linear-algebra kernel shared by every other module: thin SVD,
/// SPD factorization and solve, general dense solve, 2-norm condition number.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace ivrrom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericsError : public Error {
public:
    using Error::Error;
};

/// Raised when a Cholesky factorization meets a non-positive pivot.
class NotSpdError : public NumericsError {
public:
    explicit NotSpdError(Index pivot)
        : NumericsError("matrix is not SPD: non-positive pivot at index " + std::to_string(pivot)),
          pivot_(pivot) {}
    Index pivot() const noexcept { return pivot_; }

private:
    Index pivot_;
};

class SvdConvergenceError : public NumericsError {
public:
    explicit SvdConvergenceError(long iterations)
        : NumericsError("SVD kernel failed to converge after " + std::to_string(iterations) + " iterations"),
          iterations_(iterations) {}
    long iterations() const noexcept { return iterations_; }

private:
    long iterations_;
};

struct SvdResult {
    Matrix U;      // left singular vectors, orthonormal columns
    Vector sigma;  // nonincreasing, nonnegative
    Matrix V;      // right singular vectors, orthonormal columns
};

/// Thin SVD, X = U diag(sigma) V^T with min(rows, cols) singular triplets.
inline SvdResult svd_thin(const Matrix& x) {
    if (!x.allFinite()) throw NumericsError("svd_thin: input has non-finite entries");
    SvdResult out;
    if (x.rows() == 0 || x.cols() == 0) {
        out.U = Matrix(x.rows(), 0);
        out.V = Matrix(x.cols(), 0);
        out.sigma = Vector(0);
        return out;
    }
    // Jacobi is more accurate on small problems; divide-and-conquer scales to snapshot sets.
    constexpr Index kJacobiLimit = 64;
    if (std::min(x.rows(), x.cols()) <= kJacobiLimit) {
        Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success) throw SvdConvergenceError(-1);
        out.U = svd.matrixU();
        out.sigma = svd.singularValues();
        out.V = svd.matrixV();
    } else {
        Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success) throw SvdConvergenceError(-1);
        out.U = svd.matrixU();
        out.sigma = svd.singularValues();
        out.V = svd.matrixV();
    }
    return out;
}

/// Cholesky factor of a symmetric positive definite matrix.
///
/// The input is symmetrized as (A + A^T)/2 after checking that the
/// asymmetry is below 1e-12 relative to the largest entry.
class SpdFactorization {
public:
    SpdFactorization() = default;

    explicit SpdFactorization(const Matrix& a) {
        if (a.rows() != a.cols()) throw NumericsError("spd_factor: matrix is not square");
        const double scale = a.cwiseAbs().maxCoeff();
        const Matrix sym = 0.5 * (a + a.transpose());
        if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw NumericsError("spd_factor: matrix is not symmetric to 1e-12 relative");
        llt_.compute(sym);
        if (llt_.info() != Eigen::Success) throw NotSpdError(first_bad_pivot(sym));
        dim_ = a.rows();
    }

    Index dim() const noexcept { return dim_; }

    Vector solve(const Vector& b) const {
        if (b.size() != dim_) throw NumericsError("spd_solve: right-hand side length mismatch");
        return llt_.solve(b);
    }

    Matrix solve(const Matrix& b) const {
        if (b.rows() != dim_) throw NumericsError("spd_solve: right-hand side row mismatch");
        return llt_.solve(b);
    }

    /// Lower-triangular factor L with A = L L^T.
    Matrix factor() const { return llt_.matrixL(); }

private:
    // Unblocked left-looking scan; used only to report where LLT broke down.
    static Index first_bad_pivot(const Matrix& a) {
        const Index n = a.rows();
        Matrix l = Matrix::Zero(n, n);
        for (Index j = 0; j < n; ++j) {
            double d = a(j, j) - l.row(j).head(j).squaredNorm();
            if (!(d > 0.0)) return j;
            l(j, j) = std::sqrt(d);
            for (Index i = j + 1; i < n; ++i)
                l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
        }
        return n;
    }

    Eigen::LLT<Matrix> llt_;
    Index dim_ = 0;
};

/// Cholesky factor of an SPD matrix held densely but applied through its
/// sparsity pattern (finite element mass matrices of full order sides).
class SparseSpdFactorization {
public:
    SparseSpdFactorization() = default;

    explicit SparseSpdFactorization(const Matrix& a)
        : llt_(std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>()) {
        if (a.rows() != a.cols()) throw NumericsError("spd_factor: matrix is not square");
        const SparseMatrix s = (0.5 * (a + a.transpose())).sparseView();
        llt_->compute(s);
        if (llt_->info() != Eigen::Success) throw NotSpdError(-1);
        dim_ = a.rows();
    }

    Index dim() const noexcept { return dim_; }

    Vector solve(const Vector& b) const {
        if (b.size() != dim_) throw NumericsError("spd_solve: right-hand side length mismatch");
        return llt_->solve(b);
    }

    Matrix solve(const Matrix& b) const {
        if (b.rows() != dim_) throw NumericsError("spd_solve: right-hand side row mismatch");
        return llt_->solve(b);
    }

private:
    std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> llt_;
    Index dim_ = 0;
};

inline SpdFactorization spd_factor(const Matrix& a) { return SpdFactorization(a); }

inline Vector spd_solve(const SpdFactorization& f, const Vector& b) { return f.solve(b); }

/// General dense solve with partial pivoting.
inline Vector dense_solve(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols() || a.rows() != b.size()) throw NumericsError("dense_solve: dimension mismatch");
    return a.partialPivLu().solve(b);
}

/// 2-norm condition number sigma_max / sigma_min; +inf when sigma_min < 1e-300.
inline double cond2(const Matrix& a) {
    if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) throw NumericsError("cond2: zero matrix");
    const Vector s = svd_thin(a).sigma;
    const double smin = s(s.size() - 1);
    if (smin < 1e-300) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

}  // namespace ivrrom
