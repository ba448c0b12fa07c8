#include "ivrrom/numerics.hpp"
#include "ivrrom/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace ivrrom;

TEST(Svd, IdentityHasUnitSingularValues) {
    const SvdResult s = svd_thin(Matrix::Identity(5, 5));
    ASSERT_EQ(s.sigma.size(), 5);
    for (Index i = 0; i < 5; ++i) EXPECT_NEAR(s.sigma(i), 1.0, 1e-15);
}

TEST(Svd, DiagonalValuesAreSortedMagnitudes) {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = -3.0;
    d(2, 2) = 1.0;
    const SvdResult s = svd_thin(d);
    EXPECT_NEAR(s.sigma(0), 3.0, 1e-14);
    EXPECT_NEAR(s.sigma(1), 2.0, 1e-14);
    EXPECT_NEAR(s.sigma(2), 1.0, 1e-14);
}

TEST(Svd, RandomReconstruction) {
    std::mt19937_64 rng(7);
    const Matrix x = verify::random_matrix(rng, 10, 4);
    const SvdResult s = svd_thin(x);
    EXPECT_EQ(s.U.rows(), 10);
    EXPECT_EQ(s.U.cols(), 4);
    EXPECT_EQ(s.V.rows(), 4);
    const Matrix back = s.U * s.sigma.asDiagonal() * s.V.transpose();
    EXPECT_LE((back - x).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((s.U.transpose() * s.U - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Svd, LargeInputUsesDivideAndConquer) {
    std::mt19937_64 rng(8);
    const Matrix x = verify::random_matrix(rng, 200, 90);
    const SvdResult s = svd_thin(x);
    const Matrix back = s.U * s.sigma.asDiagonal() * s.V.transpose();
    EXPECT_LE((back - x).cwiseAbs().maxCoeff(), 1e-11);
    for (Index i = 1; i < s.sigma.size(); ++i) EXPECT_LE(s.sigma(i), s.sigma(i - 1));
}

TEST(Svd, EmptyAndNonFiniteInputs) {
    const SvdResult s = svd_thin(Matrix(0, 3));
    EXPECT_EQ(s.sigma.size(), 0);
    Matrix bad = Matrix::Ones(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(svd_thin(bad), NumericsError);
}

TEST(Spd, TwoByTwoSolve) {
    Matrix a(2, 2);
    a << 4, 2, 2, 3;
    Vector b(2);
    b << 8, 7;
    // Cramer's rule: det = 8, x = (8*3 - 2*7)/8, y = (4*7 - 2*8)/8
    const Vector x = spd_solve(spd_factor(a), b);
    EXPECT_NEAR(x(0), 1.25, 1e-15);
    EXPECT_NEAR(x(1), 1.5, 1e-15);
    const Matrix l = spd_factor(a).factor();
    EXPECT_NEAR(l(0, 0), 2.0, 1e-15);
    EXPECT_NEAR(l(1, 0), 1.0, 1e-15);
    EXPECT_NEAR(l(1, 1), std::sqrt(2.0), 1e-15);
}

TEST(Spd, IndefiniteReportsPivot) {
    Matrix a(2, 2);
    a << 1, 2, 2, 1;
    try {
        spd_factor(a);
        FAIL() << "expected NotSpdError";
    } catch (const NotSpdError& e) {
        EXPECT_EQ(e.pivot(), 1);
    }
    Matrix z = Matrix::Zero(3, 3);
    z(1, 1) = z(2, 2) = 1.0;
    try {
        spd_factor(z);
        FAIL() << "expected NotSpdError";
    } catch (const NotSpdError& e) {
        EXPECT_EQ(e.pivot(), 0);
    }
}

TEST(Spd, RejectsAsymmetricAndNonSquare) {
    Matrix a(2, 2);
    a << 2, 1, 0, 2;
    EXPECT_THROW(spd_factor(a), NumericsError);
    EXPECT_THROW(spd_factor(Matrix::Ones(2, 3)), NumericsError);
}

TEST(Spd, RightHandSideLengthChecked) {
    const SpdFactorization f(Matrix::Identity(3, 3));
    EXPECT_THROW(f.solve(Vector(Vector::Ones(2))), NumericsError);
    EXPECT_THROW(f.solve(Matrix(Matrix::Ones(2, 2))), NumericsError);
}

TEST(Spd, SparseMatchesDense) {
    std::mt19937_64 rng(11);
    const Matrix a = verify::random_spd(rng, 12);
    const Vector b = verify::random_matrix(rng, 12, 1).col(0);
    const Vector x_dense = SpdFactorization(a).solve(b);
    const Vector x_sparse = SparseSpdFactorization(a).solve(b);
    EXPECT_LE((x_dense - x_sparse).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((a * x_sparse - b).norm(), 1e-11 * b.norm());
    Matrix indef = Matrix::Identity(3, 3);
    indef(2, 2) = -1.0;
    EXPECT_THROW(SparseSpdFactorization{indef}, NotSpdError);
}

TEST(Cond2, KnownValues) {
    EXPECT_NEAR(cond2(Matrix::Identity(4, 4)), 1.0, 1e-14);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 10.0;
    d(1, 1) = 1.0;
    EXPECT_NEAR(cond2(d), 10.0, 1e-13);
    EXPECT_THROW(cond2(Matrix::Zero(3, 3)), NumericsError);
    Matrix singular = Matrix::Zero(2, 2);
    singular(0, 0) = 1.0;
    EXPECT_TRUE(std::isinf(cond2(singular)));
}

TEST(DenseSolve, PartialPivoting) {
    Matrix a(2, 2);
    a << 0, 1, 1, 0;
    Vector b(2);
    b << 3, 4;
    const Vector x = dense_solve(a, b);
    EXPECT_DOUBLE_EQ(x(0), 4.0);
    EXPECT_DOUBLE_EQ(x(1), 3.0);
    EXPECT_THROW(dense_solve(a, Vector::Ones(3)), NumericsError);
}

TEST(Properties, SvdReconstructionOrthonormalityOrdering) {
    const auto r = verify::prop_svd(101);
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Properties, SpdSolveResidualAndCondScaleInvariance) {
    const auto r = verify::prop_spd(202);
    EXPECT_TRUE(r.passed) << r.detail;
}
