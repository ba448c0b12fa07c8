#include "ivrrom/metrics.hpp"
#include "ivrrom/verify.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace ivrrom;

namespace {

const Warning quiet = [](const std::string&) {};

ProblemConfig rotation() {
    ProblemConfig cfg = solid_body_rotation_config(1e-3, 1e-3, 8);
    cfg.final_time = 0.1;
    return cfg;
}

}  // namespace

TEST(RelativeError, ExactValues) {
    const Matrix m1 = 2.0 * Matrix::Identity(3, 3);
    const Matrix m2 = Matrix::Identity(2, 2);
    const VNorm norm(m1, m2);
    Vector s1(3), s2(2);
    s1 << 1, 2, 3;
    s2 << -1, 4;
    EXPECT_EQ(relative_error(norm, s1, s2, s1, s2), 0.0);
    EXPECT_NEAR(relative_error(norm, 2.0 * s1, 2.0 * s2, s1, s2), 1.0, 1e-15);
    // only side 2 off by e_1: sqrt(1 / (2*14 + 17))
    Vector p2 = s2;
    p2(0) += 1.0;
    EXPECT_NEAR(relative_error(norm, s1, p2, s1, s2), std::sqrt(1.0 / 45.0), 1e-15);
    EXPECT_NEAR(norm.squared(s1, s2), 45.0, 1e-13);
}

TEST(RelativeError, IgnoresDirichletRowsAndChecksInput) {
    const VNorm norm(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    Vector s(3), p(3);
    s << 1, 1, 100;
    p << 1, 1, -7;
    EXPECT_EQ(relative_error(norm, p, p, s, s), 0.0);
    EXPECT_THROW(relative_error(norm, p, p, Vector::Zero(3), Vector::Zero(3)), MetricsError);
    EXPECT_THROW(relative_error(norm, p.head(1), p, s, s), MetricsError);
    EXPECT_THROW(norm.squared(Vector::Zero(3), Vector::Zero(2)), MetricsError);
    EXPECT_THROW(relative_max_error(p, p, Vector::Zero(3), Vector::Zero(3)), MetricsError);
    EXPECT_NEAR(relative_max_error(2.0 * s, s, s, s), 1.0, 1e-15);
}

TEST(ErrorSeries, FullOrderAgainstBenchmarkIsRoundoff) {
    const ProblemConfig cfg = rotation();
    const PartitionedProblem p(cfg);
    ProblemConfig strided = cfg;
    strided.snapshot_stride = 5;
    const Trajectory bench = run_single_domain(strided, quiet);
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SimulationResult r = run(sys, {5});
    const ErrorSeries e = error_series(r, bench, p);
    EXPECT_EQ(e.formulation, "FF_fLM");
    EXPECT_EQ(e.steps.front(), 0);
    EXPECT_EQ(e.steps.back(), bench.steps.back());
    EXPECT_EQ(e.steps.size(), bench.steps.size() + 1);
    EXPECT_EQ(e.eps.front(), 0.0);
    for (double x : e.eps) EXPECT_LE(x, 1e-12);
}

TEST(ErrorSeries, OnlyCommonStepsAreCompared) {
    const ProblemConfig cfg = rotation();
    const PartitionedProblem p(cfg);
    ProblemConfig strided = cfg;
    strided.snapshot_stride = 7;
    const Trajectory bench = run_single_domain(strided, quiet);
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SimulationResult r = run(sys, {2});
    const ErrorSeries e = error_series(r, bench, p);
    for (Index s : e.steps) EXPECT_TRUE(s == 0 || (s % 14 == 0) || s == bench.steps.back());
}

TEST(Trace, SidesAgreeForFullOrderCoupling) {
    const ProblemConfig cfg = rotation();
    const PartitionedProblem p(cfg);
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SimulationResult r = run(sys, {10});
    const Index last = r.states1.cols() - 1;
    const auto t1 = interface_trace(r.states1.col(last), p.sub1);
    const auto t2 = interface_trace(r.states2.col(last), p.sub2);
    ASSERT_EQ(t1.first.size(), static_cast<std::size_t>(cfg.ny + 1));
    for (std::size_t i = 0; i < t1.first.size(); ++i) {
        EXPECT_DOUBLE_EQ(t1.first[i], t2.first[i]);
        EXPECT_NEAR(t1.second[i], t2.second[i], 1e-12);
        if (i > 0) {
            EXPECT_GT(t1.first[i], t1.first[i - 1]);
        }
    }
    EXPECT_EQ(t1.first.front(), 0.0);
    EXPECT_EQ(t1.first.back(), 1.0);
    EXPECT_THROW(interface_trace(Vector::Zero(3), p.sub1), MetricsError);
}

TEST(Trace, ReducedSidesDisagreeWithoutFullMultiplier) {
    const ProblemConfig cfg = rotation();
    const PartitionedProblem p(cfg);
    std::mt19937_64 rng(31);
    CompositeBasis b1, b2;
    b1.phi_gamma = verify::random_orthonormal(rng, p.n_gamma(), 2);
    b1.phi_interior = verify::random_orthonormal(rng, p.sub1.n_interior(), 6);
    b2.phi_gamma = verify::random_orthonormal(rng, p.n_gamma(), 2);
    b2.phi_interior = verify::random_orthonormal(rng, p.sub2.n_interior(), 6);
    CoupledSystem sys(p, make_formulation(FormulationTag::RR_rLM), &b1, &b2, quiet);
    const SimulationResult r = run(sys, {10});
    double gap = 0.0;
    for (Index c = 1; c < r.states1.cols(); ++c) {
        const auto t1 = interface_trace(r.states1.col(c), p.sub1);
        const auto t2 = interface_trace(r.states2.col(c), p.sub2);
        for (std::size_t i = 0; i < t1.second.size(); ++i) gap = std::max(gap, std::abs(t1.second[i] - t2.second[i]));
    }
    EXPECT_GT(gap, 0.0);
}

TEST(Properties, ErrorIsPermutationInvariant) {
    const auto r = verify::prop_error_permutation(707);
    EXPECT_TRUE(r.passed) << r.detail;
}
