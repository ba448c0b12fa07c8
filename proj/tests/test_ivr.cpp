#include "ivrrom/ivr.hpp"
#include "ivrrom/metrics.hpp"
#include "ivrrom/verify.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace ivrrom;

namespace {

const Warning quiet = [](const std::string&) {};

ProblemConfig small_rotation() {
    ProblemConfig cfg = solid_body_rotation_config(1e-3, 1e-3, 8);
    cfg.final_time = 0.1;
    return cfg;
}

CompositeBasis random_basis(std::mt19937_64& rng, const SubdomainMesh& sub, Index dg, Index d0) {
    CompositeBasis b;
    b.phi_gamma = verify::random_orthonormal(rng, sub.n_gamma(), dg);
    b.phi_interior = verify::random_orthonormal(rng, sub.n_interior(), d0);
    b.dmax_gamma = sub.n_gamma();
    return b;
}

}  // namespace

TEST(Formulation, FlagsAndParsing) {
    const Formulation ff = make_formulation(FormulationTag::FF_fLM);
    EXPECT_FALSE(ff.side_is_rom(1));
    EXPECT_FALSE(ff.side_is_rom(2));
    EXPECT_EQ(ff.lm_side, 1);
    const Formulation rr = make_formulation(FormulationTag::RR_rLM);
    EXPECT_TRUE(rr.side_is_rom(1) && rr.side_is_rom(2) && rr.reduced_multiplier);
    EXPECT_FALSE(make_formulation(FormulationTag::RR_fLM).trace_compatible());
    const Formulation fr = make_formulation(FormulationTag::FR_rLM);
    EXPECT_FALSE(fr.side_is_rom(1));
    EXPECT_TRUE(fr.side_is_rom(2));
    EXPECT_EQ(fr.lm_side, 2);
    EXPECT_EQ(make_formulation(FormulationTag::FR_fLM).lm_side, 1);
    EXPECT_EQ(parse_formulation("rr-rlm").tag, FormulationTag::RR_rLM);
    EXPECT_EQ(parse_formulation("FR_fLM").tag, FormulationTag::FR_fLM);
    EXPECT_THROW(parse_formulation("RF_fLM"), IvrError);
    for (FormulationTag t : all_formulations()) EXPECT_EQ(parse_formulation(make_formulation(t).name()).tag, t);
}

TEST(CoupledSystem, BasisPresenceIsChecked) {
    const PartitionedProblem p(small_rotation());
    std::mt19937_64 rng(1);
    const CompositeBasis b = random_basis(rng, p.sub2, 3, 5);
    EXPECT_THROW(CoupledSystem(p, make_formulation(FormulationTag::FF_fLM), nullptr, &b, quiet), IvrError);
    EXPECT_THROW(CoupledSystem(p, make_formulation(FormulationTag::FR_fLM), nullptr, nullptr, quiet), IvrError);
    EXPECT_THROW(CoupledSystem(p, make_formulation(FormulationTag::FR_fLM), &b, &b, quiet), IvrError);
    EXPECT_NO_THROW(CoupledSystem(p, make_formulation(FormulationTag::FR_fLM), nullptr, &b, quiet));
}

TEST(CoupledSystem, ZeroDataGivesZeroEverything) {
    ProblemConfig cfg = small_rotation();
    cfg.fields.initial = nullptr;
    const PartitionedProblem p(cfg);
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SimulationResult r = run(sys, {5});
    EXPECT_EQ(r.states1.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.states2.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.lambda.cwiseAbs().maxCoeff(), 0.0);
}

TEST(CoupledSystem, FullOrderSchurIsSymmetricPositiveDefinite) {
    const PartitionedProblem p(small_rotation());
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SchurSystem& s = sys.schur();
    EXPECT_TRUE(s.spd());
    EXPECT_LE(s.asymmetry, 1e-12);
    EXPECT_EQ(s.S.rows(), p.n_gamma());
    EXPECT_GE(s.cond, 1.0);
    EXPECT_LT(s.cond, 10.0);
    // independent evaluation of G1 M1^-1 G1^T + G2 M2^-1 G2^T
    Matrix expect = Matrix::Zero(p.n_gamma(), p.n_gamma());
    for (int side = 1; side <= 2; ++side) {
        const SubdomainOperators& o = p.ops(side);
        Matrix g = Matrix::Zero(p.n_gamma(), o.n_free());
        g.leftCols(o.n_gamma) = o.G_gamma;
        expect += g * o.M_D.fullPivLu().solve(Matrix(g.transpose()));
    }
    EXPECT_LE((s.S - expect).cwiseAbs().maxCoeff(), 1e-12 * expect.cwiseAbs().maxCoeff());
}

TEST(CoupledSystem, FullOrderMatchesSingleDomain) {
    const ProblemConfig cfg = small_rotation();
    const PartitionedProblem p(cfg);
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SimulationResult r = run(sys, {1});
    const Trajectory bench = run_single_domain(cfg, quiet);
    const ErrorSeries e = error_series(r, bench, p);
    ASSERT_EQ(e.steps.size(), bench.steps.size() + 1);
    for (double m : e.max_rel) EXPECT_LE(m, 1e-12);
    for (double res : r.residual_max) EXPECT_LE(res, 1e-10);
}

TEST(CoupledSystem, IdentityBasesReproduceFullOrder) {
    const PartitionedProblem p(small_rotation());
    CoupledSystem ff(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SimulationResult ref = run(ff, {4});
    const CompositeBasis id1 = identity_basis(p.sub1.n_gamma(), p.sub1.n_interior());
    const CompositeBasis id2 = identity_basis(p.sub2.n_gamma(), p.sub2.n_interior());
    for (FormulationTag tag : {FormulationTag::RR_rLM, FormulationTag::RR_fLM, FormulationTag::FR_fLM,
                               FormulationTag::FR_rLM}) {
        const Formulation f = make_formulation(tag);
        CoupledSystem sys(p, f, f.rom[0] ? &id1 : nullptr, &id2, quiet);
        const SimulationResult r = run(sys, {4});
        EXPECT_LE(verify::max_state_error(r, ref), 1e-12) << f.name();
    }
}

TEST(CoupledSystem, StepMatchesMonolithicSolve) {
    const ProblemConfig cfg = manufactured_problem("advection_diffusion", 6, 1e-3);
    const PartitionedProblem p(cfg);
    std::mt19937_64 rng(17);
    const CompositeBasis b1 = random_basis(rng, p.sub1, 3, 6);
    const CompositeBasis b2 = random_basis(rng, p.sub2, 4, 9);
    for (FormulationTag tag : {FormulationTag::FF_fLM, FormulationTag::RR_rLM, FormulationTag::FR_fLM,
                               FormulationTag::FR_rLM}) {
        const Formulation f = make_formulation(tag);
        const CompositeBasis* p1 = f.rom[0] ? &b1 : nullptr;
        const CompositeBasis* p2 = f.rom[1] ? &b2 : nullptr;
        CoupledSystem sys(p, f, p1, p2, quiet);
        const verify::MonolithicOracle oracle(p, f, p1, p2);
        const CoupledState st = sys.initial_state();
        const StepRhs rhs = sys.compute_rhs(st, 0.02, 0.019, 0.021);
        const Vector lambda = sys.solve_multiplier(rhs);
        const Velocities v = sys.velocities(rhs, lambda);
        Vector got(v.u1.size() + v.u2.size() + lambda.size());
        got << v.u1, v.u2, lambda;
        const Vector ref = oracle.solve(st.u1, st.u2, 0.02, 0.019, 0.021);
        EXPECT_LE((got - ref).norm(), 1e-10 * ref.norm()) << f.name();
    }
}

TEST(CoupledSystem, ReducedMultiplierEnforcesProjectedContinuity) {
    const ProblemConfig cfg = manufactured_problem("diffusion", 6, 1e-3);
    const PartitionedProblem p(cfg);
    std::mt19937_64 rng(23);
    const CompositeBasis b2 = random_basis(rng, p.sub2, 2, 7);
    CoupledSystem sys(p, make_formulation(FormulationTag::FR_rLM), nullptr, &b2, quiet);
    const CoupledState st = sys.initial_state();
    const StepRhs rhs = sys.compute_rhs(st, 0.0, 0.0, 1e-3);
    const Velocities v = sys.velocities(rhs, sys.solve_multiplier(rhs));
    const Vector mismatch = sys.interface_residual(v);
    // Psi^T (G1 u1' - G2 u2') = s_gamma holds for the projected constraint
    const Vector c = sys.constraint(1) * v.u1 - sys.constraint(2) * v.u2;
    EXPECT_LE((c - rhs.s_gamma).norm(), 1e-10 * std::max(1.0, rhs.s_gamma.norm()));
    EXPECT_GT(mismatch.norm(), 1e-6);  // the full-order trace does not match exactly
    EXPECT_EQ(sys.multiplier_dim(), 2);
    EXPECT_EQ(sys.multiplier_full(Vector::Ones(2)).size(), p.n_gamma());
}

TEST(CoupledSystem, IncompatibleTraceSpacesBreakPositiveDefiniteness) {
    const PartitionedProblem p(small_rotation());
    std::mt19937_64 rng(29);
    const CompositeBasis b1 = random_basis(rng, p.sub1, 2, 5);
    const CompositeBasis b2 = random_basis(rng, p.sub2, 2, 5);
    int warnings = 0;
    CoupledSystem f(p, make_formulation(FormulationTag::RR_fLM), &b1, &b2,
                    [&](const std::string&) { ++warnings; });
    // rank of S is at most 4 while it has n_gamma = 7 rows
    EXPECT_TRUE(!f.schur().spd() || f.schur().cond > 1e12);
    if (!f.schur().spd()) {
        EXPECT_EQ(warnings, 1);
        EXPECT_TRUE(f.schur().failed_pivot.has_value());
    }
    CoupledSystem r(p, make_formulation(FormulationTag::RR_rLM), &b1, &b2, quiet);
    EXPECT_TRUE(r.schur().spd());
    EXPECT_LT(r.schur().cond, 1e3);
    EXPECT_EQ(r.multiplier_dim(), 2);
}

TEST(CoupledSystem, SamplingAndDiagnostics) {
    ProblemConfig cfg = small_rotation();
    cfg.final_time = 23 * cfg.dt;
    const PartitionedProblem p(cfg);
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    const SimulationResult r = run(sys, {10});
    EXPECT_EQ(r.sample_steps, (std::vector<Index>{0, 10, 20, 23}));
    EXPECT_EQ(r.states1.cols(), 4);
    EXPECT_EQ(r.step_times.size(), 23u);
    EXPECT_EQ(r.residual_weighted.size(), 23u);
    EXPECT_EQ(r.formulation, "FF_fLM");
    EXPECT_EQ(r.multiplier_dim, p.n_gamma());
    EXPECT_THROW(run(sys, {0}), IvrError);
}

TEST(CoupledSystem, UnstableStepRaises) {
    ProblemConfig cfg = manufactured_problem("diffusion", 8, 0.5);
    cfg.final_time = 400.0;
    const PartitionedProblem p(cfg);
    CoupledSystem sys(p, make_formulation(FormulationTag::FF_fLM), nullptr, nullptr, quiet);
    try {
        run(sys, {100});
        FAIL() << "expected InstabilityError";
    } catch (const InstabilityError& e) {
        EXPECT_GT(e.step(), 1);
    }
}

TEST(Properties, DeterminismAndSideDecoupling) {
    const auto r = verify::prop_determinism(606, 20);
    EXPECT_TRUE(r.passed) << r.detail;
}
