#include "ivrrom/assembly.hpp"
#include "ivrrom/problem.hpp"

#include <gtest/gtest.h>

using namespace ivrrom;

namespace {

// 1D integrals on [0,1] of the linear shape functions phi0 = 1 - s, phi1 = s.
double mass_1d(int a, int b) { return a == b ? 1.0 / 3.0 : 1.0 / 6.0; }
double value_slope_1d(int, int b) { return (b == 0 ? -1.0 : 1.0) * 0.5; }  // int phi_a phi_b'

constexpr int kI[4] = {0, 1, 1, 0};  // x index of each counterclockwise corner
constexpr int kJ[4] = {0, 0, 1, 1};  // y index

}  // namespace

TEST(Element, MassMatchesClosedForm) {
    const double h = 0.3;
    const ElementMatrix m = element_mass(h);
    ElementMatrix expect;
    expect << 4, 2, 1, 2, 2, 4, 2, 1, 1, 2, 4, 2, 2, 1, 2, 4;
    expect *= h * h / 36.0;
    EXPECT_LE((m - expect).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Element, StiffnessMatchesClosedForm) {
    FieldSpec f;
    for (double h : {1.0, 0.125}) {
        const ElementMatrix k = element_flux(0.0, 0.0, h, 2.0, f, 0.0);
        ElementMatrix expect;
        expect << 4, -1, -2, -1, -1, 4, -1, -2, -2, -1, 4, -1, -1, -2, -1, 4;
        expect *= 2.0 / 6.0;
        EXPECT_LE((k - expect).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Element, AdvectionPartMatchesTensorIntegrals) {
    FieldSpec f;
    const double ax = 0.7, ay = -1.3, h = 0.25;
    f.advection = [=](double, double, double) { return std::array<double, 2>{ax, ay}; };
    // kappa chosen so the diffusion part can be removed exactly
    const ElementMatrix with = element_flux(0.5, 0.25, h, 1.0, f, 0.0);
    const ElementMatrix diff = element_flux(0.5, 0.25, h, 1.0, FieldSpec{}, 0.0);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            // -int N_c a . grad N_r = -h (ax A_x B_y + ay B_x A_y)
            const double ix = value_slope_1d(kI[c], kI[r]) * mass_1d(kJ[c], kJ[r]);
            const double iy = mass_1d(kI[c], kI[r]) * value_slope_1d(kJ[c], kJ[r]);
            const double expect = -h * (ax * ix + ay * iy);
            EXPECT_NEAR(with(r, c) - diff(r, c), expect, 1e-15) << r << "," << c;
        }
    }
}

TEST(Global, MassSumsToArea) {
    const Mesh m = build_uniform_mesh(6, 6);
    const auto [s1, s2] = partition_at(m, 0.5);
    EXPECT_NEAR(assemble_full_mass(s1).sum(), 0.5, 1e-14);
    EXPECT_NEAR(assemble_full_mass(s2).sum(), 0.5, 1e-14);
    EXPECT_NEAR(assemble_full_mass(whole_domain(m)).sum(), 1.0, 1e-14);
    const BlockPair mass = assemble_mass(s1);
    EXPECT_LE((mass.D - mass.D.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(mass.Gamma.rows(), s1.n_free());
    EXPECT_EQ(mass.Gamma.cols(), s1.n_dirichlet());
}

TEST(Global, ConstantsAreInTheFluxKernel) {
    const Mesh m = build_uniform_mesh(6, 6);
    const auto [s1, s2] = partition_at(m, 0.5);
    FieldSpec f;
    f.kappa1 = 0.3;
    f.kappa2 = 1.7;
    f.advection = [](double, double, double) { return std::array<double, 2>{1.0, 0.5}; };
    for (const SubdomainMesh* s : {&s1, &s2}) {
        const BlockPair flux = assemble_flux(*s, f, 0.0);
        const Vector r = flux.D * Vector::Ones(s->n_free()) + flux.Gamma * Vector::Ones(s->n_dirichlet());
        // interior rows: the full patch lies in the subdomain
        EXPECT_LE(r.tail(s->n_interior()).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(Global, TransmissionSolutionHasZeroDiscreteResidual) {
    // u = w(x)(1 + y) with kappa w' = 1 on both sides: -div(kappa grad u) = 0 and the flux
    // through x = 1/2 is (1 + y), so the side-1 interface rows equal h (1 + y_r), side 2 the negative.
    const ProblemConfig pc = manufactured_problem("transmission", 8, 1e-3);
    const Mesh m = pc.mesh();
    const auto [s1, s2] = partition_at(m, 0.5);
    FieldSpec diffusion_only;
    diffusion_only.kappa1 = pc.fields.kappa1;
    diffusion_only.kappa2 = pc.fields.kappa2;
    const auto u = [&](double x, double y) { return pc.exact(x, y, 0.0); };
    const double h = m.h();
    for (const SubdomainMesh* s : {&s1, &s2}) {
        const BlockPair flux = assemble_flux(*s, diffusion_only, 0.0);
        const Vector full = interpolate(*s, u);
        const Vector r = flux.D * full.head(s->n_free()) + flux.Gamma * full.tail(s->n_dirichlet());
        EXPECT_LE(r.tail(s->n_interior()).cwiseAbs().maxCoeff(), 1e-13);
        const double sign = s->side() == 1 ? 1.0 : -1.0;
        for (Index d = 0; d < s->n_gamma(); ++d) EXPECT_NEAR(r(d), sign * h * (1.0 + s->y(d)), 1e-13);
    }
    const SubdomainMesh w = whole_domain(m);
    const BlockPair flux = assemble_flux(w, diffusion_only, 0.0);
    const Vector full = interpolate(w, u);
    const Vector r = flux.D * full.head(w.n_free()) + flux.Gamma * full.tail(w.n_dirichlet());
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Global, LoadOfUnitSource) {
    const Mesh m = build_uniform_mesh(2, 2);
    FieldSpec f;
    f.source = [](double, double, double) { return 1.0; };
    const Vector b = assemble_load(whole_domain(m), f, 0.0);
    ASSERT_EQ(b.size(), 1);
    EXPECT_NEAR(b(0), 0.25, 1e-15);
    EXPECT_EQ(assemble_load(whole_domain(m), FieldSpec{}, 0.0).size(), 1);
}

TEST(Constraint, SmallestInterface) {
    const Mesh m = build_uniform_mesh(2, 2);
    const auto [s1, s2] = partition_at(m, 0.5);
    const auto [c1, c2] = assemble_constraint(s1, s2, 1);
    ASSERT_EQ(c1.gamma.rows(), 1);
    ASSERT_EQ(c1.gamma.cols(), 1);
    EXPECT_NEAR(c1.gamma(0, 0), 1.0 / 3.0, 1e-16);
    EXPECT_NEAR(c2.gamma(0, 0), 1.0 / 3.0, 1e-16);
    // the endpoints (0.5, 0) and (0.5, 1) are Dirichlet nodes: h/6 each
    EXPECT_NEAR(c1.Gamma.sum(), 2.0 / 12.0, 1e-16);
    EXPECT_EQ((c1.Gamma.array() != 0.0).count(), 2);
    EXPECT_NEAR(c2.Gamma.sum(), 2.0 / 12.0, 1e-16);
}

TEST(Constraint, TraceMassStructure) {
    const Mesh m = build_uniform_mesh(8, 8);
    const auto [s1, s2] = partition_at(m, 0.5);
    const auto [c1, c2] = assemble_constraint(s1, s2, 1);
    const double h = m.h();
    const Index n = s1.n_gamma();
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double expect = i == j ? 2.0 * h / 3.0 : (std::abs(i - j) == 1 ? h / 6.0 : 0.0);
            EXPECT_NEAR(c1.gamma(i, j), expect, 1e-16);
        }
    }
    EXPECT_LE((c1.gamma - c2.gamma).cwiseAbs().maxCoeff(), 0.0);
    // k = 2 uses side 2's interface space, identical on matching grids
    const auto [d1, d2] = assemble_constraint(s1, s2, 2);
    EXPECT_LE((d1.gamma - c1.gamma).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((d2.Gamma - c2.Gamma).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(assemble_constraint(s2, s1), AssemblyError);
}

TEST(Operators, BlocksAndBoundaryTerms) {
    const ProblemConfig pc = manufactured_problem("advection_diffusion", 4, 1e-3);
    const Mesh m = pc.mesh();
    const auto [s1, s2] = partition_at(m, 0.5);
    const auto [c1, c2] = assemble_constraint(s1, s2);
    const SubdomainOperators o1 = assemble_operators(s1, pc.fields, 0.0, &c1);
    const SubdomainOperators o2 = assemble_operators(s2, pc.fields, 0.0, &c2);
    EXPECT_EQ(o1.M_gg().rows(), s1.n_gamma());
    EXPECT_EQ(o1.M_00().rows(), s1.n_interior());
    EXPECT_EQ(o1.F_gG().cols(), s1.n_dirichlet());
    const Vector g = Vector::LinSpaced(o1.n_dirichlet, 0.0, 1.0);
    const Vector gd = Vector::Constant(o1.n_dirichlet, 2.0);
    const BoundaryRhs q = boundary_rhs(o1, g, gd);
    const Vector direct = o1.M_Gamma * gd + o1.F_Gamma * g;
    EXPECT_LE((q.gamma - direct.head(o1.n_gamma)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((q.interior - direct.tail(o1.n_interior)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(boundary_rhs(o1, Vector::Zero(2), gd), AssemblyError);
    const Vector sg = constraint_boundary_rhs(o1, o2, gd, Vector::Zero(o2.n_dirichlet));
    EXPECT_LE((sg - o1.G_Gamma * gd).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(constraint_boundary_rhs(o1, o2, gd, gd.head(1)), AssemblyError);
}
