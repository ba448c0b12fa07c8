#pragma once

/// Q1 finite element assembly of the subdomain block operators:
/// consistent mass, total-flux matrix, load vector, the interface
/// constraint matrices and their "partial" Dirichlet couplings.
///
/// Every subdomain matrix is dense and indexed in the subdomain's local DoF
/// order (interface, interior | Dirichlet). Rows are always the free DoFs;
/// the *_D blocks couple free to free, the *_Gamma blocks couple free rows
/// to Dirichlet columns.

#include "ivrrom/fields.hpp"
#include "ivrrom/mesh.hpp"
#include "ivrrom/numerics.hpp"

#include <array>
#include <cmath>

namespace ivrrom {

class AssemblyError : public Error {
public:
    using Error::Error;
};

using ElementMatrix = Eigen::Matrix4d;

namespace detail {

struct GaussPoint {
    double s, t;                     // reference coordinates in [0,1]^2
    std::array<double, 4> n;         // shape values
    std::array<double, 4> ds, dt;    // reference derivatives
};

inline const std::array<GaussPoint, 4>& gauss_points() {
    static const std::array<GaussPoint, 4> pts = [] {
        std::array<GaussPoint, 4> out{};
        const double g = 0.5 / std::sqrt(3.0);
        const double q[2] = {0.5 - g, 0.5 + g};
        int k = 0;
        for (double t : q) {
            for (double s : q) {
                GaussPoint& p = out[static_cast<std::size_t>(k++)];
                p.s = s;
                p.t = t;
                // counterclockwise: (0,0) (1,0) (1,1) (0,1)
                p.n = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
                p.ds = {-(1 - t), (1 - t), t, -t};
                p.dt = {-(1 - s), -s, s, (1 - s)};
            }
        }
        return out;
    }();
    return pts;
}

}  // namespace detail

/// Consistent Q1 mass matrix of a square element of side h.
inline ElementMatrix element_mass(double h) {
    ElementMatrix m = ElementMatrix::Zero();
    const double w = 0.25 * h * h;
    for (const auto& p : detail::gauss_points())
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) += w * p.n[r] * p.n[c];
    return m;
}

/// Element total-flux matrix, entry (r, s) = int (kappa grad N_s - a N_s) . grad N_r.
inline ElementMatrix element_flux(double x0, double y0, double h, double kappa, const FieldSpec& fields,
                                  double time) {
    ElementMatrix m = ElementMatrix::Zero();
    const double w = 0.25 * h * h;
    for (const auto& p : detail::gauss_points()) {
        const auto a = fields.a(x0 + p.s * h, y0 + p.t * h, time);
        for (int r = 0; r < 4; ++r) {
            const double rx = p.ds[r] / h, ry = p.dt[r] / h;
            for (int c = 0; c < 4; ++c) {
                const double cx = p.ds[c] / h, cy = p.dt[c] / h;
                m(r, c) += w * (kappa * (cx * rx + cy * ry) - p.n[c] * (a[0] * rx + a[1] * ry));
            }
        }
    }
    return m;
}

/// A matrix split as [free x free | free x Dirichlet].
struct BlockPair {
    Matrix D;
    Matrix Gamma;
};

namespace detail {

template <typename ElementFn>
BlockPair assemble_blocks(const SubdomainMesh& sub, ElementFn&& element_fn) {
    const Index nd = sub.n_free();
    BlockPair out{Matrix::Zero(nd, nd), Matrix::Zero(nd, sub.n_dirichlet())};
    const Mesh& mesh = sub.parent();
    for (Index e : sub.elements()) {
        const auto nodes = mesh.element_nodes(e);
        const ElementMatrix ke = element_fn(e);
        std::array<Index, 4> dofs{};
        for (int a = 0; a < 4; ++a) dofs[static_cast<std::size_t>(a)] = sub.dof_of_node(nodes[static_cast<std::size_t>(a)]);
        for (int r = 0; r < 4; ++r) {
            const Index dr = dofs[static_cast<std::size_t>(r)];
            if (dr >= nd) continue;
            for (int c = 0; c < 4; ++c) {
                const Index dc = dofs[static_cast<std::size_t>(c)];
                if (dc < nd)
                    out.D(dr, dc) += ke(r, c);
                else
                    out.Gamma(dr, dc - nd) += ke(r, c);
            }
        }
    }
    return out;
}

}  // namespace detail

inline BlockPair assemble_mass(const SubdomainMesh& sub) {
    const ElementMatrix me = element_mass(sub.parent().h());
    return detail::assemble_blocks(sub, [&](Index) { return me; });
}

inline BlockPair assemble_flux(const SubdomainMesh& sub, const FieldSpec& fields, double time) {
    const Mesh& mesh = sub.parent();
    const double h = mesh.h();
    return detail::assemble_blocks(sub, [&](Index e) {
        const auto [x0, y0] = mesh.element_origin(e);
        return element_flux(x0, y0, h, fields.kappa_at(x0 + 0.5 * h), fields, time);
    });
}

/// Full mass matrix over every local DoF (Dirichlet rows included), local order.
inline Matrix assemble_full_mass(const SubdomainMesh& sub) {
    const Index n = sub.node_count();
    Matrix m = Matrix::Zero(n, n);
    const ElementMatrix me = element_mass(sub.parent().h());
    for (Index e : sub.elements()) {
        const auto nodes = sub.parent().element_nodes(e);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                m(sub.dof_of_node(nodes[static_cast<std::size_t>(r)]), sub.dof_of_node(nodes[static_cast<std::size_t>(c)])) += me(r, c);
    }
    return m;
}

/// Load vector int f N_r over the free DoFs.
inline Vector assemble_load(const SubdomainMesh& sub, const FieldSpec& fields, double time) {
    const Index nd = sub.n_free();
    Vector out = Vector::Zero(nd);
    if (!fields.has_source()) return out;
    const Mesh& mesh = sub.parent();
    const double h = mesh.h();
    const double w = 0.25 * h * h;
    for (Index e : sub.elements()) {
        const auto nodes = mesh.element_nodes(e);
        const auto [x0, y0] = mesh.element_origin(e);
        for (const auto& p : detail::gauss_points()) {
            const double fv = fields.f(x0 + p.s * h, y0 + p.t * h, time);
            for (int r = 0; r < 4; ++r) {
                const Index d = sub.dof_of_node(nodes[static_cast<std::size_t>(r)]);
                if (d < nd) out(d) += w * fv * p.n[r];
            }
        }
    }
    return out;
}

/// Nodal interpolant of g on the Dirichlet DoFs.
inline Vector dirichlet_values(const SubdomainMesh& sub, const ScalarField& g, double time) {
    Vector out = Vector::Zero(sub.n_dirichlet());
    if (!g) return out;
    for (Index k = 0; k < sub.n_dirichlet(); ++k) {
        const Index d = sub.n_free() + k;
        out(k) = g(sub.x(d), sub.y(d), time);
    }
    return out;
}

/// Nodal interpolant of a field over all local DoFs (free then Dirichlet).
inline Vector interpolate(const SubdomainMesh& sub, const InitialField& u) {
    Vector out = Vector::Zero(sub.node_count());
    if (!u) return out;
    for (Index d = 0; d < sub.node_count(); ++d) out(d) = u(sub.x(d), sub.y(d));
    return out;
}

/// Interface constraint blocks of one subdomain against the multiplier
/// basis (traces of the multiplier side's interface shape functions).
struct ConstraintBlocks {
    Matrix gamma;  // n_{k,gamma} x n_{i,gamma}
    Matrix Gamma;  // n_{k,gamma} x n_{i,Gamma}; nonzero only in endpoint columns
};

namespace detail {

inline ConstraintBlocks constraint_for(const SubdomainMesh& lm_side, const SubdomainMesh& sub) {
    const std::vector<Index> column = sub.interface_column_nodes();
    const double h = sub.parent().h();
    ConstraintBlocks out{Matrix::Zero(lm_side.n_gamma(), sub.n_gamma()),
                         Matrix::Zero(lm_side.n_gamma(), sub.n_dirichlet())};
    const double local[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
    for (std::size_t e = 0; e + 1 < column.size(); ++e) {
        const Index ends[2] = {column[e], column[e + 1]};
        for (int a = 0; a < 2; ++a) {
            const Index row = lm_side.dof_of_node(ends[a]);
            if (row < 0 || row >= lm_side.n_gamma()) continue;  // no multiplier at Dirichlet endpoints
            for (int b = 0; b < 2; ++b) {
                const Index col = sub.dof_of_node(ends[b]);
                if (col < sub.n_gamma())
                    out.gamma(row, col) += local[a][b];
                else if (col >= sub.n_free())
                    out.Gamma(row, col - sub.n_free()) += local[a][b];
            }
        }
    }
    return out;
}

}  // namespace detail

/// Constraint blocks (G_1, G_2) with the multiplier living on side k's
/// interface trace space. Requires spatially coincident interface nodes.
inline std::pair<ConstraintBlocks, ConstraintBlocks> assemble_constraint(const SubdomainMesh& sub1,
                                                                         const SubdomainMesh& sub2, int k = 1) {
    if (sub1.side() != 1 || sub2.side() != 2) throw AssemblyError("assemble_constraint: expects (side 1, side 2)");
    if (sub1.n_gamma() != sub2.n_gamma()) throw AssemblyError("assemble_constraint: interface node count mismatch");
    for (Index d = 0; d < sub1.n_gamma(); ++d) {
        if (std::abs(sub1.x(d) - sub2.x(d)) > 1e-14 || std::abs(sub1.y(d) - sub2.y(d)) > 1e-14)
            throw AssemblyError("assemble_constraint: interface grids do not match");
    }
    const SubdomainMesh& lm = k == 1 ? sub1 : sub2;
    return {detail::constraint_for(lm, sub1), detail::constraint_for(lm, sub2)};
}

/// Assembled operators of one subdomain in (interface, interior) block form.
struct SubdomainOperators {
    Index n_gamma = 0, n_interior = 0, n_dirichlet = 0;
    Matrix M_D, F_D;          // free x free
    Matrix M_Gamma, F_Gamma;  // free x Dirichlet ("partial" matrices)
    Matrix G_gamma, G_Gamma;  // constraint against the multiplier basis

    Index n_free() const { return n_gamma + n_interior; }

    auto M_gg() const { return M_D.topLeftCorner(n_gamma, n_gamma); }
    auto M_g0() const { return M_D.topRightCorner(n_gamma, n_interior); }
    auto M_0g() const { return M_D.bottomLeftCorner(n_interior, n_gamma); }
    auto M_00() const { return M_D.bottomRightCorner(n_interior, n_interior); }
    auto F_gg() const { return F_D.topLeftCorner(n_gamma, n_gamma); }
    auto F_g0() const { return F_D.topRightCorner(n_gamma, n_interior); }
    auto F_0g() const { return F_D.bottomLeftCorner(n_interior, n_gamma); }
    auto F_00() const { return F_D.bottomRightCorner(n_interior, n_interior); }
    auto M_gG() const { return M_Gamma.topRows(n_gamma); }
    auto M_0G() const { return M_Gamma.bottomRows(n_interior); }
    auto F_gG() const { return F_Gamma.topRows(n_gamma); }
    auto F_0G() const { return F_Gamma.bottomRows(n_interior); }
};

inline SubdomainOperators assemble_operators(const SubdomainMesh& sub, const FieldSpec& fields, double time,
                                             const ConstraintBlocks* constraint = nullptr) {
    SubdomainOperators ops;
    ops.n_gamma = sub.n_gamma();
    ops.n_interior = sub.n_interior();
    ops.n_dirichlet = sub.n_dirichlet();
    auto mass = assemble_mass(sub);
    auto flux = assemble_flux(sub, fields, time);
    ops.M_D = std::move(mass.D);
    ops.M_Gamma = std::move(mass.Gamma);
    ops.F_D = std::move(flux.D);
    ops.F_Gamma = std::move(flux.Gamma);
    if (constraint != nullptr) {
        ops.G_gamma = constraint->gamma;
        ops.G_Gamma = constraint->Gamma;
    }
    return ops;
}

/// Dirichlet contributions Q_{p,Gamma} = M_{p,Gamma} gdot + F_{p,Gamma} g for p in {gamma, 0}.
struct BoundaryRhs {
    Vector gamma;
    Vector interior;
};

inline BoundaryRhs boundary_rhs(const SubdomainOperators& ops, const Vector& g, const Vector& gdot) {
    if (g.size() != ops.n_dirichlet || gdot.size() != ops.n_dirichlet)
        throw AssemblyError("boundary_rhs: Dirichlet vector length mismatch");
    const Vector q = ops.M_Gamma * gdot + ops.F_Gamma * g;
    return {q.head(ops.n_gamma), q.tail(ops.n_interior)};
}

/// Q_{gamma,Gamma}(gdot_1, gdot_2) = G_{1,Gamma} gdot_1 - G_{2,Gamma} gdot_2.
inline Vector constraint_boundary_rhs(const SubdomainOperators& ops1, const SubdomainOperators& ops2,
                                      const Vector& gdot1, const Vector& gdot2) {
    if (gdot1.size() != ops1.n_dirichlet || gdot2.size() != ops2.n_dirichlet)
        throw AssemblyError("constraint_boundary_rhs: Dirichlet vector length mismatch");
    return ops1.G_Gamma * gdot1 - ops2.G_Gamma * gdot2;
}

}  // namespace ivrrom
