#pragma once

/// Offline stage: snapshot sets split into interface and interior parts,
/// POD bases with energy-based truncation, and Galerkin projection of the
/// subdomain operators onto a composite (interface, interior) basis.

#include "ivrrom/assembly.hpp"
#include "ivrrom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ivrrom {

class PodError : public Error {
public:
    using Error::Error;
};

struct Provenance {
    std::vector<double> kappa1, kappa2, dt;
    std::vector<std::string> runs;
};

/// Snapshots of one subdomain, rows in local DoF order.
struct SnapshotSet {
    Matrix X_full;   // n_i x r, all nodes (free then Dirichlet)
    Matrix X_D;      // free rows: [X_gamma; X_0]
    Matrix X_0;      // interior rows
    Matrix X_gamma;  // interface rows
    Provenance provenance;

    Index columns() const { return X_full.cols(); }
};

/// Builds the splits of a full local-order snapshot matrix.
inline SnapshotSet split_snapshots(Matrix x_full, Index n_gamma, Index n_interior, Provenance prov = {}) {
    if (x_full.rows() < n_gamma + n_interior) throw PodError("split_snapshots: too few rows");
    SnapshotSet s;
    s.X_D = x_full.topRows(n_gamma + n_interior);
    s.X_gamma = x_full.topRows(n_gamma);
    s.X_0 = x_full.middleRows(n_gamma, n_interior);
    s.X_full = std::move(x_full);
    s.provenance = std::move(prov);
    return s;
}

/// Column-wise concatenation of two snapshot sets of the same subdomain.
inline SnapshotSet concat(const SnapshotSet& a, const SnapshotSet& b) {
    if (a.X_full.rows() != b.X_full.rows() || a.X_gamma.rows() != b.X_gamma.rows())
        throw PodError("concat: snapshot sets belong to different subdomains");
    Matrix x(a.X_full.rows(), a.columns() + b.columns());
    x << a.X_full, b.X_full;
    Provenance p = a.provenance;
    for (std::size_t i = 0; i < b.provenance.runs.size(); ++i) p.runs.push_back(b.provenance.runs[i]);
    p.kappa1.insert(p.kappa1.end(), b.provenance.kappa1.begin(), b.provenance.kappa1.end());
    p.kappa2.insert(p.kappa2.end(), b.provenance.kappa2.begin(), b.provenance.kappa2.end());
    p.dt.insert(p.dt.end(), b.provenance.dt.begin(), b.provenance.dt.end());
    return split_snapshots(std::move(x), a.X_gamma.rows(), a.X_0.rows(), std::move(p));
}

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-12;

inline Index numerical_rank(const Vector& sigma) {
    if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
    const double cut = kRankTolerance * sigma(0);
    Index r = 0;
    while (r < sigma.size() && sigma(r) > cut) ++r;
    return r;
}

/// Smallest d with sum_{i<=d} sigma_i^2 >= (1 - delta) sum sigma_i^2.
inline Index select_dim(const Vector& sigma, double delta) {
    if (sigma.size() == 0) throw PodError("select_dim: empty singular value list");
    if (!(delta >= 0.0) || !(delta < 1.0)) throw PodError("select_dim: threshold must lie in [0, 1)");
    const Index rank = numerical_rank(sigma);
    if (rank == 0) throw PodError("select_dim: all singular values are zero");
    const double total = sigma.head(rank).squaredNorm();
    const double target = (1.0 - delta) * total * (1.0 - 1e-14);
    double cum = 0.0;
    for (Index d = 0; d < rank; ++d) {
        cum += sigma(d) * sigma(d);
        if (cum >= target) return d + 1;
    }
    return rank;
}

/// Retained fraction of snapshot energy with d modes.
inline double snapshot_energy(const Vector& sigma, Index d) {
    if (d < 1 || d > sigma.size()) throw PodError("snapshot_energy: d out of range");
    const double total = sigma.squaredNorm();
    if (total == 0.0) return 1.0;
    return std::min(1.0, sigma.head(d).squaredNorm() / total);
}

/// Left singular vectors and singular values of one snapshot split.
struct PodModes {
    Matrix U;
    Vector sigma;
    Index rank = 0;
};

inline PodModes pod_modes(const Matrix& x) {
    SvdResult svd = svd_thin(x);
    PodModes m;
    m.rank = numerical_rank(svd.sigma);
    m.U = std::move(svd.U);
    m.sigma = std::move(svd.sigma);
    return m;
}

struct CompositeBasis {
    Matrix phi_interior;  // n_0 x d_0
    Matrix phi_gamma;     // n_gamma x d_gamma
    Vector sigma_interior, sigma_gamma;
    Index dmax_gamma = 0;

    Index d_interior() const { return phi_interior.cols(); }
    Index d_gamma() const { return phi_gamma.cols(); }
};

/// How to size a composite basis. Exactly one interior rule (delta0 or d0)
/// and at most one interface rule (delta_gamma or d_gamma); with neither
/// interface rule the interface size is min(ceil(2 d0 / 3), dmax_gamma).
struct BasisRequest {
    std::optional<double> delta0, delta_gamma;
    std::optional<Index> d0, d_gamma;
};

inline Index two_thirds_rule(Index d0, Index dmax_gamma) {
    return std::min<Index>((2 * d0 + 2) / 3, dmax_gamma);
}

inline CompositeBasis truncate_basis(const PodModes& interior, const PodModes& gamma, const BasisRequest& req) {
    Index d0 = 0;
    if (req.d0) {
        d0 = *req.d0;
    } else if (req.delta0) {
        d0 = select_dim(interior.sigma, *req.delta0);
    } else {
        throw PodError("build_composite_basis: no interior dimension rule");
    }
    Index dg = 0;
    if (req.d_gamma) {
        dg = *req.d_gamma;
    } else if (req.delta_gamma) {
        dg = select_dim(gamma.sigma, *req.delta_gamma);
    } else {
        dg = two_thirds_rule(d0, gamma.rank);
    }
    if (d0 < 1 || d0 > interior.rank)
        throw PodError("requested interior dimension " + std::to_string(d0) + " exceeds available rank " +
                       std::to_string(interior.rank));
    if (dg < 1 || dg > gamma.rank)
        throw PodError("requested interface dimension " + std::to_string(dg) + " exceeds available rank " +
                       std::to_string(gamma.rank));
    CompositeBasis b;
    b.phi_interior = interior.U.leftCols(d0);
    b.phi_gamma = gamma.U.leftCols(dg);
    b.sigma_interior = interior.sigma;
    b.sigma_gamma = gamma.sigma;
    b.dmax_gamma = gamma.rank;
    return b;
}

inline CompositeBasis build_composite_basis(const SnapshotSet& snaps, const BasisRequest& req) {
    return truncate_basis(pod_modes(snaps.X_0), pod_modes(snaps.X_gamma), req);
}

/// Basis that reproduces the full order model: identity on both splits.
inline CompositeBasis identity_basis(Index n_gamma, Index n_interior) {
    CompositeBasis b;
    b.phi_gamma = Matrix::Identity(n_gamma, n_gamma);
    b.phi_interior = Matrix::Identity(n_interior, n_interior);
    b.sigma_gamma = Vector::Ones(n_gamma);
    b.sigma_interior = Vector::Ones(n_interior);
    b.dmax_gamma = n_gamma;
    return b;
}

/// Operators of one side after (optional) Galerkin projection, in
/// (interface, interior) block order. The constraint blocks are expressed
/// against the multiplier basis.
struct RomOperators {
    bool reduced = false;
    Index dim_gamma = 0, dim_interior = 0;
    Matrix M, F;              // (dim_gamma + dim_interior)^2
    Matrix M_Gamma, F_Gamma;  // (dim_gamma + dim_interior) x n_Dirichlet
    Matrix G;                 // m x dim_gamma
    Matrix G_Gamma;           // m x n_Dirichlet
    Matrix phi_gamma, phi_interior;  // empty for a full order side

    Index dim() const { return dim_gamma + dim_interior; }

    auto M_gg() const { return M.topLeftCorner(dim_gamma, dim_gamma); }
    auto M_g0() const { return M.topRightCorner(dim_gamma, dim_interior); }
    auto M_0g() const { return M.bottomLeftCorner(dim_interior, dim_gamma); }
    auto M_00() const { return M.bottomRightCorner(dim_interior, dim_interior); }

    /// Reduced coordinates of a free-DoF vector (orthogonal projection).
    Vector restrict_free(const Vector& v_free, Index n_gamma) const {
        if (!reduced) return v_free;
        Vector out(dim());
        out.head(dim_gamma) = phi_gamma.transpose() * v_free.head(n_gamma);
        out.tail(dim_interior) = phi_interior.transpose() * v_free.tail(v_free.size() - n_gamma);
        return out;
    }

    /// Free-DoF vector of reduced coordinates.
    Vector lift_free(const Vector& v) const {
        if (!reduced) return v;
        Vector out(phi_gamma.rows() + phi_interior.rows());
        out.head(phi_gamma.rows()) = phi_gamma * v.head(dim_gamma);
        out.tail(phi_interior.rows()) = phi_interior * v.tail(dim_interior);
        return out;
    }

    /// Interface part of a reduced vector in full interface coordinates.
    Vector lift_gamma(const Vector& v) const {
        if (!reduced) return v.head(dim_gamma);
        return phi_gamma * v.head(dim_gamma);
    }
};

/// Projects the flux blocks only (used when the advection field changes in time).
inline void project_flux(RomOperators& out, const SubdomainOperators& ops) {
    if (!out.reduced) {
        out.F = ops.F_D;
        out.F_Gamma = ops.F_Gamma;
        return;
    }
    const Matrix& pg = out.phi_gamma;
    const Matrix& p0 = out.phi_interior;
    const Index a = out.dim_gamma, b = out.dim_interior;
    out.F.resize(a + b, a + b);
    out.F.topLeftCorner(a, a) = pg.transpose() * ops.F_gg() * pg;
    out.F.topRightCorner(a, b) = pg.transpose() * ops.F_g0() * p0;
    out.F.bottomLeftCorner(b, a) = p0.transpose() * ops.F_0g() * pg;
    out.F.bottomRightCorner(b, b) = p0.transpose() * ops.F_00() * p0;
    out.F_Gamma.resize(a + b, ops.n_dirichlet);
    out.F_Gamma.topRows(a) = pg.transpose() * ops.F_gG();
    out.F_Gamma.bottomRows(b) = p0.transpose() * ops.F_0G();
}

/// Galerkin projection of one side.
///  basis:       composite basis of this side, or nullptr for a full order side
///  multiplier:  reduced multiplier basis (n_gamma x m), or nullptr for the
///               full interface trace space
inline RomOperators project_operators(const SubdomainOperators& ops, const CompositeBasis* basis,
                                      const Matrix* multiplier) {
    if (ops.G_gamma.size() == 0 && ops.n_gamma > 0) throw PodError("project_operators: constraint blocks missing");
    RomOperators out;
    out.reduced = basis != nullptr;
    if (basis != nullptr) {
        if (basis->phi_gamma.rows() != ops.n_gamma || basis->phi_interior.rows() != ops.n_interior)
            throw PodError("project_operators: basis does not match the subdomain");
        out.phi_gamma = basis->phi_gamma;
        out.phi_interior = basis->phi_interior;
        out.dim_gamma = basis->d_gamma();
        out.dim_interior = basis->d_interior();
        const Matrix& pg = out.phi_gamma;
        const Matrix& p0 = out.phi_interior;
        const Index a = out.dim_gamma, b = out.dim_interior;
        out.M.resize(a + b, a + b);
        out.M.topLeftCorner(a, a) = pg.transpose() * ops.M_gg() * pg;
        out.M.topRightCorner(a, b) = pg.transpose() * ops.M_g0() * p0;
        out.M.bottomLeftCorner(b, a) = p0.transpose() * ops.M_0g() * pg;
        out.M.bottomRightCorner(b, b) = p0.transpose() * ops.M_00() * p0;
        out.M_Gamma.resize(a + b, ops.n_dirichlet);
        out.M_Gamma.topRows(a) = pg.transpose() * ops.M_gG();
        out.M_Gamma.bottomRows(b) = p0.transpose() * ops.M_0G();
        out.G = ops.G_gamma * pg;
    } else {
        out.dim_gamma = ops.n_gamma;
        out.dim_interior = ops.n_interior;
        out.M = ops.M_D;
        out.M_Gamma = ops.M_Gamma;
        out.G = ops.G_gamma;
    }
    project_flux(out, ops);
    out.G_Gamma = ops.G_Gamma;
    if (multiplier != nullptr) {
        if (multiplier->rows() != ops.G_gamma.rows()) throw PodError("project_operators: multiplier basis mismatch");
        out.G = multiplier->transpose() * out.G;
        out.G_Gamma = multiplier->transpose() * out.G_Gamma;
    }
    return out;
}

}  // namespace ivrrom
