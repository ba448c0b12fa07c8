#pragma once

/// Monolithic single-domain full order model: the snapshot generator and
/// the accuracy benchmark for every partitioned scheme.

#include "ivrrom/assembly.hpp"
#include "ivrrom/io.hpp"
#include "ivrrom/pod.hpp"
#include "ivrrom/problem.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace ivrrom {

class FomError : public Error {
public:
    FomError(const std::string& what, Index step) : Error(what), step_(step) {}
    Index step() const noexcept { return step_; }

private:
    Index step_;
};

/// Stored states of a single-domain run, in parent node numbering.
/// The initial state is kept apart; `states` holds steps stride, 2 stride,
/// ..., always ending with the final step.
struct Trajectory {
    Vector initial_state;
    std::vector<double> times;
    std::vector<Index> steps;
    Matrix states;  // node_count x stored steps
    double dt = 0.0;

    Index columns() const { return states.cols(); }
};

using Warning = std::function<void(const std::string&)>;

inline void default_warning(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

namespace detail {

inline Vector to_parent_order(const SubdomainMesh& sub, const Vector& free, const Vector& g) {
    Vector out = Vector::Zero(sub.parent().node_count());
    for (Index d = 0; d < sub.n_free(); ++d) out(sub.node_of_dof(d)) = free(d);
    for (Index k = 0; k < sub.n_dirichlet(); ++k) out(sub.node_of_dof(sub.n_free() + k)) = g(k);
    return out;
}

}  // namespace detail

/// Forward Euler on M u_t = f - F u - Q(gdot, g) over the whole mesh, with
/// the diffusion switching from kappa1 to kappa2 across x_split.
inline Trajectory run_single_domain(const ProblemConfig& cfg, const Warning& warn = default_warning) {
    cfg.validate();
    const Mesh mesh = cfg.mesh();
    const SubdomainMesh dom = whole_domain(mesh, cfg.sides);
    const FieldSpec& fields = cfg.fields;
    const double dt_cfl = cfl_time_step(mesh, fields, 1.0);
    if (cfg.dt > 1.05 * dt_cfl)
        warn("time step " + format_real(cfg.dt) + " exceeds the CFL estimate " + format_real(dt_cfl));

    SubdomainOperators ops = assemble_operators(dom, fields, 0.0);
    const SparseSpdFactorization mass(ops.M_D);
    SparseMatrix flux_sparse = ops.F_D.sparseView();
    const DirichletSampler bc(dom, fields);
    const std::vector<double> t = time_grid(cfg.final_time, cfg.dt);
    const Index n_steps = static_cast<Index>(t.size()) - 1;

    Vector u0_local = interpolate(dom, fields.initial);
    Vector u = u0_local.head(dom.n_free());

    Trajectory traj;
    traj.dt = cfg.dt;
    traj.initial_state = detail::to_parent_order(dom, u, bc.g(0.0));
    const Index stored = (n_steps + cfg.snapshot_stride - 1) / cfg.snapshot_stride;
    traj.states.resize(mesh.node_count(), stored);
    Index col = 0;
    for (Index n = 0; n < n_steps; ++n) {
        const double tn = t[static_cast<std::size_t>(n)];
        const double tprev = n > 0 ? t[static_cast<std::size_t>(n - 1)] : tn;
        const double tnext = t[static_cast<std::size_t>(n + 1)];
        const double h = tnext - tn;
        if (!fields.autonomous_advection && n > 0) {
            auto flux = assemble_flux(dom, fields, tn);
            flux_sparse = flux.D.sparseView();
            ops.F_D = std::move(flux.D);
            ops.F_Gamma = std::move(flux.Gamma);
        }
        Vector rhs = -(flux_sparse * u);
        if (fields.has_source()) rhs += assemble_load(dom, fields, tn);
        if (fields.has_dirichlet()) {
            const BoundaryRhs q = boundary_rhs(ops, bc.g(tn), bc.gdot(tn, tprev, tnext));
            rhs.head(ops.n_gamma) -= q.gamma;
            rhs.tail(ops.n_interior) -= q.interior;
        }
        u += h * mass.solve(rhs);
        if (!u.allFinite()) throw FomError("single-domain solve became non-finite at step " + std::to_string(n + 1), n + 1);
        const Index step = n + 1;
        if (step % cfg.snapshot_stride == 0 || step == n_steps) {
            if (col == traj.states.cols()) traj.states.conservativeResize(Eigen::NoChange, col + 1);
            traj.states.col(col++) = detail::to_parent_order(dom, u, bc.g(tnext));
            traj.times.push_back(tnext);
            traj.steps.push_back(step);
        }
    }
    traj.states.conservativeResize(Eigen::NoChange, col);
    return traj;
}

/// Gathers the local-order (free then Dirichlet) rows of a parent-order state.
inline Vector gather_local(const SubdomainMesh& sub, const Vector& parent_state) {
    Vector out(sub.node_count());
    for (Index d = 0; d < sub.node_count(); ++d) out(d) = parent_state(sub.node_of_dof(d));
    return out;
}

inline SnapshotSet restrict_snapshots(const Trajectory& traj, const SubdomainMesh& sub, Provenance prov = {}) {
    if (traj.states.rows() != sub.parent().node_count())
        throw FomError("restrict_to_subdomains: trajectory does not belong to this mesh", 0);
    Matrix x(sub.node_count(), traj.columns());
    for (Index d = 0; d < sub.node_count(); ++d) x.row(d) = traj.states.row(sub.node_of_dof(d));
    return split_snapshots(std::move(x), sub.n_gamma(), sub.n_interior(), std::move(prov));
}

inline std::pair<SnapshotSet, SnapshotSet> restrict_to_subdomains(const Trajectory& traj, const SubdomainMesh& sub1,
                                                                  const SubdomainMesh& sub2, const Provenance& prov = {}) {
    return {restrict_snapshots(traj, sub1, prov), restrict_snapshots(traj, sub2, prov)};
}

/// Writes `<stem>.mat` (snapshots, labels = times) and `<stem>.initial.mat`
/// (initial state, label = dt; a second column holds the stored step indices).
inline void write_trajectory(const std::filesystem::path& stem, const Trajectory& traj) {
    write_matrix(stem.string() + ".mat", traj.states, traj.times);
    const Index rows = std::max<Index>(traj.initial_state.size(), static_cast<Index>(traj.steps.size()));
    Matrix init = Matrix::Zero(rows, 2);
    init.col(0).head(traj.initial_state.size()) = traj.initial_state;
    for (std::size_t k = 0; k < traj.steps.size(); ++k) init(static_cast<Index>(k), 1) = static_cast<double>(traj.steps[k]);
    write_matrix(stem.string() + ".initial.mat", init, {traj.dt, static_cast<double>(traj.initial_state.size())});
}

inline Trajectory read_trajectory(const std::filesystem::path& stem) {
    LabeledMatrix s = read_matrix(stem.string() + ".mat");
    LabeledMatrix i = read_matrix(stem.string() + ".initial.mat");
    Trajectory traj;
    traj.states = std::move(s.data);
    traj.times = std::move(s.labels);
    if (i.data.cols() != 2 || i.labels.size() != 2) throw IoError("malformed trajectory sidecar: " + stem.string());
    traj.dt = i.labels[0];
    traj.initial_state = i.data.col(0).head(static_cast<Index>(i.labels[1]));
    for (Index k = 0; k < traj.states.cols(); ++k) traj.steps.push_back(static_cast<Index>(i.data(k, 1)));
    return traj;
}

}  // namespace ivrrom
