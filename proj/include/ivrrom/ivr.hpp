#pragma once

/// Online stage: coupled FOM-FOM, ROM-ROM and ROM-FOM systems advanced with
/// forward Euler, the interface Lagrange multiplier recovered each step
/// from the dual Schur complement
///
///   S = G1 M1^-1 G1^T + G2 M2^-1 G2^T,
///   S lambda = G1 M1^-1 s1 - G2 M2^-1 s2 - s_gamma,
///   M1 u1' = s1 - G1^T lambda,   M2 u2' = s2 + G2^T lambda.
///
/// Hatted quantities (reduced sides, reduced multiplier) reuse the same
/// formulas through RomOperators.

#include "ivrrom/assembly.hpp"
#include "ivrrom/fom.hpp"
#include "ivrrom/pod.hpp"
#include "ivrrom/problem.hpp"

#include <Eigen/LU>

#include <array>
#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ivrrom {

class IvrError : public Error {
public:
    using Error::Error;
};

class InstabilityError : public IvrError {
public:
    InstabilityError(const std::string& what, Index step) : IvrError(what), step_(step) {}
    Index step() const noexcept { return step_; }

private:
    Index step_;
};

enum class FormulationTag { FF_fLM, RR_rLM, RR_fLM, FR_fLM, FR_rLM };

/// Side 1 is the full order side of every FR formulation.
struct Formulation {
    FormulationTag tag = FormulationTag::FF_fLM;
    int lm_side = 1;               // whose interface space carries the multiplier
    std::array<bool, 2> rom{};     // side 1, side 2 reduced?
    bool reduced_multiplier = false;

    bool side_is_rom(int side) const { return rom[static_cast<std::size_t>(side - 1)]; }
    bool trace_compatible() const { return tag != FormulationTag::RR_fLM; }

    std::string name() const {
        switch (tag) {
            case FormulationTag::FF_fLM: return "FF_fLM";
            case FormulationTag::RR_rLM: return "RR_rLM";
            case FormulationTag::RR_fLM: return "RR_fLM";
            case FormulationTag::FR_fLM: return "FR_fLM";
            case FormulationTag::FR_rLM: return "FR_rLM";
        }
        return "?";
    }
};

inline Formulation make_formulation(FormulationTag tag) {
    Formulation f;
    f.tag = tag;
    switch (tag) {
        case FormulationTag::FF_fLM: f.rom = {false, false}; break;
        case FormulationTag::RR_rLM: f.rom = {true, true}; f.reduced_multiplier = true; break;
        case FormulationTag::RR_fLM: f.rom = {true, true}; break;
        case FormulationTag::FR_fLM: f.rom = {false, true}; break;
        case FormulationTag::FR_rLM: f.rom = {false, true}; f.reduced_multiplier = true; f.lm_side = 2; break;
    }
    return f;
}

inline const std::array<FormulationTag, 5>& all_formulations() {
    static const std::array<FormulationTag, 5> tags = {FormulationTag::FF_fLM, FormulationTag::RR_rLM,
                                                       FormulationTag::RR_fLM, FormulationTag::FR_fLM,
                                                       FormulationTag::FR_rLM};
    return tags;
}

/// Accepts "FF_fLM" and "FF-fLM" spellings, case-insensitive.
inline Formulation parse_formulation(const std::string& text) {
    std::string key;
    for (char c : text) key += c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (FormulationTag tag : all_formulations()) {
        std::string name = make_formulation(tag).name();
        for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (name == key) return make_formulation(tag);
    }
    throw IvrError("unknown formulation '" + text + "'");
}

/// The two subdomains of a problem with their assembled operators
/// (constraint against side 1's interface space).
struct PartitionedProblem {
    ProblemConfig config;
    Mesh mesh;
    SubdomainMesh sub1, sub2;
    SubdomainOperators ops1, ops2;

    explicit PartitionedProblem(const ProblemConfig& cfg)
        : config(cfg), mesh(cfg.mesh()), sub1(make(cfg, 1)), sub2(make(cfg, 2)) {
        cfg.validate();
        const auto [c1, c2] = assemble_constraint(sub1, sub2, 1);
        ops1 = assemble_operators(sub1, cfg.fields, 0.0, &c1);
        ops2 = assemble_operators(sub2, cfg.fields, 0.0, &c2);
    }

    const SubdomainMesh& sub(int side) const { return side == 1 ? sub1 : sub2; }
    const SubdomainOperators& ops(int side) const { return side == 1 ? ops1 : ops2; }
    Index n_gamma() const { return sub1.n_gamma(); }

private:
    static SubdomainMesh make(const ProblemConfig& cfg, int side) {
        auto parts = partition_at(Mesh(cfg.nx, cfg.ny, cfg.rect), cfg.x_split, cfg.sides);
        return side == 1 ? std::move(parts.first) : std::move(parts.second);
    }
};

/// Mass solves and flux products of one side; full order sides go through
/// the sparsity pattern, reduced sides stay dense.
class SideSolver {
public:
    SideSolver() = default;

    explicit SideSolver(const RomOperators& rom) : sparse_(!rom.reduced) {
        if (sparse_) {
            sparse_mass_ = SparseSpdFactorization(rom.M);
        } else {
            dense_mass_ = SpdFactorization(rom.M);
        }
        refresh_flux(rom);
    }

    void refresh_flux(const RomOperators& rom) {
        if (sparse_) flux_sparse_ = rom.F.sparseView();
    }

    Vector solve(const Vector& b) const { return sparse_ ? sparse_mass_.solve(b) : dense_mass_.solve(b); }
    Matrix solve(const Matrix& b) const { return sparse_ ? sparse_mass_.solve(b) : dense_mass_.solve(b); }

    Vector apply_flux(const RomOperators& rom, const Vector& u) const {
        return sparse_ ? Vector(flux_sparse_ * u) : Vector(rom.F * u);
    }

private:
    bool sparse_ = false;
    SpdFactorization dense_mass_;
    SparseSpdFactorization sparse_mass_;
    SparseMatrix flux_sparse_;
};

/// Dual Schur complement with its factorization or the record of why it failed.
struct SchurSystem {
    Matrix S;
    double asymmetry = 0.0;  // ||S - S^T||_max / ||S||_max before symmetrization
    double cond = 0.0;
    std::optional<SpdFactorization> cholesky;
    std::optional<Index> failed_pivot;
    Eigen::FullPivLU<Matrix> lu;

    bool spd() const { return cholesky.has_value(); }

    Vector solve(const Vector& b) const { return cholesky ? cholesky->solve(b) : Vector(lu.solve(b)); }
};

inline SchurSystem build_schur(const Matrix& s_raw, const Warning& warn = default_warning) {
    SchurSystem out;
    const double scale = s_raw.size() ? s_raw.cwiseAbs().maxCoeff() : 0.0;
    out.asymmetry = scale > 0.0 ? (s_raw - s_raw.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
    out.S = 0.5 * (s_raw + s_raw.transpose());
    out.cond = scale > 0.0 ? cond2(out.S) : std::numeric_limits<double>::infinity();
    try {
        out.cholesky.emplace(out.S);
    } catch (const NotSpdError& e) {
        out.failed_pivot = e.pivot();
        out.lu.compute(out.S);
        warn("Schur complement is not SPD (pivot " + std::to_string(e.pivot()) + ", cond2 " + format_real(out.cond) +
             "); using a general dense solve");
    }
    return out;
}

struct CoupledState {
    Vector u1, u2;  // (interface, interior) coefficients, full or reduced
};

struct StepRhs {
    Vector s1, s2;
    Vector s_gamma;
};

struct Velocities {
    Vector u1, u2;
};

/// A formulation bound to a partitioned problem and its bases.
class CoupledSystem {
public:
    /// basis1/basis2 must be given exactly for the reduced sides.
    CoupledSystem(const PartitionedProblem& problem, Formulation form, const CompositeBasis* basis1,
                  const CompositeBasis* basis2, const Warning& warn = default_warning)
        : problem_(&problem), form_(form) {
        const auto start = std::chrono::steady_clock::now();
        const std::array<const CompositeBasis*, 2> bases = {basis1, basis2};
        for (int side = 1; side <= 2; ++side) {
            const bool has = bases[static_cast<std::size_t>(side - 1)] != nullptr;
            if (has != form.side_is_rom(side))
                throw IvrError(form.name() + ": side " + std::to_string(side) +
                               (has ? " is full order but a basis was given" : " needs a reduced basis"));
        }
        if (form.reduced_multiplier) psi_ = bases[static_cast<std::size_t>(form.lm_side - 1)]->phi_gamma;
        const auto [c1, c2] = assemble_constraint(problem.sub1, problem.sub2, form.lm_side);
        const std::array<const ConstraintBlocks*, 2> cons = {&c1, &c2};
        for (int side = 1; side <= 2; ++side) {
            const std::size_t k = static_cast<std::size_t>(side - 1);
            SubdomainOperators ops = problem.ops(side);
            ops.G_gamma = cons[k]->gamma;
            ops.G_Gamma = cons[k]->Gamma;
            rom_[k] = project_operators(ops, bases[k], form.reduced_multiplier ? &psi_ : nullptr);
            solver_[k] = SideSolver(rom_[k]);
            g_[k] = Matrix::Zero(rom_[k].G.rows(), rom_[k].dim());
            g_[k].leftCols(rom_[k].dim_gamma) = rom_[k].G;
            minv_gt_[k] = solver_[k].solve(Matrix(g_[k].transpose()));
        }
        schur_ = build_schur(g_[0] * minv_gt_[0] + g_[1] * minv_gt_[1], warn);
        build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    const Formulation& formulation() const { return form_; }
    const PartitionedProblem& problem() const { return *problem_; }
    const SchurSystem& schur() const { return schur_; }
    const RomOperators& side(int s) const { return rom_[static_cast<std::size_t>(s - 1)]; }
    Index multiplier_dim() const { return schur_.S.rows(); }
    double build_seconds() const { return build_seconds_; }

    /// Orthogonal projection of the interpolated initial condition.
    CoupledState initial_state() const {
        CoupledState st;
        st.u1 = project_initial(1);
        st.u2 = project_initial(2);
        return st;
    }

    /// Per-side right-hand sides s_i = P^T f - F u - Q_Gamma(gdot, g) and the
    /// constraint right-hand side s_gamma = -Psi^T (G1_Gamma gdot1 - G2_Gamma gdot2).
    StepRhs compute_rhs(const CoupledState& st, double t, double t_prev, double t_next) {
        refresh_flux(t);
        StepRhs r;
        std::array<Vector, 2> gdot;
        for (int side = 1; side <= 2; ++side) {
            const std::size_t k = static_cast<std::size_t>(side - 1);
            const SubdomainMesh& sub = problem_->sub(side);
            const FieldSpec& fields = problem_->config.fields;
            const RomOperators& rom = rom_[k];
            const Vector& u = side == 1 ? st.u1 : st.u2;
            if (u.size() != rom.dim()) throw IvrError("compute_rhs: state length does not match the formulation");
            Vector s = -solver_[k].apply_flux(rom, u);
            if (fields.has_source()) s += rom.restrict_free(assemble_load(sub, fields, t), sub.n_gamma());
            const DirichletSampler bc(sub, fields);
            gdot[k] = bc.gdot(t, t_prev, t_next);
            if (fields.has_dirichlet()) s -= rom.M_Gamma * gdot[k] + rom.F_Gamma * bc.g(t);
            (side == 1 ? r.s1 : r.s2) = std::move(s);
        }
        r.s_gamma = -(rom_[0].G_Gamma * gdot[0] - rom_[1].G_Gamma * gdot[1]);
        return r;
    }

    Vector multiplier_rhs(const StepRhs& r) const {
        return minv_gt_[0].transpose() * r.s1 - minv_gt_[1].transpose() * r.s2 - r.s_gamma;
    }

    /// lambda-hat of the current step.
    Vector solve_multiplier(const StepRhs& r) const { return schur_.solve(multiplier_rhs(r)); }

    /// Decoupled subdomain solves given the multiplier.
    Velocities velocities(const StepRhs& r, const Vector& lambda) const {
        Velocities v;
        v.u1 = solver_[0].solve(Vector(r.s1 - g_[0].transpose() * lambda));
        v.u2 = solver_[1].solve(Vector(r.s2 + g_[1].transpose() * lambda));
        return v;
    }

    /// Full-order interface velocity mismatch u1_gamma' - u2_gamma'.
    Vector interface_residual(const Velocities& v) const {
        return rom_[0].lift_gamma(v.u1) - rom_[1].lift_gamma(v.u2);
    }

    /// Multiplier in full interface coordinates.
    Vector multiplier_full(const Vector& lambda) const {
        return form_.reduced_multiplier ? Vector(psi_ * lambda) : lambda;
    }

    const Matrix& multiplier_basis() const { return psi_; }

    /// Constraint of one side over all its coefficients (zero interior columns).
    const Matrix& constraint(int s) const { return g_[static_cast<std::size_t>(s - 1)]; }

    /// Full local-order vector (free then Dirichlet) of one side.
    Vector lift(int side, const Vector& u, double t) const {
        const SubdomainMesh& sub = problem_->sub(side);
        Vector out(sub.node_count());
        out.head(sub.n_free()) = rom_[static_cast<std::size_t>(side - 1)].lift_free(u);
        out.tail(sub.n_dirichlet()) = DirichletSampler(sub, problem_->config.fields).g(t);
        return out;
    }

private:
    Vector project_initial(int side) const {
        const SubdomainMesh& sub = problem_->sub(side);
        const Vector full = interpolate(sub, problem_->config.fields.initial);
        return rom_[static_cast<std::size_t>(side - 1)].restrict_free(full.head(sub.n_free()), sub.n_gamma());
    }

    void refresh_flux(double t) {
        const FieldSpec& fields = problem_->config.fields;
        if (fields.autonomous_advection || t == flux_time_) return;
        for (int side = 1; side <= 2; ++side) {
            const std::size_t k = static_cast<std::size_t>(side - 1);
            SubdomainOperators ops = problem_->ops(side);
            auto flux = assemble_flux(problem_->sub(side), fields, t);
            ops.F_D = std::move(flux.D);
            ops.F_Gamma = std::move(flux.Gamma);
            project_flux(rom_[k], ops);
            solver_[k].refresh_flux(rom_[k]);
        }
        flux_time_ = t;
    }

    const PartitionedProblem* problem_;
    Formulation form_;
    Matrix psi_;
    std::array<RomOperators, 2> rom_;
    std::array<SideSolver, 2> solver_;
    std::array<Matrix, 2> g_;        // [G_gamma, 0] per side
    std::array<Matrix, 2> minv_gt_;  // M^-1 G^T per side
    SchurSystem schur_;
    double flux_time_ = 0.0;
    double build_seconds_ = 0.0;
};

struct RunOptions {
    Index sample_stride = 10;  // the final step is always sampled
};

struct SimulationResult {
    std::string formulation;
    Index d1_gamma = 0, d1_interior = 0, d2_gamma = 0, d2_interior = 0, multiplier_dim = 0;
    double schur_cond = 0.0;
    bool schur_spd = false;
    double schur_asymmetry = 0.0;

    std::vector<Index> sample_steps;
    std::vector<double> sample_times;
    Matrix states1, states2;  // full local order, one column per sample
    Matrix lambda;            // full interface coordinates, one column per sample

    std::vector<double> step_times;        // t^n for n = 0 .. N-1
    std::vector<double> residual_max;      // max-norm interface velocity mismatch per step
    std::vector<double> residual_weighted; // ||Psi^T G1_gamma (mismatch)||_2 per step
    std::vector<double> rhs_norm;          // ||Schur right-hand side||_2 per step

    double offline_seconds = 0.0, online_seconds = 0.0;
};

/// Forward Euler from t = 0 to the configured final time.
inline SimulationResult run(CoupledSystem& sys, const RunOptions& opt = {}) {
    if (opt.sample_stride < 1) throw IvrError("run: sample stride must be at least 1");
    const ProblemConfig& cfg = sys.problem().config;
    const std::vector<double> t = time_grid(cfg.final_time, cfg.dt);
    const Index n_steps = static_cast<Index>(t.size()) - 1;
    const auto start = std::chrono::steady_clock::now();

    SimulationResult res;
    res.formulation = sys.formulation().name();
    res.d1_gamma = sys.side(1).dim_gamma;
    res.d1_interior = sys.side(1).dim_interior;
    res.d2_gamma = sys.side(2).dim_gamma;
    res.d2_interior = sys.side(2).dim_interior;
    res.multiplier_dim = sys.multiplier_dim();
    res.schur_cond = sys.schur().cond;
    res.schur_spd = sys.schur().spd();
    res.schur_asymmetry = sys.schur().asymmetry;
    res.offline_seconds = sys.build_seconds();

    const Index n_samples = n_steps / opt.sample_stride + 1 + (n_steps % opt.sample_stride ? 1 : 0);
    const Index ng = sys.problem().n_gamma();
    res.states1.resize(sys.problem().sub1.node_count(), n_samples);
    res.states2.resize(sys.problem().sub2.node_count(), n_samples);
    res.lambda.resize(ng, n_samples);

    // Weighting of the mismatch by the trace mass and multiplier basis.
    const Matrix& g1 = sys.problem().ops1.G_gamma;
    const Matrix weight = sys.formulation().reduced_multiplier ? Matrix(sys.multiplier_basis().transpose() * g1) : g1;

    CoupledState st = sys.initial_state();
    Index col = 0;
    for (Index n = 0; n <= n_steps; ++n) {
        const double tn = t[static_cast<std::size_t>(n)];
        const double tprev = n > 0 ? t[static_cast<std::size_t>(n - 1)] : tn;
        const double tnext = n < n_steps ? t[static_cast<std::size_t>(n + 1)] : tn;
        const StepRhs rhs = sys.compute_rhs(st, tn, tprev, tnext);
        const Vector lambda = sys.solve_multiplier(rhs);
        if (n % opt.sample_stride == 0 || n == n_steps) {
            res.sample_steps.push_back(n);
            res.sample_times.push_back(tn);
            res.states1.col(col) = sys.lift(1, st.u1, tn);
            res.states2.col(col) = sys.lift(2, st.u2, tn);
            res.lambda.col(col) = sys.multiplier_full(lambda);
            ++col;
        }
        if (n == n_steps) break;
        const Velocities v = sys.velocities(rhs, lambda);
        const Vector mismatch = sys.interface_residual(v);
        res.step_times.push_back(tn);
        res.residual_max.push_back(mismatch.size() ? mismatch.cwiseAbs().maxCoeff() : 0.0);
        res.residual_weighted.push_back((weight * mismatch).norm());
        res.rhs_norm.push_back(sys.multiplier_rhs(rhs).norm());
        const double h = tnext - tn;
        st.u1 += h * v.u1;
        st.u2 += h * v.u2;
        if (!st.u1.allFinite() || !st.u2.allFinite())
            throw InstabilityError(res.formulation + ": state became non-finite at step " + std::to_string(n + 1), n + 1);
    }
    res.online_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace ivrrom
