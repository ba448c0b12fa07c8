#pragma once

/// Concrete problem set-ups: the solid body rotation benchmark, manufactured
/// solutions with nonzero time-dependent boundary data, and time-step helpers.

#include "ivrrom/assembly.hpp"
#include "ivrrom/fields.hpp"
#include "ivrrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ivrrom {

class ProblemError : public Error {
public:
    using Error::Error;
};

struct ProblemConfig {
    std::string name;
    Index nx = 64;
    Index ny = 64;
    Rect rect{};
    double x_split = 0.5;
    DirichletSides sides{};
    FieldSpec fields;
    double final_time = 2.0 * std::numbers::pi;
    double dt = 1.684e-3;
    Index snapshot_stride = 1;
    ScalarField exact;  // set by manufactured problems only

    void validate() const {
        if (!(dt > 0.0)) throw ProblemError("time step must be positive");
        if (!(final_time > 0.0)) throw ProblemError("final time must be positive");
        if (snapshot_stride < 1) throw ProblemError("snapshot stride must be at least 1");
        if (!(fields.kappa1 > 0.0) || !(fields.kappa2 > 0.0)) throw ProblemError("diffusion must be positive");
    }

    Mesh mesh() const { return Mesh(nx, ny, rect); }
};

/// Number of forward-Euler steps to reach final_time; the last step is truncated.
inline Index step_count(double final_time, double dt) {
    return static_cast<Index>(std::ceil(final_time / dt * (1.0 - 1e-12)));
}

/// t_0 = 0, t_n = n dt, t_N = final_time exactly.
inline std::vector<double> time_grid(double final_time, double dt) {
    const Index n = step_count(final_time, dt);
    std::vector<double> t(static_cast<std::size_t>(n + 1));
    for (Index k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
    t[static_cast<std::size_t>(n)] = final_time;
    return t;
}

/// Slotted cylinder, cone and smooth hump of radius 0.15 on the unit square.
inline double leveque_initial_condition(double x, double y) {
    constexpr double r0 = 0.15;
    const auto dist = [](double x, double y, double cx, double cy) {
        return std::hypot(x - cx, y - cy) / r0;
    };
    const double dc = dist(x, y, 0.5, 0.75);
    if (dc <= 1.0) {
        if (std::abs(x - 0.5) >= 0.025 || y >= 0.85) return 1.0;
        return 0.0;
    }
    const double dk = dist(x, y, 0.5, 0.25);
    if (dk <= 1.0) return 1.0 - dk;
    const double dh = dist(x, y, 0.25, 0.5);
    if (dh <= 1.0) return 0.25 * (1.0 + std::cos(std::numbers::pi * std::min(dh, 1.0)));
    return 0.0;
}

/// Solid body rotation about (0.5, 0.5), homogeneous Dirichlet data, no source.
inline ProblemConfig solid_body_rotation_config(double kappa1, double kappa2, Index nx, double dt = 1.684e-3) {
    if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw ProblemError("solid body rotation: diffusion must be positive");
    ProblemConfig cfg;
    cfg.name = "solid_body_rotation";
    cfg.nx = nx;
    cfg.ny = nx;
    cfg.fields.kappa1 = kappa1;
    cfg.fields.kappa2 = kappa2;
    cfg.fields.x_split = 0.5;
    cfg.fields.advection = [](double x, double y, double) { return std::array<double, 2>{0.5 - y, x - 0.5}; };
    cfg.fields.initial = leveque_initial_condition;
    cfg.final_time = 2.0 * std::numbers::pi;
    cfg.dt = dt;
    return cfg;
}

/// dt = safety / (max|a|/h + 4 max(kappa)/h^2), with |a| sampled at the nodes at t = 0.
inline double cfl_time_step(const Mesh& mesh, const FieldSpec& fields, double safety) {
    if (!(safety > 0.0) || safety > 1.0) throw ProblemError("cfl_time_step: safety must lie in (0, 1]");
    double amax = 0.0;
    for (Index n = 0; n < mesh.node_count(); ++n) {
        const auto a = fields.a(mesh.x(n), mesh.y(n), 0.0);
        amax = std::max(amax, std::hypot(a[0], a[1]));
    }
    const double h = mesh.h();
    const double denom = amax / h + 4.0 * std::max(fields.kappa1, fields.kappa2) / (h * h);
    if (!(denom > 0.0)) throw ProblemError("cfl_time_step: no transport and no diffusion");
    return safety / denom;
}

/// Manufactured problems with known exact solutions:
///   "diffusion"            u = e^-t (sin(pi x) sin(pi y) + x + 2y), kappa = 1, a = 0
///   "advection_diffusion"  same u, kappa = 0.1, a = (1, 0.5)
///   "transmission"         u = e^-t w(x) (1 + y), kappa1 = 1, kappa2 = 0.5, kappa w' = 1
inline ProblemConfig manufactured_problem(const std::string& id, Index nx = 8, double dt = 0.0) {
    using std::numbers::pi;
    ProblemConfig cfg;
    cfg.name = id;
    cfg.nx = nx;
    cfg.ny = nx;
    cfg.final_time = 0.1;
    FieldSpec& f = cfg.fields;
    if (id == "diffusion" || id == "advection_diffusion") {
        const double kappa = id == "diffusion" ? 1.0 : 0.1;
        const double ax = id == "diffusion" ? 0.0 : 1.0;
        const double ay = id == "diffusion" ? 0.0 : 0.5;
        f.kappa1 = f.kappa2 = kappa;
        if (id == "advection_diffusion")
            f.advection = [ax, ay](double, double, double) { return std::array<double, 2>{ax, ay}; };
        const auto u = [](double x, double y, double t) {
            return std::exp(-t) * (std::sin(pi * x) * std::sin(pi * y) + x + 2.0 * y);
        };
        f.source = [=](double x, double y, double t) {
            const double e = std::exp(-t);
            const double ss = std::sin(pi * x) * std::sin(pi * y);
            const double ux = e * (pi * std::cos(pi * x) * std::sin(pi * y) + 1.0);
            const double uy = e * (pi * std::sin(pi * x) * std::cos(pi * y) + 2.0);
            return -u(x, y, t) + kappa * 2.0 * pi * pi * e * ss + ax * ux + ay * uy;
        };
        f.dirichlet = u;
        f.dirichlet_rate = [=](double x, double y, double t) { return -u(x, y, t); };
        f.initial = [=](double x, double y) { return u(x, y, 0.0); };
        cfg.exact = u;
    } else if (id == "transmission") {
        const double k1 = 1.0, k2 = 0.5;
        f.kappa1 = k1;
        f.kappa2 = k2;
        const auto w = [=](double x) { return x < 0.5 ? x / k1 : 0.5 / k1 + (x - 0.5) / k2; };
        const auto u = [=](double x, double y, double t) { return std::exp(-t) * w(x) * (1.0 + y); };
        f.source = [=](double x, double y, double t) { return -u(x, y, t); };
        f.dirichlet = u;
        f.dirichlet_rate = [=](double x, double y, double t) { return -u(x, y, t); };
        f.initial = [=](double x, double y) { return u(x, y, 0.0); };
        cfg.exact = u;
    } else {
        throw ProblemError("manufactured_problem: unknown id '" + id + "'");
    }
    cfg.dt = dt > 0.0 ? dt : cfl_time_step(cfg.mesh(), f, 0.5);
    return cfg;
}

/// Dirichlet data and its time derivative on one (sub)domain. Without an
/// analytic rate the derivative is the backward difference, and the first
/// step reuses the rate of the second.
class DirichletSampler {
public:
    DirichletSampler(const SubdomainMesh& sub, const FieldSpec& fields) : sub_(&sub), fields_(&fields) {}

    Vector g(double t) const { return dirichlet_values(*sub_, fields_->dirichlet, t); }

    Vector gdot(double t, double t_prev, double t_next) const {
        if (!fields_->has_dirichlet()) return Vector::Zero(sub_->n_dirichlet());
        if (fields_->dirichlet_rate) return dirichlet_values(*sub_, fields_->dirichlet_rate, t);
        if (t_prev < t) return (g(t) - g(t_prev)) / (t - t_prev);
        return (g(t_next) - g(t)) / (t_next - t);
    }

private:
    const SubdomainMesh* sub_;
    const FieldSpec* fields_;
};

}  // namespace ivrrom
