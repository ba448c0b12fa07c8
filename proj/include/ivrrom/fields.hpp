#pragma once

#include "ivrrom/numerics.hpp"

#include <array>
#include <functional>

namespace ivrrom {

using ScalarField = std::function<double(double x, double y, double t)>;
using VectorField = std::function<std::array<double, 2>(double x, double y, double t)>;
using InitialField = std::function<double(double x, double y)>;

/// Coefficients and data of  u_t - div(kappa grad u - a u) = f  with
/// Dirichlet data g on the outer boundary. Empty callables mean zero.
struct FieldSpec {
    double kappa1 = 1.0;  // diffusion left of x_split, length^2/time
    double kappa2 = 1.0;  // diffusion right of x_split
    double x_split = 0.5;
    VectorField advection;
    bool autonomous_advection = true;  // a does not depend on t
    ScalarField source;
    ScalarField dirichlet;
    ScalarField dirichlet_rate;  // analytic dg/dt; empty -> backward difference
    InitialField initial;

    double kappa_at(double x) const { return x < x_split ? kappa1 : kappa2; }

    std::array<double, 2> a(double x, double y, double t) const {
        return advection ? advection(x, y, t) : std::array<double, 2>{0.0, 0.0};
    }
    double f(double x, double y, double t) const { return source ? source(x, y, t) : 0.0; }
    double g(double x, double y, double t) const { return dirichlet ? dirichlet(x, y, t) : 0.0; }
    double u0(double x, double y) const { return initial ? initial(x, y) : 0.0; }

    bool has_source() const { return static_cast<bool>(source); }
    bool has_dirichlet() const { return static_cast<bool>(dirichlet); }
    bool has_advection() const { return static_cast<bool>(advection); }
};

}  // namespace ivrrom
