#pragma once

/// Error measures against the single-domain benchmark and interface traces.

#include "ivrrom/fom.hpp"
#include "ivrrom/ivr.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace ivrrom {

class MetricsError : public Error {
public:
    using Error::Error;
};

/// Broken discrete L2 norm weights: the free-DoF mass matrix of each side.
struct VNorm {
    Matrix M1, M2;

    explicit VNorm(const PartitionedProblem& p) : M1(p.ops1.M_D), M2(p.ops2.M_D) {}
    VNorm(Matrix m1, Matrix m2) : M1(std::move(m1)), M2(std::move(m2)) {}

    /// Squared norm of a pair of free-DoF vectors.
    double squared(const Vector& v1, const Vector& v2) const {
        if (v1.size() != M1.rows() || v2.size() != M2.rows()) throw MetricsError("V-norm: vector length mismatch");
        return v1.dot(M1 * v1) + v2.dot(M2 * v2);
    }
};

/// eps = ||{p1, p2} - {s1, s2}||_V / ||{s1, s2}||_V over the free DoFs.
/// Inputs may be full local-order vectors; Dirichlet rows are ignored.
inline double relative_error(const VNorm& norm, const Vector& p1, const Vector& p2, const Vector& s1,
                             const Vector& s2) {
    const Index n1 = norm.M1.rows(), n2 = norm.M2.rows();
    if (p1.size() < n1 || p2.size() < n2 || s1.size() < n1 || s2.size() < n2)
        throw MetricsError("relative_error: vector shorter than the free DoF count");
    const double den = norm.squared(s1.head(n1), s2.head(n2));
    if (!(den > 0.0)) throw MetricsError("relative_error: benchmark has zero norm");
    const double num = norm.squared(p1.head(n1) - s1.head(n1), p2.head(n2) - s2.head(n2));
    return std::sqrt(num / den);
}

/// max |p - s| / max |s| over both sides.
inline double relative_max_error(const Vector& p1, const Vector& p2, const Vector& s1, const Vector& s2) {
    const double den = std::max(s1.cwiseAbs().maxCoeff(), s2.cwiseAbs().maxCoeff());
    if (!(den > 0.0)) throw MetricsError("relative_max_error: benchmark is zero");
    return std::max((p1 - s1).cwiseAbs().maxCoeff(), (p2 - s2).cwiseAbs().maxCoeff()) / den;
}

struct ErrorSeries {
    std::string formulation;
    std::vector<Index> steps;
    std::vector<double> times;
    std::vector<double> eps;
    std::vector<double> max_rel;
};

/// Compares every sample of a partitioned run with the benchmark trajectory
/// at the steps both store. Step 0 uses the trajectory's initial state.
inline ErrorSeries error_series(const SimulationResult& res, const Trajectory& bench, const PartitionedProblem& p) {
    const VNorm norm(p);
    ErrorSeries out;
    out.formulation = res.formulation;
    for (std::size_t k = 0; k < res.sample_steps.size(); ++k) {
        const Index step = res.sample_steps[k];
        const Vector* s = nullptr;
        Vector col;
        if (step == 0) {
            s = &bench.initial_state;
        } else {
            const auto it = std::find(bench.steps.begin(), bench.steps.end(), step);
            if (it == bench.steps.end()) continue;
            col = bench.states.col(static_cast<Index>(it - bench.steps.begin()));
            s = &col;
        }
        const Vector s1 = gather_local(p.sub1, *s), s2 = gather_local(p.sub2, *s);
        const Index c = static_cast<Index>(k);
        const Vector p1 = res.states1.col(c), p2 = res.states2.col(c);
        out.steps.push_back(step);
        out.times.push_back(res.sample_times[k]);
        out.eps.push_back(relative_error(norm, p1, p2, s1, s2));
        out.max_rel.push_back(relative_max_error(p1, p2, s1, s2));
    }
    if (out.steps.empty()) throw MetricsError("error_series: no common sample steps");
    return out;
}

/// (y, u) pairs along the full interface column, bottom to top, from a
/// full local-order state of one side.
inline std::pair<std::vector<double>, std::vector<double>> interface_trace(const Vector& state,
                                                                           const SubdomainMesh& sub) {
    if (state.size() != sub.node_count()) throw MetricsError("interface_trace: state length mismatch");
    std::pair<std::vector<double>, std::vector<double>> out;
    for (Index node : sub.interface_column_nodes()) {
        const Index d = sub.dof_of_node(node);
        out.first.push_back(sub.y(d));
        out.second.push_back(state(d));
    }
    return out;
}

}  // namespace ivrrom
