#pragma once

/// Uniform quadrilateral meshes of a rectangle, their split into two
/// subdomains along a vertical grid line, and the (interface, interior,
/// Dirichlet) degree-of-freedom ordering used by every operator.

#include "ivrrom/numerics.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace ivrrom {

class MeshError : public Error {
public:
    using Error::Error;
};

struct Rect {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

/// Uniform mesh of square elements; nodes are numbered row by row,
/// node(i, j) = j * (nx + 1) + i, element nodes counterclockwise from the
/// lower-left corner.
class Mesh {
public:
    Mesh(Index nx, Index ny, Rect rect) : nx_(nx), ny_(ny), rect_(rect) {
        if (nx < 1 || ny < 1) throw MeshError("mesh needs at least one element per direction");
        const double hx = (rect.x1 - rect.x0) / static_cast<double>(nx);
        const double hy = (rect.y1 - rect.y0) / static_cast<double>(ny);
        if (!(hx > 0.0) || !(hy > 0.0)) throw MeshError("mesh rectangle has non-positive extent");
        if (std::abs(hx - hy) > 1e-12 * hx) throw MeshError("mesh elements must be squares");
        h_ = hx;
    }

    Index nx() const noexcept { return nx_; }
    Index ny() const noexcept { return ny_; }
    const Rect& rect() const noexcept { return rect_; }
    double h() const noexcept { return h_; }

    Index node_count() const noexcept { return (nx_ + 1) * (ny_ + 1); }
    Index element_count() const noexcept { return nx_ * ny_; }

    Index node(Index i, Index j) const noexcept { return j * (nx_ + 1) + i; }
    Index column_of(Index node) const noexcept { return node % (nx_ + 1); }
    Index row_of(Index node) const noexcept { return node / (nx_ + 1); }

    double x(Index node) const noexcept { return rect_.x0 + h_ * static_cast<double>(column_of(node)); }
    double y(Index node) const noexcept { return rect_.y0 + h_ * static_cast<double>(row_of(node)); }

    std::array<Index, 4> element_nodes(Index e) const noexcept {
        const Index i = e % nx_;
        const Index j = e / nx_;
        return {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
    }

    /// Lower-left corner of element e.
    std::pair<double, double> element_origin(Index e) const noexcept {
        return {rect_.x0 + h_ * static_cast<double>(e % nx_), rect_.y0 + h_ * static_cast<double>(e / nx_)};
    }

private:
    Index nx_, ny_;
    Rect rect_;
    double h_ = 0.0;
};

inline Mesh build_uniform_mesh(Index nx, Index ny, Rect rect = {}) { return Mesh(nx, ny, rect); }

enum class NodeKind { Interface, Interior, Dirichlet };

/// Which outer sides of the rectangle carry Dirichlet data.
struct DirichletSides {
    bool left = true, right = true, bottom = true, top = true;
};

/// A column range of a parent mesh with its nodes classified and ordered
/// as (interface, interior, Dirichlet). Interface nodes are sorted bottom
/// to top; interior and Dirichlet nodes follow the parent numbering.
class SubdomainMesh {
public:
    /// side: 1 (left of the interface), 2 (right), or 0 for the whole domain
    /// without an interface.
    SubdomainMesh(const Mesh& parent, Index col_begin, Index col_end, int side, DirichletSides sides)
        : parent_(parent), col_begin_(col_begin), col_end_(col_end), side_(side) {
        std::vector<Index> iface, interior, dirichlet;
        const Index iface_col = side == 1 ? col_end : (side == 2 ? col_begin : -1);
        for (Index j = 0; j <= parent.ny(); ++j) {
            for (Index i = col_begin; i <= col_end; ++i) {
                const Index n = parent.node(i, j);
                const bool on_bottom = j == 0 && sides.bottom;
                const bool on_top = j == parent.ny() && sides.top;
                const bool on_left = i == 0 && sides.left;
                const bool on_right = i == parent.nx() && sides.right;
                if (i == iface_col) {
                    // Interface endpoints on a Dirichlet side belong to the Dirichlet set.
                    (on_bottom || on_top ? dirichlet : iface).push_back(n);
                } else if (on_bottom || on_top || on_left || on_right) {
                    dirichlet.push_back(n);
                } else {
                    interior.push_back(n);
                }
            }
        }
        n_gamma_ = static_cast<Index>(iface.size());
        n_interior_ = static_cast<Index>(interior.size());
        n_dirichlet_ = static_cast<Index>(dirichlet.size());
        node_of_dof_.reserve(iface.size() + interior.size() + dirichlet.size());
        for (const auto* list : {&iface, &interior, &dirichlet})
            node_of_dof_.insert(node_of_dof_.end(), list->begin(), list->end());
        dof_of_node_.assign(static_cast<std::size_t>(parent.node_count()), -1);
        for (Index d = 0; d < static_cast<Index>(node_of_dof_.size()); ++d)
            dof_of_node_[static_cast<std::size_t>(node_of_dof_[static_cast<std::size_t>(d)])] = d;
        for (Index j = 0; j < parent.ny(); ++j)
            for (Index i = col_begin; i < col_end; ++i) elements_.push_back(j * parent.nx() + i);
    }

    const Mesh& parent() const noexcept { return parent_; }
    int side() const noexcept { return side_; }
    Index col_begin() const noexcept { return col_begin_; }
    Index col_end() const noexcept { return col_end_; }

    Index n_gamma() const noexcept { return n_gamma_; }
    Index n_interior() const noexcept { return n_interior_; }
    Index n_dirichlet() const noexcept { return n_dirichlet_; }
    Index n_free() const noexcept { return n_gamma_ + n_interior_; }
    Index node_count() const noexcept { return n_free() + n_dirichlet_; }

    NodeKind kind(Index dof) const noexcept {
        if (dof < n_gamma_) return NodeKind::Interface;
        if (dof < n_free()) return NodeKind::Interior;
        return NodeKind::Dirichlet;
    }

    /// Parent node id of a local DoF.
    Index node_of_dof(Index dof) const { return node_of_dof_[static_cast<std::size_t>(dof)]; }
    /// Local DoF of a parent node, or -1 when the node is outside the subdomain.
    Index dof_of_node(Index node) const { return dof_of_node_[static_cast<std::size_t>(node)]; }

    const std::vector<Index>& node_of_dof() const noexcept { return node_of_dof_; }
    const std::vector<Index>& elements() const noexcept { return elements_; }

    double x(Index dof) const { return parent_.x(node_of_dof(dof)); }
    double y(Index dof) const { return parent_.y(node_of_dof(dof)); }

    /// Parent node ids of the full interface column, bottom to top (includes
    /// endpoints that were classified Dirichlet).
    std::vector<Index> interface_column_nodes() const {
        std::vector<Index> out;
        if (side_ == 0) return out;
        const Index c = side_ == 1 ? col_end_ : col_begin_;
        for (Index j = 0; j <= parent_.ny(); ++j) out.push_back(parent_.node(c, j));
        return out;
    }

private:
    Mesh parent_;
    Index col_begin_, col_end_;
    int side_;
    Index n_gamma_ = 0, n_interior_ = 0, n_dirichlet_ = 0;
    std::vector<Index> node_of_dof_;
    std::vector<Index> dof_of_node_;
    std::vector<Index> elements_;
};

/// Split at the vertical grid line x = x_split; side 1 lies to the left.
inline std::pair<SubdomainMesh, SubdomainMesh> partition_at(const Mesh& mesh, double x_split,
                                                            DirichletSides sides = {}) {
    const double c = (x_split - mesh.rect().x0) / mesh.h();
    const double c_round = std::round(c);
    if (std::abs(c - c_round) >= 1e-12)
        throw MeshError("partition_at: split line is not a grid line");
    const auto col = static_cast<Index>(c_round);
    if (col < 1 || col > mesh.nx() - 1) throw MeshError("partition_at: split line must be strictly inside the mesh");
    return {SubdomainMesh(mesh, 0, col, 1, sides), SubdomainMesh(mesh, col, mesh.nx(), 2, sides)};
}

/// The whole mesh as one domain (no interface), for single-domain solves.
inline SubdomainMesh whole_domain(const Mesh& mesh, DirichletSides sides = {}) {
    return SubdomainMesh(mesh, 0, mesh.nx(), 0, sides);
}

}  // namespace ivrrom
