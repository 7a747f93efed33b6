#pragma once

#include <vector>

#include <Eigen/Dense>

#include "elastntd/mesh.hpp"

namespace elastntd {

/// Coefficient vector in a BoundaryLoadBasis: a discrete surface traction on
/// the Neumann boundary.
struct Load {
    Eigen::VectorXd coeff;
};

/// Vector hat functions on the Neumann boundary: one basis function per
/// (node on a Neumann edge, component) pair, ordered by node index then
/// component. Spans every continuous piecewise-linear vector field on the
/// Neumann part of the boundary.
class BoundaryLoadBasis {
  public:
    struct Entry {
        int node;
        int comp;  // 0 = x, 1 = y
    };

    explicit BoundaryLoadBasis(const Mesh& mesh);

    // Reordered copy, for representation-independence checks.
    BoundaryLoadBasis permuted(const std::vector<int>& perm) const;

    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Gram matrix of the basis in L2 on the Neumann boundary; symmetric
    /// positive definite.
    const Eigen::MatrixXd& gram() const { return gram_; }

    /// Basis index of displacement dof (2*node + comp), or -1.
    int index_of_dof(int dof) const;

    /// L2 inner product of two loads.
    double inner(const Load& g, const Load& h) const;
    double norm(const Load& g) const;

  private:
    BoundaryLoadBasis() = default;
    std::vector<Entry> entries_;
    Eigen::MatrixXd gram_;
    std::vector<int> index_of_dof_;
};

/// Full-dof right-hand-side vector of the traction load g: the weak-form
/// boundary term evaluated against every displacement hat function.
Eigen::VectorXd rhs_from_load(int n_nodes, const BoundaryLoadBasis& basis, const Load& g);

/// Boundary values of a full-dof field, in basis ordering.
Eigen::VectorXd boundary_trace(const BoundaryLoadBasis& basis, const Eigen::VectorXd& full);

/// L2 boundary pairing of a load with a trace vector: integral of g . t over
/// the Neumann boundary.
double boundary_pairing(const BoundaryLoadBasis& basis, const Load& g, const Eigen::VectorXd& trace);

}  // namespace elastntd
