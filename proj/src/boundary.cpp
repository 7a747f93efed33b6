#include "elastntd/boundary.hpp"

#include <set>
#include <stdexcept>

namespace elastntd {

BoundaryLoadBasis::BoundaryLoadBasis(const Mesh& mesh) {
    std::set<int> neumann_nodes;
    for (const auto& be : mesh.boundary_edges) {
        if (be.tag == BoundaryTag::Neumann) {
            neumann_nodes.insert(be.a);
            neumann_nodes.insert(be.b);
        }
    }
    if (neumann_nodes.empty()) throw std::invalid_argument("BoundaryLoadBasis: no Neumann edges");

    index_of_dof_.assign(2 * mesh.n_nodes(), -1);
    for (int n : neumann_nodes) {
        for (int c = 0; c < 2; ++c) {
            index_of_dof_[2 * n + c] = static_cast<int>(entries_.size());
            entries_.push_back({n, c});
        }
    }

    gram_ = Eigen::MatrixXd::Zero(size(), size());
    for (const auto& be : mesh.boundary_edges) {
        if (be.tag != BoundaryTag::Neumann) continue;
        double len = (mesh.nodes[be.b] - mesh.nodes[be.a]).norm();
        for (int c = 0; c < 2; ++c) {
            int p = index_of_dof_[2 * be.a + c];
            int q = index_of_dof_[2 * be.b + c];
            gram_(p, p) += len / 3.0;
            gram_(q, q) += len / 3.0;
            gram_(p, q) += len / 6.0;
            gram_(q, p) += len / 6.0;
        }
    }
}

BoundaryLoadBasis BoundaryLoadBasis::permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != size())
        throw std::invalid_argument("BoundaryLoadBasis::permuted: bad permutation size");
    BoundaryLoadBasis out;
    out.entries_.resize(entries_.size());
    out.index_of_dof_.assign(index_of_dof_.size(), -1);
    out.gram_ = Eigen::MatrixXd::Zero(size(), size());
    for (int p = 0; p < size(); ++p) {
        out.entries_[p] = entries_[perm[p]];
        out.index_of_dof_[2 * out.entries_[p].node + out.entries_[p].comp] = p;
    }
    for (int p = 0; p < size(); ++p)
        for (int q = 0; q < size(); ++q) out.gram_(p, q) = gram_(perm[p], perm[q]);
    return out;
}

int BoundaryLoadBasis::index_of_dof(int dof) const {
    if (dof < 0 || dof >= static_cast<int>(index_of_dof_.size())) return -1;
    return index_of_dof_[dof];
}

double BoundaryLoadBasis::inner(const Load& g, const Load& h) const {
    return g.coeff.dot(gram_ * h.coeff);
}

double BoundaryLoadBasis::norm(const Load& g) const { return std::sqrt(std::max(0.0, inner(g, g))); }

Eigen::VectorXd rhs_from_load(int n_nodes, const BoundaryLoadBasis& basis, const Load& g) {
    if (g.coeff.size() != basis.size())
        throw std::invalid_argument("rhs_from_load: load size does not match basis");
    Eigen::VectorXd weighted = basis.gram() * g.coeff;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n_nodes);
    const auto& entries = basis.entries();
    for (int p = 0; p < basis.size(); ++p) rhs[2 * entries[p].node + entries[p].comp] = weighted[p];
    return rhs;
}

Eigen::VectorXd boundary_trace(const BoundaryLoadBasis& basis, const Eigen::VectorXd& full) {
    Eigen::VectorXd t(basis.size());
    const auto& entries = basis.entries();
    for (int p = 0; p < basis.size(); ++p) t[p] = full[2 * entries[p].node + entries[p].comp];
    return t;
}

double boundary_pairing(const BoundaryLoadBasis& basis, const Load& g, const Eigen::VectorXd& trace) {
    return g.coeff.dot(basis.gram() * trace);
}

}  // namespace elastntd
