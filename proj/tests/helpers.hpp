#pragma once

#include <vector>

#include "elastntd/boundary.hpp"
#include "elastntd/fem.hpp"
#include "elastntd/mesh.hpp"
#include "elastntd/rng.hpp"

namespace elastntd::testing {

inline Load random_load(const BoundaryLoadBasis& basis, std::uint64_t seed, std::uint64_t index) {
    Eigen::VectorXd c(basis.size());
    for (int i = 0; i < basis.size(); ++i)
        c[i] = uniform(seed, index, static_cast<std::uint64_t>(i), -1.0, 1.0);
    return Load{c};
}

inline Eigen::VectorXd random_subdomain_values(int n, double lo, double hi, std::uint64_t seed,
                                               std::uint64_t index) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = uniform(seed, index, static_cast<std::uint64_t>(i), lo, hi);
    return v;
}

// Disjoint-set union, used as an independent connectivity oracle against the
// library's breadth-first traversal.
struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

inline int dsu_component_count(const Mesh& mesh, const std::vector<int>& region) {
    std::vector<char> in(mesh.n_elements(), 0);
    for (int e : region) in[e] = 1;
    Dsu dsu(mesh.n_elements());
    auto nbr = element_neighbors(mesh);
    for (int e : region)
        for (int n : nbr[e])
            if (n >= 0 && in[n]) dsu.unite(e, n);
    std::vector<int> roots;
    for (int e : region) roots.push_back(dsu.find(e));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return static_cast<int>(roots.size());
}

}  // namespace elastntd::testing
