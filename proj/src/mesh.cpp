#include "elastntd/mesh.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <utility>

namespace elastntd {

double Mesh::element_area(int e) const {
    const auto& t = elements.at(e);
    const Eigen::Vector2d& p0 = nodes[t[0]];
    const Eigen::Vector2d& p1 = nodes[t[1]];
    const Eigen::Vector2d& p2 = nodes[t[2]];
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

Eigen::Vector2d Mesh::element_centroid(int e) const {
    const auto& t = elements.at(e);
    return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
}

void Mesh::check_invariants() const {
    for (int e = 0; e < n_elements(); ++e) {
        if (element_area(e) <= 0.0)
            throw std::runtime_error("mesh: element " + std::to_string(e) +
                                     " has non-positive signed area");
    }
    // Each boundary edge must be an edge of exactly one element, and the
    // tagged edges must cover the whole topological boundary.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : elements) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    std::set<std::pair<int, int>> tagged;
    bool has_neumann = false, has_dirichlet = false;
    for (const auto& be : boundary_edges) {
        auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
        auto it = edge_count.find(key);
        if (it == edge_count.end() || it->second != 1)
            throw std::runtime_error("mesh: tagged edge is not a boundary edge of exactly one element");
        if (!tagged.insert(key).second)
            throw std::runtime_error("mesh: boundary edge tagged twice");
        (be.tag == BoundaryTag::Neumann ? has_neumann : has_dirichlet) = true;
    }
    for (const auto& [key, cnt] : edge_count) {
        if (cnt == 1 && tagged.find(key) == tagged.end())
            throw std::runtime_error("mesh: boundary edge left untagged");
    }
    if (!has_dirichlet) throw std::runtime_error("mesh: Dirichlet part of the boundary is empty");
    if (!has_neumann) throw std::runtime_error("mesh: Neumann part of the boundary is empty");
    if (element_subdomain.size() != elements.size())
        throw std::runtime_error("mesh: element_subdomain size mismatch");
}

Mesh build_rect_mesh(int nx, int ny, Side dirichlet_side) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("build_rect_mesh: nx and ny must be >= 2");

    Mesh m;
    m.nx = nx;
    m.ny = ny;
    m.dirichlet_side = dirichlet_side;

    const int npx = nx + 1;
    auto vid = [npx](int i, int j) { return j * npx + i; };

    m.nodes.reserve(static_cast<size_t>(npx) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes.emplace_back(double(i) / nx, double(j) / ny);

    // Two CCW triangles per cell, diagonal from the cell's lower-left corner.
    m.elements.reserve(2 * static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int v00 = vid(i, j), v10 = vid(i + 1, j);
            int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.elements.push_back({v00, v10, v11});  // lower triangle
            m.elements.push_back({v00, v11, v01});  // upper triangle
        }
    }
    m.element_subdomain.assign(m.elements.size(), kOutsideSupport);

    auto tag_for = [dirichlet_side](Side s) {
        return s == dirichlet_side ? BoundaryTag::Dirichlet : BoundaryTag::Neumann;
    };
    auto cell = [nx](int i, int j) { return j * nx + i; };
    for (int i = 0; i < nx; ++i) {
        m.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), tag_for(Side::Bottom), 2 * cell(i, 0)});
        m.boundary_edges.push_back(
            {vid(i + 1, ny), vid(i, ny), tag_for(Side::Top), 2 * cell(i, ny - 1) + 1});
    }
    for (int j = 0; j < ny; ++j) {
        m.boundary_edges.push_back(
            {vid(nx, j), vid(nx, j + 1), tag_for(Side::Right), 2 * cell(nx - 1, j)});
        m.boundary_edges.push_back({vid(0, j + 1), vid(0, j), tag_for(Side::Left), 2 * cell(0, j) + 1});
    }

    m.check_invariants();
    return m;
}

namespace {

// Children of base element e on the doubled grid. For the right-diagonal
// split the four fine triangles of a coarse triangle are known in closed form:
// fine cells are nested in coarse cells and the fine diagonals are parallel
// to the coarse one, so membership follows from the cell-local position.
std::array<int, 4> children_of(int base_nx, int e) {
    int cell = e / 2, tri = e % 2;
    int ix = cell % base_nx, iy = cell / base_nx;
    int fnx = 2 * base_nx;
    auto fine_elem = [fnx](int fx, int fy, int t) { return 2 * (fy * fnx + fx) + t; };
    int x0 = 2 * ix, y0 = 2 * iy;
    if (tri == 0) {
        // lower coarse triangle: lower fine triangles of subcells (0,0),(1,1)
        // plus both fine triangles of subcell (1,0)
        return {fine_elem(x0, y0, 0), fine_elem(x0 + 1, y0, 0), fine_elem(x0 + 1, y0, 1),
                fine_elem(x0 + 1, y0 + 1, 0)};
    }
    return {fine_elem(x0, y0, 1), fine_elem(x0, y0 + 1, 0), fine_elem(x0, y0 + 1, 1),
            fine_elem(x0 + 1, y0 + 1, 1)};
}

}  // namespace

Mesh refine(const Mesh& mesh) {
    if (mesh.nx < 2 || mesh.ny < 2)
        throw std::invalid_argument("refine: mesh lacks structured-grid metadata");
    Mesh fine = build_rect_mesh(2 * mesh.nx, 2 * mesh.ny, mesh.dirichlet_side);
    for (int e = 0; e < mesh.n_elements(); ++e)
        for (int c : children_of(mesh.nx, e)) fine.element_subdomain[c] = mesh.element_subdomain[e];
    return fine;
}

std::vector<int> refined_children(const Mesh& base, int e) {
    auto c = children_of(base.nx, e);
    return {c.begin(), c.end()};
}

std::vector<int> refine_region(const Mesh& base, const std::vector<int>& region) {
    std::vector<int> out;
    out.reserve(4 * region.size());
    for (int e : region)
        for (int c : children_of(base.nx, e)) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<int>& Partition::elements_of(int j) const {
    if (j < 1 || j > count) throw std::out_of_range("Partition: subdomain index out of range");
    return subdomain_elements[j - 1];
}

bool Partition::touches_boundary(int j) const {
    if (j < 1 || j > count) throw std::out_of_range("Partition: subdomain index out of range");
    return touches_support_boundary[j - 1];
}

Partition grid_partition(const Mesh& mesh, int px, int py) {
    if (mesh.nx < 2 || mesh.ny < 2)
        throw std::invalid_argument("grid_partition: mesh lacks structured-grid metadata");
    if (px < 1 || py < 1 || mesh.nx % px != 0 || mesh.ny % py != 0)
        throw std::invalid_argument("grid_partition: px, py must divide nx, ny");

    const int bw = mesh.nx / px, bh = mesh.ny / py;
    Partition p;
    p.count = px * py;
    p.subdomain_elements.resize(p.count);
    p.touches_support_boundary.assign(p.count, false);
    p.element_label.assign(mesh.n_elements(), kOutsideSupport);

    for (int iy = 0; iy < mesh.ny; ++iy) {
        for (int ix = 0; ix < mesh.nx; ++ix) {
            int bx = ix / bw, by = iy / bh;
            int j = by * px + bx;  // 0-based
            int cell = iy * mesh.nx + ix;
            p.subdomain_elements[j].push_back(2 * cell);
            p.subdomain_elements[j].push_back(2 * cell + 1);
            p.element_label[2 * cell] = j + 1;
            p.element_label[2 * cell + 1] = j + 1;
        }
    }
    for (auto& v : p.subdomain_elements) std::sort(v.begin(), v.end());

    // The union of all blocks is the whole domain, so the support boundary is
    // the domain boundary: a block touches it iff it contains a boundary row
    // or column of cells.
    for (int by = 0; by < py; ++by)
        for (int bx = 0; bx < px; ++bx)
            p.touches_support_boundary[by * px + bx] =
                (bx == 0 || by == 0 || bx == px - 1 || by == py - 1);

    return p;
}

std::vector<std::array<int, 3>> element_neighbors(const Mesh& mesh) {
    std::map<std::pair<int, int>, std::pair<int, int>> owner;  // edge -> (element, local edge)
    std::vector<std::array<int, 3>> nbr(mesh.n_elements(), {-1, -1, -1});
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& t = mesh.elements[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = owner.find(key);
            if (it == owner.end()) {
                owner[key] = {e, k};
            } else {
                nbr[e][k] = it->second.first;
                nbr[it->second.first][it->second.second] = e;
            }
        }
    }
    return nbr;
}

bool region_connected(const Mesh& mesh, const std::vector<int>& region) {
    if (region.empty()) return true;
    std::vector<char> in(mesh.n_elements(), 0), seen(mesh.n_elements(), 0);
    for (int e : region) in.at(e) = 1;
    auto nbr = element_neighbors(mesh);

    std::queue<int> q;
    q.push(region.front());
    seen[region.front()] = 1;
    size_t visited = 0;
    while (!q.empty()) {
        int e = q.front();
        q.pop();
        ++visited;
        for (int n : nbr[e]) {
            if (n >= 0 && in[n] && !seen[n]) {
                seen[n] = 1;
                q.push(n);
            }
        }
    }
    std::set<int> uniq(region.begin(), region.end());
    return visited == uniq.size();
}

std::vector<int> all_elements(const Mesh& mesh) {
    std::vector<int> v(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) v[e] = e;
    return v;
}

std::vector<int> elements_of_cells(const Mesh& mesh, const std::vector<int>& cells) {
    std::vector<int> out;
    out.reserve(2 * cells.size());
    const int n_cells = mesh.nx * mesh.ny;
    for (int c : cells) {
        if (c < 0 || c >= n_cells) throw std::out_of_range("elements_of_cells: cell index out of range");
        out.push_back(2 * c);
        out.push_back(2 * c + 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ProbeRegions validate_probe_regions(const Mesh& mesh, const std::vector<int>& d1,
                                    const std::vector<int>& d2) {
    for (int e : d1) (void)mesh.elements.at(e);
    for (int e : d2) (void)mesh.elements.at(e);
    if (d1.empty() || d2.empty())
        throw std::invalid_argument("validate_probe_regions: regions must be non-empty");

    // Closure-disjointness as node-disjointness of the element sets.
    std::set<int> nodes1, nodes2;
    for (int e : d1)
        for (int v : mesh.elements[e]) nodes1.insert(v);
    for (int e : d2)
        for (int v : mesh.elements[e]) nodes2.insert(v);
    for (int v : nodes1) {
        if (nodes2.count(v))
            throw ProbeRegionError(ProbeRegionErrorCode::Overlap,
                                   "probe regions overlap: closures share node " + std::to_string(v));
    }

    std::vector<char> in_union(mesh.n_elements(), 0);
    for (int e : d1) in_union[e] = 1;
    for (int e : d2) in_union[e] = 1;
    std::vector<int> complement;
    for (int e = 0; e < mesh.n_elements(); ++e)
        if (!in_union[e]) complement.push_back(e);

    if (complement.empty() || !region_connected(mesh, complement))
        throw ProbeRegionError(ProbeRegionErrorCode::DisconnectedComplement,
                               "complement of the probe regions is not connected");

    bool reaches_neumann = false;
    for (const auto& be : mesh.boundary_edges) {
        if (be.tag == BoundaryTag::Neumann && !in_union[be.element]) {
            reaches_neumann = true;
            break;
        }
    }
    if (!reaches_neumann)
        throw ProbeRegionError(ProbeRegionErrorCode::NoNeumannAccess,
                               "complement of the probe regions does not reach the Neumann boundary");

    ProbeRegions pr;
    pr.d1_elements = d1;
    pr.d2_elements = d2;
    std::sort(pr.d1_elements.begin(), pr.d1_elements.end());
    std::sort(pr.d2_elements.begin(), pr.d2_elements.end());
    return pr;
}

}  // namespace elastntd
