#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace elastntd {

enum class BoundaryTag { Neumann, Dirichlet };
enum class Side { Bottom, Right, Top, Left };

constexpr int kOutsideSupport = 0;  // element_subdomain value for cells not in any subdomain

struct BoundaryEdge {
    int a = -1, b = -1;       // node indices, ordered along the owning element's CCW loop
    BoundaryTag tag = BoundaryTag::Neumann;
    int element = -1;         // the unique element owning this edge
};

/// Triangulated rectangle with tagged boundary and per-element subdomain labels.
/// Immutable after construction; safe to share across threads.
struct Mesh {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> elements;  // CCW vertex triples
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<int> element_subdomain;        // kOutsideSupport or 1..N

    // Structured-grid metadata, set by build_rect_mesh. Refinement and
    // cell-index helpers require it.
    int nx = 0, ny = 0;
    Side dirichlet_side = Side::Bottom;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_elements() const { return static_cast<int>(elements.size()); }

    double element_area(int e) const;
    Eigen::Vector2d element_centroid(int e) const;

    // Grid cell owning element e (two triangles per cell).
    int cell_of_element(int e) const { return e / 2; }

    void check_invariants() const;  // throws std::runtime_error on violation
};

/// Right-diagonal triangulation of the unit square with nx*ny cells.
/// Edges on `dirichlet_side` are tagged Dirichlet, all others Neumann.
Mesh build_rect_mesh(int nx, int ny, Side dirichlet_side);

/// Uniformly refined copy (each cell split in four); subdomain labels inherited.
Mesh refine(const Mesh& mesh);

/// Elements of the refined mesh descending from base element `e`.
std::vector<int> refined_children(const Mesh& base, int e);

/// Map an element set on `base` to the corresponding set on the refined mesh.
std::vector<int> refine_region(const Mesh& base, const std::vector<int>& region);

struct Partition {
    int count = 0;                                     // N
    std::vector<std::vector<int>> subdomain_elements;  // per j (0-based), sorted
    std::vector<bool> touches_support_boundary;        // per j (0-based)
    std::vector<int> element_label;                    // per element, kOutsideSupport or 1..N

    const std::vector<int>& elements_of(int j) const;  // j is 1-based
    bool touches_boundary(int j) const;                // j is 1-based
};

/// Partition the mesh into px*py rectangular blocks of cells.
/// Requires px | nx, py | ny. Blocks are numbered row-major from the bottom-left,
/// j = 1..px*py.
Partition grid_partition(const Mesh& mesh, int px, int py);

enum class ProbeRegionErrorCode { Overlap, DisconnectedComplement, NoNeumannAccess };

class ProbeRegionError : public std::runtime_error {
  public:
    ProbeRegionError(ProbeRegionErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ProbeRegionErrorCode code() const { return code_; }

  private:
    ProbeRegionErrorCode code_;
};

struct ProbeRegions {
    std::vector<int> d1_elements;
    std::vector<int> d2_elements;
};

/// Validates the probe-region side conditions:
///   - closures disjoint (element sets share no node),
///   - complement of the union edge-connected,
///   - complement has at least one Neumann boundary edge.
/// Throws ProbeRegionError with a distinct code per violated condition.
ProbeRegions validate_probe_regions(const Mesh& mesh, const std::vector<int>& d1,
                                    const std::vector<int>& d2);

/// Per-element neighbor triple across edges (i0,i1),(i1,i2),(i2,i0); -1 at the boundary.
std::vector<std::array<int, 3>> element_neighbors(const Mesh& mesh);

/// True if `region` is edge-connected (empty regions count as connected).
bool region_connected(const Mesh& mesh, const std::vector<int>& region);

/// Elements of the full mesh, 0..n-1.
std::vector<int> all_elements(const Mesh& mesh);

/// Elements of grid cells; each cell index c contributes elements 2c and 2c+1.
std::vector<int> elements_of_cells(const Mesh& mesh, const std::vector<int>& cells);

}  // namespace elastntd
