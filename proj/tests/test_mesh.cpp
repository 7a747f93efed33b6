#include <doctest.h>

#include <set>

#include "elastntd/mesh.hpp"
#include "helpers.hpp"

using namespace elastntd;

TEST_SUITE("mesh") {

TEST_CASE("rect mesh counts") {
    Mesh m = build_rect_mesh(2, 2, Side::Bottom);
    CHECK(m.n_nodes() == 9);
    CHECK(m.n_elements() == 8);
    int n_dir = 0, n_neu = 0;
    for (const auto& be : m.boundary_edges)
        (be.tag == BoundaryTag::Dirichlet ? n_dir : n_neu)++;
    CHECK(n_dir == 2);
    CHECK(n_neu == 6);

    Mesh m4 = build_rect_mesh(4, 4, Side::Bottom);
    CHECK(m4.n_nodes() == 25);
    CHECK(m4.n_elements() == 32);
}

TEST_CASE("rect mesh rejects degenerate sizes") {
    CHECK_THROWS_AS(build_rect_mesh(1, 4, Side::Bottom), std::invalid_argument);
    CHECK_THROWS_AS(build_rect_mesh(4, 0, Side::Bottom), std::invalid_argument);
}

TEST_CASE("element areas positive and invariants hold") {
    for (Side s : {Side::Bottom, Side::Left, Side::Top, Side::Right}) {
        Mesh m = build_rect_mesh(3, 5, s);
        m.check_invariants();
        for (int e = 0; e < m.n_elements(); ++e) CHECK(m.element_area(e) > 0.0);
        double total = 0.0;
        for (int e = 0; e < m.n_elements(); ++e) total += m.element_area(e);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("grid partition 2x2 on 4x4") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    Partition p = grid_partition(m, 2, 2);
    CHECK(p.count == 4);
    for (int j = 1; j <= 4; ++j) {
        CHECK(p.elements_of(j).size() == 8);
        CHECK(p.touches_boundary(j));
        CHECK(region_connected(m, p.elements_of(j)));
    }
}

TEST_CASE("grid partition 4x4 on 4x4 flags interior blocks") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    Partition p = grid_partition(m, 4, 4);
    CHECK(p.count == 16);
    std::set<int> interior = {6, 7, 10, 11};  // 1-based labels of the inner 2x2 blocks
    for (int j = 1; j <= 16; ++j) CHECK(p.touches_boundary(j) == (interior.count(j) == 0));
}

TEST_CASE("grid partition rejects non-divisors") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    CHECK_THROWS_AS(grid_partition(m, 3, 2), std::invalid_argument);
}

TEST_CASE("partition covers the mesh disjointly") {
    Mesh m = build_rect_mesh(8, 4, Side::Left);
    for (auto [px, py] : {std::pair{2, 2}, std::pair{4, 4}, std::pair{8, 1}}) {
        Partition p = grid_partition(m, px, py);
        std::vector<int> seen(m.n_elements(), 0);
        for (int j = 1; j <= p.count; ++j)
            for (int e : p.elements_of(j)) seen[e]++;
        for (int e = 0; e < m.n_elements(); ++e) CHECK(seen[e] == 1);
    }
}

TEST_CASE("probe regions: far corners valid") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    auto pr = validate_probe_regions(m, elements_of_cells(m, {0}), elements_of_cells(m, {15}));
    CHECK(pr.d1_elements.size() == 2);
    CHECK(pr.d2_elements.size() == 2);
}

TEST_CASE("probe regions: same cell overlaps") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    try {
        validate_probe_regions(m, elements_of_cells(m, {5}), elements_of_cells(m, {5}));
        FAIL("expected overlap error");
    } catch (const ProbeRegionError& e) {
        CHECK(e.code() == ProbeRegionErrorCode::Overlap);
    }
}

TEST_CASE("probe regions: adjacent cells share nodes") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    try {
        validate_probe_regions(m, elements_of_cells(m, {5}), elements_of_cells(m, {6}));
        FAIL("expected overlap error");
    } catch (const ProbeRegionError& e) {
        CHECK(e.code() == ProbeRegionErrorCode::Overlap);
    }
}

TEST_CASE("probe regions: band disconnects the complement") {
    Mesh m = build_rect_mesh(8, 8, Side::Bottom);
    std::vector<int> band_cells;
    for (int ix = 0; ix < 8; ++ix) band_cells.push_back(4 * 8 + ix);
    auto band = elements_of_cells(m, band_cells);
    auto spot = elements_of_cells(m, {0});

    // independent oracle: union-find count of complement components
    std::vector<char> in(m.n_elements(), 0);
    for (int e : band) in[e] = 1;
    for (int e : spot) in[e] = 1;
    std::vector<int> complement;
    for (int e = 0; e < m.n_elements(); ++e)
        if (!in[e]) complement.push_back(e);
    CHECK(elastntd::testing::dsu_component_count(m, complement) == 2);

    try {
        validate_probe_regions(m, band, spot);
        FAIL("expected disconnected-complement error");
    } catch (const ProbeRegionError& e) {
        CHECK(e.code() == ProbeRegionErrorCode::DisconnectedComplement);
    }
}

TEST_CASE("probe regions: complement must reach the Neumann boundary") {
    Mesh m = build_rect_mesh(8, 8, Side::Bottom);
    // All elements owning a Neumann edge live in the left/right columns and
    // top row of cells; claim all of them for d1.
    std::vector<int> ring_cells;
    for (int iy = 0; iy < 8; ++iy) {
        ring_cells.push_back(iy * 8 + 0);
        ring_cells.push_back(iy * 8 + 7);
    }
    for (int ix = 1; ix < 7; ++ix) ring_cells.push_back(7 * 8 + ix);
    auto ring = elements_of_cells(m, ring_cells);
    auto hole = elements_of_cells(m, {2 * 8 + 3, 2 * 8 + 4, 3 * 8 + 3, 3 * 8 + 4});

    try {
        validate_probe_regions(m, ring, hole);
        FAIL("expected no-Neumann-access error");
    } catch (const ProbeRegionError& e) {
        CHECK(e.code() == ProbeRegionErrorCode::NoNeumannAccess);
    }
}

TEST_CASE("probe validation symmetric in the region order") {
    Mesh m = build_rect_mesh(8, 8, Side::Bottom);
    auto d1 = elements_of_cells(m, {0, 1});
    auto d2 = elements_of_cells(m, {62, 63});
    CHECK_NOTHROW(validate_probe_regions(m, d1, d2));
    CHECK_NOTHROW(validate_probe_regions(m, d2, d1));

    auto overlapping = elements_of_cells(m, {0, 1, 2});
    for (bool flip : {false, true}) {
        try {
            if (flip)
                validate_probe_regions(m, d1, overlapping);
            else
                validate_probe_regions(m, overlapping, d1);
            FAIL("expected overlap");
        } catch (const ProbeRegionError& e) {
            CHECK(e.code() == ProbeRegionErrorCode::Overlap);
        }
    }
}

TEST_CASE("refinement preserves area and region nesting") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    Mesh f = refine(m);
    CHECK(f.nx == 8);
    CHECK(f.n_elements() == 4 * m.n_elements());

    for (int e = 0; e < m.n_elements(); ++e) {
        double child_area = 0.0;
        Eigen::Vector2d centroid_sum = Eigen::Vector2d::Zero();
        for (int c : refined_children(m, e)) {
            child_area += f.element_area(c);
            centroid_sum += f.element_centroid(c);
        }
        CHECK(child_area == doctest::Approx(m.element_area(e)).epsilon(1e-12));
        // children centroids average to the parent centroid for a self-similar split
        CHECK((centroid_sum / 4.0 - m.element_centroid(e)).norm() < 1e-12);
    }

    auto region = elements_of_cells(m, {0, 1, 4, 5});
    auto fine_region = refine_region(m, region);
    CHECK(fine_region.size() == 4 * region.size());
    double coarse_area = 0.0, fine_area = 0.0;
    for (int e : region) coarse_area += m.element_area(e);
    for (int e : fine_region) fine_area += f.element_area(e);
    CHECK(fine_area == doctest::Approx(coarse_area).epsilon(1e-12));
}

TEST_CASE("children partition the parent exactly") {
    // every fine element is claimed by exactly one coarse element
    Mesh m = build_rect_mesh(3, 2, Side::Bottom);
    Mesh f = refine(m);
    std::vector<int> claimed(f.n_elements(), 0);
    for (int e = 0; e < m.n_elements(); ++e) {
        for (int c : refined_children(m, e)) {
            claimed[c]++;
            // child centroid must lie inside the parent triangle
            Eigen::Vector2d p = f.element_centroid(c);
            const auto& t = m.elements[e];
            Eigen::Vector2d a = m.nodes[t[0]], b = m.nodes[t[1]], d = m.nodes[t[2]];
            auto cross = [](Eigen::Vector2d u, Eigen::Vector2d v) {
                return u.x() * v.y() - u.y() * v.x();
            };
            CHECK(cross(b - a, p - a) > -1e-14);
            CHECK(cross(d - b, p - b) > -1e-14);
            CHECK(cross(a - d, p - d) > -1e-14);
        }
    }
    for (int c = 0; c < f.n_elements(); ++c) CHECK(claimed[c] == 1);
}

}  // TEST_SUITE
