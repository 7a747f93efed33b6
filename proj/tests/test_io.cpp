#include <doctest.h>

#include <algorithm>

#include "elastntd/config.hpp"
#include "elastntd/io.hpp"
#include "helpers.hpp"

using namespace elastntd;

TEST_SUITE("io") {

TEST_CASE("double formatting round-trips") {
    for (double v : {0.0, 1.0, -1.5, 1.0 / 3.0, 1e-12, 123456.789, 2.2250738585072014e-308}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("mesh serialization round-trip") {
    Mesh m = build_rect_mesh(3, 4, Side::Left);
    Partition p = grid_partition(m, 3, 2);
    m.element_subdomain = p.element_label;

    Mesh back = mesh_from_json(mesh_to_json(m));
    CHECK(back.n_nodes() == m.n_nodes());
    CHECK(back.n_elements() == m.n_elements());
    CHECK(back.element_subdomain == m.element_subdomain);
    CHECK(back.nx == m.nx);
    CHECK(back.dirichlet_side == m.dirichlet_side);
    CHECK(mesh_hash(back) == mesh_hash(m));
    for (int n = 0; n < m.n_nodes(); ++n) CHECK((back.nodes[n] - m.nodes[n]).norm() == 0.0);
}

TEST_CASE("probing set serialization checks the mesh") {
    Mesh m = build_rect_mesh(4, 4, Side::Bottom);
    Partition part = grid_partition(m, 2, 2);
    BoundaryLoadBasis basis(m);
    MaterialField mat = MaterialField::uniform(m, 1.0, 1.0, 1.0);
    ProbingLoad pl = construct_probing_load(m, part, 1, 1, 1.0, 2.0, mat, basis, 500);

    ProbingLoadSet set;
    set.a = 1.0;
    set.b = 2.0;
    set.n_subdomains = 4;
    set.k_levels = 6;
    set.loads.push_back(pl);

    nlohmann::json j = probing_set_to_json(set, m);
    ProbingLoadSet back = probing_set_from_json(j, m);
    REQUIRE(back.loads.size() == 1);
    CHECK(back.loads[0].j == 1);
    CHECK(back.loads[0].k == 1);
    CHECK(back.loads[0].certificate == pl.certificate);
    CHECK((back.loads[0].g.coeff - pl.g.coeff).cwiseAbs().maxCoeff() == 0.0);

    Mesh other = build_rect_mesh(8, 8, Side::Bottom);
    CHECK_THROWS_AS(probing_set_from_json(j, other), std::invalid_argument);
}

TEST_CASE("config round-trip is lossless") {
    ExperimentConfig cfg;
    cfg.nx = 8;
    cfg.ny = 8;
    cfg.px = 4;
    cfg.py = 2;
    cfg.a = 1.25;
    cfg.b = 2.5;
    cfg.seed = 123456789ULL;
    cfg.sweep_mode = "simultaneous";
    cfg.d1_cells = {0, 1, 8, 9};
    cfg.d2_cells = {54, 55, 62, 63};
    cfg.forward_load = "basis:3";

    ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back).dump() == config_to_json(cfg).dump());
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.px = 3;  // does not divide nx = 4
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    ExperimentConfig bad_box;
    bad_box.a = 2.0;
    bad_box.b = 1.0;
    CHECK_THROWS_AS(bad_box.validate(), ConfigError);

    ExperimentConfig bad_mode;
    bad_mode.sweep_mode = "other";
    CHECK_THROWS_AS(bad_mode.validate(), ConfigError);

    CHECK_THROWS_AS(config_from_json(nlohmann::json::object()), ConfigError);
}

TEST_CASE("default probe cells sit in opposite corners") {
    ExperimentConfig cfg;
    cfg.nx = cfg.ny = 8;
    cfg.px = cfg.py = 2;
    Mesh m = build_rect_mesh(8, 8, Side::Bottom);
    auto d1 = cfg.d1_elements(m);
    auto d2 = cfg.d2_elements(m);
    CHECK(d1.size() == 8);  // 2x2 cells
    CHECK(d2.size() == 8);
    CHECK_NOTHROW(validate_probe_regions(m, d1, d2));
}

TEST_CASE("operator export carries provenance") {
    Mesh m = build_rect_mesh(3, 3, Side::Bottom);
    MaterialField mat = MaterialField::uniform(m, 1.0, 1.0, 1.0);
    BoundaryLoadBasis basis(m);
    NtDMatrix ntd = assemble_ntd(m, mat, basis);
    nlohmann::json side = ntd_sidecar(ntd, m, mat, basis);
    CHECK(side.at("mesh_hash").get<std::string>() == mesh_hash(m));
    CHECK(side.at("material_hash").get<std::string>() == material_hash(mat));
    CHECK(side.at("basis").size() == static_cast<size_t>(basis.size()));
    CHECK(side.at("basis").at(0).at(0).get<int>() == basis.entries()[0].node);

    std::string csv = matrix_csv(ntd.matrix);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == basis.size());

    Displacement u{Eigen::VectorXd::Zero(2 * m.n_nodes())};
    std::string dcsv = displacement_csv(u);
    CHECK(dcsv.rfind("node,ux,uy\n", 0) == 0);
    CHECK(std::count(dcsv.begin(), dcsv.end(), '\n') == m.n_nodes() + 1);
}

TEST_CASE("csv writers are stable") {
    SandwichCsvRow row;
    row.pair_id = 1;
    row.load_id = 2;
    row.report.middle = 0.5;
    row.report.upper_bound = 0.75;
    row.report.lower_bound = 0.25;
    row.report.slack_upper = 0.25;
    row.report.slack_lower = 0.25;
    row.report.scale = 0.75;
    std::string csv = sandwich_csv({row});
    CHECK(csv == "pair,load,middle,upper,lower,slack_upper,slack_lower,pass\n"
                 "1,2,0.5,0.75,0.25,0.25,0.25,1\n");

    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.5, 0.5, 2.0;
    CHECK(matrix_csv(m) == "1,0.5\n0.5,2\n");
}

}  // TEST_SUITE
