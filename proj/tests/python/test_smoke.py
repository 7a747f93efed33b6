import numpy as np
import pytest

import elastntd as en


@pytest.fixture(scope="module")
def setup():
    mesh = en.build_rect_mesh(4, 4, "bottom")
    part = en.grid_partition(mesh, 2, 2)
    basis = en.BoundaryLoadBasis(mesh)
    mat = en.MaterialField.uniform(mesh, 1.0, 1.0, 1.0)
    return mesh, part, basis, mat


def random_load(basis, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, basis.size)


def test_mesh_counts(setup):
    mesh, part, basis, mat = setup
    assert mesh.n_nodes == 25
    assert mesh.n_elements == 32
    assert part.count == 4
    assert all(part.touches_boundary(j) for j in range(1, 5))
    with pytest.raises(ValueError):
        en.build_rect_mesh(1, 4, "bottom")


def test_mesh_json_roundtrip(setup):
    mesh, *_ = setup
    back = en.Mesh.from_json(mesh.to_json())
    assert back.n_nodes == mesh.n_nodes
    assert np.allclose(back.nodes(), mesh.nodes())


def test_probe_region_error(setup):
    mesh, *_ = setup
    cells = en.elements_of_cells(mesh, [5])
    with pytest.raises(en.ProbeRegionError):
        en.validate_probe_regions(mesh, cells, cells)


def test_forward_solve_and_energy(setup):
    mesh, part, basis, mat = setup
    sys = en.assemble(mesh, mat)
    g = random_load(basis, 0)
    u = en.solve_forward(sys, basis, g)
    div_e, strain_e, l2_e = en.energy_densities(mesh, u, en.all_elements(mesh))
    assert l2_e > 0 and strain_e > 0 and div_e >= 0
    # boundary energy equals the operator quadratic form
    ntd = en.assemble_ntd(mesh, mat, basis)
    qf = en.quadratic_form(ntd, g)
    pairing = en.boundary_pairing(basis, g, en.boundary_trace(basis, u))
    assert qf == pytest.approx(pairing, rel=1e-9)
    assert qf > 0


def test_monotonicity_direction(setup):
    mesh, part, basis, mat = setup
    heavier = mat.with_rho(2.0 * np.asarray(mat.rho))
    g = random_load(basis, 1)
    r = en.sandwich_rho(mesh, heavier, mat, basis, g)
    assert r.passed()
    assert r.middle >= 0.0  # heavier first argument lowers the boundary energy
    ntd_light = en.assemble_ntd(mesh, mat, basis)
    ntd_heavy = en.assemble_ntd(mesh, heavier, basis)
    delta = np.asarray(ntd_light.matrix) - np.asarray(ntd_heavy.matrix)
    assert en.min_gram_weighted_eigenvalue(delta, basis) >= -1e-9


def test_probing_load_and_alpha(setup):
    mesh, part, basis, mat = setup
    assert en.contrast_levels(1.0, 2.0) == 6
    pl = en.construct_probing_load(mesh, part, 1, 1, 1.0, 2.0, mat, basis)
    assert pl.normalized
    assert pl.certificate == pytest.approx(1.0, abs=1e-9)
    assert pl.cgne_iterations <= 500

    full = en.construct_probing_load_set(mesh, part, 1.0, 2.0, mat, basis)
    alpha = en.alpha_constant(full, basis)
    assert alpha > 0
    assert len(full.loads) == 24


def test_density_sweep(setup):
    mesh, part, basis, mat = setup
    rep = en.lipschitz_sweep_density(mesh, part, 1.0, 1.0, 1.0, 2.0, 5, 11, 0.0, basis)
    assert rep.min_ratio > 0
    assert rep.pass_
    rep2 = en.lipschitz_sweep_density(mesh, part, 1.0, 1.0, 1.0, 2.0, 5, 11, 0.0, basis)
    assert [r.ratio for r in rep.rows] == [r.ratio for r in rep2.rows]


def test_localized_sequence():
    mesh = en.build_rect_mesh(8, 8, "bottom")
    mat = en.MaterialField.uniform(mesh, 1.0, 1.0, 1.0)
    d1 = en.elements_of_cells(mesh, [54, 55, 62, 63])
    d2 = en.elements_of_cells(mesh, [0, 1, 8, 9])
    levels = en.localized_sequence(mesh, mat, d1, d2, 3)
    assert len(levels) == 3
    residuals = [lv.runge_residual for lv in levels]
    assert all(residuals[i + 1] <= residuals[i] * (1 + 1e-12) for i in range(2))
    ratios = [lv.d1_energy / lv.d2_energy for lv in levels]
    assert ratios[-1] > 100.0
