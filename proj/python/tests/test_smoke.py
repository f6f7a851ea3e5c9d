import numpy as np
import pytest

import piolafe as pf


def test_element_dimensions():
    dims = {pf.Family.BDM1: 6, pf.Family.MTW: 9, pf.Family.AWc: 24,
            pf.Family.AWnc: 15, pf.Family.DG0: 1, pf.Family.DG1: 6}
    for family, dim in dims.items():
        assert pf.element_dim(family) == dim


def test_tabulate_shape_and_dg0():
    pts = np.array([[0.2, 0.3], [0.5, 0.1]])
    t = pf.tabulate(pf.Family.AWc, pts)
    assert t.shape == (24, 2, 3)
    assert np.allclose(pf.tabulate(pf.Family.DG0, pts), 1.0)
    with pytest.raises(ValueError):
        pf.tabulate(pf.Family.MTW, np.zeros((2, 3)))


def test_identity_transform():
    ref = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert np.allclose(pf.transform_matrix(pf.Family.MTW, ref), np.eye(9))


def test_mesh_counts_and_text_roundtrip():
    m = pf.structured_rectangle(1, 1, pf.Pattern.right)
    assert (m.num_cells, m.num_vertices, m.num_edges) == (2, 4, 5)
    assert pf.num_dofs(m, pf.Family.AWc) == 38
    w = pf.perturb_interior(pf.structured_rectangle(3, 3), 0.2, 4)
    r = pf.mesh_from_text(w.to_text())
    assert np.array_equal(r.vertices, w.vertices)
    assert np.array_equal(r.cells, w.cells)
    assert pf.refine_uniform(m).num_cells == 8
    with pytest.raises(pf.PiolafeError):
        pf.mesh_from_text("not a mesh")


def test_mass_matrix_is_symmetric():
    m = pf.structured_rectangle(2, 2, pf.Pattern.crossed)
    M = pf.mass_matrix(m, pf.Family.MTW)
    assert M.shape == (pf.num_dofs(m, pf.Family.MTW),) * 2
    assert abs(M - M.T).max() < 1e-12


def test_verify_element():
    r = pf.verify_element(pf.Family.MTW, cells=10, seed=3)
    assert r.kronecker < 1e-9 and r.constraint < 1e-9 and r.feec < 1e-10
    assert pf.check_verify(pf.run_verify(pf.Family.AWnc, 10, 3))


def test_mtw_convergence_report():
    rep = pf.run_mtw_convergence([1.0], 3)
    assert rep.columns[:4] == ["eps", "level", "N", "dofs"]
    u = rep.column("u_err")
    assert u[2] < u[1] < u[0]
    assert rep.column("u_eoc")[2] == pytest.approx(pf.eoc(u[1], u[2]))
    assert rep.to_csv().startswith("# experiment=convergence-mtw")


def test_conditioning_check():
    assert pf.check_conditioning(pf.run_conditioning(pf.Family.AWc, 2))
