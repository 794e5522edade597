import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdg.timemesh import TimeMesh, fine_grid, graded_mesh, mesh_property_margin


def test_uniform_mesh():
    m = graded_mesh(4, 1.0)
    np.testing.assert_allclose(m.nodes, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-15)
    np.testing.assert_allclose(m.steps, 0.25, rtol=1e-14)
    assert m.k == pytest.approx(0.25)


def test_graded_mesh_steps():
    m = graded_mesh(10, 3.0)
    assert m.steps[0] == pytest.approx(1e-3, rel=1e-12)
    assert m.k == pytest.approx(1.0 - 0.9**3, rel=1e-12)
    assert m.nodes[-1] == 1.0 and m.nodes[0] == 0.0


def test_final_time_is_exact():
    m = graded_mesh(7, 2.3, T=3.0)
    assert m.nodes[-1] == 3.0
    assert m.interval(7)[1] == 3.0


def test_interval_indexing():
    m = graded_mesh(5, 2.0)
    assert m.interval(1) == (0.0, pytest.approx(0.04))
    with pytest.raises(IndexError):
        m.interval(0)
    with pytest.raises(IndexError):
        m.interval(6)


def test_bad_arguments():
    with pytest.raises(ValueError):
        graded_mesh(4, 0.5)
    with pytest.raises(ValueError):
        graded_mesh(0, 1.0)
    with pytest.raises(ValueError):
        graded_mesh(4, 1.0, T=0.0)
    with pytest.raises(ValueError):
        TimeMesh(1.0, 2, 1.0, np.array([0.0, 0.6, 0.5]))


def test_nodes_are_read_only():
    m = graded_mesh(4, 2.0)
    with pytest.raises(ValueError):
        m.nodes[1] = 0.5


@settings(max_examples=50, deadline=None)
@given(N=st.integers(1, 400), gamma=st.floats(1.0, 8.0), T=st.floats(0.1, 10.0))
def test_mesh_property_holds(N, gamma, T):
    m = graded_mesh(N, gamma, T)
    assert np.all(np.diff(m.nodes) > 0.0)
    assert np.all(mesh_property_margin(m) <= 1.0 + 1e-12)


def test_fine_grid():
    m = graded_mesh(4, 2.0)
    g = fine_grid(m, 10)
    assert g.size == 41
    assert g[1] == pytest.approx(0.00625)
    assert g[0] == 0.0 and g[-1] == 1.0
    assert np.all(np.diff(g) > 0.0)
    assert np.isin(m.nodes, g).all()
