import numpy as np
import pytest

from rotorscape.chassis import get_chassis, library_ids, make_platonic, make_regular_polygon
from rotorscape.manifold import (canonicalize, direction_from_phase, disc_project, phase_from_direction,
                                 tangency_residual, tangent_basis, tangent_frames, write_disc_csv)


def test_canonicalize_examples():
    np.testing.assert_array_equal(canonicalize([0, 0, -1.0]), [0, 0, 1.0])
    np.testing.assert_array_equal(canonicalize([0, -1.0, 0]), [0, 1.0, 0])
    np.testing.assert_array_equal(canonicalize([-1.0, 0, 0]), [1.0, 0, 0])
    np.testing.assert_array_equal(canonicalize([0.3, -0.2, 0.5]), [0.3, -0.2, 0.5])


def test_canonicalize_idempotent_and_antipodal(rng):
    d = rng.standard_normal((500, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    c = canonicalize(d)
    np.testing.assert_array_equal(canonicalize(c), c)
    np.testing.assert_array_equal(canonicalize(-d), c)
    assert np.all(c[:, 2] >= 0)


def test_canonicalize_zero():
    with pytest.raises(ValueError):
        canonicalize([0.0, 0.0, 0.0])


def test_disc_project_examples():
    np.testing.assert_array_equal(disc_project([0, 0, 1.0]), [0, 0])
    np.testing.assert_array_equal(disc_project([1.0, 0, 0]), [1, 0])
    # antipodal rim points describe the same line
    a = canonicalize([0.6, 0.8, 0.0])
    b = canonicalize([-0.6, -0.8, 0.0])
    np.testing.assert_array_equal(disc_project(a), disc_project(b))


def test_disc_project_injective_on_open_hemisphere(rng):
    d = canonicalize(rng.standard_normal((200, 3)))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    xy = disc_project(d)
    back = np.column_stack([xy, np.sqrt(1 - (xy**2).sum(1))])
    np.testing.assert_allclose(back, d, atol=1e-9)


def test_tangent_basis_examples():
    b = tangent_basis([1.0, 0, 0])
    np.testing.assert_allclose(b.n, [1, 0, 0])
    np.testing.assert_allclose(b.u, [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(b.v, [0, 0, 1], atol=1e-15)
    b = tangent_basis([0, 0, 2.0])
    np.testing.assert_allclose(b.u, [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(b.v, [0, 1, 0], atol=1e-15)
    b = tangent_basis([0, 0, -1.0])
    np.testing.assert_allclose(np.cross(b.u, b.v), b.n, atol=1e-15)
    with pytest.raises(ValueError):
        tangent_basis([0.0, 0, 0])


def test_tangent_basis_orthonormal(rng):
    p = rng.standard_normal((300, 3))
    n, u, v = tangent_frames(p)
    for a, b in ((u, v), (u, n), (v, n)):
        assert np.abs(np.sum(a * b, axis=1)).max() < 1e-12
    for a in (n, u, v):
        np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.cross(u, v), n, atol=1e-12)
    assert np.abs(u[:, 2]).max() < 1e-12


def test_tangent_basis_continuous_off_pole():
    p = np.array([0.3, 0.4, 0.5])
    a = tangent_basis(p)
    b = tangent_basis(p + 1e-7)
    assert np.linalg.norm(a.u - b.u) < 1e-5


def test_direction_from_phase_examples():
    c = make_regular_polygon(6)
    theta = np.zeros(6)
    np.testing.assert_allclose(direction_from_phase(c, theta)[0], [0, 1, 0], atol=1e-15)
    theta[0] = np.pi / 2
    np.testing.assert_allclose(direction_from_phase(c, theta)[0], [0, 0, 1], atol=1e-15)
    with pytest.raises(ValueError):
        direction_from_phase(c, np.zeros(5))


@pytest.mark.parametrize("cid", library_ids())
def test_phase_roundtrip_library(cid, rng):
    c = get_chassis(cid)
    theta = rng.uniform(0, np.pi, (1000, c.n))
    d = direction_from_phase(c, theta)
    back, resid = phase_from_direction(c, d)
    err = np.abs((back - theta + np.pi / 2) % np.pi - np.pi / 2)
    assert err.max() < 1e-10
    assert resid < 1e-12


def test_phase_antipodal_and_contamination(rng):
    c = make_platonic("cube")
    theta = rng.uniform(0, np.pi, c.n)
    d = direction_from_phase(c, theta)
    back, _ = phase_from_direction(c, -d)
    np.testing.assert_allclose(back, theta, atol=1e-12)
    n, _, _ = tangent_frames(c.vertices)
    noisy = d + 1e-4 * n
    noisy /= np.linalg.norm(noisy, axis=1, keepdims=True)
    back, resid = phase_from_direction(c, noisy)
    assert np.abs(back - theta).max() < 1e-4
    assert abs(resid - 1e-4) < 1e-8


def test_phase_interval():
    c = make_regular_polygon(6)
    d = direction_from_phase(c, np.full(6, np.pi))
    theta, _ = phase_from_direction(c, d)
    assert np.all((theta >= 0) & (theta < np.pi))
    np.testing.assert_allclose(theta, 0.0, atol=1e-15)


def test_tangency_residual_examples(rng):
    c = make_regular_polygon(6)
    d = direction_from_phase(c, rng.uniform(0, np.pi, 6))
    assert tangency_residual(c, d) < 1e-12
    d[2] = c.vertices[2]
    assert np.isclose(tangency_residual(c, d), 1.0)
    r = rng.standard_normal((6, 3))
    r /= np.linalg.norm(r, axis=1, keepdims=True)
    assert tangency_residual(c, r) > 0.1


def test_disc_csv(tmp_path, rng):
    d = rng.standard_normal((3, 6, 3))
    d /= np.linalg.norm(d, axis=2, keepdims=True)
    path = tmp_path / "disc.csv"
    write_disc_csv(path, d)
    lines = path.read_text().splitlines()
    assert lines[0] == "solution_index,rotor,x,y"
    assert len(lines) == 1 + 18
    assert lines[1].startswith("0,1,")
