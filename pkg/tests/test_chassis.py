import itertools
import json

import numpy as np
import pytest

from rotorscape.chassis import (AUXILIARY, PLATONIC, Chassis, get_chassis, library_ids, load_chassis,
                                make_auxiliary, make_platonic, make_quasi_regular, make_regular_polygon,
                                save_chassis)


def test_hexagon_vertices():
    c = make_regular_polygon(6)
    np.testing.assert_allclose(c.vertices[0], [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(c.vertices[3], [-1, 0, 0], atol=1e-15)
    assert c.id == "CRPol6" and c.family == "regular_polygon"


def test_square_spacing():
    c = make_regular_polygon(4)
    assert c.n == 4
    np.testing.assert_allclose(c.vertices[1], [0, 1, 0], atol=1e-15)


@pytest.mark.parametrize("n", [2, 0, -3])
def test_polygon_rejects_small(n):
    with pytest.raises(ValueError):
        make_regular_polygon(n)


@pytest.mark.parametrize("n", range(3, 21))
def test_polygon_angles(n):
    v = make_regular_polygon(n).vertices
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-12)
    cos = np.sum(v * np.roll(v, -1, axis=0), axis=1)
    np.testing.assert_allclose(np.arccos(np.clip(cos, -1, 1)), 2 * np.pi / n, atol=1e-12)


@pytest.mark.parametrize("name,n", [("octahedron", 6), ("cube", 8), ("icosahedron", 12),
                                    ("dodecahedron", 20)])
def test_platonic_sizes_and_norms(name, n):
    c = make_platonic(name)
    assert c.n == n
    np.testing.assert_allclose(np.linalg.norm(c.vertices, axis=1), 1.0, atol=1e-12)


def test_platonic_edges_uniform():
    # every vertex has the same nearest-neighbour distance and degree
    for name, degree in [("octahedron", 4), ("cube", 3), ("icosahedron", 5), ("dodecahedron", 3)]:
        v = make_platonic(name).vertices
        d = np.linalg.norm(v[:, None] - v[None], axis=2)
        d[np.diag_indices(len(v))] = np.inf
        edge = d.min()
        assert np.all(np.sum(np.isclose(d, edge), axis=1) == degree)


def test_octahedron_order():
    v = make_platonic("octahedron").vertices
    np.testing.assert_allclose(v, [[0, 0, 1], [1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0], [0, 0, -1]])


def test_cube_order_is_yzx_lexicographic():
    v = make_platonic("cube").vertices * np.sqrt(3)
    expected = [(x, y, z) for y, z, x in itertools.product((-1, 1), repeat=3)]
    np.testing.assert_allclose(v, expected, atol=1e-12)


def test_unknown_names():
    with pytest.raises(ValueError):
        make_platonic("tetrahedron")
    with pytest.raises(ValueError):
        make_auxiliary("pyramid")


@pytest.mark.parametrize("kind,n", [("tri_prism6", 6), ("pent_bipyramid7", 7), ("sq_antiprism8", 8),
                                    ("tri_cupola9", 9), ("cuboctahedron12", 12), ("hex_prism12", 12)])
def test_auxiliary_sizes(kind, n):
    c = make_auxiliary(kind)
    assert c.n == n
    assert np.isclose(np.linalg.norm(c.vertices, axis=1).max(), 1.0, atol=1e-12)


@pytest.mark.parametrize("kind", AUXILIARY)
def test_auxiliary_unit_edges(kind):
    # uniform solids: all shortest edges equal and at least three per vertex
    v = make_auxiliary(kind).vertices
    d = np.linalg.norm(v[:, None] - v[None], axis=2)
    d[np.diag_indices(len(v))] = np.inf
    edges = np.isclose(d, d.min(), rtol=1e-9)
    assert np.all(edges.sum(axis=1) >= 3)


def test_cuboctahedron_unit_norm():
    v = make_auxiliary("cuboctahedron12").vertices
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-12)


def test_quasi_regular_contract():
    base = make_regular_polygon(6)
    same = make_quasi_regular(base, 0.0, 3)
    np.testing.assert_array_equal(same.vertices, base.vertices)
    a = make_quasi_regular(base, 0.1, 42)
    b = make_quasi_regular(base, 0.1, 42)
    np.testing.assert_array_equal(a.vertices, b.vertices)
    c = make_quasi_regular(base, 0.1, 43)
    assert not np.allclose(a.vertices, c.vertices)
    assert np.isclose(np.linalg.norm(a.vertices, axis=1).max(), 1.0, atol=1e-12)
    for bad in (-0.1, 0.5, 0.7):
        with pytest.raises(ValueError):
            make_quasi_regular(base, bad, 0)


def test_quasi_displacement_bounded():
    base = make_platonic("cube")
    q = make_quasi_regular(base, 0.2, 5)
    # undo the renormalization: displacement before scaling is at most 0.2
    rng = np.random.default_rng(5)
    d = rng.standard_normal((8, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    raw = base.vertices + (0.2 * rng.random(8) ** (1 / 3))[:, None] * d
    np.testing.assert_allclose(q.vertices, raw / np.linalg.norm(raw, axis=1).max())
    assert np.all(np.linalg.norm(raw - base.vertices, axis=1) <= 0.2 + 1e-12)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        Chassis("x", "prism", np.zeros((6, 3)), 1.0)
    v = make_regular_polygon(6).vertices.copy()
    v[1] = v[0]
    with pytest.raises(ValueError):
        Chassis("x", "regular_polygon", v, 1.0)
    with pytest.raises(ValueError):
        Chassis("x", "blob", make_regular_polygon(6).vertices, 1.0)


def test_vertices_read_only():
    c = make_regular_polygon(6)
    with pytest.raises(ValueError):
        c.vertices[0, 0] = 3.0


def test_library_ids_and_lookup():
    ids = library_ids()
    for cid in ("CRPol6", "CRPol11", "COct6", "CCub8", "CDod20", "CTriPr6", "CQRPol7", "CQCub8"):
        assert cid in ids
    for cid in ids:
        c = get_chassis(cid)
        assert c.id == cid
        assert np.isclose(np.linalg.norm(c.vertices, axis=1).max(), 1.0, atol=1e-12)
    with pytest.raises(KeyError):
        get_chassis("NOPE")


def test_json_roundtrip(tmp_path):
    c = get_chassis("CQRPol7")
    path = tmp_path / "c.json"
    save_chassis(c, path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"id", "family", "vertices"}
    back = load_chassis(path)
    np.testing.assert_array_equal(back.vertices, c.vertices)
    assert back.content_hash() == c.content_hash()


def test_json_loader_validates(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"id": "x", "family": "prism", "vertices": [[0, 0, 0]] * 6}))
    with pytest.raises(ValueError):
        load_chassis(path)
    path.write_text(json.dumps({"id": "x", "vertices": [[1, 0, 0]]}))
    with pytest.raises(ValueError):
        load_chassis(path)


def test_platonic_names_complete():
    assert set(PLATONIC) == {"octahedron", "cube", "icosahedron", "dodecahedron"}
