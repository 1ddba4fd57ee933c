import json

import numpy as np
import pytest

from rotorscape.chassis import get_chassis, make_regular_polygon
from rotorscape.errors import EmptyResultError
from rotorscape.manifold import canonicalize, direction_from_phase, tangency_residual
from rotorscape.optimizer import (SolutionSet, SolverConfig, global_exhaust, local_minimize, prune,
                                  run_ablation, uniform_sphere_sample)
from rotorscape.topology.classify import count_distinct
from rotorscape.wrench import cost_gradient, evaluate


def optimal_log_volume(n):
    # spectrum of every star branch: two singular values sqrt(n/2), four sqrt(n/4)
    return -(np.log(n / 2) + 2 * np.log(n / 4))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=0)
    with pytest.raises(ValueError):
        SolverConfig(gradient_tolerance=0.0)
    with pytest.raises(ValueError):
        SolverConfig(step_tolerance=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(objective="volume")
    assert SolverConfig(objective="kappa").objective == "condition_number"
    assert SolverConfig(objective="logvol").objective == "log_volume"


def test_uniform_sphere_statistics():
    x = uniform_sphere_sample(np.random.default_rng(7), 100_000)
    assert abs((x[:, 2] > 0).mean() - 0.5) <= 0.01
    assert np.linalg.norm(x.mean(axis=0)) < 0.02
    np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1.0)
    a = uniform_sphere_sample(np.random.default_rng(3), 5)
    b = uniform_sphere_sample(np.random.default_rng(3), 5)
    np.testing.assert_array_equal(a, b)
    assert uniform_sphere_sample(np.random.default_rng(0)).shape == (3,)


def test_start_on_branch_stays():
    c = make_regular_polygon(6)
    start = direction_from_phase(c, np.array([0, 0.5, 0, 0.5, 0, 0.5]) * np.pi + 0.9)
    res = local_minimize(c, start)
    assert res.converged
    moved = np.minimum(np.linalg.norm(res.dirs - start, axis=1), np.linalg.norm(res.dirs + start, axis=1))
    assert moved.max() < 1e-4
    assert abs(res.cost - evaluate(c, start).log_volume) < 1e-8


def test_escapes_barrier():
    c = get_chassis("CRPol7")
    start = np.tile([0.2, 0.3, 0.9], (7, 1))
    start /= np.linalg.norm(start, axis=1, keepdims=True)
    j0 = evaluate(c, start).log_volume
    res = local_minimize(c, start)
    assert res.cost < j0 - 10


@pytest.mark.parametrize("cid", ["CRPol6", "CRPol8", "CTriPr6", "CCub8", "CQRPol9"])
def test_monotone_and_stationary(cid):
    c = get_chassis(cid)
    for k in range(5):
        start = uniform_sphere_sample(np.random.default_rng([11, k]), c.n)
        res = local_minimize(c, start)
        assert res.cost <= evaluate(c, start).log_volume + 1e-12
        np.testing.assert_array_equal(res.dirs, canonicalize(res.dirs))
        if res.converged:
            assert np.linalg.norm(cost_gradient(c, res.dirs)) <= 1e-4


def test_polygon_optimum_value():
    for n in (6, 7, 8):
        c = make_regular_polygon(n)
        sols = global_exhaust(c, 10, seed=2)
        assert np.isclose(sols.J_min, optimal_log_volume(n), atol=1e-9)


def test_kappa_objective_monotone():
    c = get_chassis("CRPol6")
    cfg = SolverConfig(objective="kappa", max_iterations=300)
    start = uniform_sphere_sample(np.random.default_rng(5), 6)
    res = local_minimize(c, start, cfg)
    assert res.cost <= evaluate(c, start).condition_number + 1e-12


def test_global_exhaust_single_sample():
    sols = global_exhaust(make_regular_polygon(6), 1, seed=4)
    assert len(sols) == 1
    assert sols.costs[0] == sols.J_min


def test_global_exhaust_contract():
    c = make_regular_polygon(6)
    sols = global_exhaust(c, 30, prune_tolerance=1e-6, seed=9)
    assert np.all(sols.costs <= sols.J_min + 1e-6)
    assert all(tangency_residual(c, d) < 1e-5 for d in sols.dirs)
    np.testing.assert_array_equal(sols.dirs, canonicalize(sols.dirs))
    assert np.all(np.diff(sols.costs) >= 0)


def test_seed_determinism_and_threads():
    c = get_chassis("CRPol7")
    a = global_exhaust(c, 12, seed=3)
    b = global_exhaust(c, 12, seed=3)
    np.testing.assert_array_equal(a.dirs, b.dirs)
    t = global_exhaust(c, 12, seed=3, threads=2)
    np.testing.assert_array_equal(np.sort(a.costs), np.sort(t.costs))
    np.testing.assert_allclose(a.dirs, t.dirs)
    d = global_exhaust(c, 12, seed=4)
    assert not np.array_equal(a.dirs, d.dirs)


def test_quasi_hexagon_discrete():
    c = get_chassis("CQRPol6")
    sols = global_exhaust(c, 200, seed=0)
    assert count_distinct(sols.dirs) <= 10


def test_rejects_underactuated():
    with pytest.raises(ValueError):
        global_exhaust(make_regular_polygon(5), 3)


def test_empty_result():
    cfg = SolverConfig(max_iterations=1, newton_iterations=0)
    with pytest.raises(EmptyResultError):
        global_exhaust(get_chassis("CRPol8"), 3, seed=0, config=cfg)


def test_prune_sorting():
    dirs = np.arange(4 * 6 * 3, dtype=float).reshape(4, 6, 3)
    costs = np.array([1.0, 0.5, 0.5 + 1e-9, 3.0])
    kept, c, jmin = prune(dirs, costs, 1e-6)
    assert jmin == 0.5 and len(c) == 2
    np.testing.assert_array_equal(kept[0], dirs[1])


def test_solution_set_io(tmp_path):
    sols = global_exhaust(make_regular_polygon(6), 5, seed=1)
    path = tmp_path / "s.json"
    sols.save(path)
    doc = json.loads(path.read_text())
    for key in ("chassis_sha256", "rng_seed", "config", "samples_requested", "prune_tolerance"):
        assert key in doc
    back = SolutionSet.load(path)
    np.testing.assert_array_equal(back.dirs, sols.dirs)
    np.testing.assert_array_equal(back.costs, sols.costs)
    assert back.config == sols.config
    csv = tmp_path / "s.csv"
    sols.write_csv(csv)
    lines = csv.read_text().splitlines()
    assert lines[0] == "solution_index,rotor,dx,dy,dz,cost" and len(lines) == 1 + 5 * 6


def test_ablation_identical_starts():
    c = make_regular_polygon(6)
    runs = run_ablation(c, 3, seed=2, config=SolverConfig(max_iterations=50))
    assert set(runs) == {"log_volume", "condition_number"}
    assert all(len(r.costs) == 3 for r in runs.values())
