"""Smoke test for the tnnflow extension module.

Build and install with `pip install --no-build-isolation ./crates/py`, then
run `python python/smoke.py`.
"""

import json
import math

import tnnflow


def main():
    p = tnnflow.Pinning(3)
    assert p.tau() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    e = p.exp_tau(1.0)
    assert tnnflow.tnn_class(e) == "TotallyPositive"
    assert tnnflow.tnn_class([[1, 0], [1, 1]]) == "TotallyNonnegative"
    assert tnnflow.tnn_class([[0, -1], [1, 0]]) == "Neither"

    chart = tnnflow.Chart(3)
    assert chart.rep_dim == 8 and chart.dim == 7
    assert abs(chart.log_c - math.sqrt(2)) < 1e-12
    q = chart.flow(1.0, [1.0] * 7)
    assert math.hypot(*q) < math.exp(-chart.log_c) * math.sqrt(7) + 1e-12
    t, on_sphere = chart.sphere_crossing([3.0] * 7, 1.0)
    assert t > 0 and abs(math.hypot(*on_sphere) - 1.0) < 1e-11

    g = [[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [1.0, 1.0, 1.0]]
    assert chart.commutation_defect(g, 1.0) < 1e-8
    time, bound, dist = chart.converge(g, 1e-9)
    assert time <= bound + 1e-9 and dist < 1e-8

    grass = tnnflow.Chart(4, [1, 3])
    assert grass.rep_dim == 6

    census = tnnflow.Census(seed=1)
    assert len(census) == 19
    assert census.f_vector == [6, 8, 4, 1]
    assert census.summary() == "19 cells: f = (6, 8, 4, 1)"
    assert census.euler() == 2
    assert sorted(census.vertex_labels) == sorted(
        ["12,13", "23,13", "13,12", "13,23", "12,23", "23,12"]
    )
    assert census.figure("svg").startswith("<?xml")
    assert len(json.loads(census.figure("json"))["cells"]) == 19

    sym, control = tnnflow.fold_check(4, seed=3, count=20)
    assert sym and not control

    ok, report = tnnflow.verify(seed=7, count=10)
    assert ok and json.loads(report)["pass"]
    assert tnnflow.verify(seed=7, count=10)[1] == report

    try:
        tnnflow.Chart(3, [5])
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("tnnflow smoke test: ok")


if __name__ == "__main__":
    main()
