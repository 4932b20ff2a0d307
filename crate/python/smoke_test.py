"""Smoke test for the confpersist Python extension.

Build and install first:  pip install ./crates/python  (or maturin develop)
"""

import math

import confpersist as cp


def main():
    c12 = cp.MetricSpace.from_graph(
        [str(i) for i in range(12)],
        [(str(i), str((i + 1) % 12), 1.0) for i in range(12)],
    )
    assert len(c12) == 12
    assert c12.dist("0", "6") == 6.0

    r_star, witness = c12.max_packing_radius(3)
    assert r_star == 2.0 and witness == ["0", "4", "8"], (r_star, witness)
    assert c12.conf_nonempty(3, 1.5)
    assert not c12.conf_nonempty(3, 2.0)

    point = cp.MetricSpace(["p"], [[0.0]])
    bars = point.barcode(1)
    assert len(bars) == 1 and bars[0]["essential"], bars

    circle = cp.MetricSpace.circle(24, 1.0)
    s = 1.0 / 24
    rep = circle.obstruction_report(2, s, s, [j * s for j in range(6)], t_max=2)
    assert rep["n_lb_real"] == 3, rep["n_lb_real"]

    cov = cp.MetricSpace.circle(12, 12.0).covering(2, 1.0, [1.0])
    assert cov["is_covering"] and cov["report"]["total_components"] == 1

    assert c12.delta_check(2)["passed"]

    angles = [2 * math.pi * i / 24 for i in range(24)]
    plane = [[math.cos(a), math.sin(a)] for a in angles]
    lifted = [[1.0, math.cos(a), math.sin(a)] for a in angles]
    assert not cp.is_regular(circle, plane, 2, 0.01)["passed"]
    assert cp.is_regular(circle, lifted, 2, 0.01)["passed"]

    print("python smoke test ok")


if __name__ == "__main__":
    main()
