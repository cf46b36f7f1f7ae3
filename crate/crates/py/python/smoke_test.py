"""Smoke test for the stimclone extension module.

Build and run from the workspace root:

    cargo build --release -p stimclone-py --features extension-module
    cp target/release/libstimclone_py.so crates/py/python/stimclone.so
    python3 crates/py/python/smoke_test.py
"""

import math
from fractions import Fraction

import stimclone as sc


def expect_value_error(fn, *args):
    try:
        fn(*args)
    except ValueError:
        return
    raise AssertionError(f"{fn.__name__}{args} did not raise ValueError")


def main():
    assert sc.optimal_fidelity(1, 2) == Fraction(5, 6)
    assert sc.clone_fidelity_pdc(1, 2) == Fraction(5, 6)
    assert sc.clone_fidelity_pdc(3, 7) == Fraction(3 * 7 + 3 + 7, 7 * 5)
    assert sc.anticlone_fidelity_pdc(2, 5) == Fraction(3, 4)
    expect_value_error(sc.anticlone_fidelity_pdc, 2, 2)
    expect_value_error(sc.optimal_fidelity, -1, 2)

    basis = sc.enumerate_sector(1, 2, 0)
    assert [(tuple(a), k, l) for a, k, l in basis] == [(("g",), 2, 0), (("e1",), 1, 0)]
    assert len(sc.enumerate_sector(2, 2, 1)) == 8
    expect_value_error(sc.enumerate_sector, 2, -1, 0)

    p = sc.photon_distribution(3, 0.4)
    assert abs(sum(p.values()) - 1.0) < 1e-10
    assert p.get((0, 0), 0.0) == 0.0
    m = sc.metrics(p)
    assert m["f_rand"] <= m["f_clones"] <= m["f_opt"]
    expect_value_error(sc.photon_distribution, -2, 0.4)

    rows = sc.simulate_time_series(2, 1.0, 10)
    assert len(rows) == 11
    assert rows[0][1] is None and rows[0][4] == 1.0
    assert abs(rows[1][1] - 5 / 6) < 1e-2

    analytic = sc.pdc_state_analytic(1, 0.3)
    numeric = sc.pdc_state_numeric(1, 0.3)
    assert abs(abs(analytic.overlap(numeric)) - 1.0) < 1e-8
    assert abs(analytic.norm_deficit()) < 1e-12
    comp = analytic.project_fixed_m(2)
    assert math.isclose(comp["clone_fidelity"], 5 / 6, rel_tol=1e-12)
    assert math.isclose(comp["anticlone_fidelity"], 2 / 3, rel_tol=1e-12)
    weights = analytic.m_weights(4)
    assert [mm for mm, _ in weights] == [1, 2, 3, 4]

    for rot in sc.Su2Rotation.seeded(sc.DEFAULT_SEED, 2):
        report = sc.universality_check(rot, 2, 1.0, 10)
        assert report["max_deviation"] < 1e-9
        clone, anti = sc.pdc_rotated_fidelities(rot, 1, 3, 0.4)
        assert abs(clone - float(sc.clone_fidelity_pdc(1, 3))) < 1e-12
    expect_value_error(sc.Su2Rotation, 1.0, 1.0)

    checks = sc.run_checks(only="anticlone")
    assert checks[0][0] == "anticlone" and checks[0][1]

    print("stimclone smoke test passed")


if __name__ == "__main__":
    main()
