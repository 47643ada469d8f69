"""Smoke tests of the python module against known closed-form values."""

import math

import pytest

import brinkman_fourier as bf


def ideal_params():
    p = bf.ModelParams()
    p.k1 = 1.5
    p.k2 = 1.0
    return p


def test_constitutive_closed_forms():
    p = ideal_params()
    e = math.e
    assert bf.free_energy(1.0, 1.0, p) == pytest.approx(0.0, abs=1e-14)
    assert bf.free_energy(e, 1.0, p) == pytest.approx(e, rel=1e-13)
    assert bf.entropy(1.0, 1.0, p) == pytest.approx(1.5, rel=1e-13)
    assert bf.internal_energy(2.0, 3.0, p) == pytest.approx(9.0, rel=1e-13)
    assert bf.pressure(2.0, 3.0, p) == pytest.approx(6.0, rel=1e-13)
    # ideal-gas ratio e = (3/2) p
    assert bf.internal_energy(1.7, 0.4, p) == pytest.approx(
        1.5 * bf.pressure(1.7, 0.4, p), rel=1e-13
    )


def test_entropy_inversion_roundtrip():
    p = ideal_params()
    s = bf.entropy(2.0, 5.0, p)
    assert bf.temperature_from_entropy(2.0, s, p) == pytest.approx(5.0, rel=1e-12)
    with pytest.raises(Exception):
        bf.entropy(-1.0, 1.0, p)


def test_specht_and_reverse_young():
    assert bf.specht_ratio(1.0) == 1.0
    assert bf.specht_ratio(4.0) == pytest.approx(1.2637, abs=1e-3)
    assert bf.specht_ratio(2.0) == pytest.approx(bf.specht_ratio(0.5), rel=1e-13)
    assert bf.reverse_young_check(4.0, 1.0, 0.5)
    assert bf.reverse_young_check(3.0, 3.0, 0.2)


def test_inverse_jensen():
    lhs, rhs, alpha, beta = bf.inverse_jensen_bound(
        [1.0, 2.0], [0.5, 0.5], 3.0, 1.0, 2.0, 1.5
    )
    assert lhs <= rhs + 1e-12
    assert alpha > 0.0


def test_brinkman_solve():
    p = ideal_params()
    n = 64
    L = 2 * math.pi
    xs = [(i + 0.5) * L / n for i in range(n)]
    rho = [1.0 + 0.3 * math.sin(x) for x in xs]
    theta = [1.0 + 0.2 * math.cos(x) for x in xs]

    sol = bf.solve_brinkman([n], [L], rho, theta, p)
    assert sol["rel_residual"] <= 1e-12
    assert sol["energy_identity_residual"] <= 1e-10
    assert max(abs(v) for v in sol["u"][0]) > 0.0

    # constant pressure: no flow at all
    quiet = bf.solve_brinkman([n], [L], [1.0] * n, [1.0] * n, p)
    assert max(abs(v) for v in quiet["u"][0]) == 0.0


def test_run_simulation_conservation():
    cfg = """{
        "initial": {"preset": "default"},
        "time": {"t_end": 0.3}
    }"""
    out = bf.run_simulation(cfg)
    assert out["termination"] == "completed"
    mass = out["mass"]
    assert max(abs(m - mass[0]) for m in mass) <= 1e-12 * mass[0]
    entropy = out["total_entropy"]
    assert all(b >= a - 1e-10 for a, b in zip(entropy, entropy[1:]))
    assert min(out["min_theta"]) > 0.0
    assert len(out["rho"]) == 128


def test_derive_check():
    assert bf.derive_check_passes() == 0
