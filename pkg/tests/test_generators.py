"""Example-pencil generators: structure, oracle exactness, reproducibility."""

import numpy as np
import pytest

from daesemi import (Signal, chain_index, estimate_resolvent_index,
                     make_hamiltonian, make_transport, make_weierstrass)
from daesemi.errors import BadShape


def test_transport_shapes_and_blocks():
    p = make_transport(4, 3)
    assert p.E.shape == (9, 7) and p.A.shape == (9, 7)
    assert np.allclose(p.E[:4, :4], np.eye(4))
    assert not np.any(p.E[4:, :])
    # boundary rows: sample at the left endpoint and interface matching
    assert np.allclose(p.A[7], -np.eye(7)[0])
    assert np.allclose(p.A[8], -np.eye(7)[3] + np.eye(7)[4])


def test_transport_upwind_rows():
    n, m = 5, 4
    p = make_transport(n, m)
    # first segment: -(x_i - x_{i-1}) / h1 with zero ghost at the inflow
    h1 = 1.0 / n
    assert np.allclose(p.A[0, 0], -1.0 / h1)
    assert np.allclose(p.A[2, 1], 1.0 / h1)
    # second segment couples to the last point of the first at its start
    h2 = 1.0 / m
    assert np.allclose(p.A[n, n - 1], 1.0 / h2)
    assert np.allclose(p.A[n, n], -1.0 / h2)


def test_transport_validation():
    with pytest.raises(BadShape):
        make_transport(1, 4)


def test_weierstrass_diag_and_nilpotent_special_cases():
    p, orc = make_weierstrass(1, 1, 1, seed=0, trivial_transforms=True)
    assert np.allclose(p.E, np.diag([1.0, 0.0]))
    assert p.A[1, 1] == 1.0
    p2, _ = make_weierstrass(0, 2, 2, seed=0, trivial_transforms=True)
    assert np.allclose(p2.E, [[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(p2.A, np.eye(2))


def test_weierstrass_index_matches_construction():
    p, orc = make_weierstrass(2, 2, 2, seed=42)
    assert estimate_resolvent_index(p).p_res == 2
    assert chain_index(p)[0] == 2


def test_weierstrass_oracle_residual():
    rng = np.random.default_rng(5)
    p, orc = make_weierstrass(3, 3, 3, seed=17)
    f = Signal.from_terms([(rng.normal(size=6), 2, -0.6),
                           (rng.normal(size=6), 0, 0.5j)])
    x0 = rng.normal(size=6)
    sol = orc.solve(x0, f)
    ts = np.linspace(0, 4, 17)
    res = sol.derivative().apply(p.E) - sol.apply(p.A) - f
    assert np.abs(res(ts)).max() < 1e-10
    # the differential part of the initial value is honored exactly
    u0 = (orc.S @ sol(0.0))[:3]
    assert np.allclose(u0, (orc.S @ x0.astype(complex))[:3], atol=1e-10)


def test_weierstrass_validation():
    with pytest.raises(BadShape):
        make_weierstrass(2, 2, 3, seed=0)
    with pytest.raises(BadShape):
        make_weierstrass(2, 0, 1, seed=0)


def test_weierstrass_reproducible():
    a, _ = make_weierstrass(2, 2, 2, seed=9)
    b, _ = make_weierstrass(2, 2, 2, seed=9)
    c, _ = make_weierstrass(2, 2, 2, seed=10)
    assert np.array_equal(a.E, b.E) and np.array_equal(a.A, b.A)
    assert not np.array_equal(a.E, c.E)


def test_hamiltonian_structure():
    p = make_hamiltonian(6, 4, seed=1)
    E, A = p.E, p.A
    assert np.allclose(E, E.conj().T)
    assert np.min(np.linalg.eigvalsh(E)) > -1e-12
    assert np.linalg.matrix_rank(E, tol=1e-10) == 4
    # dissipativity: Re <x, A x> <= 0
    H = (A + A.conj().T) / 2.0
    assert np.max(np.linalg.eigvalsh(H)) < 0.0


def test_hamiltonian_full_rank_is_ode():
    p = make_hamiltonian(5, 5, seed=2)
    assert estimate_resolvent_index(p).p_res <= 1


def test_hamiltonian_validation():
    with pytest.raises(BadShape):
        make_hamiltonian(3, 4, seed=0)
