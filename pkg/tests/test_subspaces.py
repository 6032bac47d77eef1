"""Stabilized range chains, decomposition levels and block structure."""

import numpy as np
import pytest

from daesemi import (Pencil, SubspaceBasis, check_disjointness,
                     hilbert_decomposition, intersection_dim, make_transport,
                     make_weierstrass, principal_angles, stabilized_sequences)
from daesemi.subspaces import (block_left_resolvent, complement_in,
                               decomposition_basis, null_space, orth_range)

from conftest import nilpotent_of_index

MU = 2.0


def test_orth_and_null_are_complementary():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(5, 5)) @ np.diag([1, 1, 1, 0, 0]) \
        @ rng.normal(size=(5, 5))
    ran = orth_range(M)
    ker = null_space(M)
    assert ran.rank == 3 and ker.rank == 2
    assert np.allclose(M @ ker.basis, 0, atol=1e-10)


def test_principal_angles_orthogonal_planes():
    U = SubspaceBasis(np.eye(4)[:, :2].astype(complex), 4)
    V = SubspaceBasis(np.eye(4)[:, 2:].astype(complex), 4)
    ang = principal_angles(U, V)
    assert np.allclose(ang, np.pi / 2)
    assert intersection_dim(U, V) == 0
    assert intersection_dim(U, U) == 2


def test_principal_angles_small_angles_resolved():
    # the sine-based route resolves angles far below sqrt(eps)
    eps = 1e-12
    U = SubspaceBasis(np.array([[1.0], [0.0]], dtype=complex), 2)
    v = np.array([[1.0], [eps]], dtype=complex)
    V = SubspaceBasis(v / np.linalg.norm(v), 2)
    ang = principal_angles(U, V)
    assert abs(ang[0] - eps) < 1e-14


def test_complement_in():
    outer = SubspaceBasis(np.eye(3, dtype=complex), 3)
    inner = SubspaceBasis(np.eye(3, dtype=complex)[:, :1], 3)
    comp = complement_in(outer, inner)
    assert comp.rank == 2
    assert np.allclose(inner.basis.conj().T @ comp.basis, 0, atol=1e-10)


def test_chains_diag(diag_pencil):
    rep = stabilized_sequences(diag_pencil, MU)
    assert rep.X_ran.rank == 2 and rep.X_ker.rank == 0
    assert rep.stagnation_k == 0


@pytest.mark.parametrize("k", [2, 3])
def test_chains_pure_nilpotent(k):
    rep = hilbert_decomposition(nilpotent_of_index(k), MU)
    assert rep.X_ran.rank == 0 and rep.X_ker.rank == k
    assert rep.stagnation_k == k
    assert [w.rank for w in rep.W_X] == [1] * k
    # the level complements tile the whole space with the stagnated range
    assert rep.X_ran.rank + sum(w.rank for w in rep.W_X) == k


def test_decomposition_mixed():
    p, orc = make_weierstrass(2, 2, 2, seed=1)
    rep = hilbert_decomposition(p, MU)
    assert rep.X_ran.rank == 2 and rep.X_ker.rank == 2
    flags = check_disjointness(rep, p)
    assert flags.dim_Xran_cap_Xker == 0
    assert flags.dim_Zran_cap_Zker == 0


def test_block_left_resolvent_structure():
    p, _ = make_weierstrass(2, 3, 3, seed=2)
    rep = hilbert_decomposition(p, MU)
    B, slices = block_left_resolvent(rep, p, MU)
    assert len(slices) == rep.stagnation_k + 1
    # rows below the first block row vanish on and left of the diagonal
    for i in range(1, len(slices)):
        for j in range(i + 1):
            assert np.linalg.norm(B[slices[i], slices[j]]) < 1e-8
    U = decomposition_basis(rep, side="Z")
    assert np.allclose(U.conj().T @ U, np.eye(p.n_z), atol=1e-10)


def test_transport_structure():
    n, m = 8, 8
    p = make_transport(n, m)
    rep = hilbert_decomposition(p, MU)
    # algebraic directions are exactly the second segment
    ref = np.zeros((n + m, m), dtype=complex)
    ref[n:, :] = np.eye(m)
    ang = principal_angles(rep.X_ker, SubspaceBasis(ref, n + m))
    assert rep.X_ker.rank == m
    assert ang.max() < 1e-10
    # dynamic constraint directions are the first block of coordinates
    refz = np.zeros((n + m + 2, n), dtype=complex)
    refz[:n, :n] = np.eye(n)
    angz = principal_angles(rep.Z_ran, SubspaceBasis(refz, n + m + 2))
    assert rep.Z_ran.rank == n
    assert angz.max() < 1e-8
