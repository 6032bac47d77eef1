"""Restriction of the pencil to the kernel chain and its closed-form solve.

On the stabilized kernels X_ker = ker R_r(mu)^p and Z_ker = ker R_l(mu)^p
the operator A acts invertibly and N = E_ker A_ker^{-1} is nilpotent, so
the algebraic part of the DAE is solved by a finite derivative sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AKerSingular, DimensionMismatch
from .pencil import COND_CAP, Pencil, left_resolvent, right_resolvent
from .signals import Signal
from .subspaces import SubspaceBasis, null_space

NILPOTENT_TOL = 1e-10


@dataclass(frozen=True)
class KernelRestriction:
    basis_X_ker: SubspaceBasis
    basis_Z_ker: SubspaceBasis
    A_ker: np.ndarray
    E_ker: np.ndarray
    A_ker_inv: np.ndarray
    N: np.ndarray
    nilpotency_degree: int

    @property
    def dim(self) -> int:
        return self.basis_X_ker.rank


def _nilpotency_degree(N: np.ndarray, p_int: int) -> int:
    if N.shape[0] == 0:
        return 0
    scale = max(np.linalg.norm(N, 2), 1.0)
    M = np.eye(N.shape[0], dtype=complex)
    for d in range(p_int + 1):
        if np.linalg.norm(M, 2) <= NILPOTENT_TOL * scale ** d:
            return d
        M = M @ N
    raise AKerSingular(
        f"E_ker A_ker^-1 is not nilpotent of degree <= {p_int}")


def restrict_to_kernel(p: Pencil, mu: complex, p_int: int) -> KernelRestriction:
    """Coordinates of (E, A) between X_ker and Z_ker, with A inverted."""
    Rr = right_resolvent(p, mu)
    Rl = left_resolvent(p, mu)
    # absolute rank floor: powers of a nilpotent-ish map may be pure noise
    sx = np.linalg.norm(Rr, 2) ** p_int
    sz = np.linalg.norm(Rl, 2) ** p_int
    Vx = null_space(np.linalg.matrix_power(Rr, p_int), scale=sx)
    Vz = null_space(np.linalg.matrix_power(Rl, p_int), scale=sz)
    if Vx.rank != Vz.rank:
        raise AKerSingular(
            f"kernel dimensions differ: {Vx.rank} vs {Vz.rank}")
    if Vx.rank == 0:
        z = np.zeros((0, 0), dtype=complex)
        return KernelRestriction(Vx, Vz, z, z, z, z, 0)
    # A must map X_ker into Z_ker; escaping mass signals an invalid p_int
    AVx = p.A @ Vx.basis
    leak = np.linalg.norm(AVx - Vz.basis @ (Vz.basis.conj().T @ AVx), 2)
    if leak > 1e-8 * max(np.linalg.norm(p.A, 2), 1.0):
        raise AKerSingular(f"A does not preserve the kernel pair (leak {leak:.2e})")
    A_ker = Vz.basis.conj().T @ AVx
    E_ker = Vz.basis.conj().T @ p.E @ Vx.basis
    if np.linalg.cond(A_ker) > COND_CAP:
        raise AKerSingular("A restricted to the kernel is numerically singular")
    A_ker_inv = np.linalg.solve(A_ker, np.eye(A_ker.shape[0], dtype=complex))
    N = E_ker @ A_ker_inv
    degree = _nilpotency_degree(N, p_int)
    return KernelRestriction(Vx, Vz, A_ker, E_ker, A_ker_inv, N, degree)


def solve_kernel_inhomogeneity(k: KernelRestriction, f: Signal,
                               p_int: int) -> Signal:
    """x(t) = -sum_{i=0}^{p} A_ker^{-1} N^i f^(i)(t) in kernel coordinates.

    The sum formally runs to i = p although nilpotency kills the top term;
    the stated bound is kept and the vanishing is effectively asserted by
    N^p = 0.
    """
    if len(f.shape) != 1 or f.shape[0] != k.dim:
        raise DimensionMismatch(
            f"signal shape {f.shape} vs kernel dimension {k.dim}")
    if k.dim == 0:
        return Signal.zero(0)
    acc = Signal.zero(k.dim)
    Ni = np.eye(k.dim, dtype=complex)
    for i in range(p_int + 1):
        acc = acc + f.derivative(i).apply(k.A_ker_inv @ Ni).scale(-1)
        Ni = Ni @ k.N
    return acc
