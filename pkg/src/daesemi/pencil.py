"""Matrix pencils (E, A), resolvents and index estimation.

The pencil lives between spaces of dimension n_x and n_z.  Square pencils
admit the resolvent (lam*E - A)^{-1}; rectangular ones are analysis-only and
use the least-squares (Moore-Penrose) resolvent, which is the discrete
analogue of an operator that is invertible between function spaces of
different "coordinate" dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotRegularOnRay, ShapeMismatch, SingularAtLambda

COND_CAP = 1e12
RANK_RCOND = 1e-10
TOL_SLOPE = 0.15


@dataclass(frozen=True)
class Pencil:
    """The pair (E, A) defining d/dt(E x) = A x + f."""

    E: np.ndarray
    A: np.ndarray
    omega_hint: float | None = None
    name: str = ""

    def __post_init__(self):
        E = np.asarray(self.E, dtype=complex)
        A = np.asarray(self.A, dtype=complex)
        if E.ndim != 2 or E.shape != A.shape:
            raise ShapeMismatch(f"E {E.shape} vs A {A.shape}")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)

    @property
    def n_x(self) -> int:
        return self.E.shape[1]

    @property
    def n_z(self) -> int:
        return self.E.shape[0]

    @property
    def is_square(self) -> bool:
        return self.n_x == self.n_z

    @property
    def scale(self) -> float:
        return float(np.linalg.norm(self.E, 2) + np.linalg.norm(self.A, 2))


@dataclass(frozen=True)
class IndexReport:
    sample_points: np.ndarray
    norms: np.ndarray
    fitted_slope: float
    p_res: int
    growth_constant: float
    omega_used: float
    p_res_vertical: int | None = None
    axis_consistent: bool = True


@dataclass(frozen=True)
class Chain:
    """x_1 in ker E, E x_{i+1} = A x_i."""

    vectors: tuple[np.ndarray, ...]

    @property
    def length(self) -> int:
        return len(self.vectors)


def pencil_matrix(p: Pencil, lam: complex) -> np.ndarray:
    return lam * p.E - p.A


def resolvent(p: Pencil, lam: complex, cond_cap: float = COND_CAP) -> np.ndarray:
    """(lam E - A)^{-1}; least-squares pseudoinverse for rectangular pencils."""
    M = pencil_matrix(p, lam)
    if not p.is_square:
        # analysis-only: full column rank required
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= s[0] / cond_cap:
            raise SingularAtLambda(f"rank-deficient at lambda={lam}")
        return np.linalg.pinv(M, rcond=RANK_RCOND)
    try:
        cond = np.linalg.cond(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SingularAtLambda(str(exc)) from exc
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularAtLambda(f"cond {cond:.2e} at lambda={lam}")
    return np.linalg.solve(M, np.eye(p.n_z, dtype=complex))


def right_resolvent(p: Pencil, lam: complex) -> np.ndarray:
    """R_r(lam) = (lam E - A)^{-1} E, acting on the x-space."""
    return resolvent(p, lam) @ p.E


def left_resolvent(p: Pencil, lam: complex) -> np.ndarray:
    """R_l(lam) = E (lam E - A)^{-1}, acting on the z-space."""
    return p.E @ resolvent(p, lam)


def _fit_slope(lams: np.ndarray, norms: np.ndarray) -> float:
    x = np.log(lams)
    y = np.log(norms)
    A = np.vstack([x, np.ones_like(x)]).T
    slope, _ = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(slope)


def _p_from_slope(slope: float) -> int:
    return max(0, math.ceil(slope + 1.0 - TOL_SLOPE))


def estimate_resolvent_index(p: Pencil, lam_min: float = 10.0,
                             lam_max: float = 1e3,
                             n_samples: int = 16) -> IndexReport:
    """Fit the growth exponent of ||(lam E - A)^{-1}|| on the real ray.

    Also fits along a vertical line as a cross-check, since the half-plane
    bound is only exercised on the real axis.  Sampling relaxes the usual
    condition-number cap: resolvent norms growing like lam**p_res are the
    very thing being measured and must not be mistaken for singularity.
    """
    if n_samples < 8:
        raise ValueError("need at least 8 sample points")
    omega = p.omega_hint if p.omega_hint is not None else 0.0
    lam_min = max(lam_min, omega + 1.0, 1.0)
    lams = np.geomspace(lam_min, lam_max, n_samples)
    sample_cap = 1e15
    norms = []
    for lam in lams:
        try:
            norms.append(np.linalg.norm(resolvent(p, lam, cond_cap=sample_cap), 2))
        except SingularAtLambda as exc:
            raise NotRegularOnRay(f"singular sample at {lam}") from exc
    norms = np.array(norms)
    slope = _fit_slope(lams, norms)
    p_res = _p_from_slope(slope)
    # growth constant C with ||resolvent|| <= C |lam|^{p_res - 1}
    C = float(np.max(norms / lams ** (p_res - 1)))

    # vertical-line cross-check at fixed real part
    sigma = lam_min
    heights = np.geomspace(lam_min, lam_max, n_samples)
    try:
        vnorms = np.array([np.linalg.norm(
            resolvent(p, sigma + 1j * h, cond_cap=sample_cap), 2)
            for h in heights])
        vlams = np.abs(sigma + 1j * heights)
        p_vert = _p_from_slope(_fit_slope(vlams, vnorms))
    except SingularAtLambda:
        p_vert = None
    return IndexReport(sample_points=lams, norms=norms, fitted_slope=slope,
                       p_res=p_res, growth_constant=C, omega_used=lam_min,
                       p_res_vertical=p_vert,
                       axis_consistent=(p_vert is None or p_vert == p_res))


def chain_index(p: Pencil, tol: float = 1e-8,
                max_length: int | None = None) -> tuple[int, list[Chain]]:
    """Longest chain x_1 in ker E, E x_{i+1} = A x_i, with witnesses.

    Works on the subspace of all partial chains (x_1, ..., x_j) stacked in
    C^{j*n} rather than extending individual kernel vectors, because for a
    general pencil only special kernel directions admit long chains and
    each extension step is determined only up to ker E.
    """
    if max_length is None:
        max_length = p.n_x + 1
    n = p.n_x
    u, s, vh = np.linalg.svd(p.E)
    rank = int(np.sum(s > (s[0] * RANK_RCOND if s.size else 0)))
    kernel = vh[rank:].conj().T  # columns span ker E
    if kernel.shape[1] == 0:
        return 0, []
    scale = max(p.scale, 1.0)
    # G holds a basis of the space of length-j chains, stacked by level
    G = kernel
    q = 1
    best = G
    while q < max_length:
        tips = G[-n:, :]
        d = G.shape[1]
        # solve  E y = A x_j  jointly: null space of [A tips | -E]
        M = np.hstack([p.A @ tips, -p.E]) / scale
        ns = null_space_matrix(M)
        if ns.size == 0:
            break
        c, y = ns[:d, :], ns[d:, :]
        ext = np.vstack([G @ c, y])
        # discard solutions whose chain head (hence whole chain) vanishes
        head_rank = np.linalg.matrix_rank(ext[:n, :], tol=tol)
        if head_rank == 0:
            break
        G = ext
        best = G
        q += 1
    heads = np.linalg.norm(best[:n, :], axis=0)
    vecs = best[:, int(np.argmax(heads))]
    witness = Chain(tuple(vecs.reshape(q, n)))
    return q, [witness]


def null_space_matrix(M: np.ndarray, rcond: float = RANK_RCOND) -> np.ndarray:
    u, s, vh = np.linalg.svd(M)
    tol = s[0] * rcond if s.size else 0.0
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T
