"""Integrated semigroups of a matrix pencil and their verification.

S_r(t) is the p-fold time integral of the solution propagator on X_ran,
characterized by R_r(lam) x0 = lam^p * Laplace[S_r(.) x0](lam).  The
closed-form backend restricts R_r(mu) to X_ran, inverts it to obtain the
generator A_R = mu I - (restricted R_r(mu))^{-1}, and integrates the
matrix exponential analytically.  The contour backend inverts
R_r(lam) x0 / lam^p numerically and needs no invertibility.

S_l comes from the transformed pencil (E (mu E - A)^{-1}, A (mu E - A)^{-1}),
whose right objects coincide with the left objects of the original pencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ClosedFormUnavailable, DisjointnessViolated,
                     NotInXran, SingularAtLambda)
from .laplace import bromwich_invert, contour_for
from .pencil import COND_CAP, Pencil, estimate_resolvent_index, resolvent
from .signals import Signal
from .subspaces import (DecompositionReport, check_disjointness,
                        hilbert_decomposition)

XRAN_TOL = 1e-8
EIGVEC_COND_CAP = 1e8


def propagator_signal(M: np.ndarray) -> Signal:
    """exp(t M) as a matrix-valued exp-polynomial via eigendecomposition.

    Requires M to be diagonalizable with a well-conditioned eigenbasis.
    """
    r = M.shape[0]
    if r == 0:
        return Signal.zero((0, 0))
    w, Q = np.linalg.eig(M)
    if np.linalg.cond(Q) > EIGVEC_COND_CAP:
        raise ClosedFormUnavailable(
            "generator eigenbasis too ill-conditioned for closed form")
    Qinv = np.linalg.solve(Q, np.eye(r, dtype=complex))
    terms = [(np.outer(Q[:, k], Qinv[k, :]), 0, w[k]) for k in range(r)]
    return Signal.from_terms(terms, shape=(r, r))


@dataclass
class SemigroupEvaluator:
    """Configured evaluator of S_r(t) (and lazily S_l, S_r^(p))."""

    pencil: Pencil
    mu: complex
    p: int
    backend: str
    decomposition: DecompositionReport
    omega: float
    growth_C: float
    V: np.ndarray                      # orthonormal basis of X_ran
    A_R: np.ndarray | None             # generator on X_ran coordinates
    prop: Signal | None                # exp(t A_R), matrix signal
    S_coord: Signal | None             # p-fold antiderivative of prop
    _left: "SemigroupEvaluator | None" = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return self.V.shape[1]

    @property
    def closed_form_available(self) -> bool:
        return self.S_coord is not None or self.rank == 0

    def project(self, x0: np.ndarray) -> np.ndarray:
        """Coordinates of x0 in X_ran; rejects vectors outside it."""
        x0 = np.asarray(x0, dtype=complex)
        c = self.V.conj().T @ x0
        dist = np.linalg.norm(x0 - self.V @ c)
        if dist > XRAN_TOL * max(np.linalg.norm(x0), 1.0):
            raise NotInXran(f"distance to the range space is {dist:.2e}")
        return c


def build_evaluator(p: Pencil, mu: complex | None = None, p_int: int | None = None,
                    backend: str = "closed_form",
                    decomposition: DecompositionReport | None = None) -> SemigroupEvaluator:
    if backend not in ("closed_form", "contour"):
        raise ValueError(f"unknown backend {backend!r}")
    omega = p.omega_hint if p.omega_hint is not None else 0.0
    if p_int is None:
        p_int = estimate_resolvent_index(p).p_res + 1
    if mu is None:
        mu = omega + 2.0
    if decomposition is None:
        decomposition = hilbert_decomposition(p, mu)
    V = decomposition.X_ran.basis
    r = V.shape[1]
    A_R = prop = S_coord = None
    closed_err = None
    if r > 0:
        R_restr = V.conj().T @ (resolvent(p, mu) @ p.E) @ V
        try:
            if np.linalg.cond(R_restr) > COND_CAP:
                raise ClosedFormUnavailable(
                    "R_r(mu) is not invertible on the range space "
                    "(range and kernel overlap)")
            A_R = mu * np.eye(r) - np.linalg.solve(
                R_restr, np.eye(r, dtype=complex))
            prop = propagator_signal(A_R)
            S_coord = prop.antiderivative(p_int)
        except ClosedFormUnavailable as exc:
            closed_err = exc
            A_R = prop = S_coord = None
    if backend == "closed_form" and r > 0 and S_coord is None:
        raise closed_err
    if A_R is not None and A_R.size:
        omega_growth = max(float(np.max(np.linalg.eigvals(A_R).real)), omega)
    else:
        omega_growth = omega
    return SemigroupEvaluator(pencil=p, mu=mu, p=p_int, backend=backend,
                              decomposition=decomposition, omega=omega_growth,
                              growth_C=1.0, V=V, A_R=A_R, prop=prop,
                              S_coord=S_coord)


def _left_evaluator(ev: SemigroupEvaluator) -> SemigroupEvaluator:
    if ev._left is None:
        inv = resolvent(ev.pencil, ev.mu)
        tp = Pencil(ev.pencil.E @ inv, ev.pencil.A @ inv,
                    omega_hint=ev.pencil.omega_hint,
                    name=ev.pencil.name + ":left")
        ev._left = build_evaluator(tp, mu=ev.mu, p_int=ev.p,
                                   backend=ev.backend)
    return ev._left


def eval_S_r(ev: SemigroupEvaluator, t: float, x0: np.ndarray) -> np.ndarray:
    """S_r(t) x0 for x0 in X_ran."""
    c = ev.project(x0)
    if ev.rank == 0 or t == 0:
        return np.zeros(ev.pencil.n_x, dtype=complex)
    if ev.backend == "closed_form":
        return ev.V @ (ev.S_coord(t) @ c)
    x0p = ev.V @ c
    pen, pp = ev.pencil, ev.p

    def F(lam):
        return (resolvent(pen, lam, cond_cap=1e15) @ (pen.E @ x0p)) / lam ** pp

    return bromwich_invert(F, t, contour_for(t, omega=ev.omega))


def eval_S_l(ev: SemigroupEvaluator, t: float, z0: np.ndarray) -> np.ndarray:
    """S_l(t) z0 for z0 in Z_ran, via the transformed pencil."""
    return eval_S_r(_left_evaluator(ev), t, z0)


def cp_semigroup(ev: SemigroupEvaluator, t: float) -> np.ndarray:
    """The strongly continuous semigroup S_r^(p)(t) as a matrix on X_ran.

    Returns the ambient n x n matrix V exp(t A_R) V^H, which acts as the
    propagator on X_ran and as zero on its orthogonal complement.  Refuses
    when X_ran meets ker E nontrivially, since the propagator is only
    injectively determined under that disjointness.
    """
    flags = check_disjointness(ev.decomposition, ev.pencil)
    if not flags.disjoint_ranE:
        raise DisjointnessViolated(
            f"range space meets ker E (angle {flags.min_angle_kerE:.2e})")
    if ev.rank == 0:
        return np.zeros((ev.pencil.n_x, ev.pencil.n_x), dtype=complex)
    if ev.prop is None:
        raise ClosedFormUnavailable("propagator extraction needs the "
                                    "closed-form construction")
    return ev.V @ ev.prop(t) @ ev.V.conj().T


def f_norm(ev: SemigroupEvaluator, x0: np.ndarray, horizon: float = 10.0,
           n_grid: int = 200) -> float:
    """sup over [0, horizon] of ||exp(-omega t) S_r^(p)(t) x0||."""
    c = ev.project(x0)
    if ev.rank == 0:
        return 0.0
    if ev.prop is None:
        raise ClosedFormUnavailable("F-norm needs the closed-form propagator")
    ts = np.linspace(0.0, horizon, n_grid)
    vals = ev.prop(ts) @ c
    return float(np.max(np.exp(-ev.omega * ts)
                        * np.linalg.norm(vals, axis=1)))


@dataclass(frozen=True)
class PropertyReport:
    residuals: dict
    grid: tuple
    tol: float

    @property
    def passed(self) -> dict:
        return {k: v <= self.tol for k, v in self.residuals.items()}

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


def verify_properties(ev: SemigroupEvaluator,
                      time_grid=(0.1, 0.5, 1.0, 2.0),
                      tol: float = 1e-6) -> PropertyReport:
    """Residuals of the integrated-semigroup identity suite.

    (a) commutation with R_r(mu) on X_ran;
    (b) E S_r(t) = S_l(t) E on X_ran;
    (c) d/dt E S_r(t) x0 = A S_r(t) x0 + t^{p-1}/(p-1)! E x0;
    (d) A int_0^t S_r = E S_r(t) - t^p/p! E on X_ran;
    (f) the composition formula for S_r(t) S_r(s).
    Derivatives and integrals in (c), (d) are analytic; the composition
    integral in (f) uses 40-node Gauss-Legendre quadrature (the integrand
    is entire in the integration variable).
    """
    if not ev.closed_form_available:
        raise ClosedFormUnavailable("identity verification needs the "
                                    "closed-form representation")
    n = ev.pencil.n_x
    if ev.rank == 0:
        zero = {k: 0.0 for k in "abcdf"}
        return PropertyReport(zero, tuple(time_grid), tol)
    E, A, V, p = ev.pencil.E, ev.pencil.A, ev.V, ev.p
    S = ev.S_coord
    lev = _left_evaluator(ev)
    Rr = resolvent(ev.pencil, ev.mu) @ E
    scale = max(np.linalg.norm(E, 2) + np.linalg.norm(A, 2), 1.0)
    ts = np.asarray(time_grid, dtype=float)

    def mnorm(M):
        return float(np.linalg.norm(M, 2))

    res = dict.fromkeys("abcdf", 0.0)
    dS = S.derivative()
    intS = S.antiderivative()
    EV, AV = E @ V, A @ V
    for t in ts:
        St = S(t)
        S_amb = V @ St @ V.conj().T
        # (a) commutation with the right resolvent on X_ran
        res["a"] = max(res["a"], mnorm((Rr @ S_amb - S_amb @ Rr)
                                       @ (V @ V.conj().T)))
        # (b) intertwining with the left semigroup
        Slt = np.column_stack([eval_S_l(ev, t, EV[:, j])
                               for j in range(EV.shape[1])]) \
            if EV.shape[1] else np.zeros((ev.pencil.n_z, 0))
        res["b"] = max(res["b"], mnorm(E @ V @ St - Slt))
        # (c) p-times integrated equation (analytic derivative)
        lhs = EV @ dS(t)
        rhs = AV @ St + t ** (p - 1) / math.factorial(p - 1) * EV
        res["c"] = max(res["c"], mnorm(lhs - rhs))
        # (d) integral identity (analytic antiderivative)
        lhs = AV @ intS(t)
        rhs = EV @ St - t ** p / math.factorial(p) * EV
        res["d"] = max(res["d"], mnorm(lhs - rhs))
    # (f) composition formula, quadrature in the inner variable
    nodes, weights = np.polynomial.legendre.leggauss(40)
    for t in ts:
        for s in ts:
            lhs = S(t) @ S(s)
            mid, rad = t / 2.0, t / 2.0
            taus = mid + rad * nodes
            acc = np.zeros_like(lhs)
            for tau, w in zip(taus, weights):
                acc = acc + w * ((t - tau) ** (p - 1) * S(tau + s)
                                 - (t + s - tau) ** (p - 1) * S(tau))
            rhs = acc * rad / math.factorial(p - 1)
            res["f"] = max(res["f"], mnorm(lhs - rhs))
    res = {k: v / scale for k, v in res.items()}
    return PropertyReport(res, tuple(time_grid), tol)
