"""Full separability of three-qubit GHZ-diagonal states.

Write ``o = (rho18, rho27, rho36, rho54)`` and ``kappa = min rho_ii``. A state
is fully separable exactly when ``o / kappa`` lies in the convex hull ``K`` of
the surface

    S = {(cos(a+b+c), cos a, cos b, cos c)}

(twirled equatorial product states). The witness inequality
``|L(rho, X)| <= C(X) kappa`` is the support-function form of that statement.

The classifier evaluates the hull gauge in closed form:

* ``lambda5*lambda6*lambda7*lambda8 <= 0``: the boundary is the PPT cube.
* otherwise the ray through ``o`` leaves ``K`` either through a PPT face
  (whose cross-section is the 3x3 correlation-matrix elliptope) or through
  the curved surface ``mu = 1 - |lambda_-|``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog

from .errors import ConvergenceFailure, DomainError, GhzError, InvalidKappa
from .ghz_core import (
    DensityEntries,
    GhzDiagonalState,
    PauliCoefficients,
    canonicalize,
    from_density_entries,
    to_density_entries,
    to_pauli_coefficients,
)

EPS_CRIT = 1e-9
ZERO_PRODUCT = 1e-15
GRID_POINTS = 24
NEWTON_RESIDUAL = 1e-9


class Branch(enum.Enum):
    PPT = "PptBranch"
    PPT_FACE = "PptFaceBranch"
    MU = "MuBranch"


@dataclass(frozen=True)
class SeparabilityReport:
    branch: Branch
    lambda_minus: float
    kappa: float
    mu: float | None
    margin: float
    fully_separable: bool
    ppt: bool


@dataclass(frozen=True)
class WitnessVector:
    delta: float
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not any(self.as_array()):
            raise GhzError("witness vector must not be zero")

    def as_array(self) -> np.ndarray:
        return np.array([self.delta, self.alpha, self.beta, self.gamma], dtype=float)


@dataclass(frozen=True)
class AngleSet:
    a: float
    b: float
    c: float

    @property
    def d(self) -> float:
        return self.a + self.b + self.c

    def surface_point(self) -> np.ndarray:
        """(cos d, cos a, cos b, cos c), paired with (delta, alpha, beta, gamma)."""
        return np.cos([self.d, self.a, self.b, self.c])


def _as_witness(X) -> np.ndarray:
    if isinstance(X, WitnessVector):
        return X.as_array()
    arr = np.asarray(X, dtype=float)
    if arr.shape != (4,):
        raise GhzError("witness vector needs 4 components")
    if not np.any(arr):
        raise GhzError("witness vector must not be zero")
    return arr


def _coeffs(x) -> PauliCoefficients:
    if isinstance(x, PauliCoefficients):
        return x
    if isinstance(x, GhzDiagonalState):
        return to_pauli_coefficients(x)
    return PauliCoefficients(x)


def _entries(x) -> DensityEntries:
    if isinstance(x, DensityEntries):
        return x
    return to_density_entries(x)


# -- closed-form pieces -------------------------------------------------------


def mu(coeffs) -> float:
    l5, l6, l7, l8 = _coeffs(coeffs).xxx_family
    prod = l5 * l6 * l7 * l8
    if prod <= 0.0:
        raise DomainError("mu needs lambda5*lambda6*lambda7*lambda8 > 0")
    radicand = (l5 * l6 + l7 * l8) * (l5 * l7 + l6 * l8) * (l5 * l8 + l6 * l7)
    return math.sqrt(max(radicand, 0.0) / prod)


def is_ppt(rho, eps_crit: float = EPS_CRIT) -> bool:
    rho = _entries(rho)
    return bool(np.abs(rho.offdiag).max() <= rho.diag.min() + eps_crit)


def sufficient_linear(coeffs, eps_crit: float = EPS_CRIT) -> bool:
    c = _coeffs(coeffs)
    return 1.0 - abs(c.lambda_minus) - np.abs(c.xxx_family).sum() >= -eps_crit


def elliptope_slack(offdiag) -> float:
    """Where the ray through ``offdiag`` meets the PPT cube, test the face.

    The face ``y_i = s`` of the hull is the set of ``(x, y, z)`` with
    ``1 - x^2 - y^2 - z^2 + 2 s x y z >= 0``; returns that expression for the
    rescaled point (non-negative means the ray exits through the face).
    """
    o = np.asarray(offdiag, dtype=float)
    i = int(np.argmax(np.abs(o)))
    m = abs(o[i])
    if m == 0.0:
        return 1.0
    s = math.copysign(1.0, o[i])
    x, y, z = np.delete(o, i) / m
    return 1.0 - x * x - y * y - z * z + 2.0 * s * x * y * z


def is_fully_separable(state: GhzDiagonalState, eps_crit: float = EPS_CRIT) -> SeparabilityReport:
    state, _ = canonicalize(state)
    coeffs = to_pauli_coefficients(state)
    rho = to_density_entries(state)
    kappa = float(rho.diag.min())
    lam_minus = coeffs.lambda_minus
    max_off = float(np.abs(rho.offdiag).max())
    ppt_margin = kappa - max_off
    ppt = ppt_margin >= -eps_crit
    l5, l6, l7, l8 = coeffs.xxx_family
    prod = l5 * l6 * l7 * l8

    if prod <= ZERO_PRODUCT:
        branch, mu_val, margin = Branch.PPT, None, ppt_margin
    else:
        mu_val = mu(coeffs)
        if elliptope_slack(rho.offdiag) >= 0.0:
            branch, margin = Branch.PPT_FACE, ppt_margin
        else:
            branch, margin = Branch.MU, 1.0 - abs(lam_minus) - mu_val
    return SeparabilityReport(
        branch=branch,
        lambda_minus=lam_minus,
        kappa=kappa,
        mu=mu_val,
        margin=float(margin),
        fully_separable=bool(margin >= -eps_crit),
        ppt=bool(ppt),
    )


def hull_gauge(offdiag) -> float:
    """Smallest t with offdiag in t*K (closed form); separable iff <= kappa."""
    o = np.asarray(offdiag, dtype=float)
    max_off = float(np.abs(o).max())
    lam = 2.0 * (_HADAMARD @ o)
    prod = float(np.prod(lam))
    if prod <= ZERO_PRODUCT or elliptope_slack(o) >= 0.0:
        return max_off
    return mu(np.concatenate([[0.0, 0.0, 0.0], lam])) / 8.0


# (lambda5, lambda6, lambda7, lambda8) = 2 * _HADAMARD @ offdiag
_HADAMARD = np.array(
    [[1, 1, 1, 1], [-1, -1, 1, 1], [-1, 1, -1, 1], [-1, 1, 1, -1]], dtype=float
)


# -- witnesses ----------------------------------------------------------------


def witness_value(rho, X) -> float:
    return float(_entries(rho).offdiag @ _as_witness(X))


def _objective(X, ang):
    a, b, c = ang[..., 0], ang[..., 1], ang[..., 2]
    return X[0] * np.cos(a + b + c) + X[1] * np.cos(a) + X[2] * np.cos(b) + X[3] * np.cos(c)


def _gradient(X, ang):
    a, b, c = ang[..., 0], ang[..., 1], ang[..., 2]
    sd = X[0] * np.sin(a + b + c)
    return -np.stack([sd + X[1] * np.sin(a), sd + X[2] * np.sin(b), sd + X[3] * np.sin(c)], -1)


def _hessian(X, ang):
    a, b, c = ang[..., 0], ang[..., 1], ang[..., 2]
    cd = -X[0] * np.cos(a + b + c)
    H = np.empty(ang.shape[:-1] + (3, 3))
    H[...] = cd[..., None, None]
    H[..., 0, 0] -= X[1] * np.cos(a)
    H[..., 1, 1] -= X[2] * np.cos(b)
    H[..., 2, 2] -= X[3] * np.cos(c)
    return H


@lru_cache(maxsize=None)
def _angle_grid(n: int = GRID_POINTS):
    g = -math.pi + 2.0 * math.pi * np.arange(n) / n
    A, B, C = np.meshgrid(g, g, g, indexing="ij")
    ang = np.stack([A.ravel(), B.ravel(), C.ravel()], -1)
    pts = np.stack(
        [np.cos(ang.sum(-1)), np.cos(ang[:, 0]), np.cos(ang[:, 1]), np.cos(ang[:, 2])], -1
    )
    ang.setflags(write=False)
    pts.setflags(write=False)
    return ang, pts


def _refine(X, ang, iters: int = 60):
    """Batched damped Newton ascent on the angle objective."""
    ang = ang.copy()
    val = _objective(X, ang)
    for _ in range(iters):
        g = _gradient(X, ang)
        if np.abs(g).max() < 1e-14:
            break
        H = _hessian(X, ang)
        w, V = np.linalg.eigh(H)
        # saddle-free Newton: flip positive curvature so the step always ascends
        floor = 1e-10 * (1.0 + np.abs(w).max(-1, keepdims=True))
        w = -np.maximum(np.abs(w), floor)
        step = -np.einsum("kij,kj,klj,kl->ki", V, 1.0 / w, V, g)
        # a near-singular Hessian can propose huge steps; cos loses accuracy at large angles
        norm = np.linalg.norm(step, axis=-1, keepdims=True)
        step *= np.minimum(1.0, 1.0 / np.maximum(norm, 1e-300))
        t = np.ones(len(ang))
        new = ang + step
        new_val = _objective(X, new)
        for _ in range(30):
            bad = new_val < val - 1e-15
            if not bad.any():
                break
            t = np.where(bad, t * 0.5, t)
            new = ang + t[:, None] * step
            new_val = _objective(X, new)
        ok = new_val >= val - 1e-15
        ang = np.where(ok[:, None], _wrap(new), ang)
        val = np.where(ok, new_val, val)
    return ang, val, np.abs(_gradient(X, ang)).max(-1)


def _wrap(theta):
    return (np.asarray(theta) + math.pi) % (2.0 * math.pi) - math.pi


def witness_bound(X) -> tuple[float, AngleSet]:
    """C(X) = sup_{a,b,c} delta cos(a+b+c) + alpha cos a + beta cos b + gamma cos c.

    Returns the supremum and a maximizing AngleSet; the angles satisfy the
    stationarity conditions ``delta sin d = -alpha sin a = -beta sin b =
    -gamma sin c`` to within 1e-9.
    """
    X = _as_witness(X)
    if np.all(X >= 0.0):
        return float(X.sum()), AngleSet(0.0, 0.0, 0.0)
    ang, pts = _angle_grid()
    vals = pts @ X
    top = vals.max()
    # Any grid point within half a cell of the true maximizer is at most this
    # far below it, so every cell that can lead to the global maximum is kept.
    h = math.pi / GRID_POINTS
    curvature = 3.0 * abs(X[0]) + np.abs(X[1:]).max()
    window = 0.5 * curvature * 3.0 * h * h + 1e-12
    idx = np.flatnonzero(vals >= top - window)
    if len(idx) > 64:
        idx = idx[np.argsort(vals[idx])[-64:]]
    cand, cval, resid = _refine(X, ang[idx])
    order = np.lexsort((cand[:, 2], cand[:, 1], cand[:, 0], -np.round(cval, 13)))
    for k in order:
        if resid[k] <= NEWTON_RESIDUAL:
            if cval[k] < top - 1e-12:
                break
            a, b, c = _wrap(cand[k])
            return float(cval[k]), AngleSet(float(a), float(b), float(c))
    raise ConvergenceFailure(
        "no stationary point matches the grid optimum",
        best=float(cval.max()),
        residual=float(resid.min()),
    )


def stationarity_residual(X, angles: AngleSet) -> float:
    """Largest violation of delta sin d = -alpha sin a = -beta sin b = -gamma sin c."""
    X = _as_witness(X)
    return float(np.abs(_gradient(X, np.array([angles.a, angles.b, angles.c]))).max())


@dataclass(frozen=True)
class WitnessSearch:
    """Outcome of the witness search for one state.

    ``lower`` is certified by ``witness`` (normalized so C(witness) = 1);
    ``upper`` by an explicit convex decomposition over surface points.
    """

    lower: float
    upper: float
    kappa: float
    witness: np.ndarray
    iterations: int

    @property
    def violated(self) -> bool:
        return self.lower > self.kappa + EPS_CRIT


_EVEN_SIGNS = np.array(
    [s for s in np.array(np.meshgrid(*[[1.0, -1.0]] * 4, indexing="ij")).reshape(4, -1).T
     if np.prod(s) > 0]
)


@lru_cache(maxsize=None)
def _seed_columns(n: int = 6):
    g = -math.pi + 2.0 * math.pi * np.arange(n) / n
    A, B, C = np.meshgrid(g, g, g, indexing="ij")
    pts = np.stack([np.cos(A + B + C).ravel(), np.cos(A).ravel(), np.cos(B).ravel(),
                    np.cos(C).ravel()], -1)
    pts = np.unique(np.round(np.vstack([_EVEN_SIGNS, pts]), 15), axis=0)
    pts.setflags(write=False)
    return pts


def witness_search(state, max_witnesses: int = 200, tol: float = 1e-10,
                   threshold: float | None = None) -> WitnessSearch:
    """Bracket max_X |L(rho, X)| / C(X) by column generation.

    The restricted linear program over known surface points gives an upper
    bound and a dual vector X; pricing X with :func:`witness_bound` gives a
    certified lower bound and a new surface point. Stops once the bracket is
    narrower than ``tol`` or, when ``threshold`` is given, once it lies
    entirely on one side of it.
    """
    rho = _entries(state)
    o = np.asarray(rho.offdiag, dtype=float)
    kappa = float(rho.diag.min())
    if not np.any(o):
        return WitnessSearch(0.0, 0.0, kappa, np.array([1.0, 0.0, 0.0, 0.0]), 0)
    cols = [_seed_columns()]
    lower, best_X = 0.0, None
    for it in range(1, max_witnesses + 1):
        S = np.vstack(cols)
        res = linprog(np.ones(len(S)), A_eq=S.T, b_eq=o, bounds=(0, None), method="highs")
        if res.status != 0:
            raise ConvergenceFailure(f"restricted hull LP failed: {res.message}")
        upper = float(res.fun)
        X = np.asarray(res.eqlin.marginals, dtype=float)
        if not np.any(X):
            X = np.sign(o)
        C, angles = witness_bound(X)
        cand = float(X @ o) / C
        if cand > lower:
            lower, best_X = cand, X / C
        if upper - lower <= tol:
            break
        if threshold is not None and (upper <= threshold or lower > threshold + EPS_CRIT):
            break
        cols.append(angles.surface_point()[None, :])
    return WitnessSearch(lower, upper, kappa, best_X, it)


def necessary_check(state, n_witnesses: int = 200) -> bool:
    """True unless some witness X gives |L(rho, X)| > C(X) kappa (+ EPS_CRIT)."""
    rho = _entries(state)
    search = witness_search(rho, max_witnesses=n_witnesses, threshold=float(rho.diag.min()))
    return not search.violated


# -- boundary surfaces ----------------------------------------------------------


def boundary_point(angles: AngleSet, kappa: float = 0.125, diag=None) -> DensityEntries:
    """Entries of the boundary state with rho18 = kappa cos d, rho27 = kappa cos b,
    rho36 = kappa cos a, rho54 = kappa cos c.

    With ``diag`` omitted the diagonal is flat when kappa = 1/8 and otherwise
    ``(kappa, r, r, r)`` with ``r = (1/2 - kappa)/3``.
    """
    if not 0.0 < kappa <= 0.125 + 1e-15:
        raise InvalidKappa(f"kappa must lie in (0, 1/8], got {kappa!r}")
    if diag is None:
        if abs(kappa - 0.125) <= 1e-15:
            d = np.full(4, 0.125)
        else:
            r = (0.5 - kappa) / 3.0
            d = np.array([kappa, r, r, r])
    else:
        d = np.asarray(diag, dtype=float)
        if d.shape != (4,) or abs(d.min() - kappa) > 1e-12 or abs(2 * d.sum() - 1) > 1e-12:
            raise InvalidKappa("diag must sum to 1/2 and have minimum kappa")
    off = kappa * np.cos([angles.d, angles.b, angles.a, angles.c])
    return DensityEntries(d, off)


def boundary_state(angles: AngleSet, kappa: float = 0.125, diag=None) -> GhzDiagonalState:
    return from_density_entries(boundary_point(angles, kappa, diag))


def symmetric_border_curve(n_samples: int) -> np.ndarray:
    """Rows (a, u, v) with u = rho18/kappa = cos a, v = rho54/kappa = 4u^3 - 3u,
    for a evenly spaced on [0, pi/3]."""
    if n_samples < 2:
        raise GhzError("need at least 2 samples")
    a = np.linspace(0.0, math.pi / 3.0, n_samples)
    u = np.cos(a)
    v = 4.0 * u**3 - 3.0 * u
    return np.column_stack([a, u, v])
