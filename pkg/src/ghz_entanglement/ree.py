"""Relative entropy of entanglement and genuine entanglement.

For GHZ-diagonal states the closest fully separable state can be taken
GHZ-diagonal, so the REE reduces to a classical relative entropy
``sum_k p_k log2(p_k / q_k)`` minimized over separable ``q``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import (
    ConvergenceFailure,
    GhzError,
    NoValidRoot,
    PreconditionViolated,
    SupportMismatch,
)
from .ghz_core import (
    EPS_POS,
    DensityEntries,
    GhzDiagonalState,
    from_density_entries,
    from_probabilities,
    relabel_to_front,
    to_density_entries,
)
from .separability import EPS_CRIT, Branch, is_fully_separable, witness_bound

LN2 = math.log(2.0)
SYM_TOL = 1e-9


class Method(enum.Enum):
    SEPARABLE = "Separable"
    CLOSED_FORM_PI_OVER_4 = "ClosedFormPiOver4"
    FLAT_DIAGONAL_CUBIC = "FlatDiagonalCubic"
    TYPE2_CANDIDATE_I = "Type2CandidateI"
    TYPE2_CANDIDATE_II = "Type2CandidateII"
    NUMERIC_BOUNDARY = "NumericBoundary"
    PPT_FACE = "PptFace"


class Candidate(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class SpecialCaseSolution:
    t: float  # 2 cos(theta)
    delta: float | None
    p0: float
    candidate: Candidate | None


@dataclass(frozen=True)
class ClosestStateParams:
    """q_k = s_k + kappa_c cos(theta_k), q_{9-k} = s_k - kappa_c cos(theta_k)."""

    s: np.ndarray
    theta: np.ndarray  # (d, a, b, c) with d = a + b + c
    kappa_c: float
    xi: float | None = None

    def probabilities(self) -> np.ndarray:
        o = self.kappa_c * np.cos(self.theta)
        return np.concatenate([self.s + o, (self.s - o)[::-1]])


@dataclass(frozen=True)
class ReeResult:
    E: float
    closest: GhzDiagonalState
    method: Method
    detail: object = None
    gap: float | None = None  # certified bound on E - E_min (bits), when computed
    relabel: tuple = field(default=())


# -- relative entropy -----------------------------------------------------------


def relative_entropy(p, q, strict: bool = False) -> float:
    """S(p || q) in bits, with 0 log 0 = 0; +inf when the support of p is not
    contained in that of q (or SupportMismatch if ``strict``)."""
    p = p.p if isinstance(p, GhzDiagonalState) else np.asarray(p, dtype=float)
    q = q.p if isinstance(q, GhzDiagonalState) else np.asarray(q, dtype=float)
    mask = p > 0.0
    if np.any(q[mask] <= 0.0):
        if strict:
            raise SupportMismatch("p has weight where q vanishes")
        return math.inf
    return max(float(np.sum(p[mask] * np.log(p[mask] / q[mask]))) / LN2, 0.0)


def _q_from(diag, offdiag) -> np.ndarray:
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    return np.concatenate([diag + offdiag, (diag - offdiag)[::-1]])


def closest_params(sigma: GhzDiagonalState) -> ClosestStateParams:
    """Read (s, theta, kappa_c) off a boundary state; theta_k = arccos(o_k / kappa_c)."""
    rho = to_density_entries(sigma)
    kappa = float(rho.diag.min())
    ratio = np.clip(rho.offdiag / kappa, -1.0, 1.0) if kappa > 0 else np.zeros(4)
    return ClosestStateParams(rho.diag.copy(), np.arccos(ratio), kappa)


def optimality_gap(state: GhzDiagonalState, sigma: GhzDiagonalState) -> float:
    """Frank-Wolfe gap of S(rho || .) at sigma over the separable set (bits).

    The objective is convex in q, so ``S(rho||sigma) - E <= gap``. The linear
    minimization over separable q has two candidate extremes: all diagonal
    weight on one pair (kappa = 0), or a flat diagonal with off-diagonals on
    the witness surface (kappa = 1/8), the latter priced with C(X).
    """
    p, q = state.p, sigma.p
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    g = np.zeros(8)
    g[mask] = -p[mask] / q[mask] / LN2
    A = g[:4] + g[:3:-1]
    B = g[:4] - g[:3:-1]
    lmo = 0.5 * A.min()
    if np.any(B):
        lmo = min(lmo, A.sum() / 8.0 - witness_bound(-B)[0] / 8.0)
    else:
        lmo = min(lmo, A.sum() / 8.0)
    return float(g @ q - lmo)


# -- genuine entanglement -----------------------------------------------------------


def coherence_margin(state: GhzDiagonalState) -> float:
    """min over relabelings of sqrt(r22 r77) + sqrt(r33 r66) + sqrt(r44 r55) - |r18|.

    Each GHZ component is moved to the front by local Paulis and the inequality
    is evaluated on the resulting density entries (mirror diagonals are equal).
    """
    worst = math.inf
    for k in range(8):
        moved, _ = relabel_to_front(state, k)
        rho = to_density_entries(moved)
        d = rho.diag
        rhs = sum(math.sqrt(d[i] * d[i]) for i in (1, 2, 3))
        worst = min(worst, rhs - abs(rho.offdiag[0]))
    return worst


def is_biseparable(state: GhzDiagonalState, eps_crit: float = EPS_CRIT) -> bool:
    """max_k p_k <= 1/2; cross-checked against the density-entry form."""
    verdict = state.max_p <= 0.5 + eps_crit
    raw = coherence_margin(state) >= -eps_crit
    if verdict != raw:
        raise AssertionError("biseparability forms disagree")
    return verdict


def genuine_ree_from_max(P: float) -> float:
    """1 + P log2 P + (1 - P) log2 (1 - P) for P > 1/2, else 0."""
    if P <= 0.5:
        return 0.0
    if P >= 1.0:
        return 1.0
    return 1.0 + P * math.log2(P) + (1.0 - P) * math.log2(1.0 - P)


def genuine_ree(state: GhzDiagonalState, eps_crit: float = EPS_CRIT) -> float:
    if state.max_p <= 0.5 + eps_crit:
        return 0.0
    return genuine_ree_from_max(state.max_p)


@dataclass(frozen=True)
class NoiseFamilyPoint:
    N: int
    p: float
    P: float
    threshold: float
    genuinely_entangled: bool
    E_genuine: float
    state: GhzDiagonalState | None


def genuine_threshold(N: int) -> float:
    return 1.0 / (2.0 * (1.0 - 2.0 ** (-N)))


def ghz_noise_family(N: int, p: float) -> NoiseFamilyPoint:
    """(1 - p) |GHZ_N><GHZ_N| + p * identity / 2^N."""
    if N < 2 or int(N) != N:
        raise GhzError("N must be an integer >= 2")
    if not 0.0 <= p <= 1.0:
        raise GhzError("p must lie in [0, 1]")
    P = 1.0 - p * (1.0 - 2.0 ** (-N))
    thr = genuine_threshold(N)
    entangled = p < thr
    state = None
    if N == 3:
        probs = np.full(8, p / 8.0)
        probs[0] += 1.0 - p
        state = from_probabilities(probs)
    return NoiseFamilyPoint(int(N), float(p), P, thr, entangled,
                            genuine_ree_from_max(P) if entangled else 0.0, state)


# -- symmetric states ------------------------------------------------------------------


def _is_symmetric(p) -> bool:
    return (np.ptp(p[[0, 1, 2]]) <= SYM_TOL and np.ptp(p[[5, 6, 7]]) <= SYM_TOL)


def _symmetric_sign_fix(state: GhzDiagonalState) -> GhzDiagonalState:
    """Flip all four off-diagonal signs (a local operation) if rho18 < 0."""
    rho = to_density_entries(state)
    if rho.offdiag[0] < 0:
        return from_density_entries(rho.diag, -rho.offdiag)
    return state


@dataclass(frozen=True)
class SymmetricReduction:
    """Closest-state search restricted to q1 = q2 = q3, q6 = q7 = q8.

    sigma11 = 1/8 + xi/3, sigma44 = 1/8 - xi, kappa_c = min(sigma11, sigma44) and
    (sigma18, sigma27, sigma36, sigma54) = kappa_c (cos t, cos t, cos t, cos 3t)
    with t in [0, pi/3].
    """

    p: np.ndarray

    def sigma(self, theta: float, xi: float) -> np.ndarray:
        s1, s4 = 0.125 + xi / 3.0, 0.125 - xi
        kappa = min(s1, s4)
        c = math.cos(theta)
        return _q_from([s1, s1, s1, s4], kappa * np.array([c, c, c, math.cos(3 * theta)]))

    def objective(self, theta: float, xi: float) -> float:
        return relative_entropy(self.p, self.sigma(theta, xi))

    def xi_derivatives(self, theta: float, h: float = 1e-7) -> tuple[float, float]:
        """One-sided difference quotients in xi at xi = 0."""
        f0 = self.objective(theta, 0.0)
        return ((f0 - self.objective(theta, -h)) / h, (self.objective(theta, h) - f0) / h)

    def _best_theta(self, xi: float):
        res = minimize_scalar(lambda t: self.objective(t, xi), bounds=(0.0, math.pi / 3.0),
                              method="bounded", options={"xatol": 1e-12})
        return float(res.fun), float(res.x)

    def solve(self) -> tuple[float, float, float]:
        """(E, theta, xi) minimizing the reduced objective; the kink at xi = 0
        is handled by optimizing the two sides separately."""
        val, theta = self._best_theta(0.0)
        best = (val, theta, 0.0)
        for lo, hi in ((-0.375, 0.0), (0.0, 0.125)):
            res = minimize_scalar(lambda x: self._best_theta(x)[0], bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-11})
            val, theta = self._best_theta(float(res.x))
            if val < best[0]:
                best = (val, theta, float(res.x))
        return best


def symmetric_closest_reduction(state: GhzDiagonalState) -> SymmetricReduction:
    if not _is_symmetric(state.p):
        raise PreconditionViolated("state needs p1 = p2 = p3 and p6 = p7 = p8")
    return SymmetricReduction(_symmetric_sign_fix(state).p)


# -- closed forms ----------------------------------------------------------------------


def real_cubic_roots(a: float, b: float, c: float, d: float) -> np.ndarray:
    """Real roots of a x^3 + b x^2 + c x + d, polished by Newton steps."""
    roots = np.roots([a, b, c, d])
    scale = max(abs(a), abs(b), abs(c), abs(d))
    out = []
    for r in roots:
        if abs(r.imag) > 1e-7 * max(1.0, abs(r)):
            continue
        x = r.real
        for _ in range(3):
            f = ((a * x + b) * x + c) * x + d
            fp = (3 * a * x + 2 * b) * x + c
            if fp == 0 or abs(f) <= 1e-16 * scale:
                break
            x -= f / fp
        out.append(x)
    return np.sort(np.array(out))


def flat_cubic_coefficients(rho11: float, rho18: float, rho54: float) -> tuple:
    """Stationarity in theta, in t = 2 cos(theta)."""
    return (0.25 - rho11, -rho18, -(0.75 - 4.0 * rho11), rho18 - rho54)


def candidate_ii_cos() -> float:
    """Root of 4 c^3 + 6 c^2 - 3 = 0 in (0, 1)."""
    roots = real_cubic_roots(4.0, 6.0, 0.0, -3.0)
    return float(roots[(roots > 0) & (roots < 1)][0])


def p0_threshold() -> float:
    c = candidate_ii_cos()
    return (3.0 + 4 * c**3 - 3 * c) / 12.0


def pi_over_4_ree(rho18: float) -> float:
    """REE of the flat-diagonal state with rho54 = -rho18 (theta = pi/4)."""
    x = 8.0 * rho18
    s = 1.0 / math.sqrt(2.0)
    out = 0.0
    for w, ref in ((1 + x, 1 + s), (1 - x, 1 - s)):
        if w > 0:
            out += w / 2.0 * math.log2(w / ref)
    return out


def _require_entangled(state):
    if is_fully_separable(state).fully_separable:
        raise PreconditionViolated("state is fully separable")


def ree_flat_diagonal(state: GhzDiagonalState) -> ReeResult:
    """Symmetric state with every rho_ii = 1/8, closest state pinned at kappa_c = 1/8."""
    p = state.p
    if not _is_symmetric(p) or np.abs(p[:4] + p[:3:-1] - 0.25).max() > SYM_TOL:
        raise PreconditionViolated("needs p1 = p2 = p3, p6 = p7 = p8 and all rho_ii = 1/8")
    _require_entangled(state)
    fixed = _symmetric_sign_fix(state)
    rho = to_density_entries(fixed)
    r18, r54 = float(rho.offdiag[0]), float(rho.offdiag[3])
    red = SymmetricReduction(fixed.p)
    best = None
    for t in real_cubic_roots(*flat_cubic_coefficients(0.125, r18, r54)):
        if not -2.0 <= t <= 2.0:
            continue
        theta = math.acos(t / 2.0)
        if not math.pi / 6 + 1e-12 < theta <= math.pi / 3 + 1e-12:
            continue
        left, right = red.xi_derivatives(theta)
        if left > 1e-6 or right < -1e-6:
            continue
        E = red.objective(theta, 0.0)
        if best is None or E < best[0]:
            best = (E, theta, t)
    if best is None:
        raise NoValidRoot("no admissible root with theta in (pi/6, pi/3]")
    E, theta, t = best
    method = Method.FLAT_DIAGONAL_CUBIC
    if abs(r18 + r54) <= 1e-12:
        method = Method.CLOSED_FORM_PI_OVER_4
        E = pi_over_4_ree(r18)
    sigma = GhzDiagonalState(red.sigma(theta, 0.0))
    return ReeResult(E, sigma, method,
                     SpecialCaseSolution(t, None, p0_threshold(), None))


def type2_candidate_i(p1: float, p5: float) -> tuple[float, float, np.ndarray]:
    """(E, cos theta, sigma) for the flat closest state; E includes the 3-bit offset."""
    delta = (p5 - p1) / (p5 + p1)
    c = (math.sqrt(8.0 + delta * delta) - delta) / 4.0
    c3 = 4 * c**3 - 3 * c
    E = 0.0
    if p1 > 0:
        E += 3 * p1 * math.log2(8 * p1 / (1 + c))
    if p5 > 0:
        E += p5 * math.log2(8 * p5 / (1 - c3))
    sigma = _q_from([0.125] * 4, 0.125 * np.array([c, c, c, c3]))
    return E, c, sigma


def type2_candidate_ii(p1: float) -> tuple[float, float, float, np.ndarray]:
    """(E, cos theta, kappa_c, sigma) with kappa_c = sigma11 < 1/8."""
    c = candidate_ii_cos()
    c3 = 4 * c**3 - 3 * c
    kappa = 3 * p1 / (2 * (3 + c3))
    E = 1.0 + (3 * p1 * math.log2((3 + c3) / (3 * (1 + c))) if p1 > 0 else 0.0)
    sigma = _q_from([kappa, kappa, kappa, 0.5 - 3 * kappa], kappa * np.array([c, c, c, c3]))
    return E, c, kappa, sigma


def ree_type2(state: GhzDiagonalState) -> ReeResult:
    """States with p1 = p2 = p3, p5 = 1 - 3 p1 and every other weight zero."""
    p = state.p
    if (np.ptp(p[:3]) > SYM_TOL or np.abs(p[[3, 5, 6, 7]]).max() > SYM_TOL):
        raise PreconditionViolated("needs p1 = p2 = p3 and p4 = p6 = p7 = p8 = 0")
    _require_entangled(state)
    p1, p5 = float(p[:3].mean()), float(p[4])
    p0 = p0_threshold()
    delta = (p5 - p1) / (p5 + p1)
    if p1 > p0:
        E, c, sigma = type2_candidate_i(p1, p5)
        cand, method = Candidate.I, Method.TYPE2_CANDIDATE_I
    else:
        E, c, _, sigma = type2_candidate_ii(p1)
        cand, method = Candidate.II, Method.TYPE2_CANDIDATE_II
    return ReeResult(E, GhzDiagonalState(sigma), method,
                     SpecialCaseSolution(2 * c, delta, p0, cand))


# -- numeric solver --------------------------------------------------------------------------


N_ATOMS = 5


def _unpack(x, m):
    ang = x[: 3 * m].reshape(m, 3)
    y = x[3 * m:]
    y2 = y * y
    n = y2.sum()
    z = y2 / n
    u = z[:m] / 8.0
    v = z[m:] / 2.0
    d = ang.sum(1)
    S = np.cos(np.column_stack([d, ang]))
    diag = u.sum() + v
    off = u @ S
    return ang, y, n, z, u, S, d, diag, off


def _objective(x, p, mask, m):
    ang, y, n, z, u, S, d, diag, off = _unpack(x, m)
    q = _q_from(diag, off)
    if np.any(q[mask] <= 1e-300):
        return 1e6, np.zeros_like(x)
    f = float(np.sum(p[mask] * np.log(p[mask] / q[mask]))) / LN2
    gq = np.zeros(8)
    gq[mask] = -p[mask] / q[mask] / LN2
    gd = gq[:4] + gq[:3:-1]
    go = gq[:4] - gq[:3:-1]
    du = gd.sum() + S @ go
    sd = np.sin(d) * go[0]
    sin_ang = np.sin(ang)
    dang = -u[:, None] * (sd[:, None] + sin_ang * go[1:][None, :])
    dz = np.concatenate([du / 8.0, gd / 2.0])
    dy = 2.0 * y / n * (dz - dz @ z)
    return f, np.concatenate([dang.ravel(), dy])


def _pack(angles, atom_w, slack):
    """Parameters reproducing atom weights (sum over 8x) and diagonal slack."""
    z = np.concatenate([8.0 * np.asarray(atom_w), 2.0 * np.asarray(slack)])
    z = np.maximum(z, 0.0) / z.sum()
    return np.concatenate([np.asarray(angles, dtype=float).ravel(), np.sqrt(z)])


def _seeds(state, rng, n_random, m):
    """Deterministic starting points followed by random ones."""
    rho = to_density_entries(state)
    seeds = []
    # near the maximally mixed state, atoms on the even-sign vertices
    verts = np.array([[0, 0, 0], [0, np.pi, np.pi], [np.pi, 0, np.pi], [np.pi, np.pi, 0],
                      [0.1, 0.2, 0.3]])[:m]
    seeds.append(_pack(verts, np.full(m, 0.02), np.full(4, 0.02)))
    # atoms aligned with the sign pattern of the state, diagonal as in rho
    base = np.arccos(np.clip(np.sign(rho.offdiag[1:]) * 0.9, -1, 1))
    angs = base[None, :] + 0.05 * np.arange(m)[:, None]
    kappa = max(float(rho.diag.min()), 1e-3)
    seeds.append(_pack(angs, np.full(m, kappa / m), np.maximum(rho.diag - kappa, 1e-4)))
    for _ in range(n_random):
        angs = rng.uniform(-np.pi, np.pi, size=(m, 3))
        w = rng.dirichlet(np.ones(m + 4))
        seeds.append(_pack(angs, w[:m] / 8.0, w[m:] / 2.0))
    return seeds


def _solve_from(x0, p, mask, m):
    res = minimize(_objective, x0, args=(p, mask, m), jac=True, method="L-BFGS-B",
                   options={"maxiter": 20000, "maxfun": 40000, "ftol": 1e-16, "gtol": 1e-12,
                            "maxcor": 30})
    _, _, _, _, _, _, _, diag, off = _unpack(res.x, m)
    q = np.clip(_q_from(diag, off), 0.0, None)
    return q / q.sum()


def ree_numeric(state: GhzDiagonalState, n_starts: int = 8, seed: int = 0,
                gap_tol: float = 1e-6, extra_seeds=()) -> ReeResult:
    """Minimize S(rho || sigma) over fully separable GHZ-diagonal sigma.

    sigma is parametrized as a diagonal plus ``N_ATOMS`` weighted points of the
    witness surface, which covers the whole separable set; the smooth
    objective is minimized by L-BFGS from several starts and the winner is
    certified by :func:`optimality_gap`. ``extra_seeds`` may hold candidate
    closest states (probability vectors), e.g. from a closed form.
    """
    rep = is_fully_separable(state)
    if rep.fully_separable:
        return ReeResult(0.0, state, Method.SEPARABLE, gap=0.0)
    p = state.p
    mask = p > 0
    m = N_ATOMS
    rng = np.random.default_rng(seed)
    cands = [_solve_from(x0, p, mask, m) for x0 in _seeds(state, rng, max(n_starts - 2, 0), m)]
    cands.extend(np.asarray(q, dtype=float) for q in extra_seeds)
    scored = []
    for q in cands:
        sigma = GhzDiagonalState(q)
        if not is_fully_separable(sigma).fully_separable:
            continue
        scored.append((relative_entropy(p, q), sigma))
    if not scored:
        raise ConvergenceFailure("no feasible candidate closest state")
    scored.sort(key=lambda t: t[0])
    E, sigma = scored[0]
    gap = optimality_gap(state, sigma)
    if not gap <= gap_tol:
        raise ConvergenceFailure(f"optimality gap {gap:.3g} exceeds {gap_tol:.3g}",
                                 best=(E, sigma), residual=gap)
    branch = is_fully_separable(sigma).branch
    method = Method.NUMERIC_BOUNDARY if branch is Branch.MU else Method.PPT_FACE
    return ReeResult(E, sigma, method, closest_params(sigma), gap=gap)


# -- dispatcher --------------------------------------------------------------------------------


def closed_form_ree(state: GhzDiagonalState) -> ReeResult:
    """First applicable closed form; PreconditionViolated/NoValidRoot otherwise."""
    errors = []
    for fn in (ree_flat_diagonal, ree_type2):
        try:
            res = fn(state)
            return replace(res, gap=optimality_gap(state, res.closest))
        except (PreconditionViolated, NoValidRoot) as exc:
            errors.append(str(exc))
    raise PreconditionViolated("no closed form applies: " + "; ".join(errors))


def ree(state: GhzDiagonalState, method: str = "auto", seed: int = 0) -> ReeResult:
    if method not in ("auto", "closed", "numeric"):
        raise GhzError(f"unknown method {method!r}")
    if is_fully_separable(state).fully_separable:
        return ReeResult(0.0, state, Method.SEPARABLE, gap=0.0)
    if method == "numeric":
        return ree_numeric(state, seed=seed)
    try:
        return closed_form_ree(state)
    except PreconditionViolated:
        if method == "closed":
            raise
    return ree_numeric(state, seed=seed)
