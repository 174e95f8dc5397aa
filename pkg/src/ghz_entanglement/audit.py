"""Brute-force graders that rebuild everything from explicit 8x8 matrices.

Nothing here is used on the production path. The library's frozen linear
maps, sign tables and closed forms are checked against these functions in the
test-suite and by ``ghz-ent audit``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.optimize import minimize

from .errors import GhzError
from .ghz_core import GhzDiagonalState, from_probabilities

I2 = np.eye(2)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PHASE_S = np.diag([1.0, 1j])


class Cut(enum.Enum):
    A_BC = 1
    B_AC = 2
    C_AB = 3


def kron(*ops):
    return reduce(np.kron, ops)


def pauli_string(label: str) -> np.ndarray:
    return kron(*(PAULI[c] for c in label))


def local_op(op, qubit: int) -> np.ndarray:
    """Embed a single-qubit operator on qubit 1..3 (qubit 1 is the leftmost)."""
    ops = [I2, I2, I2]
    ops[qubit - 1] = op
    return kron(*ops)


def ghz_basis() -> np.ndarray:
    """Columns are |GHZ_1>, ..., |GHZ_8> in the computational basis."""
    B = np.zeros((8, 8))
    for k in range(4):
        lo, hi = k, 7 - k  # |0 x2 x3> and its bitwise complement
        B[lo, k] = B[hi, k] = 1.0
        B[lo, 7 - k] = 1.0
        B[hi, 7 - k] = -1.0
    return B / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DenseState:
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (8, 8) or not np.allclose(m, m.T, atol=1e-12):
            raise GhzError("dense state must be a real symmetric 8x8 matrix")
        if abs(np.trace(m) - 1.0) > 1e-9 or np.linalg.eigvalsh(m).min() < -1e-12:
            raise GhzError("dense state must have unit trace and be positive")

    def entries(self):
        """(diag, offdiag) read straight off the matrix."""
        m = self.matrix
        diag = np.array([m[0, 0], m[1, 1], m[2, 2], m[3, 3]])
        offdiag = np.array([m[0, 7], m[1, 6], m[2, 5], m[4, 3]])
        return diag, offdiag


def build_dense(state: GhzDiagonalState) -> DenseState:
    B = ghz_basis()
    return DenseState(B @ np.diag(state.p) @ B.T)


def ghz_probabilities(matrix) -> np.ndarray:
    """Diagonal of a dense matrix in the GHZ basis; raises if it is not GHZ-diagonal."""
    B = ghz_basis()
    M = B.T @ matrix @ B
    if np.abs(M - np.diag(np.diag(M))).max() > 1e-10 or np.abs(M.imag).max() > 1e-12:
        raise GhzError("matrix is not diagonal in the GHZ basis")
    return np.real(np.diag(M))


# -- derived tables -------------------------------------------------------------


def derive_pauli_signs() -> np.ndarray:
    B = ghz_basis()
    labels = ("ZZI", "ZIZ", "IZZ", "XXX", "YYX", "YXY", "XYY")
    return np.array([np.real(np.diag(B.T @ pauli_string(s) @ B)) for s in labels])


def derive_local_permutations() -> dict:
    """perm[k] = index of the GHZ state proportional to P|GHZ_k>."""
    B = ghz_basis()
    out = {}
    for q in (1, 2, 3):
        for label in "XYZ":
            overlap = np.abs(B.T @ local_op(PAULI[label], q) @ B)
            assert np.allclose(np.sort(overlap, 0)[-1], 1.0)
            out[(q, label)] = tuple(int(i) for i in overlap.argmax(0))
    return out


def derive_pair_flips() -> dict:
    """For S conjugation on each qubit pair: offdiag entries whose sign flips."""
    out = {}
    for pair in ((1, 2), (1, 3), (2, 3)):
        U = local_op(PHASE_S, pair[0]) @ local_op(PHASE_S, pair[1])
        probe = np.zeros((8, 8))
        idx = [(0, 7), (1, 6), (2, 5), (4, 3)]
        for r, c in idx:
            probe[r, c] = probe[c, r] = 1.0
        out_m = U @ probe @ U.conj().T
        signs = [out_m[r, c] for r, c in idx]
        if not np.allclose(np.imag(signs), 0.0) or not np.allclose(np.abs(signs), 1.0):
            raise AssertionError(f"S on {pair} does not preserve GHZ-diagonality")
        out[pair] = tuple(i for i, s in enumerate(np.real(signs)) if s < 0)
    return out


# -- PPT ------------------------------------------------------------------------


def partial_transpose(matrix, qubit: int) -> np.ndarray:
    t = np.asarray(matrix).reshape([2] * 6)
    axes = list(range(6))
    axes[qubit - 1], axes[qubit + 2] = axes[qubit + 2], axes[qubit - 1]
    return t.transpose(axes).reshape(8, 8)


def ppt_min_eigenvalue(state: GhzDiagonalState, cut: Cut) -> float:
    pt = partial_transpose(build_dense(state).matrix, cut.value)
    return float(np.linalg.eigvalsh(pt).min())


def ppt_eigen_oracle(state: GhzDiagonalState, cut: Cut) -> bool:
    return ppt_min_eigenvalue(state, cut) >= -1e-12


# -- witness bound ----------------------------------------------------------------


def _reduced_objective(X, a, b):
    """max over c of the witness objective, which has the closed form |gamma + delta e^{i(a+b)}|."""
    delta, alpha, beta, gamma = X
    return alpha * np.cos(a) + beta * np.cos(b) + np.abs(gamma + delta * np.exp(1j * (a + b)))


def grid_witness_bound(X, resolution: float = 0.01, polish: bool = False) -> float:
    """Dense-grid estimate of C(X).

    The raw grid value is a lower bound on C(X) within
    ``(|delta|+|alpha|+|beta|+|gamma|) * resolution``; with ``polish`` the best
    cells are refined by Nelder-Mead on the reduced two-angle objective.
    """
    if resolution > 0.01:
        raise GhzError("resolution must be at most 0.01 rad")
    return _witness_bound_2d(np.asarray(X, dtype=float), resolution, polish)[0]


def _reduced_grad(X, ab):
    delta, alpha, beta, gamma = X
    a, b = ab
    r = math.sqrt(max(gamma * gamma + delta * delta + 2 * gamma * delta * math.cos(a + b), 1e-300))
    ds = -gamma * delta * math.sin(a + b) / r
    return np.array([-alpha * math.sin(a) + ds, -beta * math.sin(b) + ds])


def _witness_bound_2d(X, resolution, polish, n_polish: int = 6):
    n = int(math.ceil(2.0 * math.pi / resolution))
    g = -math.pi + 2.0 * math.pi * np.arange(n) / n
    vals = _reduced_objective(X, g[:, None], g[None, :])
    flat = vals.ravel()
    best = float(flat.max())
    arg = divmod(int(flat.argmax()), n)
    best_ab = np.array([g[arg[0]], g[arg[1]]])
    if not polish:
        return best, best_ab
    for k in np.argpartition(flat, -n_polish)[-n_polish:]:
        i, j = divmod(int(k), n)
        res = minimize(lambda ab: (-_reduced_objective(X, ab[0], ab[1]), -_reduced_grad(X, ab)),
                       [g[i], g[j]], jac=True, method="BFGS", options={"gtol": 1e-12})
        if -res.fun > best:
            best, best_ab = float(-res.fun), res.x
    return best, best_ab


def surface_point_2d(X, ab) -> np.ndarray:
    """Surface point (cos d, cos a, cos b, cos c) attaining the reduced maximum at (a, b)."""
    delta, _, _, gamma = X
    a, b = ab
    z = gamma + delta * np.exp(1j * (a + b))
    c = -np.angle(z) if abs(z) > 0 else 0.0
    return np.cos([a + b + c, a, b, c])


def border_value(u: float, coarse: float = 0.1) -> float:
    """Lowest v with (u, u, u, v) in the separable hull, by optimizing witnesses.

    Maximizes ``u (x + y + z) - C(x, y, z, -1)`` over (x, y, z), i.e. finds the
    witness with ``f(x, y, z) = 1`` at the boundary. C is evaluated on the
    reduced two-angle objective, seeded from a coarse grid.
    """

    def neg(xyz):
        X = np.array([xyz[0], xyz[1], xyz[2], -1.0])
        C, ab = _witness_bound_2d(X, coarse, polish=True, n_polish=2)
        s = surface_point_2d(X, ab)
        return C - u * xyz.sum(), s[:3] - u

    res = minimize(neg, np.ones(3), jac=True, method="BFGS", options={"gtol": 1e-10})
    return -float(res.fun)


# -- relative entropy -------------------------------------------------------------------


def _rel_entropy(p, q):
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def _boundary_q(x, is_sep, steps: int = 34) -> np.ndarray:
    """Separable q on the ray (d, d) + tau (w, -w), pushed out to the boundary.

    ``x[:4]`` sets the diagonal d through a softmax normalized to 1/2 and
    ``x[4:]`` the off-diagonal direction w; tau is found by bisection.
    """
    d = np.exp(x[:4] - x[:4].max())
    d = 0.5 * d / d.sum()
    w = x[4:] / max(np.linalg.norm(x[4:]), 1e-300)
    hi = d.min() / max(np.abs(w).max(), 1e-300)

    def q(t):
        return np.clip(np.concatenate([d + t * w, (d - t * w)[::-1]]), 0.0, None)

    if is_sep(GhzDiagonalState(q(hi))).fully_separable:
        return q(hi)
    lo = 0.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if is_sep(GhzDiagonalState(q(mid))).fully_separable:
            lo = mid
        else:
            hi = mid
    return q(lo)


def random_search_ree(state: GhzDiagonalState, rounds: int = 4, n_iters: int = 800,
                      seed: int = 0) -> float:
    """Upper bound on the REE from a random search over boundary separable states.

    Every candidate is a point on the separable boundary (see ``_boundary_q``),
    so the search runs in an unconstrained 8-dimensional space. Each round is
    a (1+1) evolution strategy with a one-fifth step rule; rounds start from
    the state's own entries, a flat diagonal, random points and finally the
    best point found. Nelder-Mead restarts polish the result.

    Only the exact separability test is shared with the production solver.
    """
    from .ghz_core import to_density_entries
    from .separability import is_fully_separable

    p = state.p
    if is_fully_separable(state).fully_separable:
        return 0.0
    rng = np.random.default_rng(seed)
    rho = to_density_entries(state)

    def f(x):
        return _rel_entropy(p, _boundary_q(x, is_fully_separable))

    starts = [np.concatenate([np.log(np.maximum(rho.diag, 1e-6)), rho.offdiag + 1e-9]),
              np.concatenate([np.zeros(4), rho.offdiag + 1e-9])]
    best_val, best_x = math.inf, None
    for r in range(rounds):
        if r < len(starts):
            x = starts[r]
        elif r == rounds - 1:
            x = best_x
        else:
            x = np.concatenate([rng.normal(size=4), rho.offdiag + 0.3 * rng.normal(size=4)])
        val, step = f(x), 0.3
        for _ in range(n_iters):
            cand = x + rng.normal(size=8) * step
            cv = f(cand)
            if cv < val:
                x, val = cand, cv
                step *= 1.5
            else:
                step = max(step * 0.9, 1e-9)
        if val < best_val:
            best_val, best_x = val, x
    x = best_x
    for _ in range(3):
        res = minimize(f, x, method="Nelder-Mead",
                       options={"maxfev": 3000, "adaptive": True, "xatol": 1e-10, "fatol": 1e-14})
        x = res.x
    return min(best_val, float(res.fun))


# -- channels ----------------------------------------------------------------------


def dense_pauli_channel(state: GhzDiagonalState, qubit_probs) -> GhzDiagonalState:
    """Apply independent single-qubit Pauli channels by explicit Kraus sums."""
    rho = build_dense(state).matrix.astype(complex)
    for q, probs in enumerate(qubit_probs, start=1):
        out = np.zeros_like(rho)
        for w, label in zip(probs, "IXYZ"):
            K = local_op(PAULI[label], q)
            out += w * K @ rho @ K.conj().T
        rho = out
    return from_probabilities(ghz_probabilities(rho))

