"""State representations for three-qubit GHZ-diagonal states.

Basis convention (k = 1..8, stored at Python index k-1)::

    k  state                     k  state
    1  (|000> + |111>)/sqrt2     8  (|000> - |111>)/sqrt2
    2  (|001> + |110>)/sqrt2     7  (|001> - |110>)/sqrt2
    3  (|010> + |101>)/sqrt2     6  (|010> - |101>)/sqrt2
    4  (|011> + |100>)/sqrt2     5  (|011> - |100>)/sqrt2

so partners k and 9-k share a computational-basis pair and differ only in
the relative sign. Computational basis states are ordered |000>, |001>, ...,
|111>, which makes the only nonzero density-matrix entries the diagonal and
the anti-diagonal.

Three equivalent parametrizations are supported:

* probabilities ``p`` (length 8),
* Pauli correlations ``lambda_2..lambda_8`` of ZZI, ZIZ, IZZ, XXX, YYX, YXY, XYY,
* density entries: ``diag = (rho11, rho22, rho33, rho44)`` and
  ``offdiag = (rho18, rho27, rho36, rho54)``.

The linear maps between them are frozen below; ``ghz_entanglement.audit``
rebuilds them from explicit 8x8 matrices and the test-suite checks that both
agree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GhzError, NegativeProbability, NotNormalized, NotPositiveSemidefinite

EPS_POS = 1e-9
EPS_NORM = 1e-9
EPS_NUM = 1e-12

PAULI_LABELS = ("ZZI", "ZIZ", "IZZ", "XXX", "YYX", "YXY", "XYY")

# PAULI_SIGNS[j, k] = <GHZ_k| P_j |GHZ_k>; rows follow PAULI_LABELS.
PAULI_SIGNS = np.array(
    [
        [1, 1, -1, -1, -1, -1, 1, 1],
        [1, -1, 1, -1, -1, 1, -1, 1],
        [1, -1, -1, 1, 1, -1, -1, 1],
        [1, 1, 1, 1, -1, -1, -1, -1],
        [-1, -1, 1, 1, -1, -1, 1, 1],
        [-1, 1, -1, 1, -1, 1, -1, 1],
        [-1, 1, 1, -1, 1, -1, -1, 1],
    ],
    dtype=float,
)
PAULI_SIGNS.setflags(write=False)

# Single-qubit Paulis permute the GHZ basis: P |GHZ_k> ~ |GHZ_perm[k]> (0-based).
LOCAL_PAULI_PERMUTATIONS = {
    (1, "X"): (3, 2, 1, 0, 7, 6, 5, 4),
    (1, "Y"): (4, 5, 6, 7, 0, 1, 2, 3),
    (1, "Z"): (7, 6, 5, 4, 3, 2, 1, 0),
    (2, "X"): (2, 3, 0, 1, 6, 7, 4, 5),
    (2, "Y"): (5, 4, 7, 6, 1, 0, 3, 2),
    (2, "Z"): (7, 6, 5, 4, 3, 2, 1, 0),
    (3, "X"): (1, 0, 3, 2, 5, 4, 7, 6),
    (3, "Y"): (6, 7, 4, 5, 2, 3, 0, 1),
    (3, "Z"): (7, 6, 5, 4, 3, 2, 1, 0),
}

# Conjugating with the phase gate diag(1, i) on two qubits flips the sign of
# exactly two anti-diagonal entries (indices into offdiag) and leaves the
# diagonal alone. These three generate the 8-element group of even sign flips.
PAIR_FLIP_GENERATORS = (
    ((1, 2), (0, 1)),
    ((1, 3), (0, 2)),
    ((2, 3), (0, 3)),
)


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GhzDiagonalState:
    """Probability vector over the GHZ basis (use :func:`from_probabilities`)."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _readonly(self.p))

    def __repr__(self):
        vals = ", ".join(f"{x:.6g}" for x in self.p)
        return f"GhzDiagonalState(p=[{vals}])"

    @property
    def max_p(self) -> float:
        return float(self.p.max())

    def allclose(self, other: "GhzDiagonalState", atol: float = EPS_NUM) -> bool:
        return bool(np.allclose(self.p, other.p, atol=atol, rtol=0.0))


@dataclass(frozen=True, eq=False)
class PauliCoefficients:
    """The seven correlation coefficients lambda_2..lambda_8."""

    lam: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", _readonly(self.lam))
        if self.lam.shape != (7,):
            raise GhzError("expected 7 Pauli coefficients (lambda_2..lambda_8)")

    def __getitem__(self, k: int) -> float:
        """One-based indexing: ``coeffs[5]`` is lambda_5."""
        if not 2 <= k <= 8:
            raise IndexError("lambda index must be in 2..8")
        return float(self.lam[k - 2])

    @property
    def lambda_minus(self) -> float:
        l2, l3, l4 = self.lam[:3]
        return float(min(l2 + l3 + l4, l2 - l3 - l4, -l2 + l3 - l4, -l2 - l3 + l4))

    @property
    def kappa(self) -> float:
        return (1.0 - abs(self.lambda_minus)) / 8.0

    @property
    def xxx_family(self) -> np.ndarray:
        """(lambda_5, lambda_6, lambda_7, lambda_8)."""
        return self.lam[3:]


@dataclass(frozen=True, eq=False)
class DensityEntries:
    """Diagonal and anti-diagonal entries in the computational basis."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", _readonly(self.diag))
        object.__setattr__(self, "offdiag", _readonly(self.offdiag))
        if self.diag.shape != (4,) or self.offdiag.shape != (4,):
            raise GhzError("diag and offdiag must each hold 4 numbers")

    @property
    def kappa(self) -> float:
        return float(self.diag.min())

    def is_valid(self, tol: float = EPS_POS) -> bool:
        return bool(
            np.all(self.diag >= -tol)
            and abs(2.0 * self.diag.sum() - 1.0) <= EPS_NORM
            and np.all(np.abs(self.offdiag) <= self.diag + tol)
        )


@dataclass(frozen=True)
class LocalOpRecord:
    """Local gates applied by :func:`canonicalize`, as ``(qubit, gate)`` pairs.

    Qubits are numbered 1..3 and ``"S"`` denotes conjugation by diag(1, i).
    Gates come in pairs; each pair is an involution on GHZ-diagonal states, so
    replaying the record on the canonical state restores the original.
    """

    flips: tuple = ()
    flipped: tuple = ()  # offdiag indices whose sign was changed

    @property
    def is_identity(self) -> bool:
        return not self.flipped

    def apply(self, state: GhzDiagonalState) -> GhzDiagonalState:
        return _flip_pairs(state, self.flipped)


def _as_vector(values, n: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise GhzError(f"{what}: expected {n} numbers, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GhzError(f"{what}: values must be finite")
    return arr


def from_probabilities(p: Sequence[float]) -> GhzDiagonalState:
    arr = _as_vector(p, 8, "probabilities")
    if arr.min() < -EPS_POS:
        raise NegativeProbability(f"probability {arr.min():.3g} is negative")
    total = arr.sum()
    if abs(total - 1.0) > EPS_NORM:
        raise NotNormalized(f"probabilities sum to {total!r}")
    arr = np.clip(arr, 0.0, None)
    return GhzDiagonalState(arr / arr.sum())


def to_pauli_coefficients(state: GhzDiagonalState) -> PauliCoefficients:
    return PauliCoefficients(PAULI_SIGNS @ state.p)


def from_pauli_coefficients(lam: Sequence[float] | PauliCoefficients) -> GhzDiagonalState:
    if isinstance(lam, PauliCoefficients):
        lam = lam.lam
    arr = _as_vector(lam, 7, "pauli coefficients")
    p = (1.0 + PAULI_SIGNS.T @ arr) / 8.0
    if p.min() < -EPS_POS:
        k = int(np.argmin(p)) + 1
        raise NotPositiveSemidefinite(f"coefficients give p_{k} = {p.min():.3g} < 0")
    p = np.clip(p, 0.0, None)
    return GhzDiagonalState(p / p.sum())


def to_density_entries(state: GhzDiagonalState) -> DensityEntries:
    head, tail = state.p[:4], state.p[:3:-1]
    return DensityEntries((head + tail) / 2.0, (head - tail) / 2.0)


def from_density_entries(diag, offdiag=None) -> GhzDiagonalState:
    if isinstance(diag, DensityEntries):
        diag, offdiag = diag.diag, diag.offdiag
    d = _as_vector(diag, 4, "diag")
    o = _as_vector(offdiag, 4, "offdiag")
    p = np.concatenate([d + o, (d - o)[::-1]])
    return from_probabilities(p)


def _flip_pairs(state: GhzDiagonalState, flipped) -> GhzDiagonalState:
    p = state.p.copy()
    for i in flipped:
        p[i], p[7 - i] = p[7 - i], p[i]
    return GhzDiagonalState(p)


def _flip_group():
    """The 8 even sign flips of offdiag, identity first, with their gate lists."""
    out = []
    for bits in range(8):
        gates, mask = [], np.zeros(4, dtype=bool)
        for g, (qubits, idx) in enumerate(PAIR_FLIP_GENERATORS):
            if bits >> g & 1:
                gates.extend((q, "S") for q in qubits)
                mask[list(idx)] ^= True
        out.append((tuple(gates), tuple(int(i) for i in np.flatnonzero(mask))))
    return out


_FLIP_GROUP = _flip_group()
_FLIP_SIGNS = np.ones((8, 4))
for _row, (_, _flipped) in zip(_FLIP_SIGNS, _FLIP_GROUP):
    _row[list(_flipped)] = -1.0


def canonicalize(state: GhzDiagonalState) -> tuple[GhzDiagonalState, LocalOpRecord]:
    """Make rho18, rho27, rho36 non-negative using local phase gates.

    The sign of rho54 is whatever parity forces; ties between equally good
    group elements go to the lexicographically largest (rho18, rho27, rho36)
    and then to enumeration order (identity first).
    """
    p = state.p
    off = (p[:4] - p[:3:-1]) / 2.0
    cand = _FLIP_SIGNS * off
    ok = np.flatnonzero((cand[:, :3] >= 0.0).all(1))
    best = int(ok[0])
    for i in ok[1:]:
        if tuple(cand[i, :3]) > tuple(cand[best, :3]):
            best = int(i)
    gates, flipped = _FLIP_GROUP[best]
    if not flipped:
        return state, LocalOpRecord(gates, flipped)
    return _flip_pairs(state, flipped), LocalOpRecord(gates, flipped)


def apply_local_pauli(state: GhzDiagonalState, qubit: int, label: str) -> GhzDiagonalState:
    """Conjugate by a single-qubit Pauli (qubit 1..3); permutes the p vector."""
    perm = LOCAL_PAULI_PERMUTATIONS[(qubit, label)]
    p = np.empty(8)
    p[list(perm)] = state.p
    return GhzDiagonalState(p)


def relabel_to_front(state: GhzDiagonalState, k: int) -> tuple[GhzDiagonalState, tuple]:
    """Apply local Paulis moving GHZ component ``k`` (0-based) to position 0.

    Returns the relabelled state and the gates used.
    """
    # X1, X2, X3 and Z1 act regularly on the 8 labels; search the small group.
    gens = [(1, "X"), (2, "X"), (3, "X"), (1, "Z")]
    for bits in range(16):
        gates = tuple(g for i, g in enumerate(gens) if bits >> i & 1)
        pos = k
        for g in gates:
            pos = LOCAL_PAULI_PERMUTATIONS[g][pos]
        if pos == 0:
            out = state
            for g in gates:
                out = apply_local_pauli(out, *g)
            return out, gates
    raise AssertionError("local Paulis act transitively on the GHZ basis")


# -- JSON ---------------------------------------------------------------------


def _reject_constant(name):
    raise GhzError(f"non-finite number {name} in input")


def parse_state_json(text: str) -> GhzDiagonalState:
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise GhzError(f"malformed JSON: {exc}") from None
    return state_from_dict(obj)


def state_from_dict(obj) -> GhzDiagonalState:
    if not isinstance(obj, dict) or "format" not in obj:
        raise GhzError('state JSON must be an object with a "format" key')
    fmt = obj["format"]
    try:
        if fmt == "probabilities":
            return from_probabilities(_json_numbers(obj["values"]))
        if fmt == "pauli":
            return from_pauli_coefficients(_json_numbers(obj["lambda"]))
        if fmt == "rho":
            return from_density_entries(_json_numbers(obj["diag"]), _json_numbers(obj["offdiag"]))
    except KeyError as exc:
        raise GhzError(f"missing key {exc} for format {fmt!r}") from None
    raise GhzError(f"unknown state format {fmt!r}")


def _json_numbers(values):
    if not isinstance(values, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    ):
        raise GhzError("expected a JSON array of numbers")
    if not all(math.isfinite(v) for v in values):
        raise GhzError("non-finite number in input")
    return values


def state_to_dict(state: GhzDiagonalState, fmt: str = "probabilities") -> dict:
    if fmt == "probabilities":
        return {"format": "probabilities", "values": [float(x) for x in state.p]}
    if fmt == "pauli":
        return {"format": "pauli", "lambda": [float(x) for x in to_pauli_coefficients(state).lam]}
    if fmt == "rho":
        rho = to_density_entries(state)
        return {"format": "rho", "diag": [float(x) for x in rho.diag],
                "offdiag": [float(x) for x in rho.offdiag]}
    raise GhzError(f"unknown state format {fmt!r}")


def uniform_state() -> GhzDiagonalState:
    return GhzDiagonalState(np.full(8, 1.0 / 8.0))


def ghz_basis_state(k: int = 1) -> GhzDiagonalState:
    """Pure |GHZ_k>, k = 1..8."""
    p = np.zeros(8)
    p[k - 1] = 1.0
    return GhzDiagonalState(p)
