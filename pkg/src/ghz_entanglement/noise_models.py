"""GHZ-diagonal states produced by white noise and local Pauli channels."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import GhzError
from .ghz_core import EPS_NORM, EPS_POS, LOCAL_PAULI_PERMUTATIONS, GhzDiagonalState, from_probabilities


def white_noise_mixture(p: float) -> GhzDiagonalState:
    """(1 - p) |GHZ_1><GHZ_1| + p * identity / 8."""
    if not 0.0 <= p <= 1.0:
        raise GhzError(f"noise weight must lie in [0, 1], got {p!r}")
    probs = np.full(8, p / 8.0)
    probs[0] += 1.0 - p
    return from_probabilities(probs)


@dataclass(frozen=True)
class PauliChannelSpec:
    """Independent single-qubit Pauli channels.

    ``qubits[j] = (pI, pX, pY, pZ)`` for qubit j + 1.
    """

    qubits: tuple

    def __post_init__(self):
        rows = tuple(tuple(float(w) for w in q) for q in self.qubits)
        if len(rows) != 3 or any(len(q) != 4 for q in rows):
            raise GhzError("a Pauli channel needs (pI, pX, pY, pZ) for each of 3 qubits")
        arr = np.array(rows)
        if not np.all(np.isfinite(arr)) or arr.min() < -EPS_POS:
            raise GhzError("Pauli error probabilities must be finite and non-negative")
        if np.abs(arr.sum(1) - 1.0).max() > EPS_NORM:
            raise GhzError("each qubit's Pauli probabilities must sum to 1")
        object.__setattr__(self, "qubits", rows)

    @classmethod
    def from_dict(cls, obj) -> "PauliChannelSpec":
        try:
            return cls(tuple((q["pI"], q["pX"], q["pY"], q["pZ"]) for q in obj["qubits"]))
        except (KeyError, TypeError) as exc:
            raise GhzError(f"malformed channel spec: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "PauliChannelSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise GhzError(f"malformed JSON: {exc}") from None

    @classmethod
    def depolarizing(cls, eps: float) -> "PauliChannelSpec":
        q = (1.0 - eps, eps / 3.0, eps / 3.0, eps / 3.0)
        return cls((q, q, q))

    @classmethod
    def identity(cls) -> "PauliChannelSpec":
        return cls(((1.0, 0.0, 0.0, 0.0),) * 3)


def _perm_matrix(perm) -> np.ndarray:
    M = np.zeros((8, 8))
    M[list(perm), range(8)] = 1.0
    return M


def channel_matrix(spec: PauliChannelSpec) -> np.ndarray:
    """Column-stochastic matrix M with p_out = M @ p_in."""
    M = np.eye(8)
    for q, (pI, pX, pY, pZ) in enumerate(spec.qubits, start=1):
        Mq = pI * np.eye(8)
        for w, label in ((pX, "X"), (pY, "Y"), (pZ, "Z")):
            Mq += w * _perm_matrix(LOCAL_PAULI_PERMUTATIONS[(q, label)])
        M = Mq @ M
    return M


def apply_pauli_channel(state: GhzDiagonalState, spec: PauliChannelSpec) -> GhzDiagonalState:
    return from_probabilities(channel_matrix(spec) @ state.p)
