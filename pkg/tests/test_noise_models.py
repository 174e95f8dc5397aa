import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ghz_entanglement import audit
from ghz_entanglement.errors import GhzError
from ghz_entanglement.ghz_core import from_probabilities, ghz_basis_state, to_pauli_coefficients
from ghz_entanglement.noise_models import (
    PauliChannelSpec,
    apply_pauli_channel,
    channel_matrix,
    white_noise_mixture,
)
from ghz_entanglement.ree import genuine_ree


def random_spec(rng):
    return PauliChannelSpec(tuple(tuple(rng.dirichlet(np.ones(4) * 0.5)) for _ in range(3)))


def test_white_noise_endpoints():
    assert_allclose(white_noise_mixture(0.0).p, ghz_basis_state(1).p)
    assert_allclose(white_noise_mixture(1.0).p, 0.125)
    assert white_noise_mixture(4 / 7).max_p == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(GhzError):
        white_noise_mixture(1.5)


def test_identity_channel():
    s = from_probabilities(np.random.default_rng(0).dirichlet(np.ones(8)))
    assert_allclose(apply_pauli_channel(s, PauliChannelSpec.identity()).p, s.p, atol=0)


def test_phase_flip_swaps_partners():
    spec = PauliChannelSpec(((0, 0, 0, 1), (1, 0, 0, 0), (1, 0, 0, 0)))
    p = np.arange(1, 9) / 36
    out = apply_pauli_channel(from_probabilities(p), spec).p
    assert_allclose(out, p[::-1], atol=1e-16)


def test_matches_kraus_oracle():
    rng = np.random.default_rng(1)
    for _ in range(50):
        spec = random_spec(rng)
        s = from_probabilities(rng.dirichlet(np.ones(8)))
        assert_allclose(apply_pauli_channel(s, spec).p, audit.dense_pauli_channel(s, spec.qubits).p,
                        atol=1e-14)


def test_channel_matrix_is_stochastic():
    rng = np.random.default_rng(2)
    for _ in range(100):
        M = channel_matrix(random_spec(rng))
        assert M.min() >= 0
        assert_allclose(M.sum(0), 1.0, atol=1e-14)


def test_depolarizing_decay_pattern():
    # each Pauli string decays by (1 - 4 eps / 3) per non-identity factor
    eps = 0.1
    out = apply_pauli_channel(ghz_basis_state(1), PauliChannelSpec.depolarizing(eps))
    lam = to_pauli_coefficients(out).lam
    f = 1 - 4 * eps / 3
    assert_allclose(lam[:3], f**2, atol=1e-15)
    assert_allclose(np.abs(lam[3:]), f**3, atol=1e-15)
    assert_allclose(np.sign(lam), [1, 1, 1, 1, -1, -1, -1])
    # white noise would shrink all seven coefficients by the same factor
    assert abs(lam[0] - abs(lam[3])) > 0.01


def test_genuine_ree_never_increases():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        s = from_probabilities(rng.dirichlet(np.ones(8) * 0.3))
        out = apply_pauli_channel(s, random_spec(rng))
        assert out.max_p <= s.max_p + 1e-15
        assert genuine_ree(out) <= genuine_ree(s) + 1e-15


def test_spec_validation():
    with pytest.raises(GhzError):
        PauliChannelSpec(((0.5, 0.5, 0, 0),) * 2)
    with pytest.raises(GhzError):
        PauliChannelSpec(((0.5, 0.6, -0.1, 0),) * 3)
    with pytest.raises(GhzError):
        PauliChannelSpec(((0.5, 0.4, 0, 0),) * 3)


def test_spec_json():
    text = json.dumps({"qubits": [{"pI": 0.9, "pX": 0.1, "pY": 0, "pZ": 0}] * 3})
    spec = PauliChannelSpec.from_json(text)
    assert spec.qubits[0] == (0.9, 0.1, 0.0, 0.0)
    with pytest.raises(GhzError):
        PauliChannelSpec.from_json('{"qubits": [{"pI": 1}]}')
    with pytest.raises(GhzError):
        PauliChannelSpec.from_json("{")
