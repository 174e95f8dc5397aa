"""Sanity checks on the brute-force oracles themselves."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ghz_entanglement import audit
from ghz_entanglement.errors import GhzError
from ghz_entanglement.ghz_core import (
    from_density_entries,
    from_probabilities,
    ghz_basis_state,
    uniform_state,
)
from ghz_entanglement.ree import ree, ree_numeric
from ghz_entanglement.separability import is_fully_separable


def test_ghz_basis_is_orthonormal():
    B = audit.ghz_basis()
    assert_allclose(B.T @ B, np.eye(8), atol=1e-15)
    assert_allclose(B[:, 0], np.eye(8)[0] / math.sqrt(2) + np.eye(8)[7] / math.sqrt(2))


def test_dense_examples():
    m = audit.build_dense(ghz_basis_state(1)).matrix
    expect = np.zeros((8, 8))
    expect[np.ix_([0, 7], [0, 7])] = 0.5
    assert_allclose(m, expect, atol=1e-15)
    assert_allclose(audit.build_dense(uniform_state()).matrix, np.eye(8) / 8, atol=1e-15)


def test_dense_eigenvalues_are_probabilities():
    rng = np.random.default_rng(0)
    for _ in range(200):
        s = from_probabilities(rng.dirichlet(np.ones(8)))
        eig = np.linalg.eigvalsh(audit.build_dense(s).matrix)
        assert_allclose(np.sort(eig), np.sort(s.p), atol=1e-10)


def test_dense_state_validation():
    with pytest.raises(GhzError):
        audit.DenseState(np.eye(8))
    m = np.eye(8) / 8
    m[0, 1] = m[1, 0] = 0.05  # couples |000> and |001>, not GHZ-diagonal
    with pytest.raises(GhzError):
        audit.ghz_probabilities(m)


def test_partial_transpose_is_an_involution():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(8, 8))
    for q in (1, 2, 3):
        assert_allclose(audit.partial_transpose(audit.partial_transpose(m, q), q), m)
    full = audit.partial_transpose(audit.partial_transpose(audit.partial_transpose(m, 1), 2), 3)
    assert_allclose(full, m.T)


def test_ppt_oracle_examples():
    for cut in audit.Cut:
        assert not audit.ppt_eigen_oracle(ghz_basis_state(1), cut)
        assert audit.ppt_eigen_oracle(uniform_state(), cut)


def test_grid_bound_examples():
    assert audit.grid_witness_bound((1, 1, 1, 1)) == pytest.approx(4.0, abs=1e-3)
    assert audit.grid_witness_bound((0, 0, 0, -1)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(GhzError):
        audit.grid_witness_bound((1, 1, 1, 1), resolution=0.1)


def test_reduced_objective_matches_three_angle_maximum():
    # maximizing over c by hand, on a brute-force 3D grid
    rng = np.random.default_rng(2)
    g = np.linspace(-math.pi, math.pi, 73)
    A, B, C = np.meshgrid(g, g, g, indexing="ij")
    for _ in range(5):
        X = rng.normal(size=4)
        full = (X[0] * np.cos(A + B + C) + X[1] * np.cos(A) + X[2] * np.cos(B) + X[3] * np.cos(C)).max(2)
        red = audit._reduced_objective(X, g[:, None], g[None, :])
        assert np.all(red >= full - 1e-12)
        assert np.abs(red - full).max() <= np.abs(X).sum() * (g[1] - g[0]) ** 2


def test_border_value_endpoints():
    assert audit.border_value(1.0) == pytest.approx(1.0, abs=1e-6)
    assert audit.border_value(0.5) == pytest.approx(-1.0, abs=1e-6)


def test_kraus_channel_identity():
    s = from_probabilities(np.random.default_rng(3).dirichlet(np.ones(8)))
    out = audit.dense_pauli_channel(s, [(1, 0, 0, 0)] * 3)
    assert_allclose(out.p, s.p, atol=1e-14)


def test_random_search_trivial_cases():
    assert audit.random_search_ree(uniform_state()) == 0.0
    assert audit.random_search_ree(ghz_basis_state(1), rounds=2, n_iters=200) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.slow
def test_random_search_flat_closed_form():
    s = from_density_entries([0.125] * 4, [0.1, 0.1, 0.1, -0.1])
    bound = audit.random_search_ree(s)
    E = ree(s).E
    # boundary bisection accepts points within eps_crit = 1e-9 of the hull
    assert E - 1e-8 <= bound <= E + 1e-4


@pytest.mark.slow
def test_random_search_matches_numeric_solver():
    rng = np.random.default_rng(5)
    n = 0
    while n < 3:
        s = from_probabilities(rng.dirichlet(np.ones(8) * rng.choice([0.2, 1, 3])))
        if is_fully_separable(s).fully_separable:
            continue
        n += 1
        E = ree_numeric(s).E
        bound = audit.random_search_ree(s, seed=n)
        assert E - 1e-8 <= bound <= E + 1e-4
