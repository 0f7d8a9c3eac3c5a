import numpy as np
import pytest

from diamondsps.hilbert import (
    HilbertSpace,
    annihilation,
    atomic_projector,
    embed,
    number_operator,
)


@pytest.fixture
def space():
    return HilbertSpace(3, 3)


def test_dims_and_index_bijective(space):
    assert space.total_dim == 36
    seen = set()
    for a in range(4):
        for nc in range(3):
            for nw in range(3):
                seen.add(space.index(a, nc, nw))
    assert seen == set(range(36))


def test_fock_dim_must_admit_one_photon():
    with pytest.raises(ValueError):
        HilbertSpace(1, 3)


def test_ladder_operator_number_property():
    dim = 5
    a = annihilation(dim)
    n = a.conj().T @ a
    assert np.allclose(n, number_operator(dim))
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        assert np.allclose(n @ e, k * e)


def test_embed_identity(space):
    out = embed(np.eye(4), 0, space)
    assert np.allclose(out, np.eye(36))


def test_embed_number_trace_brute_force(space):
    # oracle: sum the photon number over every basis state explicitly
    n_op = embed(number_operator(3), 1, space)
    expected = 0.0
    for a in range(4):
        for nc in range(3):
            for nw in range(3):
                expected += nc
    assert expected == 36
    assert np.isclose(np.trace(n_op).real, expected)


def test_embed_disjoint_factors_commute(space):
    left = embed(atomic_projector(0, 1), 0, space) @ embed(annihilation(3).conj().T, 1, space)
    right = embed(np.eye(3), 2, space)
    comm = left @ right - right @ left
    assert np.linalg.norm(comm) == 0.0


def test_embed_dimension_mismatch(space):
    with pytest.raises(ValueError):
        embed(np.eye(3), 0, space)
