"""Shared test helpers: independent oracles and random-instance generators."""

import numpy as np
import pytest


def loop_partial_transpose(matrix: np.ndarray, dims, axes) -> np.ndarray:
    """Index-arithmetic partial transpose, independent of the library path."""
    n = len(dims)
    d = int(np.prod(dims))
    axes = set(axes)

    def digits(flat):
        out = []
        for dim in reversed(dims):
            out.append(flat % dim)
            flat //= dim
        return list(reversed(out))

    def flat(ds):
        value = 0
        for label, dim in zip(ds, dims):
            value = value * dim + label
        return value

    out = np.zeros_like(matrix)
    for i in range(d):
        di = digits(i)
        for j in range(d):
            dj = digits(j)
            ri = [dj[k] if k in axes else di[k] for k in range(n)]
            cj = [di[k] if k in axes else dj[k] for k in range(n)]
            out[flat(ri), flat(cj)] = matrix[i, j]
    return out


def random_hermitian(rng, d, scale=1.0):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (m + m.conj().T) / 2.0


def random_pure_amplitudes(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density_matrix(rng, d, rank=None):
    rank = rank or d
    a = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)
