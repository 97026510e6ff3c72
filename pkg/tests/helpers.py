"""Shared test utilities."""

import numpy as np

from nvzfs.spincore import Operator


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


def partial_trace(mat: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one factor of a bipartite operator; keep in {0, 1}."""
    d0, d1 = dims
    t = mat.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ikjk->ij", t)
    return np.einsum("kikj->ij", t)


def as_operator(mat: np.ndarray) -> Operator:
    return Operator(mat, tuple(str(i) for i in range(mat.shape[0])))
