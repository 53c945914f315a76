import numpy as np
import pytest

from cqblab.core.eigen import hermitian_residual, jacobi_eigh


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_matches_numpy(n):
    rng = np.random.default_rng(n)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = (g + g.conj().T) / 2
    result = jacobi_eigh(m)
    assert result.converged
    assert np.allclose(result.values, np.linalg.eigvalsh(m), atol=1e-10)
    v = result.vectors
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert np.allclose(m @ v, v * result.values, atol=1e-9)


def test_degenerate_spectrum():
    result = jacobi_eigh(np.diag([2.0, 1.0, 1.0, 3.0]))
    assert result.values.tolist() == [1.0, 1.0, 2.0, 3.0]
    assert result.sweeps == 0
    assert result.min == 1.0
    assert result.max == 3.0


def test_hermitian_residual():
    assert hermitian_residual(np.array([[1, 1j], [-1j, 2]])) == 0.0
    assert hermitian_residual(np.array([[0, 1], [0, 0]])) == 1.0
    assert hermitian_residual(np.zeros((2, 2))) == 0.0


def test_complex_rotation_on_the_n_by_n_matrix():
    m = np.array([[1.0, 1j], [-1j, 1.0]])
    result = jacobi_eigh(m)
    assert result.sweeps == 1
    assert result.vectors.shape == (2, 2)
    assert np.iscomplexobj(result.vectors)
    assert np.allclose(result.values, [0.0, 2.0], atol=1e-14)
    assert np.allclose(m @ result.vectors, result.vectors * result.values)
