"""Dense complex linear algebra used by every other module.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``;
the helpers here only coerce, check shapes and implement the two
non-trivial primitives (minimal-norm preimages and Hermitian kernel/range
splits).
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, NotHermitianError

#: default relative singular-value cutoff for pseudoinverse solves
PINV_TOL = 1e-10


def as_vec(v) -> np.ndarray:
    """Return ``v`` as a one-dimensional complex array (copy-free when possible)."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {arr.shape}")
    return arr


def as_mat(a) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {arr.shape}")
    return arr


def basis(dim: int, i: int) -> np.ndarray:
    """Standard basis vector ``e_i`` of length ``dim`` (1-based index)."""
    if not 1 <= i <= dim:
        raise DimensionError(f"basis index {i} outside 1..{dim}")
    e = np.zeros(dim, dtype=complex)
    e[i - 1] = 1.0
    return e


def inner(u, v) -> complex:
    """Inner product linear in the first argument: sum_i u_i conj(v_i)."""
    return complex(np.vdot(v, u))


def norm(v) -> float:
    return float(np.linalg.norm(v))


def adjoint(a) -> np.ndarray:
    return np.conj(as_mat(a)).T


def support(v, rel_tol: float = 1e-14) -> int:
    """Largest 1-based index whose entry is non-negligible; 0 for the zero vector.

    Entries below ``rel_tol * max|v_i|`` count as zero so that round-off left
    behind by SVD-based solves does not inflate the support.
    """
    v = np.asarray(v)
    if v.size == 0:
        return 0
    mags = np.abs(v)
    peak = mags.max()
    if peak == 0.0:
        return 0
    nz = np.nonzero(mags > rel_tol * peak)[0]
    return int(nz[-1]) + 1


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Complex vector with independent standard-normal real/imaginary parts, normalized."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def _truncated_svd(a, tol):
    a = as_mat(a)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    smax = s[0] if s.size else 0.0
    keep = s > tol * smax if smax > 0 else np.zeros_like(s, dtype=bool)
    return u[:, keep], s[keep], vh[keep]


def pseudoinverse(a, tol: float = PINV_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with singular values below ``tol * s_max`` dropped."""
    a = as_mat(a)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    u, s, vh = _truncated_svd(a, tol)
    return (vh.conj().T / s) @ u.conj().T


def pinv_solver(a, tol: float = PINV_TOL):
    """Return ``b -> pinv(a) @ b`` applied through the SVD factors.

    Applying the factors avoids the cancellation of multiplying by an
    explicitly formed pseudoinverse of an ill-conditioned matrix.
    """
    a = as_mat(a)
    if a.size == 0:
        return lambda b: np.zeros(a.shape[1], dtype=complex)
    u, s, vh = _truncated_svd(a, tol)
    vt = vh.conj().T
    uh = u.conj().T
    return lambda b: vt @ ((uh @ b) / s)


def min_norm_preimage(a, b, tol: float = PINV_TOL) -> np.ndarray:
    """Minimal-norm least-squares solution of ``a @ x = b``.

    Parameters
    ----------
    a : (rows, cols) array_like
    b : (rows,) array_like
    tol : float
        Relative cutoff; singular values below ``tol * sigma_max`` are
        treated as zero.

    Returns
    -------
    x : (cols,) ndarray
        The unique minimizer of ``||x||`` among minimizers of ``||a x - b||``.
    """
    a = as_mat(a)
    b = as_vec(b)
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"matrix has {a.shape[0]} rows but rhs has length {b.shape[0]}")
    if not np.any(b):
        return np.zeros(a.shape[1], dtype=complex)
    return pinv_solver(a, tol)(b)


def range_basis(a, tol: float = PINV_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical range of ``a``."""
    a = as_mat(a)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    return u[:, s > tol * s[0]]


class EigSplit(NamedTuple):
    """Kernel/range split of a Hermitian PSD matrix.

    ``kernel`` and ``range`` hold orthonormal bases as columns; ``eigenvalues``
    is ascending and its first ``kernel.shape[1]`` entries belong to the kernel.
    """

    kernel: np.ndarray
    range: np.ndarray
    eigenvalues: np.ndarray


def hermitian_eig_split(g, tol: float = 1e-8, scale: float | None = None) -> EigSplit:
    """Split the space into near-null and remaining eigenspaces of ``g``.

    An eigenvector belongs to the kernel when its eigenvalue is below
    ``tol * scale``; ``scale`` defaults to the largest eigenvalue. Passing an
    explicit scale matters when ``g`` is uniformly tiny (every eigenvalue is
    then "large" relative to the others).
    """
    g = as_mat(g)
    if g.shape[0] != g.shape[1]:
        raise DimensionError(f"expected a square matrix, got {g.shape}")
    gnorm = np.linalg.norm(g, 2) if g.size else 0.0
    asym = np.linalg.norm(g - g.conj().T, 2) if g.size else 0.0
    if asym > tol * gnorm:
        raise NotHermitianError(f"||G - G*|| = {asym:.3e} exceeds {tol:.1e} * ||G|| = {tol * gnorm:.3e}")
    w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
    ref = w[-1] if scale is None and w.size else (scale or 0.0)
    cut = tol * max(ref, 0.0)
    in_kernel = w < cut if cut > 0 else w <= 0.0
    return EigSplit(v[:, in_kernel], v[:, ~in_kernel], w)
