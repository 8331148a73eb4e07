"""Orbits, stability evidence, Cesaro Gram operators and the two decompositions.

Everything here produces *evidence* over explicit finite horizons: limits are
replaced by minima over the trusted part of an orbit, and Banach limits by
Cesaro averages with a stabilization diagnostic.
"""

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AsymptoticaError, CrossValidationError, DimensionError
from .linalg import as_vec, hermitian_eig_split, random_unit_vector
from .zoo import OperatorHandle, from_matrix

DECAY_TOL = 1e-6
FLOOR_FRAC = 1e-3
GROWTH_FACTOR = 10.0
GRAM_TOL = 1e-8
GRAM_MAX_DIM = 2048
DEFAULT_HORIZON = 256
#: relative Cesaro drift over the last quarter above which a Gram is "glim-unresolved"
STABILIZATION_LIMIT = 0.05
_OVERFLOW = 1e200

VERDICTS = ("decaying", "bounded-below", "growing", "inconclusive")


@dataclass(frozen=True)
class OrbitRecord:
    """Norm sequence ``||T^n x||`` (or ``||T*^n x||``) for n = 0..n_max."""

    direction: str
    norms: np.ndarray
    faithful_horizon: int
    verdict: str
    liminf_proxy: float
    decay_tol: float
    floor_frac: float
    growth_factor: float
    stays_small: bool | None = None

    @property
    def trusted(self) -> np.ndarray:
        return self.norms[: self.faithful_horizon + 1]


def _verdict(window, x_norm, decay_tol, floor_frac, growth_factor):
    lo = float(window.min())
    if window.size < 2:
        return "inconclusive", lo, None
    if lo < decay_tol * x_norm:
        first = int(np.argmax(window < decay_tol * x_norm))
        stays = bool(window[first:].max() <= floor_frac * x_norm)
        return "decaying", lo, stays
    if window[-1] > growth_factor * x_norm:
        return "growing", lo, None
    if lo > floor_frac * x_norm:
        return "bounded-below", lo, None
    return "inconclusive", lo, None


def orbit(
    op: OperatorHandle,
    x,
    n_max: int,
    direction: str = "forward",
    decay_tol: float = DECAY_TOL,
    floor_frac: float = FLOOR_FRAC,
    growth_factor: float = GROWTH_FACTOR,
) -> OrbitRecord:
    """Iterate ``op`` (or its adjoint) on ``x`` and classify the norm sequence.

    The verdict only looks at ``n <= faithful_horizon``:

    * ``decaying``: the minimum drops below ``decay_tol * ||x||``;
    * ``growing``: the last trusted norm exceeds ``growth_factor * ||x||``;
    * ``bounded-below``: the minimum stays above ``floor_frac * ||x||``;
    * ``inconclusive`` otherwise.
    """
    if direction not in ("forward", "adjoint"):
        raise ValueError(f"direction must be 'forward' or 'adjoint', got {direction!r}")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    x = as_vec(x)
    x_norm = float(np.linalg.norm(x))
    if x_norm == 0.0:
        raise ValueError("orbit of the zero vector")
    step = op.apply if direction == "forward" else op.adjoint_apply
    norms = np.full(n_max + 1, np.inf)
    norms[0] = x_norm
    y = x
    for n in range(1, n_max + 1):
        y = step(y)
        norms[n] = np.linalg.norm(y)
        if norms[n] > _OVERFLOW:
            break
    h = op.faithful_horizon(x, n_max, direction)
    verdict, lo, stays = _verdict(norms[: h + 1], x_norm, decay_tol, floor_frac, growth_factor)
    return OrbitRecord(direction, norms, h, verdict, lo, decay_tol, floor_frac, growth_factor, stays)


# --------------------------------------------------------------------------
# power bounds
# --------------------------------------------------------------------------


class PowerBound(NamedTuple):
    m_est: float
    attained_at: int


def _shift_power_norms(weights, n_max):
    # ||S^n|| for a weighted shift is the largest product of n consecutive weights
    logs = np.concatenate([[0.0], np.cumsum(np.log(weights))])
    out = np.zeros(n_max)
    for n in range(1, min(n_max, weights.size) + 1):
        out[n - 1] = np.exp((logs[n:] - logs[:-n]).max())
    return out


def _power_iteration_norm(op, n, iters=60, seed=0):
    rng = np.random.default_rng(seed)
    v = random_unit_vector(op.dim, rng)
    est = 0.0
    for _ in range(iters):
        w = op.power_apply(v, n)
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 0.0
        v = op.power_apply(w, n, "adjoint")
        v /= np.linalg.norm(v)
    return est


def power_norms(op: OperatorHandle, n_max: int, exact_max_dim: int = 512) -> np.ndarray:
    """Operator norms ``||T^n||`` for n = 1..n_max on the truncation."""
    if op.blocks:
        return np.max([power_norms(b, n_max, exact_max_dim) for b in op.blocks], axis=0)
    if op.weights is not None and op.kind in ("forward-shift", "backward-shift"):
        return _shift_power_norms(op.weights, n_max)
    out = np.zeros(n_max)
    if op.dim <= exact_max_dim:
        a = op.to_dense()
        p = np.eye(op.dim, dtype=complex)
        for n in range(n_max):
            p = a @ p
            out[n] = np.linalg.norm(p, 2)
        return out
    for n in range(1, n_max + 1):
        out[n - 1] = _power_iteration_norm(op, n)
    return out


def power_bound_estimate(op: OperatorHandle, n_max: int, exact_max_dim: int = 512) -> PowerBound:
    """Largest ``||T^n||`` over 1 <= n <= n_max and the first n attaining it."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    norms = power_norms(op, n_max, exact_max_dim)
    i = int(np.argmax(norms))
    return PowerBound(float(norms[i]), i + 1)


# --------------------------------------------------------------------------
# Cesaro Gram operators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoteGram:
    """Cesaro approximation of the Banach-limit form [x, y] = <G x, y>.

    ``average`` is the mean of T^n T*^n (``direction='adjoint'``) or
    T*^n T^n (``direction='forward'``) over ``burn_in < n <= N``.
    """

    average: np.ndarray
    N: int
    burn_in: int
    direction: str
    stabilization: float
    kernel_basis: np.ndarray
    range_basis: np.ndarray
    eigenvalues: np.ndarray
    tol: float = GRAM_TOL

    @property
    def glim_unresolved(self) -> bool:
        return self.stabilization > STABILIZATION_LIMIT

    def form(self, x, y) -> complex:
        return complex(np.vdot(as_vec(y), self.average @ as_vec(x)))


def asymptote_gram(
    op: OperatorHandle,
    N: int = DEFAULT_HORIZON,
    direction: str = "adjoint",
    burn_in: int | None = None,
    tol: float = GRAM_TOL,
    max_dim: int = GRAM_MAX_DIM,
) -> AsymptoteGram:
    """Average of T^n T*^n over the window ``burn_in < n <= N``.

    ``burn_in`` defaults to ``N // 2``; a Banach limit ignores any finite
    prefix, and dropping it keeps the kernel eigenvalues of strictly stable
    parts far below ``tol`` instead of decaying like 1/N.
    """
    if N < 8:
        raise ValueError("N must be >= 8")
    if op.dim > max_dim:
        raise DimensionError(f"dense Gram limited to dim <= {max_dim}, got {op.dim}")
    if direction not in ("forward", "adjoint"):
        raise ValueError(f"direction must be 'forward' or 'adjoint', got {direction!r}")
    b = N // 2 if burn_in is None else int(burn_in)
    if not 0 <= b < N:
        raise ValueError("burn_in must satisfy 0 <= burn_in < N")
    a = op.to_dense()
    p = np.linalg.matrix_power(a, b + 1) if b else a.copy()
    count = N - b
    checkpoints = set(np.unique(np.linspace(count - count // 4, count, min(count // 4 + 1, 33)).astype(int)))
    acc = np.zeros_like(a)
    snaps = []
    fro = []
    for k in range(1, count + 1):
        term = p @ p.conj().T if direction == "adjoint" else p.conj().T @ p
        acc += term
        fro.append(np.sqrt(abs(np.trace(term))))
        if k in checkpoints:
            snaps.append(acc / k)
        if k < count:
            p = a @ p
    g = acc / count
    g = 0.5 * (g + g.conj().T)
    gnorm = np.linalg.norm(g, 2)
    stab = 0.0 if gnorm == 0 else max(np.linalg.norm(s - g, 2) for s in snaps) / gnorm
    fro = np.asarray(fro)
    # baseline is ||T^0||_F = sqrt(dim)
    if fro[-1] > GROWTH_FACTOR * np.sqrt(op.dim) and np.all(np.diff(fro) >= 0):
        warnings.warn("powers grow monotonically over the horizon; operator may not be power-bounded", RuntimeWarning)
    w = np.linalg.eigvalsh(g)
    split = hermitian_eig_split(g, tol, scale=max(float(w[-1]), 1.0))
    return AsymptoteGram(g, N, b, direction, float(stab), split.kernel, split.range, split.eigenvalues, tol)


def stable_subspace(op: OperatorHandle, N: int = DEFAULT_HORIZON, n_max: int | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of {x : T*^n x -> 0}, cross-checked by orbits.

    Each kernel vector of the adjoint Gram must also have a decaying adjoint
    orbit; otherwise :class:`CrossValidationError` carries the vector.
    """
    gram = asymptote_gram(op, N, "adjoint")
    for v in gram.kernel_basis.T:
        rec = orbit(op, v, n_max or N, "adjoint")
        if rec.verdict != "decaying":
            raise CrossValidationError(f"kernel vector has adjoint orbit verdict {rec.verdict!r}", vector=v)
    return gram.kernel_basis


@dataclass(frozen=True)
class Decomposition:
    stable_basis: np.ndarray
    mt_closure_basis: np.ndarray
    orthogonality_defect: float
    defect_flagged: bool
    mt_verdicts: list = field(default_factory=list)
    gram: AsymptoteGram | None = None

    @property
    def all_in_mt(self) -> bool:
        return all(v.verdict == "in-MT" for v in self.mt_verdicts)


def decompose_corollary(
    op: OperatorHandle,
    N: int = DEFAULT_HORIZON,
    horizon: int | None = None,
    check_membership: bool = True,
) -> Decomposition:
    """H = {x : T*^n x -> 0} (+) closure of M(T), split through the adjoint Gram.

    Each range vector is additionally run through ``is_in_MT``; a defect above
    1e-6 is flagged but not fatal.
    """
    from .backward import is_in_MT

    gram = asymptote_gram(op, N, "adjoint")
    ker, rng = gram.kernel_basis, gram.range_basis
    defect = float(np.abs(ker.conj().T @ rng).max()) if ker.size and rng.size else 0.0
    verdicts = [is_in_MT(op, v, horizon) for v in rng.T] if check_membership else []
    return Decomposition(ker, rng, defect, defect > 1e-6, verdicts, gram)


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifyReport:
    forward: list
    adjoint: list
    evidence: dict
    mixed: bool
    m_est: float
    propagation_ok: bool

    def summary(self) -> str:
        flags = [k for k, v in self.evidence.items() if v]
        return ", ".join(flags) if flags else "no class evidence"


def propagation_holds(norms, m_est, rtol=1e-9) -> bool:
    """||T^m x|| <= M * min_{k<m} ||T^k x|| for every m (finite norms only)."""
    norms = np.asarray(norms)
    norms = norms[np.isfinite(norms)]
    if norms.size < 2:
        return True
    run_min = np.minimum.accumulate(norms)[:-1]
    bound = max(m_est, 1.0) * run_min * (1 + rtol) + 1e-300
    return bool(np.all(norms[1:] <= bound))


def classify(
    op: OperatorHandle,
    sample_vectors: Sequence,
    n_max: int,
    decay_tol: float = DECAY_TOL,
    floor_frac: float = FLOOR_FRAC,
    growth_factor: float = GROWTH_FACTOR,
) -> ClassifyReport:
    """Aggregate forward/adjoint orbit verdicts into class evidence.

    ``evidence`` maps ``"C0."``, ``"C1."``, ``"C.0"``, ``"C.1"`` to whether
    every sample supports that class; ``mixed`` is set when verdicts disagree
    across samples in either direction.
    """
    samples = [as_vec(v) for v in sample_vectors]
    if not samples:
        raise ValueError("classify needs at least one sample vector")
    kw = dict(decay_tol=decay_tol, floor_frac=floor_frac, growth_factor=growth_factor)
    fwd = [orbit(op, v, n_max, "forward", **kw) for v in samples]
    adj = [orbit(op, v, n_max, "adjoint", **kw) for v in samples]
    fv = [r.verdict for r in fwd]
    av = [r.verdict for r in adj]
    evidence = {
        "C0.": all(v == "decaying" for v in fv),
        "C1.": all(v == "bounded-below" for v in fv),
        "C.0": all(v == "decaying" for v in av),
        "C.1": all(v == "bounded-below" for v in av),
    }
    mixed = len(set(fv)) > 1 or len(set(av)) > 1
    m_est = power_bound_estimate(op, n_max).m_est
    prop = all(propagation_holds(r.trusted, m_est) for r in fwd)
    return ClassifyReport(fwd, adj, evidence, mixed, m_est, prop)


# --------------------------------------------------------------------------
# Kerchy-type triangular decomposition
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KerchyBlocks:
    """Blocks of ``T`` along stable subspace (+) its orthogonal complement.

    ``direction='forward'``: the stable subspace {x : T^n x -> 0} is
    T-invariant, so the block from it into the complement vanishes and the
    coupling ``t21`` maps complement -> stable subspace.

    ``direction='adjoint'``: the stable subspace {x : T*^n x -> 0} is
    T*-invariant, so ``T = [[t11, 0], [t21, t22]]`` with ``t21`` mapping
    stable subspace -> complement.
    """

    direction: str
    stable_basis: np.ndarray
    complement_basis: np.ndarray
    t11: np.ndarray
    t21: np.ndarray
    t22: np.ndarray
    matrix: np.ndarray
    vanishing_norm: float
    t11_verdicts: list
    t22_verdicts: list

    @property
    def t11_decaying(self) -> bool:
        return all(v == "decaying" for v in self.t11_verdicts)

    @property
    def t22_bounded_below(self) -> bool:
        return all(v == "bounded-below" for v in self.t22_verdicts)


def kerchy_blocks(
    op: OperatorHandle,
    N: int = DEFAULT_HORIZON,
    direction: str = "forward",
    n_samples: int = 4,
    n_max: int | None = None,
    seed: int = 0,
    block_tol: float = 1e-8,
) -> KerchyBlocks:
    """Triangularize a power-bounded ``op`` along its stable subspace.

    Raises :class:`AsymptoticaError` when the block that invariance forces to
    zero has norm above ``block_tol`` (the Gram has not converged).
    """
    gram = asymptote_gram(op, N, direction)
    ker, comp = gram.kernel_basis, gram.range_basis
    k = ker.shape[1]
    w = np.hstack([ker, comp])
    b = w.conj().T @ op.to_dense() @ w
    t11, t22 = b[:k, :k], b[k:, k:]
    if direction == "forward":
        vanishing, t21 = b[k:, :k], b[:k, k:]
    else:
        vanishing, t21 = b[:k, k:], b[k:, :k]
    vnorm = float(np.linalg.norm(vanishing, 2)) if vanishing.size else 0.0
    if vnorm > block_tol:
        raise AsymptoticaError(f"off-diagonal block that should vanish has norm {vnorm:.3e} (Gram not converged)")
    rng = np.random.default_rng(seed)
    steps = n_max or N

    def verdicts(block):
        if block.size == 0:
            return []
        h = from_matrix(block)
        return [orbit(h, random_unit_vector(h.dim, rng), steps, direction).verdict for _ in range(n_samples)]

    return KerchyBlocks(direction, ker, comp, t11, t21, t22, b, vnorm, verdicts(t11), verdicts(t22))
