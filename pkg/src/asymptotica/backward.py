"""Backward sequences T x_{n+1} = x_n: construction, membership evidence, norm tests.

Two chain constructions are offered. ``stepwise`` takes at every step the
minimal-norm preimage inside ran(T**lookahead) (``lookahead=0`` is the plain
pseudoinverse step). ``joint`` solves T**m x_m = x once with minimal norm and
fills in x_n = T**(m-n) x_m; its last element is the globally smallest
possible, which is what non-membership witnesses rely on.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .asymptotics import GROWTH_FACTOR, OrbitRecord, orbit
from .errors import ChainError
from .linalg import PINV_TOL, as_vec, min_norm_preimage, pseudoinverse, random_unit_vector, range_basis
from .zoo import OperatorHandle, inverse_op

GROWING_SLOPE = 0.01
FLAT_SLOPE = 1e-4
FLAT_SPREAD = 1e-2
BOUND_CAP_FACTOR = 1e3
CHAIN_TOL_FACTOR = 1e-8


def _parts(op, x):
    """(block dense matrix, slice) pairs; direct sums split, everything else is one part."""
    if op.blocks:
        return [(b.to_dense(), sl) for b, sl in zip(op.blocks, op.block_slices)]
    return [(op.to_dense(), slice(0, op.dim))]


def default_horizon(op: OperatorHandle) -> int:
    """min(dim/2, 64) for truncations with a window, min(dim, 64) for exact finite operators."""
    probe = op.faithful_rule(op.dim, op.dim) and op.adjoint_faithful_rule(op.dim, op.dim)
    if probe and not op.blocks:
        return max(1, min(op.dim, 64))
    return max(1, min(op.dim // 2, 64))


def growth_fit(profile) -> tuple[str, float]:
    """Classify a norm profile from the slope of log-norms over its last half."""
    p = np.asarray(profile, dtype=float)
    if p.size < 2 or np.any(p <= 0) or not np.all(np.isfinite(p)):
        if np.any(~np.isfinite(p)):
            return "growing", np.inf
        return "inconclusive", np.nan
    start = min(p.size // 2, p.size - 2)
    tail = p[start:]
    n = np.arange(start, p.size)
    slope = float(np.polyfit(n, np.log(tail), 1)[0])
    spread = (tail.max() - tail.min()) / tail.max()
    if slope > GROWING_SLOPE:
        return "growing", slope
    if abs(slope) < FLAT_SLOPE and spread < FLAT_SPREAD:
        return "bounded", slope
    return "inconclusive", slope


@dataclass(frozen=True)
class BackwardChain:
    """x_0 .. x_m with T x_{n+1} = x_n up to ``chain_tol``.

    ``elements`` has shape (m + 1, dim). ``trusted_prefix`` counts the leading
    elements whose support stays strictly inside the truncation window; the
    bounded verdict and growth rate only use that prefix.
    """

    elements: np.ndarray
    residuals: np.ndarray
    norm_profile: np.ndarray
    sup_norm: float
    bounded_verdict: str
    growth_rate: float
    minimality_mode: str
    trusted_prefix: int
    chain_tol: float
    lookahead: int = 0

    @property
    def m(self) -> int:
        return self.elements.shape[0] - 1


def _stepwise_parts(parts, x, m, lookahead, tol):
    elems = np.zeros((m + 1, x.size), dtype=complex)
    elems[0] = x
    for a, sl in parts:
        xb = x[sl]
        if not np.any(xb):
            continue
        if lookahead > 0:
            q = range_basis(np.linalg.matrix_power(a, lookahead), tol)
            solve = q @ pseudoinverse(a @ q, tol)
        else:
            solve = pseudoinverse(a, tol)
        # one fixed, moderately conditioned solve: the explicit matrix is fine here
        cur = xb
        for n in range(1, m + 1):
            cur = solve @ cur
            elems[n, sl] = cur
    return elems


def _joint_parts(parts, x, m, tol):
    elems = np.zeros((m + 1, x.size), dtype=complex)
    elems[0] = x
    for a, sl in parts:
        xb = x[sl]
        if not np.any(xb):
            continue
        top = min_norm_preimage(np.linalg.matrix_power(a, m), xb, tol)
        elems[m, sl] = top
        cur = top
        for n in range(m - 1, 0, -1):
            cur = a @ cur
            elems[n, sl] = cur
    return elems


def backward_chain(
    op: OperatorHandle,
    x,
    m: int,
    mode: str = "stepwise",
    lookahead: int = 1,
    chain_tol: float | None = None,
    tol: float = PINV_TOL,
) -> BackwardChain:
    """Build a backward chain of length ``m`` starting at ``x``.

    Raises :class:`ChainError` ("not in T^m(H)") when some step cannot be
    solved to within ``chain_tol`` (default ``1e-8 * ||x||``).
    """
    x = as_vec(x)
    xn = float(np.linalg.norm(x))
    if xn == 0.0:
        raise ValueError("backward chain from the zero vector")
    if m < 1:
        raise ValueError("m must be >= 1")
    if mode not in ("stepwise", "joint"):
        raise ValueError(f"mode must be 'stepwise' or 'joint', got {mode!r}")
    ctol = CHAIN_TOL_FACTOR * xn if chain_tol is None else chain_tol
    parts = _parts(op, x)
    if mode == "stepwise":
        elems = _stepwise_parts(parts, x, m, lookahead, tol)
    else:
        elems = _joint_parts(parts, x, m, tol)
    res = np.array([np.linalg.norm(op.apply(elems[n + 1]) - elems[n]) for n in range(m)])
    bad = np.nonzero(res > ctol)[0]
    if bad.size:
        n = int(bad[0])
        raise ChainError(f"x not in T^m(H): step {n + 1} residual {res[n]:.3e} > {ctol:.3e}", step=n + 1, residual=float(res[n]))
    profile = np.linalg.norm(elems, axis=1)
    trusted = 0
    while trusted <= m and op.trusted(elems[trusted]):
        trusted += 1
    verdict, rate = growth_fit(profile[: max(trusted, 1)])
    return BackwardChain(
        elements=elems,
        residuals=res,
        norm_profile=profile,
        sup_norm=float(profile.max()),
        bounded_verdict=verdict,
        growth_rate=rate,
        minimality_mode=mode,
        trusted_prefix=trusted,
        chain_tol=ctol,
        lookahead=lookahead if mode == "stepwise" else 0,
    )


class Constancy(NamedTuple):
    is_constant: bool
    max_deviation: float


def norm_constancy(chain: BackwardChain, tol: float = 1e-8) -> Constancy:
    """Whether every ||x_n|| is within ``tol * ||x_0||`` of ||x_0||."""
    p = chain.norm_profile
    dev = float(np.abs(p - p[0]).max())
    return Constancy(dev <= tol * p[0], dev)


@dataclass(frozen=True)
class TInfinity:
    """Joint minimal-norm solves of T^m z = x for m = 1..m_max."""

    ms: np.ndarray
    residuals: np.ndarray
    norms: np.ndarray
    trusted: np.ndarray
    tol: float

    @property
    def in_t_infinity(self) -> bool:
        """Evidence for x in the intersection of all ran T^m (trusted steps only)."""
        return bool(np.all(self.residuals[self.trusted] <= self.tol))

    @property
    def trusted_prefix(self) -> int:
        t = np.asarray(self.trusted)
        return int(np.argmin(t)) if not t.all() else int(t.size)


def t_infinity_membership(op: OperatorHandle, x, m_max: int, tol: float = 1e-9, pinv_tol: float = PINV_TOL) -> TInfinity:
    """For each m <= m_max: residual of the joint solve and the minimal preimage norm."""
    x = as_vec(x)
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    parts = [(a, sl) for a, sl in _parts(op, x) if np.any(x[sl])]
    powers = [np.eye(a.shape[0], dtype=complex) for a, _ in parts]
    res, norms, trusted = [], [], []
    for m in range(1, m_max + 1):
        z = np.zeros_like(x)
        for i, (a, sl) in enumerate(parts):
            powers[i] = a @ powers[i]
            z[sl] = min_norm_preimage(powers[i], x[sl], pinv_tol)
        res.append(np.linalg.norm(op.power_apply(z, m) - x))
        norms.append(np.linalg.norm(z))
        trusted.append(op.trusted(z))
    return TInfinity(np.arange(1, m_max + 1), np.array(res), np.array(norms), np.array(trusted, dtype=bool), tol)


@dataclass(frozen=True)
class MTVerdict:
    """Outcome of :func:`is_in_MT`.

    ``profile`` holds ||x||, then the minimal preimage norms for m = 1..trusted
    horizon. ``witness`` explains a not-in-MT or inconclusive outcome.
    """

    verdict: str
    sup_norm: float
    horizon: int
    trusted_horizon: int
    bound_cap: float
    growth_rate: float
    profile: np.ndarray
    witness: str
    inequality_ok: bool | None = None


def is_in_MT(
    op: OperatorHandle,
    x,
    horizon: int | None = None,
    bound_cap: float | None = None,
    n_samples: int = 8,
    seed: int = 0,
) -> MTVerdict:
    """Evidence on whether ``x`` starts a bounded backward sequence.

    The minimal preimage norms mu_m = min{||z|| : T^m z = x} are a lower
    envelope for every backward chain from ``x``, so mu_m exceeding
    ``bound_cap`` (or a missing preimage) is a genuine non-membership witness.
    A flat profile below the cap yields ``in-MT`` after an explicit joint
    chain is built and the inequality |<x, y>| <= sup ||x_n|| * ||T*^n y|| is
    checked on random ``y``.
    """
    x = as_vec(x)
    xn = float(np.linalg.norm(x))
    if xn == 0.0:
        raise ValueError("is_in_MT of the zero vector")
    h = default_horizon(op) if horizon is None else int(horizon)
    cap = BOUND_CAP_FACTOR * xn if bound_cap is None else bound_cap
    ctol = CHAIN_TOL_FACTOR * xn
    ti = t_infinity_membership(op, x, h, tol=ctol)
    th = ti.trusted_prefix
    profile = np.concatenate([[xn], ti.norms[:th]])

    def out(verdict, witness, sup=np.nan, rate=np.nan, ineq=None):
        return MTVerdict(verdict, float(sup), h, th, cap, float(rate), profile, witness, ineq)

    if th == 0:
        return out("inconclusive", "no trusted preimage step inside the truncation window")
    bad = np.nonzero(ti.residuals[:th] > ctol)[0]
    if bad.size:
        m = int(bad[0]) + 1
        return out("not-in-MT", f"no preimage at step {m} (residual {ti.residuals[m - 1]:.3e})")
    over = np.nonzero(profile > cap)[0]
    if over.size:
        m = int(over[0])
        return out("not-in-MT", f"minimal preimage norm {profile[m]:.3e} exceeds cap {cap:.3e} at m={m}", profile.max())
    verdict, rate = growth_fit(profile)
    if verdict != "bounded":
        return out("inconclusive", f"minimal-norm profile not flat (slope {rate:.3e}) and below cap", profile.max(), rate)
    chain = backward_chain(op, x, th, mode="joint", chain_tol=ctol)
    sup = chain.sup_norm
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(n_samples):
        y = random_unit_vector(op.dim, rng)
        hy = min(op.faithful_horizon(y, th, "adjoint"), th)
        rec = orbit(op, y, max(hy, 1), "adjoint")
        lhs = abs(np.vdot(y, x))
        ok &= bool(lhs <= sup * rec.norms[: hy + 1].min() + 1e-8)
    if not ok:
        return out("inconclusive", "bounded chain found but inequality cross-check failed", sup, rate, False)
    return out("in-MT", "flat minimal-norm profile with explicit bounded chain", sup, rate, True)


@dataclass(frozen=True)
class InverseOrbit:
    norms: np.ndarray
    verdict: str
    growth_factor: float
    adjoint: OrbitRecord


def inverse_orbit_growth(op: OperatorHandle, x, n_max: int, growth_factor: float = GROWTH_FACTOR) -> InverseOrbit:
    """Norms ||T^-n x|| via repeated LU solves, paired with the adjoint orbit of T.

    Verdict is ``growing`` when the last computed norm exceeds
    ``growth_factor * ||x||`` (a transient bump does not count).
    """
    x = as_vec(x)
    xn = float(np.linalg.norm(x))
    if xn == 0.0:
        raise ValueError("inverse orbit of the zero vector")
    inv = inverse_op(op)
    norms = np.full(n_max + 1, np.inf)
    norms[0] = xn
    y = x
    last = xn
    for n in range(1, n_max + 1):
        y = inv.apply(y)
        norms[n] = last = np.linalg.norm(y)
        if last > 1e200:
            break
    verdict = "growing" if last > growth_factor * xn else "bounded"
    return InverseOrbit(norms, verdict, growth_factor, orbit(op, x, n_max, "adjoint"))


def corollary5_agreement(op: OperatorHandle, samples, n_max: int) -> dict:
    """Compare 'adjoint orbits decay' with 'inverse orbits grow' over samples."""
    recs = [inverse_orbit_growth(op, v, n_max) for v in samples]
    decaying = all(r.adjoint.verdict == "decaying" for r in recs)
    growing = all(r.verdict == "growing" for r in recs)
    return {"adjoint_decaying": decaying, "inverse_growing": growing, "agree": decaying == growing, "records": recs}
