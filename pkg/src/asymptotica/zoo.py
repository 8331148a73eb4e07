"""Finite truncations of the operators studied here, plus combinators.

Every constructor returns an :class:`OperatorHandle`. Shifts and direct sums
act in O(dim) without building a matrix; ``to_dense`` materializes on demand.

Faithfulness: a truncation reproduces the infinite-dimensional operator only
inside a window. ``faithful_rule(s, n)`` answers whether ``T**n`` applied to a
vector supported in the first ``s`` coordinates agrees with the untruncated
operator; ``adjoint_faithful_rule`` does the same for ``T*``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, SingularOperatorError
from .linalg import as_mat, support

KINDS = (
    "forward-shift",
    "backward-shift",
    "dense",
    "volterra",
    "direct-sum",
    "block-2x2",
    "inverse",
    "similarity",
    "idempotent-pairsum",
)

#: condition number above which ``inverse_op`` refuses to invert
MAX_CONDITION = 1e12


def _always(s, n):
    return True


def _window(dim):
    def rule(s, n):
        return s + n <= dim
    return rule


def _bcast(w, x):
    # reshape a coordinate-wise factor so it broadcasts over trailing columns
    return w.reshape((-1,) + (1,) * (x.ndim - 1))


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    """A ``dim x dim`` linear operator given by its action and adjoint action.

    ``apply`` and ``adjoint_apply`` accept a vector of length ``dim`` or a
    ``(dim, k)`` array of column vectors.
    """

    dim: int
    apply_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    adjoint_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    kind: str = "dense"
    faithful_rule: Callable[[int, int], bool] = field(default=_always, repr=False)
    adjoint_faithful_rule: Callable[[int, int], bool] = field(default=_always, repr=False)
    norm_bound_hint: float | None = None
    description: str = ""
    blocks: tuple = field(default=(), repr=False)
    weights: np.ndarray | None = field(default=None, repr=False)
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("operator dimension must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind tag {self.kind!r}")

    def _check(self, x):
        x = np.asarray(x, dtype=complex)
        if x.shape[0] != self.dim:
            raise DimensionError(f"operator of dim {self.dim} applied to array of shape {x.shape}")
        return x

    def apply(self, x) -> np.ndarray:
        return self.apply_fn(self._check(x))

    def adjoint_apply(self, y) -> np.ndarray:
        return self.adjoint_fn(self._check(y))

    def __matmul__(self, x):
        return self.apply(x)

    def power_apply(self, x, n: int, direction: str = "forward") -> np.ndarray:
        f = self.apply if direction == "forward" else self.adjoint_apply
        y = self._check(x)
        for _ in range(n):
            y = f(y)
        return y

    @cached_property
    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        m = self.apply_fn(np.eye(self.dim, dtype=complex))
        m.setflags(write=False)
        return m

    def to_dense(self) -> np.ndarray:
        """Dense matrix of the truncation (cached; do not modify)."""
        return self.dense

    @property
    def block_slices(self) -> list[slice]:
        if not self.blocks:
            return [slice(0, self.dim)]
        out, start = [], 0
        for b in self.blocks:
            out.append(slice(start, start + b.dim))
            start += b.dim
        return out

    def faithful_horizon(self, x, n_max: int, direction: str = "forward") -> int:
        """Largest ``n <= n_max`` for which powers applied to ``x`` are faithful.

        Direct sums evaluate each block on its own coordinates and take the
        minimum over blocks where ``x`` is nonzero.
        """
        x = np.asarray(x)
        if self.blocks:
            h = n_max
            for blk, sl in zip(self.blocks, self.block_slices):
                part = x[sl]
                if np.any(part):
                    h = min(h, blk.faithful_horizon(part, n_max, direction))
            return h
        rule = self.faithful_rule if direction == "forward" else self.adjoint_faithful_rule
        s = support(x)
        if rule(s, n_max):
            return n_max
        lo, hi = 0, n_max  # rule(s, lo) holds, rule(s, hi) fails
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if rule(s, mid):
                lo = mid
            else:
                hi = mid
        return lo

    def trusted(self, x) -> bool:
        """Whether ``x`` sits strictly inside the truncation window in both directions."""
        x = np.asarray(x)
        if self.blocks:
            return all(b.trusted(x[sl]) for b, sl in zip(self.blocks, self.block_slices))
        s = support(x)
        return self.faithful_rule(s, 1) and self.adjoint_faithful_rule(s, 1)


def from_matrix(a, kind: str = "dense", description: str = "", norm_bound_hint=None) -> OperatorHandle:
    a = as_mat(a).copy()
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"operator matrix must be square, got {a.shape}")
    a.setflags(write=False)
    ah = a.conj().T
    return OperatorHandle(
        dim=a.shape[0],
        apply_fn=lambda x: a @ x,
        adjoint_fn=lambda y: ah @ y,
        kind=kind,
        description=description or f"dense {a.shape[0]}x{a.shape[0]}",
        norm_bound_hint=norm_bound_hint,
        matrix=a,
    )


# --------------------------------------------------------------------------
# weight schedules
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightSchedule:
    """Positive shift weights ``w_1, w_2, ...`` (1-based).

    ``length`` is ``None`` for unbounded schedules; truncated schedules raise
    on indices past the end.
    """

    generator: Callable[[int], float]
    description: str
    length: int | None = None

    def __call__(self, i: int) -> float:
        if i < 1 or (self.length is not None and i > self.length):
            raise IndexError(f"weight index {i} outside schedule ({self.description})")
        return self.generator(i)

    def take(self, count: int) -> np.ndarray:
        """The first ``count`` weights as a float array."""
        return np.array([self(i) for i in range(1, count + 1)], dtype=float)


def nk_sequence(k: int) -> int:
    """N_1 = 1, N_{k+1} = 3 N_k + 2 N_k**2."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = 1
    for _ in range(k - 1):
        n = 3 * n + 2 * n * n
    return n


def example1_exponents(count: int) -> list:
    """Base-2 logarithms of the first ``count`` Example-1 weights.

    Entries are 0 (for w_1), -1 (weight 1/2) or ``(1, N_k)`` meaning 1/N_k;
    kept symbolic so callers can sum exactly.
    """
    out = [0]
    k = 1
    while len(out) < count:
        nk = nk_sequence(k)
        nk1 = nk_sequence(k + 1)
        # i = N_k + 1 .. 3 N_k  -> 1/2
        out.extend([-1] * (2 * nk))
        # i = 3 N_k + 1 .. N_{k+1}  -> 2 ** (1 / N_k)
        out.extend([(1, nk)] * (nk1 - 3 * nk))
        k += 1
    return out[:count]


def example1_log2_prefix(count: int) -> list[Fraction]:
    """Exact prefix sums p(j) = log2(w_1 ... w_j) for j = 0..count."""
    out = [Fraction(0)]
    for e in example1_exponents(count):
        out.append(out[-1] + (Fraction(e) if not isinstance(e, tuple) else Fraction(*e)))
    return out


def example1_recipe_index(x, eps: float, k_max: int = 6) -> int:
    """Smallest N in {N_k} with tail mass sum_{i>N} |x_i|^2 < eps/32 and 4**-N < eps/2.

    ``x`` must have unit norm; raises if no N_k with k <= k_max qualifies.
    """
    mass = np.abs(np.asarray(x)) ** 2
    for k in range(1, k_max + 1):
        n = nk_sequence(k)
        if mass[n:].sum() < eps / 32 and 4.0 ** (-n) < eps / 2:
            return n
    raise ValueError(f"no N_k with k <= {k_max} satisfies the recipe for eps={eps}")


def example1_weights(count: int) -> WeightSchedule:
    """Example-1 weights truncated to ``count`` entries.

    w_1 = 1, w_i = 1/2 for N_k < i <= 3 N_k and w_i = 2**(1/N_k) for
    3 N_k < i <= N_{k+1}.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    vals = np.array(
        [1.0 if e == 0 else 0.5 if e == -1 else 2.0 ** (1.0 / e[1]) for e in example1_exponents(count)]
    )
    return WeightSchedule(lambda i: float(vals[i - 1]), f"example1[{count}]", length=count)


def example3_weights(n: int) -> WeightSchedule:
    """Block-``n`` weights: 1 for i <= 2, (1/n)**(1/(i-1) - 1/i) afterwards."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def gen(i):
        if i <= 2:
            return 1.0
        return (1.0 / n) ** (1.0 / (i - 1) - 1.0 / i)

    return WeightSchedule(gen, f"example3[n={n}]")


def unit_weights() -> WeightSchedule:
    return WeightSchedule(lambda i: 1.0, "unit")


def custom_weights(values: Sequence[float]) -> WeightSchedule:
    vals = [float(v) for v in values]
    if any(not v > 0 for v in vals):
        raise ValueError("shift weights must be strictly positive")
    return WeightSchedule(lambda i: vals[i - 1], f"custom[{len(vals)}]", length=len(vals))


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------


def forward_shift(w: WeightSchedule, dim: int) -> OperatorHandle:
    """Truncated weighted shift S e_i = w_i e_{i+1}; S e_dim = 0."""
    if dim < 2:
        raise DimensionError("shift needs dim >= 2")
    wt = w.take(dim - 1)

    def fwd(x):
        out = np.zeros_like(x)
        out[1:] = _bcast(wt, x) * x[:-1]
        return out

    def adj(y):
        out = np.zeros_like(y)
        out[:-1] = _bcast(wt, y) * y[1:]
        return out

    return OperatorHandle(
        dim=dim,
        apply_fn=fwd,
        adjoint_fn=adj,
        kind="forward-shift",
        faithful_rule=_window(dim),
        norm_bound_hint=float(wt.max()),
        description=f"forward_shift({w.description}, dim={dim})",
        weights=wt,
    )


def backward_shift(w: WeightSchedule, dim: int) -> OperatorHandle:
    """Truncated backward shift S_w e_{i+1} = w_i e_i; S_w e_1 = 0."""
    if dim < 2:
        raise DimensionError("shift needs dim >= 2")
    wt = w.take(dim - 1)

    def bwd(x):
        out = np.zeros_like(x)
        out[:-1] = _bcast(wt, x) * x[1:]
        return out

    def adj(y):
        out = np.zeros_like(y)
        out[1:] = _bcast(wt, y) * y[:-1]
        return out

    return OperatorHandle(
        dim=dim,
        apply_fn=bwd,
        adjoint_fn=adj,
        kind="backward-shift",
        adjoint_faithful_rule=_window(dim),
        norm_bound_hint=float(wt.max()),
        description=f"backward_shift({w.description}, dim={dim})",
        weights=wt,
    )


def example1(dim: int) -> OperatorHandle:
    return forward_shift(example1_weights(dim), dim)


def example2_op(dim: int) -> OperatorHandle:
    """(x1, x2, x3, x4, ...) -> (0, x1 + x2, 0, x3 + x4, ...)."""
    if dim < 2 or dim % 2:
        raise DimensionError("example2 needs an even dimension")

    def fwd(x):
        out = np.zeros_like(x)
        out[1::2] = x[0::2] + x[1::2]
        return out

    def adj(y):
        out = np.zeros_like(y)
        out[0::2] = y[1::2]
        out[1::2] = y[1::2]
        return out

    return OperatorHandle(
        dim=dim,
        apply_fn=fwd,
        adjoint_fn=adj,
        kind="idempotent-pairsum",
        norm_bound_hint=float(np.sqrt(2.0)),
        description=f"example2(dim={dim})",
    )


def example3(blocks: int = 64, block_dim: int = 64) -> OperatorHandle:
    """Direct sum over n = 1..blocks of backward shifts with example-3 weights."""
    return direct_sum([backward_shift(example3_weights(n), block_dim) for n in range(1, blocks + 1)])


def identity(dim: int) -> OperatorHandle:
    return OperatorHandle(
        dim=dim,
        apply_fn=lambda x: x.copy(),
        adjoint_fn=lambda y: y.copy(),
        norm_bound_hint=1.0,
        description=f"identity({dim})",
    )


def grid(m: int, scheme: str = "midpoint") -> np.ndarray:
    """Quadrature nodes on [0, 1] used by ``volterra`` and ``mult_exp``."""
    if m < 2:
        raise DimensionError("grid needs at least 2 points")
    if scheme == "midpoint":
        return (np.arange(m) + 0.5) / m
    if scheme == "trapezoid":
        return np.linspace(0.0, 1.0, m)
    raise ValueError(f"unknown quadrature scheme {scheme!r}")


def volterra_matrix(m: int, scheme: str = "midpoint") -> np.ndarray:
    grid(m, scheme)
    if scheme == "midpoint":
        h = 1.0 / m
        v = np.tril(np.full((m, m), h), -1) + np.eye(m) * (h / 2)
    else:
        h = 1.0 / (m - 1)
        v = np.tril(np.full((m, m), h), -1)
        v[:, 0] = h / 2
        v[np.arange(m), np.arange(m)] = h / 2
        v[0, 0] = 0.0
    return v.astype(complex)


def volterra(m: int, scheme: str = "midpoint") -> OperatorHandle:
    """Quadrature discretization of (Vf)(x) = int_0^x f(t) dt on ``m`` nodes.

    The midpoint matrix has 1/m below the diagonal and 1/(2m) on it, so that
    V + V* equals the averaging matrix exactly.
    """
    op = from_matrix(volterra_matrix(m, scheme), kind="volterra", description=f"volterra({m}, {scheme})")
    return op


def projection_constants(m: int) -> OperatorHandle:
    """Orthogonal projection onto constant grid functions (all entries 1/m)."""
    return from_matrix(np.full((m, m), 1.0 / m), description=f"projection_constants({m})", norm_bound_hint=1.0)


def mult_exp(m: int, scheme: str = "midpoint") -> OperatorHandle:
    """Multiplication by e^t on the quadrature grid."""
    d = np.exp(grid(m, scheme)).astype(complex)
    dc = d.conj()
    return OperatorHandle(
        dim=m,
        apply_fn=lambda x: _bcast(d, x) * x,
        adjoint_fn=lambda y: _bcast(dc, y) * y,
        norm_bound_hint=float(np.abs(d).max()),
        description=f"mult_exp({m}, {scheme})",
        matrix=np.diag(d),
    )


def diag(entries) -> OperatorHandle:
    d = np.asarray(entries, dtype=complex)
    return from_matrix(np.diag(d), description=f"diag({d.size})")


def jordan(dim: int) -> OperatorHandle:
    """Nilpotent Jordan block: e_i -> e_{i+1}, e_dim -> 0."""
    return from_matrix(np.eye(dim, k=-1), description=f"jordan({dim})", norm_bound_hint=1.0)


# --------------------------------------------------------------------------
# combinators
# --------------------------------------------------------------------------


def direct_sum(ops: Sequence[OperatorHandle]) -> OperatorHandle:
    """Block-diagonal sum; blocks are applied independently and never densified."""
    ops = tuple(ops)
    if not ops:
        raise DimensionError("direct_sum of no operators")
    dims = [o.dim for o in ops]
    bounds = np.cumsum([0] + dims)
    slices = [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]

    def make(use_adjoint):
        def f(x):
            out = np.empty_like(x)
            for o, sl in zip(ops, slices):
                out[sl] = (o.adjoint_fn if use_adjoint else o.apply_fn)(x[sl])
            return out
        return f

    hints = [o.norm_bound_hint for o in ops]
    return OperatorHandle(
        dim=int(bounds[-1]),
        apply_fn=make(False),
        adjoint_fn=make(True),
        kind="direct-sum",
        norm_bound_hint=None if any(h is None for h in hints) else max(hints),
        description=f"direct_sum[{len(ops)} blocks]",
        blocks=ops,
    )


def block_lower_2x2(t11: OperatorHandle, t21, t22: OperatorHandle) -> OperatorHandle:
    """The operator (a, b) -> (T11 a, T21 a + T22 b) on H1 (+) H2.

    ``t21`` maps H1 into H2: either a ``(dim2, dim1)`` array or, when the two
    spaces have equal dimension, an operator handle.
    """
    d1, d2 = t11.dim, t22.dim
    c = t21.to_dense() if isinstance(t21, OperatorHandle) else as_mat(t21)
    if c.shape != (d2, d1):
        raise DimensionError(f"T21 must have shape {(d2, d1)}, got {c.shape}")
    ch = c.conj().T

    def fwd(x):
        a, b = x[:d1], x[d1:]
        return np.concatenate([t11.apply_fn(a), c @ a + t22.apply_fn(b)])

    def adj(y):
        a, b = y[:d1], y[d1:]
        return np.concatenate([t11.adjoint_fn(a) + ch @ b, t22.adjoint_fn(b)])

    return OperatorHandle(
        dim=d1 + d2,
        apply_fn=fwd,
        adjoint_fn=adj,
        kind="block-2x2",
        description=f"block_lower_2x2({t11.description}, T21, {t22.description})",
    )


def inverse_op(op: OperatorHandle, max_condition: float = MAX_CONDITION) -> OperatorHandle:
    """Inverse through a cached LU factorization; refuses ill-conditioned input."""
    if op.blocks:
        return direct_sum([inverse_op(b, max_condition) for b in op.blocks])
    a = op.to_dense()
    s = np.linalg.svd(a, compute_uv=False)
    cond = np.inf if s[-1] == 0 else s[0] / s[-1]
    if not cond < max_condition:
        raise SingularOperatorError(f"condition number {cond:.3e} exceeds {max_condition:.1e}")
    lu = scipy.linalg.lu_factor(a)
    return OperatorHandle(
        dim=op.dim,
        apply_fn=lambda x: scipy.linalg.lu_solve(lu, x),
        adjoint_fn=lambda y: scipy.linalg.lu_solve(lu, y, trans=2),
        kind="inverse",
        norm_bound_hint=float(1.0 / s[-1]),
        description=f"inverse({op.description})",
    )


_ADJ_KIND = {"forward-shift": "backward-shift", "backward-shift": "forward-shift"}


def adjoint_op(op: OperatorHandle) -> OperatorHandle:
    if op.blocks:
        return direct_sum([adjoint_op(b) for b in op.blocks])
    return OperatorHandle(
        dim=op.dim,
        apply_fn=op.adjoint_fn,
        adjoint_fn=op.apply_fn,
        kind=_ADJ_KIND.get(op.kind, op.kind if op.kind in ("dense", "volterra", "inverse", "similarity") else "dense"),
        faithful_rule=op.adjoint_faithful_rule,
        adjoint_faithful_rule=op.faithful_rule,
        norm_bound_hint=op.norm_bound_hint,
        description=f"adjoint({op.description})",
        matrix=None if op.matrix is None else op.matrix.conj().T,
    )


def scale(op: OperatorHandle, c: complex) -> OperatorHandle:
    c = complex(c)
    cc = c.conjugate()
    return OperatorHandle(
        dim=op.dim,
        apply_fn=lambda x: c * op.apply_fn(x),
        adjoint_fn=lambda y: cc * op.adjoint_fn(y),
        faithful_rule=op.faithful_rule,
        adjoint_faithful_rule=op.adjoint_faithful_rule,
        norm_bound_hint=None if op.norm_bound_hint is None else abs(c) * op.norm_bound_hint,
        description=f"scale({op.description}, {c})",
    )


def _joint_rules(ops, factor):
    rules = [o.faithful_rule for o in ops]
    arules = [o.adjoint_faithful_rule for o in ops]
    if all(r is _always for r in rules + arules):
        return _always, _always
    # every word in (A1 ... Ak)^n contains at most factor*n letters
    return (
        lambda s, n: all(r(s, factor * n) for r in rules),
        lambda s, n: all(r(s, factor * n) for r in arules),
    )


def compose(*ops: OperatorHandle) -> OperatorHandle:
    """Product ``ops[0] @ ops[1] @ ...`` (rightmost applied first)."""
    if not ops:
        raise DimensionError("compose of no operators")
    dim = ops[0].dim
    if any(o.dim != dim for o in ops):
        raise DimensionError(f"compose dims differ: {[o.dim for o in ops]}")

    def fwd(x):
        for o in reversed(ops):
            x = o.apply_fn(x)
        return x

    def adj(y):
        for o in ops:
            y = o.adjoint_fn(y)
        return y

    fr, ar = _joint_rules(ops, len(ops))
    hints = [o.norm_bound_hint for o in ops]
    return OperatorHandle(
        dim=dim,
        apply_fn=fwd,
        adjoint_fn=adj,
        faithful_rule=fr,
        adjoint_faithful_rule=ar,
        norm_bound_hint=None if any(h is None for h in hints) else float(np.prod(hints)),
        description="compose(" + ", ".join(o.description for o in ops) + ")",
    )


def op_sum(*ops: OperatorHandle) -> OperatorHandle:
    if not ops:
        raise DimensionError("sum of no operators")
    dim = ops[0].dim
    if any(o.dim != dim for o in ops):
        raise DimensionError(f"sum dims differ: {[o.dim for o in ops]}")
    fr, ar = _joint_rules(ops, 1)
    hints = [o.norm_bound_hint for o in ops]
    return OperatorHandle(
        dim=dim,
        apply_fn=lambda x: sum(o.apply_fn(x) for o in ops),
        adjoint_fn=lambda y: sum(o.adjoint_fn(y) for o in ops),
        faithful_rule=fr,
        adjoint_faithful_rule=ar,
        norm_bound_hint=None if any(h is None for h in hints) else float(sum(hints)),
        description="sum(" + ", ".join(o.description for o in ops) + ")",
    )


def similarity(op: OperatorHandle, s: OperatorHandle) -> OperatorHandle:
    """S^{-1} T S."""
    inner_op = compose(inverse_op(s), op, s)
    return OperatorHandle(
        dim=op.dim,
        apply_fn=inner_op.apply_fn,
        adjoint_fn=inner_op.adjoint_fn,
        kind="similarity",
        description=f"similarity({op.description}, {s.description})",
    )


#: constructor names accepted by the configuration language, with a one-line summary
ZOO = {
    "forward_shift": "weighted forward shift S e_i = w_i e_{i+1}; args: weights, dim",
    "backward_shift": "weighted backward shift S e_{i+1} = w_i e_i; args: weights, dim",
    "example1": "forward shift with the recursive N_k weight schedule; args: dim",
    "example2": "idempotent pair-sum (x1,x2,..) -> (0,x1+x2,0,x3+x4,..); args: dim (even)",
    "example3": "direct sum of backward shifts with weights (1/n)^(1/(i-1)-1/i); args: blocks, block_dim",
    "volterra": "Volterra integration operator on a quadrature grid; args: M, scheme",
    "mult_exp": "multiplication by e^t on the grid; args: M, scheme",
    "identity": "identity; args: dim",
    "projection_constants": "projection onto constants on the grid; args: M",
    "diag": "diagonal matrix; args: entries",
    "jordan": "nilpotent Jordan block; args: dim",
    "dense": "explicit matrix; args: rows",
    "sum": "sum of operators",
    "compose": "product of operators (rightmost first)",
    "inverse": "inverse (LU, condition-checked)",
    "adjoint": "Hilbert-space adjoint",
    "scale": "scalar multiple; args: operator, c",
    "similarity": "S^-1 T S; args: T, S",
    "direct_sum": "block-diagonal direct sum",
    "block_lower_2x2": "[[T11, 0], [T21, T22]]; args: T11, T21, T22",
}
