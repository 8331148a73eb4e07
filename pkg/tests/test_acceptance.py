"""Acceptance suite: every criterion at its stated tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from asymptotica import zoo
from asymptotica.asymptotics import classify, decompose_corollary, kerchy_blocks, power_bound_estimate
from asymptotica.backward import backward_chain, corollary5_agreement, is_in_MT, norm_constancy, t_infinity_membership
from asymptotica.linalg import basis, min_norm_preimage, pseudoinverse, random_unit_vector
from asymptotica.verify import (
    contraction_plus_unitary,
    corollary5_ops,
    example3_vector,
    principal_angle,
    random_unitary,
    theorem7_operator,
    verify,
)

from . import oracles

crit = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


# ---------------------------------------------------------------- criterion 1


@crit(1, "example1: weight products")
def test_c1_weight_products_are_one():
    with Timer() as t:
        w = zoo.example1_weights(65).take(65)
        for k in (1, 2, 3):
            n = oracles.nk(k)
            assert oracles.ex1_log2_product(1, n) == 0
            assert abs(float(np.prod(w[:n])) - 1) <= 1e-12
        s = zoo.example1(2 * 65 + 2)
        for k in (1, 2, 3):
            n = oracles.nk(k)
            img = s.power_apply(basis(s.dim, 1), n)
            assert np.linalg.norm(img - basis(s.dim, n + 1)) <= 1e-12
    assert oracles.nk(3) == 65
    assert t.elapsed < 1.0


# ---------------------------------------------------------------- criterion 2


@crit(2, "example1: decay recipe")
def test_c2_decay_recipe_at_full_scale():
    eps = 0.1
    n4 = oracles.nk(4)
    dim = 2 * n4
    s = zoo.example1(dim)
    x = np.zeros(dim, dtype=complex)
    x[:16] = random_unit_vector(16, np.random.default_rng(0))
    n = zoo.example1_recipe_index(x, eps)
    # the recipe's two conditions, checked directly
    assert float(np.sum(np.abs(x[n:]) ** 2)) < eps / 32
    assert (1 / 2**n) ** 2 < eps / 2
    assert n in {oracles.nk(k) for k in range(1, 5)}
    # per-term inequalities, exact
    for i in range(1, n + 1):
        assert oracles.ex1_log2_product(i, i + n - 1) <= 0
        assert oracles.ex1_log2_product(i + n, i + 2 * n - 1) == -n
    for j in range(n + 1, 4 * n + 1):
        assert oracles.ex1_log2_product(j, j + 2 * n - 1) <= 2
    head = float(np.sum(np.abs(x[:n]) ** 2)) * (1 / 2**n) ** 2
    tail = float(np.sum(np.abs(x[n:]) ** 2)) * 4**2
    assert tail <= eps / 2
    got = float(np.linalg.norm(s.power_apply(x, 2 * n)) ** 2)
    assert got <= head + tail + 1e-15
    assert got <= eps


@crit(2, "example1: decay recipe")
def test_c2_verify_case_passes():
    assert verify("example1").passed


# ---------------------------------------------------------------- criterion 3


@crit(3, "example1: non-stability witness")
def test_c3_power_norms_reach_four():
    n3 = oracles.nk(3)
    s = zoo.example1(4 * n3)
    pb = power_bound_estimate(s, 2 * n3)
    assert pb.m_est >= 4
    assert pb.attained_at <= 2 * n3
    # the maximizing column agrees with the exact weight-product scan
    best = max(
        oracles.ex1_log2_product(i, i + pb.attained_at - 1) for i in range(1, 4 * n3 - pb.attained_at + 1)
    )
    assert abs(pb.m_est - 2.0 ** float(best)) <= 1e-9 * pb.m_est


@crit(3, "example1: non-stability witness")
def test_c3_lower_bound_for_e3_at_k3():
    n3, i0 = oracles.nk(3), 3
    s = zoo.example1(4 * n3)
    # ||S^(N_k+1-i0) e_i0|| lands on e_(N_k+1): value 1/(w_1 ... w_(i0-1)), exactly
    exact = 2.0 ** float(-oracles.ex1_log2_product(1, i0 - 1))
    got = np.linalg.norm(s.power_apply(basis(s.dim, i0), n3 + 1 - i0))
    assert exact == 2.0
    assert abs(got - exact) <= 1e-12
    # the literal exponent N_k - i0 stops one step short: 2**(4/5), not >= 1/(w_1 w_2 w_3)
    lit = np.linalg.norm(s.power_apply(basis(s.dim, i0), n3 - i0))
    assert abs(lit - 2.0 ** float(oracles.ex1_log2_product(i0, n3 - 1))) <= 1e-12
    assert abs(lit - 2 ** 0.8) <= 1e-12


# ---------------------------------------------------------------- criterion 4


@crit(4, "example2: idempotent pair-sum")
def test_c4_example2():
    with Timer() as t:
        op = zoo.example2_op(8)
        a = op.to_dense()
        assert np.array_equal(a @ a, a)
        rng = np.random.default_rng(4)
        for _ in range(10):
            x = op.apply(random_unit_vector(8, rng))
            ch = backward_chain(op, x, 16)
            assert norm_constancy(ch, 0.0).max_deviation == 0.0
            assert np.array_equal(ch.elements, np.broadcast_to(x, ch.elements.shape))
        y = op.adjoint_apply(basis(8, 2))
        cl = classify(op, [y], 64)
        norms = cl.adjoint[0].trusted
        assert np.ptp(norms) <= 1e-12
        assert not cl.evidence["C.0"]
    assert t.elapsed < 1.0


# ---------------------------------------------------------------- criterion 5


@crit(5, "example3: direct sum of weighted backward shifts")
def test_c5_contraction_and_closed_form_chain():
    with Timer() as t:
        op = zoo.example3(64, 64)
        for blk in op.blocks:
            assert np.all(blk.weights <= 1.0)
        x = example3_vector(64, 64)
        prev = 0.0
        for m in (2, 4, 8, 16):
            ch = backward_chain(op, x, m, mode="joint")
            got = float(np.linalg.norm(ch.elements[m]) ** 2)
            assert abs(got - oracles.ex3_closed_norm_sq(m, 64)) <= 1e-9
            assert got > prev
            prev = got
        ti = t_infinity_membership(op, x, 16)
        assert ti.trusted.all()
        assert ti.residuals.max() <= 1e-9
    assert t.elapsed < 10.0


@crit(5, "example3: direct sum of weighted backward shifts")
def test_c5_is_in_mt_growth_witness():
    op = zoo.example3(64, 64)
    x = example3_vector(64, 64)
    with Timer() as t:
        v = is_in_MT(op, x)
    assert t.elapsed < 10.0
    assert v.verdict == "not-in-MT", v.witness


@crit(5, "example3: direct sum of weighted backward shifts")
def test_c5_adjoint_evidence_and_product_limit():
    op = zoo.example3(64, 64)
    samples = [example3_vector(64, 64)] + [basis(op.dim, 1 + 64 * (n - 1)) for n in (1, 2, 64)]
    assert classify(op, samples, 62).evidence["C.1"]
    # weight products of block n tend to n^(-1/2); the schedule agrees with direct multiplication
    for n in (2, 4, 16):
        direct = oracles.ex3_weight_product(n, 10_000)
        assert abs(direct - n ** -(0.5 - 1 / 10_000)) <= 1e-12
        assert abs(float(np.prod(zoo.example3_weights(n).take(10_000))) - direct) <= 1e-10
        assert abs(direct - n**-0.5) < abs(direct - n**-2.0)


# ---------------------------------------------------------------- criterion 6


def _norms(a, f, ns):
    out, y = {}, f
    for n in range(1, max(ns) + 1):
        y = a @ y
        if n in ns:
            out[n] = float(np.linalg.norm(y))
    return out


@crit(6, "example4: Volterra orbit rates")
def test_c6_abc_identity_inverse_norm_allan_pedersen():
    with Timer() as t:
        m = 512
        v = zoo.volterra_matrix(m)
        assert np.array_equal(v, oracles.volterra_midpoint(m))
        assert np.array_equal(v + v.T, np.full((m, m), 1.0 / m))
        gaps = []
        for g in (64, 128, 256, 512):
            inv = np.linalg.inv(np.eye(g) + zoo.volterra_matrix(g))
            gaps.append(abs(1 - np.linalg.norm(inv, 2)))
        assert gaps[-1] <= 0.01
        assert all(a >= b for a, b in zip(gaps, gaps[1:]))
        e = np.exp(zoo.grid(m))
        lhs = (np.eye(m) - v) * (e[None, :] / e[:, None])
        res = np.linalg.norm(lhs - np.linalg.inv(np.eye(m) + v), 2)
        assert res <= 10 / m
    assert t.elapsed < 30.0


@crit(6, "example4: Volterra orbit rates")
def test_c6_d_sqrt_n_decay():
    m = 512
    v = zoo.volterra_matrix(m)
    a = np.eye(m) - v
    for seed in range(5):
        f = random_unit_vector(m, np.random.default_rng(seed))
        d = _norms(a, v @ f, (10, 200))
        assert np.sqrt(10) * d[10] >= 10 * np.sqrt(200) * d[200], f"seed {seed}: {d}"


@crit(6, "example4: Volterra orbit rates")
def test_c6_e_inverse_growth():
    m = 512
    v = zoo.volterra_matrix(m)
    g = np.linalg.inv(np.eye(m) + v - np.full((m, m), 1.0 / m))
    for seed in range(5):
        f = random_unit_vector(m, np.random.default_rng(seed))
        d = _norms(g, f, (10, 200))
        assert d[200] >= 10 * d[10]


# ---------------------------------------------------------------- criterion 7


@crit(7, "example5: C00 evidence for (I+V)^-1")
@pytest.mark.parametrize("which", ["inverse", "inverse-adjoint"])
def test_c7_inverse_powers_decay(which):
    m = 512
    inv = np.linalg.inv(np.eye(m) + zoo.volterra_matrix(m))
    a = inv if which == "inverse" else inv.T
    for seed in range(5):
        f = random_unit_vector(m, np.random.default_rng(seed))
        d = _norms(a, f, (10, 200))
        assert d[10] >= 10 * d[200], f"seed {seed}: {d}"


@crit(7, "example5: C00 evidence for (I+V)^-1")
def test_c7_forward_powers_grow():
    m = 512
    a = np.eye(m) + zoo.volterra_matrix(m)
    for seed in range(5):
        f = random_unit_vector(m, np.random.default_rng(seed))
        d = _norms(a, f, (10, 200))
        assert d[200] >= 10 * d[10]


# ---------------------------------------------------------------- criterion 8


@crit(8, "corollary2, theorem3, theorem4: stable/unitary split")
def test_c8_closed_form_cases():
    with Timer() as t:
        op, stable, unit = contraction_plus_unitary(40)
        dec = decompose_corollary(op, 128)
        assert principal_angle(dec.stable_basis, stable) <= 1e-6
        assert principal_angle(dec.mt_closure_basis, unit) <= 1e-6
        assert dec.all_in_mt
        u = zoo.from_matrix(random_unitary(16, np.random.default_rng(1)))
        du = decompose_corollary(u, 64)
        assert du.mt_closure_basis.shape[1] == 16 and du.all_in_mt
        j = zoo.jordan(8)
        assert decompose_corollary(j, 64).stable_basis.shape[1] == 8
        for s in range(4):
            assert is_in_MT(j, random_unit_vector(8, np.random.default_rng(s))).verdict == "not-in-MT"
        assert classify(j, [basis(8, i) for i in range(1, 9)], 64).evidence["C.0"]
    assert t.elapsed < 5.0


# ---------------------------------------------------------------- criterion 9


@crit(9, "corollary5: adjoint decay iff inverse growth")
def test_c9_decay_iff_inverse_growth():
    expected = {"2I": False, "I-V_M": True, "E^-1(I-V_M)E": True, "unitary": False}
    for name, (op, n_max) in corollary5_ops(16).items():
        samples = [random_unit_vector(op.dim, np.random.default_rng(s)) for s in range(3)]
        res = corollary5_agreement(op, samples, n_max)
        assert res["agree"], name
        assert res["adjoint_decaying"] is expected[name], name


# ---------------------------------------------------------------- criterion 10


@crit(10, "lemma6: triangular block form")
def test_c10_kerchy_blocks():
    rng = np.random.default_rng(10)
    r = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    u = zoo.diag(np.exp(2j * np.pi * rng.random(8)))
    op = zoo.block_lower_2x2(zoo.jordan(8), r, u)
    kb = kerchy_blocks(op, 128, direction="adjoint")
    assert kb.stable_basis.shape[1] == 8
    assert kb.vanishing_norm <= 1e-8
    assert np.linalg.norm(kb.matrix[:8, 8:], 2) <= 1e-8
    assert kb.t11_decaying and kb.t22_bounded_below


# ---------------------------------------------------------------- criterion 11


@crit(11, "theorem7: both directions")
def test_c11_theorem7():
    with Timer() as t:
        op = theorem7_operator(8)
        dec = decompose_corollary(op, 128, check_membership=False)
        q = dec.mt_closure_basis
        assert q.shape[1] == 8
        for s in range(20):
            rng = np.random.default_rng(s)
            x = q @ (rng.standard_normal(8) + 1j * rng.standard_normal(8))
            ch = backward_chain(op, x / np.linalg.norm(x), 16)
            assert ch.bounded_verdict == "bounded"
            assert norm_constancy(ch).max_deviation <= 1e-8
        half = zoo.scale(zoo.identity(8), 0.5)
        ch = backward_chain(half, random_unit_vector(8, np.random.default_rng(0)), 8)
        assert not norm_constancy(ch).is_constant
        assert verify("theorem7").passed
    assert t.elapsed < 5.0


# ---------------------------------------------------------------- criterion 12
# randomized property suites, 200 cases each, dim <= 64

c12 = pytest.mark.criterion(12, "property suites")
PROP = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])

dims = st.integers(min_value=1, max_value=64)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def cmat(rng, rows, cols, rank=None):
    a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    if rank is not None and rank < min(rows, cols):
        b = rng.standard_normal((rank, cols)) + 1j * rng.standard_normal((rank, cols))
        a = a[:, :rank] @ b
    return a


def zoo_operator(kind, dim, rng):
    if kind == "forward_shift":
        return zoo.forward_shift(zoo.custom_weights(rng.random(dim)), dim)
    if kind == "backward_shift":
        return zoo.backward_shift(zoo.custom_weights(rng.random(dim)), dim)
    if kind == "example1":
        return zoo.example1(dim)
    if kind == "example2":
        return zoo.example2_op(2 * max(1, dim // 2))
    if kind == "volterra":
        return zoo.volterra(dim)
    if kind == "mult_exp":
        return zoo.mult_exp(dim)
    if kind == "projection_constants":
        return zoo.projection_constants(dim)
    if kind == "jordan":
        return zoo.jordan(dim)
    if kind == "direct_sum":
        h = max(2, dim // 2)
        return zoo.direct_sum([zoo.volterra(h), zoo.backward_shift(zoo.example3_weights(3), h)])
    if kind == "block_lower_2x2":
        h = max(1, dim // 2)
        return zoo.block_lower_2x2(zoo.jordan(h), cmat(rng, h, h), zoo.diag(np.exp(1j * rng.random(h))))
    if kind == "compose":
        return zoo.compose(zoo.volterra(dim), zoo.mult_exp(dim))
    if kind == "sum":
        return zoo.op_sum(zoo.identity(dim), zoo.scale(zoo.volterra(dim), -1.0))
    if kind == "inverse":
        return zoo.inverse_op(zoo.op_sum(zoo.identity(dim), zoo.volterra(dim)))
    if kind == "adjoint":
        return zoo.adjoint_op(zoo.example1(dim))
    if kind == "similarity":
        return zoo.similarity(zoo.volterra(dim), zoo.mult_exp(dim))
    raise AssertionError(kind)


KINDS = [
    "forward_shift", "backward_shift", "example1", "example2", "volterra", "mult_exp",
    "projection_constants", "jordan", "direct_sum", "block_lower_2x2", "compose", "sum",
    "inverse", "adjoint", "similarity",
]  # fmt: skip


@c12
@PROP
@given(kind=st.sampled_from(KINDS), dim=st.integers(2, 64), seed=seeds)
def test_adjoint_consistency(kind, dim, seed):
    rng = np.random.default_rng(seed)
    op = zoo_operator(kind, dim, rng)
    x = random_unit_vector(op.dim, rng)
    y = random_unit_vector(op.dim, rng)
    lhs = np.vdot(y, op.apply(x))
    rhs = np.vdot(op.adjoint_apply(y), x)
    scale = max(1.0, np.linalg.norm(op.to_dense(), 2))
    assert abs(lhs - rhs) <= 1e-12 * scale


@c12
@PROP
@given(dim=st.integers(2, 64), seed=seeds, m=st.integers(1, 8), mode=st.sampled_from(["stepwise", "joint"]))
def test_chain_residual_validity(dim, seed, m, mode):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, dim + 1))
    a = cmat(rng, dim, dim, rank) / np.sqrt(dim)
    op = zoo.from_matrix(a)
    # origin inside T^m(H) so a chain of length m exists
    x = op.power_apply(random_unit_vector(dim, rng), m)
    if np.linalg.norm(x) < 1e-8:
        return
    # generic rank-deficient a has ran a^2 = ran a, so one step of lookahead keeps the chain alive
    ch = backward_chain(op, x, m, mode=mode)
    direct = [np.linalg.norm(a @ ch.elements[n + 1] - ch.elements[n]) for n in range(m)]
    assert max(direct) <= ch.chain_tol
    assert np.allclose(ch.residuals, direct, rtol=0, atol=1e-15)
    assert np.array_equal(ch.elements[0], x)


@c12
@PROP
@given(dim=st.integers(2, 64), seed=seeds)
def test_stepwise_minimality_vs_random_alternatives(dim, seed):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, dim))
    a = cmat(rng, dim, dim, rank) / np.sqrt(dim)
    op = zoo.from_matrix(a)
    x = op.apply(random_unit_vector(dim, rng))
    ch = backward_chain(op, x, 1, lookahead=0)
    z = ch.elements[1]
    # every other preimage differs from z by a kernel vector
    _, s, vh = np.linalg.svd(a)
    ker = vh[rank:].conj().T
    for _ in range(5):
        alt = z + ker @ (rng.standard_normal(ker.shape[1]) + 1j * rng.standard_normal(ker.shape[1]))
        assert np.linalg.norm(a @ alt - x) <= 1e-8
        assert np.linalg.norm(z) <= np.linalg.norm(alt) + 1e-10


@c12
@PROP
@given(rows=dims, cols=dims, seed=seeds, deficient=st.booleans())
def test_pseudoinverse_contract(rows, cols, seed, deficient):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, min(rows, cols) + 1)) if deficient else None
    a = cmat(rng, rows, cols, rank)
    p = pseudoinverse(a)
    cond = np.linalg.norm(a, 2) * np.linalg.norm(p, 2)
    tol = 1e-12 * cond
    assert np.linalg.norm(a @ p @ a - a) <= tol * np.linalg.norm(a, 2)
    assert np.linalg.norm(p @ a @ p - p) <= tol * np.linalg.norm(p, 2)
    assert np.linalg.norm((a @ p).conj().T - a @ p) <= tol
    assert np.linalg.norm((p @ a).conj().T - p @ a) <= tol
    b = a @ random_unit_vector(cols, rng)
    z = min_norm_preimage(a, b)
    assert np.linalg.norm(a @ z - b) <= tol * max(1.0, np.linalg.norm(b))
    # minimal norm: no component in the kernel of a
    assert np.linalg.norm(z - p @ (a @ z)) <= tol * max(1.0, np.linalg.norm(z))
