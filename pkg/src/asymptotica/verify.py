"""Canned reproductions of each worked example and theorem, with pass/fail checks.

Each ``case_*`` function fills a :class:`~asymptotica.report.Report` with
measured rows and named checks. ``dim`` and ``horizon`` override the pinned
defaults where a case has such a parameter.
"""


import numpy as np
import scipy.linalg

from . import zoo
from .asymptotics import asymptote_gram, classify, decompose_corollary, kerchy_blocks, orbit, power_bound_estimate
from .backward import (
    backward_chain,
    corollary5_agreement,
    is_in_MT,
    norm_constancy,
    t_infinity_membership,
)
from .linalg import basis, random_unit_vector
from .report import Report

# --------------------------------------------------------------------------
# shared test operators
# --------------------------------------------------------------------------


def random_unitary(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def contraction_plus_unitary(dim=40, norm=0.5, seed=0, rotate=True):
    """Q (C (+) U) Q* with ||C|| = norm < 1 and U unitary, halves of size dim/2.

    Returns (op, stable_basis, unitary_basis): the adjoint-stable subspace is
    Q's first half of columns, the closure of M(T) the second half.
    """
    rng = np.random.default_rng(seed)
    h = dim // 2
    c = rng.standard_normal((h, h)) + 1j * rng.standard_normal((h, h))
    c *= norm / np.linalg.norm(c, 2)
    u = random_unitary(dim - h, rng)
    a = scipy.linalg.block_diag(c, u)
    q = random_unitary(dim, rng) if rotate else np.eye(dim)
    return zoo.from_matrix(q @ a @ q.conj().T), q[:, :h], q[:, h:]


def theorem7_operator(d=8, seed=0):
    """[[I/2, 0], [R, U]] with R random and U a diagonal unitary."""
    rng = np.random.default_rng(seed)
    r = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    u = np.exp(2j * np.pi * rng.random(d))
    return zoo.block_lower_2x2(zoo.scale(zoo.identity(d), 0.5), r, zoo.diag(u))


def lemma6_operator(d=8, seed=0):
    """[[J, 0], [R, U]] with J nilpotent Jordan, R dense, U diagonal unitary."""
    rng = np.random.default_rng(seed)
    r = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    u = np.exp(2j * np.pi * rng.random(d))
    return zoo.block_lower_2x2(zoo.jordan(d), r, zoo.diag(u))


def similar_to_unitary(d=6, seed=0):
    """S^-1 U S with S far from unitary: power-bounded, C.1, not unitary."""
    rng = np.random.default_rng(seed)
    s = np.eye(d) + 2.0 * np.triu(rng.standard_normal((d, d)), 1)
    u = np.diag(np.exp(2j * np.pi * rng.random(d)))
    return zoo.from_matrix(np.linalg.solve(s, u @ s))


def principal_angle(a, b):
    if a.shape[1] == 0 and b.shape[1] == 0:
        return 0.0
    if a.shape[1] != b.shape[1]:
        return np.pi / 2
    return float(np.max(scipy.linalg.subspace_angles(a, b)))


def volterra_parts(m, scheme="midpoint"):
    v = zoo.volterra_matrix(m, scheme)
    eye = np.eye(m)
    p = np.full((m, m), 1.0 / m)
    return v, eye, p


def _iterate_norms(a, f, ns, scale_sqrt=False):
    out = {}
    y = f.copy()
    for n in range(1, max(ns) + 1):
        y = a @ y
        if n in ns:
            out[n] = float(np.linalg.norm(y)) * (np.sqrt(n) if scale_sqrt else 1.0)
    return out


# --------------------------------------------------------------------------
# cases
# --------------------------------------------------------------------------


def case_example1(rep: Report, dim=None, horizon=None):
    n3, n4 = zoo.nk_sequence(3), zoo.nk_sequence(4)
    p = zoo.example1_log2_prefix(n3)
    w = zoo.example1_weights(n3).take(n3)
    for k in (1, 2, 3):
        nk = zoo.nk_sequence(k)
        prod = float(np.prod(w[:nk]))
        rep.row(f"k={k}", "weight_product", prod, index=nk, tolerance=1e-12)
        rep.check(f"prod w_1..w_N{k} = 1", abs(prod - 1) <= 1e-12 and p[nk] == 0, f"{prod!r}", tolerance=1e-12)
    s = zoo.example1(2 * n3 + 16)
    for k in (1, 2, 3):
        nk = zoo.nk_sequence(k)
        img = s.power_apply(basis(s.dim, 1), nk)
        err = float(np.linalg.norm(img - basis(s.dim, nk + 1)))
        rep.check(f"S^N{k} e1 = e_(N{k}+1)", err <= 1e-12, f"error {err:.3e}", horizon=nk, tolerance=1e-12)

    # decay recipe at eps = 0.1 for unit x supported on 16 coordinates
    eps = 0.1
    big = dim or 2 * n4
    s = zoo.example1(big)
    x = np.zeros(big, dtype=complex)
    x[:16] = random_unit_vector(16, np.random.default_rng(0))
    n = zoo.example1_recipe_index(x, eps)
    pe = zoo.example1_log2_prefix(min(big, 4 * n + 16))
    mass = np.abs(x) ** 2
    head_ok = all(pe[i + n - 1] - pe[i - 1] <= 0 for i in range(1, n + 1))
    shift_ok = all(pe[i + 2 * n - 1] - pe[i + n - 1] == -n for i in range(1, n + 1))
    tail_ok = all(pe[j + 2 * n - 1] - pe[j - 1] <= 2 for j in range(n + 1, len(pe) - 2 * n))
    tail_bound = float(mass[n:].sum()) * 16
    head_bound = float(mass[:n].sum()) * 4.0 ** (-n)
    measured = float(np.linalg.norm(s.power_apply(x, 2 * n)) ** 2)
    rep.row("x", "recipe_N", n, tolerance=eps)
    rep.row("x", "norm_sq_S^2N_x", measured, index=2 * n, horizon=big, tolerance=eps)
    rep.check("head factor w_i..w_(i+N-1) <= 1", head_ok, f"N={n}")
    rep.check("||S^N e_(i+N)|| = 2^-N", shift_ok, f"N={n}")
    rep.check("tail factor w_j..w_(j+2N-1) <= 4", tail_ok, f"N={n}")
    rep.check("(1/2^N)^2 < eps/2", 4.0 ** (-n) < eps / 2, f"{4.0 ** (-n):.3e}", tolerance=eps)
    rep.check("tail term <= eps/2", tail_bound <= eps / 2, f"{tail_bound:.3e}", tolerance=eps)
    rep.check(
        "||S^2N x||^2 <= eps",
        measured <= eps and measured <= head_bound + tail_bound + 1e-15,
        f"{measured:.3e} (bound {head_bound + tail_bound:.3e})",
        horizon=2 * n,
        tolerance=eps,
    )

    # non-stability witness
    s = zoo.example1(max(2 * n3 + 2, 4 * n3))
    pb = power_bound_estimate(s, 2 * n3)
    rep.row("S", "max_power_norm", pb.m_est, index=pb.attained_at, horizon=2 * n3, tolerance=4)
    rep.check("max_n ||S^n|| >= 4 for n <= 2 N3", pb.m_est >= 4, f"{pb.m_est:.6g} at n={pb.attained_at}", horizon=2 * n3, tolerance=4)
    i0 = 3
    lit = float(np.linalg.norm(s.power_apply(basis(s.dim, i0), n3 - i0)))
    corrected = float(np.linalg.norm(s.power_apply(basis(s.dim, i0), n3 + 1 - i0)))
    exact = 2.0 ** float(-p[i0 - 1])
    rep.row("e3", "norm_S^(N3-i0)_e3", lit, index=n3 - i0)
    rep.row("e3", "norm_S^(N3+1-i0)_e3", corrected, index=n3 + 1 - i0)
    rep.check(
        "||S^(N_k+1-i0) e_i0|| = 1/(w_1..w_(i0-1)) for i0=3, k=3",
        abs(corrected - exact) <= 1e-12,
        f"{corrected:.15g} vs {exact:.15g}; literal index N_k-i0 gives {lit:.6g}",
        horizon=n3 + 1 - i0,
        tolerance=1e-12,
    )


def case_example2(rep: Report, dim=None, horizon=None):
    d = dim or 8
    t = zoo.example2_op(d)
    a = t.to_dense()
    rep.check("T^2 = T exactly", np.array_equal(a @ a, a), f"dim={d}")
    rng = np.random.default_rng(0)
    m = horizon or 16
    worst = 0.0
    for s in range(5):
        x = t.apply(random_unit_vector(d, rng))
        ch = backward_chain(t, x, m)
        c = norm_constancy(ch, 0.0)
        worst = max(worst, c.max_deviation, float(np.abs(ch.elements - x).max()))
        rep.row(f"seed{s}", "chain_deviation", c.max_deviation, horizon=m, tolerance=0.0, mode="stepwise")
    rep.check("stepwise chains from ran T are constant", worst == 0.0, f"max deviation {worst:.3e}", horizon=m, tolerance=0.0)
    y = t.adjoint_apply(basis(d, 2))
    cl = classify(t, [basis(d, 1), basis(d, 2), y], horizon or 64)
    ny = cl.adjoint[2].trusted
    const = float(np.abs(ny - ny[0]).max())
    rep.row("T*e2", "adjoint_orbit_spread", const, horizon=cl.adjoint[2].faithful_horizon, verdict=cl.adjoint[2].verdict, tolerance=1e-12)
    rep.check("||T*^n y|| constant for y = T*e2", const <= 1e-12, f"spread {const:.3e}", tolerance=1e-12)
    rep.check("not C.0 evidence", not cl.evidence["C.0"], cl.summary(), horizon=horizon or 64)


def example3_vector(blocks, block_dim):
    x = np.zeros(blocks * block_dim, dtype=complex)
    x[::block_dim] = 1.0 / np.arange(1, blocks + 1)
    return x


def case_example3(rep: Report, dim=None, horizon=None):
    b = dim or 64
    bd = 64
    t = zoo.example3(b, bd)
    wmax = max(float(blk.weights.max()) for blk in t.blocks)
    rep.check("all weights <= 1 (contraction)", wmax <= 1.0, f"max weight {wmax!r}")
    x = example3_vector(b, bd)
    ms = (2, 4, 8, 16)
    norms = []
    for m in ms:
        ch = backward_chain(t, x, m, mode="joint")
        closed = float(np.sqrt(sum(n ** -(1 + 2 / m) for n in range(1, b + 1))))
        got = float(np.linalg.norm(ch.elements[m]))
        norms.append(got)
        rep.row("x", "joint_norm", got, index=m, tolerance=1e-9, mode="joint")
        rep.row("x", "closed_form_norm", closed, index=m, mode="joint")
        rep.check(f"joint ||x_{m}|| matches closed form", abs(got**2 - closed**2) <= 1e-9, f"{got:.15g} vs {closed:.15g}", horizon=m, tolerance=1e-9)
    rep.check("joint norms strictly increasing in m", all(a < c for a, c in zip(norms, norms[1:])), str(norms))
    ti = t_infinity_membership(t, x, horizon or 16)
    rmax = float(ti.residuals[ti.trusted].max())
    rep.check("T^infinity residuals <= 1e-9", rmax <= 1e-9 and ti.trusted.any(), f"max {rmax:.3e} over m <= {ti.trusted_prefix}", horizon=ti.trusted_prefix, tolerance=1e-9)
    v = is_in_MT(t, x, horizon)
    for m, val in enumerate(v.profile):
        rep.row("x", "min_preimage_norm", float(val), index=m, verdict=v.verdict, horizon=v.trusted_horizon, tolerance=v.bound_cap)
    rep.check("is_in_MT -> not-in-MT", v.verdict == "not-in-MT", f"{v.verdict}: {v.witness}", horizon=v.trusted_horizon, tolerance=v.bound_cap)
    samples = [example3_vector(b, bd)] + [basis(t.dim, 1 + bd * (n - 1)) for n in (1, 2, b)]
    cl = classify(t, samples, bd - 2)
    rep.check("C.1 evidence (adjoint orbits bounded below)", cl.evidence["C.1"], cl.summary(), horizon=bd - 2, tolerance=cl.adjoint[0].floor_frac)
    # limit of the weight products of one block, compared with the closed exponent
    for n in (2, 4, 16):
        w = zoo.example3_weights(n).take(10_000)
        rep.row(f"block n={n}", "weight_product_m=1e4", float(np.prod(w)), index=10_000)
        rep.row(f"block n={n}", "n^-(1/2-1/m)", float(n ** -(0.5 - 1e-4)), index=10_000)
    rep.diagnostics["example3_product_limit"] = "n^(-1/2)"


def case_example4(rep: Report, dim=None, horizon=None):
    m = dim or 512
    v, eye, p = volterra_parts(m)
    rep.check("V_M + V_M* = P_M exactly", np.array_equal(v + v.conj().T, p), f"M={m}")
    grid_ms = [g for g in (64, 128, 256, 512) if g <= m] or [m]
    vals = []
    for g in grid_ms:
        vg, ig, _ = volterra_parts(g)
        vals.append(float(np.linalg.norm(np.linalg.inv(ig + vg), 2)))
        rep.row(f"M={g}", "norm_inv_I_plus_V", vals[-1], index=g, tolerance=0.01)
    gaps = [abs(1 - x) for x in vals]
    rep.check("||(I+V_M)^-1|| = 1 within 0.01", gaps[-1] <= 0.01, f"{vals[-1]!r}", tolerance=0.01)
    rep.check("approach to 1 monotone as M doubles", all(a >= c for a, c in zip(gaps, gaps[1:])), str(gaps))
    e = np.diag(np.exp(zoo.grid(m)))
    ei = np.diag(np.exp(-zoo.grid(m)))
    inv = np.linalg.inv(eye + v)
    ap = float(np.linalg.norm(ei @ (eye - v) @ e - inv, 2))
    rep.row(f"M={m}", "allan_pedersen_residual", ap, tolerance=10 / m)
    rep.check("Allan-Pedersen residual <= 10/M", ap <= 10 / m, f"{ap:.3e}", tolerance=10 / m)
    n_hi = horizon or 200
    ns = (10, n_hi)
    grow_op = np.linalg.inv(eye + v - p)
    dec_ok, grow_ok = True, True
    for seed in range(5):
        f = random_unit_vector(m, np.random.default_rng(seed))
        d = _iterate_norms(eye - v, v @ f, ns, scale_sqrt=True)
        g = _iterate_norms(grow_op, f, ns)
        rep.row(f"random:{seed}", "sqrt_n_norm_(I-V)^n_Vf", d[10], index=10)
        rep.row(f"random:{seed}", "sqrt_n_norm_(I-V)^n_Vf", d[n_hi], index=n_hi, tolerance=10)
        rep.row(f"random:{seed}", "norm_(I+V-P)^-n_f", g[10], index=10)
        rep.row(f"random:{seed}", "norm_(I+V-P)^-n_f", g[n_hi], index=n_hi, tolerance=10)
        dec_ok &= d[10] >= 10 * d[n_hi]
        grow_ok &= g[n_hi] >= 10 * g[10]
    rep.check(f"sqrt(n)||(I-V)^n V f|| drops 10x from n=10 to {n_hi}", dec_ok, "5 seeded random f", horizon=n_hi, tolerance=10)
    rep.check(f"||(I+V-P)^-n f|| grows 10x from n=10 to {n_hi}", grow_ok, "5 seeded random f", horizon=n_hi, tolerance=10)


def case_example5(rep: Report, dim=None, horizon=None):
    m = dim or 512
    v, eye, _ = volterra_parts(m)
    inv = np.linalg.inv(eye + v)
    n_hi = horizon or 200
    ns = (10, n_hi)
    ok = {"inv": True, "inv_adj": True, "grow": True}
    for seed in range(5):
        f = random_unit_vector(m, np.random.default_rng(seed))
        a = _iterate_norms(inv, f, ns)
        b = _iterate_norms(inv.conj().T, f, ns)
        c = _iterate_norms(eye + v, f, ns)
        for name, d in (("(I+V)^-n", a), ("(I+V)^-*n", b), ("(I+V)^n", c)):
            rep.row(f"random:{seed}", f"norm_{name}_f", d[10], index=10)
            rep.row(f"random:{seed}", f"norm_{name}_f", d[n_hi], index=n_hi, tolerance=10)
        ok["inv"] &= a[10] >= 10 * a[n_hi]
        ok["inv_adj"] &= b[10] >= 10 * b[n_hi]
        ok["grow"] &= c[n_hi] >= 10 * c[10]
    rep.check(f"||(I+V)^-n f|| drops 10x from n=10 to {n_hi}", ok["inv"], "5 seeded random f", horizon=n_hi, tolerance=10)
    rep.check(f"||(I+V)^-*n f|| drops 10x from n=10 to {n_hi}", ok["inv_adj"], "5 seeded random f", horizon=n_hi, tolerance=10)
    rep.check(f"||(I+V)^n f|| grows 10x from n=10 to {n_hi}", ok["grow"], "5 seeded random f", horizon=n_hi, tolerance=10)


def case_corollary2(rep: Report, dim=None, horizon=None):
    d = dim or 40
    op, stable, unit = contraction_plus_unitary(d)
    dec = decompose_corollary(op, horizon or 128)
    a1 = principal_angle(dec.stable_basis, stable)
    a2 = principal_angle(dec.mt_closure_basis, unit)
    rep.row("stable", "principal_angle", a1, horizon=dec.gram.N, tolerance=1e-6)
    rep.row("mt_closure", "principal_angle", a2, horizon=dec.gram.N, tolerance=1e-6)
    rep.row("gram", "stabilization", dec.gram.stabilization, horizon=dec.gram.N, tolerance=0.05)
    rep.check("stable subspace recovered", a1 <= 1e-6, f"angle {a1:.3e}", horizon=dec.gram.N, tolerance=1e-6)
    rep.check("closure of M(T) recovered", a2 <= 1e-6, f"angle {a2:.3e}", horizon=dec.gram.N, tolerance=1e-6)
    rep.check("orthogonality defect <= 1e-6", not dec.defect_flagged, f"{dec.orthogonality_defect:.3e}", tolerance=1e-6)
    rep.check("range vectors are in M(T)", dec.all_in_mt, f"{sum(v.verdict == 'in-MT' for v in dec.mt_verdicts)}/{len(dec.mt_verdicts)}")


def case_theorem3(rep: Report, dim=None, horizon=None):
    d = dim or 16
    u = zoo.from_matrix(random_unitary(d, np.random.default_rng(0)))
    dec = decompose_corollary(u, horizon or 64)
    rep.check("unitary: stable subspace trivial", dec.stable_basis.shape[1] == 0, f"dim {dec.stable_basis.shape[1]}")
    rep.check("unitary: closure of M(T) = H", dec.mt_closure_basis.shape[1] == d and dec.all_in_mt, f"dim {dec.mt_closure_basis.shape[1]}")
    samples = [random_unit_vector(d, np.random.default_rng(s)) for s in range(4)]
    cl = classify(u, samples, horizon or 64)
    rep.check("unitary: C.1 evidence, no C.0 evidence", cl.evidence["C.1"] and not cl.evidence["C.0"] and not cl.evidence["C0."], cl.summary())


def case_theorem4(rep: Report, dim=None, horizon=None):
    d = dim or 8
    j = zoo.jordan(d)
    dec = decompose_corollary(j, horizon or 64)
    rep.check("nilpotent: stable subspace = H", dec.stable_basis.shape[1] == d, f"dim {dec.stable_basis.shape[1]}")
    verdicts = [is_in_MT(j, random_unit_vector(d, np.random.default_rng(s))).verdict for s in range(4)]
    verdicts.append(is_in_MT(j, basis(d, d)).verdict)
    rep.check("nilpotent: M(T) = {0}", all(v == "not-in-MT" for v in verdicts), str(verdicts))
    samples = [basis(d, i) for i in range(1, d + 1)]
    cl = classify(j, samples, horizon or 64)
    rep.check("nilpotent: C.0 evidence", cl.evidence["C.0"], cl.summary())


def corollary5_ops(m=16):
    v = zoo.volterra(m)
    i_minus_v = zoo.op_sum(zoo.identity(m), zoo.scale(v, -1.0))
    sim = zoo.similarity(i_minus_v, zoo.mult_exp(m))
    u = zoo.from_matrix(random_unitary(6, np.random.default_rng(0)))
    return {
        "2I": (zoo.scale(zoo.identity(6), 2.0), 200),
        "I-V_M": (i_minus_v, 6000),
        "E^-1(I-V_M)E": (sim, 6000),
        "unitary": (u, 200),
    }


def case_corollary5(rep: Report, dim=None, horizon=None):
    for name, (op, n_max) in corollary5_ops(dim or 16).items():
        n_max = horizon or n_max
        samples = [random_unit_vector(op.dim, np.random.default_rng(s)) for s in range(3)]
        res = corollary5_agreement(op, samples, n_max)
        rep.row(name, "adjoint_decaying", int(res["adjoint_decaying"]), horizon=n_max, tolerance=1e-6)
        rep.row(name, "inverse_growing", int(res["inverse_growing"]), horizon=n_max, tolerance=10)
        rep.check(f"{name}: adjoint decay <=> inverse growth", res["agree"], f"decay={res['adjoint_decaying']} growth={res['inverse_growing']}", horizon=n_max)


def case_lemma6(rep: Report, dim=None, horizon=None):
    d = dim or 8
    n = horizon or 128
    op = lemma6_operator(d)
    kb = kerchy_blocks(op, n, direction="adjoint")
    rep.check("adjoint split: upper-right block vanishes", kb.vanishing_norm <= 1e-8, f"{kb.vanishing_norm:.3e}", horizon=n, tolerance=1e-8)
    rep.check("adjoint split: T11 samples decaying", kb.t11_decaying, str(kb.t11_verdicts), horizon=n)
    rep.check("adjoint split: T22 samples bounded below", kb.t22_bounded_below, str(kb.t22_verdicts), horizon=n)
    kf = kerchy_blocks(op, n, direction="forward")
    rep.check("forward split: invariant-subspace block vanishes", kf.vanishing_norm <= 1e-8, f"{kf.vanishing_norm:.3e}", horizon=n, tolerance=1e-8)
    rep.check("forward split: T11 C0. / T22 C1. samples", kf.t11_decaying and kf.t22_bounded_below, f"{kf.t11_verdicts} / {kf.t22_verdicts}", horizon=n)
    rep.row("adjoint", "vanishing_block_norm", kb.vanishing_norm, horizon=n, tolerance=1e-8)
    rep.row("forward", "vanishing_block_norm", kf.vanishing_norm, horizon=n, tolerance=1e-8)


def case_theorem7(rep: Report, dim=None, horizon=None):
    d = dim or 8
    op = theorem7_operator(d)
    dec = decompose_corollary(op, 128, check_membership=False)
    m = horizon or 16
    worst = 0.0
    bounded = True
    for s in range(20):
        rng = np.random.default_rng(s)
        c = rng.standard_normal(dec.mt_closure_basis.shape[1]) + 1j * rng.standard_normal(dec.mt_closure_basis.shape[1])
        x = dec.mt_closure_basis @ c
        x /= np.linalg.norm(x)
        ch = backward_chain(op, x, m)
        bounded &= ch.bounded_verdict == "bounded"
        worst = max(worst, norm_constancy(ch).max_deviation)
        rep.row(f"seed{s}", "norm_deviation", norm_constancy(ch).max_deviation, horizon=m, tolerance=1e-8, verdict=ch.bounded_verdict, mode="stepwise")
    rep.check("form [[C.0, 0], [T21, U]]: 20 bounded chains have constant norms", worst <= 1e-8 and bounded, f"max deviation {worst:.3e}", horizon=m, tolerance=1e-8)
    half = zoo.scale(zoo.identity(d), 0.5)
    ch = backward_chain(half, random_unit_vector(d, np.random.default_rng(0)), 8)
    rep.check("I/2: chain with non-constant norms", not norm_constancy(ch).is_constant, f"profile ratio {ch.norm_profile[-1] / ch.norm_profile[0]:.3g}", horizon=8)
    t = similar_to_unitary()
    x = random_unit_vector(t.dim, np.random.default_rng(1))
    ch = backward_chain(t, x, 32)
    dev = norm_constancy(ch).max_deviation
    lacks = np.linalg.norm(t.to_dense().conj().T @ t.to_dense() - np.eye(t.dim), 2) > 1e-3
    gram = asymptote_gram(t, 64)
    rep.check(
        "S^-1 U S lacks the form and has a bounded non-constant chain",
        lacks and gram.kernel_basis.shape[1] == 0 and ch.sup_norm < 1e3 and dev > 1e-3,
        f"sup {ch.sup_norm:.3g}, deviation {dev:.3g}",
        horizon=32,
    )


CASE_FUNCS = {
    "example1": case_example1,
    "example2": case_example2,
    "example3": case_example3,
    "example4": case_example4,
    "example5": case_example5,
    "corollary2": case_corollary2,
    "theorem3": case_theorem3,
    "theorem4": case_theorem4,
    "corollary5": case_corollary5,
    "lemma6": case_lemma6,
    "theorem7": case_theorem7,
}


def verify(case: str, dim: int | None = None, horizon: int | None = None, config: dict | None = None) -> Report:
    """Run a canned case and return its report (``report.passed`` is the outcome)."""
    if case not in CASE_FUNCS:
        raise ValueError(f"unknown case {case!r}; expected one of {', '.join(CASE_FUNCS)}")
    rep = Report("verify", config or {"case": case, "dim": dim, "horizon": horizon}, case=case)
    CASE_FUNCS[case](rep, dim=dim, horizon=horizon)
    return rep


