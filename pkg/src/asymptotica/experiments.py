"""Dispatch of validated configurations to the analysis modules."""

import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics as asy
from . import backward as bwd
from .config import ExperimentConfig, build_operator, build_vector
from .report import Report
from .verify import verify

DEFAULT_VECTORS = ("e1",)


def max_threads() -> int:
    """Worker cap from ``ASYMPTOTICA_THREADS`` (default 1, i.e. sequential)."""
    raw = os.environ.get("ASYMPTOTICA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pmap(fn, items):
    # order-preserving, so output does not depend on the thread count
    items = list(items)
    workers = min(max_threads(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _vectors(cfg: ExperimentConfig, dim: int):
    specs = cfg.vectors or list(DEFAULT_VECTORS)
    return [build_vector(s, dim, f"$.vectors[{i}]") for i, s in enumerate(specs)]


def _tols(cfg):
    return dict(
        decay_tol=cfg.get("decay_tol", asy.DECAY_TOL),
        floor_frac=cfg.get("floor_frac", asy.FLOOR_FRAC),
        growth_factor=cfg.get("growth_factor", asy.GROWTH_FACTOR),
    )


def _orbit_rows(rep, vid, rec):
    for n, v in enumerate(rec.norms):
        rep.row(vid, "norm", float(v), index=n, horizon=rec.faithful_horizon, mode=rec.direction)
    rep.row(vid, "liminf_proxy", rec.liminf_proxy, verdict=rec.verdict, horizon=rec.faithful_horizon, tolerance=rec.decay_tol, mode=rec.direction)


def _run_orbit(rep, cfg, op):
    n_max = cfg.get("n_max", asy.DEFAULT_HORIZON)
    direction = cfg.get("direction", "forward")
    vecs = _vectors(cfg, op.dim)
    recs = _pmap(lambda iv: asy.orbit(op, iv[1], n_max, direction, **_tols(cfg)), vecs)
    for (vid, _), rec in zip(vecs, recs):
        _orbit_rows(rep, vid, rec)


def _run_classify(rep, cfg, op):
    n_max = cfg.get("n_max", asy.DEFAULT_HORIZON)
    vecs = _vectors(cfg, op.dim)
    cl = asy.classify(op, [v for _, v in vecs], n_max, **_tols(cfg))
    for (vid, _), f, a in zip(vecs, cl.forward, cl.adjoint):
        for rec in (f, a):
            rep.row(vid, "liminf_proxy", rec.liminf_proxy, verdict=rec.verdict, horizon=rec.faithful_horizon, tolerance=rec.decay_tol, mode=rec.direction)
    for k, v in cl.evidence.items():
        rep.row("samples", f"evidence_{k}", int(v), verdict="supported" if v else "unsupported", horizon=n_max, tolerance=cfg.get("decay_tol", asy.DECAY_TOL))
    rep.row("samples", "mixed", int(cl.mixed), horizon=n_max)
    rep.row("op", "power_bound_estimate", cl.m_est, horizon=n_max)
    rep.row("op", "propagation_ok", int(cl.propagation_ok), horizon=n_max)


def _gram_rows(rep, g):
    for i, w in enumerate(g.eigenvalues):
        rep.row("gram", "eigenvalue", float(w), index=i, horizon=g.N, tolerance=g.tol, mode=g.direction)
    rep.row("gram", "stabilization", g.stabilization, horizon=g.N, tolerance=asy.STABILIZATION_LIMIT, verdict="unresolved" if g.glim_unresolved else "stable", mode=g.direction)
    rep.row("gram", "kernel_dim", g.kernel_basis.shape[1], horizon=g.N, tolerance=g.tol, mode=g.direction)
    rep.row("gram", "range_dim", g.range_basis.shape[1], horizon=g.N, tolerance=g.tol, mode=g.direction)
    rep.diagnostics["stabilization"] = g.stabilization


def _run_gram(rep, cfg, op):
    g = asy.asymptote_gram(op, cfg.get("N", asy.DEFAULT_HORIZON), cfg.get("direction", "adjoint"))
    _gram_rows(rep, g)


def _run_decompose(rep, cfg, op):
    d = asy.decompose_corollary(op, cfg.get("N", asy.DEFAULT_HORIZON), cfg.get("horizon"))
    _gram_rows(rep, d.gram)
    rep.row("split", "stable_dim", d.stable_basis.shape[1], horizon=d.gram.N)
    rep.row("split", "mt_closure_dim", d.mt_closure_basis.shape[1], horizon=d.gram.N)
    rep.row("split", "orthogonality_defect", d.orthogonality_defect, verdict="flagged" if d.defect_flagged else "ok", horizon=d.gram.N, tolerance=1e-6)
    for i, v in enumerate(d.mt_verdicts):
        rep.row(f"range{i}", "mt_sup_norm", v.sup_norm, verdict=v.verdict, horizon=v.trusted_horizon, tolerance=v.bound_cap)


def _run_kerchy(rep, cfg, op):
    n = cfg.get("N", asy.DEFAULT_HORIZON)
    kb = asy.kerchy_blocks(op, n, cfg.get("direction", "forward"), n_max=cfg.get("n_max"), seed=cfg.get("seed", 0))
    rep.row("blocks", "stable_dim", kb.stable_basis.shape[1], horizon=n, mode=kb.direction)
    rep.row("blocks", "vanishing_norm", kb.vanishing_norm, horizon=n, tolerance=1e-8, mode=kb.direction)
    rep.row("blocks", "t21_norm", float(np.linalg.norm(kb.t21, 2)) if kb.t21.size else 0.0, horizon=n, mode=kb.direction)
    for i, v in enumerate(kb.t11_verdicts):
        rep.row(f"t11_sample{i}", "orbit_verdict", "", verdict=v, horizon=cfg.get("n_max") or n, mode=kb.direction)
    for i, v in enumerate(kb.t22_verdicts):
        rep.row(f"t22_sample{i}", "orbit_verdict", "", verdict=v, horizon=cfg.get("n_max") or n, mode=kb.direction)


def _run_backward(rep, cfg, op):
    m = cfg.get("m", bwd.default_horizon(op))
    modes = ("stepwise", "joint") if cfg.get("mode", "both") == "both" else (cfg.get("mode"),)
    vecs = _vectors(cfg, op.dim)
    jobs = [(vid, x, mode) for vid, x in vecs for mode in modes]

    def one(job):
        _, x, mode = job
        return bwd.backward_chain(op, x, m, mode=mode, lookahead=cfg.get("lookahead", 1))

    for (vid, _, mode), ch in zip(jobs, _pmap(one, jobs)):
        for k in range(ch.m + 1):
            if k:
                rep.row(vid, "residual", float(ch.residuals[k - 1]), index=k, horizon=ch.trusted_prefix, tolerance=ch.chain_tol, mode=mode)
            rep.row(vid, "norm", float(ch.norm_profile[k]), index=k, horizon=ch.trusted_prefix, mode=mode)
        rep.row(vid, "sup_norm", ch.sup_norm, verdict=ch.bounded_verdict, horizon=ch.trusted_prefix, tolerance=bwd.GROWING_SLOPE, mode=mode)
        rep.row(vid, "norm_deviation", bwd.norm_constancy(ch).max_deviation, horizon=ch.trusted_prefix, tolerance=1e-8, mode=mode)


def _run_mt(rep, cfg, op):
    vecs = _vectors(cfg, op.dim)
    res = _pmap(lambda iv: bwd.is_in_MT(op, iv[1], cfg.get("horizon"), cfg.get("bound_cap"), seed=cfg.get("seed", 0)), vecs)
    for (vid, _), v in zip(vecs, res):
        for k, val in enumerate(v.profile):
            rep.row(vid, "min_preimage_norm", float(val), index=k, horizon=v.trusted_horizon, tolerance=v.bound_cap, mode="joint")
        rep.row(vid, "growth_rate", v.growth_rate, verdict=v.verdict, horizon=v.trusted_horizon, tolerance=bwd.GROWING_SLOPE)
        rep.row(vid, "sup_norm", v.sup_norm, verdict=v.verdict, horizon=v.trusted_horizon, tolerance=v.bound_cap)


def _run_inverse(rep, cfg, op):
    n_max = cfg.get("n_max", asy.DEFAULT_HORIZON)
    gf = cfg.get("growth_factor", asy.GROWTH_FACTOR)
    vecs = _vectors(cfg, op.dim)
    res = _pmap(lambda iv: bwd.inverse_orbit_growth(op, iv[1], n_max, gf), vecs)
    for (vid, _), r in zip(vecs, res):
        for n, v in enumerate(r.norms):
            rep.row(vid, "inverse_norm", float(v), index=n, horizon=n_max, mode="inverse")
        rep.row(vid, "inverse_verdict", "", verdict=r.verdict, horizon=n_max, tolerance=gf, mode="inverse")
        rep.row(vid, "adjoint_liminf_proxy", r.adjoint.liminf_proxy, verdict=r.adjoint.verdict, horizon=r.adjoint.faithful_horizon, tolerance=r.adjoint.decay_tol, mode="adjoint")


_DISPATCH = {
    "orbit": _run_orbit,
    "classify": _run_classify,
    "gram": _run_gram,
    "decompose": _run_decompose,
    "kerchy": _run_kerchy,
    "backward": _run_backward,
    "mt-membership": _run_mt,
    "inverse-growth": _run_inverse,
}

_VERIFY_DIM_FROM_OP = ("example2", "example4", "example5", "corollary2", "theorem3", "theorem4")


def _verify_dim(cfg, op):
    for key in ("dim", "M", "blocks"):
        if key in cfg.params:
            return cfg.params[key]
    if op is not None and cfg.get("case") in _VERIFY_DIM_FROM_OP:
        return op.dim
    return None


def run(cfg: ExperimentConfig) -> Report:
    """Execute one experiment; ``report.passed`` is meaningful for ``verify``."""
    t0 = time.perf_counter()
    op = build_operator(cfg.operator, cfg.params) if cfg.operator is not None else None
    if cfg.experiment == "verify":
        rep = verify(cfg.get("case"), _verify_dim(cfg, op), cfg.get("horizon"), config=cfg.raw)
    else:
        rep = Report(cfg.experiment, cfg.raw)
        rep.diagnostics["operator"] = op.description or op.kind
        rep.diagnostics["dim"] = op.dim
        _DISPATCH[cfg.experiment](rep, cfg, op)
    rep.wall_time = time.perf_counter() - t0
    return rep
