import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymptotica import zoo
from asymptotica.asymptotics import (
    asymptote_gram,
    classify,
    decompose_corollary,
    kerchy_blocks,
    orbit,
    power_bound_estimate,
    power_norms,
    propagation_holds,
    stable_subspace,
)
from asymptotica.errors import AsymptoticaError, DimensionError
from asymptotica.linalg import basis, random_unit_vector
from asymptotica.verify import contraction_plus_unitary, random_unitary


def half_plus_unitary():
    return zoo.diag([0.5, 1j])


class TestOrbit:
    def test_scalar_contraction_decays(self):
        rec = orbit(zoo.scale(zoo.identity(4), 0.5), basis(4, 1), 60)
        np.testing.assert_allclose(rec.norms, 0.5 ** np.arange(61))
        assert rec.verdict == "decaying" and rec.stays_small

    def test_isometry_bounded_below(self, rng):
        rec = orbit(zoo.diag([1j, -1]), random_unit_vector(2, rng), 100)
        np.testing.assert_allclose(rec.norms, 1.0, atol=1e-15)
        assert rec.verdict == "bounded-below"

    def test_growth(self):
        assert orbit(zoo.scale(zoo.identity(2), 2.0), basis(2, 1), 10).verdict == "growing"

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            orbit(zoo.identity(2), np.zeros(2), 5)

    def test_verdict_only_inside_faithful_window(self):
        # the truncated forward shift kills e_1 at n = dim, but that is outside the window
        s = zoo.forward_shift(zoo.unit_weights(), 8)
        rec = orbit(s, basis(8, 1), 20)
        assert rec.faithful_horizon == 7
        assert rec.norms[8] == 0.0
        assert rec.verdict == "bounded-below"

    def test_example1_decay_recipe(self):
        s = zoo.example1(2 * 65 + 10)
        x = np.zeros(s.dim, dtype=complex)
        x[:4] = random_unit_vector(4, np.random.default_rng(1))
        rec = orbit(s, x, 2 * 65)
        assert rec.norms[2 * 65] ** 2 <= 0.1 + 1e-15

    def test_agrees_with_dense_powers(self, rng):
        op = zoo.example3(3, 10)
        x = np.zeros(30, dtype=complex)
        x[[0, 10, 20]] = 1
        rec = orbit(op, x, 20, "adjoint")
        a = op.to_dense().conj().T
        y = x.copy()
        for n in range(1, rec.faithful_horizon + 1):
            y = a @ y
            assert abs(np.linalg.norm(y) - rec.norms[n]) <= 1e-10


class TestPowerBound:
    def test_contraction_block(self):
        op = zoo.backward_shift(zoo.example3_weights(5), 40)
        assert power_bound_estimate(op, 30).m_est <= 1 + 1e-10

    def test_example2_constant(self):
        t = zoo.example2_op(8)
        norms = power_norms(t, 10)
        np.testing.assert_allclose(norms[1:], np.linalg.norm(t.to_dense(), 2), rtol=1e-12)

    def test_example1_exceeds_four(self):
        assert power_bound_estimate(zoo.example1(130), 20).m_est >= 4

    def test_power_iteration_path(self, rng):
        a = random_unitary(600, rng) * 0.9
        est = power_norms(zoo.from_matrix(a), 3, exact_max_dim=10)
        np.testing.assert_allclose(est, 0.9 ** np.arange(1, 4), rtol=1e-6)


class TestGram:
    def test_unitary(self, rng):
        g = asymptote_gram(zoo.from_matrix(random_unitary(5, rng)), 16)
        np.testing.assert_allclose(g.average, np.eye(5), atol=1e-13)
        assert g.kernel_basis.shape[1] == 0

    def test_strict_contraction(self):
        g = asymptote_gram(zoo.scale(zoo.identity(3), 0.5), 64)
        assert g.kernel_basis.shape[1] == 3
        assert np.abs(g.average).max() < 1e-18

    def test_half_plus_unitary(self):
        g = asymptote_gram(half_plus_unitary(), 64)
        assert g.kernel_basis.shape[1] == 1 and abs(abs(g.kernel_basis[0, 0]) - 1) < 1e-12
        assert abs(abs(g.range_basis[1, 0]) - 1) < 1e-12
        assert g.form(basis(2, 2), basis(2, 2)).real == pytest.approx(1.0)

    def test_hermitian_psd(self, rng):
        op, _, _ = contraction_plus_unitary(12, seed=3)
        g = asymptote_gram(op, 64)
        assert np.linalg.norm(g.average - g.average.conj().T) <= 1e-10
        assert g.eigenvalues.min() >= -1e-10
        assert not g.glim_unresolved

    def test_monotone_for_contractions(self, rng):
        op = zoo.from_matrix(0.3 * np.eye(4) + 0.5 * np.diag([1, 1, 0, 0]))
        x = random_unit_vector(4, rng)
        vals = [asymptote_gram(op, n, burn_in=0).form(x, x).real for n in (8, 16, 32, 64)]
        assert all(a >= b - 1e-10 for a, b in zip(vals, vals[1:]))

    def test_too_large(self):
        with pytest.raises(DimensionError):
            asymptote_gram(zoo.identity(10), 8, max_dim=5)

    def test_growing_powers_warn(self):
        with pytest.warns(RuntimeWarning):
            asymptote_gram(zoo.scale(zoo.identity(2), 1.2), 16)

    def test_small_horizon_rejected(self):
        with pytest.raises(ValueError):
            asymptote_gram(zoo.identity(2), 4)


class TestStableAndDecompose:
    def test_stable_subspace_cross_validated(self):
        ker = stable_subspace(half_plus_unitary(), 64)
        assert ker.shape[1] == 1

    def test_unitary(self, rng):
        d = decompose_corollary(zoo.from_matrix(random_unitary(6, rng)), 32)
        assert d.stable_basis.shape[1] == 0 and d.mt_closure_basis.shape[1] == 6 and d.all_in_mt

    def test_jordan(self):
        d = decompose_corollary(zoo.jordan(4), 32)
        assert d.stable_basis.shape[1] == 4 and d.mt_closure_basis.shape[1] == 0

    def test_bases_jointly_span(self):
        op, _, _ = contraction_plus_unitary(20, seed=5)
        d = decompose_corollary(op, 64, check_membership=False)
        stacked = np.hstack([d.stable_basis, d.mt_closure_basis])
        assert np.linalg.svd(stacked, compute_uv=False).min() > 1 - 1e-6
        assert d.orthogonality_defect <= 1e-6 and not d.defect_flagged


class TestClassify:
    def test_backward_shift_c0(self):
        s = zoo.backward_shift(zoo.unit_weights(), 64)
        cl = classify(s, [basis(64, i) for i in range(1, 9)], 32)
        assert cl.evidence["C0."]
        assert all(r.norms[i + 1] == 0 for i, r in enumerate(cl.forward))

    def test_unitary_never_reports_zero_classes(self, rng):
        u = zoo.from_matrix(random_unitary(8, rng))
        cl = classify(u, [random_unit_vector(8, rng) for _ in range(4)], 64)
        assert not cl.evidence["C0."] and not cl.evidence["C.0"]
        assert cl.evidence["C1."] and cl.evidence["C.1"]

    def test_example2_not_c_dot_0(self):
        t = zoo.example2_op(8)
        y = t.adjoint_apply(basis(8, 2))
        cl = classify(t, [y], 30)
        assert np.ptp(cl.adjoint[0].trusted) <= 1e-12 and not cl.evidence["C.0"]

    def test_mixed(self):
        cl = classify(half_plus_unitary(), [basis(2, 1), basis(2, 2)], 64)
        assert cl.mixed

    def test_empty_samples(self):
        with pytest.raises(ValueError):
            classify(zoo.identity(2), [], 5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), dim=st.integers(2, 12))
def test_stability_propagation_for_power_bounded(seed, dim):
    rng = np.random.default_rng(seed)
    op, _, _ = contraction_plus_unitary(dim, seed=seed)
    rec = orbit(op, random_unit_vector(op.dim, rng), 40)
    assert propagation_holds(rec.trusted, power_bound_estimate(op, 40).m_est)


class TestKerchy:
    def test_strict_contraction(self):
        kb = kerchy_blocks(zoo.scale(zoo.identity(3), 0.5), 64)
        assert kb.stable_basis.shape[1] == 3 and kb.t22.size == 0

    def test_unitary(self, rng):
        kb = kerchy_blocks(zoo.from_matrix(random_unitary(4, rng)), 32)
        assert kb.stable_basis.shape[1] == 0 and kb.t11.size == 0

    @pytest.mark.parametrize("direction", ["forward", "adjoint"])
    def test_jordan_plus_unitary(self, direction, rng):
        u = np.exp(2j * np.pi * rng.random(4))
        op = zoo.direct_sum([zoo.jordan(4), zoo.diag(u)])
        kb = kerchy_blocks(op, 64, direction)
        assert kb.vanishing_norm <= 1e-8
        assert np.linalg.norm(kb.t21) <= 1e-8
        np.testing.assert_allclose(np.sort(np.abs(np.linalg.eigvals(kb.t22))), 1.0, atol=1e-12)
        assert kb.t11_decaying and kb.t22_bounded_below

    def test_forward_direction_coupled(self, rng):
        # [[U, R], [0, J]]: span of the last block is invariant and forward-stable
        r = rng.standard_normal((4, 4))
        u = np.diag(np.exp(2j * np.pi * rng.random(4)))
        j = zoo.jordan(4).to_dense()
        op = zoo.from_matrix(np.block([[u, r], [np.zeros((4, 4)), j]]))
        kb = kerchy_blocks(op, 64, "forward")
        assert kb.stable_basis.shape[1] == 4 and kb.vanishing_norm <= 1e-8
        assert kb.t11_decaying and kb.t22_bounded_below

    def test_unconverged_gram_raises(self):
        # strong coupling: the kernel is accepted before the invariant block has converged
        op = zoo.from_matrix(np.array([[1.0, 10.0], [0.0, 0.5]]))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with pytest.raises(AsymptoticaError, match="Gram not converged"):
                kerchy_blocks(op, 16, "forward")
            assert kerchy_blocks(op, 64, "forward").vanishing_norm <= 1e-8
