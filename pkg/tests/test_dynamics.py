import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings

from jumplock.dynamics import (
    FullLambdaParams,
    LinearGenerator,
    PropagatorConfig,
    ReducedLambdaParams,
    TwoLevelParams,
    default_dt,
    from_coords,
    full_lambda_nojump_rhs,
    hermitian_basis,
    nojump_rhs,
    propagate,
    reduced_lambda_rhs,
    to_coords,
    two_level_rhs,
)
from jumplock.errors import ConfigurationError, DomainError
from jumplock.qstate import (
    KET_EL,
    BlochVector,
    BrightDarkBasis,
    from_bloch,
    projector,
    to_bloch,
)

from conftest import density_matrices

QUARTER = BrightDarkBasis.from_angle(math.pi / 4)


class TestTwoLevelRhs:
    def test_ground_is_equilibrium_without_drive(self):
        p = TwoLevelParams(0.3, 0.0, 0.0, 1.0)
        np.testing.assert_allclose(two_level_rhs((0, 0, -1), p, 0.0), 0.0, atol=1e-15)

    def test_static_drive_on_ground(self):
        p = TwoLevelParams(0.0, 0.06, 0.06, 1.0)
        t = math.pi / 2  # cos(omega t) = 0
        np.testing.assert_allclose(two_level_rhs((0, 0, -1), p, t), [0, 0.12, 0], atol=1e-15)

    def test_north_pole_stationary_without_static_drive(self):
        p = TwoLevelParams(0.4, 0.0, 0.3, 2.0)
        t = math.pi / 4  # cos(2 t) = 0
        np.testing.assert_allclose(two_level_rhs((0, 0, 1), p, t), 0.0, atol=1e-15)

    @given(density_matrices())
    def test_matches_matrix_form(self, rho):
        p = TwoLevelParams(0.3, 0.07, 0.05, 1.3)
        t = 0.37
        drho = nojump_rhs(p, rho, t)
        expected = [np.trace(s @ drho).real for s in
                    (np.array([[0, 1], [1, 0]]), np.array([[0, 1j], [-1j, 0]]), np.diag([-1, 1]))]
        np.testing.assert_allclose(two_level_rhs(to_bloch(rho), p, t), expected, atol=1e-12)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            TwoLevelParams(0.0, -0.1, 0.0, 1.0)
        with pytest.raises(DomainError):
            TwoLevelParams(0.0, 0.1, 0.1, 0.0)


class TestReducedLambdaRhs:
    def test_dark_state_invariant(self):
        p = ReducedLambdaParams(0.0, 0.0, 1.0, QUARTER)
        np.testing.assert_allclose(reduced_lambda_rhs(QUARTER.dark_projector(), p, 0.3), 0, atol=1e-15)

    def test_bright_state_invariant(self):
        p = ReducedLambdaParams(0.0, 0.0, 1.0, QUARTER)
        np.testing.assert_allclose(reduced_lambda_rhs(QUARTER.bright_projector(), p, 0.3), 0, atol=1e-15)

    def test_modulated_bright_is_unnormalized(self):
        p = ReducedLambdaParams(0.1, 0.2, 1.0, QUARTER)
        assert np.linalg.norm(p.modulated_bright(0.0)) ** 2 == pytest.approx(1.04)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            ReducedLambdaParams(0.0, 0.1, 1.0, QUARTER, 0.7, 0.4)
        with pytest.raises(DomainError):
            ReducedLambdaParams(0.0, 0.1, 1.0, BrightDarkBasis.from_angle(0.0))

    def test_from_rabi_rates(self):
        p = ReducedLambdaParams.from_rabi(0.1, 0.03, 20.0, 1.0, 2.0, 1.0, 3.0)
        assert (p.gamma1, p.gamma2) == pytest.approx((0.25, 0.75))
        assert p.alpha == pytest.approx(math.atan(2.0))


class TestFullLambdaRhs:
    def weak(self, **kw):
        return FullLambdaParams(0.3, 1e-13, 1e-13, 3.0, 3.0, 0.0, 1.0, **kw)

    def test_ground_subspace_only_rotates(self):
        p = self.weak()
        rho = np.zeros((3, 3), dtype=complex)
        rho[:2, :2] = [[0.5, 0.5], [0.5, 0.5]]
        h = 0.5 * 0.3 * np.diag([-1, 1, 0]) + 0.5 * 0.3 * np.diag([1, 1, 0])
        expected = -1j * (h @ rho - rho @ h)
        np.testing.assert_allclose(full_lambda_nojump_rhs(rho, p, 0.0), expected, atol=1e-11)

    def test_excited_state_stationary(self):
        rho = projector(KET_EL)
        np.testing.assert_allclose(full_lambda_nojump_rhs(rho, self.weak(), 0.0), 0, atol=1e-11)

    def test_gamma_rates(self):
        p = FullLambdaParams(0.0, 1.0, 1.0, 3.0, 3.0, 0.03, 1.0)
        assert p.gamma_rates == pytest.approx((2 / 3, 2 / 3))
        assert p.unit_scale == pytest.approx(4 / 3)
        assert p.channel_probabilities == pytest.approx([0.5, 0.5])

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            FullLambdaParams(0.0, 1.0, 1.0, 0.0, 3.0, 0.03, 1.0)
        with pytest.raises(DomainError):
            FullLambdaParams(0.0, 0.0, 1.0, 3.0, 3.0, 0.03, 1.0)


MODELS = [
    TwoLevelParams(0.3, 0.2, 0.1, 1.7),
    ReducedLambdaParams(0.2, 0.3, 2.0, BrightDarkBasis.from_angle(0.6), 0.3, 0.7),
    FullLambdaParams(0.4, 1.0, 0.7, 2.0, 3.0, 0.2, 5.0, delta_e=0.3),
]


class TestRhsProperties:
    @pytest.mark.parametrize("model", MODELS, ids=lambda m: m.tag)
    @settings(max_examples=1000)
    @given(seed=density_matrices(2), seed3=density_matrices(3))
    def test_trace_and_hermiticity(self, model, seed, seed3):
        rho = seed if model.dim == 2 else seed3
        d = nojump_rhs(model, rho, 0.77)
        assert abs(np.trace(d)) < 1e-12
        np.testing.assert_allclose(d, d.conj().T, atol=1e-12)


class TestPropagate:
    def test_relaxes_to_ground(self):
        p = TwoLevelParams(0.0, 0.0, 0.0, 1.0)
        out = propagate(p, BlochVector(0.3, 0.4, -0.5), 0.0, 60.0, PropagatorConfig(1e-2))
        np.testing.assert_allclose(out, (0, 0, -1), atol=1e-6)

    @pytest.mark.parametrize("model", MODELS, ids=lambda m: m.tag)
    def test_zero_span_is_identity(self, model, rng):
        from conftest import random_density

        rho = random_density(rng, model.dim)
        out = propagate(model, rho, 1.0, 1.0, PropagatorConfig.for_model(model))
        np.testing.assert_allclose(out, rho, atol=1e-15)

    @pytest.mark.parametrize("model", MODELS, ids=lambda m: m.tag)
    def test_deterministic_and_valid(self, model, rng):
        from conftest import random_density

        rho = random_density(rng, model.dim)
        cfg = PropagatorConfig.for_model(model)
        a = propagate(model, rho, 0.0, 0.5, cfg)
        b = propagate(model, rho, 0.0, 0.5, cfg)
        np.testing.assert_array_equal(a, b)
        assert np.trace(a).real == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(a, a.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(a).min() > -1e-9

    def test_bloch_and_matrix_paths_agree(self, two_level):
        cfg = PropagatorConfig.for_model(two_level)
        start = BlochVector(0.1, -0.2, 0.3)
        a = propagate(two_level, start, 0.0, 2.0, cfg)
        b = propagate(two_level, from_bloch(start), 0.0, 2.0, cfg)
        np.testing.assert_allclose(a, to_bloch(b), atol=1e-12)

    @pytest.mark.parametrize("start", [(0.5, 0.5, 0.5), (0.6, 0.0, 0.8), (-0.3, 0.2, -0.1)])
    def test_unperturbed_flow_never_inflates_purity(self, start):
        p = TwoLevelParams(0.7, 0.0, 0.0, 1.0)
        cfg = PropagatorConfig(1e-2)
        state = BlochVector(*start)
        pure = state.norm() == pytest.approx(1.0)
        zs, norms = [state.z], [state.norm()]
        for k in range(400):
            state = propagate(p, state, 0.05 * k, 0.05 * (k + 1), cfg)
            zs.append(state.z)
            norms.append(state.norm())
        assert max(norms) <= 1 + 1e-9
        if pure:
            np.testing.assert_allclose(norms, 1.0, atol=1e-9)
        assert np.all(np.diff(zs) <= 1e-12)
        np.testing.assert_allclose(state, (0, 0, -1), atol=1e-3)

    def test_step_constraint(self, full):
        with pytest.raises(ConfigurationError):
            PropagatorConfig.for_model(full, dt=0.1)
        with pytest.raises(ConfigurationError):
            PropagatorConfig(0.0)
        with pytest.raises(ConfigurationError):
            propagate(full, np.eye(3) / 3, 1.0, 0.0, PropagatorConfig(1e-3))

    def test_default_dt_resolves_modulation(self, reduced):
        assert default_dt(reduced) == pytest.approx(min(1e-3, 2 * math.pi / 20 / 200))


@dataclass(frozen=True)
class _Scaled:
    """All rates of a plant multiplied by ``s`` (time divided by ``s``)."""

    base: TwoLevelParams
    s: float
    dim = 2

    @property
    def omega(self):
        return self.base.omega * self.s

    @property
    def max_jump_rate(self):
        return self.s

    def operator_terms(self):
        return type(self.base.operator_terms())(*(self.s * m for m in self.base.operator_terms()))


class TestScaling:
    def test_time_rescaling(self, two_level):
        s = 3.0
        rho0 = from_bloch((0.2, 0.1, -0.6))
        a = propagate(two_level, rho0, 0.0, 3.0, PropagatorConfig(1e-3))
        b = propagate(_Scaled(two_level, s), rho0, 0.0, 3.0 / s, PropagatorConfig(1e-3 / s))
        np.testing.assert_allclose(a, b, atol=1e-10)

    def test_reduced_matches_full_in_adiabatic_limit(self):
        gam = 30.0
        full = FullLambdaParams(0.05, 1.0, 1.0, gam, gam, 0.0, 1.0)
        scale = full.unit_scale
        red = ReducedLambdaParams.from_rabi(0.05 / scale, 0.0, 1.0, 1.0, 1.0, gam, gam)
        tau = 1.5
        rho_full = propagate(full, projector(np.array([1, 0, 0])), 0.0, tau / scale, PropagatorConfig(1e-3))
        rho_red = propagate(red, np.diag([1, 0]).astype(complex), 0.0, tau, PropagatorConfig(1e-3))
        ground = rho_full[:2, :2] / np.trace(rho_full[:2, :2]).real
        np.testing.assert_allclose(np.diag(ground).real, np.diag(rho_red).real, rtol=0.05)


class TestLinearGenerator:
    @pytest.mark.parametrize("model", MODELS, ids=lambda m: m.tag)
    def test_matches_unnormalized_flow(self, model, rng):
        from conftest import random_density

        gen = LinearGenerator.for_model(model)
        rho = random_density(rng, model.dim)
        t = 0.4
        c = math.cos(model.omega * t)
        a = gen.r0 + c * gen.r1 + c * c * gen.r2
        x = to_coords(rho, gen.basis)
        drho = from_coords(a @ x, gen.basis)
        terms = model.operator_terms()
        h = terms.h0 + c * terms.h1
        k = terms.k0 + c * terms.k1 + c * c * terms.k2
        np.testing.assert_allclose(drho, -1j * (h @ rho - rho @ h) - 0.5 * (k @ rho + rho @ k), atol=1e-12)
        assert x[0] * gen.trace_weight == pytest.approx(1.0)

    @pytest.mark.parametrize("d", [2, 3])
    def test_basis_orthonormal(self, d):
        b = hermitian_basis(d)
        gram = np.einsum("iab,jba->ij", b, b)
        np.testing.assert_allclose(gram, np.eye(d * d), atol=1e-15)
