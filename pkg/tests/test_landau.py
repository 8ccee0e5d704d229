"""Tests for the Slezkin-Landau module: closed forms, kappa, pairing, norms."""

import numpy as np
import pytest

from snslab.errors import DomainError, OriginEvaluation, StencilTooCloseToOrigin
from snslab.landau import (
    LandauSolution,
    SmoothBump,
    derivative_envelope,
    eval_pressure,
    eval_velocity,
    kappa,
    pm2_norm_sweep,
    spectral_velocity,
    stationary_residual,
    weak_pairing,
)
from snslab.norms import pm_norm
from snslab.spectral import FourierLattice, divergence_defect

# 52-digit evaluation of the closed form at c = 2 (mpmath, dps = 60):
KAPPA_2 = 34.76684031878573563416881325607383711357686013384939
# c * kappa(c) at c = 1e6, same oracle (approaches 16 pi = 50.26548245743669...):
C_KAPPA_1E6 = 50.26548245749365936218744889


class TestKappa:
    def test_matches_50_digit_oracle_at_2(self):
        assert abs(kappa(2.0) - KAPPA_2) / KAPPA_2 < 1e-14

    def test_oddness(self):
        for c in (1.5, 2.0, 7.0, 3.0e3):
            assert abs(kappa(-c) + kappa(c)) <= 1e-13 * abs(kappa(c))

    def test_strictly_decreasing(self):
        cs = np.geomspace(1.0 + 1e-3, 1e5, 200)
        vals = np.array([kappa(c) for c in cs])
        assert np.all(np.diff(vals) < 0)

    def test_blowup_near_one(self):
        assert kappa(1.0 + 1e-3) > 1e3

    def test_vanishes_at_infinity(self):
        assert abs(kappa(1e4)) < 1e-2

    def test_large_c_limit_16pi(self):
        c = 1e6
        assert abs(c * kappa(c) - C_KAPPA_1E6) < 1e-4
        assert abs(c * kappa(c) - 16 * np.pi) < 1e-6

    def test_series_matches_closed_form_at_switch(self):
        """Both branches agree where they hand over (|c| near 1e3)."""
        import math

        c = 1.5e3  # series branch in the package
        closed = (8.0 * math.pi * c / (3.0 * (c * c - 1.0))) * (
            2.0 + 6.0 * c * c - 3.0 * c * (c * c - 1.0) * math.log((c + 1.0) / (c - 1.0))
        )
        # tolerance set by the f64 cancellation of the closed form itself
        assert abs(kappa(c) - closed) / abs(closed) < 1e-6

    def test_domain_error(self):
        for c in (1.0, 0.5, -1.0, 0.0):
            with pytest.raises(DomainError):
                kappa(c)
        with pytest.raises(DomainError):
            LandauSolution(0.9)


class TestClosedForms:
    def test_velocity_at_axis_point(self):
        s = LandauSolution(2.0)
        V = eval_velocity(s, (1.0, 0.0, 0.0))
        assert np.allclose(V, (4.0, 0.0, 0.0), atol=1e-14)

    def test_pressure_values(self):
        s = LandauSolution(2.0)
        assert abs(eval_pressure(s, (1.0, 0.0, 0.0)) - 4.0) < 1e-14
        assert abs(eval_pressure(s, (-1.0, 0.0, 0.0)) + 4.0 / 3.0) < 1e-14

    def test_velocity_homogeneity(self):
        s = LandauSolution(3.0)
        rng = np.random.default_rng(0)
        x = rng.standard_normal((20, 3))
        base = eval_velocity(s, x)
        for lam in (0.5, 2.0, 10.0):
            scaled = eval_velocity(s, lam * x)
            assert np.abs(scaled - base / lam).max() < 1e-13 * np.abs(base / lam).max()

    def test_pressure_homogeneity(self):
        s = LandauSolution(3.0)
        x = np.array([(0.3, -1.0, 0.7), (2.0, 0.1, 0.0)])
        base = eval_pressure(s, x)
        for lam in (0.5, 2.0, 10.0):
            assert np.abs(eval_pressure(s, lam * x) - base / lam**2).max() < 1e-13 * np.abs(base).max()

    def test_axisymmetry(self):
        """Rotation about the x1 axis maps V equivariantly."""
        s = LandauSolution(2.5)
        x = np.array([0.4, 0.3, -0.8])
        theta = 0.77
        R = np.array(
            [
                [1.0, 0.0, 0.0],
                [0.0, np.cos(theta), -np.sin(theta)],
                [0.0, np.sin(theta), np.cos(theta)],
            ]
        )
        lhs = eval_velocity(s, R @ x)
        rhs = R @ eval_velocity(s, x)
        assert np.abs(lhs - rhs).max() < 1e-13 * np.abs(rhs).max()

    def test_origin_rejected(self):
        s = LandauSolution(2.0)
        with pytest.raises(OriginEvaluation):
            eval_velocity(s, (0.0, 0.0, 0.0))
        with pytest.raises(OriginEvaluation):
            eval_pressure(s, np.zeros((2, 3)))


class TestStationaryResidual:
    def test_pointwise_residuals_small(self):
        s = LandauSolution(3.0)
        x = np.array([1.0, 0.3, -0.2])
        res = stationary_residual(s, x, 1e-3)
        scale = res.gradient_pressure_scale
        assert np.abs(res.momentum).max() <= 1e-5 * scale
        assert abs(res.divergence) <= 1e-6 * scale

    def test_richardson_order_two(self):
        s = LandauSolution(3.0)
        x = np.array([1.0, 0.3, -0.2])
        h0 = 2e-2
        r1 = stationary_residual(s, x, h0)
        r2 = stationary_residual(s, x, h0 / 2.0)
        n1 = max(np.abs(r1.momentum).max(), abs(r1.divergence))
        n2 = max(np.abs(r2.momentum).max(), abs(r2.divergence))
        order = np.log2(n1 / n2)
        assert 1.8 <= order <= 2.2

    def test_stencil_guard(self):
        s = LandauSolution(2.0)
        with pytest.raises(StencilTooCloseToOrigin):
            stationary_residual(s, (0.05, 0.0, 0.0), 1e-2)


class TestWeakPairing:
    def test_k1_recovers_kappa(self):
        s = LandauSolution(3.0)
        bump = SmoothBump.make(radii=(1.0, 1.0, 1.0))
        res = weak_pairing(s, bump, 1)
        target = kappa(3.0)  # phi(0) = 1
        assert abs(res.value - target) / abs(target) < 0.02

    def test_k2_k3_vanish(self):
        s = LandauSolution(3.0)
        bump = SmoothBump.make(radii=(1.0, 1.0, 1.0))
        scale = abs(kappa(3.0))
        for k in (2, 3):
            res = weak_pairing(s, bump, k)
            assert abs(res.value) <= 0.02 * scale

    def test_bump_missing_origin_gives_zero(self):
        s = LandauSolution(3.0)
        bump = SmoothBump.make(center=(1.5, 0.0, 0.0), radii=(1.0, 1.0, 1.0))
        res = weak_pairing(s, bump, 1)
        assert abs(res.value) <= 0.01 * abs(kappa(3.0))

    def test_second_bump_family(self):
        """Anisotropic bump: value scales with phi(0) = 1 as well."""
        s = LandauSolution(5.0)
        bump = SmoothBump.make(radii=(0.8, 1.2, 1.0))
        res = weak_pairing(s, bump, 1)
        assert abs(res.value - kappa(5.0)) / abs(kappa(5.0)) < 0.02


class TestSpectralVelocity:
    def test_divergence_free(self):
        lat = FourierLattice(48, 32.0)
        v = spectral_velocity(lat, 8.0)
        assert divergence_defect(v) < 1e-13

    def test_hermitian(self):
        lat = FourierLattice(48, 32.0)
        v = spectral_velocity(lat, 8.0)
        assert v.hermitian_defect() < 1e-12

    def test_refinement_stability(self):
        norms = {}
        for N in (64, 128):
            lat = FourierLattice(N, 32.0)
            norms[N] = pm_norm(spectral_velocity(lat, 16.0), 2.0).value
        assert abs(norms[128] - norms[64]) / norms[128] < 0.05

    def test_pm2_sweep_slope(self):
        """1/|c| law of ||V^c||_PM2 on a reduced lattice (fast variant)."""
        out = pm2_norm_sweep((4.0, 8.0, 16.0, 32.0, 64.0), points_per_axis=64,
                             box_length=64.0)
        assert abs(out["slope"] + 1.0) < 0.1
        vals = [out["norms"][c] for c in sorted(out["norms"])]
        assert all(a > b for a, b in zip(vals, vals[1:]))  # monotone decrease


class TestDerivativeEnvelope:
    def test_order_zero_envelope_stable(self):
        pts = [r * np.array([0.3, 0.8, -0.52]) / np.linalg.norm([0.3, 0.8, -0.52])
               for r in np.geomspace(0.01, 100.0, 12)]
        envs = [derivative_envelope(LandauSolution(c), (0, 0, 0), pts)
                for c in (4.0, 16.0, 64.0)]
        assert max(envs) / min(envs) < 2.0

    def test_gradient_envelope_scaling(self):
        """|alpha| = 1 envelope picks up the extra 1/|x| factor."""
        s = LandauSolution(4.0)
        direction = np.array([0.3, 0.8, -0.52])
        direction /= np.linalg.norm(direction)
        radii = np.geomspace(0.1, 10.0, 8)
        vals0 = []
        vals1 = []
        for r in radii:
            pts = [r * direction]
            vals0.append(derivative_envelope(s, (0, 0, 0), pts))
            vals1.append(derivative_envelope(s, (1, 0, 0), pts))
        # both envelopes are homogeneity-invariant along the ray, so their
        # ratio has log-log slope 0 (the extra 1/|x| is already divided out)
        slope = np.polyfit(np.log(radii), np.log(np.array(vals1) / np.array(vals0)), 1)[0]
        assert abs(slope) < 0.05

    def test_homogeneity_invariance(self):
        s = LandauSolution(8.0)
        pts = np.array([[0.5, 0.2, -0.1]])
        base = derivative_envelope(s, (1, 1, 0), pts)
        scaled = derivative_envelope(s, (1, 1, 0), 7.0 * pts)
        assert abs(base - scaled) / base < 1e-6

    def test_mixed_order_guard(self):
        with pytest.raises(ValueError):
            derivative_envelope(LandauSolution(4.0), (2, 1, 0), [np.ones(3)])
