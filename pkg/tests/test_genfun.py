import math

import numpy as np
import pytest

from djvlab.genfun import (
    BoxError,
    DegeneracyError,
    GenFunError,
    QuadAtInfinityFn,
    critical_points,
    djv_certificate,
    from_function,
    front_from_genfun,
    spectral_invariant,
    stabilized,
    sublevel_persistence,
)

INF = math.inf


def bump(s):
    """C^2 bump supported in |s| < 1 with bump(0) = 1."""
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1, (1 - np.minimum(s * s, 1.0)) ** 3, 0.0)


def bump_prime(s):
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1, -6 * s * (1 - np.minimum(s * s, 1.0)) ** 2,
                    0.0)


def cos_times_bump(c=1.0, **kwargs):
    """S(q, xi) = c cos(q) B(xi / 3.8) - xi^2, two critical points."""
    sigma = lambda q, xi: c * np.cos(q) * bump(xi / 3.8)
    grads = [lambda q, xi: -c * np.sin(q) * bump(xi / 3.8),
             lambda q, xi: c * np.cos(q) * bump_prime(xi / 3.8) / 3.8]
    kwargs.setdefault("n_base", (128,))
    kwargs.setdefault("n_fiber", (97,))
    return QuadAtInfinityFn(sigma, fiber_signs=(-1,), sigma_grad=grads,
                            **kwargs)


class TestConstruction:
    def test_support_violation_rejected(self):
        with pytest.raises(BoxError):
            QuadAtInfinityFn(lambda q, xi: np.cos(q) + 0.0 * xi,
                             fiber_signs=(-1,))

    def test_support_radius_must_fit_in_box(self):
        with pytest.raises(BoxError):
            QuadAtInfinityFn(lambda q, xi: 0.0 * q * xi, fiber_signs=(1,),
                             box_radius=2.0, support_radius=2.5)

    def test_index_counts_negative_signs(self):
        S = cos_times_bump()
        assert S.index == 1
        assert from_function(np.cos).index == 0

    def test_fd_gradient_matches_analytic(self):
        S = cos_times_bump()
        S_fd = QuadAtInfinityFn(S.sigma, n_base=(128,), fiber_signs=(-1,),
                                n_fiber=(97,))
        q = np.array([0.3, 2.0, 5.1])
        xi = np.array([0.0, 1.2, -2.5])
        for a, b in zip(S.gradient(q, xi), S_fd.gradient(q, xi)):
            assert np.allclose(a, b, atol=1e-7)


class TestCriticalPoints:
    def test_circle_function(self):
        f = lambda q: np.cos(q) + 0.4 * np.sin(2 * q)
        fp = lambda q: -np.sin(q) + 0.8 * np.cos(2 * q)
        S = from_function(f, fp, n_q=512)
        pts = critical_points(S)
        assert len(pts) == 2
        assert all(c.nondegenerate for c in pts)
        assert sorted(c.morse_index for c in pts) == [0, 1]
        qs = np.linspace(0, 2 * np.pi, 200001)
        assert pts[0].value == pytest.approx(f(qs).min(), abs=1e-8)
        assert pts[-1].value == pytest.approx(f(qs).max(), abs=1e-8)

    def test_fibered_function(self):
        S = cos_times_bump(c=1.0)
        pts = critical_points(S)
        assert len(pts) == 2
        lo, hi = pts
        assert lo.value == pytest.approx(-1.0, abs=1e-8)
        assert hi.value == pytest.approx(1.0, abs=1e-8)
        assert lo.morse_index == 1
        assert hi.morse_index == 2
        assert abs(lo.location[1]) < 1e-8

    def test_critical_values_are_bar_endpoints(self):
        S = cos_times_bump(c=0.7)
        bc = sublevel_persistence(S)
        births = sorted(b.birth for b in bc.bars)
        vals = sorted(c.value for c in critical_points(S))
        assert births == pytest.approx(vals, abs=bc.noise_threshold)


class TestPersistence:
    def test_cos_circle(self):
        bc = sublevel_persistence(from_function(np.cos))
        assert [(b.degree, b.birth, b.death) for b in bc.bars] == [
            (0, -1.0, INF), (1, 1.0, INF)]

    def test_index_shift_under_negative_fiber(self):
        bc = sublevel_persistence(cos_times_bump())
        degs = sorted(b.degree for b in bc.infinite_bars())
        assert degs == [1, 2]
        for b in bc.infinite_bars():
            want = -1.0 if b.degree == 1 else 1.0
            assert b.birth == pytest.approx(want, abs=bc.noise_threshold)

    def test_stabilization_invariance(self):
        S = from_function(np.cos, n_q=128)
        up = sublevel_persistence(stabilized(S, +1))
        down = sublevel_persistence(stabilized(S, -1))
        assert sorted(b.degree for b in up.infinite_bars()) == [0, 1]
        assert sorted(b.degree for b in down.infinite_bars()) == [1, 2]
        for bc in (up, down):
            births = sorted(b.birth for b in bc.infinite_bars())
            assert births == pytest.approx([-1.0, 1.0],
                                           abs=bc.noise_threshold)


class TestSpectral:
    def test_min_and_max(self):
        S = from_function(np.cos)
        bc = sublevel_persistence(S)
        assert spectral_invariant(S, "[pt]", bc).value == -1.0
        assert spectral_invariant(S, "[L]", bc).value == 1.0

    def test_shifted_degrees_with_fiber(self):
        S = cos_times_bump(c=0.5)
        bc = sublevel_persistence(S)
        assert spectral_invariant(S, "[pt]", bc).value == pytest.approx(
            -0.5, abs=bc.noise_threshold)
        assert spectral_invariant(S, "[L]", bc).value == pytest.approx(
            0.5, abs=bc.noise_threshold)

    def test_unknown_label(self):
        with pytest.raises(GenFunError):
            spectral_invariant(from_function(np.cos), "[c0]")

    def test_reeb_shift_adds_constant(self):
        f = lambda q: np.cos(q)
        g = lambda q: np.cos(q) + 0.25
        a = spectral_invariant(from_function(f), "[pt]").value
        b = spectral_invariant(from_function(g), "[pt]").value
        assert b - a == pytest.approx(0.25, abs=1e-12)


class TestFront:
    def test_fiberless_front_is_jet_graph(self):
        f = lambda q: 0.3 * np.sin(q)
        fp = lambda q: 0.3 * np.cos(q)
        c = front_from_genfun(from_function(f, fp), n_out=512)
        assert np.allclose(c.u, f(c.q))
        assert np.allclose(c.p, fp(c.q))

    def test_single_branch_front_matches_base(self):
        # the fiber critical locus of cos_times_bump is exactly xi = 0
        S = cos_times_bump(c=1.0, n_base=(256,), n_fiber=(129,))
        c = front_from_genfun(S, n_out=512)
        assert c.lift_degree == 1
        assert np.allclose(c.u, np.cos(c.q), atol=1e-6)
        assert np.allclose(c.p, -np.sin(c.q), atol=1e-6)

    def test_disconnected_locus_rejected(self):
        # a deep dimple spawns an extra closed component of the locus
        sigma = lambda q, xi: -2.5 * bump((q - np.pi) / 1.2) * bump(xi - 1.5)

        def g_q(q, xi):
            return -2.5 / 1.2 * bump_prime((q - np.pi) / 1.2) * bump(xi - 1.5)

        def g_xi(q, xi):
            return -2.5 * bump((q - np.pi) / 1.2) * bump_prime(xi - 1.5)

        S = QuadAtInfinityFn(sigma, n_base=(256,), fiber_signs=(-1,),
                             n_fiber=(257,), sigma_grad=[g_q, g_xi])
        with pytest.raises(DegeneracyError):
            front_from_genfun(S)

    def test_base_must_be_a_circle(self):
        S = QuadAtInfinityFn(lambda q, x: 0.1 * np.cos(q) * np.cos(x),
                             n_base=(32, 32))
        with pytest.raises(GenFunError):
            front_from_genfun(S)


class TestCertificate:
    def test_djv_bar(self):
        f = lambda q: np.cos(2 * q) + 0.3 * np.cos(q)
        cert = djv_certificate(from_function(f, n_q=1024))
        assert cert.kind == "djv"
        assert cert.bar.birth < 0 < cert.bar.death

    def test_no_finite_bar(self):
        cert = djv_certificate(from_function(np.cos))
        assert cert.kind == "no_finite_bar_at_zero"

    def test_zero_critical_value(self):
        cert = djv_certificate(from_function(lambda q: np.cos(q) - 1.0))
        assert cert.kind == "zero_is_critical"
