import numpy as np
import pytest

from djvlab.lorentz import (
    CausalReport,
    DomainError,
    LorentzError,
    ProductSpacetime,
    RiemannianMetric,
    Sky,
    SkyError,
    TimelikeCurve,
    causal_character,
    christoffels,
    djv_moments,
    integrate_geodesic,
    moments_to_csv,
    null_geodesic,
    sky,
    two_bump_connecting_curve,
    two_bump_scenario,
    yxl_deviation,
)

FLAT = RiemannianMetric("euclidean_with_bumps", bumps=())
SPHERE = RiemannianMetric("round_sphere")
ONE_BUMP = RiemannianMetric(
    "euclidean_with_bumps", bumps=(((0.5, -0.2), 0.6, 0.9),))


class TestMetric:
    def test_unknown_kind(self):
        with pytest.raises(LorentzError):
            RiemannianMetric("hyperbolic")

    def test_sphere_rejects_bumps(self):
        with pytest.raises(LorentzError):
            RiemannianMetric("round_sphere", bumps=(((0.0, 0.0), 0.1, 1.0),))

    def test_conformal_floor(self):
        with pytest.raises(LorentzError):
            RiemannianMetric("euclidean_with_bumps",
                             bumps=(((0.0, 0.0), -2.0, 1.0),))

    def test_bump_validation(self):
        with pytest.raises(LorentzError):
            RiemannianMetric("euclidean_with_bumps",
                             bumps=(((0.0, 0.0, 0.0), 0.1, 1.0),))
        with pytest.raises(LorentzError):
            RiemannianMetric("euclidean_with_bumps",
                             bumps=(((0.0, 0.0), 0.1, -1.0),))

    def test_flat_norm(self):
        v = np.array([3.0, 4.0])
        assert float(FLAT.norm(np.zeros(2), v)) == 5.0
        u = FLAT.unit(np.zeros(2), v)
        assert abs(float(FLAT.norm(np.zeros(2), u)) - 1.0) < 1e-15

    def test_sphere_antipodal_distance(self):
        # chart origin is a pole; the chart-1 origin is the other pole
        d = SPHERE.distance(np.zeros(2), np.zeros(2), chart_a=0, chart_b=1)
        assert abs(float(d) - np.pi) < 1e-12

    def test_grad_phi_matches_fd(self):
        x = np.array([0.7, 0.1])
        h = 1e-6
        for m in (ONE_BUMP, SPHERE):
            g = m.grad_phi(x)
            for i in range(2):
                e = np.zeros(2)
                e[i] = h
                fd = (m.phi(x + e) - m.phi(x - e)) / (2.0 * h)
                assert abs(g[i] - fd) < 1e-8


class TestChristoffels:
    def test_flat_symbols_vanish(self):
        assert np.abs(christoffels(FLAT, np.array([1.0, -2.0]))).max() == 0.0

    def test_outside_box(self):
        with pytest.raises(DomainError):
            christoffels(FLAT, np.array([100.0, 0.0]))

    def test_matches_metric_derivative_oracle(self):
        # rebuild Gamma^i_jk = g^il (d_j g_lk + d_k g_lj - d_l g_jk) / 2
        # from finite differences of the metric components alone
        h = 1e-4
        for m, x in ((ONE_BUMP, np.array([0.3, 0.4])),
                     (SPHERE, np.array([-0.6, 0.9]))):
            def g_at(y):
                return np.exp(2.0 * m.phi(y)) * np.eye(2)

            dg = np.empty((2, 2, 2))
            for k in range(2):
                e = np.zeros(2)
                e[k] = h
                dg[k] = (g_at(x + e) - g_at(x - e)) / (2.0 * h)
            ginv = np.linalg.inv(g_at(x))
            gamma_fd = 0.5 * np.einsum(
                "il,jlk->ijk", ginv, dg + np.transpose(dg, (2, 1, 0))
                - np.transpose(dg, (1, 0, 2)))
            gamma_fd = 0.5 * (gamma_fd + np.transpose(gamma_fd, (0, 2, 1)))
            assert np.abs(christoffels(m, x) - gamma_fd).max() < 1e-6


class TestGeodesics:
    def test_euclidean_lines_exact(self):
        v0 = FLAT.unit(np.zeros(2), np.array([1.0, 2.0]))
        path = integrate_geodesic(FLAT, np.zeros(2), v0, 3.0, step=1e-2)
        assert np.abs(path.x - path.s[:, None] * v0).max() < 1e-12
        assert path.speed_drift < 1e-14
        assert not path.truncated

    def test_requires_unit_speed(self):
        with pytest.raises(LorentzError):
            integrate_geodesic(FLAT, np.zeros(2), np.array([2.0, 0.0]), 1.0)

    def test_start_outside_box(self):
        with pytest.raises(DomainError):
            integrate_geodesic(FLAT, np.array([50.0, 0.0]),
                               np.array([1.0, 0.0]), 1.0)

    def test_truncation_flag(self):
        path = integrate_geodesic(FLAT, np.zeros(2),
                                  np.array([1.0, 0.0]), 20.0, step=1e-2)
        assert path.truncated

    def test_sphere_geodesic_returns_after_two_pi(self):
        x0 = np.array([0.2, -0.1])
        v0 = SPHERE.unit(x0, np.array([1.0, 0.4]))
        path = integrate_geodesic(SPHERE, x0, v0, 2.0 * np.pi, step=1e-3)
        back = SPHERE.distance(path.x[-1], x0,
                               chart_a=path.chart[-1], chart_b=0)
        assert float(back) < 1e-6
        assert path.speed_drift < 1e-9

    def test_fourth_order_convergence(self):
        x0 = np.array([-1.5, 0.3])
        v0 = ONE_BUMP.unit(x0, np.array([1.0, 0.1]))

        def endpoint(step):
            return integrate_geodesic(ONE_BUMP, x0, v0, 2.5, step=step).x[-1]

        ref = endpoint(2.5 / 4096)
        e1 = np.linalg.norm(endpoint(2.5 / 128) - ref)
        e2 = np.linalg.norm(endpoint(2.5 / 256) - ref)
        order = np.log2(e1 / e2)
        assert 3.5 < order < 4.5

    def test_drift_shrinks_with_step(self):
        x0 = np.array([-1.5, 0.3])
        v0 = ONE_BUMP.unit(x0, np.array([1.0, 0.1]))
        d1 = integrate_geodesic(ONE_BUMP, x0, v0, 2.5,
                                step=2.5 / 128).speed_drift
        d2 = integrate_geodesic(ONE_BUMP, x0, v0, 2.5,
                                step=2.5 / 256).speed_drift
        assert d1 / d2 > 8.0


class TestNullGeodesics:
    def test_time_laws(self):
        st = ProductSpacetime(FLAT)
        ev = (np.zeros(2), 4.0)
        fut = null_geodesic(st, ev, np.array([1.0, 0.0]), 1.5, step=1e-2)
        past = null_geodesic(st, ev, np.array([1.0, 0.0]), 1.5, step=1e-2,
                             past=True)
        assert abs(fut.times()[-1] - 5.5) < 1e-12
        assert abs(past.times()[-1] - 2.5) < 1e-12
        assert np.abs(fut.times() - (4.0 + fut.base_path.s)).max() == 0.0


class TestWorldlines:
    def test_validation(self):
        with pytest.raises(LorentzError):
            TimelikeCurve(np.array([0.0, 0.0, 1.0]), np.zeros((3, 2)))
        with pytest.raises(LorentzError):
            TimelikeCurve(np.array([0.0, 1.0]), np.zeros((3, 2)))

    def test_position_interpolates(self):
        c = TimelikeCurve(np.array([0.0, 2.0]),
                          np.array([[0.0, 0.0], [2.0, 4.0]]))
        assert np.abs(c.position(1.0) - [1.0, 2.0]).max() < 1e-15

    def test_static_curve_is_timelike(self):
        st = ProductSpacetime(FLAT)
        t = np.linspace(0.0, 1.0, 11)
        rep = causal_character(st, TimelikeCurve(t, np.zeros((11, 2))))
        assert rep.kind == "timelike_future"
        assert rep.margin == 1.0

    def test_lightlike_is_causal(self):
        st = ProductSpacetime(FLAT)
        t = np.linspace(0.0, 1.0, 11)
        pts = np.stack([t, np.zeros_like(t)], axis=1)
        assert causal_character(st, TimelikeCurve(t, pts)).kind == "causal"

    def test_fast_curve_is_neither(self):
        st = ProductSpacetime(FLAT)
        t = np.linspace(0.0, 1.0, 11)
        pts = np.stack([1.2 * t, np.zeros_like(t)], axis=1)
        rep = causal_character(st, TimelikeCurve(t, pts))
        assert rep.kind == "neither"
        assert abs(rep.max_speed - 1.2) < 1e-12


class TestSkies:
    def test_fiber_over_own_surface(self):
        st = ProductSpacetime(FLAT)
        x_bar = np.array([0.3, -0.7])
        s = sky(st, (x_bar, 2.0), 2.0, n_dirs=64)
        assert np.abs(s.positions - x_bar).max() == 0.0
        jet = s.to_jet_curve(center=x_bar)
        assert np.abs(jet.u).max() == 0.0
        assert np.abs(jet.p).max() == 0.0

    def test_minkowski_sky_is_a_circle(self):
        st = ProductSpacetime(FLAT)
        x_bar = np.array([1.0, 0.5])
        s = sky(st, (x_bar, 3.0), 1.0, n_dirs=64, step=1e-3)
        r = np.linalg.norm(s.positions - x_bar, axis=1)
        assert np.abs(r - 2.0).max() < 1e-12
        jet = s.to_jet_curve(center=x_bar, legendrian_tol=1e-3)
        assert np.abs(jet.u - 2.0).max() < 1e-9
        assert np.abs(jet.p).max() < 1e-9

    def test_direction_count_floor(self):
        st = ProductSpacetime(FLAT)
        with pytest.raises(LorentzError):
            sky(st, (np.zeros(2), 0.0), 1.0, n_dirs=32)

    def test_sphere_base_unsupported(self):
        st = ProductSpacetime(SPHERE)
        with pytest.raises(LorentzError):
            sky(st, (np.zeros(2), 0.0), 1.0)

    def test_truncated_cone_raises(self):
        tight = RiemannianMetric("euclidean_with_bumps", box_radius=1.0)
        st = ProductSpacetime(tight)
        with pytest.raises(SkyError):
            sky(st, (np.zeros(2), 0.0), 5.0, n_dirs=64, step=1e-2)


class TestMoments:
    def test_minkowski_straight_worldline_is_quiet(self):
        st = ProductSpacetime(
            RiemannianMetric("euclidean_with_bumps", box_radius=16.0))
        t = np.linspace(0.0, 6.0, 61)
        c = TimelikeCurve(t, np.stack([0.5 * t, np.zeros_like(t)], axis=1))
        assert djv_moments(st, c, t_samples=13) == []

    def test_needs_timelike_curve(self):
        st = ProductSpacetime(FLAT)
        t = np.linspace(0.0, 1.0, 11)
        pts = np.stack([1.5 * t, np.zeros_like(t)], axis=1)
        with pytest.raises(LorentzError):
            djv_moments(st, TimelikeCurve(t, pts))

    def test_csv_format(self, tmp_path):
        from djvlab.lorentz import DjvMoment
        path = tmp_path / "moments.csv"
        moments_to_csv([DjvMoment(0.25, 1.5, 3.0, 1e-4)], path)
        text = path.read_text()
        assert text.splitlines()[0] == "t_minus,t_plus,dir_angle"
        assert text.splitlines()[1] == "0.25,1.5,3"


class TestTwoBumpScenario:
    def test_curves_connect_source_to_focus(self):
        st, (src, t_src) = two_bump_scenario()
        assert t_src == 0.0
        for amp in (0.3, -0.45, 0.6):
            c = two_bump_connecting_curve(st, amp)
            assert np.abs(c.points[0] - src).max() < 1e-12
            assert abs(c.points[-1][1]) < 1e-12
            rep = causal_character(st, c)
            assert rep.kind == "timelike_future"

    def test_straight_chord_is_too_slow(self):
        # through the bump cores the conformal factor exceeds 1, so the
        # straight spatial chord is not timelike at the focal arrival
        st, _ = two_bump_scenario()
        rep = causal_character(st, two_bump_connecting_curve(st, 0.0))
        assert rep.kind == "neither"


class TestReturnDeviation:
    def test_euclidean_deviation_equals_length(self):
        assert abs(yxl_deviation(FLAT, np.zeros(2), 1.5) - 1.5) < 1e-12

    def test_sphere_deviation_vanishes(self):
        dev = yxl_deviation(SPHERE, np.array([0.3, 0.2]), 2.0 * np.pi,
                            n_dirs=64, step=1e-3)
        assert dev < 1e-5

    def test_truncation_raises(self):
        tight = RiemannianMetric("euclidean_with_bumps", box_radius=1.0)
        with pytest.raises(DomainError):
            yxl_deviation(tight, np.zeros(2), 5.0, n_dirs=64, step=1e-2)

    def test_surfaces_only(self):
        m3 = RiemannianMetric("euclidean_with_bumps", dim=3)
        with pytest.raises(LorentzError):
            yxl_deviation(m3, np.zeros(3), 1.0)
