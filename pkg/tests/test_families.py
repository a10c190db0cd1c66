import numpy as np
import pytest

from djvlab.families import (
    CATALOG_FIG1_PARAMS,
    CATALOG_FIG2_PARAMS,
    CrossingEvent,
    FamilyError,
    GenFunFamily,
    catalog_fig1,
    catalog_fig2,
    crossing_events_to_csv,
    default_cutoff,
    spectral_trace,
    suspend,
    suspension_family,
    track_barcodes,
    verify_quotient_djv,
)
from djvlab.genfun import critical_points, sublevel_persistence
from djvlab.jetcurves import classify_isotopy, contact_pairing, winding_number


def shifting_cos(n_times=3, n_base=256):
    """Fiberless family f_t(q) = cos q - 2t; births move down linearly."""
    return GenFunFamily(lambda t, q: np.cos(q) - 2.0 * t,
                        np.linspace(0.0, 1.0, n_times),
                        n_base=(n_base,), fiber_signs=(),
                        sigma_t_grad=[lambda t, q: -np.sin(q)],
                        dsigma_dt=lambda t, q: -2.0 + 0.0 * q)


class TestGenFunFamily:
    def test_times_must_increase(self):
        with pytest.raises(FamilyError):
            GenFunFamily(lambda t, q: t * np.cos(q), [0.0, 0.5, 0.5],
                         fiber_signs=())

    def test_times_must_stay_in_unit_interval(self):
        with pytest.raises(FamilyError):
            GenFunFamily(lambda t, q: t * np.cos(q), [0.0, 1.5],
                         fiber_signs=())

    def test_measured_step_of_linear_family(self):
        fam = GenFunFamily(lambda t, q: t * np.cos(q), [0.0, 0.5, 1.0],
                           fiber_signs=())
        # adjacent members differ by 0.5 cos q in sup norm
        assert abs(fam.measured_step - 0.5) < 1e-3

    def test_declared_step_bound_enforced(self):
        with pytest.raises(FamilyError):
            GenFunFamily(lambda t, q: t * np.cos(q), [0.0, 1.0],
                         fiber_signs=(), step_bound=0.5)

    def test_declared_step_bound_kept(self):
        fam = GenFunFamily(lambda t, q: t * np.cos(q), [0.0, 1.0],
                           fiber_signs=(), step_bound=1.5)
        assert fam.step_bound == 1.5
        assert fam.measured_step <= fam.step_bound

    def test_params_and_member_cache(self):
        fam = shifting_cos()
        assert fam.params == [0.0, 0.5, 1.0]
        assert fam.member_fn(0.5) is fam.member_fn(0.5)
        assert len(fam.members) == 3


class TestTrackBarcodes:
    def test_single_crossing_at_analytic_parameter(self):
        # the degree-0 infinite bar is born at min f = -1 - 2t, so it
        # starts containing level -1.5 exactly at t = 1/4
        fam = shifting_cos()
        events = track_barcodes(fam, -1.5)
        assert len(events) == 1
        ev = events[0]
        assert abs(ev.t_star - 0.25) < 1e-3
        assert ev.before == {}
        assert ev.after == {0: 1}

    def test_no_crossing_when_counts_constant(self):
        fam = shifting_cos()
        assert track_barcodes(fam, -5.0) == []

    def test_events_csv(self, tmp_path):
        path = tmp_path / "events.csv"
        ev = CrossingEvent(0.25, -1.5, {}, {0: 1})
        crossing_events_to_csv([ev], path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t_star,level,before,after"
        assert lines[1] == "0.25,-1.5,,0:1"


class TestSpectralTrace:
    def test_linear_family_traces_scaled_extrema(self):
        fam = GenFunFamily(lambda t, q: t * 0.3 * np.sin(q),
                           np.linspace(0.0, 1.0, 5),
                           n_base=(512,), fiber_signs=())
        top = spectral_trace(fam, "[L]")
        bot = spectral_trace(fam, "[pt]")
        assert np.allclose(top.values, 0.3 * fam.times, atol=1e-4)
        assert np.allclose(bot.values, -0.3 * fam.times, atol=1e-4)

    def test_level_crossing_found_by_bisection(self):
        fam = GenFunFamily(lambda t, q: t * 0.3 * np.sin(q),
                           np.linspace(0.0, 1.0, 5),
                           n_base=(512,), fiber_signs=())
        tr = spectral_trace(fam, "[L]", level=0.15)
        assert len(tr.crossings) == 1
        assert abs(tr.crossings[0] - 0.5) < 1e-3

    def test_modulus_bounds_value_steps(self):
        fam = shifting_cos(n_times=9)
        tr = spectral_trace(fam, "[pt]")
        assert np.abs(np.diff(tr.values)).max() <= tr.modulus + 1e-9

    def test_csv_output(self, tmp_path):
        fam = shifting_cos()
        tr = spectral_trace(fam, "[L]")
        path = tmp_path / "trace.csv"
        tr.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,c_beta"
        assert len(lines) == 1 + len(fam.times)


class TestQuotientVerification:
    def test_flagship_sine(self):
        rep = verify_quotient_djv(lambda q: 0.3 * np.sin(q), 1,
                                  fprime=lambda q: 0.3 * np.cos(q))
        assert rep.failed == []
        assert all(rep.preconditions.values())
        # c(t) = 1.3 t crosses level 1 at t = 1/1.3
        assert abs(rep.tau - 1.0 / 1.3) < 1e-3
        assert abs(rep.trace.values[0]) < 1e-6
        assert abs(rep.trace.values[-1] - 1.3) < 1e-6
        assert rep.positivity == "positive"
        assert rep.immersed
        assert "meets" in rep.verdict

    def test_higher_period(self):
        rep = verify_quotient_djv(lambda q: 0.45 * np.sin(q), 2,
                                  fprime=lambda q: 0.45 * np.cos(q))
        assert abs(rep.tau - 2.0 / 2.45) < 1e-3

    def test_no_sign_change_rejected(self):
        rep = verify_quotient_djv(lambda q: 0.3 + 0.0 * q, 1)
        assert rep.failed == ["changes_sign"]
        assert rep.tau is None
        assert rep.verdict.startswith("preconditions failed")

    def test_too_large_rejected(self):
        rep = verify_quotient_djv(lambda q: 0.6 * np.sin(q), 1)
        assert "bounded_by_half" in rep.failed

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            verify_quotient_djv(lambda q: 0.3 * np.sin(q), 0)


class TestCutoff:
    def test_shape(self):
        chi = default_cutoff(0.1)
        r = np.linspace(0.0, 0.0999, 20)
        assert np.allclose(chi(r), r, atol=1e-12)
        r = np.linspace(0.9, 3.0, 20)
        assert np.allclose(chi(r), 1.0, atol=1e-12)
        r = np.linspace(0.0, 0.9, 200)
        assert np.all(np.diff(chi(r)) > 0)

    def test_derivative_matches_fd(self):
        chi = default_cutoff(0.1)
        r = np.linspace(0.01, 1.2, 300)
        fd = (chi(r + 1e-6) - chi(r - 1e-6)) / 2e-6
        assert np.abs(chi.derivative(r) - fd).max() < 1e-6

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            default_cutoff(0.6)


def small_reveal_family(n_times=3):
    """A single dip ridge catalog family on a coarse grid."""
    from djvlab.families import _dip_ridge, _reveal_family
    p = CATALOG_FIG1_PARAMS
    Sig, Sig_q, Sig_xi = _dip_ridge(
        p["ridge_base"], p["slope"], p["ridge_width"], p["ridge_top"],
        p["dip_depth"], p["dip_center"], p["dip_width"],
        offset=p["profile_offset"], tilt=p["profile_tilt"])
    return _reveal_family(Sig, Sig_q, Sig_xi,
                          np.linspace(0.0, 1.0, n_times), 128, 129)


class TestSuspension:
    def test_shrink_family_ends_constant(self):
        shrink = suspension_family(small_reveal_family(),
                                   times=np.linspace(0.0, 1.0, 3))
        end = shrink.member_fn(1.0)
        # the cushion's critical locus is xi = 0, where u = cushion max
        vals = end.vertex_values()
        q_axis = end.base_axes()[0]
        g = end.gradient(q_axis, np.zeros_like(q_axis))[1]
        assert np.abs(np.asarray(g)).max() < 1e-12
        assert vals.max() <= 0.8 + 1e-9

    def test_plain_family_lacks_profiles(self):
        fam = GenFunFamily(lambda t, q: t * np.cos(q), [0.0, 1.0],
                           fiber_signs=())
        with pytest.raises(FamilyError):
            suspension_family(fam)

    def test_nonconstant_end_rejected(self):
        from djvlab.families import _bump, _cushion
        fam = GenFunFamily(
            lambda t, q, xi: _cushion(xi) + 0.2 * np.cos(q) * _bump(xi / 3.0),
            [0.0, 1.0], n_base=(64,), fiber_signs=(-1,), n_fiber=(65,))
        with pytest.raises(FamilyError):
            suspend(fam, n=2, n_x=9, n_fiber=(65,))

    def test_dimension_validated(self):
        shrink = suspension_family(small_reveal_family(),
                                   times=np.linspace(0.0, 1.0, 3))
        with pytest.raises(FamilyError):
            suspend(shrink, n=1)

    def test_window_criticals_on_zero_slice(self):
        shrink = suspension_family(small_reveal_family(),
                                   times=np.linspace(0.0, 1.0, 3))
        S = suspend(shrink, n=2, n_x=17, n_fiber=(65,))
        info = S.suspension
        assert abs(info["constant"] - 0.8) < 1e-6
        in_k = info["window_critical_points"]
        assert len(in_k) >= 1
        period = 2.2
        for c in in_k:
            xw = np.mod(c.location[1] + period / 2.0, period) - period / 2.0
            assert abs(xw) <= info["x_tol"]
        # the negative critical value survives the suspension with the
        # x direction adding one to the Morse index
        base = min(c.value for c in critical_points(shrink.member_fn(0.0)))
        neg = [c for c in in_k if c.value < 0.0]
        assert len(neg) == 1
        assert abs(neg[0].value - base) < 5e-3
        assert neg[0].morse_index == 2

    def test_verify_false_skips_audit(self):
        shrink = suspension_family(small_reveal_family(),
                                   times=np.linspace(0.0, 1.0, 3))
        S = suspend(shrink, n=2, n_x=9, n_fiber=(65,), verify=False)
        assert S.suspension["critical_points"] is None
        assert abs(S.suspension["constant"] - 0.8) < 1e-6


@pytest.fixture(scope="module")
def fig1():
    return catalog_fig1()


@pytest.fixture(scope="module")
def fig2():
    return catalog_fig2()


class TestCatalogFig1:
    def test_positive_immersed(self, fig1):
        frames, fam = fig1
        cls = classify_isotopy(frames)
        assert cls.positivity == "positive"
        assert cls.immersed
        assert contact_pairing(frames).min() > 0.0

    def test_final_winding(self, fig1):
        frames, fam = fig1
        assert winding_number(frames.frames[-1]) == -1

    def test_starts_at_zero_section(self, fig1):
        frames, fam = fig1
        first = frames.frames[0]
        assert np.abs(first.u).max() < 1e-9
        assert np.abs(first.p).max() < 1e-9

    def test_front_bottom_tangency_matches_critical_value(self, fig1):
        # cross-check between two code paths: the lowest horizontal
        # tangency of the extracted front against the Newton refined
        # negative critical value of the final member
        frames, fam = fig1
        cps = critical_points(fam.member_fn(1.0))
        neg = [c for c in cps if c.value < 0.0]
        assert len(neg) == 1
        last = frames.frames[-1]
        flat = np.abs(last.p) < 0.02
        assert abs(last.u[flat].min() - neg[0].value) < 1e-3

    def test_lipschitz_along_family(self, fig1):
        frames, fam = fig1
        for label in ("[pt]", "[L]"):
            tr = spectral_trace(fam, label)
            assert np.abs(np.diff(tr.values)).max() \
                <= fam.measured_step + 1e-9

    def test_frozen_params_attached(self, fig1):
        frames, fam = fig1
        assert fam.frozen == CATALOG_FIG1_PARAMS


class TestCatalogFig2:
    def test_positive_immersed(self, fig2):
        frames, fam = fig2
        cls = classify_isotopy(frames)
        assert cls.positivity == "positive"
        assert cls.immersed

    def test_final_winding_zero(self, fig2):
        frames, fam = fig2
        assert winding_number(frames.frames[-1]) == 0

    def test_two_equal_negative_values(self, fig2):
        frames, fam = fig2
        cps = critical_points(fam.member_fn(1.0))
        neg = sorted(c.value for c in cps if c.value < 0.0)
        assert len(neg) == 2
        assert abs(neg[0] - neg[1]) < 5e-3

    def test_certificate_fires(self, fig2):
        frames, fam = fig2
        from djvlab.genfun import djv_certificate
        S = fam.member_fn(1.0, n_base=(384,), n_fiber=(385,))
        bc = sublevel_persistence(S)
        cert = djv_certificate(S, bc)
        assert cert.kind == "djv"
        assert cert.bar.birth < 0.0 < cert.bar.death
