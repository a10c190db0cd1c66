"""One-parameter families of generating functions.

A family holds members S_t sharing one grid, so sup-norm steps between
neighbors are well defined and spectral values move at most that fast
(they are 1-Lipschitz in the sup norm).  On top of that we provide
barcode tracking with bisection, spectral traces with level-crossing
detection, the quotient deja vu verification against the k-level jet,
a suspension to higher-dimensional bases, and two frozen wavefront
catalogs: a single dip with final winding -1 and a two-tongue front
with two equal negative critical values and winding 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .genfun import (DegeneracyError, QuadAtInfinityFn, critical_points,
                     front_from_genfun, spectral_invariant,
                     sublevel_persistence)
from .jetcurves import (IsotopyFrames, LegendrianCurve, classify_isotopy,
                        linear_isotopy)

TWO_PI = 2.0 * np.pi

DEFAULT_T_RESOLUTION = 1e-4


class FamilyError(ValueError):
    """Invalid family data or failed family precondition."""


# ---------------------------------------------------------------------------
# smooth profile helpers (compact support, C^2)

def _bump(s):
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1.0, (1.0 - np.minimum(s * s, 1.0)) ** 3, 0.0)


def _bump_p(s):
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1.0,
                    -6.0 * s * (1.0 - np.minimum(s * s, 1.0)) ** 2, 0.0)


def _sstep(s):
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def _sstep_p(s):
    s = np.asarray(s, dtype=float)
    inside = (s > 0.0) & (s < 1.0)
    sc = np.clip(s, 0.0, 1.0)
    return np.where(inside, 30.0 * sc * sc * (1.0 - sc) ** 2, 0.0)


def _wrap_pi(x):
    return np.mod(x + np.pi, TWO_PI) - np.pi


# ---------------------------------------------------------------------------
# families

class GenFunFamily:
    """Members S_t = sigma(t, q, xi) + Q(xi) over a shared grid.

    ``sigma_t(t, *coords)`` must be vectorized over the coordinates; for
    use with :func:`suspend` it must also broadcast over an array-valued
    ``t``.  Optional ``sigma_t_grad`` holds analytic coordinate partials
    (one callable per coordinate, each taking ``(t, *coords)``) and
    ``dsigma_dt`` the time partial.
    """

    def __init__(self, sigma_t, times, n_base=(256,), base_periods=None,
                 fiber_signs=(-1,), n_fiber=None, box_radius=4.0,
                 support_radius=3.8, sigma_t_grad=None, dsigma_dt=None,
                 step_bound=None):
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise FamilyError("need at least two parameter values")
        if np.any(np.diff(times) <= 0):
            raise FamilyError("parameter values must be strictly increasing")
        if times[0] < 0.0 or times[-1] > 1.0:
            raise FamilyError("parameter values must lie in [0, 1]")
        self.times = times
        self.sigma_t = sigma_t
        self.sigma_t_grad = sigma_t_grad
        self.dsigma_dt = dsigma_dt
        self.n_base = tuple(n_base)
        self.base_periods = base_periods
        self.fiber_signs = tuple(fiber_signs)
        self.n_fiber = n_fiber
        self.box_radius = float(box_radius)
        self.support_radius = float(support_radius)
        self._cache = {}
        self.members = [self.member_fn(t) for t in times]

        vv = [m.vertex_values() for m in self.members]
        steps = [float(np.abs(vv[i + 1] - vv[i]).max())
                 for i in range(len(vv) - 1)]
        self.measured_step = max(steps) if steps else 0.0
        if step_bound is None:
            self.step_bound = self.measured_step
        else:
            self.step_bound = float(step_bound)
            if self.measured_step > self.step_bound:
                raise FamilyError(
                    "member step %.3e exceeds declared bound %.3e"
                    % (self.measured_step, self.step_bound))

    @property
    def params(self) -> list:
        return [float(t) for t in self.times]

    def member_fn(self, t, n_base=None, n_fiber=None) -> QuadAtInfinityFn:
        """The member at parameter t, optionally on a finer grid."""
        t = float(t)
        key = (t, n_base, n_fiber)
        if key in self._cache:
            return self._cache[key]
        grad = None
        if self.sigma_t_grad is not None:
            grad = [lambda *c, _g=g: _g(t, *c) for g in self.sigma_t_grad]
        fn = QuadAtInfinityFn(
            lambda *c: self.sigma_t(t, *c),
            n_base=self.n_base if n_base is None else tuple(n_base),
            base_periods=self.base_periods,
            fiber_signs=self.fiber_signs,
            n_fiber=self.n_fiber if n_fiber is None else tuple(n_fiber),
            box_radius=self.box_radius,
            support_radius=self.support_radius,
            sigma_grad=grad)
        self._cache[key] = fn
        return fn


@dataclass(frozen=True)
class CrossingEvent:
    """A parameter where the count of bars through a level changes."""

    t_star: float
    level: float
    before: dict
    after: dict


def track_barcodes(family: GenFunFamily, a: float,
                   t_resolution=DEFAULT_T_RESOLUTION) -> list[CrossingEvent]:
    """Bracket every change of the bar count through level a along t.

    By barcode stability each reported event pins a parameter where a is
    a critical value of the member.
    """
    a = float(a)
    counts = [sublevel_persistence(m).bars_containing(a)
              for m in family.members]
    events = []
    for i in range(len(counts) - 1):
        if counts[i] == counts[i + 1]:
            continue
        lo, hi = family.times[i], family.times[i + 1]
        c_lo = counts[i]
        while hi - lo > t_resolution:
            mid = 0.5 * (lo + hi)
            c_mid = sublevel_persistence(
                family.member_fn(mid)).bars_containing(a)
            if c_mid == c_lo:
                lo = mid
            else:
                hi = mid
        events.append(CrossingEvent(0.5 * (lo + hi), a,
                                    counts[i], counts[i + 1]))
    return events


def crossing_events_to_csv(events, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_star", "level", "before", "after"])
        for e in events:
            w.writerow(["%.12g" % e.t_star, "%.12g" % e.level,
                        ";".join("%d:%d" % kv
                                 for kv in sorted(e.before.items())),
                        ";".join("%d:%d" % kv
                                 for kv in sorted(e.after.items()))])


@dataclass
class SpectralTrace:
    """Sampled t -> c_beta(S_t) with level crossings and Lipschitz data."""

    label: str
    times: np.ndarray
    values: np.ndarray
    level: float | None
    crossings: list
    modulus: float  # declared modulus of continuity per family step

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "c_beta"])
            for t, v in zip(self.times, self.values):
                w.writerow(["%.12g" % t, "%.12g" % v])


def spectral_trace(family: GenFunFamily, label: str, level=None,
                   t_resolution=DEFAULT_T_RESOLUTION) -> SpectralTrace:
    """Trace one spectral value along the family.

    Spectral values are 1-Lipschitz in the sup norm, so the declared
    modulus is the family's measured member step.  If a target level is
    given, each strict crossing between samples is sharpened by
    bisection.
    """
    vals = np.array([spectral_invariant(m, label).value
                     for m in family.members])
    crossings = []
    if level is not None:
        level = float(level)
        for i in range(len(vals) - 1):
            g0, g1 = vals[i] - level, vals[i + 1] - level
            if g0 == 0.0:
                crossings.append(float(family.times[i]))
                continue
            if g0 * g1 >= 0.0:
                continue
            lo, hi = family.times[i], family.times[i + 1]
            while hi - lo > t_resolution:
                mid = 0.5 * (lo + hi)
                gm = spectral_invariant(family.member_fn(mid),
                                        label).value - level
                if gm == 0.0:
                    lo = hi = mid
                elif gm * g0 > 0.0:
                    lo = mid
                else:
                    hi = mid
            crossings.append(0.5 * float(lo + hi))
        if vals[-1] == level:
            crossings.append(float(family.times[-1]))
    return SpectralTrace(label, np.asarray(family.times, dtype=float).copy(),
                         vals, level, crossings, family.measured_step)


# ---------------------------------------------------------------------------
# quotient deja vu verification

QUOTIENT_DJV_VERDICT = "every positive isotopy lift meets j1(k)"


@dataclass
class QuotientDjvReport:
    preconditions: dict
    failed: list
    tau: float | None
    trace: SpectralTrace | None
    positivity: str | None
    immersed: bool | None
    verdict: str


def verify_quotient_djv(f, k, fprime=None, n_q=512,
                        n_times=17) -> QuotientDjvReport:
    """Certify the deja vu property of the lift of j1(f + k) mod k.

    Preconditions on f (each reported): bounded by 1/2 in absolute
    value, 0 a regular value, and a sign change.  On success the linear
    lift family t -> t (f + k) is traced on the top class and the
    crossing time tau of level k is reported together with a positivity
    witness for the projected isotopy.
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    q = np.linspace(0.0, TWO_PI, n_q, endpoint=False)
    fv = np.asarray(f(q), dtype=float)
    if fv.shape != q.shape:
        fv = np.broadcast_to(fv, q.shape).astype(float)
    dq = TWO_PI / n_q
    slope = (np.roll(fv, -1) - np.roll(fv, 1)) / (2.0 * dq)

    pre = {}
    pre["bounded_by_half"] = bool(np.abs(fv).max() < 0.5)
    crossing = (fv * np.roll(fv, -1) < 0.0) | (fv == 0.0)
    regular = True
    if not crossing.any():
        regular = True  # vacuous; the sign-change condition fails instead
    else:
        idx = np.nonzero(crossing)[0]
        regular = bool(np.abs(slope[idx]).min() > 1e-8)
    pre["zero_regular_value"] = regular
    pre["changes_sign"] = bool(fv.min() < 0.0 < fv.max())
    failed = [name for name, ok in pre.items() if not ok]
    if failed:
        return QuotientDjvReport(pre, failed, None, None, None, None,
                                 "preconditions failed: " + ", ".join(failed))

    if fprime is None:
        hstep = 1e-6

        def fprime(x, _f=f, _h=hstep):
            return (np.asarray(_f(x + _h), dtype=float)
                    - np.asarray(_f(x - _h), dtype=float)) / (2.0 * _h)

    def lifted(x):
        return np.asarray(f(x), dtype=float) + k

    fam = GenFunFamily(lambda t, x: t * lifted(x),
                       np.linspace(0.0, 1.0, n_times),
                       n_base=(n_q,), fiber_signs=(),
                       sigma_t_grad=[lambda t, x: t * np.asarray(
                           fprime(x), dtype=float)],
                       dsigma_dt=lambda t, x: lifted(x))
    trace = spectral_trace(fam, "[L]", level=float(k))
    tau = trace.crossings[0] if trace.crossings else None

    frames = linear_isotopy(lifted, fprime, n=max(n_q, 2048))
    cls = classify_isotopy(frames, tol=1e-9)
    verdict = (QUOTIENT_DJV_VERDICT if tau is not None
               and cls.positivity == "positive"
               else "inconclusive")
    return QuotientDjvReport(pre, [], tau, trace, cls.positivity,
                             cls.immersed, verdict)


# ---------------------------------------------------------------------------
# suspension

def default_cutoff(eps=0.1):
    """A cutoff profile: identity below eps, flat 1 above 1 - eps.

    The middle piece is the monotone quintic matching value and first
    two derivatives at both junctions.
    """
    eps = float(eps)
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    span = 1.0 - 2.0 * eps
    # g on [0,1]: g(0)=0, g'(0)=span/(1-eps), g''(0)=0, g(1)=1, g'(1)=0,
    # g''(1)=0; chi(r) = eps + (1-eps) g((r-eps)/span)
    d0 = span / (1.0 - eps)
    A = np.array([[1.0, 1.0, 1.0],
                  [3.0, 4.0, 5.0],
                  [6.0, 12.0, 20.0]])
    b = np.array([1.0 - d0, -d0, 0.0])
    a3, a4, a5 = np.linalg.solve(A, b)

    def chi(r):
        r = np.asarray(r, dtype=float)
        s = np.clip((r - eps) / span, 0.0, 1.0)
        g = d0 * s + a3 * s ** 3 + a4 * s ** 4 + a5 * s ** 5
        return np.where(r < eps, r,
                        np.where(r > 1.0 - eps, 1.0, eps + (1.0 - eps) * g))

    def chi_p(r):
        r = np.asarray(r, dtype=float)
        s = np.clip((r - eps) / span, 0.0, 1.0)
        gp = d0 + 3 * a3 * s ** 2 + 4 * a4 * s ** 3 + 5 * a5 * s ** 4
        return np.where(r < eps, 1.0,
                        np.where(r > 1.0 - eps, 0.0,
                                 (1.0 - eps) * gp / span))

    chi.derivative = chi_p
    chi.eps = eps
    return chi


def _check_cutoff(chi, eps):
    r = np.linspace(0.0, eps * 0.999, 64)
    if np.abs(chi(r) - r).max() > 1e-9:
        raise FamilyError("cutoff is not the identity below eps")
    r = np.linspace(1.0 - eps, 3.0, 64)
    if np.abs(chi(r) - 1.0).max() > 1e-9:
        raise FamilyError("cutoff is not constant 1 above 1 - eps")
    r = np.linspace(1e-4, 1.0 - eps - 1e-4, 400)
    h = 1e-6
    der = (chi(r + h) - chi(r - h)) / (2.0 * h)
    if der.min() <= 0.0:
        raise FamilyError("cutoff derivative not positive below 1 - eps")


def suspension_family(family: GenFunFamily, times=None) -> GenFunFamily:
    """The shrink family from a catalog end state to a constant jet.

    Member t interpolates sigma_t = cushion + (1 - t) structure, so the
    t = 1 member is the 1-jet of the positive cushion constant and the
    time derivative -structure is nonzero at every interior critical
    point of every member.
    """
    Sig = getattr(family, "structure", None)
    cush = getattr(family, "cushion", None)
    if Sig is None or cush is None:
        raise FamilyError("family does not expose structure and cushion "
                          "profiles; cannot build a suspension family")
    Sig_q, Sig_xi = family.structure_grad
    cush_p = family.cushion_grad
    if times is None:
        times = np.linspace(0.0, 1.0, 9)

    fam = GenFunFamily(
        lambda t, q, xi: cush(xi) + (1.0 - t) * Sig(q, xi),
        times, n_base=family.n_base, base_periods=family.base_periods,
        fiber_signs=family.fiber_signs, n_fiber=family.n_fiber,
        box_radius=family.box_radius, support_radius=family.support_radius,
        sigma_t_grad=(lambda t, q, xi: (1.0 - t) * Sig_q(q, xi),
                      lambda t, q, xi: cush_p(xi) + (1.0 - t) * Sig_xi(q, xi)),
        dsigma_dt=lambda t, q, xi: -Sig(q, xi))
    fam.structure = Sig
    fam.cushion = cush
    fam.structure_grad = (Sig_q, Sig_xi)
    fam.cushion_grad = cush_p
    return fam


def suspend(family: GenFunFamily, chi=None, n=2, eps=0.1,
            n_x=33, x_period=2.2, n_base=None, n_fiber=None,
            const_tol=1e-5, value_tol=0.05, verify=True) -> QuadAtInfinityFn:
    """Extend the t = 0 member over an n-dimensional base.

    Returns S~((q, x), xi) = S_{chi(|x|^2)}(q, xi): the interesting
    member sits at x = 0, and past |x|^2 = 1 - eps the function is the
    1-jet of the positive constant C of the t = 1 member, so every
    nonconstant feature lives in a compact window K.  Verifies that all
    critical points with value away from C sit at x = 0 to grid
    tolerance; a violation means the time derivative of the family
    vanished at an interior critical point and raises DegeneracyError.
    With ``verify=False`` the critical point audit is skipped, which is
    useful when a finer grid is wanted for persistence alone.
    """
    if int(n) < 2:
        raise FamilyError("target base dimension must be at least 2")
    n = int(n)
    if chi is None:
        chi = default_cutoff(eps)
    _check_cutoff(chi, eps)

    end = family.member_fn(1.0)
    fr = front_from_genfun(end, n_out=1024, front_tol=1e-2)
    C = float(np.mean(fr.u))
    if C <= 0.0 or np.abs(fr.u - C).max() > const_tol \
            or np.abs(fr.p).max() > const_tol:
        raise FamilyError("family member at t = 1 is not the 1-jet of a "
                          "positive constant")

    if x_period ** 2 / 4.0 <= 1.0 - eps:
        raise FamilyError("x period too small for the constant collar")
    if len(family.n_base) != 1:
        raise FamilyError("suspension expects a one-dimensional base family")
    nq = family.n_base[0] if n_base is None else n_base
    shape_base = (nq,) + (n_x,) * (n - 1)
    periods = (TWO_PI,) + (float(x_period),) * (n - 1)

    def radius2(xs):
        r2 = 0.0
        for x in xs:
            xw = np.mod(np.asarray(x, dtype=float) + x_period / 2.0,
                        x_period) - x_period / 2.0
            r2 = r2 + xw * xw
        return r2

    def sigma(q, *rest):
        xs, xi = rest[:-1], rest[-1]
        return family.sigma_t(chi(radius2(xs)), q, xi)

    grads = None
    if family.sigma_t_grad is not None and family.dsigma_dt is not None:
        gq, gxi = family.sigma_t_grad
        ham = family.dsigma_dt

        def grad_q(q, *rest):
            xs, xi = rest[:-1], rest[-1]
            return gq(chi(radius2(xs)), q, xi)

        def grad_xi(q, *rest):
            xs, xi = rest[:-1], rest[-1]
            return gxi(chi(radius2(xs)), q, xi)

        def make_grad_x(j):
            def grad_x(q, *rest):
                xs, xi = rest[:-1], rest[-1]
                r2 = radius2(xs)
                xw = np.mod(np.asarray(xs[j], dtype=float) + x_period / 2.0,
                            x_period) - x_period / 2.0
                return (ham(chi(r2), q, xi) * chi.derivative(r2) * 2.0 * xw)
            return grad_x

        grads = ([grad_q] + [make_grad_x(j) for j in range(n - 1)]
                 + [grad_xi])

    S = QuadAtInfinityFn(sigma, n_base=shape_base, base_periods=periods,
                         fiber_signs=family.fiber_signs,
                         n_fiber=family.n_fiber if n_fiber is None
                         else tuple(n_fiber),
                         box_radius=family.box_radius,
                         support_radius=family.support_radius,
                         sigma_grad=grads)

    if not verify:
        S.suspension = {"constant": C, "critical_points": None,
                        "window_critical_points": None, "x_tol": None}
        return S

    cps = critical_points(S)
    steps = S.grid_steps()
    x_tol = 3.0 * max(steps[1:n])
    in_k = [c for c in cps if abs(c.value - C) > value_tol]
    bad = []
    for c in in_k:
        for j in range(1, n):
            xw = np.mod(c.location[j] + x_period / 2.0,
                        x_period) - x_period / 2.0
            if abs(xw) > x_tol:
                bad.append(c)
                break
    if bad:
        raise DegeneracyError(
            "suspension degeneracy: %d critical point(s) off the x = 0 "
            "slice (family time derivative vanished at an interior "
            "critical point), worst at %s" % (len(bad), bad[0].location,))
    S.suspension = {"constant": C, "critical_points": cps,
                    "window_critical_points": in_k, "x_tol": x_tol}
    return S


# ---------------------------------------------------------------------------
# catalogs

# shared reveal machinery: a cushion lifts the whole front while tongue
# structures grow in from the top of the fiber box behind a moving
# frontier, so the time derivative keeps a positive floor on the support
_CUSHION_C = 0.8
_SUPPORT_R = 3.8
_REVEAL_W = 0.5
_SCHED_RAMP = 0.12
_FRONTIER = 4.1

CATALOG_FIG1_PARAMS = {
    "cushion": _CUSHION_C, "profile_offset": 1.5, "profile_tilt": 0.15,
    "slope": 0.8, "ridge_width": 0.55, "ridge_base": np.pi + 1.0,
    "ridge_top": 2.9, "dip_center": 1.8, "dip_width": 0.4,
    "dip_depth": 2.515, "reveal_width": _REVEAL_W,
    "schedule_ramp": _SCHED_RAMP, "support_radius": _SUPPORT_R,
}

CATALOG_FIG2_PARAMS = {
    "cushion": _CUSHION_C, "profile_offset": 1.5, "profile_tilt": 0.15,
    "slope": 0.62, "ridge_top": 2.6,
    "dip_ridge_base": 5.8, "dip_ridge_width": 0.42,
    "dip_center": 1.8, "dip_width": 0.4, "dip_depth": 2.55,
    "twin_base": 2.9, "twin_width": 0.40, "twin_gap": 0.20,
    "twin_bulge": 0.0398, "bulge_center": 1.9, "bulge_width": 0.30,
    "reveal_width": _REVEAL_W, "schedule_ramp": _SCHED_RAMP,
    "support_radius": _SUPPORT_R,
}


def _cushion(xi):
    return _CUSHION_C * _bump(np.asarray(xi, dtype=float) / _SUPPORT_R)


def _cushion_p(xi):
    return _CUSHION_C * _bump_p(np.asarray(xi, dtype=float)
                                / _SUPPORT_R) / _SUPPORT_R


def _sstep_int(s):
    """Integral of the quintic step over [0, s], for s in [0, 1]."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return s**4 * (2.5 - 3.0 * s + s * s)


def _tau(t):
    # trapezoid speed profile: smooth ramps of width _SCHED_RAMP at both
    # ends, constant frontier speed between them; a near-uniform sweep
    # keeps the motion of tracked front samples close to quadratic in t
    t = np.asarray(t, dtype=float)
    r = _SCHED_RAMP
    v = 1.0 / (1.0 - r)
    up = r * _sstep_int(np.minimum(t, r) / r)
    lin = np.clip(t, r, 1.0 - r) - r
    down = np.where(t > 1.0 - r,
                    r * (0.5 - _sstep_int((1.0 - t) / r)), 0.0)
    return np.clip(v * (up + lin + down), 0.0, 1.0)


def _tau_p(t):
    t = np.asarray(t, dtype=float)
    r = _SCHED_RAMP
    v = 1.0 / (1.0 - r)
    speed = np.where(t < r, _sstep(t / r),
                     np.where(t > 1.0 - r, _sstep((1.0 - t) / r), 1.0))
    return v * speed


# heights fed to the frontier comparison are folded to |xi| (smoothed),
# so the reveal spreads outward from the strand at xi = 0 and the tongue
# foot below it can never be exposed ahead of its neck (which would
# detach a foot ring from the front)
_SOFT_D = 0.3


def _soft(xi):
    xi = np.asarray(xi, dtype=float)
    return np.sqrt(xi * xi + _SOFT_D * _SOFT_D)


def _soft_p(xi):
    xi = np.asarray(xi, dtype=float)
    return xi / np.sqrt(xi * xi + _SOFT_D * _SOFT_D)


def _reveal(xi, t):
    return _sstep((_tau(t) * _FRONTIER - _soft(xi)) / _REVEAL_W)


def _reveal_xi(xi, t):
    return (-_sstep_p((_tau(t) * _FRONTIER - _soft(xi)) / _REVEAL_W)
            * _soft_p(xi) / _REVEAL_W)


def _reveal_t(xi, t):
    return (_sstep_p((_tau(t) * _FRONTIER - _soft(xi)) / _REVEAL_W)
            * _FRONTIER * _tau_p(t) / _REVEAL_W)


def _taper(xi_top):
    def T(xi):
        return _sstep((xi + 0.7) / 0.5) * _sstep((xi_top + 0.7 - xi) / 0.7)

    def T_p(xi):
        return (_sstep_p((xi + 0.7) / 0.5) / 0.5
                * _sstep((xi_top + 0.7 - xi) / 0.7)
                - _sstep((xi + 0.7) / 0.5)
                * _sstep_p((xi_top + 0.7 - xi) / 0.7) / 0.7)

    return T, T_p


def _dip_ridge(q0, slope, width, xi_top, dip_depth, dip_center, dip_width,
               offset=1.5, tilt=0.15):
    """A tilted ridge with a crest dip; tongue of the wavefront."""
    T, T_p = _taper(xi_top)

    def prof(xi):
        return (xi * xi + offset + tilt * (xi - 1.3)
                - dip_depth * np.exp(-((xi - dip_center) / dip_width) ** 2))

    def prof_p(xi):
        return (2.0 * xi + tilt
                + dip_depth * 2.0 * (xi - dip_center) / dip_width ** 2
                * np.exp(-((xi - dip_center) / dip_width) ** 2))

    def Sig(q, xi):
        dq = _wrap_pi(q - q0 + slope * xi)
        return prof(xi) * T(xi) * _bump(dq / width)

    def Sig_q(q, xi):
        dq = _wrap_pi(q - q0 + slope * xi)
        return prof(xi) * T(xi) * _bump_p(dq / width) / width

    def Sig_xi(q, xi):
        dq = _wrap_pi(q - q0 + slope * xi)
        b = _bump(dq / width)
        return (prof_p(xi) * T(xi) * b + prof(xi) * T_p(xi) * b
                + prof(xi) * T(xi) * _bump_p(dq / width) * slope / width)

    return Sig, Sig_q, Sig_xi


def _twin_ridge(q0, slope, width, gap, bulge, bulge_center, bulge_width,
                xi_top, offset=1.5, tilt=0.15):
    """Two parallel dip-free ridges whose separation bulges with xi.

    The valley floor between them dips below zero exactly where the
    ridges bulge apart, producing one nondegenerate minimum without any
    structure that would have to be carved in mid-reveal.
    """
    T, T_p = _taper(xi_top)

    def prof(xi):
        return xi * xi + offset + tilt * (xi - 1.3)

    def prof_p(xi):
        return 2.0 * xi + tilt

    def sep(xi):
        return gap + bulge * np.exp(-((xi - bulge_center) / bulge_width) ** 2)

    def sep_p(xi):
        return (-bulge * 2.0 * (xi - bulge_center) / bulge_width ** 2
                * np.exp(-((xi - bulge_center) / bulge_width) ** 2))

    def Sig(q, xi):
        dq = _wrap_pi(q - q0 + slope * xi)
        s = sep(xi)
        return prof(xi) * T(xi) * (_bump((dq - s) / width)
                                   + _bump((dq + s) / width))

    def Sig_q(q, xi):
        dq = _wrap_pi(q - q0 + slope * xi)
        s = sep(xi)
        return prof(xi) * T(xi) * (_bump_p((dq - s) / width)
                                   + _bump_p((dq + s) / width)) / width

    def Sig_xi(q, xi):
        dq = _wrap_pi(q - q0 + slope * xi)
        s = sep(xi)
        sp = sep_p(xi)
        b = _bump((dq - s) / width) + _bump((dq + s) / width)
        return (prof_p(xi) * T(xi) * b + prof(xi) * T_p(xi) * b
                + prof(xi) * T(xi)
                * (_bump_p((dq - s) / width) * (slope - sp)
                   + _bump_p((dq + s) / width) * (slope + sp)) / width)

    return Sig, Sig_q, Sig_xi


def _sum_structures(parts):
    sigs = [p[0] for p in parts]
    gqs = [p[1] for p in parts]
    gxis = [p[2] for p in parts]

    def Sig(q, xi):
        return sum(s(q, xi) for s in sigs)

    def Sig_q(q, xi):
        return sum(g(q, xi) for g in gqs)

    def Sig_xi(q, xi):
        return sum(g(q, xi) for g in gxis)

    return Sig, Sig_q, Sig_xi


def _reveal_family(Sig, Sig_q, Sig_xi, times, n_base, n_fiber):
    def sigma_t(t, q, xi):
        return (np.asarray(t, dtype=float) * _cushion(xi)
                + Sig(q, xi) * _reveal(xi, t))

    def grad_q(t, q, xi):
        return Sig_q(q, xi) * _reveal(xi, t)

    def grad_xi(t, q, xi):
        return (np.asarray(t, dtype=float) * _cushion_p(xi)
                + Sig_xi(q, xi) * _reveal(xi, t)
                + Sig(q, xi) * _reveal_xi(xi, t))

    def ham(t, q, xi):
        return _cushion(xi) + Sig(q, xi) * _reveal_t(xi, t)

    fam = GenFunFamily(sigma_t, times, n_base=(n_base,), fiber_signs=(-1,),
                       n_fiber=(n_fiber,), box_radius=4.0,
                       support_radius=_SUPPORT_R,
                       sigma_t_grad=(grad_q, grad_xi), dsigma_dt=ham)
    fam.structure = Sig
    fam.cushion = _cushion
    fam.structure_grad = (Sig_q, Sig_xi)
    fam.cushion_grad = _cushion_p
    return fam


def _extract_frames(fam, n_out, front_tol, frame_base=512, substeps=8):
    """Material frames: project locus samples backward along t.

    The final member's critical locus is traced and resampled with
    extra weight where the slope turns quickly, then carried to each
    earlier member by advecting along the normal velocity field of the
    moving locus, with Newton projection as a drift corrector.  Normal
    motion makes the material finite differences of contact_pairing
    approximate the contact Hamiltonian, keeps each track on its own
    sheet when a fold sweeps past (nearest-point projection alone can
    snap across the fold), and arcs only contract going backward, so
    the sampling density of every earlier frame is at least that of
    the final one.
    """
    from .genfun import _marching_loops
    gq_fn, gxi_fn = fam.sigma_t_grad

    def locus_g(t, q, xi):
        return gxi_fn(t, q, xi) - 2.0 * xi

    _FD = 1e-5

    def grad_g(t, q, xi, g0):
        # forward differences sharing the center value; the gradient
        # only steers Newton and the advection, so first order is fine
        g_q = (locus_g(t, q + _FD, xi) - g0) / _FD
        g_xi = (locus_g(t, q, xi + _FD) - g0) / _FD
        return g_q, g_xi

    def velocity(t, q, xi):
        g0 = locus_g(t, q, xi)
        g_t = (locus_g(t + _FD, q, xi) - g0) / _FD
        g_q, g_xi = grad_g(t, q, xi, g0)
        norm2 = np.maximum(g_q**2 + g_xi**2, 1e-8)
        return -g_t * g_q / norm2, -g_t * g_xi / norm2

    def project(t, q, xi, rounds=20, clamp=0.05):
        for _ in range(rounds):
            g = locus_g(t, q, xi)
            if np.abs(g).max() < 1e-10:
                break
            g_q, g_xi = grad_g(t, q, xi, g)
            norm2 = np.maximum(g_q**2 + g_xi**2, 1e-8)
            dq = g * g_q / norm2
            dxi = g * g_xi / norm2
            step = np.hypot(dq, dxi)
            f = np.where(step > clamp, clamp / np.maximum(step, 1e-300), 1.0)
            q = q - f * dq
            xi = xi - f * dxi
        return q, xi

    def advect(t_from, t_to, q, xi):
        """One midpoint step of the normal motion, then reprojection."""
        dt = t_to - t_from
        vq, vxi = velocity(t_from, q, xi)
        qm = q + 0.5 * dt * vq
        xim = xi + 0.5 * dt * vxi
        vq, vxi = velocity(t_from + 0.5 * dt, qm, xim)
        moved = float(np.hypot(dt * vq, dt * vxi).max())
        q, xi = project(t_to, q + dt * vq, xi + dt * vxi)
        return q, xi, moved

    times = np.asarray(fam.times, dtype=float)
    t_end = float(times[-1])
    S1 = fam.member_fn(t_end, n_base=(frame_base,),
                       n_fiber=(frame_base + 1,))
    q_axis = S1.base_axes()[0]
    xi_axis = S1.fiber_axes()[0]
    mesh = np.meshgrid(q_axis, xi_axis, indexing="ij", sparse=True)
    G = np.broadcast_to(S1.gradient(*mesh)[1],
                        (len(q_axis), len(xi_axis))).astype(float)
    loops = _marching_loops(G, q_axis, xi_axis, TWO_PI)
    if len(loops) != 1:
        raise FamilyError(
            "final locus has %d closed components, expected 1" % len(loops))
    pts = loops[0]

    def closed_dq(points):
        dq = np.diff(np.concatenate([points[:, 0], points[:1, 0]]))
        return np.mod(dq + np.pi, TWO_PI) - np.pi

    degree = int(round(closed_dq(pts).sum() / TWO_PI))
    if degree < 0:
        pts = pts[::-1].copy()
        degree = -degree
    start = int(np.argmin(np.abs(np.mod(pts[:, 0] + np.pi, TWO_PI) - np.pi)
                          + 0.01 * np.abs(pts[:, 1])))
    pts = np.roll(pts, -start, axis=0)

    dq = closed_dq(pts)
    dxi = np.diff(np.concatenate([pts[:, 1], pts[:1, 1]]))
    p_raw = gq_fn(t_end, pts[:, 0], pts[:, 1])
    dp = np.diff(np.concatenate([p_raw, p_raw[:1]]))
    seg = np.hypot(dq, dxi) + np.abs(dp)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    q_open = np.unwrap(pts[:, 0], period=TWO_PI)
    q_l = np.concatenate([q_open, [q_open[0] + TWO_PI * degree]])
    xi_c = np.concatenate([pts[:, 1], pts[:1, 1]])

    def place(s_new):
        q = np.interp(s_new, s, q_l)
        xi = np.interp(s_new, s, xi_c)
        return project(t_end, q, xi)

    def sweep(q, xi, on_frame):
        on_frame(len(times) - 1, q, xi)
        for j in range(len(times) - 2, -1, -1):
            # substeps scale with the interval span, so refined frame
            # grids do not multiply the tracking work
            sub = max(1, int(np.ceil(
                abs(times[j + 1] - times[j]) / 0.05 * substeps)))
            while True:
                qj, xij = q, xi
                worst = 0.0
                for k in range(sub):
                    span = times[j] - times[j + 1]
                    t_a = times[j + 1] + span * k / sub
                    t_b = times[j + 1] + span * (k + 1) / sub
                    qj, xij, moved = advect(t_a, t_b, qj, xij)
                    worst = max(worst, moved)
                res = np.abs(locus_g(times[j], qj, xij)).max()
                if res <= 1e-7 and worst <= 0.1:
                    break
                if sub >= 256:
                    raise FamilyError(
                        "frame tracking lost the critical locus at t = %.4f "
                        "(residual %.2e, step %.2f)" % (times[j], res, worst))
                sub *= 2
            q, xi = qj, xij
            on_frame(j, q, xi)

    # pilot pass: a coarse track records the largest segment size any
    # frame attains, so the real pass can put samples where intermediate
    # members need them (walls that steepen mid-isotopy are invisible in
    # the final curve alone)
    n_pilot = min(max(2048, n_out // 4), n_out)
    s_pilot = np.linspace(0.0, s[-1], n_pilot, endpoint=False)
    q0, xi0 = place(s_pilot)
    need = np.zeros(n_pilot)

    def record(j, q, xi):
        t = times[j]
        p = gq_fn(t, q, xi)
        dq = np.mod(np.diff(np.concatenate([q, q[:1]])) + np.pi,
                    TWO_PI) - np.pi
        dxi = np.diff(np.concatenate([xi, xi[:1]]))
        dp = np.diff(np.concatenate([p, p[:1]]))
        np.maximum(need, np.hypot(dq, dxi) + np.abs(dp), out=need)

    sweep(q0, xi0, record)

    w = np.concatenate([[0.0], np.cumsum(need)])
    s_grid = np.concatenate([s_pilot, [s[-1]]])
    s_new = np.interp(np.linspace(0.0, w[-1], n_out, endpoint=False),
                      w, s_grid)
    q, xi = place(s_new)

    def to_curve(t, q, xi):
        p = gq_fn(t, q, xi)
        u = fam.sigma_t(t, q, xi) - xi * xi
        return LegendrianCurve(np.mod(q, TWO_PI), p, u,
                               legendrian_tol=front_tol)

    frames = [None] * len(times)

    def keep(j, q, xi):
        frames[j] = to_curve(times[j], q, xi)

    sweep(q, xi, keep)
    return IsotopyFrames(times.copy(), frames)


def _refined_times(n_times, windows=()):
    """Uniform frame times plus locally refined windows (a, b, dt)."""
    parts = [np.linspace(0.0, 1.0, n_times)]
    for a, b, dt in windows:
        parts.append(np.arange(a, b + 0.5 * dt, dt))
    t = np.unique(np.round(np.concatenate(parts), 9))
    return np.clip(t, 0.0, 1.0)


def catalog_fig1(n_times=21, n_base=256, n_fiber=257, n_out=8192,
                 front_tol=3e-2, frame_base=512):
    """Frozen positive isotopy ending with one negative critical value.

    A single tilted tongue with a crest dip grows behind the reveal
    frontier over a cushion lift; the final front has winding -1 and one
    transverse critical point below the zero level.
    """
    p = CATALOG_FIG1_PARAMS
    Sig, Sig_q, Sig_xi = _dip_ridge(
        p["ridge_base"], p["slope"], p["ridge_width"], p["ridge_top"],
        p["dip_depth"], p["dip_center"], p["dip_width"],
        offset=p["profile_offset"], tilt=p["profile_tilt"])
    fam = _reveal_family(Sig, Sig_q, Sig_xi,
                         np.linspace(0.0, 1.0, n_times), n_base, n_fiber)
    fam.frozen = dict(p)
    frames = _extract_frames(fam, n_out, front_tol, frame_base=frame_base)
    return frames, fam


def catalog_fig2(n_times=21, n_base=256, n_fiber=257, n_out=32768,
                 front_tol=4e-2, frame_base=1024):
    """Frozen positive isotopy with two equal negative critical values.

    Two tongues: a dip ridge as in the first catalog and a pair of
    parallel ridges whose bulging separation sinks the valley between
    them.  The final front has winding 0 and exactly two transverse
    critical points at the same negative value.
    """
    p = CATALOG_FIG2_PARAMS
    ridge = _dip_ridge(
        p["dip_ridge_base"], p["slope"], p["dip_ridge_width"], p["ridge_top"],
        p["dip_depth"], p["dip_center"], p["dip_width"],
        offset=p["profile_offset"], tilt=p["profile_tilt"])
    twin = _twin_ridge(
        p["twin_base"], p["slope"], p["twin_width"], p["twin_gap"],
        p["twin_bulge"], p["bulge_center"], p["bulge_width"], p["ridge_top"],
        offset=p["profile_offset"], tilt=p["profile_tilt"])
    Sig, Sig_q, Sig_xi = _sum_structures([ridge, twin])
    # the twin valley deepens fastest around t = 0.7; frames are packed
    # there so the finite differences of contact_pairing resolve the
    # wall sweep (the Hamiltonian itself stays positive throughout)
    times = _refined_times(n_times, windows=((0.55, 0.80, 0.0125),
                                             (0.665, 0.75, 0.0025)))
    fam = _reveal_family(Sig, Sig_q, Sig_xi, times, n_base, n_fiber)
    fam.frozen = dict(p)
    frames = _extract_frames(fam, n_out, front_tol, frame_base=frame_base)
    return frames, fam
