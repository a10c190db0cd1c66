"""Legendrian curves in the 1-jet space of the circle and their isotopies.

Curves are closed sampled polylines (q, p, u) with q an angle.  The
discrete Legendrian condition du = p dq is certified per segment with the
midpoint momentum, so the residual shrinks at least first order under
refinement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

DEFAULT_LEGENDRIAN_TOL = 1e-6
MIN_SAMPLES = 16


class CurveError(ValueError):
    """Invalid curve or frame data."""


class ProximityError(CurveError):
    """Curve too close to the zero section for the requested invariant."""


class UndersamplingError(CurveError):
    """Sampling too coarse for a reliable degree computation."""


@dataclass(frozen=True)
class JetPoint:
    q: float  # base angle, stored in [0, 2*pi)
    p: float
    u: float

    def __post_init__(self):
        object.__setattr__(self, "q", float(np.mod(self.q, TWO_PI)))


def _unwrap_closed(q):
    """Lift of a closed angle sequence; returns (lift, winding degree)."""
    dq = np.diff(np.concatenate([q, q[:1]]))
    dq = np.mod(dq + np.pi, TWO_PI) - np.pi
    lift = q[0] + np.concatenate([[0.0], np.cumsum(dq[:-1])])
    degree = int(np.round(np.sum(dq) / TWO_PI))
    return lift, degree


class LegendrianCurve:
    """Closed sampled Legendrian curve over the circle."""

    def __init__(self, q, p, u, legendrian_tol=DEFAULT_LEGENDRIAN_TOL,
                 lift_floors=None, wrap_crossings=0, quotient_period=None):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        u = np.asarray(u, dtype=float)
        if not (q.shape == p.shape == u.shape) or q.ndim != 1:
            raise CurveError("q, p, u must be 1-d arrays of equal length")
        if len(q) < MIN_SAMPLES:
            raise CurveError(
                "need at least %d samples, got %d" % (MIN_SAMPLES, len(q)))
        self.q = np.mod(q, TWO_PI)
        self.p = p
        self.u = u
        self.legendrian_tol = float(legendrian_tol)
        self.q_lift, self.lift_degree = _unwrap_closed(self.q)
        # quotient bookkeeping, see quotient_project
        self.lift_floors = lift_floors
        self.wrap_crossings = int(wrap_crossings)
        self.quotient_period = quotient_period
        res, bound = self._residuals()
        bad = res > bound
        if np.any(bad):
            i = int(np.argmax(res - bound))
            raise CurveError(
                "discrete Legendrian condition fails at segment %d: "
                "|du - p dq| = %.3e > %.3e" % (i, res[i], bound[i]))
        self.q.setflags(write=False)
        self.p.setflags(write=False)
        self.u.setflags(write=False)

    def __len__(self):
        return len(self.q)

    def _residuals(self):
        dq = np.diff(np.concatenate([self.q_lift,
                                     [self.q_lift[0]
                                      + TWO_PI * self.lift_degree]]))
        u = self.u
        if self.lift_floors is not None and self.quotient_period:
            u = u + self.lift_floors * self.quotient_period
        du = np.diff(np.concatenate([u, u[:1]]))
        pbar = 0.5 * (self.p + np.roll(self.p, -1))
        res = np.abs(du - pbar * dq)
        size = np.abs(dq) + np.abs(du)
        # near cusps both dq and du vanish while the midpoint residual
        # stays finite, so the relative bound gets a floor at a tenth of
        # the mean segment size
        bound = self.legendrian_tol * (size + 0.1 * size.mean())
        return res, bound

    def legendrian_residual(self) -> float:
        return float(self._residuals()[0].max())

    @property
    def samples(self) -> list[JetPoint]:
        return [JetPoint(float(a), float(b), float(c))
                for a, b, c in zip(self.q, self.p, self.u)]

    def to_json(self) -> dict:
        return {"samples": [[float(a), float(b), float(c)]
                            for a, b, c in zip(self.q, self.p, self.u)]}

    @staticmethod
    def from_json(obj, legendrian_tol=DEFAULT_LEGENDRIAN_TOL):
        arr = np.asarray(obj["samples"], dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise CurveError("samples must be a list of [q, p, u] triples")
        return LegendrianCurve(arr[:, 0], arr[:, 1], arr[:, 2],
                               legendrian_tol=legendrian_tol)


def zero_section(n=2048) -> LegendrianCurve:
    q = np.linspace(0.0, TWO_PI, n, endpoint=False)
    return LegendrianCurve(q, np.zeros(n), np.zeros(n))


def jet_graph(f, fprime, n=2048, legendrian_tol=DEFAULT_LEGENDRIAN_TOL):
    """The 1-jet graph (q, f'(q), f(q)) of a function on the circle."""
    q = np.linspace(0.0, TWO_PI, n, endpoint=False)
    return LegendrianCurve(q, fprime(q), f(q), legendrian_tol=legendrian_tol)


def reeb_shift(curve: LegendrianCurve, s: float) -> LegendrianCurve:
    """Shift along the Reeb direction: u -> u + s."""
    return LegendrianCurve(curve.q, curve.p, curve.u + s,
                           legendrian_tol=curve.legendrian_tol)


def jet_shift(curve: LegendrianCurve, F, Fprime, s: float) -> LegendrianCurve:
    """Shift contact isotopy (q, p, u) -> (q, p + s F'(q), u + s F(q))."""
    return LegendrianCurve(curve.q, curve.p + s * Fprime(curve.q),
                           curve.u + s * F(curve.q),
                           legendrian_tol=2.0 * curve.legendrian_tol + 1e-12)


def quotient_project(curve: LegendrianCurve, period: float = 1.0):
    """Reduce u modulo the Reeb period, keeping lift data for unwrapping."""
    if period <= 0:
        raise ValueError("period must be positive")
    floors = np.floor(curve.u / period).astype(int)
    u_mod = curve.u - floors * period
    crossings = int(np.abs(np.diff(np.concatenate([floors,
                                                   floors[:1]]))).sum())
    return LegendrianCurve(curve.q, curve.p, u_mod,
                           legendrian_tol=curve.legendrian_tol,
                           lift_floors=floors, wrap_crossings=crossings,
                           quotient_period=period)


def winding_number(curve: LegendrianCurve, proximity_tol=1e-9,
                   residual_tol=0.1) -> int:
    """Degree of the (u, p)-projection of the curve around the origin."""
    r2 = curve.u**2 + curve.p**2
    if float(r2.min()) <= proximity_tol**2:
        raise ProximityError(
            "curve touches the zero section in the (u, p)-plane "
            "(min radius %.3e)" % float(np.sqrt(r2.min())))
    u1, p1 = curve.u, curve.p
    u2, p2 = np.roll(u1, -1), np.roll(p1, -1)
    dtheta = np.arctan2(u1 * p2 - p1 * u2, u1 * u2 + p1 * p2)
    total = float(dtheta.sum()) / TWO_PI
    deg = int(np.round(total))
    if abs(total - deg) > residual_tol:
        raise UndersamplingError(
            "winding residual %.3f exceeds %.3f; refine the sampling"
            % (abs(total - deg), residual_tol))
    return deg


@dataclass
class IsotopyFrames:
    """One-parameter family of curves with matched parametrization."""

    times: np.ndarray
    frames: list[LegendrianCurve]

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.frames) or len(self.times) < 2:
            raise CurveError("need matching times and frames, at least two")
        if self.times[0] != 0.0 or self.times[-1] != 1.0:
            raise CurveError("times must start at 0 and end at 1")
        if np.any(np.diff(self.times) <= 0):
            raise CurveError("times must be strictly increasing")
        n = len(self.frames[0])
        if any(len(fr) != n for fr in self.frames):
            raise CurveError("all frames must have the same sample count")

    def to_json(self) -> dict:
        return {"times": [float(t) for t in self.times],
                "frames": [fr.to_json() for fr in self.frames]}

    @staticmethod
    def from_json(obj, legendrian_tol=DEFAULT_LEGENDRIAN_TOL):
        frames = [LegendrianCurve.from_json(fr, legendrian_tol)
                  for fr in obj["frames"]]
        return IsotopyFrames(np.asarray(obj["times"], dtype=float), frames)


def contact_pairing(frames: IsotopyFrames) -> np.ndarray:
    """h(i, j) = du/dt - p dq/dt at sample i, time j.

    Time derivatives are centered finite differences (one-sided at the
    endpoints); the q-track of each material point is unwrapped in t.
    """
    t = frames.times
    qm = np.stack([fr.q for fr in frames.frames], axis=1)
    pm = np.stack([fr.p for fr in frames.frames], axis=1)
    um = np.stack([fr.u for fr in frames.frames], axis=1)
    qm = np.unwrap(qm, axis=1)
    qdot = np.gradient(qm, t, axis=1)
    udot = np.gradient(um, t, axis=1)
    return udot - pm * qdot


@dataclass(frozen=True)
class IsotopyClass:
    positivity: str  # "positive" | "nonnegative" | "neither"
    immersed: bool


def classify_isotopy(frames: IsotopyFrames, tol: float = 1e-9) -> IsotopyClass:
    """Positivity and immersion verdicts for a sampled Legendrian isotopy.

    Not immersed exactly at grid points where h vanishes to tolerance and
    is spatially critical along the curve (critical point with critical
    value zero).
    """
    h = contact_pairing(frames)
    hmin = float(h.min())
    if hmin > tol:
        positivity = "positive"
    elif hmin > -tol:
        positivity = "nonnegative"
    else:
        positivity = "neither"

    # spatial derivative of h along the curve (cyclic), per unit arclength
    qm = np.unwrap(np.stack([fr.q_lift for fr in frames.frames], axis=1),
                   axis=0)
    pm = np.stack([fr.p for fr in frames.frames], axis=1)
    um = np.stack([fr.u for fr in frames.frames], axis=1)
    ds = np.sqrt(np.gradient(qm, axis=0)**2 + np.gradient(pm, axis=0)**2
                 + np.gradient(um, axis=0)**2)
    ds = np.maximum(ds, 1e-12)
    dh = np.gradient(h, axis=0) / ds
    degenerate = (np.abs(h) <= tol) & (np.abs(dh) <= tol)
    return IsotopyClass(positivity, immersed=not bool(degenerate.any()))


def linear_isotopy(f, fprime, n=2048, n_times=9,
                   legendrian_tol=DEFAULT_LEGENDRIAN_TOL) -> IsotopyFrames:
    """The linear isotopy t -> j1(t f) from the zero section to j1(f)."""
    times = np.linspace(0.0, 1.0, n_times)
    frames = [jet_graph(lambda q, t=t: t * f(q),
                        lambda q, t=t: t * fprime(q), n=n,
                        legendrian_tol=legendrian_tol)
              for t in times]
    return IsotopyFrames(times, frames)
