"""Co-sphere bundle of Euclidean space as the 1-jet bundle of the sphere.

The identification sends a contact element (x, q) with footpoint x and
unit conormal q to the triple (q, tangential part of x at q, <x, q>).
Covectors are stored as their Riesz vector representatives under the
standard scalar product, so no separate covector type is needed.  For
the plane this yields wavefront drawings: a Legendrian curve in jet
coordinates over the circle of directions becomes a co-oriented front
in R^2, rendered here as deterministic SVG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jetcurves import LegendrianCurve

TWO_PI = 2.0 * np.pi

UNIT_TOL = 1e-12


class HodographError(ValueError):
    """Invalid contact element or unsupported rendering input."""


@dataclass(frozen=True)
class CoSphereElement:
    """A contact element of R^n: footpoint x and unit conormal q."""

    x: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if x.shape != q.shape or x.ndim != 1 or len(x) < 2:
            raise HodographError("x and q must be equal-length vectors, "
                                 "dimension at least 2")
        if abs(np.linalg.norm(q) - 1.0) > UNIT_TOL:
            raise HodographError("conormal direction is not a unit vector")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "q", q)

    @property
    def dim(self) -> int:
        return len(self.x)


def hodograph_forward(e: CoSphereElement):
    """Jet coordinates (q, p, u) of a contact element.

    u = <x, q> and p is the tangential projection of x at q, the Riesz
    representative of <x, .> restricted to the sphere's tangent space.
    The fiber over the origin lands on the zero section.
    """
    u = float(np.dot(e.x, e.q))
    p = e.x - u * e.q
    return e.q.copy(), p, u


def hodograph_inverse(q, p, u) -> CoSphereElement:
    """Contact element with footpoint x = u q + p and conormal q."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if abs(float(np.dot(p, q))) > 1e-9 * max(1.0, float(np.linalg.norm(p))):
        raise HodographError("p must be tangent to the sphere at q")
    return CoSphereElement(float(u) * q + p, q)


def sky_of_point(x, theta):
    """Jet data of the sky of a plane point: u(theta) = <x, q(theta)>.

    Closed form for n = 2; the sky of a point is the 1-jet graph of its
    support function, and the whole front collapses back onto the point.
    """
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    u = x[0] * np.cos(theta) + x[1] * np.sin(theta)
    p = -x[0] * np.sin(theta) + x[1] * np.cos(theta)
    return p, u


# ---------------------------------------------------------------------------
# transport between jet curves over the circle and plane fronts

def curve_to_plane(curve: LegendrianCurve):
    """Front points and conormals of a jet curve over the circle.

    Returns (x, q): arrays of shape (m, 2) with x = u q + p t, where
    (q, t) is the angular frame at base angle theta = curve.q.
    """
    th = np.asarray(curve.q, dtype=float)
    c, s = np.cos(th), np.sin(th)
    q = np.stack([c, s], axis=1)
    t = np.stack([-s, c], axis=1)
    x = curve.u[:, None] * q + curve.p[:, None] * t
    return x, q


def curve_from_plane(x, q, legendrian_tol=0.1) -> LegendrianCurve:
    """Jet curve over the circle from front points with unit conormals."""
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2 or x.shape != q.shape:
        raise HodographError("expected (m, 2) arrays of points and conormals")
    norms = np.linalg.norm(q, axis=1)
    if np.abs(norms - 1.0).max() > UNIT_TOL:
        raise HodographError("conormal directions are not unit vectors")
    th = np.mod(np.arctan2(q[:, 1], q[:, 0]), TWO_PI)
    u = np.einsum("ij,ij->i", x, q)
    p = -x[:, 0] * q[:, 1] + x[:, 1] * q[:, 0]
    return LegendrianCurve(th, p, u, legendrian_tol=legendrian_tol)


def plane_pairing(x, q) -> np.ndarray:
    """Discrete contact pairing <dx, q> along a closed plane front.

    Vanishes along the image of any Legendrian jet curve up to the jet
    residual plus a second-order discretization term; the front moves
    only tangentially, never along its own conormal.
    """
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    dx = np.roll(x, -1, axis=0) - x
    q_mid = 0.5 * (np.roll(q, -1, axis=0) + q)
    return np.einsum("ij,ij->i", dx, q_mid)


# ---------------------------------------------------------------------------
# front geometry in the plane

def front_cusps(curve: LegendrianCurve) -> np.ndarray:
    """Sample indices where the plane front's velocity changes sign.

    Parameterized by s, the front velocity is (u dtheta/ds + dp/ds) t;
    a cusp is a sign change of that scalar factor.
    """
    th = np.asarray(curve.q, dtype=float)
    if len(th) < 4:
        return np.array([], dtype=int)
    dth = np.mod(np.roll(th, -1) - th + np.pi, TWO_PI) - np.pi
    dp = np.roll(curve.p, -1) - curve.p
    speed = 0.5 * (curve.u + np.roll(curve.u, -1)) * dth + dp
    sign = np.sign(speed)
    flips = np.nonzero(sign * np.roll(sign, 1) < 0)[0]
    return flips


def antipodal_tangency(curve: LegendrianCurve, tol=1e-6, window=0.2):
    """Index of a front point revisited with the opposite co-orientation.

    Looks for sample pairs whose base angles differ by pi and whose
    front points coincide; at such a point the front is tangent to the
    oppositely co-oriented branch.  Returns None when no pair matches.
    """
    th = np.asarray(curve.q, dtype=float)
    x, _ = curve_to_plane(curve)
    n = len(th)
    best = (np.inf, None)
    order = np.argsort(th)
    th_sorted = th[order]
    for i in range(n):
        target = np.mod(th[i] + np.pi, TWO_PI)
        lo = np.searchsorted(th_sorted, target - window)
        hi = np.searchsorted(th_sorted, target + window)
        cand = order[lo:hi]
        if target - window < 0.0:
            cand = np.concatenate([cand, order[np.searchsorted(
                th_sorted, target - window + TWO_PI):]])
        if target + window > TWO_PI:
            cand = np.concatenate([cand, order[:np.searchsorted(
                th_sorted, target + window - TWO_PI)]])
        if len(cand) == 0:
            continue
        d = np.linalg.norm(x[cand] - x[i], axis=1)
        j = int(np.argmin(d))
        if d[j] < best[0]:
            best = (float(d[j]), i)
    if best[1] is None or best[0] > tol:
        return None
    return best[1]


# ---------------------------------------------------------------------------
# rendering

_F = "%.12g"


def _fmt(v) -> str:
    s = _F % float(v)
    return "0" if s == "-0" else s


def _polyline(points, attrs) -> str:
    coords = " ".join("%s,%s" % (_fmt(px), _fmt(py)) for px, py in points)
    return '<polyline points="%s" %s/>' % (coords, attrs)


def render_front(curve: LegendrianCurve, out=None, target="plane",
                 tick_every=64, cusp_tol=None) -> str:
    """Deterministic SVG drawing of a jet curve's wavefront.

    ``target="plane"`` draws the co-oriented front in R^2 with cusp
    markers, co-orientation ticks, a black dot for the fiber over the
    origin and a white dot at an antipodal tangency when one exists.
    ``target="jet"`` draws the (base angle, u) profile on the cylinder.
    Floats are printed with 12 significant digits and no timestamps, so
    identical input yields byte-identical output.
    """
    if target not in ("plane", "jet"):
        raise HodographError("unknown render target %r" % (target,))
    if np.asarray(curve.q).ndim != 1:
        raise HodographError("only planar fronts (curves over the circle) "
                             "can be rendered")

    if target == "jet":
        pts = np.stack([np.asarray(curve.q, dtype=float),
                        -np.asarray(curve.u, dtype=float)], axis=1)
        body = [_polyline(pts, 'fill="none" stroke="black" '
                          'stroke-width="0.01"')]
        lo = pts.min(axis=0) - 0.2
        hi = pts.max(axis=0) + 0.2
    else:
        x, q = curve_to_plane(curve)
        flip = np.stack([x[:, 0], -x[:, 1]], axis=1)
        qf = np.stack([q[:, 0], -q[:, 1]], axis=1)
        closed = np.concatenate([flip, flip[:1]], axis=0)
        span = float(np.ptp(closed, axis=0).max()) or 1.0
        body = [_polyline(closed, 'fill="none" stroke="black" '
                          'stroke-width="%s"' % _fmt(0.006 * span))]
        tick = 0.05 * span
        for i in range(0, len(flip), max(1, tick_every)):
            a = flip[i]
            b = flip[i] + tick * qf[i]
            body.append('<line x1="%s" y1="%s" x2="%s" y2="%s" '
                        'stroke="gray" stroke-width="%s"/>'
                        % (_fmt(a[0]), _fmt(a[1]), _fmt(b[0]), _fmt(b[1]),
                           _fmt(0.004 * span)))
        for i in front_cusps(curve):
            body.append('<circle cx="%s" cy="%s" r="%s" fill="black"/>'
                        % (_fmt(flip[i, 0]), _fmt(flip[i, 1]),
                           _fmt(0.012 * span)))
        body.append('<circle cx="0" cy="0" r="%s" fill="black"/>'
                    % _fmt(0.015 * span))
        white = antipodal_tangency(curve, tol=1e-4 * span)
        if white is not None:
            body.append('<circle cx="%s" cy="%s" r="%s" fill="white" '
                        'stroke="black" stroke-width="%s"/>'
                        % (_fmt(flip[white, 0]), _fmt(flip[white, 1]),
                           _fmt(0.015 * span), _fmt(0.004 * span)))
        stack = np.concatenate([closed, [[0.0, 0.0]]], axis=0)
        lo = stack.min(axis=0) - 0.1 * span
        hi = stack.max(axis=0) + 0.1 * span

    svg = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="%s %s %s %s">'
           % (_fmt(lo[0]), _fmt(lo[1]), _fmt(hi[0] - lo[0]),
              _fmt(hi[1] - lo[1]))]
    svg.extend(body)
    svg.append("</svg>")
    text = "\n".join(svg) + "\n"
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return text
