"""Product spacetimes (M x R, -g + dt^2) over bumpy planes and spheres.

The base metrics are conformal to the Euclidean one, g = e^{2 phi} eucl:
Gaussian bumps on R^n act as scattering obstacles, and the round sphere
is covered by two stereographic charts with the same conformal form, so
one closed-form acceleration serves every case.  Null geodesics are
(beta(s), t0 +/- s) for unit-speed base geodesics beta; on top of the
integrator sit skies over Cauchy surfaces, causal classification of
sampled worldlines, the all-geodesics-return deviation, and the search
for deja vu moments along timelike curves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jetcurves import LegendrianCurve

TWO_PI = 2.0 * np.pi

MIN_SKY_DIRS = 64
CHART_SWITCH_RADIUS = 2.0
MIN_CONFORMAL_FACTOR = 0.1


class LorentzError(ValueError):
    """Invalid spacetime data or failed precondition."""


class DomainError(LorentzError):
    """Point outside the metric's working box."""


class SkyError(LorentzError):
    """Sky incomplete: some directions left the working box too early."""


# ---------------------------------------------------------------------------
# base metrics

@dataclass
class RiemannianMetric:
    """Conformal metric e^{2 phi} eucl on R^n or the round unit sphere.

    ``bumps`` is a sequence of (center, amplitude, width) Gaussian
    summands of phi.  The conformal factor must stay above 0.1 on the
    working box; this is checked on a grid at construction.  The sphere
    uses two stereographic charts (0: from the south pole, 1: from the
    north pole) with the transition y -> y / |y|^2.
    """

    kind: str
    bumps: tuple = ()
    dim: int = 2
    box_radius: float = 6.0

    def __post_init__(self):
        if self.kind not in ("euclidean_with_bumps", "round_sphere"):
            raise LorentzError("unknown metric kind %r" % (self.kind,))
        if self.kind == "round_sphere":
            if self.bumps:
                raise LorentzError("the round sphere takes no bumps")
            self.dim = 2
        parsed = []
        for c, a, w in self.bumps:
            c = np.asarray(c, dtype=float)
            if c.shape != (self.dim,):
                raise LorentzError("bump center has wrong dimension")
            if float(w) <= 0.0:
                raise LorentzError("bump width must be positive")
            parsed.append((c, float(a), float(w)))
        self.bumps = tuple(parsed)
        if self.kind == "euclidean_with_bumps" and self.bumps:
            axes = [np.linspace(-self.box_radius, self.box_radius, 41)] \
                * self.dim
            grid = np.stack(np.meshgrid(*axes, indexing="ij"),
                            axis=-1).reshape(-1, self.dim)
            factor = np.exp(2.0 * self.phi(grid))
            if factor.min() < MIN_CONFORMAL_FACTOR:
                raise LorentzError(
                    "conformal factor %.3g below %.1f on the working box"
                    % (factor.min(), MIN_CONFORMAL_FACTOR))

    def phi(self, x) -> np.ndarray:
        """Conformal exponent, batched over leading axes of x."""
        x = np.asarray(x, dtype=float)
        if self.kind == "round_sphere":
            return np.log(2.0) - np.log1p((x * x).sum(axis=-1))
        out = np.zeros(x.shape[:-1])
        for c, a, w in self.bumps:
            d2 = ((x - c) ** 2).sum(axis=-1)
            out = out + a * np.exp(-d2 / (w * w))
        return out

    def grad_phi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "round_sphere":
            return -2.0 * x / (1.0 + (x * x).sum(axis=-1, keepdims=True))
        out = np.zeros_like(x)
        for c, a, w in self.bumps:
            d = x - c
            d2 = (d * d).sum(axis=-1, keepdims=True)
            out = out - (2.0 * a / (w * w)) * d * np.exp(-d2 / (w * w))
        return out

    def norm(self, x, v) -> np.ndarray:
        """g-length of tangent vectors, batched."""
        v = np.asarray(v, dtype=float)
        return np.exp(self.phi(x)) * np.sqrt((v * v).sum(axis=-1))

    def unit(self, x, v) -> np.ndarray:
        """Rescale v to unit g-length at x."""
        v = np.asarray(v, dtype=float)
        return v / self.norm(x, v)[..., None]

    def in_box(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "round_sphere":
            return np.ones(x.shape[:-1], dtype=bool)
        return np.abs(x).max(axis=-1) <= self.box_radius

    def embed(self, x, chart=0):
        """Sphere points in R^3 (identity for the plane kinds)."""
        x = np.asarray(x, dtype=float)
        if self.kind != "round_sphere":
            return x
        r2 = (x * x).sum(axis=-1, keepdims=True)
        X = np.concatenate([2.0 * x, r2 - 1.0], axis=-1) / (1.0 + r2)
        pole = np.asarray(chart, dtype=float)
        if pole.ndim:
            X = X.copy()
            X[..., -1] = np.where(pole > 0.5, -X[..., -1], X[..., -1])
        elif chart:
            X = X.copy()
            X[..., -1] = -X[..., -1]
        return X

    def distance(self, a, b, chart_a=0, chart_b=0) -> np.ndarray:
        """Approximate g-distance between nearby points, batched."""
        if self.kind == "round_sphere":
            A = self.embed(a, chart_a)
            B = self.embed(b, chart_b)
            dot = np.clip((A * B).sum(axis=-1), -1.0, 1.0)
            return np.arccos(dot)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        mid = 0.5 * (a + b)
        return np.exp(self.phi(mid)) * np.sqrt(((a - b) ** 2).sum(axis=-1))


def christoffels(metric: RiemannianMetric, x) -> np.ndarray:
    """Symbols Gamma^i_{jk} of the conformal metric at one point.

    For g = e^{2 phi} eucl they are delta^i_j phi_k + delta^i_k phi_j
    - delta_{jk} phi^i, manifestly symmetric in the lower pair.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (metric.dim,):
        raise LorentzError("expected a single point of dimension %d"
                           % metric.dim)
    if not metric.in_box(x):
        raise DomainError("point %s outside the working box" % (x,))
    gp = metric.grad_phi(x)
    n = metric.dim
    eye = np.eye(n)
    gamma = (eye[:, :, None] * gp[None, None, :]
             + eye[:, None, :] * gp[None, :, None]
             - eye[None, :, :] * gp[:, None, None])
    return gamma


def _acceleration(metric, x, v):
    """Geodesic acceleration -Gamma(v, v) in closed form, batched."""
    gp = metric.grad_phi(x)
    v2 = (v * v).sum(axis=-1, keepdims=True)
    vdot = (gp * v).sum(axis=-1, keepdims=True)
    return v2 * gp - 2.0 * vdot * v


def _switch_charts(x, v, chart):
    """Move rows past the chart-switch radius to the other chart."""
    r2 = (x * x).sum(axis=-1)
    move = r2 > CHART_SWITCH_RADIUS ** 2
    if move.any():
        xm = x[move]
        vm = v[move]
        r2m = r2[move][:, None]
        x = x.copy()
        v = v.copy()
        chart = chart.copy()
        x[move] = xm / r2m
        v[move] = (vm * r2m - 2.0 * xm
                   * (xm * vm).sum(axis=-1, keepdims=True)) / r2m ** 2
        chart[move] = 1 - chart[move]
    return x, v, chart


def _integrate_batch(metric, x0, v0, s_max, step, record=None):
    """Classical 4th-order sweep of the geodesic equation, batched.

    ``record(k, s, x, v, chart, alive)`` is called after every step.
    Returns the final state plus per-row truncation flags (rows that
    left the working box are frozen where they exited).
    """
    x = np.array(x0, dtype=float)
    v = np.array(v0, dtype=float)
    chart = np.zeros(x.shape[0], dtype=np.int8)
    alive = np.ones(x.shape[0], dtype=bool)
    n_steps = max(1, int(round(s_max / step)))
    h = s_max / n_steps
    sphere = metric.kind == "round_sphere"
    for k in range(n_steps):
        k1x = v
        k1v = _acceleration(metric, x, v)
        k2x = v + 0.5 * h * k1v
        k2v = _acceleration(metric, x + 0.5 * h * k1x, k2x)
        k3x = v + 0.5 * h * k2v
        k3v = _acceleration(metric, x + 0.5 * h * k2x, k3x)
        k4x = v + h * k3v
        k4v = _acceleration(metric, x + h * k3x, k4x)
        nx = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        nv = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if sphere:
            nx, nv, chart = _switch_charts(nx, nv, chart)
        else:
            exited = alive & ~metric.in_box(nx)
            if exited.any():
                nx[exited] = x[exited]
                nv[exited] = v[exited]
                alive = alive & ~exited
        keep = alive[:, None]
        x = np.where(keep, nx, x)
        v = np.where(keep, nv, v)
        if record is not None:
            record(k, (k + 1) * h, x, v, chart, alive)
        if not alive.any():
            break
    return x, v, chart, ~alive


@dataclass
class GeodesicPath:
    """Sampled naturally parametrized geodesic on the base."""

    s: np.ndarray
    x: np.ndarray
    v: np.ndarray
    chart: np.ndarray
    truncated: bool
    speed_drift: float


def integrate_geodesic(metric: RiemannianMetric, x0, v0, s_max,
                       step=1e-3) -> GeodesicPath:
    """Unit-speed geodesic from x0 with initial velocity v0.

    The initial velocity must have unit g-length to 1e-9.  The reported
    speed drift is the worst deviation of the g-speed from 1 along the
    samples; it scales with the 4th power of the step.
    """
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if abs(float(metric.norm(x0, v0)) - 1.0) > 1e-9:
        raise LorentzError("initial velocity is not unit length in g")
    if not metric.in_box(x0):
        raise DomainError("start point outside the working box")
    n_steps = max(1, int(round(s_max / step)))
    h = s_max / n_steps
    xs = np.empty((n_steps + 1, metric.dim))
    vs = np.empty((n_steps + 1, metric.dim))
    charts = np.zeros(n_steps + 1, dtype=np.int8)
    ss = h * np.arange(n_steps + 1)
    xs[0], vs[0] = x0, v0
    last = [0]

    def record(k, s, x, v, chart, alive):
        xs[k + 1] = x[0]
        vs[k + 1] = v[0]
        charts[k + 1] = chart[0]
        last[0] = k + 1

    _, _, _, trunc = _integrate_batch(metric, x0[None], v0[None],
                                      s_max, step, record=record)
    # a truncated sweep stops recording early; freeze the exit state
    xs[last[0] + 1:] = xs[last[0]]
    vs[last[0] + 1:] = vs[last[0]]
    charts[last[0] + 1:] = charts[last[0]]
    speeds = metric.norm(xs, vs)
    drift = float(np.abs(speeds - 1.0).max())
    return GeodesicPath(ss, xs, vs, charts, bool(trunc[0]), drift)


# ---------------------------------------------------------------------------
# the product spacetime

@dataclass
class ProductSpacetime:
    """(M x R, -g + dt^2) with the future the direction of increasing t."""

    base: RiemannianMetric


@dataclass
class NullGeodesic:
    """A lightlike curve (beta(s), t0 + sign * s) over a base geodesic."""

    base_path: GeodesicPath
    t0: float
    sign: int  # +1 future-directed, -1 past-directed

    def times(self) -> np.ndarray:
        return self.t0 + self.sign * self.base_path.s


def null_geodesic(st: ProductSpacetime, event, direction, s_max,
                  step=1e-3, past=False) -> NullGeodesic:
    """Null geodesic through an event with a given base direction."""
    x_bar, t_bar = event
    path = integrate_geodesic(st.base, x_bar, direction, s_max, step=step)
    return NullGeodesic(path, float(t_bar), -1 if past else 1)


@dataclass
class TimelikeCurve:
    """Worldline (x(t), t) sampled over an increasing time grid."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.times.ndim != 1 or len(self.times) < 2 \
                or self.points.shape[0] != len(self.times) \
                or self.points.ndim != 2:
            raise LorentzError("need matching 1-d times and 2-d points")
        if np.any(np.diff(self.times) <= 0):
            raise LorentzError("worldline times must increase strictly")

    def position(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.interp(t, self.times, self.points[:, i])
                         for i in range(self.points.shape[1])], axis=-1)


@dataclass
class CausalReport:
    kind: str  # "timelike_future" | "causal" | "neither"
    margin: float  # min over samples of 1 - |dx/dt|_g^2
    max_speed: float


def causal_character(st: ProductSpacetime,
                     curve: TimelikeCurve) -> CausalReport:
    """Classify a sampled worldline by its worst g-speed."""
    dt = np.diff(curve.times)
    dx = np.diff(curve.points, axis=0)
    mid = 0.5 * (curve.points[1:] + curve.points[:-1])
    speeds = st.base.norm(mid, dx / dt[:, None])
    worst = float(speeds.max()) if len(speeds) else 0.0
    margin = 1.0 - worst * worst
    if worst < 1.0:
        kind = "timelike_future"
    elif worst <= 1.0 + 1e-9:
        kind = "causal"
    else:
        kind = "neither"
    return CausalReport(kind, margin, worst)


# ---------------------------------------------------------------------------
# skies

@dataclass
class Sky:
    """Crossing data of an event's light cone with a Cauchy surface."""

    basepoint: np.ndarray
    t_event: float
    cauchy_time: float
    angles: np.ndarray
    positions: np.ndarray  # (n_dirs, 2) points on M x {cauchy_time}
    conormals: np.ndarray  # (n_dirs, 2) Euclidean-unit covector directions

    def to_jet_curve(self, center=None, legendrian_tol=0.1):
        """Jet model of the sky front, optionally recentered."""
        x = self.positions
        if center is not None:
            x = x - np.asarray(center, dtype=float)
        from .hodograph import curve_from_plane
        return curve_from_plane(x, self.conormals,
                                legendrian_tol=legendrian_tol)


def sky(st: ProductSpacetime, event, cauchy_time, n_dirs=256,
        step=1e-3) -> Sky:
    """Shoot the light cone of an event onto a Cauchy surface.

    For each direction the crossing with M x {cauchy_time} is recorded
    as position plus unit g-covector of the base velocity (stored via
    its Euclidean direction; the covector is e^{phi} times it).  On the
    surface of the event itself this is the co-sphere fiber, which the
    jet model centered at the basepoint sends to the zero section.
    """
    if st.base.kind != "euclidean_with_bumps" or st.base.dim != 2:
        raise LorentzError("skies are implemented for plane bases")
    if n_dirs < MIN_SKY_DIRS:
        raise LorentzError("need at least %d sky directions" % MIN_SKY_DIRS)
    x_bar, t_bar = event
    x_bar = np.asarray(x_bar, dtype=float)
    s_need = abs(float(cauchy_time) - float(t_bar))
    th = np.linspace(0.0, TWO_PI, n_dirs, endpoint=False)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    scale = np.exp(-st.base.phi(x_bar))
    if s_need == 0.0:
        pos = np.tile(x_bar, (n_dirs, 1))
        return Sky(x_bar, float(t_bar), float(cauchy_time), th, pos, dirs)
    x0 = np.tile(x_bar, (n_dirs, 1))
    xf, vf, _, trunc = _integrate_batch(st.base, x0, scale * dirs,
                                        s_need, step)
    if trunc.any():
        raise SkyError("light cone left the working box before the "
                       "Cauchy surface in directions %s"
                       % np.nonzero(trunc)[0].tolist())
    conormal = vf / np.linalg.norm(vf, axis=1, keepdims=True)
    return Sky(x_bar, float(t_bar), float(cauchy_time), th, xf, conormal)


# ---------------------------------------------------------------------------
# deja vu moments

@dataclass(frozen=True)
class DjvMoment:
    """A null geodesic from a point of the curve to a later one."""

    t_minus: float
    t_plus: float
    direction: float  # launch angle of the past cone at t_plus
    miss: float  # spatial g-distance at the refined crossing


def _refine_parabolic(grid, values, i):
    """Vertex of the parabola through three samples around index i."""
    if i == 0 or i == len(grid) - 1 \
            or not (np.isfinite(values[i - 1]) and np.isfinite(values[i + 1])):
        return float(grid[i]), float(values[i])
    denom = values[i - 1] - 2.0 * values[i] + values[i + 1]
    if denom <= 0.0:
        return float(grid[i]), float(values[i])
    shift = 0.5 * (values[i - 1] - values[i + 1]) / denom
    shift = float(np.clip(shift, -1.0, 1.0))
    h = grid[i + 1] - grid[i]
    val = values[i] - 0.125 * (values[i - 1] - values[i + 1]) ** 2 / denom
    return float(grid[i] + shift * h), float(max(val, 0.0))


def _cone_scan(base, curve, t_plus, angles, s_max, step, s_min):
    """Closest-approach data of a past null cone to the curve itself.

    Shoots one past-directed ray per angle from gamma(t_plus) and
    tracks the g-distance of beta(s) to gamma(t_plus - s).  Only
    interior local minima in s count (plus the far boundary, where the
    cone reaches the start of the curve): the distance always grows out
    of zero near s = 0, and that trivial almost-touch of the curve with
    its own light cone must not mask a genuine crossing further back.
    Returns the best such minimum per ray (inf when there is none) and
    its parabolically refined location.
    """
    sphere = base.kind == "round_sphere"
    x_plus = curve.position(float(t_plus))
    n_steps = max(2, int(round(s_max / step)))
    h = s_max / n_steps
    n_rays = len(angles)
    dist = np.empty((n_steps + 1, n_rays))
    dist[0] = 0.0
    s_grid = h * np.arange(n_steps + 1)
    targets = curve.position(float(t_plus) - s_grid)

    def record(k, s, x, v, chart, alive):
        if sphere:
            d = base.distance(x, np.broadcast_to(targets[k + 1], x.shape),
                              chart_a=chart, chart_b=0)
        else:
            d = base.distance(x, targets[k + 1])
        dist[k + 1] = np.where(alive, d, np.inf)

    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    scale = np.exp(-base.phi(x_plus))
    x0 = np.tile(np.asarray(x_plus, dtype=float), (n_rays, 1))
    _integrate_batch(base, x0, scale * dirs, s_max, h, record=record)

    live0 = int(np.searchsorted(s_grid, s_min))
    D = dist[live0:]
    s_live = s_grid[live0:]
    miss = np.full(n_rays, np.inf)
    s_star = np.zeros(n_rays)
    if len(s_live) < 2:
        return miss, s_star
    local = np.zeros(D.shape, dtype=bool)
    if len(s_live) >= 3:
        local[1:-1] = (D[1:-1] <= D[:-2]) & (D[1:-1] < D[2:])
    local[-1] = D[-1] < D[-2]
    masked = np.where(local, D, np.inf)
    idx = masked.argmin(axis=0)
    for j in range(n_rays):
        if np.isfinite(masked[idx[j], j]):
            s_star[j], miss[j] = _refine_parabolic(s_live, D[:, j],
                                                   int(idx[j]))
    return miss, s_star


def djv_moments(st: ProductSpacetime, curve: TimelikeCurve, tol=1e-3,
                n_dirs=256, step=2e-3, t_samples=None,
                refine_levels=3, refine_rays=17) -> list[DjvMoment]:
    """Deja vu moments: null returns of the curve onto itself.

    Every candidate t_plus on the curve emits a past-directed cone of
    null geodesics over a direction grid; each direction's g-distance
    to the matching earlier curve point gamma(t_plus - s) is tracked
    along s.  Directions already within the spatial tolerance are hits;
    isolated close approaches are sharpened by bisecting the launch
    angle over progressively narrower batched fans until the miss
    distance settles.  Hits are merged into events by clustering in
    (t_minus, t_plus, direction).
    """
    rep = causal_character(st, curve)
    if rep.kind != "timelike_future":
        raise LorentzError("deja vu search needs a timelike future curve, "
                           "got %s" % rep.kind)
    base = st.base
    t0 = float(curve.times[0])
    if t_samples is None:
        t_plus_list = curve.times
    else:
        t_plus_list = np.linspace(t0, float(curve.times[-1]),
                                  int(t_samples))
    th = np.linspace(0.0, TWO_PI, n_dirs, endpoint=False)
    dth = TWO_PI / n_dirs
    s_min = max(10.0 * tol, 5.0 * step)

    hits = []  # (t_minus, t_plus, angle, miss)
    for t_plus in t_plus_list:
        s_max = float(t_plus) - t0
        if s_max <= s_min:
            continue
        miss, s_star = _cone_scan(base, curve, t_plus, th,
                                  s_max, step, s_min)
        # a ray misses a transversal crossing by at most about the fan
        # spacing times the flight range, so anything closer deserves
        # an angular refinement pass
        capture = max(5.0 * tol, 1.5 * s_max * dth)
        fresh = []
        for j in range(n_dirs):
            if miss[j] < tol:
                fresh.append((float(t_plus) - s_star[j], float(t_plus),
                              float(th[j]), float(miss[j])))
            elif miss[j] < capture \
                    and miss[j] <= miss[(j - 1) % n_dirs] \
                    and miss[j] < miss[(j + 1) % n_dirs]:
                a, m, s_hit = _refine_direction(
                    base, curve, t_plus, float(th[j]), dth, s_max, step,
                    s_min, refine_levels, refine_rays)
                if m < tol:
                    fresh.append((float(t_plus) - s_hit, float(t_plus),
                                  float(np.mod(a, TWO_PI)), float(m)))
        hits.extend(fresh)

    return _cluster_hits(hits, t_plus_list, dth)


def _refine_direction(base, curve, t_plus, angle, halfwidth, s_max, step,
                      s_min, levels, rays):
    """Narrow an angular fan onto the closest approach of the cone."""
    for _ in range(levels):
        fan = angle + np.linspace(-halfwidth, halfwidth, rays)
        miss, s_star = _cone_scan(base, curve, t_plus, fan,
                                  s_max, step, s_min)
        j = int(np.argmin(miss))
        angle, _ = _refine_parabolic(fan, miss, j)
        halfwidth = 2.0 * halfwidth / (rays - 1)
        best = (miss[j], s_star[j])
    return angle, float(best[0]), float(best[1])


def _cluster_hits(hits, t_plus_list, dth):
    """Merge raw hits into events by locality in times and direction."""
    if not hits:
        return []
    t_gap = 2.5 * float(np.diff(t_plus_list).max()) \
        if len(t_plus_list) > 1 else np.inf
    a_gap = 3.0 * dth
    n = len(hits)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            da = abs(hits[i][2] - hits[j][2])
            da = min(da, TWO_PI - da)
            if abs(hits[i][0] - hits[j][0]) <= t_gap \
                    and abs(hits[i][1] - hits[j][1]) <= t_gap \
                    and da <= a_gap:
                parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(hits[i])
    events = []
    for members in groups.values():
        best = min(members, key=lambda hit: hit[3])
        events.append(DjvMoment(best[0], best[1], best[2], best[3]))
    events.sort(key=lambda e: (e.t_plus, e.t_minus, e.direction))
    return events


def moments_to_csv(events, path) -> None:
    import csv
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_minus", "t_plus", "dir_angle"])
        for e in events:
            w.writerow(["%.12g" % e.t_minus, "%.12g" % e.t_plus,
                        "%.12g" % e.direction])


# ---------------------------------------------------------------------------
# a frozen lensing scenario with guaranteed deja vu moments

TWO_BUMP_SOURCE = (-4.0, 0.0)
TWO_BUMP_FOCUS_X = 2.13966525641146
TWO_BUMP_FOCUS_TIME = 8.632343698408533


def two_bump_scenario():
    """Two symmetric conformal bumps refocusing light from a point.

    Returns (spacetime, source_event) with the source on the symmetry
    axis at time 0.  A null geodesic launched from the source at angle
    0.15 crosses the axis again at x = TWO_BUMP_FOCUS_X at parameter
    TWO_BUMP_FOCUS_TIME together with its mirror image, so the focal
    event ((TWO_BUMP_FOCUS_X, 0), TWO_BUMP_FOCUS_TIME) receives light
    from the source along two distinct null geodesics.  Every timelike
    curve from the source to the focal event then has deja vu moments.
    """
    metric = RiemannianMetric("euclidean_with_bumps",
                              bumps=(((-1.0, 0.0), 0.7, 0.8),
                                     ((1.0, 0.0), 0.7, 0.8)),
                              box_radius=16.0)
    return ProductSpacetime(metric), (np.array(TWO_BUMP_SOURCE), 0.0)


def two_bump_connecting_curve(st: ProductSpacetime, amplitude,
                              n_dense=4001, n_out=201) -> TimelikeCurve:
    """A timelike curve from the two-bump source to the focal event.

    The spatial track is a sine arc of the given amplitude between the
    source and the focus, reparameterized to constant g-speed so the
    worst instantaneous speed equals the mean.  Amplitudes with
    0.25 <= |amplitude| <= 0.7 bend around the bump cores enough to
    keep the g-length below the focal time, hence timelike_future.
    """
    tau = np.linspace(0.0, 1.0, n_dense)
    track = np.stack([
        TWO_BUMP_SOURCE[0] + (TWO_BUMP_FOCUS_X - TWO_BUMP_SOURCE[0]) * tau,
        TWO_BUMP_SOURCE[1] + float(amplitude) * np.sin(np.pi * tau),
    ], axis=1)
    seg = np.linalg.norm(np.diff(track, axis=0), axis=1)
    mid = 0.5 * (track[1:] + track[:-1])
    glen = np.concatenate([[0.0],
                           np.cumsum(np.exp(st.base.phi(mid)) * seg)])
    s_out = np.linspace(0.0, glen[-1], n_out)
    points = np.stack([np.interp(s_out, glen, track[:, 0]),
                       np.interp(s_out, glen, track[:, 1])], axis=1)
    return TimelikeCurve(np.linspace(0.0, TWO_BUMP_FOCUS_TIME, n_out),
                         points)


# ---------------------------------------------------------------------------
# all-geodesics-return deviation

def yxl_deviation(metric: RiemannianMetric, x, ell, n_dirs=64,
                  step=1e-3) -> float:
    """Worst return distance of unit-speed geodesics after time ell.

    Zero (up to integration error) characterizes manifolds all of whose
    geodesics from x return to x at time ell, like the round sphere
    with ell = 2 pi; on the Euclidean plane the deviation equals ell.
    """
    x = np.asarray(x, dtype=float)
    if metric.dim != 2:
        raise LorentzError("return deviation is implemented for surfaces")
    th = np.linspace(0.0, TWO_PI, n_dirs, endpoint=False)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    scale = np.exp(-metric.phi(x))
    x0 = np.tile(x, (n_dirs, 1))
    xf, _, chart, trunc = _integrate_batch(metric, x0, scale * dirs,
                                           float(ell), step)
    if trunc.any():
        raise DomainError("geodesics left the working box before ell")
    if metric.kind == "round_sphere":
        d = metric.distance(xf, np.broadcast_to(x, xf.shape),
                            chart_a=chart, chart_b=0)
    else:
        d = metric.distance(xf, x)
    return float(d.max())
