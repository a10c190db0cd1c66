"""Versioned JSON scene files driving the command line front end.

A scene is a small JSON document {"version": 1, "kind": ..., <kind>:
{...}} describing one lab input: a sampled or trigonometric jet curve,
a generating function, a frozen catalog family, or a Lorentz scenario.
Schemas are strict; unknown fields anywhere in the document are
rejected so stale or misspelled keys fail loudly instead of being
silently ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

SCENE_VERSION = 1

SCENE_KINDS = ("curve", "genfun", "family", "lorentz")


class SceneError(ValueError):
    """Malformed scene document."""


def _check_fields(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise SceneError("%s must be an object" % where)
    allowed = set(required) | set(optional)
    unknown = set(obj) - allowed
    if unknown:
        raise SceneError("%s has unknown fields %s"
                         % (where, sorted(unknown)))
    missing = set(required) - set(obj)
    if missing:
        raise SceneError("%s is missing fields %s"
                         % (where, sorted(missing)))


@dataclass(frozen=True)
class Scene:
    """A validated scene: its kind plus the kind-specific payload."""

    kind: str
    payload: dict


def load_scene(path) -> Scene:
    """Read and validate a scene file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SceneError("invalid JSON in %s: %s" % (path, exc))
    return parse_scene(doc)


def parse_scene(doc) -> Scene:
    _check_fields(doc, "scene", ("version", "kind"), SCENE_KINDS)
    if doc["version"] != SCENE_VERSION:
        raise SceneError("unsupported scene version %r" % (doc["version"],))
    kind = doc["kind"]
    if kind not in SCENE_KINDS:
        raise SceneError("unknown scene kind %r" % (kind,))
    if kind not in doc:
        raise SceneError("scene kind %r without a %r payload"
                         % (kind, kind))
    extra = [k for k in SCENE_KINDS if k in doc and k != kind]
    if extra:
        raise SceneError("scene has unknown fields %s" % extra)
    payload = doc[kind]
    _VALIDATORS[kind](payload)
    return Scene(kind, payload)


# ---------------------------------------------------------------------------
# payload validation

def _validate_curve(payload):
    _check_fields(payload, "curve payload", (),
                  ("samples", "cos", "sin", "n", "legendrian_tol"))
    if "samples" in payload and ("cos" in payload or "sin" in payload):
        raise SceneError("curve payload mixes samples with coefficients")
    if "samples" not in payload and "cos" not in payload \
            and "sin" not in payload:
        raise SceneError("curve payload needs samples or coefficients")


def _validate_genfun(payload):
    _check_fields(payload, "genfun payload", (),
                  ("cos", "sin", "n_q", "fiber_signs", "k"))
    if "cos" not in payload and "sin" not in payload:
        raise SceneError("genfun payload needs cos or sin coefficients")
    for s in payload.get("fiber_signs", ()):
        if s not in (-1, 1):
            raise SceneError("fiber signs must be +1 or -1")


def _validate_family(payload):
    _check_fields(payload, "family payload", ("catalog",),
                  ("n_times", "n_base", "n_fiber", "n_out", "front_tol",
                   "cert_n_base", "cert_n_fiber"))
    if payload["catalog"] not in ("fig1", "fig2"):
        raise SceneError("unknown catalog %r" % (payload["catalog"],))


def _validate_lorentz(payload):
    _check_fields(payload, "lorentz payload", ("metric",),
                  ("events", "curves", "shoot", "sky", "moments", "yxl"))
    _check_fields(payload["metric"], "metric", ("kind",),
                  ("bumps", "box_radius", "dim"))
    for b in payload["metric"].get("bumps", ()):
        _check_fields(b, "bump", ("center", "amp", "width"))
    for e in payload.get("events", ()):
        _check_fields(e, "event", ("point", "time"))
    for c in payload.get("curves", ()):
        if isinstance(c, dict) and "two_bump_amplitude" in c:
            _check_fields(c, "curve entry", ("two_bump_amplitude",))
        else:
            _check_fields(c, "curve entry", ("times", "points"))
    if "shoot" in payload:
        _check_fields(payload["shoot"], "shoot", ("direction", "s_max"),
                      ("event_index", "step", "past"))
    if "sky" in payload:
        _check_fields(payload["sky"], "sky", ("cauchy_time",),
                      ("event_index", "n_dirs", "step"))
    if "moments" in payload:
        _check_fields(payload["moments"], "moments", (),
                      ("curve_index", "tol", "n_dirs", "step", "t_samples"))
    if "yxl" in payload:
        _check_fields(payload["yxl"], "yxl", ("point", "ell"),
                      ("n_dirs", "step"))


_VALIDATORS = {
    "curve": _validate_curve,
    "genfun": _validate_genfun,
    "family": _validate_family,
    "lorentz": _validate_lorentz,
}


# ---------------------------------------------------------------------------
# builders

def trig_poly(cos_coeffs, sin_coeffs):
    """Callables (f, f') for sum_j c_j cos(j q) + sum_i s_i sin((i+1) q)."""
    c = np.asarray(cos_coeffs, dtype=float)
    s = np.asarray(sin_coeffs, dtype=float)
    jc = np.arange(len(c))
    js = np.arange(1, len(s) + 1)

    def f(q):
        q = np.asarray(q, dtype=float)[..., None]
        out = (c * np.cos(jc * q)).sum(axis=-1)
        if len(s):
            out = out + (s * np.sin(js * q)).sum(axis=-1)
        return out

    def fprime(q):
        q = np.asarray(q, dtype=float)[..., None]
        out = -(c * jc * np.sin(jc * q)).sum(axis=-1)
        if len(s):
            out = out + (s * js * np.cos(js * q)).sum(axis=-1)
        return out

    return f, fprime


def build_curve(scene: Scene):
    """Jet curve of a curve scene."""
    from .jetcurves import LegendrianCurve, jet_graph
    p = scene.payload
    tol = p.get("legendrian_tol", 1e-3)
    if "samples" in p:
        return LegendrianCurve.from_json({"samples": p["samples"]},
                                         legendrian_tol=tol)
    f, fp = trig_poly(p.get("cos", ()), p.get("sin", ()))
    return jet_graph(f, fp, n=int(p.get("n", 2048)), legendrian_tol=tol)


def build_genfun(scene: Scene):
    """Generating function of a genfun scene (fiber squares applied)."""
    from .genfun import from_function, stabilized
    p = scene.payload
    f, fp = trig_poly(p.get("cos", ()), p.get("sin", ()))
    S = from_function(f, fprime=fp, n_q=int(p.get("n_q", 256)))
    for sign in p.get("fiber_signs", ()):
        S = stabilized(S, int(sign))
    return S


def build_family(scene: Scene):
    """(frames, family) of a catalog family scene."""
    from .families import catalog_fig1, catalog_fig2
    p = scene.payload
    maker = catalog_fig1 if p["catalog"] == "fig1" else catalog_fig2
    kwargs = {k: p[k] for k in ("n_times", "n_base", "n_fiber", "n_out",
                                "front_tol") if k in p}
    return maker(**kwargs)


def build_metric(payload):
    from .lorentz import RiemannianMetric
    m = payload["metric"]
    kwargs = {}
    if "box_radius" in m:
        kwargs["box_radius"] = float(m["box_radius"])
    if "dim" in m:
        kwargs["dim"] = int(m["dim"])
    bumps = tuple((tuple(b["center"]), float(b["amp"]), float(b["width"]))
                  for b in m.get("bumps", ()))
    return RiemannianMetric(m["kind"], bumps=bumps, **kwargs)


def build_lorentz(scene: Scene):
    """(spacetime, curves, events) of a lorentz scenario scene."""
    from .lorentz import (ProductSpacetime, TimelikeCurve,
                          two_bump_connecting_curve)
    p = scene.payload
    st = ProductSpacetime(build_metric(p))
    curves = []
    for c in p.get("curves", ()):
        if "two_bump_amplitude" in c:
            curves.append(two_bump_connecting_curve(
                st, float(c["two_bump_amplitude"])))
        else:
            curves.append(TimelikeCurve(np.asarray(c["times"], dtype=float),
                                        np.asarray(c["points"],
                                                   dtype=float)))
    events = [(np.asarray(e["point"], dtype=float), float(e["time"]))
              for e in p.get("events", ())]
    return st, curves, events
