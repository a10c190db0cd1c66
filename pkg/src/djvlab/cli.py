"""Command line front end: scene ingestion, CSV/SVG emission.

Subcommands: barcode (sublevel barcode of a generating function scene),
djv (deja vu verdicts by barcode, winding or quotient certificate),
render (wavefront SVG) and lorentz {shoot, sky, djv-moments, yxl}.
All floats are printed with 12 significant digits and no run carries
timestamps or environment echoes, so identical scenes and flags yield
byte-identical outputs.

Exit codes: 0 success (for djv: certified; for djv-moments: events
found), 1 negative or inconclusive result, 2 precondition failure or
inapplicable input (diagnostic on standard error), 3 malformed scene.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .scenes import (Scene, SceneError, build_curve, build_family,
                     build_genfun, build_lorentz, load_scene, trig_poly)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PRECONDITION = 2
EXIT_SCHEMA = 3

_F = "%.12g"


class CliError(ValueError):
    """Scene is valid but does not fit the requested operation."""


def _threads(args) -> int:
    env = os.environ.get("DJVLAB_THREADS")
    n = int(env) if env else args.threads
    if n < 1:
        raise CliError("thread count must be at least 1")
    return n


# ---------------------------------------------------------------------------
# subcommands

def cmd_barcode(args) -> int:
    scene = load_scene(args.scene)
    if scene.kind != "genfun":
        raise CliError("barcode needs a genfun scene, got %r" % scene.kind)
    from .genfun import sublevel_persistence
    bc = sublevel_persistence(build_genfun(scene))
    bc.to_csv(args.out)
    print("bars %d noise_threshold %s" % (len(bc.bars),
                                          _F % bc.noise_threshold))
    return EXIT_OK


def _certificate_genfun(scene: Scene):
    if scene.kind == "genfun":
        return build_genfun(scene)
    frames, fam = build_family(scene)
    p = scene.payload
    n_base = int(p.get("cert_n_base", 384))
    n_fiber = int(p.get("cert_n_fiber", n_base + 1))
    return fam.member_fn(float(fam.times[-1]),
                         n_base=(n_base,), n_fiber=(n_fiber,))


def cmd_djv(args) -> int:
    scene = load_scene(args.scene)
    if args.mode == "barcode":
        if scene.kind not in ("genfun", "family"):
            raise CliError("barcode mode needs a genfun or family scene")
        from .genfun import djv_certificate
        cert = djv_certificate(_certificate_genfun(scene))
        if cert.kind == "djv":
            b = cert.bar
            print("DJV_BY_BARCODE degree %d bar %s %s"
                  % (b.degree, _F % b.birth, _F % b.death))
            return EXIT_OK
        if cert.kind == "zero_is_critical":
            print("INAPPLICABLE zero is a critical value to tolerance")
            return EXIT_PRECONDITION
        print("INCONCLUSIVE no finite bar through zero")
        return EXIT_NEGATIVE

    if args.mode == "winding":
        from .jetcurves import ProximityError, winding_number
        if scene.kind == "curve":
            curve = build_curve(scene)
        elif scene.kind == "family":
            curve = build_family(scene)[0].frames[-1]
        else:
            raise CliError("winding mode needs a curve or family scene")
        try:
            w = winding_number(curve)
        except ProximityError as exc:
            print("INAPPLICABLE %s" % exc)
            return EXIT_PRECONDITION
        if w != 0:
            print("DJV_BY_WINDING winding %d" % w)
            return EXIT_OK
        print("INCONCLUSIVE winding 0")
        return EXIT_NEGATIVE

    # quotient mode
    if scene.kind != "genfun" or "k" not in scene.payload:
        raise CliError("quotient mode needs a genfun scene with a k field")
    from .families import QUOTIENT_DJV_VERDICT, verify_quotient_djv
    p = scene.payload
    f, fp = trig_poly(p.get("cos", ()), p.get("sin", ()))
    report = verify_quotient_djv(f, int(p["k"]), fprime=fp)
    if report.failed:
        print("INAPPLICABLE failed preconditions: %s"
              % ", ".join(report.failed))
        return EXIT_PRECONDITION
    if report.verdict == QUOTIENT_DJV_VERDICT:
        print("DJV tau %s" % (_F % report.tau))
        return EXIT_OK
    print("INCONCLUSIVE %s" % report.verdict)
    return EXIT_NEGATIVE


def cmd_render(args) -> int:
    scene = load_scene(args.scene)
    from .hodograph import render_front
    if scene.kind == "curve":
        render_front(build_curve(scene), out=args.out, target=args.space)
        print("wrote %s" % args.out)
        return EXIT_OK
    if scene.kind == "family":
        frames = build_family(scene)[0].frames
        idx = np.unique(np.linspace(0, len(frames) - 1,
                                    args.panels).round().astype(int))
        root, ext = os.path.splitext(str(args.out))
        for k, i in enumerate(idx):
            path = "%s_%d%s" % (root, k, ext or ".svg")
            render_front(frames[i], out=path, target=args.space)
            print("wrote %s" % path)
        return EXIT_OK
    raise CliError("render needs a curve or family scene, got %r"
                   % scene.kind)


def cmd_lorentz(args) -> int:
    scene = load_scene(args.scene)
    if scene.kind != "lorentz":
        raise CliError("lorentz needs a lorentz scene, got %r" % scene.kind)
    st, curves, events = build_lorentz(scene)
    p = scene.payload

    if args.operation == "shoot":
        if "shoot" not in p:
            raise CliError("scene has no shoot payload")
        from .lorentz import null_geodesic
        sp = p["shoot"]
        ev = events[int(sp.get("event_index", 0))]
        ng = null_geodesic(st, ev, np.asarray(sp["direction"], dtype=float),
                           float(sp["s_max"]),
                           step=float(sp.get("step", 1e-3)),
                           past=bool(sp.get("past", False)))
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "x0", "x1", "t"])
            times = ng.times()
            for i in range(len(ng.base_path.s)):
                w.writerow([_F % ng.base_path.s[i],
                            _F % ng.base_path.x[i, 0],
                            _F % ng.base_path.x[i, 1], _F % times[i]])
        print("wrote %s" % args.out)
        return EXIT_OK

    if args.operation == "sky":
        if "sky" not in p:
            raise CliError("scene has no sky payload")
        from .lorentz import sky
        sp = p["sky"]
        s = sky(st, events[int(sp.get("event_index", 0))],
                float(sp["cauchy_time"]),
                n_dirs=int(sp.get("n_dirs", 256)),
                step=float(sp.get("step", 1e-3)))
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["angle", "x0", "x1", "c0", "c1"])
            for i in range(len(s.angles)):
                w.writerow([_F % s.angles[i],
                            _F % s.positions[i, 0], _F % s.positions[i, 1],
                            _F % s.conormals[i, 0], _F % s.conormals[i, 1]])
        print("wrote %s" % args.out)
        return EXIT_OK

    if args.operation == "djv-moments":
        from .lorentz import djv_moments, moments_to_csv
        mp = p.get("moments", {})
        if not curves:
            raise CliError("scene has no curves to search")
        curve = curves[int(mp.get("curve_index", 0))]
        tol = args.tol if args.tol is not None else float(
            mp.get("tol", 1e-3))
        found = djv_moments(
            st, curve, tol=tol,
            n_dirs=int(mp.get("n_dirs", 256)),
            step=float(mp.get("step", 2e-3)),
            t_samples=(int(mp["t_samples"]) if "t_samples" in mp else None))
        moments_to_csv(found, args.out)
        print("events %d" % len(found))
        return EXIT_OK if found else EXIT_NEGATIVE

    # yxl deviation
    if "yxl" not in p:
        raise CliError("scene has no yxl payload")
    from .lorentz import yxl_deviation
    yp = p["yxl"]
    dev = yxl_deviation(st.base, np.asarray(yp["point"], dtype=float),
                        float(yp["ell"]), n_dirs=int(yp.get("n_dirs", 64)),
                        step=float(yp.get("step", 1e-3)))
    print("deviation %s" % (_F % dev))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing

def _add_common(sub):
    sub.add_argument("--scene", required=True, help="scene JSON path")
    sub.add_argument("--tol", type=float, default=None,
                     help="override the operation's tolerance")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker cap (DJVLAB_THREADS overrides)")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for randomized scene generators")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="djvlab",
        description="deja vu lab: barcodes, verdicts, fronts, spacetimes")
    subs = parser.add_subparsers(dest="command", required=True)

    b = subs.add_parser("barcode", help="sublevel barcode of a genfun scene")
    b.add_argument("--out", required=True)
    _add_common(b)
    b.set_defaults(func=cmd_barcode)

    d = subs.add_parser("djv", help="deja vu verdict for a scene")
    d.add_argument("--mode", required=True,
                   choices=("barcode", "winding", "quotient"))
    _add_common(d)
    d.set_defaults(func=cmd_djv)

    r = subs.add_parser("render", help="wavefront SVG of a curve scene")
    r.add_argument("--out", required=True)
    r.add_argument("--space", default="plane", choices=("jet", "plane"))
    r.add_argument("--panels", type=int, default=4,
                   help="panel count for family scenes")
    _add_common(r)
    r.set_defaults(func=cmd_render)

    lz = subs.add_parser("lorentz", help="spacetime operations")
    lz.add_argument("operation",
                    choices=("shoot", "sky", "djv-moments", "yxl"))
    lz.add_argument("--out", default=None)
    _add_common(lz)
    lz.set_defaults(func=cmd_lorentz)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _threads(args)
        if args.seed:
            np.random.seed(args.seed)
        return args.func(args)
    except SceneError as exc:
        print("scene error: %s" % exc, file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print("io error: %s" % exc, file=sys.stderr)
        return EXIT_SCHEMA
    except ValueError as exc:
        # domain preconditions (curve, genfun, family, lorentz, cli)
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
