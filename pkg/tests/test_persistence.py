import math

import numpy as np
import pytest

from djvlab.persistence import Bar, Barcode, bars_containing, cubical_barcode

from oracle import circle_sublevel_bars, random_trig_polynomial

INF = math.inf


def circle_grid(n=256):
    return np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)


def all_bars(bc):
    """Real bars plus pruned noise, as (degree, birth, death) tuples."""
    return sorted((b.degree, b.birth, b.death) for b in bc.bars + bc.noise)


def double_well(q):
    """Smooth circle function with critical values -1, +1, -0.5, +0.2."""
    knots = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2, 2 * np.pi]
    vals = [-1.0, 1.0, -0.5, 0.2, -1.0]
    q = np.mod(q, 2 * np.pi)
    out = np.empty_like(q)
    for i in range(4):
        m = (q >= knots[i]) & (q < knots[i + 1])
        s = (q[m] - knots[i]) / (knots[i + 1] - knots[i])
        ease = (1 - np.cos(np.pi * s)) / 2
        out[m] = vals[i] + (vals[i + 1] - vals[i]) * ease
    return out


def test_cos_circle_bars():
    bc = cubical_barcode(np.cos(circle_grid()), (True,))
    assert bc.bars == [Bar(0, -1.0, INF), Bar(1, 1.0, INF)]
    assert bc.noise == []


def test_double_well_bars():
    bc = cubical_barcode(double_well(circle_grid(512)), (True,))
    tol = bc.noise_threshold
    got = all_bars(bc)
    want = [(0, -1.0, INF), (0, -0.5, 0.2), (1, 1.0, INF)]
    assert len(got) == len(want)
    for (d, b, dth), (wd, wb, wdth) in zip(got, sorted(want)):
        assert d == wd
        assert b == pytest.approx(wb, abs=tol)
        if wdth == INF:
            assert dth == INF
        else:
            assert dth == pytest.approx(wdth, abs=tol)


def test_bars_containing_examples():
    bc = cubical_barcode(np.cos(circle_grid()), (True,))
    assert bars_containing(bc, 0.0) == {0: 1}
    assert bars_containing(bc, 2.0) == {0: 1, 1: 1}
    dw = cubical_barcode(double_well(circle_grid(512)), (True,))
    assert bars_containing(dw, 0.0) == {0: 2}


def test_union_find_oracle_agreement():
    rng = np.random.default_rng(7)
    q = circle_grid(300)
    for _ in range(25):
        f, _ = random_trig_polynomial(rng)
        v = f(q)
        got = all_bars(cubical_barcode(v, (True,)))
        want = circle_sublevel_bars(v)
        assert len(got) == len(want)
        for g, w in zip(got, want):
            assert g[0] == w[0]
            assert g[1] == pytest.approx(w[1], abs=1e-12)
            assert g[2] == pytest.approx(w[2], abs=1e-12) or g[2] == w[2]


@pytest.mark.parametrize("signs", [(1,), (-1,), (1, 1), (1, -1), (-1, 1),
                                   (-1, -1)])
def test_index_shift_by_fiber_sign_pattern(signs):
    q = circle_grid(128)
    f = np.cos(q) + 0.4 * np.sin(2 * q)
    nu = sum(1 for s in signs if s < 0)
    n_xi = 32
    xi = np.linspace(-2.0, 2.0, n_xi)
    V = f.copy()
    for s in signs:
        V = V[..., None] + s * xi**2
    periodic = (True,) + (False,) * len(signs)
    relative = (False,) + tuple(s < 0 for s in signs)
    bc = cubical_barcode(V, periodic, relative)
    base = cubical_barcode(f, (True,))
    tol = max(bc.noise_threshold, base.noise_threshold)
    got = sorted((b.degree, b.birth, b.death) for b in bc.bars)
    want = sorted((b.degree + nu, b.birth, b.death) for b in base.bars)
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert g[0] == w[0]
        assert g[1] == pytest.approx(w[1], abs=tol)
        if w[2] == INF:
            assert g[2] == INF
        else:
            assert g[2] == pytest.approx(w[2], abs=tol)


def test_infinite_bar_count_matches_base_homology():
    # torus base with one negative fiber direction: 4 infinite bars
    q = circle_grid(48)
    x = circle_grid(32)
    xi = np.linspace(-2, 2, 24)
    V = (np.cos(q)[:, None, None] + 0.5 * np.sin(x)[None, :, None]
         - xi[None, None, :] ** 2)
    bc = cubical_barcode(V, (True, True, False), (False, False, True))
    assert len(bc.infinite_bars()) == 4
    assert sorted(b.degree for b in bc.infinite_bars()) == [1, 2, 2, 3]


def test_axis_flag_validation():
    v = np.zeros((4, 4))
    with pytest.raises(ValueError):
        cubical_barcode(v, (True,))
    with pytest.raises(ValueError):
        cubical_barcode(v, (True, False), (True, False))


def test_csv_roundtrip(tmp_path):
    bc = cubical_barcode(np.cos(circle_grid()), (True,))
    path = tmp_path / "bars.csv"
    bc.to_csv(path)
    back = Barcode.from_csv(path)
    assert back.bars == bc.bars
