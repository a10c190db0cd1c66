"""Sublevel-set persistence over Z/2 on cubical grids.

The complex is a product of circle factors (periodic axes) and interval
factors (fiber axes).  Homology is taken relative to the "negative end":
every boundary face of an interval axis flagged as negative-definite is
removed from the chain complex, which is the finite model of coning those
faces off at filtration value -infinity.
"""

from __future__ import annotations

import csv
import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf


@dataclass(frozen=True, order=True)
class Bar:
    degree: int
    birth: float
    death: float  # math.inf for an infinite bar

    @property
    def finite(self) -> bool:
        return self.death != INF

    @property
    def length(self) -> float:
        return self.death - self.birth

    def contains(self, a: float) -> bool:
        return self.birth <= a < self.death


@dataclass
class Barcode:
    """Multiset of bars plus the noise that was pruned away.

    Bars shorter than ``noise_threshold`` are never silently dropped;
    they are kept in ``noise`` so callers can inspect them.
    """

    bars: list[Bar]
    noise_threshold: float = 0.0
    noise: list[Bar] = field(default_factory=list)
    coefficient_field: str = "Z/2"

    def infinite_bars(self) -> list[Bar]:
        return [b for b in self.bars if not b.finite]

    def finite_bars(self) -> list[Bar]:
        return [b for b in self.bars if b.finite]

    def bars_containing(self, a: float) -> dict[int, int]:
        counts: dict[int, int] = {}
        for b in self.bars:
            if b.contains(a):
                counts[b.degree] = counts.get(b.degree, 0) + 1
        return counts

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["degree", "birth", "death"])
            for b in sorted(self.bars):
                death = "inf" if not b.finite else "%.12g" % b.death
                w.writerow([b.degree, "%.12g" % b.birth, death])

    @staticmethod
    def from_csv(path) -> "Barcode":
        bars = []
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            if header != ["degree", "birth", "death"]:
                raise ValueError("bad barcode CSV header: %r" % (header,))
            for row in r:
                death = INF if row[2] == "inf" else float(row[2])
                bars.append(Bar(int(row[0]), float(row[1]), death))
        return Barcode(bars)


def bars_containing(barcode: Barcode, a: float) -> dict[int, int]:
    """Count of bars with birth <= a < death, per degree."""
    return barcode.bars_containing(a)


def grid_modulus(values: np.ndarray, periodic: tuple[bool, ...]) -> float:
    """Largest value change across a single grid edge."""
    worst = 0.0
    for ax in range(values.ndim):
        if values.shape[ax] < 2:
            continue
        if periodic[ax]:
            d = np.abs(values - np.roll(values, -1, axis=ax))
        else:
            d = np.abs(np.diff(values, axis=ax))
        worst = max(worst, float(d.max()))
    return worst


def feature_modulus(values: np.ndarray, periodic: tuple[bool, ...]) -> float:
    """Resolution scale of the filtration near its critical configurations.

    A vertex is regular if the sampled function increases strictly through
    it along some axis; lower-star pairings in regular regions cancel at
    equal values, so spurious bars can only be born near the non-regular
    vertices.  The returned modulus is the largest edge variation in the
    star of any non-regular vertex, which scales like the local second
    difference instead of the global gradient bound.
    """
    d = values.ndim
    regular = np.zeros(values.shape, dtype=bool)
    star = np.zeros(values.shape)
    for ax in range(d):
        if periodic[ax]:
            fwd = np.roll(values, -1, axis=ax) - values
            bwd = values - np.roll(values, 1, axis=ax)
        else:
            diff = np.diff(values, axis=ax)
            pad_lo = tuple(
                slice(0, 1) if a == ax else slice(None) for a in range(d)
            )
            pad_hi = tuple(
                slice(-1, None) if a == ax else slice(None) for a in range(d)
            )
            fwd = np.concatenate([diff, diff[pad_hi]], axis=ax)
            bwd = np.concatenate([diff[pad_lo], diff], axis=ax)
        regular |= ((fwd > 0) & (bwd > 0)) | ((fwd < 0) & (bwd < 0))
        star = np.maximum(star, np.maximum(np.abs(fwd), np.abs(bwd)))
    critical = ~regular
    scale = float(np.abs(values).max()) if values.size else 0.0
    if not critical.any():
        return 1e-12 * scale
    return float(star[critical].max()) + 1e-12 * scale


def _cell_arrays(values, periodic, relative_ends):
    """Enumerate all cells of the cubical complex.

    Returns (value, dim, is_relative, faces) as flat arrays over a global
    cell id.  ``faces`` has shape (n_cells, 2*ndim) padded with -1.
    """
    d = values.ndim
    shape = values.shape
    patterns = list(itertools.product((0, 1), repeat=d))

    def anchor_shape(e):
        return tuple(
            shape[ax] if (periodic[ax] or e[ax] == 0) else shape[ax] - 1
            for ax in range(d)
        )

    offsets = {}
    total = 0
    for e in patterns:
        offsets[e] = total
        total += int(np.prod(anchor_shape(e)))

    value = np.empty(total)
    dim = np.empty(total, dtype=np.int8)
    is_rel = np.zeros(total, dtype=bool)
    # int32 ids keep the face table (the largest allocation) compact
    faces = np.full((total, 2 * d), -1, dtype=np.int32)

    for e in patterns:
        off = offsets[e]
        ash = anchor_shape(e)
        n = int(np.prod(ash))
        sl_all = slice(off, off + n)

        # cell value: max over the 2^{|e|} vertices
        val = values
        for ax in range(d):
            if e[ax] == 0:
                continue
            if periodic[ax]:
                val = np.maximum(val, np.roll(val, -1, axis=ax))
            else:
                lo = tuple(
                    slice(0, -1) if a == ax else slice(None) for a in range(d)
                )
                hi = tuple(
                    slice(1, None) if a == ax else slice(None) for a in range(d)
                )
                val = np.maximum(val[lo], val[hi])
        value[sl_all] = val.ravel()
        dim[sl_all] = sum(e)

        idx = np.indices(ash).reshape(d, -1)

        # relative cells: flat in a negative-end boundary face
        rel = np.zeros(n, dtype=bool)
        for ax in range(d):
            if relative_ends[ax] and e[ax] == 0:
                rel |= (idx[ax] == 0) | (idx[ax] == shape[ax] - 1)
        is_rel[sl_all] = rel

        # faces: drop extent along each spanned axis, at both ends
        slot = 0
        for ax in range(d):
            if e[ax] == 0:
                continue
            fe = tuple(0 if a == ax else e[a] for a in range(d))
            fsh = anchor_shape(fe)
            foff = offsets[fe]
            faces[sl_all, slot] = foff + np.ravel_multi_index(idx, fsh)
            idx2 = idx.copy()
            if periodic[ax]:
                idx2[ax] = (idx2[ax] + 1) % shape[ax]
            else:
                idx2[ax] = idx2[ax] + 1
            faces[sl_all, slot + 1] = foff + np.ravel_multi_index(idx2, fsh)
            slot += 2

    return value, dim, is_rel, faces


def _reduce_columns(order, value, dim, faces, pos_of):
    """Standard Z/2 boundary-matrix reduction with the clearing shortcut.

    ``order``: global cell ids in filtration order.  Returns persistence
    pairs as (birth position, death position) plus essential positions.
    """
    npos = len(order)
    maxdim = int(dim[order].max()) if npos else 0
    pivot_owner = np.full(npos, -1, dtype=np.int32)
    stored: dict[int, list[int]] = {}
    cleared = np.zeros(npos, dtype=bool)
    # pair buffers stay flat arrays; a python list of tuples at this
    # scale dominates the peak footprint
    pair_birth = np.empty(npos // 2 + 1, dtype=np.int32)
    pair_death = np.empty(npos // 2 + 1, dtype=np.int32)
    n_pairs = 0

    dim_at = dim[order]
    # boundary in filtration positions; -1 entries are padding or relative
    fo = faces[order]
    face_pos = pos_of[fo]
    face_pos[fo < 0] = -1
    del fo

    for cdim in range(maxdim, 0, -1):
        for j in np.nonzero(dim_at == cdim)[0]:
            if cleared[j]:
                continue
            row = face_pos[j]
            # working column as a lazy max-heap (negated, duplicates cancel)
            heap = [-int(p) for p in row[row >= 0]]
            heapq.heapify(heap)
            while heap:
                low = -heapq.heappop(heap)
                count = 1
                while heap and heap[0] == -low:
                    heapq.heappop(heap)
                    count += 1
                if count % 2 == 0:
                    continue
                owner = pivot_owner[low]
                if owner < 0:
                    pivot_owner[low] = j
                    # collapse remaining entries into a sorted column,
                    # pivot last, for future xors
                    body = []
                    while heap:
                        p = heapq.heappop(heap)
                        c = 1
                        while heap and heap[0] == p:
                            heapq.heappop(heap)
                            c += 1
                        if c % 2:
                            body.append(-p)
                    body.reverse()
                    body.append(low)
                    stored[j] = body
                    cleared[low] = True
                    pair_birth[n_pairs] = low
                    pair_death[n_pairs] = j
                    n_pairs += 1
                    break
                # xor with the owner column; its pivot equals low, which
                # has already been removed from our heap
                other = stored[owner]
                for p in other[:-1]:
                    heapq.heappush(heap, -p)

    pair_birth = pair_birth[:n_pairs]
    pair_death = pair_death[:n_pairs]
    paired = np.zeros(npos, dtype=bool)
    paired[pair_birth] = True
    paired[pair_death] = True
    essential = np.nonzero(~paired)[0]
    return (pair_birth, pair_death), essential


def cubical_barcode(
    values: np.ndarray,
    periodic: tuple[bool, ...],
    relative_ends: tuple[bool, ...] | None = None,
) -> Barcode:
    """Barcode of the lower-star filtration of grid values.

    ``periodic[ax]`` marks circle factors, ``relative_ends[ax]`` marks
    interval factors whose two boundary faces belong to the negative end.
    """
    values = np.asarray(values, dtype=float)
    d = values.ndim
    if relative_ends is None:
        relative_ends = (False,) * d
    if len(periodic) != d or len(relative_ends) != d:
        raise ValueError("axis flag length does not match grid rank")
    for ax in range(d):
        if periodic[ax] and relative_ends[ax]:
            raise ValueError("axis %d cannot be periodic and relative" % ax)

    value, dim, is_rel, faces = _cell_arrays(values, periodic, relative_ends)

    keep = np.nonzero(~is_rel)[0]
    order = keep[np.lexsort((dim[keep], value[keep]))]
    pos_of = np.full(len(value), -1, dtype=np.int32)
    pos_of[order] = np.arange(len(order))

    pairs, essential = _reduce_columns(order, value, dim, faces, pos_of)

    threshold = 2.0 * feature_modulus(values, periodic)
    bars: list[Bar] = []
    noise: list[Bar] = []
    p_birth, p_death = pairs
    births = value[order[p_birth]]
    deaths = value[order[p_death]]
    degs = dim[order[p_birth]]
    real = deaths > births
    for b, dth, dg in zip(births[real], deaths[real], degs[real]):
        bar = Bar(int(dg), float(b), float(dth))
        (noise if bar.length <= threshold else bars).append(bar)
    for j in essential:
        bars.append(Bar(int(dim[order[j]]), float(value[order[j]]), INF))
    bars.sort()
    noise.sort()
    return Barcode(bars, noise_threshold=threshold, noise=noise)
