"""Compiled Dijkstra kernel for the built-in laws.

Mirrors ``engine.first_passage_reference`` exactly: same edge-weight hash
(bit-identical splitmix64 fold), same termination rules, same cap
semantics.  Vertices are dense int32 coordinate rows (so only d <= 64 is
handled here), deduplicated through an open-addressing hash table; the
priority queue is a manual binary heap with a deterministic tie-break.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numba as nb
import numpy as np

from .distributions import DistributionSpec
from .engine import (
    Box,
    DiagonalTarget,
    HyperplaneTarget,
    PassageSample,
    PointTarget,
    SearchCaps,
    SlabTarget,
    diag_step,
)
from .errors import DegenerateCaps
from .lattice import Vertex

_MAX_FAST_DIM = 64
_UNBOUNDED = 1 << 30

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_TABLE_SEED = U64(0xC0FFEE)


@nb.njit(inline="always", cache=True)
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


@nb.njit(inline="always", cache=True)
def _edge_u(seed, dim, coords, vid, flip_index, direction):
    """u in [0,1) of the canonical edge whose low endpoint is row ``vid``
    with coordinate ``flip_index`` decremented when flip_index >= 0."""
    h = _mix64(seed ^ _GOLDEN)
    h = _mix64(h ^ U64(dim))
    for i in range(dim):
        c = np.int64(coords[vid, i])
        if i == flip_index:
            c -= 1
        if c != 0:
            h = _mix64(h ^ U64(i + 1))
            h = _mix64(h ^ np.uint64(c))
    h = _mix64(h ^ (U64(direction) << U64(32)))
    return np.float64(h) / 18446744073709551616.0


@nb.njit(inline="always", cache=True)
def _quantile(qcode, qp1, qoff, u):
    if qcode == 0:
        return qoff - math.log1p(-u) / qp1
    if qcode == 1:
        return qoff + qp1 * u
    return qoff + qp1


@nb.njit(inline="always", cache=True)
def _coords_hash(cand, dim):
    h = _mix64(_TABLE_SEED ^ _GOLDEN)
    for i in range(dim):
        h = _mix64(h ^ np.uint64(np.int64(cand[i])))
    return h


@nb.njit(cache=True)
def _lookup(table, coords, dim, cand):
    """(slot, vid) — vid = -1 when absent; slot is the probe endpoint."""
    mask = np.int64(len(table) - 1)
    idx = np.int64(_coords_hash(cand, dim) & U64(mask))
    while True:
        vid = table[idx]
        if vid == -1:
            return idx, np.int64(-1)
        same = True
        for i in range(dim):
            if coords[vid, i] != cand[i]:
                same = False
                break
        if same:
            return idx, np.int64(vid)
        idx = (idx + 1) & mask


@nb.njit(inline="always", cache=True)
def _heap_less(hdist, hvid, coords, dim, a, b):
    if hdist[a] != hdist[b]:
        return hdist[a] < hdist[b]
    va, vb = hvid[a], hvid[b]
    for i in range(dim):
        if coords[va, i] != coords[vb, i]:
            return coords[va, i] < coords[vb, i]
    return False


@nb.njit(cache=True)
def _sift_up(hdist, hvid, coords, dim, i):
    while i > 0:
        parent = (i - 1) >> 1
        if _heap_less(hdist, hvid, coords, dim, i, parent):
            hdist[i], hdist[parent] = hdist[parent], hdist[i]
            hvid[i], hvid[parent] = hvid[parent], hvid[i]
            i = parent
        else:
            break


@nb.njit(cache=True)
def _sift_down(hdist, hvid, coords, dim, n):
    i = 0
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        small = l
        r = l + 1
        if r < n and _heap_less(hdist, hvid, coords, dim, r, l):
            small = r
        if _heap_less(hdist, hvid, coords, dim, small, i):
            hdist[i], hdist[small] = hdist[small], hdist[i]
            hvid[i], hvid[small] = hvid[small], hvid[i]
            i = small
        else:
            break


@nb.njit(cache=True)
def _kernel(dim, seed, qcode, qp1, qoff, tcode, tparam, tcoords,
            has_box, box_lo, box_hi, max_settled, max_time, has_max_time):
    INF = np.inf
    ncap = 1 << 14
    coords = np.zeros((ncap, dim), dtype=np.int32)
    dist = np.full(ncap, INF, dtype=np.float64)
    settled = np.zeros(ncap, dtype=np.uint8)
    nvert = 0

    tcap = 1 << 15
    table = np.full(tcap, -1, dtype=np.int64)

    hcap = 1 << 14
    hdist = np.zeros(hcap, dtype=np.float64)
    hvid = np.zeros(hcap, dtype=np.int64)
    hn = 0

    cand = np.zeros(dim, dtype=np.int32)

    # origin
    slot, vid = _lookup(table, coords, dim, cand)
    table[slot] = nvert
    vid = nvert
    nvert += 1
    dist[vid] = 0.0
    hdist[0] = 0.0
    hvid[0] = vid
    hn = 1

    best = INF
    settled_count = np.int64(0)
    exact = False

    while hn > 0:
        dv = hdist[0]
        v = hvid[0]
        hn -= 1
        hdist[0] = hdist[hn]
        hvid[0] = hvid[hn]
        _sift_down(hdist, hvid, coords, dim, hn)
        if settled[v] == 1:
            continue
        if tcode == 3 and dv >= best:
            exact = True
            break
        settled[v] = 1
        settled_count += 1

        hit = False
        if tcode == 0:
            hit = True
            for i in range(dim):
                if coords[v, i] != tcoords[i]:
                    hit = False
                    break
        elif tcode == 1:
            hit = coords[v, 0] == tparam
        elif tcode == 2:
            s = np.int64(0)
            for i in range(dim):
                s += coords[v, i]
            hit = s == tparam
        if hit:
            best = dv
            exact = True
            break
        if tcode == 3:
            w = _quantile(qcode, qp1, qoff, _edge_u(seed, dim, coords, v, -1, 1))
            if dv + w < best:
                best = dv + w
        if settled_count >= max_settled:
            break
        if has_max_time and dv > max_time:
            break

        for i in range(dim):
            if tcode == 3 and i == 0:
                continue
            for step in (1, -1):
                cnew = coords[v, i] + step
                if has_box and (cnew < box_lo[i] or cnew > box_hi[i]):
                    continue
                for j in range(dim):
                    cand[j] = coords[v, j]
                cand[i] = cnew
                slot, uid = _lookup(table, coords, dim, cand)
                if uid == -1:
                    if nvert == ncap:                       # grow vertex store
                        ncap2 = ncap * 2
                        coords2 = np.zeros((ncap2, dim), dtype=np.int32)
                        coords2[:ncap] = coords
                        dist2 = np.full(ncap2, INF, dtype=np.float64)
                        dist2[:ncap] = dist
                        settled2 = np.zeros(ncap2, dtype=np.uint8)
                        settled2[:ncap] = settled
                        coords, dist, settled, ncap = coords2, dist2, settled2, ncap2
                    if nvert * 10 >= tcap * 7:              # rebuild hash table
                        tcap2 = tcap * 4
                        table2 = np.full(tcap2, -1, dtype=np.int64)
                        mask2 = np.int64(tcap2 - 1)
                        for w2 in range(nvert):
                            idx = np.int64(_coords_hash(coords[w2], dim) & U64(mask2))
                            while table2[idx] != -1:
                                idx = (idx + 1) & mask2
                            table2[idx] = w2
                        table, tcap = table2, tcap2
                        slot, uid = _lookup(table, coords, dim, cand)
                    uid = nvert
                    table[slot] = uid
                    for j in range(dim):
                        coords[uid, j] = cand[j]
                    nvert += 1
                if settled[uid] == 1:
                    continue
                flip = i if step == -1 else -1
                du = dv + _quantile(qcode, qp1, qoff,
                                    _edge_u(seed, dim, coords, v, flip, i + 1))
                if du < dist[uid]:
                    dist[uid] = du
                    if hn == hcap:
                        hcap2 = hcap * 2
                        hdist2 = np.zeros(hcap2, dtype=np.float64)
                        hdist2[:hcap] = hdist
                        hvid2 = np.zeros(hcap2, dtype=np.int64)
                        hvid2[:hcap] = hvid
                        hdist, hvid, hcap = hdist2, hvid2, hcap2
                    hdist[hn] = du
                    hvid[hn] = uid
                    hn += 1
                    _sift_up(hdist, hvid, coords, dim, hn - 1)
                    # tentative upper bound on the target in case a cap trips
                    if du < best:
                        if tcode == 0:
                            h2 = True
                            for j in range(dim):
                                if cand[j] != tcoords[j]:
                                    h2 = False
                                    break
                            if h2:
                                best = du
                        elif tcode == 1:
                            if cand[0] == tparam:
                                best = du
                        elif tcode == 2:
                            s2 = np.int64(0)
                            for j in range(dim):
                                s2 += cand[j]
                            if s2 == tparam:
                                best = du
    else_exhausted = hn == 0 and not exact
    if else_exhausted and tcode == 3:
        exact = True
    return best, settled_count, exact


def _encode_quantile(spec: DistributionSpec) -> Optional[Tuple[int, float, float]]:
    """(code, p1, offset) for the kernel's closed-form quantiles."""
    offset = 0.0
    s = spec
    if s.kind == "shifted":
        offset = s.params[0]
        s = s.base
    if s.kind == "exponential":
        return 0, s.params[0], offset
    if s.kind == "uniform":
        return 1, s.params[0], offset
    if s.kind == "deterministic":
        return 2, s.params[0], offset
    return None


def supported(d: int, spec: DistributionSpec, caps: SearchCaps) -> bool:
    return d <= _MAX_FAST_DIM and _encode_quantile(spec) is not None


def _encode_target(d: int, target):
    tcoords = np.zeros(d, dtype=np.int32)
    if isinstance(target, PointTarget):
        for i, c in target.vertex.coords:
            tcoords[i - 1] = c
        return 0, 0, tcoords
    if isinstance(target, HyperplaneTarget):
        return 1, target.n, tcoords
    if isinstance(target, DiagonalTarget):
        return 2, target.n * diag_step(d), tcoords
    if isinstance(target, SlabTarget):
        return 3, 0, tcoords
    raise TypeError(f"unknown target {target!r}")


def _encode_box(d: int, box: Optional[Box]):
    lo = np.full(d, -_UNBOUNDED, dtype=np.int64)
    hi = np.full(d, _UNBOUNDED, dtype=np.int64)
    if box is None:
        return False, lo, hi
    for i in range(1, d + 1):
        w = box.window(i)
        if w is not None:
            lo[i - 1], hi[i - 1] = w
    return True, lo, hi


def first_passage_fast(d: int, target, master_seed: int, spec: DistributionSpec,
                       caps: SearchCaps = SearchCaps()) -> PassageSample:
    qcode, qp1, qoff = _encode_quantile(spec)
    tcode, tparam, tcoords = _encode_target(d, target)
    box = caps.coordinate_box
    if box is not None and not box.contains(Vertex.origin(d)):
        raise DegenerateCaps("coordinate box excludes the origin")
    has_box, lo, hi = _encode_box(d, box)
    max_settled = caps.max_settled if caps.max_settled is not None else np.iinfo(np.int64).max
    has_mt = caps.max_time is not None
    best, settled_count, exact = _kernel(
        d, U64(master_seed & ((1 << 64) - 1)), qcode, qp1, qoff,
        tcode, np.int64(tparam), tcoords,
        has_box, lo, hi, np.int64(max_settled),
        float(caps.max_time) if has_mt else 0.0, has_mt,
    )
    if exact and box is not None:
        exact = False    # exactness under a box is certified by doubling only
    return PassageSample(float(best), target.kind, int(settled_count),
                         master_seed, bool(exact))
