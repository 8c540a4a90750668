"""Nodal sets and nodal domains of discrete eigenfunctions.

Zero level sets are extracted cell by cell with marching squares and
linear interpolation along sign-changing edges; endpoints are keyed by
the grid edge that carries them, which makes shared endpoints exact and
turns connectivity into union-find over edge keys.  On Dirichlet strips
every chain reaching the outermost interior row is closed off to the
wall, where the eigenfunction vanishes; wall contact points feed the
boundary-trace count.

Hausdorff distances are measured in the eps-independent metric of the
geometry: ``ds^2 + a(s)^2 dt^2`` on the torus and the flat chart metric
``ds^2 + du^2`` on the waveguide (the tube density is dropped there; its
effect is an order-eps correction, below the quantity being measured).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import DegenerateField, EmptySet, NonTransversalZero
from .geometry import BundleGeometry, WarpedTorusGeometry, WaveguideGeometry
from .operators import DiscreteOperator, fiber_nodes, base_nodes

__all__ = [
    "ScalarField",
    "NodalSet",
    "NodalReport",
    "FiberLines",
    "field_from_operator",
    "extract_nodal_set",
    "count_nodal_domains",
    "zeros_of_base",
    "hausdorff_distance",
    "boundary_trace_components",
    "graph_over_fiber_check",
    "nodal_set_to_csv",
]


@dataclass
class ScalarField:
    """Grid samples of a scalar function on one of the testbeds."""

    values: np.ndarray  # (n_s, n_rows)
    s_nodes: np.ndarray
    f_nodes: np.ndarray
    h_s: float
    h_f: float
    s_period: float
    periodic_f: bool
    geometry: Optional[BundleGeometry] = None
    f_min: float = 0.0
    f_max: float = 0.0

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.s_nodes), len(self.f_nodes)):
            raise ValueError("field shape does not match the node arrays")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")


def field_from_operator(op: DiscreteOperator, vec: np.ndarray) -> ScalarField:
    """Reshape an eigenvector of a full operator into a grid field."""
    geom, grid = op.geometry, op.grid
    s, h_s = base_nodes(geom, grid.n_s)
    f, _, h_f = fiber_nodes(geom, grid.n_f)
    periodic_f = not isinstance(geom, WaveguideGeometry)
    values = np.asarray(vec, dtype=float).reshape(grid.n_s, len(f))
    f_min, f_max = (-1.0, 1.0) if not periodic_f else (0.0, geom.fiber_length)
    return ScalarField(
        values=values,
        s_nodes=s,
        f_nodes=f,
        h_s=h_s,
        h_f=h_f,
        s_period=geom.period,
        periodic_f=periodic_f,
        geometry=geom,
        f_min=f_min,
        f_max=f_max,
    )


@dataclass
class NodalSet:
    """Straight segments of the extracted zero level set."""

    segments: np.ndarray  # (m, 2, 2): endpoint coordinates (s, f)
    component_labels: np.ndarray  # (m,)
    component_count: int
    wall_contacts: list[tuple[int, float]] = field(default_factory=list)
    row_crossings: dict[int, np.ndarray] = field(default_factory=dict)
    s_period: float = 0.0
    h_s: float = 0.0
    h_f: float = 0.0
    n_rows: int = 0
    periodic_f: bool = True


@dataclass
class FiberLines:
    """Preimage of finitely many base points: whole fibres."""

    s_positions: np.ndarray

    def __post_init__(self) -> None:
        self.s_positions = np.atleast_1d(np.asarray(self.s_positions, dtype=float))


@dataclass
class NodalReport:
    """Aggregated nodal quantities for one eigenfunction."""

    domain_count: int
    component_count: int
    hausdorff: Optional[float]
    boundary_components: int
    graph_over_fiber: Optional[bool]
    zero_list: list[float]


class UnionFind:
    """Union-find with path halving over hashable keys."""

    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != x:
            self.parent[x] = self.parent.setdefault(p, p)
            x = self.parent[x]
            p = self.parent.setdefault(x, x)
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _circle_dist(a, b, period: float):
    d = np.abs(np.asarray(a) - np.asarray(b)) % period
    return np.minimum(d, period - d)


def extract_nodal_set(fld: ScalarField) -> NodalSet:
    """Marching-squares zero set with union-find component labels.

    Saddle cells are disambiguated by the sign of the cell-centre average.
    Raises :class:`DegenerateField` when more than 1% of the nodes vanish
    exactly; callers resolve that with a half-cell grid offset.
    """
    v = fld.values
    n_s, n_rows = v.shape
    if v.size == 0 or not np.any(v):
        raise ValueError("field is identically zero")
    if np.count_nonzero(v == 0.0) > 0.01 * v.size:
        raise DegenerateField("more than 1% of grid nodes are exactly zero")

    pos = v > 0.0
    cell_rows = n_rows if fld.periodic_f else n_rows - 1

    crossings: dict[tuple, tuple[float, float]] = {}

    def crossing(key: tuple) -> tuple[float, float]:
        if key not in crossings:
            kind, i, j = key
            if kind == "s":
                v0, v1 = v[i, j], v[(i + 1) % n_s, j]
                t = v0 / (v0 - v1)
                crossings[key] = (fld.s_nodes[i] + t * fld.h_s, fld.f_nodes[j])
            else:
                v0, v1 = v[i, j], v[i, (j + 1) % n_rows]
                t = v0 / (v0 - v1)
                crossings[key] = (fld.s_nodes[i], fld.f_nodes[j] + t * fld.h_f)
        return crossings[key]

    # Locate mixed-sign cells with array shifts, then resolve each one.
    pa = pos
    pb = np.roll(pos, -1, axis=0)
    if fld.periodic_f:
        pc = np.roll(pb, -1, axis=1)
        pd = np.roll(pos, -1, axis=1)
    else:
        pc = pb[:, 1:]
        pd = pos[:, 1:]
        pa = pa[:, :-1]
        pb = pb[:, :-1]
    mixed = ~((pa == pb) & (pb == pc) & (pc == pd))
    segments: list[tuple[tuple, tuple]] = []
    for i, j in np.argwhere(mixed):
        i, j = int(i), int(j)
        jn = (j + 1) % n_rows
        sa, sb, sc, sd = pos[i, j], pos[(i + 1) % n_s, j], pos[(i + 1) % n_s, jn], pos[i, jn]
        bottom = ("s", i, j) if sa != sb else None
        top = ("s", i, jn) if sd != sc else None
        left = ("f", i, j) if sa != sd else None
        right = ("f", (i + 1) % n_s, j) if sb != sc else None
        edges = [e for e in (bottom, right, top, left) if e is not None]
        if len(edges) == 2:
            segments.append((edges[0], edges[1]))
        elif len(edges) == 4:
            center_pos = (v[i, j] + v[(i + 1) % n_s, j] + v[(i + 1) % n_s, jn] + v[i, jn]) > 0.0
            if center_pos == sa:
                # diagonal A-C joins through the centre; isolate B and D
                segments.append((bottom, right))
                segments.append((top, left))
            else:
                segments.append((bottom, left))
                segments.append((top, right))

    uf = UnionFind()
    for e0, e1 in segments:
        uf.union(e0, e1)

    seg_coords = np.empty((len(segments), 2, 2))
    labels = np.empty(len(segments), dtype=int)
    roots: dict = {}
    f_period = fld.h_f * n_rows if fld.periodic_f else None
    for m, (e0, e1) in enumerate(segments):
        p0 = crossing(e0)
        p1 = list(crossing(e1))
        # both endpoints live in one cell; unwrap across a periodic seam
        if abs(p1[0] - p0[0]) > 0.5 * fld.s_period:
            p1[0] -= np.copysign(fld.s_period, p1[0] - p0[0])
        if f_period is not None and abs(p1[1] - p0[1]) > 0.5 * f_period:
            p1[1] -= np.copysign(f_period, p1[1] - p0[1])
        seg_coords[m, 0] = p0
        seg_coords[m, 1] = p1
        r = uf.find(e0)
        labels[m] = roots.setdefault(r, len(roots))

    wall_contacts: list[tuple[int, float]] = []
    if not fld.periodic_f and segments:
        extra_coords, extra_labels = [], []
        seen: set = set()
        for e0, e1 in segments:
            for e in (e0, e1):
                kind, i, j = e
                if kind != "s" or e in seen:
                    continue
                if j == 0 or j == n_rows - 1:
                    seen.add(e)
                    s_pos, f_pos = crossings[e]
                    wall = -1 if j == 0 else 1
                    extra_coords.append(((s_pos, f_pos), (s_pos, float(wall))))
                    extra_labels.append(roots[uf.find(e)])
                    wall_contacts.append((wall, s_pos))
        if extra_coords:
            seg_coords = np.concatenate([seg_coords, np.asarray(extra_coords)], axis=0)
            labels = np.concatenate([labels, np.asarray(extra_labels, dtype=int)])

    row_cross: dict[int, np.ndarray] = {}
    for (kind, i, j), (s_pos, _) in crossings.items():
        if kind == "s":
            row_cross.setdefault(j, []).append(s_pos)
    row_cross = {j: np.sort(np.asarray(ss)) for j, ss in row_cross.items()}

    return NodalSet(
        segments=seg_coords,
        component_labels=labels,
        component_count=len(roots),
        wall_contacts=wall_contacts,
        row_crossings=row_cross,
        s_period=fld.s_period,
        h_s=fld.h_s,
        h_f=fld.h_f,
        n_rows=n_rows,
        periodic_f=fld.periodic_f,
    )


def count_nodal_domains(fld: ScalarField) -> int:
    """Connected components of same-strict-sign nodes under 4-adjacency."""
    v = fld.values
    n_s, n_rows = v.shape
    sign = np.sign(v).astype(np.int8)
    idx = np.arange(v.size).reshape(n_s, n_rows)

    pairs = []
    right = (sign != 0) & (sign == np.roll(sign, -1, axis=0))
    pairs.append((idx[right], np.roll(idx, -1, axis=0)[right]))
    if fld.periodic_f:
        up = (sign != 0) & (sign == np.roll(sign, -1, axis=1))
        pairs.append((idx[up], np.roll(idx, -1, axis=1)[up]))
    else:
        up = (sign[:, :-1] != 0) & (sign[:, :-1] == sign[:, 1:])
        pairs.append((idx[:, :-1][up], idx[:, 1:][up]))

    rows = np.concatenate([p[0] for p in pairs])
    cols = np.concatenate([p[1] for p in pairs])
    graph = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(v.size, v.size))
    _, labels = connected_components(graph, directed=False)
    return int(len(np.unique(labels[(sign != 0).ravel()])))


def zeros_of_base(values: np.ndarray, s_nodes: np.ndarray, period: float) -> list[tuple[float, float]]:
    """Zero crossings of a periodic 1D function with slopes.

    Crossings are linearly interpolated between sign changes; slopes come
    from centered differences.  A zero whose slope is below 1e-6 of the
    derivative scale raises :class:`NonTransversalZero`.
    """
    psi = np.asarray(values, dtype=float)
    n = len(psi)
    h = period / n
    dpsi = (np.roll(psi, -1) - np.roll(psi, 1)) / (2.0 * h)
    scale = float(np.max(np.abs(dpsi))) if n else 0.0

    out: list[tuple[float, float]] = []
    for i in range(n):
        v0, v1 = psi[i], psi[(i + 1) % n]
        if v0 == 0.0:
            out.append((float(s_nodes[i]), float(dpsi[i])))
        elif v0 * v1 < 0.0:
            t = v0 / (v0 - v1)
            slope = (1.0 - t) * dpsi[i] + t * dpsi[(i + 1) % n]
            out.append((float(s_nodes[i] + t * h), float(slope)))
    for s, slope in out:
        if abs(slope) < 1e-6 * scale:
            raise NonTransversalZero(f"zero at s={s:.6g} has slope {slope:.3e}")
    return out


def _sample_nodal(nodal: NodalSet, geom: BundleGeometry, spacing: float) -> np.ndarray:
    if len(nodal.segments) == 0:
        return np.zeros((0, 2))
    stretch = 1.0
    if isinstance(geom, WarpedTorusGeometry):
        stretch = max(1.0, float(np.exp(geom.warp.max_abs_bound)) if geom.warp_is_exp
                      else geom.warp.max_abs_bound)
    pts = []
    for p0, p1 in nodal.segments:
        length = float(np.hypot(p1[0] - p0[0], stretch * (p1[1] - p0[1])))
        n = max(2, int(np.ceil(length / spacing)) + 1)
        t = np.linspace(0.0, 1.0, n)[:, None]
        pts.append(p0[None, :] * (1.0 - t) + p1[None, :] * t)
    return np.concatenate(pts, axis=0)


def _sample_fibers(lines: FiberLines, geom: BundleGeometry, spacing: float) -> np.ndarray:
    if len(lines.s_positions) == 0:
        return np.zeros((0, 2))
    if isinstance(geom, WaveguideGeometry):
        f_lo, f_hi = -1.0, 1.0
        stretch = 1.0
    else:
        f_lo, f_hi = 0.0, geom.fiber_length
        stretch = max(1.0, float(np.exp(geom.warp.max_abs_bound)) if geom.warp_is_exp
                      else geom.warp.max_abs_bound)
    n = max(2, int(np.ceil((f_hi - f_lo) * stretch / spacing)) + 1)
    f = np.linspace(f_lo, f_hi, n)
    pts = [np.column_stack([np.full(n, s), f]) for s in lines.s_positions]
    return np.concatenate(pts, axis=0)


def _sample_set(obj, geom: BundleGeometry, spacing: float) -> np.ndarray:
    if isinstance(obj, NodalSet):
        return _sample_nodal(obj, geom, spacing)
    if isinstance(obj, FiberLines):
        return _sample_fibers(obj, geom, spacing)
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 1:
        return _sample_fibers(FiberLines(arr), geom, spacing)
    return arr


def _directed_sup_inf(p: np.ndarray, q: np.ndarray, geom: BundleGeometry) -> float:
    period = geom.period
    torus = isinstance(geom, WarpedTorusGeometry)
    fiber_period = geom.fiber_length if torus else None
    worst = 0.0
    for start in range(0, len(p), 512):
        pc = p[start : start + 512]
        ds = pc[:, 0][:, None] - q[:, 0][None, :]
        ds -= period * np.round(ds / period)
        df = pc[:, 1][:, None] - q[:, 1][None, :]
        if fiber_period is not None:
            df -= fiber_period * np.round(df / fiber_period)
        if torus:
            mid = q[:, 0][None, :] + 0.5 * ds
            wt = geom.warp_value(np.mod(mid, period))
            d2 = ds * ds + (wt * df) ** 2
        else:
            d2 = ds * ds + df * df
        worst = max(worst, float(np.sqrt(np.min(d2, axis=1)).max()))
    return worst


def hausdorff_distance(set_a, set_b, geom: BundleGeometry, sampling: float) -> float:
    """Symmetric sup-inf distance between two sampled sets.

    Both sets are densified to spacing at most ``sampling`` and nearby
    distances use the chart metric at the segment midpoint.
    """
    if sampling <= 0.0:
        raise ValueError("sampling spacing must be positive")
    pa = _sample_set(set_a, geom, sampling)
    pb = _sample_set(set_b, geom, sampling)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptySet("hausdorff distance of an empty set")
    return max(_directed_sup_inf(pa, pb, geom), _directed_sup_inf(pb, pa, geom))


def boundary_trace_components(nodal: NodalSet, geom: WaveguideGeometry) -> int:
    """Clusters of nodal wall contacts, merged within one cell width."""
    if not isinstance(geom, WaveguideGeometry):
        raise ValueError("boundary traces require a geometry with boundary")
    merge = nodal.h_s * (1.0 + 1e-9)
    total = 0
    for wall in (-1, 1):
        ss = np.sort(np.asarray([s for w, s in nodal.wall_contacts if w == wall]))
        if len(ss) == 0:
            continue
        gaps = np.diff(ss)
        clusters = 1 + int(np.count_nonzero(gaps > merge))
        if len(ss) > 1 and clusters > 1:
            wrap_gap = nodal.s_period - (ss[-1] - ss[0])
            if wrap_gap <= merge:
                clusters -= 1
        total += clusters
    return total


def graph_over_fiber_check(nodal: NodalSet, zero_list, tube_radius: float) -> bool:
    """Is the nodal set a union of fibre-like graphs over the predicted zeros?

    True iff every segment stays within ``tube_radius`` (base distance) of
    some predicted zero, each tube crosses every fibre grid row exactly
    once, and the component count equals the number of zeros.
    """
    zeros = np.asarray([z[0] if isinstance(z, tuple) else z for z in zero_list], dtype=float)
    if nodal.component_count != len(zeros):
        return False
    if len(zeros) == 0:
        return len(nodal.segments) == 0
    period = nodal.s_period

    seg_s = nodal.segments[:, :, 0].ravel()
    if len(seg_s):
        dmin = np.min(_circle_dist(seg_s[:, None], zeros[None, :], period), axis=1)
        if float(dmin.max()) > tube_radius:
            return False

    for j in range(nodal.n_rows):
        ss = nodal.row_crossings.get(j, np.zeros(0))
        if len(ss) == 0:
            return False
        d = _circle_dist(ss[:, None], zeros[None, :], period)
        in_tube = d <= tube_radius
        if np.any(~np.any(in_tube, axis=1)):
            return False
        if np.any(np.count_nonzero(in_tube, axis=0) != 1):
            return False
    return True


def nodal_set_to_csv(nodal: NodalSet) -> str:
    """Segments as ``s0,f0,s1,f1,component`` rows."""
    lines = ["s0,f0,s1,f1,component"]
    for (p0, p1), lab in zip(nodal.segments, nodal.component_labels):
        lines.append(f"{p0[0]:.17g},{p0[1]:.17g},{p1[0]:.17g},{p1[1]:.17g},{int(lab)}")
    return "\n".join(lines) + "\n"
