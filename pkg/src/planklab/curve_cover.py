"""Anisotropic rectangle coverings of the delta-neighbourhood of (xi, xi^k) in the plane.

The covering uses one rectangle over the flat origin block |xi| <= delta^(1/k) and
adaptively spaced rectangles over dyadic blocks |xi| ~ K, tangential length
delta^(1/2)/|xi|^((k-2)/2), so that each rectangle linearizes the curve with error O(delta).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import rng_from

C0 = 3          # tangential dilation factor of every rect
C_MULT = 8      # covering multiplicity budget


# Normal half-width factors serve two constraints: covering the delta-neighbourhood
# (worst-case curve deviation from the nearest rect's tangent line, measured by a
# dense scan: 1.25, 2.0, 4.24, 4.97 delta for k = 2..5) and keeping the minimal
# block-containment dilation of quadruple solutions at 16 (long boundary rects
# poke out normally by up to ~(c0+1)^2 * k(k-1)/2 * delta against a neighbour's
# frame). Multiplicity stays within budget at these values.
_NORMAL_FACTOR = {2: 2, 3: 3, 4: 8, 5: 12}


def normal_half_factor(k):
    return _NORMAL_FACTOR.get(k, max(C0, math.ceil(1.7**k - 1 - k / 2)))


@dataclass(frozen=True)
class ModelCurve:
    k: int
    domain: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        lo, hi = self.domain
        if lo < -1 or hi > 1 or lo >= hi:
            raise ValueError("domain must be a closed interval inside [-1, 1]")

    def h(self, xi):
        return np.asarray(xi) ** self.k

    def dh(self, xi, order=1):
        k = self.k
        if order > k:
            return np.zeros_like(np.asarray(xi, dtype=float))
        coef = math.perm(k, order)
        return coef * np.asarray(xi, dtype=float) ** (k - order)


@dataclass(frozen=True)
class Rect2:
    center: tuple            # (omega1, omega2)
    tangent_dir: tuple       # unit vector
    normal_dir: tuple        # unit vector
    half_tangential: float
    half_normal: float
    base_xi1: float = 0.0
    block_K: float = 0.0     # 0 marks the origin block

    def corners(self, dilation=1.0):
        cx, cy = self.center
        tx, ty = self.tangent_dir
        nx, ny = self.normal_dir
        ht = dilation * self.half_tangential
        hn = dilation * self.half_normal
        return [(cx + st * ht * tx + sn * hn * nx, cy + st * ht * ty + sn * hn * ny)
                for st in (-1, 1) for sn in (-1, 1)]


@dataclass
class Covering2:
    delta: float
    curve: ModelCurve
    rects: list
    base_points: list
    c0: int = C0
    _arrays: dict = field(default_factory=dict, repr=False)

    @property
    def k(self):
        return self.curve.k

    def arrays(self):
        # cached columnar view for vectorized membership tests
        if not self._arrays:
            R = self.rects
            self._arrays = {
                "cx": np.array([r.center[0] for r in R]),
                "cy": np.array([r.center[1] for r in R]),
                "tx": np.array([r.tangent_dir[0] for r in R]),
                "ty": np.array([r.tangent_dir[1] for r in R]),
                "nx": np.array([r.normal_dir[0] for r in R]),
                "ny": np.array([r.normal_dir[1] for r in R]),
                "ht": np.array([r.half_tangential for r in R]),
                "hn": np.array([r.half_normal for r in R]),
                "base": np.array([r.base_xi1 for r in R]),
            }
        return self._arrays

    def to_json(self):
        return json.dumps({
            "schema": "planklab.covering2/1",
            "k": self.k,
            "delta": self.delta,
            "c0": self.c0,
            "base_points": list(self.base_points),
            "rects": [{
                "center": list(r.center), "tangent": list(r.tangent_dir),
                "normal": list(r.normal_dir), "half_t": r.half_tangential,
                "half_n": r.half_normal, "base_xi1": r.base_xi1, "K": r.block_K,
            } for r in self.rects],
        })

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("schema") != "planklab.covering2/1":
            raise ValueError("unknown covering schema")
        rects = [Rect2(tuple(d["center"]), tuple(d["tangent"]), tuple(d["normal"]),
                       d["half_t"], d["half_n"], d["base_xi1"], d["K"])
                 for d in doc["rects"]]
        return cls(doc["delta"], ModelCurve(doc["k"]), rects, doc["base_points"], doc["c0"])


@dataclass(frozen=True)
class CoverReport:
    n_samples: int
    covered_fraction: float
    max_multiplicity: int
    mean_multiplicity: float


def canonical_tangential_length(k, delta, xi1):
    """delta^(1/k) on the origin block, delta^(1/2)/|xi1|^((k-2)/2) on dyadic blocks."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    if abs(xi1) > 1:
        raise ValueError("|xi1| must be <= 1")
    a = delta ** (1.0 / k)
    x = abs(xi1)
    if x <= a:
        return a
    return math.sqrt(delta) / x ** ((k - 2) / 2.0)


def _frame_at(curve, xi1):
    fp = float(curve.dh(xi1))
    nrm = math.hypot(1.0, fp)
    t = (1.0 / nrm, fp / nrm)
    n = (-fp / nrm, 1.0 / nrm)
    return t, n


def _rect_at(curve, delta, xi1, K):
    t, n = _frame_at(curve, xi1)
    ln = canonical_tangential_length(curve.k, delta, xi1)
    return Rect2(center=(xi1, float(curve.h(xi1))), tangent_dir=t, normal_dir=n,
                 half_tangential=C0 * ln, half_normal=normal_half_factor(curve.k) * delta,
                 base_xi1=xi1, block_K=K)


def _block_edges(a, hi=1.0):
    # dyadic block boundaries in (a, hi]: a, then powers of two, then hi
    edges = [a]
    e = -1
    while 2.0**e > a:
        if 2.0**e < hi:
            edges.append(2.0**e)
        e -= 1
    edges.append(hi)
    return sorted(set(edges))


def tangential_length_unchecked(k, delta, xi1):
    # same formula as canonical_tangential_length but valid for any delta in (0, 1]
    a = delta ** (1.0 / k)
    x = abs(xi1)
    if x <= a:
        return a
    return math.sqrt(delta) / x ** ((k - 2) / 2.0)


def base_point_layout(k, delta):
    """Symmetric base-point layout [(xi1, K), ...] for any delta in (0, 1].

    One origin base, adaptively spaced bases per dyadic block; the boundary base at
    |xi1| = delta^(1/k) belongs to the origin sector (K = 0).
    """
    a = min(delta ** (1.0 / k), 1.0)
    pos = []
    for lo, hi in zip(*(lambda e: (e[:-1], e[1:]))(_block_edges(a))):
        K = hi / 2.0
        x = lo
        bases = []
        while x < hi:
            bases.append(x)
            x += tangential_length_unchecked(k, delta, x)
        if bases and bases[-1] < hi:
            bases.append(hi)  # clamp block end
        pos.extend((b, K) for b in bases)
    # dedupe block-end/block-start duplicates, keep first occurrence
    seen = set()
    pos_unique = []
    for b, K in pos:
        if b not in seen:
            seen.add(b)
            pos_unique.append((b, K))
    pos_unique = [(b, 0.0 if b == a else K) for b, K in pos_unique]
    return [(-b, K) for b, K in reversed(pos_unique)] + [(0.0, 0.0)] + \
           [(b, K) for b, K in pos_unique]


def build_curve_cover(k, delta):
    """Adaptive covering: one origin rect plus left-to-right spaced rects per dyadic block."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if not (2.0**-30 < delta < 2.0**-2):
        raise ValueError("delta out of supported range (2^-30, 2^-2)")
    curve = ModelCurve(k)
    base_pairs = base_point_layout(k, delta)
    rects = [_rect_at(curve, delta, b, K) for b, K in base_pairs]
    return Covering2(delta=float(delta), curve=curve, rects=rects,
                     base_points=[b for b, _ in base_pairs])


def rect_contains(rect, point, dilation=1.0):
    if dilation < 1.0:
        raise ValueError("dilation must be >= 1")
    dx = point[0] - rect.center[0]
    dy = point[1] - rect.center[1]
    along_t = dx * rect.tangent_dir[0] + dy * rect.tangent_dir[1]
    along_n = dx * rect.normal_dir[0] + dy * rect.normal_dir[1]
    # relative slack keeps exact boundary corners inside under fp rounding
    return (abs(along_t) <= dilation * rect.half_tangential * (1 + 1e-9) and
            abs(along_n) <= dilation * rect.half_normal * (1 + 1e-9))


def multiplicity_counts(cov, pts_x, pts_y, dilation=1.0):
    """Vectorized: number of rects containing each sample point."""
    A = cov.arrays()
    counts = np.zeros(len(pts_x), dtype=np.int64)
    for i in range(len(A["cx"])):
        dx = pts_x - A["cx"][i]
        dy = pts_y - A["cy"][i]
        at = dx * A["tx"][i] + dy * A["ty"][i]
        an = dx * A["nx"][i] + dy * A["ny"][i]
        counts += (np.abs(at) <= dilation * A["ht"][i]) & (np.abs(an) <= dilation * A["hn"][i])
    return counts


def verify_neighborhood_cover(cov, n_samples, seed):
    """Sample the delta-neighbourhood uniformly in (xi1, normal offset) and count hits."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = rng_from(seed, 1)
    lo, hi = cov.curve.domain
    xi = rng.uniform(lo, hi, n_samples)
    off = rng.uniform(-cov.delta, cov.delta, n_samples)
    fp = cov.curve.dh(xi)
    nrm = np.hypot(1.0, fp)
    px = xi + off * (-fp / nrm)
    py = cov.curve.h(xi) + off * (1.0 / nrm)
    counts = multiplicity_counts(cov, px, py)
    return CoverReport(n_samples=n_samples,
                       covered_fraction=float(np.mean(counts >= 1)),
                       max_multiplicity=int(counts.max()),
                       mean_multiplicity=float(counts.mean()))


def assign_theta(cov, xi1):
    """Index of the rect with nearest base point; ties go to the smaller index."""
    if np.any(np.abs(xi1) > 1):
        raise ValueError("|xi1| must be <= 1")
    bases = np.asarray(cov.base_points)
    xi_arr = np.atleast_1d(np.asarray(xi1, dtype=float))
    j = np.searchsorted(bases, xi_arr)
    j = np.clip(j, 1, len(bases) - 1)
    left = bases[j - 1]
    right = bases[j]
    # tie at the exact midpoint goes to the earlier (left) base
    pick_left = (xi_arr - left) <= (right - xi_arr)
    idx = np.where(pick_left, j - 1, j)
    return int(idx[0]) if np.isscalar(xi1) or np.asarray(xi1).ndim == 0 else idx
