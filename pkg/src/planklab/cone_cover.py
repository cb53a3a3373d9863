"""Conical plank families over (xi, xi^k) in R^3: sector coverings, centered planks,
shell decomposition, ends, wave-envelope boxes, and the sector-flattening linear map.

Every plank is the image of a coefficient box under four generator vectors
    c(xi) = (xi, xi^k, 1), t(xi) = (1, f'(xi), 0), n(xi) = (-f'(xi), 1, 0), n3 = (0, 0, 1);
membership tests solve the (overdetermined in coefficients, 3-dim in space) system
exactly by intersecting intervals in the height coefficient a.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .curve_cover import (C0, base_point_layout, normal_half_factor,
                          tangential_length_unchecked)
from .dyadic import rng_from

C_CP = 30              # centered-plank width constant (paired with fine-plank d=3)
ENDS_H_FRAC = 1.0 / 16  # "low height" threshold: h <= sigma^2/16
END_BRACKET = (0.25, 1.0)  # end = tangential coefficient in +-[half_b/4, half_b]
_EPS = 1e-12


def _fprime(k, xi):
    return k * xi ** (k - 1)


@dataclass(frozen=True)
class Plank3:
    k: int
    delta: float
    base_xi1: float
    half_b: float
    half_c: float
    a_range: tuple = (0.5, 1.0)
    block_K: float = 0.0

    @property
    def frame(self):
        # t and n are unit vectors so half_b / half_c are literal distances
        x = self.base_xi1
        fp = _fprime(self.k, x)
        nt = math.hypot(1.0, fp)
        return {"c": (x, x**self.k, 1.0), "t": (1.0 / nt, fp / nt, 0.0),
                "n": (-fp / nt, 1.0 / nt, 0.0), "n3": (0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class CenteredPlank3:
    k: int
    r: float
    sigma: float
    base_xi1: float
    half_b: float
    half_c: float
    block_K: float = 0.0

    @property
    def a_half(self):
        return self.sigma**2

    @property
    def frame(self):
        # t and n are unit vectors so half_b / half_c are literal distances
        x = self.base_xi1
        fp = _fprime(self.k, x)
        nt = math.hypot(1.0, fp)
        return {"c": (x, x**self.k, 1.0), "t": (1.0 / nt, fp / nt, 0.0),
                "n": (-fp / nt, 1.0 / nt, 0.0), "n3": (0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class SliceRect:
    h: float
    base_xi1: float
    k: int
    l_lo: float       # tangential coefficient bracket (signed: lo may be negative)
    l_hi: float
    half_c: float

    def contains(self, point2, dilation=1.0):
        """point2 in R^2; coefficient solve p = h*gamma + l*gammadot + c*unit normal."""
        x = self.base_xi1
        fp = _fprime(self.k, x)
        nt2 = 1.0 + fp * fp
        dx = point2[0] - self.h * x
        dy = point2[1] - self.h * x**self.k
        l = (dx + dy * fp) / math.sqrt(nt2)
        c = (-dx * fp + dy) / math.sqrt(nt2)
        lo, hi = self.l_lo, self.l_hi
        mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo) * dilation
        return abs(l - mid) <= rad + _EPS and abs(c) <= dilation * self.half_c + _EPS


@dataclass
class PlankFamily3:
    """Columnar arrays for a list of planks sharing (k, a_mid, a_half semantics)."""
    k: int
    planks: list
    a_mid: np.ndarray
    a_half: np.ndarray
    _cols: dict = field(default_factory=dict, repr=False)

    def cols(self):
        if not self._cols:
            P = self.planks
            base = np.array([p.base_xi1 for p in P])
            fp = _fprime(self.k, base)
            self._cols = {
                "base": base, "fp": fp,
                "g1": base, "g2": base**self.k,
                "nt2": 1.0 + fp * fp,
                "hb": np.array([p.half_b for p in P]),
                "hc": np.array([p.half_c for p in P]),
                "K": np.array([p.block_K for p in P]),
            }
        return self._cols

    def contains(self, point, dilation=1.0):
        """Boolean array: point in dilation*plank, solved as interval intersection in a.

        b and c1 are literal distances along the unit tangent/normal of the base point.
        """
        w1, w2, w3 = point
        C = self.cols()
        S = float(dilation)
        nt = np.sqrt(C["nt2"])
        # affine coefficient functions of a:  b(a) = b0 - a*gt,  c1(a) = c0 - a*gn
        b0 = (w1 + w2 * C["fp"]) / nt
        c0 = (-w1 * C["fp"] + w2) / nt
        gt = (C["g1"] + C["g2"] * C["fp"]) / nt
        gn = (-C["g1"] * C["fp"] + C["g2"]) / nt
        lo = self.a_mid - S * self.a_half
        hi = self.a_mid + S * self.a_half
        lo = np.maximum(lo, w3 - S * C["hc"])          # |w3 - a| <= S*hc
        hi = np.minimum(hi, w3 + S * C["hc"])
        for v0, g, bnd in ((b0, gt, S * C["hb"]), (c0, gn, S * C["hc"])):
            with np.errstate(divide="ignore", invalid="ignore"):
                l1 = (v0 - bnd) / g
                l2 = (v0 + bnd) / g
            ivlo = np.minimum(l1, l2)
            ivhi = np.maximum(l1, l2)
            flat = np.abs(g) < 1e-300
            ok_flat = np.abs(v0) <= bnd + _EPS
            ivlo = np.where(flat, np.where(ok_flat, -np.inf, np.inf), ivlo)
            ivhi = np.where(flat, np.where(ok_flat, np.inf, -np.inf), ivhi)
            lo = np.maximum(lo, ivlo)
            hi = np.minimum(hi, ivhi)
        return lo <= hi + _EPS

    def count_containing(self, points, dilation=1.0):
        """Vectorized over sample points: number of planks containing each point.

        points: array of shape (3, N). Loops over planks, which is cheap because
        families are small compared to sample counts.
        """
        w1, w2, w3 = np.asarray(points)
        C = self.cols()
        S = float(dilation)
        counts = np.zeros(w1.shape, dtype=np.int64)
        for i in range(len(self.planks)):
            nt = math.sqrt(C["nt2"][i])
            fp = C["fp"][i]
            b0 = (w1 + w2 * fp) / nt
            c0 = (-w1 * fp + w2) / nt
            gt = (C["g1"][i] + C["g2"][i] * fp) / nt
            gn = (-C["g1"][i] * fp + C["g2"][i]) / nt
            lo = np.maximum(self.a_mid[i] - S * self.a_half[i], w3 - S * C["hc"][i])
            hi = np.minimum(self.a_mid[i] + S * self.a_half[i], w3 + S * C["hc"][i])
            for v0, g, bnd in ((b0, gt, S * C["hb"][i]), (c0, gn, S * C["hc"][i])):
                if abs(g) < 1e-300:
                    ok = np.abs(v0) <= bnd + _EPS
                    lo = np.where(ok, lo, np.inf)
                else:
                    l1 = (v0 - bnd) / g
                    l2 = (v0 + bnd) / g
                    lo = np.maximum(lo, np.minimum(l1, l2))
                    hi = np.minimum(hi, np.maximum(l1, l2))
            counts += lo <= hi + _EPS
        return counts

    def membership_matrix(self, points, dilation=1.0):
        """(n_planks, N) boolean membership table."""
        w1, w2, w3 = np.asarray(points)
        out = np.zeros((len(self.planks), w1.size), dtype=bool)
        for i in range(len(self.planks)):
            sub = PlankFamily3(self.k, [self.planks[i]],
                               self.a_mid[i:i + 1], self.a_half[i:i + 1])
            cnt = sub.count_containing(points, dilation)
            out[i] = cnt >= 1
        return out


@dataclass
class ConeCover3:
    k: int
    delta: float
    family: PlankFamily3

    @property
    def planks(self):
        return self.family.planks

    def sectors(self):
        out = {}
        for i, p in enumerate(self.planks):
            out.setdefault(p.block_K, []).append(i)
        return out


def build_cone_cover(k, delta):
    """Planks over heights [1/2, 1] with bases from the planar covering layout."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if not (2.0**-20 < delta < 2.0**-2):
        raise ValueError("delta out of supported range (2^-20, 2^-2)")
    hn = normal_half_factor(k) * delta
    planks = [Plank3(k=k, delta=delta, base_xi1=b, block_K=K,
                     half_b=C0 * tangential_length_unchecked(k, delta, b), half_c=hn)
              for b, K in base_point_layout(k, delta)]
    n = len(planks)
    fam = PlankFamily3(k=k, planks=planks,
                       a_mid=np.full(n, 0.75), a_half=np.full(n, 0.25))
    return ConeCover3(k=k, delta=delta, family=fam)


def verify_cone_cover(cover, n_samples, seed):
    """Sample the delta-neighbourhood of the cone over heights [1/2, 1]."""
    rng = rng_from(seed, 2)
    k, d = cover.k, cover.delta
    xi = rng.uniform(-1.0, 1.0, n_samples)
    h = rng.uniform(0.5, 1.0, n_samples)
    u = rng.uniform(-d, d, n_samples)
    fp = k * xi ** (k - 1)
    # surface normal c x cdot = (-f', 1, xi f' - xi^k), normalized
    nu = np.stack([-fp, np.ones_like(xi), xi * fp - xi**k])
    nu /= np.linalg.norm(nu, axis=0)
    pts = np.stack([h * xi, h * xi**k, h]) + u * nu
    counts = cover.family.count_containing(pts)
    return {"n_samples": n_samples,
            "covered_fraction": float(np.mean(counts >= 1)),
            "max_multiplicity": int(counts.max())}


def _check_sigma(r, sigma):
    j = math.log2(sigma)
    if abs(j - round(j)) > 1e-9 or not (1.0 / r - _EPS <= sigma <= 1.0 + _EPS):
        raise ValueError("sigma must be dyadic in [1/r, 1]")


def build_centered_planks(k, r, sigma, C=C_CP):
    """Origin-symmetric planks at scale sigma with bases at scale (r*sigma)^-2."""
    _check_sigma(r, sigma)
    delta_s = 1.0 / (r * sigma) ** 2
    planks = [CenteredPlank3(k=k, r=r, sigma=sigma, base_xi1=b, block_K=K,
                             half_b=C * sigma**2 * tangential_length_unchecked(k, delta_s, b),
                             half_c=C / r**2)
              for b, K in base_point_layout(k, delta_s)]
    n = len(planks)
    return PlankFamily3(k=k, planks=planks, a_mid=np.zeros(n),
                        a_half=np.full(n, sigma**2))


def sigma_scales(r):
    n = round(math.log2(r))
    return [2.0**-j for j in range(n, -1, -1)]


def cp_prime(family, K):
    """Curvature-restricted subfamily: planks whose base lies in the K block."""
    idx = [i for i, p in enumerate(family.planks) if p.block_K == K]
    planks = [family.planks[i] for i in idx]
    return PlankFamily3(k=family.k, planks=planks,
                        a_mid=family.a_mid[idx], a_half=family.a_half[idx])


def sigma0_cutoff(k, r, K):
    """Smallest dyadic sigma whose K block holds >= 4 centered planks."""
    for s in sigma_scales(r):
        fam = build_centered_planks(k, r, s)
        if sum(1 for p in fam.planks if p.block_K == K) >= 4:
            return s
    return None


@dataclass
class HighLow3:
    """All centered-plank families of one (k, r) High-Low decomposition."""
    k: int
    r: float
    families: dict = field(default_factory=dict)  # sigma -> PlankFamily3

    def family(self, sigma):
        if sigma not in self.families:
            self.families[sigma] = build_centered_planks(self.k, self.r, sigma)
        return self.families[sigma]

    def in_union(self, point, sigma, S=1.0):
        return bool(np.any(self.family(sigma).contains(point, S)))


def omega_membership(point, k, r, sigma, highlow=None):
    """Shell classification of one point.

    The shell at scale sigma is the cumulative set difference
        Omega_sigma = U(<=sigma) \\ U(<=sigma/2),   U(<=s) = union over s' <= s of CP_s',
    which partitions U(<=1) exactly; in_union_sigma / in_union_half report the
    single-scale unions.
    """
    hl = highlow or HighLow3(k=k, r=r)
    _check_sigma(r, sigma)
    in_cur = hl.in_union(point, sigma)
    half = sigma / 2.0
    in_half = half >= 1.0 / r - _EPS and hl.in_union(point, half)
    below = any(hl.in_union(point, s) for s in sigma_scales(r) if s < sigma - _EPS)
    return {"in_union_sigma": in_cur, "in_union_half": in_half,
            "in_omega": in_cur and not below}


def shell_memberships(point, k, r, highlow=None):
    """List of sigma whose Omega shell contains the point (always 0 or 1 entries
    under the cumulative shell definition)."""
    hl = highlow or HighLow3(k=k, r=r)
    seen = False
    out = []
    for s in sigma_scales(r):
        cur = hl.in_union(point, s)
        if cur and not seen:
            out.append(s)
        seen = seen or cur
    return out


@dataclass(frozen=True)
class OverlapCount:
    count_same_K: int
    count_total: int
    K: float
    in_omega: bool


def omega_overlap_count(point, k, r, sigma, S, highlow=None):
    """Count centered planks whose S-dilate contains the point; same-K = worst K group."""
    hl = highlow or HighLow3(k=k, r=r)
    fam = hl.family(sigma)
    mem = omega_membership(point, k, r, sigma, hl)
    hits = fam.contains(point, S)
    total = int(np.sum(hits))
    Ks = fam.cols()["K"][hits]
    if total == 0:
        return OverlapCount(0, 0, 0.0, mem["in_omega"])
    vals, cnts = np.unique(Ks, return_counts=True)
    j = int(np.argmax(cnts))
    return OverlapCount(int(cnts[j]), total, float(vals[j]), mem["in_omega"])


def ends(cp, h):
    """(LE, RE) slice rectangles of a centered plank at low height h."""
    if not (0.0 <= h <= cp.a_half * ENDS_H_FRAC + _EPS):
        raise ValueError("ends are defined only for h <= sigma^2/16")
    lo = END_BRACKET[0] * cp.half_b
    hi = END_BRACKET[1] * cp.half_b
    le = SliceRect(h=h, base_xi1=cp.base_xi1, k=cp.k, l_lo=-hi, l_hi=-lo, half_c=cp.half_c)
    re = SliceRect(h=h, base_xi1=cp.base_xi1, k=cp.k, l_lo=lo, l_hi=hi, half_c=cp.half_c)
    return le, re


def plank_slice(p, h):
    """2D slice of a plank at omega3 = h (dominant terms; the a-slack along gamma
    is absorbed into the tangential bracket for centered planks)."""
    if isinstance(p, CenteredPlank3):
        if abs(h) > p.a_half + _EPS:
            raise ValueError("height outside the plank")
        return SliceRect(h=h, base_xi1=p.base_xi1, k=p.k,
                         l_lo=-p.half_b, l_hi=p.half_b, half_c=p.half_c)
    if not (p.a_range[0] - p.half_c <= h <= p.a_range[1] + p.half_c + _EPS):
        raise ValueError("height outside the plank")
    return SliceRect(h=h, base_xi1=p.base_xi1, k=p.k,
                     l_lo=-p.half_b, l_hi=p.half_b, half_c=p.half_c)


# --- difference planks (Fourier supports of |f_theta|^2) ----------------------

def difference_plank(p):
    """theta - theta: origin-symmetric, doubled half-lengths, heights [-1/2, 1/2]."""
    return CenteredPlank3(k=p.k, r=1.0 / math.sqrt(p.delta), sigma=1.0,
                          base_xi1=p.base_xi1, half_b=2 * p.half_b,
                          half_c=2 * p.half_c, block_K=p.block_K)


def difference_family(cover):
    planks = [difference_plank(p) for p in cover.planks]
    n = len(planks)
    return PlankFamily3(k=cover.k, planks=planks, a_mid=np.zeros(n),
                        a_half=np.full(n, 0.5))


def sample_difference_points(cover, n_samples, seed):
    """Uniform coefficient samples from the difference planks of a cone cover."""
    rng = rng_from(seed, 3)
    fam = difference_family(cover)
    idx = rng.integers(0, len(fam.planks), n_samples)
    pts = np.empty((3, n_samples))
    for j in range(n_samples):
        p = fam.planks[idx[j]]
        f = p.frame
        a = rng.uniform(-0.5, 0.5)
        b = rng.uniform(-p.half_b, p.half_b)
        c1 = rng.uniform(-p.half_c, p.half_c)
        c2 = rng.uniform(-p.half_c, p.half_c)
        pts[:, j] = [a * f["c"][0] + b * f["t"][0] + c1 * f["n"][0],
                     a * f["c"][1] + b * f["t"][1] + c1 * f["n"][1],
                     a + c2]
    return pts, idx


# --- wave envelopes ------------------------------------------------------------

def _orthonormal_frame(plank):
    f = plank.frame
    c = np.array(f["c"])
    t = np.array(f["t"])
    e1 = c / np.linalg.norm(c)
    t2 = t - (t @ e1) * e1
    e2 = t2 / np.linalg.norm(t2)
    e3 = np.cross(e1, e2)
    return np.stack([e1, e2, e3])


def _generators(plank, a_half=None):
    f = plank.frame
    ah = (plank.a_range[1] - plank.a_range[0]) / 2 if a_half is None else a_half
    return np.stack([ah * np.array(f["c"]), plank.half_b * np.array(f["t"]),
                     plank.half_c * np.array(f["n"]), plank.half_c * np.array(f["n3"])])


def extents_along(axes, generators):
    """Zonotope half-extents along unit axes: sum of |g_j . e_i|."""
    return np.abs(generators @ axes.T).sum(axis=0)


@dataclass(frozen=True)
class Box3:
    center: tuple
    axes: tuple        # 3 orthonormal rows
    halves: tuple

    def tile(self, point):
        d = np.asarray(point) - np.asarray(self.center)
        co = np.asarray(self.axes) @ d
        return tuple(int(i) for i in np.floor(co / (2 * np.asarray(self.halves))))


def wave_envelope(tau, r, thetas):
    """Dual box of the fine planks inside a coarse sector tau, in tau's frame."""
    axes = _orthonormal_frame(tau)
    halves = np.zeros(3)
    for th in thetas:
        th_axes = _orthonormal_frame(th)
        ext = extents_along(th_axes, _generators(th))      # theta extents on own axes
        dual = 1.0 / ext                                    # polar box half-lengths
        gen = dual[:, None] * th_axes                       # dual generators
        halves = np.maximum(halves, extents_along(axes, gen))
    return Box3(center=(0.0, 0.0, 0.0), axes=tuple(map(tuple, axes)),
                halves=tuple(halves))


def assign_thetas_to_tau(cover_fine, cover_coarse):
    """Map each fine plank to the coarse plank with nearest base point."""
    cb = np.array([p.base_xi1 for p in cover_coarse.planks])
    out = {i: [] for i in range(len(cb))}
    for th in cover_fine.planks:
        out[int(np.argmin(np.abs(cb - th.base_xi1)))].append(th)
    return out


# --- sector-flattening linear map ----------------------------------------------

@dataclass(frozen=True)
class LorentzMap:
    k: int
    nu: float
    c: float
    matrix: tuple
    jacobian: float
    image_coeffs: tuple   # d_{k,l} for l = 3..k

    @property
    def M(self):
        return self.c * self.nu

    def apply(self, pts):
        return np.asarray(self.matrix) @ np.asarray(pts)

    def f2(self, w):
        w = np.asarray(w, dtype=float)
        out = w**2
        for l, d in enumerate(self.image_coeffs, start=3):
            out = out + d * self.c**(l - 2) * w**l
        return out

    def f2pp(self, w):
        w = np.asarray(w, dtype=float)
        out = 2.0 * np.ones_like(w)
        for l, d in enumerate(self.image_coeffs, start=3):
            out = out + d * self.c**(l - 2) * l * (l - 1) * w**(l - 2)
        return out

    def f2pp_interval(self):
        """Interval-arithmetic bounds of f2'' on [-1, 1]."""
        slack = sum(d * self.c**(l - 2) * l * (l - 1)
                    for l, d in enumerate(self.image_coeffs, start=3))
        return (2.0 - slack, 2.0 + slack)


def c_max(k):
    """Largest c keeping min of f2'' on [-1, 1] at least 1/2 (bisection)."""
    def f2pp_min(c):
        w = np.linspace(-1, 1, 2001)
        out = 2.0 * np.ones_like(w)
        for l in range(3, k + 1):
            out += (math.comb(k, l) / math.comb(k, 2)) * c**(l - 2) * l * (l - 1) * w**(l - 2)
        return out.min()
    lo, hi = 0.0, 1.0
    if f2pp_min(1.0) >= 0.5:
        return 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f2pp_min(mid) >= 0.5:
            lo = mid
        else:
            hi = mid
    return lo


def lorentz_rescale(k, nu, c):
    """Linear map flattening the sector |xi1/xi3 - nu| <= c*nu onto a regular cone.

    Coordinates (omega1, omega2, omega3) = (xi1, tau, xi3);
    xi1' = (xi1 - nu*xi3)/M, xi3' = xi3,
    tau' = (tau - k nu^(k-1) xi1 + (k-1) nu^k xi3) / (C(k,2) M^2 nu^(k-2)).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if not (0 < c):
        raise ValueError("c must be positive")
    if k >= 3 and c >= c_max(k):
        raise ValueError("c too large: image curvature would drop below 1/2")
    if nu <= 0:
        raise ValueError("nu must be positive")
    M = c * nu
    beta = math.comb(k, 2) * M**2 * nu**(k - 2)
    matrix = ((1.0 / M, 0.0, -nu / M),
              (-k * nu**(k - 1) / beta, 1.0 / beta, (k - 1) * nu**k / beta),
              (0.0, 0.0, 1.0))
    coeffs = tuple(math.comb(k, l) / math.comb(k, 2) for l in range(3, k + 1))
    return LorentzMap(k=k, nu=nu, c=c, matrix=matrix,
                      jacobian=1.0 / (M * beta), image_coeffs=coeffs)


def subsector_plank(k, delta, nu, M, xi1):
    """A delta-sector sub-plank of the aperture-M sector: tangential coefficient
    width (delta/M^(k-2))^(1/2), thickness delta, based at xi1."""
    return Plank3(k=k, delta=delta, base_xi1=xi1,
                  half_b=C0 * math.sqrt(delta / M**(k - 2)),
                  half_c=normal_half_factor(k) * delta)


def map_plank_extents(lmap, plank, axes):
    """Half-extents along given orthonormal axes of the image of a plank."""
    gen = _generators(plank)
    img_gen = np.asarray(lmap.matrix) @ gen.T
    return extents_along(np.asarray(axes), img_gen.T)


def subsector_params(k, M):
    """Admissible (nu, c) with c * nu = M, c under the curvature cap, and the
    sector [nu - M, nu + M] meeting the base domain (0, 1]."""
    for frac in (0.45, 0.9, 0.98):
        c = frac * c_max(k)
        nu = M / c
        if c < c_max(k) and nu - M < 1.0:
            return nu, c
    raise ValueError("no admissible sector for this aperture")


def mapped_subplank_report(k, delta, nu, c, xi1):
    """Compare the image of a delta-sector sub-plank with the canonical plank of
    the flattened curve at the mapped base.

    Returns per-axis extent ratios (image / canonical) in the image frame
    (central axis, tangent, normal); centers coincide because the map sends the
    sector's cone onto the cone over the image curve.
    """
    lmap = lorentz_rescale(k, nu, c)
    M = lmap.M
    if not (nu - M <= xi1 <= min(nu + M, 1.0)):
        raise ValueError("base must lie in the sector (and in the domain)")
    dprime = delta / M**k
    if not (0.0 < dprime < 0.25):
        raise ValueError("image scale delta/M^k must lie in (0, 1/4)")
    plank = subsector_plank(k, delta, nu, M, xi1)
    wb = (xi1 - nu) / M
    fp = 2.0 * wb + sum(d * lmap.c**(l - 2) * l * wb**(l - 1)
                        for l, d in enumerate(lmap.image_coeffs, start=3))
    cv = np.array([wb, float(lmap.f2(wb)), 1.0])
    e1 = cv / np.linalg.norm(cv)
    t = np.array([1.0, fp, 0.0])
    t -= (t @ e1) * e1
    e2 = t / np.linalg.norm(t)
    e3 = np.cross(e1, e2)
    axes = np.stack([e1, e2, e3])
    nt = math.hypot(1.0, fp)
    gens = np.stack([0.25 * cv,
                     C0 * math.sqrt(dprime) * np.array([1.0, fp, 0.0]) / nt,
                     normal_half_factor(2) * dprime * np.array([-fp, 1.0, 0.0]) / nt,
                     normal_half_factor(2) * dprime * np.array([0.0, 0.0, 1.0])])
    canonical = extents_along(axes, gens)
    image = map_plank_extents(lmap, plank, axes)
    return {"axis_ratio": image[0] / canonical[0],
            "tangential_ratio": image[1] / canonical[1],
            "normal_ratio": image[2] / canonical[2]}
