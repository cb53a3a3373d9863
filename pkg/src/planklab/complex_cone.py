"""Plank coverings in R^5 for the cone over the complex curve z -> (z, z^2):
fine planks, centered planks, shell decomposition, complex ends, and the
alternating-ends sign check.

Frame at base z = (s, t):
    c   = (s, t, s^2 - t^2, 2st, 1),
    t_s = (1, 0, 2s, 2t, 0),   t_t = (0, 1, -2t, 2s, 0),
    n_s = (-2s, 2t, 1, 0, 0),  n_t = (-2t, -2s, 0, 1, 0),  n5 = (0, 0, 0, 0, 1).
The five direction vectors are pairwise orthogonal and the four non-vertical
ones share the norm sqrt(1 + 4(s^2 + t^2)); planks use unit directions so the
half-lengths are literal distances. Membership is solved exactly as an interval
intersection in the height coefficient a, as in the R^3 module.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .cone_cover import C_CP, END_BRACKET, ENDS_H_FRAC, _check_sigma, _EPS, sigma_scales
from .curve_cover import C0
from .dyadic import rng_from


def _norm4(s, t):
    return np.sqrt(1.0 + 4.0 * (s * s + t * t))


@dataclass(frozen=True)
class Plank5:
    R: float
    base_s: float
    base_t: float
    half_b: float       # both tangential half-lengths
    half_c: float       # both normal and the vertical half-length
    a_range: tuple = (0.5, 1.0)

    @property
    def frame(self):
        s, t = self.base_s, self.base_t
        nt = float(_norm4(s, t))
        return {"c": (s, t, s * s - t * t, 2 * s * t, 1.0),
                "ts": (1 / nt, 0.0, 2 * s / nt, 2 * t / nt, 0.0),
                "tt": (0.0, 1 / nt, -2 * t / nt, 2 * s / nt, 0.0),
                "ns": (-2 * s / nt, 2 * t / nt, 1 / nt, 0.0, 0.0),
                "nt": (-2 * t / nt, -2 * s / nt, 0.0, 1 / nt, 0.0),
                "n5": (0.0, 0.0, 0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class CenteredPlank5:
    r: float
    sigma: float
    base_s: float
    base_t: float
    half_b: float
    half_c: float

    @property
    def a_half(self):
        return self.sigma**2

    @property
    def frame(self):
        return Plank5(R=self.r**2, base_s=self.base_s, base_t=self.base_t,
                      half_b=self.half_b, half_c=self.half_c).frame


@dataclass
class PlankFamily5:
    """Columnar arrays for a list of R^5 planks."""
    planks: list
    a_mid: np.ndarray
    a_half: np.ndarray
    _cols: dict = field(default_factory=dict, repr=False)

    def cols(self):
        if not self._cols:
            P = self.planks
            bs = np.array([p.base_s for p in P])
            bt = np.array([p.base_t for p in P])
            q = bs * bs + bt * bt
            nrm = np.sqrt(1.0 + 4.0 * q)
            self._cols = {
                "bs": bs, "bt": bt, "nrm": nrm,
                # dot products of the central line c with the five unit directions
                "cts": bs * (1 + 2 * q) / nrm, "ctt": bt * (1 + 2 * q) / nrm,
                "cns": (bt * bt - bs * bs) / nrm, "cnt": -2 * bs * bt / nrm,
                "hb": np.array([p.half_b for p in P]),
                "hc": np.array([p.half_c for p in P]),
            }
        return self._cols

    def _projections(self, w, C):
        w1, w2, w3, w4, w5 = w
        nrm = C["nrm"]
        return ((( w1 + 2 * C["bs"] * w3 + 2 * C["bt"] * w4) / nrm, C["cts"], C["hb"]),
                (( w2 - 2 * C["bt"] * w3 + 2 * C["bs"] * w4) / nrm, C["ctt"], C["hb"]),
                ((-2 * C["bs"] * w1 + 2 * C["bt"] * w2 + w3) / nrm, C["cns"], C["hc"]),
                ((-2 * C["bt"] * w1 - 2 * C["bs"] * w2 + w4) / nrm, C["cnt"], C["hc"]),
                (w5 * np.ones_like(nrm), np.ones_like(nrm), C["hc"]))

    def contains(self, point, dilation=1.0):
        """Boolean array over planks: interval intersection in the coefficient a."""
        C = self.cols()
        S = float(dilation)
        lo = self.a_mid - S * self.a_half
        hi = self.a_mid + S * self.a_half
        for v0, g, bnd in self._projections(np.asarray(point, dtype=float), C):
            with np.errstate(divide="ignore", invalid="ignore"):
                l1 = (v0 - S * bnd) / g
                l2 = (v0 + S * bnd) / g
            ivlo = np.minimum(l1, l2)
            ivhi = np.maximum(l1, l2)
            flat = np.abs(g) < 1e-300
            ok_flat = np.abs(v0) <= S * bnd + _EPS
            ivlo = np.where(flat, np.where(ok_flat, -np.inf, np.inf), ivlo)
            ivhi = np.where(flat, np.where(ok_flat, np.inf, -np.inf), ivhi)
            lo = np.maximum(lo, ivlo)
            hi = np.minimum(hi, ivhi)
        return lo <= hi + _EPS

    def count_containing(self, points, dilation=1.0):
        """Vectorized over sample points (shape (5, N)): planks containing each."""
        w = np.asarray(points, dtype=float)
        C = self.cols()
        S = float(dilation)
        counts = np.zeros(w.shape[1], dtype=np.int64)
        for i in range(len(self.planks)):
            Ci = {key: val[i:i + 1] for key, val in C.items()}
            lo = np.full(w.shape[1], self.a_mid[i] - S * self.a_half[i])
            hi = np.full(w.shape[1], self.a_mid[i] + S * self.a_half[i])
            for v0, g, bnd in self._projections(w, Ci):
                g, bnd = float(g[0]), float(bnd[0])
                if abs(g) < 1e-300:
                    ok = np.abs(v0) <= S * bnd + _EPS
                    lo = np.where(ok, lo, np.inf)
                else:
                    l1 = (v0 - S * bnd) / g
                    l2 = (v0 + S * bnd) / g
                    lo = np.maximum(lo, np.minimum(l1, l2))
                    hi = np.minimum(hi, np.maximum(l1, l2))
            counts += lo <= hi + _EPS
        return counts

    def contains_pointwise(self, points, idx, dilation=1.0):
        """Boolean array: point j in dilation*plank idx[j] (one plank per point)."""
        w = np.asarray(points, dtype=float)
        Ci = {key: val[idx] for key, val in self.cols().items()}
        S = float(dilation)
        lo = self.a_mid[idx] - S * self.a_half[idx]
        hi = self.a_mid[idx] + S * self.a_half[idx]
        for v0, g, bnd in self._projections(w, Ci):
            flat = np.abs(g) < 1e-300
            gs = np.where(flat, 1.0, g)
            l1 = (v0 - S * bnd) / gs
            l2 = (v0 + S * bnd) / gs
            ivlo = np.minimum(l1, l2)
            ivhi = np.maximum(l1, l2)
            ok_flat = np.abs(v0) <= S * bnd + _EPS
            ivlo = np.where(flat, np.where(ok_flat, -np.inf, np.inf), ivlo)
            ivhi = np.where(flat, np.where(ok_flat, np.inf, -np.inf), ivhi)
            lo = np.maximum(lo, ivlo)
            hi = np.minimum(hi, ivhi)
        return lo <= hi + _EPS


def _base_grid(spacing):
    n = int(math.floor(1.0 / spacing + 1e-9))
    coords = [i * spacing for i in range(-n, n + 1)]
    return n, coords


@dataclass
class ComplexCover5:
    R: float
    spacing: float
    family: PlankFamily5
    n_side: int

    @property
    def planks(self):
        return self.family.planks

    def assign(self, z):
        """Index of the plank with nearest base point (row-major grid order)."""
        s, t = (z.real, z.imag) if isinstance(z, complex) else (z[0], z[1])
        n = self.n_side
        i = min(max(int(round(s / self.spacing)), -n), n)
        j = min(max(int(round(t / self.spacing)), -n), n)
        return (i + n) * (2 * n + 1) + (j + n)


def build_complex_cover(R):
    """Fine planks over heights [1/2, 1] with bases on the R^(-1/2) grid."""
    if not (2**4 <= R <= 2**16):
        raise ValueError("R out of supported range [2^4, 2^16]")
    spacing = R**-0.5
    n, coords = _base_grid(spacing)
    planks = [Plank5(R=float(R), base_s=s, base_t=t,
                     half_b=C0 * spacing, half_c=C0 / R)
              for s in coords for t in coords]
    m = len(planks)
    fam = PlankFamily5(planks=planks, a_mid=np.full(m, 0.75), a_half=np.full(m, 0.25))
    return ComplexCover5(R=float(R), spacing=spacing, family=fam, n_side=n)


def count_containing_local(cover, points, dilation=1.0, window=6):
    """Exact fine-cover multiplicity counts using base-grid locality.

    Only planks within `window` grid cells of each point's angular estimate can
    contain it (tangential reach 2*C0 cells at h = 1/2, curvature reach less), so
    the count loops over (2*window+1)^2 cell offsets instead of all planks.
    """
    w = np.asarray(points, dtype=float)
    n, sp = cover.n_side, cover.spacing
    ci = np.clip(np.round(w[0] / w[4] / sp).astype(np.int64), -n, n)
    cj = np.clip(np.round(w[1] / w[4] / sp).astype(np.int64), -n, n)
    counts = np.zeros(w.shape[1], dtype=np.int64)
    for di in range(-window, window + 1):
        for dj in range(-window, window + 1):
            ii = ci + di
            jj = cj + dj
            valid = (np.abs(ii) <= n) & (np.abs(jj) <= n)
            idx = np.where(valid, (ii + n) * (2 * n + 1) + (jj + n), 0)
            counts += valid & cover.family.contains_pointwise(w, idx, dilation)
    return counts


def verify_complex_cover(cover, n_samples, seed):
    """Sample the R^(-1)-neighbourhood of the cone (normal offsets) over [1/2, 1]."""
    rng = rng_from(seed, 5)
    R = cover.R
    s = rng.uniform(-1.0, 1.0, n_samples)
    t = rng.uniform(-1.0, 1.0, n_samples)
    h = rng.uniform(0.5, 1.0, n_samples)
    nt = _norm4(s, t)
    c = np.stack([s, t, s * s - t * t, 2 * s * t, np.ones_like(s)])
    e1 = np.stack([np.ones_like(s), np.zeros_like(s), 2 * s, 2 * t, np.zeros_like(s)]) / nt
    e2 = np.stack([np.zeros_like(s), np.ones_like(s), -2 * t, 2 * s, np.zeros_like(s)]) / nt
    v = c - (c * e1).sum(axis=0) * e1 - (c * e2).sum(axis=0) * e2
    e3 = v / np.linalg.norm(v, axis=0)
    g = rng.standard_normal((5, n_samples))
    for e in (e1, e2, e3):
        g -= (g * e).sum(axis=0) * e
    g /= np.linalg.norm(g, axis=0)
    rad = (1.0 / R) * np.sqrt(rng.uniform(0.0, 1.0, n_samples))
    pts = h * c + rad * g
    counts = count_containing_local(cover, pts)
    return {"n_samples": n_samples,
            "covered_fraction": float(np.mean(counts >= 1)),
            "max_multiplicity": int(counts.max())}


def build_complex_centered(r, sigma, C=C_CP):
    """Origin-symmetric planks at scale sigma with bases on the (r*sigma)^-1 grid."""
    _check_sigma(r, sigma)
    spacing = 1.0 / (r * sigma)
    _, coords = _base_grid(spacing)
    planks = [CenteredPlank5(r=float(r), sigma=sigma, base_s=s, base_t=t,
                             half_b=C * sigma / r, half_c=C / r**2)
              for s in coords for t in coords]
    m = len(planks)
    return PlankFamily5(planks=planks, a_mid=np.zeros(m), a_half=np.full(m, sigma**2))


def assign_complex_base(z, r, sigma):
    """Nearest centered-plank base point at scale sigma (distance <= spacing/sqrt(2))."""
    spacing = 1.0 / (r * sigma)
    n = int(math.floor(r * sigma + 1e-9))
    i = min(max(round(z.real / spacing), -n), n)
    j = min(max(round(z.imag / spacing), -n), n)
    return complex(i * spacing, j * spacing)


@dataclass
class HighLow5:
    """All centered-plank families of one r High-Low decomposition in R^5."""
    r: float
    families: dict = field(default_factory=dict)  # sigma -> PlankFamily5

    def family(self, sigma):
        if sigma not in self.families:
            self.families[sigma] = build_complex_centered(self.r, sigma)
        return self.families[sigma]

    def in_union(self, point, sigma, S=1.0):
        return bool(np.any(self.family(sigma).contains(point, S)))


def complex_omega_membership(point, r, sigma, highlow=None):
    """Shell classification of one R^5 point.

    As in R^3, the shell at scale sigma is the cumulative set difference
    Omega_sigma = U(<=sigma) \\ U(<=sigma/2) with U(<=s) the union of all
    centered-plank unions at scales <= s, which partitions U(<=1) exactly.
    """
    hl = highlow or HighLow5(r=r)
    _check_sigma(r, sigma)
    in_cur = hl.in_union(point, sigma)
    half = sigma / 2.0
    in_half = half >= 1.0 / r - _EPS and hl.in_union(point, half)
    below = any(hl.in_union(point, s) for s in sigma_scales(r) if s < sigma - _EPS)
    return {"in_union_sigma": in_cur, "in_union_half": in_half,
            "in_omega": in_cur and not below}


def complex_shell_memberships(point, r, highlow=None):
    """List of sigma whose Omega shell contains the point (0 or 1 entries)."""
    hl = highlow or HighLow5(r=r)
    seen = False
    out = []
    for s in sigma_scales(r):
        cur = hl.in_union(point, s)
        if cur and not seen:
            out.append(s)
        seen = seen or cur
    return out


@dataclass(frozen=True)
class OverlapCount5:
    count: int
    in_omega: bool


def complex_overlap_count(point, r, sigma, S=10.0, highlow=None):
    """Number of centered planks whose S-dilate contains the point."""
    hl = highlow or HighLow5(r=r)
    mem = complex_omega_membership(point, r, sigma, hl)
    hits = hl.family(sigma).contains(point, S)
    return OverlapCount5(count=int(np.sum(hits)), in_omega=mem["in_omega"])


# --- difference planks ----------------------------------------------------------

def difference_plank5(p):
    """theta - theta: origin-symmetric, doubled half-lengths, heights [-1/2, 1/2]."""
    return Plank5(R=p.R, base_s=p.base_s, base_t=p.base_t,
                  half_b=2 * p.half_b, half_c=2 * p.half_c, a_range=(-0.5, 0.5))


def difference_family5(cover):
    planks = [difference_plank5(p) for p in cover.planks]
    m = len(planks)
    return PlankFamily5(planks=planks, a_mid=np.zeros(m), a_half=np.full(m, 0.5))


def sample_complex_difference_points(cover, n_samples, seed):
    """Uniform coefficient samples from the difference planks of a complex cover."""
    rng = rng_from(seed, 6)
    fam = difference_family5(cover)
    C = fam.cols()
    idx = rng.integers(0, len(fam.planks), n_samples)
    bs, bt, nrm = C["bs"][idx], C["bt"][idx], C["nrm"][idx]
    hb, hc = C["hb"][idx], C["hc"][idx]
    a = rng.uniform(-0.5, 0.5, n_samples)
    b1 = rng.uniform(-1, 1, n_samples) * hb
    b2 = rng.uniform(-1, 1, n_samples) * hb
    c1 = rng.uniform(-1, 1, n_samples) * hc
    c2 = rng.uniform(-1, 1, n_samples) * hc
    e = rng.uniform(-1, 1, n_samples) * hc
    one = np.ones_like(bs)
    zero = np.zeros_like(bs)
    cvec = np.stack([bs, bt, bs * bs - bt * bt, 2 * bs * bt, one])
    ts = np.stack([one, zero, 2 * bs, 2 * bt, zero]) / nrm
    tt = np.stack([zero, one, -2 * bt, 2 * bs, zero]) / nrm
    ns = np.stack([-2 * bs, 2 * bt, one, zero, zero]) / nrm
    nt5 = np.stack([-2 * bt, -2 * bs, zero, one, zero]) / nrm
    n5 = np.stack([zero, zero, zero, zero, one])
    pts = a * cvec + b1 * ts + b2 * tt + c1 * ns + c2 * nt5 + e * n5
    return pts, idx


# --- complex ends and the alternating sign check --------------------------------

def solve_plane_coeffs(z, h, r, p1, p2):
    """Coefficients (l, w) of p = h*(z, z^2) + l*(1, 2z) + w*(-2 conj(z), 1).

    p = (p1, p2) in C^2; w absorbs the r^-2 normal scale (w = C*r^-2).
    """
    e1 = p1 - h * z
    e2 = p2 - h * z * z
    denom = 1.0 + 4.0 * abs(z) ** 2 if np.isscalar(z) else 1.0 + 4.0 * np.abs(z) ** 2
    ell = (e1 + 2.0 * np.conj(z) * e2) / denom
    w = (e2 - 2.0 * z * e1) / denom
    return ell, w


@dataclass(frozen=True)
class ComplexEnd:
    h: float
    base_z: complex
    r: float
    l_lo: float        # annulus bracket on the literal tangential distance
    l_hi: float
    half_c: float      # literal normal radius

    def contains(self, p1, p2, dilation=1.0):
        ell, w = solve_plane_coeffs(self.base_z, self.h, self.r, p1, p2)
        nt = math.sqrt(1.0 + 4.0 * abs(self.base_z) ** 2)
        lp = abs(ell) * nt
        cp = abs(w) * nt
        return (self.l_lo / dilation - _EPS <= lp <= self.l_hi * dilation + _EPS and
                cp <= dilation * self.half_c + _EPS)


def ends5(cp, h):
    """Complex end annulus of a centered plank at low height h."""
    if not (0.0 <= h <= cp.a_half * ENDS_H_FRAC + _EPS):
        raise ValueError("ends are defined only for h <= sigma^2/16")
    z = complex(cp.base_s, cp.base_t)
    return ComplexEnd(h=h, base_z=z, r=cp.r, l_lo=END_BRACKET[0] * cp.half_b,
                      l_hi=cp.half_b, half_c=cp.half_c)


@dataclass(frozen=True)
class SignReport:
    n_points: int
    n_checked: dict      # component ("re"/"im") -> points with |X(l)| >= half_b/4
    n_alternating: dict  # component -> points with sign(X(l1)) == -sign(X(l))

    @property
    def vacuous(self):
        return self.n_points == 0

    @property
    def passed(self):
        return all(self.n_alternating[x] == self.n_checked[x] for x in self.n_checked)


def alternating_ends_check(z, zp, h, r, sigma, n_grid=64):
    """Scan End(z) x height-h slice for points also in End(zp); per component
    X in {Re, Im}, points with |X(l)| >= half_b/4 must flip sign in X(l1)."""
    hb = C_CP * sigma / r
    hc = C_CP / r**2
    if abs(z - zp) < 8.0 / (r * sigma) - _EPS:
        raise ValueError("bases too close: need |z - zp| >= 8/(r*sigma)")
    if not (0.0 <= h <= sigma**2 * ENDS_H_FRAC + _EPS):
        raise ValueError("ends are defined only for h <= sigma^2/16")
    nt_z = math.sqrt(1.0 + 4.0 * abs(z) ** 2)
    nt_zp = math.sqrt(1.0 + 4.0 * abs(zp) ** 2)
    g = np.linspace(-hb, hb, n_grid)
    lre, lim = np.meshgrid(g, g)
    lphys = lre + 1j * lim                      # literal tangential offset at z
    on_end = (np.abs(lphys) >= END_BRACKET[0] * hb) & (np.abs(lphys) <= hb)
    ell = lphys[on_end] / nt_z
    p1 = h * z + ell
    p2 = h * z * z + 2.0 * z * ell
    ell1, w = solve_plane_coeffs(zp, h, r, p1, p2)
    l1phys = ell1 * nt_zp
    inter = ((np.abs(l1phys) >= END_BRACKET[0] * hb) & (np.abs(l1phys) <= hb) &
             (np.abs(w) * nt_zp <= hc))
    x0 = lphys[on_end][inter]
    x1 = l1phys[inter]
    checked, alternating = {}, {}
    for name, v0, v1 in (("re", x0.real, x1.real), ("im", x0.imag, x1.imag)):
        sel = np.abs(v0) >= hb / 4.0
        checked[name] = int(sel.sum())
        alternating[name] = int(np.sum(v0[sel] * v1[sel] < 0))
    return SignReport(n_points=int(inter.sum()), n_checked=checked,
                      n_alternating=alternating)


ADMISSIBLE_SEP = 64.0   # base separation (in grid spacings) for the sign check


def sample_admissible_ends(n_configs, seed, r_exps=(7, 8, 9, 10, 11)):
    """Random end configurations with well-separated bases and nonempty
    intersections: grid bases at distance >= ADMISSIBLE_SEP spacings, low height.

    Returns a list of (params, SignReport) with params = (z, zp, h, r, sigma).
    """
    rng = rng_from(seed, 12)
    out = []
    attempts = 0
    while len(out) < n_configs and attempts < 400 * n_configs:
        attempts += 1
        r = 2.0 ** int(rng.choice(np.asarray(r_exps)))
        sigma = float(rng.choice(np.array([0.5, 1.0])))
        sp = 1.0 / (r * sigma)
        n = int(1.0 / sp)
        ij = rng.integers(-n, n + 1, 2)
        z = complex(ij[0] * sp, ij[1] * sp)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        d = int(rng.integers(64, 129))
        zp = complex(round(z.real / sp + d * math.cos(ang)) * sp,
                     round(z.imag / sp + d * math.sin(ang)) * sp)
        if max(abs(zp.real), abs(zp.imag)) > 1.0 + _EPS:
            continue
        if abs(zp - z) < ADMISSIBLE_SEP * sp - 1e-12:
            continue
        h = rng.uniform(0.0, sigma**2 * ENDS_H_FRAC)
        rep = alternating_ends_check(z, zp, h, r, sigma)
        if rep.vacuous:
            continue
        out.append(((z, zp, h, r, sigma), rep))
    return out


# --- complex/real frame identity -------------------------------------------------

def tangent_image(coeff, z):
    """R^4 image of coeff*(1, 2z) under (z1, z2) -> (Re z1, Im z1, Re z2, Im z2)."""
    w2 = 2.0 * z * coeff
    return np.array([coeff.real, coeff.imag, w2.real, w2.imag])


def tangent_combination(coeff, z):
    """The same vector assembled as Re(coeff)*t_s + Im(coeff)*t_t (raw frame)."""
    s, t = z.real, z.imag
    ts = np.array([1.0, 0.0, 2 * s, 2 * t])
    tt = np.array([0.0, 1.0, -2 * t, 2 * s])
    return coeff.real * ts + coeff.imag * tt
