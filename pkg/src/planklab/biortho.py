"""Brute-force enumeration of quadruple frequency solutions and verification of
essential biorthogonality against a covering.

A solution is a grid tuple (xi1, xi2, xi3, xi4) with xi1 + xi2 = xi3 + xi4 exactly
and |xi1^k + xi2^k - xi3^k - xi4^k| <= tol * delta. Enumeration is exact over
integers: xi = n/m with k-th powers held as int64, grouped by the exact sum
n1 + n2 and restricted to the monotone branch n1 >= n2, n3 >= n4, n1 >= n3
(an 8-fold symmetry reduction).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curve_cover import assign_theta, build_curve_cover, rect_contains
from .dyadic import parse_dyadic

TOL_DEFAULT = 4            # system slack: residual budget tol * delta
TRIPLE_BUDGET = 2**32      # refuse grids with more candidate triples than this
DILATION_LADDER = (1, 2, 3, 4, 5, 8, 10, 16, 32, 64)


@dataclass(frozen=True)
class QuadSolution:
    xi: tuple
    residual: float


@dataclass
class BiorthReport:
    k: int
    delta: float
    grid_step: float
    n_solutions: int
    n_violations: dict      # dilation D -> violation count
    D_min: int = None


def _grid_denominator(grid_step):
    step = Fraction(parse_dyadic(grid_step))
    if step <= 0 or step.numerator != 1:
        raise ValueError("grid_step must be the reciprocal of a positive integer")
    return step.denominator


def enumerate_quadruples(k, delta, grid_step, tol=TOL_DEFAULT, budget=TRIPLE_BUDGET):
    """All canonical solutions on the grid {0, grid_step, ..., 1}."""
    if k < 2:
        raise ValueError("k must be >= 2")
    delta = float(delta)
    m = _grid_denominator(grid_step)
    if 1.0 / m < math.sqrt(delta) / 16:
        raise ValueError("grid_step below the tractability bound delta^(1/2)/16")
    if (m + 1) ** 3 // 8 > budget:
        raise ValueError("grid exceeds the candidate-triple budget")
    T = tol * delta * float(m) ** k        # residual threshold in integer units
    sols = []
    for s in range(0, 2 * m + 1):
        a0 = max((s + 1) // 2, s - m)
        a1 = min(s, m)
        if a0 > a1:
            continue
        a = np.arange(a0, a1 + 1, dtype=np.int64)
        P = a**k + (s - a) ** k            # increasing along the branch
        lo = np.searchsorted(P, P - T, side="left")
        cnt = np.arange(len(a)) - lo + 1
        i_idx = np.repeat(np.arange(len(a)), cnt)
        starts = np.cumsum(cnt) - cnt
        j_idx = np.arange(cnt.sum()) - np.repeat(starts, cnt) + np.repeat(lo, cnt)
        x1 = a[i_idx]
        x3 = a[j_idx]
        res = (P[i_idx] - P[j_idx]) / float(m) ** k
        sols.extend(QuadSolution(xi=(n1 / m, (s - n1) / m, n3 / m, (s - n3) / m),
                                 residual=float(rr))
                    for n1, n3, rr in zip(x1.tolist(), x3.tolist(), res.tolist()))
    return sols


def _rect_in_dilate(cov, i, j, D, memo):
    key = (i, j, D)
    if key not in memo:
        outer = cov.rects[j]
        memo[key] = all(rect_contains(outer, c, D) for c in cov.rects[i].corners())
    return memo[key]


def check_biorthogonality(solutions, cov, D, memo=None):
    """Violation count: solutions whose block pairs fail mutual D-dilate containment."""
    memo = {} if memo is None else memo
    origin = cov.delta ** (1.0 / cov.k)
    xs = np.array([s.xi for s in solutions])
    if len(xs) == 0:
        return BiorthReport(k=cov.k, delta=cov.delta, grid_step=0.0,
                            n_solutions=0, n_violations={D: 0})
    th = np.stack([assign_theta(cov, xs[:, i]) for i in range(4)])
    violations = 0
    for row in range(xs.shape[0]):
        if np.all(np.abs(xs[row]) <= origin):
            continue                       # all points in the origin block
        t1, t2, t3, t4 = (int(t) for t in th[:, row])
        ok = ((_rect_in_dilate(cov, t1, t3, D, memo) and
               _rect_in_dilate(cov, t2, t4, D, memo)) or
              (_rect_in_dilate(cov, t1, t4, D, memo) and
               _rect_in_dilate(cov, t2, t3, D, memo)))
        violations += not ok
    return BiorthReport(k=cov.k, delta=cov.delta, grid_step=0.0,
                        n_solutions=len(solutions), n_violations={D: violations})


def minimal_dilation(k, delta, grid_step, tol=TOL_DEFAULT):
    """Smallest ladder dilation with zero violations, plus the full profile."""
    cov = build_curve_cover(k, float(delta))
    sols = enumerate_quadruples(k, delta, grid_step, tol)
    memo = {}
    profile = {}
    D_min = None
    for D in DILATION_LADDER:
        profile[D] = check_biorthogonality(sols, cov, D, memo).n_violations[D]
        if profile[D] == 0:
            D_min = D
            break
    report = BiorthReport(k=k, delta=float(delta), grid_step=1.0 / _grid_denominator(grid_step),
                          n_solutions=len(sols), n_violations=profile, D_min=D_min)
    return report


def comparability_oracle(p, delta, xi_b, xi_a):
    """True iff the scale-(xi_b) block bound implies the scale-(xi_a) block bound
    with C = C' = 4."""
    if not (0.0 <= xi_b <= xi_a <= 1.0):
        raise ValueError("need 0 <= xi_b <= xi_a <= 1")
    C = 4.0
    e = (p - 2) / 2.0
    hyp = xi_b >= delta ** (1.0 / p) and xi_a <= xi_b + C * math.sqrt(delta) / xi_b**e
    concl = xi_a <= xi_b + C * math.sqrt(delta) / xi_a**e
    return (not hyp) or concl


def enumerate_complex_quadruples(K, grid_step, tol=TOL_DEFAULT, budget=TRIPLE_BUDGET):
    """Canonical complex solutions: z on the grid ([-1,1] cap grid)^2 with
    z1 + z2 = z3 + z4 exactly and |z1^2 + z2^2 - z3^2 - z4^2| <= tol / K."""
    m = _grid_denominator(grid_step)
    if 1.0 / m < 2.0**-5:
        raise ValueError("grid_step below the tractability bound 2^-5")
    n_side = 2 * m + 1
    if n_side**4 > budget:
        raise ValueError("grid exceeds the candidate budget")
    T = tol * m * m / float(K)             # threshold in integer units
    g = np.arange(-m, m + 1, dtype=np.int64)
    px, py = (v.ravel() for v in np.meshgrid(g, g, indexing="ij"))
    pi, qi = np.triu_indices(len(px))      # unordered point pairs, p <= q
    sx = px[pi] + px[qi]
    sy = py[pi] + py[qi]
    vre = px[pi] ** 2 - py[pi] ** 2 + px[qi] ** 2 - py[qi] ** 2
    vim = 2 * (px[pi] * py[pi] + px[qi] * py[qi])
    key = (sx + 2 * m) * (4 * m + 1) + (sy + 2 * m)
    order = np.lexsort((vre, key))
    key, vre, vim = key[order], vre[order], vim[order]
    pi, qi = pi[order], qi[order]
    sols = []
    bounds = np.flatnonzero(np.r_[True, key[1:] != key[:-1], True])
    for b0, b1 in zip(bounds[:-1], bounds[1:]):
        R, I = vre[b0:b1], vim[b0:b1]
        hi = np.searchsorted(R, R + T, side="right")
        for i in range(b1 - b0):
            for j in range(i, hi[i]):
                dr = float(R[j] - R[i])
                di = float(I[j] - I[i])
                if dr * dr + di * di <= T * T:
                    z = [complex(px[t], py[t]) / m
                         for t in (pi[b0 + j], qi[b0 + j], pi[b0 + i], qi[b0 + i])]
                    sols.append(QuadSolution(
                        xi=tuple(z),
                        residual=math.hypot(dr, di) / (m * m)))
    return sols


def _plank_in_dilate5(cover, i, j, D, memo):
    key = (i, j, D)
    if key not in memo:
        p = cover.planks[i]
        f = p.frame
        c = np.array(f["c"])
        corners = []
        for a in (0.5, 1.0):
            for sb1 in (-1, 1):
                for sb2 in (-1, 1):
                    corners.append(a * c + sb1 * p.half_b * np.array(f["ts"])
                                   + sb2 * p.half_b * np.array(f["tt"]))
        fam = cover.family
        sub_ok = True
        for w in corners:
            hits = fam.contains_pointwise(np.asarray(w)[:, None],
                                          np.array([j]), dilation=D)
            if not bool(hits[0]):
                sub_ok = False
                break
        memo[key] = sub_ok
    return memo[key]


def check_complex_biorthogonality(solutions, cover, D, memo=None):
    """Same dilation test against a complex fine cover (tangential corners)."""
    memo = {} if memo is None else memo
    violations = 0
    for sol in solutions:
        t = [cover.assign(z) for z in sol.xi]
        ok = ((_plank_in_dilate5(cover, t[0], t[2], D, memo) and
               _plank_in_dilate5(cover, t[1], t[3], D, memo)) or
              (_plank_in_dilate5(cover, t[0], t[3], D, memo) and
               _plank_in_dilate5(cover, t[1], t[2], D, memo)))
        violations += not ok
    return violations
