"""Shared helpers: dyadic-rational literals and a splittable seeded RNG."""

from fractions import Fraction

import numpy as np


def parse_dyadic(text):
    """Parse a value given as '2^-n', '2^n', a plain int, or a decimal string.

    Returns a Fraction so downstream arithmetic can stay exact.
    """
    s = str(text).strip()
    if "^" in s:
        base, exp = s.split("^", 1)
        b = int(base)
        e = int(exp)
        if e >= 0:
            return Fraction(b**e)
        return Fraction(1, b**(-e))
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(s)


def dyadic_str(x):
    """Render a power-of-two Fraction back as a 2^n literal, else as a plain string."""
    f = Fraction(x)
    if f > 0:
        num, den = f.numerator, f.denominator
        if num == 1 and den & (den - 1) == 0 and den > 1:
            return "2^-%d" % (den.bit_length() - 1)
        if den == 1 and num & (num - 1) == 0:
            return "2^%d" % (num.bit_length() - 1)
    return str(f)


def is_dyadic_pow2(x):
    f = Fraction(x)
    return f > 0 and (f.numerator == 1 or f.denominator == 1) and \
        (f.numerator & (f.numerator - 1)) == 0 and (f.denominator & (f.denominator - 1)) == 0


def rng_from(seed, *path):
    """Splittable RNG: one root seed plus an integer split path.

    Every consumer derives its stream as rng_from(seed, stream_id, trial, ...)
    so parallel pieces never share state and runs reproduce exactly.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
