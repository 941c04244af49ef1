"""Dirichlet L-functions mod a prime on (and near) the critical line.

Two evaluators are provided:

* truncated: the sharp Dirichlet sum ``sum_{m <= X} chi(m) m^{-s}``;
* reference: the exact Hurwitz decomposition
  ``L(s, chi) = q^{-s} sum_{a=1}^{q-1} chi(a) zeta(s, a/q)``.

The vectorized path computes all ``q - 1`` characters with one DFT.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import PrimeModulus, character_transform, char_values, residue_vector
from .special import DEFAULT_POLICY, PrecisionPolicy, hurwitz_zeta

REFERENCE = "reference"
TRUNCATED = "truncated"
METHODS = (REFERENCE, TRUNCATED)

_CHUNK = 1 << 20


@dataclass(frozen=True)
class CriticalPoint:
    t: float
    epsilon0: float = 0.01

    def __post_init__(self):
        if not 0 < self.epsilon0 < 0.25:
            raise ValueError("epsilon0 must lie in (0, 1/4)")

    @property
    def s(self) -> complex:
        return complex(0.5, self.t)

    def admissible(self, q: int) -> bool:
        """|t| <= q^(1/4 - epsilon0)."""
        return abs(self.t) <= q ** (0.25 - self.epsilon0)


def default_length(q: int, t: float) -> float:
    # the proof's X = (|t|+1) q^(3/2 + 4/10^M) with the 10^-M exponent dropped
    return q**1.5 * (abs(t) + 1)


@dataclass(frozen=True, eq=False)
class LVector:
    """L(1/2+it, chi_j) for j = 1..q-2; ``values[j - 1]`` holds index ``j``."""

    q: int
    point: CriticalPoint
    values: np.ndarray
    method: str
    X: float | None = None

    @property
    def admissible(self) -> bool:
        return self.point.admissible(self.q)

    @property
    def tag(self) -> str:
        return f"truncated({self.X:g})" if self.method == TRUNCATED else REFERENCE

    def __getitem__(self, j: int) -> complex:
        if not 1 <= j <= self.q - 2:
            raise IndexError(f"character index {j} outside 1..{self.q - 2}")
        return complex(self.values[j - 1])

    def __len__(self) -> int:
        return len(self.values)


def _check_index(mod: PrimeModulus, j: int) -> None:
    if j % (mod.q - 1) == 0:
        raise ValueError("principal character excluded")


def _power_minus_s(m: np.ndarray, s: complex) -> np.ndarray:
    return np.exp(-s * np.log(m))


def l_truncated(mod: PrimeModulus, j: int, point: CriticalPoint | complex, X: float) -> complex:
    """sum_{m <= X} chi_j(m) m^{-s} with compensated summation."""
    _check_index(mod, j)
    if X < 1:
        raise ValueError("X must be >= 1")
    s = point.s if isinstance(point, CriticalPoint) else complex(point)
    top = int(math.floor(X))
    re_parts, im_parts = [], []
    for lo in range(1, top + 1, _CHUNK):
        m = np.arange(lo, min(lo + _CHUNK, top + 1), dtype=np.int64)
        terms = char_values(mod, j, m) * _power_minus_s(m.astype(float), s)
        re_parts.extend(terms.real.tolist())
        im_parts.extend(terms.imag.tolist())
    return complex(math.fsum(re_parts), math.fsum(im_parts))


@lru_cache(maxsize=32)
def _hurwitz_table(q: int, s: complex, policy: PrecisionPolicy) -> np.ndarray:
    a = np.arange(1, q, dtype=float) / q
    table = hurwitz_zeta(s, a, policy)
    table.setflags(write=False)
    return table


def l_reference(
    mod: PrimeModulus,
    j: int,
    point: CriticalPoint | complex,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> complex:
    """L(s, chi_j) from the Hurwitz decomposition."""
    _check_index(mod, j)
    s = point.s if isinstance(point, CriticalPoint) else complex(point)
    table = _hurwitz_table(mod.q, s, policy)
    chi = char_values(mod, j, np.arange(1, mod.q))
    terms = chi * table
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return total * np.exp(-s * math.log(mod.q))


def _all_reference(mod: PrimeModulus, s: complex, policy: PrecisionPolicy) -> np.ndarray:
    table = _hurwitz_table(mod.q, s, policy)
    v = residue_vector(mod, np.arange(1, mod.q), table)
    return character_transform(mod, v) * np.exp(-s * math.log(mod.q))


def _all_truncated(mod: PrimeModulus, s: complex, X: float) -> np.ndarray:
    top = int(math.floor(X))
    re = np.zeros(mod.q)
    im = np.zeros(mod.q)
    for lo in range(1, top + 1, _CHUNK):
        m = np.arange(lo, min(lo + _CHUNK, top + 1), dtype=np.int64)
        w = _power_minus_s(m.astype(float), s)
        r = m % mod.q
        re += np.bincount(r, weights=w.real, minlength=mod.q)
        im += np.bincount(r, weights=w.imag, minlength=mod.q)
    c = re + 1j * im
    v = residue_vector(mod, np.arange(1, mod.q), c[1:])
    return character_transform(mod, v)


def l_values(
    mod: PrimeModulus,
    s: complex,
    method: str = REFERENCE,
    X: float | None = None,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """L(s, chi_j) for every j in [0, q-2] at an arbitrary point ``s``.

    Entry 0 is the principal character's value and is usually discarded.
    """
    s = complex(s)
    if method == REFERENCE:
        return _all_reference(mod, s, policy)
    if method == TRUNCATED:
        if X is None:
            X = default_length(mod.q, s.imag)
        if X < 1:
            raise ValueError("X must be >= 1")
        return _all_truncated(mod, s, X)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def l_all(
    mod: PrimeModulus,
    point: CriticalPoint,
    method: str = REFERENCE,
    X: float | None = None,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> LVector:
    if method == TRUNCATED and X is None:
        X = default_length(mod.q, point.t)
    values = l_values(mod, point.s, method, X, policy)[1:]
    values.setflags(write=False)
    return LVector(
        q=mod.q, point=point, values=values, method=method,
        X=X if method == TRUNCATED else None,
    )


@dataclass(frozen=True)
class AfeProfile:
    q: int
    t: float
    rows: list[tuple[float, float]]  # (X, median error)
    slope: float | None
    # median error divided by (|t|+1) sqrt(q) log q / sqrt(X)
    constants: list[float]


def afe_error_profile(mod: PrimeModulus, point: CriticalPoint, xs) -> AfeProfile:
    """Median over characters of |truncated - reference| for each truncation length."""
    xs = [float(x) for x in xs]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("X grid must be strictly ascending")
    ref = l_all(mod, point).values
    q, t = mod.q, point.t
    rows, consts = [], []
    for X in xs:
        err = np.abs(l_all(mod, point, TRUNCATED, X).values - ref)
        med = float(np.median(err))
        rows.append((X, med))
        consts.append(med * math.sqrt(X) / ((abs(t) + 1) * math.sqrt(q) * math.log(q)))
    slope = None
    if len(xs) > 1:
        lx = np.log([r[0] for r in rows])
        ly = np.log([r[1] for r in rows])
        slope = float(np.polyfit(lx, ly, 1)[0])
    return AfeProfile(q=q, t=t, rows=rows, slope=slope, constants=consts)
