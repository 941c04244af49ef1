"""Dirichlet characters to a prime modulus.

Characters are addressed by an index ``j`` in ``[0, q-2]`` through a fixed
primitive root ``g``::

    chi_j(g^a) = exp(2*pi*i * j * a / (q - 1))

so ``j = 0`` is the principal character and every other index is primitive.
Sums over all characters at once are a length ``q - 1`` DFT of the
coefficients reindexed by discrete logarithm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

DEFAULT_Q_MAX = 2_000_000


def sieve_primes(limit: int) -> list[int]:
    """All primes ``<= limit`` in ascending order (sieve of Eratosthenes)."""
    if limit < 2:
        return []
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).tolist()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(q: int) -> int:
    """Smallest generator of the multiplicative group mod the prime ``q``."""
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if q == 2:
        return 1
    phi = q - 1
    cofactors = [phi // p for p in prime_factors(phi)]
    for g in range(2, q):
        if all(pow(g, c, q) != 1 for c in cofactors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def is_primitive_root(g: int, q: int) -> bool:
    if g % q == 0:
        return False
    phi = q - 1
    return all(pow(g, phi // p, q) != 1 for p in prime_factors(phi))


@dataclass(frozen=True, eq=False)
class PrimeModulus:
    """A prime modulus together with its discrete-log coordinates.

    ``dlog[n]`` holds ``a`` with ``g**a == n (mod q)`` for ``1 <= n < q``;
    ``dlog[0]`` is a sentinel (-1). ``power[a] == g**a mod q``.
    """

    q: int
    g: int
    dlog: np.ndarray = field(repr=False)
    power: np.ndarray = field(repr=False)

    @property
    def phi(self) -> int:
        return self.q - 1

    @property
    def phi_star(self) -> int:
        # number of primitive characters for prime q
        return self.q - 2

    @property
    def n_chars(self) -> int:
        return self.q - 1

    def inverse_index(self, j: int) -> int:
        """Index of the conjugate character."""
        return (-j) % (self.q - 1)

    def parity(self, j: int) -> int:
        """0 for even characters (chi(-1) = 1), 1 for odd."""
        return j % 2


def build_modulus(q: int, g: int | None = None, q_max: int = DEFAULT_Q_MAX) -> PrimeModulus:
    """Construct the full discrete-log table for the prime ``q``.

    ``g`` defaults to the smallest primitive root; passing another generator
    relabels the characters (used to test relabeling invariance).
    """
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if q < 5:
        raise ValueError(f"q={q} too small; need q >= 5")
    if q > q_max:
        raise ValueError(f"q={q} exceeds the table cap q_max={q_max}")
    if g is None:
        g = primitive_root(q)
    elif not is_primitive_root(g, q):
        raise ValueError(f"g={g} is not a primitive root mod {q}")

    power = np.empty(q - 1, dtype=np.int64)
    x = 1
    for a in range(q - 1):
        power[a] = x
        x = x * g % q
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[power] = np.arange(q - 1, dtype=np.int64)
    power.setflags(write=False)
    dlog.setflags(write=False)
    return PrimeModulus(q=q, g=g, dlog=dlog, power=power)


def char_value(mod: PrimeModulus, j: int, n: int) -> complex:
    """chi_j(n)."""
    r = n % mod.q
    if r == 0:
        return 0j
    a = int(mod.dlog[r])
    # exact reduction of j*a keeps the angle in [0, 2pi)
    e = (j * a) % (mod.q - 1)
    if e == 0:
        return 1 + 0j
    theta = 2.0 * math.pi * e / (mod.q - 1)
    return complex(math.cos(theta), math.sin(theta))


def char_values(mod: PrimeModulus, j: int, n: np.ndarray) -> np.ndarray:
    """Vectorized chi_j over an integer array (0 where q | n)."""
    n = np.asarray(n, dtype=np.int64)
    r = n % mod.q
    a = mod.dlog[r]
    e = (j * a) % (mod.q - 1)
    out = np.exp(2j * np.pi * e / (mod.q - 1))
    out[r == 0] = 0
    return out


def residue_vector(mod: PrimeModulus, n: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Accumulate coefficients ``c`` at positions ``dlog[n mod q]``.

    Terms with ``q | n`` are dropped. The result has length ``q - 1``.
    """
    n = np.asarray(n, dtype=np.int64)
    c = np.asarray(c, dtype=complex)
    r = n % mod.q
    keep = r != 0
    idx = mod.dlog[r[keep]]
    c = c[keep]
    re = np.bincount(idx, weights=c.real, minlength=mod.q - 1)
    im = np.bincount(idx, weights=c.imag, minlength=mod.q - 1)
    return re + 1j * im


def character_transform(mod: PrimeModulus, v: np.ndarray) -> np.ndarray:
    """Given ``v[a]`` indexed by discrete log, return ``S[j] = sum_a v[a] e(ja/(q-1))``."""
    v = np.asarray(v, dtype=complex)
    # numpy's inverse FFT carries the +2*pi*i sign and a 1/n factor
    return np.fft.ifft(v) * (mod.q - 1)


def all_character_sums(
    mod: PrimeModulus, coeffs: Mapping[int, complex] | tuple[np.ndarray, np.ndarray]
) -> np.ndarray:
    """``S[j] = sum_n c_n chi_j(n)`` for every ``j`` in ``[0, q-2]``.

    ``coeffs`` is a mapping ``n -> c_n`` or a pair of arrays ``(n, c)``.
    """
    if isinstance(coeffs, tuple):
        n, c = coeffs
    else:
        n = np.fromiter(coeffs.keys(), dtype=np.int64, count=len(coeffs))
        c = np.fromiter(coeffs.values(), dtype=complex, count=len(coeffs))
    return character_transform(mod, residue_vector(mod, n, c))


def naive_character_sums(mod: PrimeModulus, coeffs: Mapping[int, complex]) -> np.ndarray:
    """O(q * len(coeffs)) reference for :func:`all_character_sums`."""
    out = np.zeros(mod.q - 1, dtype=complex)
    for j in range(mod.q - 1):
        out[j] = sum(c * char_value(mod, j, n) for n, c in coeffs.items())
    return out
