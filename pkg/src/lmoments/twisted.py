"""Twisted second moment of L(s, chi) over the primitive characters mod q.

``twisted_main`` returns the main terms of the t' -> -t limit of Selberg's
formula. The limit keeps the constant of zeta(1 + i eps) = 1/(i eps) + gamma + ...
from both polar terms; that constant is reported separately as
``correction_term`` so the classical S_1/S_2 split stays visible.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .characters import PrimeModulus
from .lfunctions import REFERENCE, CriticalPoint, LVector, l_all, l_values
from .special import EULER_GAMMA, digamma, gamma_complex, riemann_zeta, tan_i_pi, zeta_q


@dataclass(frozen=True)
class TwistPair:
    h: int
    b: int

    def __post_init__(self):
        if self.h < 1 or self.b < 1:
            raise ValueError("twists must be positive integers")
        if math.gcd(self.h, self.b) != 1:
            raise ValueError(f"twists h={self.h}, b={self.b} are not coprime")

    def check(self, q: int) -> None:
        if (self.h * self.b) % q == 0:
            raise ValueError(f"q={q} divides h*b")

    def swapped(self) -> "TwistPair":
        return TwistPair(self.b, self.h)


@dataclass(frozen=True)
class TwistedMomentReport:
    q: int
    t: float
    pair: TwistPair
    lhs: complex
    s1_term: complex
    s2_term: complex
    correction_term: complex
    main_total: complex
    abs_deviation: float
    rel_deviation: float
    error_budget: float


def twist_weights(mod: PrimeModulus, pair: TwistPair) -> np.ndarray:
    """chi_j(h) conj(chi_j(b)) for j = 1..q-2."""
    pair.check(mod.q)
    e = int(mod.dlog[pair.h % mod.q]) - int(mod.dlog[pair.b % mod.q])
    j = np.arange(1, mod.q - 1)
    return np.exp(2j * np.pi * ((j * e) % (mod.q - 1)) / (mod.q - 1))


def twisted_lhs(
    mod: PrimeModulus, t: float, pair: TwistPair, method: str = REFERENCE,
    lvec: LVector | None = None,
) -> complex:
    """sum over primitive chi of |L(1/2+it, chi)|^2 chi(h) conj(chi(b))."""
    if lvec is None:
        lvec = l_all(mod, CriticalPoint(t), method)
    w = np.abs(lvec.values) ** 2 * twist_weights(mod, pair)
    return complex(math.fsum(w.real), math.fsum(w.imag))


def main_terms(q: int, t: float, h: int, b: int) -> tuple[complex, complex, complex]:
    """(S_1, S_2, correction) for prime q, each including the twist phase."""
    phi = q - 1
    phase = cmath.exp(complex(-0.5, t) * math.log(h) + complex(-0.5, -t) * math.log(b))
    big = phi * phi / q
    s1 = (
        phi * (1 - 1 / q) * math.log(q) / (q - 1)
        - phi * math.log(h)
        + big * (math.log(q / (2 * math.pi)) - math.log(b))
    )
    s2 = big * (digamma(complex(0.5, t)) - math.pi / 2 * tan_i_pi(t))
    # gamma from both polar terms; the log h term carries the exact (1 - 1/q) factor
    corr = (phi * (1 - 1 / q) + big) * EULER_GAMMA + phi * math.log(h) / q
    return phase * s1, phase * s2, phase * corr


def twisted_main(
    mod: PrimeModulus, t: float, pair: TwistPair, method: str = REFERENCE,
    lvec: LVector | None = None, include_correction: bool = True,
) -> TwistedMomentReport:
    pair.check(mod.q)
    q = mod.q
    lhs = twisted_lhs(mod, t, pair, method, lvec)
    s1, s2, corr = main_terms(q, t, pair.h, pair.b)
    if not include_correction:
        corr = 0j
    main = s1 + s2 + corr
    dev = abs(lhs - main)
    budget = (abs(t) + 1) ** 2 * ((pair.h + pair.b) * math.sqrt(q) + pair.h * pair.b)
    return TwistedMomentReport(
        q=q, t=t, pair=pair, lhs=lhs, s1_term=s1, s2_term=s2, correction_term=corr,
        main_total=main, abs_deviation=dev, rel_deviation=dev / abs(main),
        error_budget=budget,
    )


def general_main(q: int, s: complex, s_prime: complex, h: int, b: int) -> complex:
    """Main terms of sum* L(s, chi) L(s', conj chi) chi(h) conj(chi(b)) for prime q."""
    s, sp = complex(s), complex(s_prime)
    total = s + sp
    if total == 1:
        raise ValueError("s + s' = 1 is a pole of both terms; use twisted_main")
    phi = q - 1
    lh, lb, lq = math.log(h), math.log(b), math.log(q)
    first = phi * cmath.exp(-sp * lh - s * lb) * zeta_q(total, q)
    second = (
        phi * phi
        * cmath.exp((total - 1) * math.log(2 * math.pi) - total * lq - (1 - s) * lh - (1 - sp) * lb)
        / math.pi
        * gamma_complex(1 - s) * gamma_complex(1 - sp)
        * cmath.cos(math.pi / 2 * (s - sp))
        * riemann_zeta(2 - total)
    )
    return first + second


def twisted_general(
    mod: PrimeModulus, s: complex, s_prime: complex, pair: TwistPair, method: str = REFERENCE,
) -> tuple[complex, complex]:
    """(lhs, main) for independent points s, s' in the critical strip."""
    s, sp = complex(s), complex(s_prime)
    if not (0 < s.real < 1 and 0 < sp.real < 1):
        raise ValueError("need 0 < Re s, Re s' < 1")
    pair.check(mod.q)
    main = general_main(mod.q, s, sp, pair.h, pair.b)
    ls = l_values(mod, s, method)
    lsp = l_values(mod, sp, method)
    j = np.arange(1, mod.q - 1)
    terms = ls[j] * lsp[(-j) % (mod.q - 1)] * twist_weights(mod, pair)
    lhs = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return lhs, main
