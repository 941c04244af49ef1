"""Mollifier apparatus: ell-sequence, prime windows, truncated exponentials.

For a window of primes ``P_j`` and a character ``chi`` the prime power sum is

    P_j(t, chi) = sum_{p in P_j} chi(p) p^{-1/2-it}

and the mollifier factors are ``N_j = E_{ell_j}(alpha * P_j)`` together with
the correction ``Q_j = (12 max(1, k^2) P_j / ell_j)^(r_k ell_j)``.

Dirichlet polynomials store only the real coefficients ``x_n``; the factor
``chi(n) n^{-1/2-it}`` is applied at evaluation time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .characters import PrimeModulus, all_character_sums, char_value, is_prime, sieve_primes

CANONICAL = "canonical"
CUSTOM = "custom"
DEFAULT_SUPPORT_CAP = 10_000_000


class SupportBudgetExceeded(RuntimeError):
    pass


def r_k(k: float) -> int:
    if k <= 0 or k == 1:
        raise ValueError("k must be positive and different from 1")
    if k < 1:
        return math.ceil(1 + 1 / k) + 1
    return math.ceil(k / (2 * k - 1)) + 1


def ell_sequence(q: int, N: int, M: int) -> list[int]:
    """The terms ell_1, ..., ell_R that stay above 10^M."""
    threshold = 10**M
    ell = []
    cur = 2 * math.ceil(N * math.log(math.log(q)))
    while cur > threshold:
        ell.append(cur)
        nxt = 2 * math.ceil(N * math.log(cur))
        if nxt >= cur and nxt > threshold:
            raise ValueError(
                f"ell-sequence stalls at {nxt} > 10^{M}; increase M or decrease N"
            )
        cur = nxt
    return ell


def custom_ell(window: Sequence[int]) -> int:
    """Smallest even ell >= 12 * sum_{p in window} p^{-1/2} (at least 2).

    This keeps |12 P_j / ell_j| <= 1 for every character, so Q_j stays a tail
    correction as it is for canonical windows at large q.
    """
    bound = 12 * math.fsum(p**-0.5 for p in window)
    return max(2, 2 * math.ceil(bound / 2))


@dataclass(frozen=True)
class MollifierParams:
    k: float
    N: int
    M: int
    q: int
    ell: tuple[int, ...]
    windows: tuple[tuple[int, ...], ...]
    window_mode: str = CANONICAL
    bounds: tuple[float, ...] = field(default=())

    @property
    def R(self) -> int:
        return len(self.ell)

    @property
    def r_k(self) -> int:
        return r_k(self.k)

    @property
    def q_scale(self) -> float:
        return 12 * max(1.0, self.k**2)

    @property
    def degenerate(self) -> bool:
        """No window carries a prime, so every N and the product of Q-terms is trivial."""
        return all(len(w) == 0 for w in self.windows)

    @property
    def empty_windows(self) -> bool:
        """True when some window has no primes (common in canonical mode at small q)."""
        return any(len(w) == 0 for w in self.windows)


def make_params(
    k: float,
    q: int,
    N: int = 2,
    M: int = 1,
    window_mode: str = CANONICAL,
    bounds: Sequence[float] | None = None,
    ell: Sequence[int] | None = None,
) -> MollifierParams:
    """Build the mollifier parameters.

    In custom mode ``bounds`` (ascending) replace the cutoffs q^(1/ell_j^2):
    ``P_1`` is the odd primes up to ``bounds[0]`` and ``P_j`` the primes in
    ``(bounds[j-2], bounds[j-1]]``. ``ell`` then defaults to :func:`custom_ell`.
    """
    if k <= 0 or k == 1:
        raise ValueError("k must be positive and k != 1")
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")

    if window_mode == CANONICAL:
        if bounds:
            raise ValueError("bounds are only meaningful in custom mode")
        ell_t = tuple(ell) if ell is not None else tuple(ell_sequence(q, N, M))
        cut = [q ** (1.0 / e**2) for e in ell_t]
    elif window_mode == CUSTOM:
        if not bounds:
            raise ValueError("custom window mode needs bounds")
        cut = [float(b) for b in bounds]
        if any(b <= a for a, b in zip(cut, cut[1:])):
            raise ValueError("custom bounds must be strictly ascending")
        if cut[-1] >= q:
            raise ValueError("window bounds must stay below q")
        ell_t = tuple(ell) if ell is not None else ()
    else:
        raise ValueError(f"unknown window mode {window_mode!r}")

    primes = sieve_primes(int(math.floor(max(cut, default=0))))
    windows = []
    lo = 2.0  # P_1 holds odd primes only
    for c in cut:
        windows.append(tuple(p for p in primes if lo < p <= c))
        lo = max(lo, c)
    if window_mode == CUSTOM and ell is None:
        ell_t = tuple(custom_ell(w) for w in windows)
    if len(ell_t) != len(windows):
        raise ValueError("need one ell per window bound")
    if any(e <= 0 or e % 2 for e in ell_t):
        raise ValueError("every ell_j must be a positive even integer")
    return MollifierParams(
        k=k, N=N, M=M, q=q, ell=ell_t, windows=tuple(windows),
        window_mode=window_mode, bounds=tuple(cut) if window_mode == CUSTOM else (),
    )


def truncated_exp(ell: int, x):
    """E_ell(x) = sum_{j=0}^{ell} x^j / j!  (Horner form; x may be an array)."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    acc = np.ones_like(x, dtype=complex) if np.ndim(x) else 1.0 + 0j
    for j in range(ell, 0, -1):
        acc = 1 + acc * x / j
    return acc


# ---------------------------------------------------------------------------
# Pointwise values

def power_sum(params: MollifierParams, j: int, mod: PrimeModulus, char_j: int, t: float) -> complex:
    if not 1 <= j <= params.R:
        raise ValueError(f"window index {j} outside 1..{params.R}")
    return sum(
        (char_value(mod, char_j, p) * p ** complex(-0.5, -t) for p in params.windows[j - 1]),
        0j,
    )


def power_sums_all(params: MollifierParams, mod: PrimeModulus, t: float) -> np.ndarray:
    """Array of shape (R, q-1): row j-1 holds P_j(t, chi) for every character index."""
    out = np.zeros((params.R, mod.q - 1), dtype=complex)
    for i, window in enumerate(params.windows):
        if window:
            out[i] = all_character_sums(mod, {p: p ** complex(-0.5, -t) for p in window})
    return out


def n_factor(params: MollifierParams, j: int, p_value, alpha: float):
    return truncated_exp(params.ell[j - 1], alpha * p_value)


def n_product(params: MollifierParams, mod: PrimeModulus, char_j: int, t: float, alpha: float) -> complex:
    out = 1 + 0j
    for j in range(1, params.R + 1):
        out *= n_factor(params, j, power_sum(params, j, mod, char_j, t), alpha)
    return out


def q_factor(params: MollifierParams, j: int, p_value):
    if j == params.R + 1:
        return np.ones_like(p_value, dtype=complex) if np.ndim(p_value) else 1 + 0j
    if not 1 <= j <= params.R:
        raise ValueError(f"Q index {j} outside 1..{params.R + 1}")
    ell = params.ell[j - 1]
    return (params.q_scale * p_value / ell) ** (params.r_k * ell)


# ---------------------------------------------------------------------------
# Dirichlet polynomial expansions

@dataclass
class DirichletPolynomial:
    """Sparse real coefficients of ``sum_n x_n chi(n) n^{-1/2-it}``."""

    coeffs: dict[int, float]

    @property
    def length_bound(self) -> int:
        return max(self.coeffs, default=0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def evaluate(self, mod: PrimeModulus, char_j: int, t: float) -> complex:
        s = complex(0.5, t)
        return sum((c * char_value(mod, char_j, n) * n**-s for n, c in self.coeffs.items()), 0j)

    def evaluate_all(self, mod: PrimeModulus, t: float) -> np.ndarray:
        """Values at every character index; keys may exceed int64, so reduce in Python."""
        keys = list(self.coeffs)
        r = np.array([n % mod.q for n in keys], dtype=np.int64)
        logn = np.array([math.log(n) for n in keys])
        c = np.array([self.coeffs[n] for n in keys], dtype=float)
        w = c * np.exp(complex(-0.5, -t) * logn)
        return all_character_sums(mod, (r, w))

    def __mul__(self, other: "DirichletPolynomial") -> "DirichletPolynomial":
        out: dict[int, float] = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                out[a * b] = out.get(a * b, 0.0) + x * y
        return DirichletPolynomial(out)

    def scaled(self, factor: float) -> "DirichletPolynomial":
        return DirichletPolynomial({n: factor * c for n, c in self.coeffs.items()})


def _monomials(primes: Sequence[int], min_deg: int, max_deg: int):
    """Yield (n, exponents) over products of ``primes`` with min_deg <= Omega(n) <= max_deg."""

    def rec(i, n, left, exps):
        if i == len(primes):
            if max_deg - left >= min_deg:
                yield n, exps
            return
        p = primes[i]
        pn = n
        for e in range(left + 1):
            yield from rec(i + 1, pn, left - e, exps + (e,))
            pn *= p

    yield from rec(0, 1, max_deg, ())


def _count_monomials(n_primes: int, min_deg: int, max_deg: int) -> int:
    # number of exponent vectors with total degree in [min_deg, max_deg]
    def upto(d):
        return math.comb(n_primes + d, d) if d >= 0 else 0

    if n_primes == 0:
        return 1 if min_deg == 0 else 0
    return upto(max_deg) - upto(min_deg - 1)


def _exp_window(primes: Sequence[int], ell: int, alpha: float) -> DirichletPolynomial:
    # (sum_p [p])^m / m! = sum_{|e| = m} prod [p]^e_p / e_p!
    out = {}
    for n, exps in _monomials(primes, 0, ell):
        w = math.prod(math.factorial(e) for e in exps)
        out[n] = alpha ** sum(exps) / w
    return DirichletPolynomial(out)


def _window_indices(params: MollifierParams, windows: Iterable[int] | None) -> list[int]:
    idx = list(range(1, params.R + 1)) if windows is None else sorted(set(windows))
    for j in idx:
        if not 1 <= j <= params.R:
            raise ValueError(f"window index {j} outside 1..{params.R}")
    return idx


def expand_coefficients(
    params: MollifierParams,
    alpha: float,
    windows: Iterable[int] | None = None,
    cap: int = DEFAULT_SUPPORT_CAP,
) -> DirichletPolynomial:
    """Coefficients x_n of prod_{j in windows} E_{ell_j}(alpha * P_j)."""
    idx = _window_indices(params, windows)
    size = math.prod(_count_monomials(len(params.windows[j - 1]), 0, params.ell[j - 1]) for j in idx)
    if size > cap:
        raise SupportBudgetExceeded(f"expansion needs {size} terms; cap is {cap}")
    poly = DirichletPolynomial({1: 1.0})
    for j in idx:
        poly = poly * _exp_window(params.windows[j - 1], params.ell[j - 1], alpha)
    return poly


def expand_power_coefficients(
    params: MollifierParams, v: int, cap: int = DEFAULT_SUPPORT_CAP
) -> DirichletPolynomial:
    """Coefficients of P_{v+1}^(r_k ell_{v+1}): (r_k ell)! / w(n) over Omega(n) = r_k ell.

    ``w(n) = prod_p e_p!`` for ``n = prod_p p^e_p``.
    """
    if not 0 <= v <= params.R - 1:
        raise ValueError(f"v={v} outside 0..{params.R - 1}")
    primes = params.windows[v]
    deg = params.r_k * params.ell[v]
    size = _count_monomials(len(primes), deg, deg)
    if size > cap:
        raise SupportBudgetExceeded(f"expansion needs {size} terms; cap is {cap}")
    top = math.factorial(deg)
    out = {}
    for n, exps in _monomials(primes, deg, deg):
        out[n] = float(top // math.prod(math.factorial(e) for e in exps))
    return DirichletPolynomial(out)


def nq_log_scale(params: MollifierParams, v: int) -> float:
    """log of (12 max(1,k^2) / ell_{v+1})^(r_k ell_{v+1}) * (r_k ell_{v+1})!; 0 when v = R."""
    if v == params.R:
        return 0.0
    ell = params.ell[v]
    deg = params.r_k * ell
    return deg * math.log(params.q_scale / ell) + math.lgamma(deg + 1)


def normalized_nq_coefficients(
    params: MollifierParams, v: int, cap: int = DEFAULT_SUPPORT_CAP
) -> tuple[DirichletPolynomial, float]:
    """(u, log_scale) with prod_{j<=v} N_j(k-1) Q_{v+1} = exp(log_scale) sum_a u_a chi(a) a^{-1/2-it}.

    For v < R, u_a = x_{a_1} / w(n) where a = a_1 n splits along the windows.
    """
    if not 0 <= v <= params.R:
        raise ValueError(f"v={v} outside 0..{params.R}")
    x = expand_coefficients(params, params.k - 1, range(1, v + 1), cap)
    if v == params.R:
        return x, 0.0
    primes = params.windows[v]
    deg = params.r_k * params.ell[v]
    size = len(x) * _count_monomials(len(primes), deg, deg)
    if size > cap:
        raise SupportBudgetExceeded(f"product needs {size} terms; cap is {cap}")
    inv_w = DirichletPolynomial({
        n: 1.0 / math.prod(math.factorial(e) for e in exps)
        for n, exps in _monomials(primes, deg, deg)
    })
    return x * inv_w, nq_log_scale(params, v)


def factorial_scale_table(params: MollifierParams) -> list[dict]:
    """log of (12/ell)^(2 r ell) ((r ell)!)^2 per window, and its size as a power of q."""
    rows = []
    logq = math.log(params.q)
    for j, ell in enumerate(params.ell, start=1):
        deg = params.r_k * ell
        log_scale = 2 * deg * math.log(12 / ell) + 2 * math.lgamma(deg + 1)
        rows.append({"j": j, "ell": ell, "log_scale": log_scale, "q_exponent": log_scale / logq})
    return rows
