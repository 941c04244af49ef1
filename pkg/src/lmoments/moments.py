"""Moments over primitive characters and the mollifier inequality checks.

Every quantity is a direct sum over all characters j = 1..q-2, built from one
vector of L-values and the window power sums.  Nothing here asserts an
implied constant: asymptotic statements are reported as ratios against
phi*(q) (log q)^(k^2).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .characters import PrimeModulus, build_modulus
from .lfunctions import REFERENCE, CriticalPoint, LVector, l_all
from .mollifier import (
    DEFAULT_SUPPORT_CAP,
    MollifierParams,
    SupportBudgetExceeded,
    expand_coefficients,
    normalized_nq_coefficients,
    power_sums_all,
    q_factor,
    truncated_exp,
)
from .special import EULER_GAMMA, digamma, tan_i_pi

log = logging.getLogger(__name__)


def _fsum(x: np.ndarray) -> float:
    return math.fsum(np.asarray(x, dtype=float))


def _csum(x: np.ndarray) -> complex:
    return complex(math.fsum(x.real), math.fsum(x.imag))


def normalizer(q: int, k: float) -> float:
    """phi*(q) (log q)^(k^2)."""
    return (q - 2) * math.log(q) ** (k * k)


def moment(mod: PrimeModulus, t: float, k: float, method: str = REFERENCE,
           lvec: LVector | None = None) -> float:
    """sum over primitive chi of |L(1/2+it, chi)|^(2k)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if lvec is None:
        lvec = l_all(mod, CriticalPoint(t), method)
    return _fsum(np.abs(lvec.values) ** (2 * k))


class MollifierValues:
    """Pointwise mollifier pieces for every primitive character at a fixed t.

    ``P[j-1]`` is P_j(t, chi) over the characters, ``N(alpha, j)`` the factor
    E_{ell_j}(alpha P_j) and ``Q(j)`` the correction term (Q(R+1) = 1).
    """

    def __init__(self, params: MollifierParams, mod: PrimeModulus, t: float):
        if params.q != mod.q:
            raise ValueError("mollifier parameters built for a different modulus")
        self.params = params
        self.size = mod.q - 2
        self.P = power_sums_all(params, mod, t)[:, 1:]

    def N(self, alpha: float, j: int) -> np.ndarray:
        return truncated_exp(self.params.ell[j - 1], alpha * self.P[j - 1])

    def N_product(self, alpha: float) -> np.ndarray:
        out = np.ones(self.size, dtype=complex)
        for j in range(1, self.params.R + 1):
            out = out * self.N(alpha, j)
        return out

    def Q(self, j: int) -> np.ndarray:
        if j == self.params.R + 1:
            return np.ones(self.size, dtype=complex)
        return q_factor(self.params, j, self.P[j - 1])

    def product_sum_terms(self, k: float) -> np.ndarray:
        """prod_j (|N_j(k)|^2 + |Q_j|^2)."""
        out = np.ones(self.size)
        for j in range(1, self.params.R + 1):
            out = out * (np.abs(self.N(k, j)) ** 2 + np.abs(self.Q(j)) ** 2)
        return out

    def v_term(self, alpha: float, v: int) -> np.ndarray:
        """prod_{j<=v} |N_j(alpha)|^2 |Q_{v+1}|^2."""
        out = np.abs(self.Q(v + 1)) ** 2
        for j in range(1, v + 1):
            out = out * np.abs(self.N(alpha, j)) ** 2
        return out

    def v_sum_terms(self, alpha: float) -> np.ndarray:
        return sum(self.v_term(alpha, v) for v in range(self.params.R + 1))


@dataclass
class InequalityReport:
    lhs: complex
    rhs_factors: list[tuple[float, float]]
    rhs: float
    holds: bool
    slack_ratio: float
    constant: float = 1.0
    branch: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def lhs_abs(self) -> float:
        return abs(self.lhs)


def _rhs(factors: list[tuple[float, float]]) -> float:
    # sum of logs keeps huge Q-terms from overflowing the product
    if any(v == 0 for v, e in factors if e > 0):
        return 0.0
    return math.exp(sum(e * math.log(v) for v, e in factors))


def _report(lhs, factors, constant, branch, **extras) -> InequalityReport:
    rhs = _rhs(factors)
    a = abs(lhs)
    return InequalityReport(
        lhs=lhs, rhs_factors=factors, rhs=rhs, holds=a <= constant * rhs,
        slack_ratio=rhs / a if a > 0 else math.inf, constant=constant, branch=branch,
        extras=extras,
    )


def _setup(mod, t, params, method, lvec):
    if lvec is None:
        lvec = l_all(mod, CriticalPoint(t), method)
    return lvec.values, MollifierValues(params, mod, t)


def lemma21_check(mod: PrimeModulus, t: float, k: float, params: MollifierParams,
                  method: str = REFERENCE, lvec: LVector | None = None) -> InequalityReport:
    """Hoelder chain bounding sum* L N(t,chi,k-1) N(-t,conj chi,k)."""
    if k <= 0 or k == 1:
        raise ValueError("need k > 0 and k != 1")
    L, mv = _setup(mod, t, params, method, lvec)
    n_prev = mv.N_product(k - 1)
    # N(-t, conj chi, k) is the conjugate of N(t, chi, k): E_ell has real coefficients
    lhs = _csum(L * n_prev * np.conj(mv.N_product(k)))
    moment_2k = _fsum(np.abs(L) ** (2 * k))
    prod_sum = _fsum(mv.product_sum_terms(k))
    if k < 1:
        second = _fsum(np.abs(L) ** 2 * np.abs(n_prev) ** 2)
        factors = [(moment_2k, 0.5), (second, (1 - k) / 2), (prod_sum, k / 2)]
        branch = "k<1"
    else:
        factors = [(moment_2k, 1 / (2 * k)), (prod_sum, (2 * k - 1) / (2 * k))]
        branch = "k>1"
    return _report(lhs, factors, 1.0, branch)


def lemma22_check(mod: PrimeModulus, t: float, k: float, params: MollifierParams,
                  method: str = REFERENCE, lvec: LVector | None = None,
                  constant: float = 1.0) -> InequalityReport:
    """sum*|L|^(2k) against (A)^k (B)^(1-k) with the two v-sums A, B."""
    if not 0 < k < 1:
        raise ValueError("need 0 < k < 1")
    L, mv = _setup(mod, t, params, method, lvec)
    lhs = _fsum(np.abs(L) ** (2 * k))
    a = _fsum(np.abs(L) ** 2 * mv.v_sum_terms(k - 1))
    b = _fsum(mv.v_sum_terms(k))
    return _report(lhs, [(a, k), (b, 1 - k)], constant, "0<k<1")


# ---------------------------------------------------------------------------
# Propositions

def _diagonal_sum(x: dict, y: dict, X: float) -> float:
    total = []
    for b, yb in y.items():
        for a, xa in x.items():
            if b % a == 0 and b // a <= X:
                total.append(xa * yb / b)
    return math.fsum(total)


def prop24_diagonal(mod: PrimeModulus, k: float, params: MollifierParams,
                    X: float = math.inf, cap: int = DEFAULT_SUPPORT_CAP) -> float:
    """phi*(q) sum_{am = b, m <= X} x_a y_b / sqrt(abm), with x for alpha=k-1 and y for alpha=k."""
    x = expand_coefficients(params, k - 1, cap=cap).coeffs
    y = expand_coefficients(params, k, cap=cap).coeffs
    if len(x) * len(y) > cap:
        raise SupportBudgetExceeded(f"diagonal needs {len(x) * len(y)} pairs; cap is {cap}")
    # sqrt(a * b * m) = b when b = a m
    return (mod.q - 2) * _diagonal_sum(x, y, X)


@dataclass
class Prop24Report:
    q: int
    k: float
    t: float
    diagonal: float
    lhs: complex
    off_diagonal: complex


def prop24_report(mod: PrimeModulus, t: float, k: float, params: MollifierParams,
                  method: str = REFERENCE, lvec: LVector | None = None) -> Prop24Report:
    """Diagonal term against the full character sum; the difference is reported, not bounded."""
    diag = prop24_diagonal(mod, k, params)
    L, mv = _setup(mod, t, params, method, lvec)
    lhs = _csum(L * mv.N_product(k - 1) * np.conj(mv.N_product(k)))
    return Prop24Report(q=mod.q, k=k, t=t, diagonal=diag, lhs=lhs, off_diagonal=lhs - diag)


def _factor_exponents(n: int, primes: list[int]) -> list[int]:
    out = []
    for p in primes:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append(e)
    if n != 1:
        raise ValueError("coefficient index not smooth over the window primes")
    return out


def gcd_weighted_sums(u: dict, primes: list[int], log_scale: float = 0.0,
                      block: int = 4_000_000) -> tuple[float, float, float]:
    """Pair sums of w = S^2 (a,b) u_a u_b / (ab) and of w log(a/(a,b)), w log(b/(a,b)).

    ``S = exp(log_scale)`` is folded into each term so that huge scales and
    tiny gcd weights never meet as separate floats.  Indices may be far
    beyond int64, so gcds are taken on exponent vectors.
    """
    keys = list(u)
    if not keys:
        return 0.0, 0.0, 0.0
    logp = np.log(np.array(primes, dtype=float)) if primes else np.zeros(0)
    E = np.array([_factor_exponents(n, primes) for n in keys], dtype=float).reshape(len(keys), len(primes))
    coef = np.array([u[n] for n in keys])
    loga = E @ logp
    chunk = max(1, block // (len(keys) * max(1, len(primes))))
    s0, s1, s2 = [], [], []
    for lo in range(0, len(keys), chunk):
        Ea = E[lo : lo + chunk]
        logg = np.minimum(Ea[:, None, :], E[None, :, :]) @ logp
        la = loga[lo : lo + chunk, None]
        lb = loga[None, :]
        w = coef[lo : lo + chunk, None] * coef[None, :] * np.exp(logg - la - lb + 2 * log_scale)
        s0.append(_fsum(w.ravel()))
        s1.append(_fsum((w * (la - logg)).ravel()))
        s2.append(_fsum((w * (lb - logg)).ravel()))
    return math.fsum(s0), math.fsum(s1), math.fsum(s2)


@dataclass
class Prop25Report:
    q: int
    k: float
    t: float
    v: int
    ell_next: int | None
    direct: float
    reference_scale: float
    ratio: float
    coef_sum: float
    max_abs_u: float
    log_scale: float
    s1_part: complex
    s2_part: complex
    correction_part: complex
    predicted: complex


def prop25_check(mod: PrimeModulus, t: float, k: float, params: MollifierParams, v: int,
                 method: str = REFERENCE, lvec: LVector | None = None,
                 cap: int = DEFAULT_SUPPORT_CAP, decompose: bool = True) -> Prop25Report:
    """sum* |L|^2 prod_{j<=v}|N_j(k-1)|^2 |Q_{v+1}|^2, directly and via the gcd-reduced main terms.

    The pair sum over the expanded coefficients is quadratic in their support;
    ``decompose=False`` skips it and leaves the main-term fields as NaN.
    """
    if not 0 < k < 1:
        raise ValueError("need 0 < k < 1")
    if not 0 <= v <= params.R:
        raise ValueError(f"v={v} outside 0..{params.R}")
    L, mv = _setup(mod, t, params, method, lvec)
    direct = _fsum(np.abs(L) ** 2 * mv.v_term(k - 1, v))
    ref = normalizer(mod.q, k)

    u, log_scale = normalized_nq_coefficients(params, v, cap)
    max_u = max((abs(c) for c in u.coeffs.values()), default=0.0)
    if not decompose:
        nan = math.nan
        return Prop25Report(
            q=mod.q, k=k, t=t, v=v, ell_next=params.ell[v] if v < params.R else None,
            direct=direct, reference_scale=ref, ratio=direct / ref, coef_sum=nan,
            max_abs_u=max_u, log_scale=log_scale, s1_part=nan, s2_part=nan,
            correction_part=nan, predicted=nan,
        )
    if len(u) ** 2 > cap * 100:
        raise SupportBudgetExceeded(f"gcd sum needs {len(u) ** 2} pairs; cap is {100 * cap}")
    primes = sorted({p for w in params.windows[: v + 1] for p in w})
    # scaled sums: S^2 times the plain gcd-weighted coefficient sums
    w0, w_la, w_lb = gcd_weighted_sums(u.coeffs, primes, log_scale)
    coef_sum = w0 * math.exp(-2 * log_scale)

    q = mod.q
    phi = q - 1
    big = phi * phi / q
    s1 = ((phi * (1 - 1 / q) * math.log(q) / (q - 1) + big * math.log(q / (2 * math.pi))) * w0
          - phi * w_la - big * w_lb)
    s2 = big * (digamma(complex(0.5, t)) - math.pi / 2 * tan_i_pi(t)) * w0
    corr = (phi * (1 - 1 / q) + big) * EULER_GAMMA * w0 + phi / q * w_la
    return Prop25Report(
        q=q, k=k, t=t, v=v, ell_next=params.ell[v] if v < params.R else None,
        direct=direct, reference_scale=ref, ratio=direct / ref, coef_sum=coef_sum,
        max_abs_u=max_u, log_scale=log_scale,
        s1_part=s1, s2_part=s2, correction_part=corr, predicted=s1 + s2 + corr,
    )


@dataclass
class Prop26Report:
    q: int
    k: float
    t: float
    product_sum: float
    v_sum: float
    normalizer: float

    @property
    def product_ratio(self) -> float:
        return self.product_sum / self.normalizer

    @property
    def v_sum_ratio(self) -> float:
        return self.v_sum / self.normalizer


def prop26_check(mod: PrimeModulus, t: float, k: float, params: MollifierParams) -> Prop26Report:
    if k <= 0 or k == 1:
        raise ValueError("need k > 0 and k != 1")
    mv = MollifierValues(params, mod, t)
    return Prop26Report(
        q=mod.q, k=k, t=t,
        product_sum=_fsum(mv.product_sum_terms(k)),
        v_sum=_fsum(mv.v_sum_terms(k)),
        normalizer=normalizer(mod.q, k),
    )


# ---------------------------------------------------------------------------
# Sweeps

@dataclass
class SweepRow:
    q: int
    k: float
    t: float
    moment: float
    normalizer: float
    ratio: float
    status: str = "ok"


def _sweep_one_q(args) -> list[SweepRow]:
    q, ks, ts, method = args
    rows = []
    try:
        mod = build_modulus(q)
    except Exception as exc:  # isolate the failure to this q's rows
        return [SweepRow(q, k, t, math.nan, math.nan, math.nan, f"error: {exc}") for k in ks for t in ts]
    lvecs: dict[float, LVector | Exception] = {}
    for t in ts:
        try:
            lvecs[t] = l_all(mod, CriticalPoint(t), method)
        except Exception as exc:
            lvecs[t] = exc
    for k in ks:
        for t in ts:
            lv = lvecs[t]
            try:
                if isinstance(lv, Exception):
                    raise lv
                m = moment(mod, t, k, lvec=lv)
                nz = normalizer(q, k)
                rows.append(SweepRow(q, k, t, m, nz, m / nz))
            except Exception as exc:
                log.warning("sweep row q=%s k=%s t=%s failed: %s", q, k, t, exc)
                rows.append(SweepRow(q, k, t, math.nan, math.nan, math.nan, f"error: {exc}"))
    return rows


def sweep(qs, ks, ts, method: str = REFERENCE, workers: int = 1) -> list[SweepRow]:
    """One row per (q, k, t), ordered by input order (q outermost)."""
    jobs = [(q, list(ks), list(ts), method) for q in qs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_sweep_one_q, jobs))
    else:
        chunks = [_sweep_one_q(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]

