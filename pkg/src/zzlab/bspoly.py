"""Extremal trigonometric majorants and minorants of interval indicators.

The construction is Selberg's: write the periodic indicator of
[-beta/2, beta/2] as beta + psi(x - beta/2) - psi(x + beta/2) with psi the
centered sawtooth, then replace each sawtooth by its one-sided degree-K
approximation (Vaaler's polynomial plus or minus a scaled Fejer kernel).
The two integral defects of 1/(2(K+1)) add up to the sharp 1/(K+1), and
the zeroth coefficient identity c(0) = beta +- 1/(K+1) is exact by
construction.  The sandwich property is enforced by a dense grid check in
the diagnostics rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .poly import place_count


def _vaaler_j(t: float) -> float:
    """Fourier weight of Vaaler's sawtooth approximation, J(0) = 1."""
    if t == 0.0:
        return 1.0
    return math.pi * t * (1.0 - t) / math.tan(math.pi * t) + t


@dataclass(frozen=True)
class TrigPoly:
    """Even real trigonometric polynomial sum c(n) e(nx), c(-n) = c(n)."""

    degree: int
    beta: float
    side: str  # "plus" or "minus"
    coeffs: tuple  # c(0..degree)

    def __call__(self, x) -> float | np.ndarray:
        return trig_eval(self, x)


def selberg_pair(beta: float, K: int) -> tuple[TrigPoly, TrigPoly]:
    """(minorant, majorant) of the indicator of [-beta/2, beta/2] mod 1."""
    if not 0.0 < beta < 1.0:
        raise ValueError("interval length must lie in (0, 1)")
    if K < 1:
        raise ValueError("degree must be >= 1")
    base = [0.0] * (K + 1)
    fejer = [0.0] * (K + 1)
    base[0] = beta
    fejer[0] = 1.0 / (K + 1)
    for n in range(1, K + 1):
        base[n] = (math.sin(math.pi * n * beta) / (math.pi * n)
                   * _vaaler_j(n / (K + 1)))
        fejer[n] = (1.0 - n / (K + 1)) / (K + 1) * math.cos(math.pi * n * beta)
    plus = TrigPoly(K, beta, "plus", tuple(b + f for b, f in zip(base, fejer)))
    minus = TrigPoly(K, beta, "minus", tuple(b - f for b, f in zip(base, fejer)))
    return minus, plus


def trig_eval(T: TrigPoly, x) -> float | np.ndarray:
    """Evaluate at x (scalar or array); exactly real by evenness."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, T.coeffs[0], dtype=float)
    for n in range(1, T.degree + 1):
        out += 2.0 * T.coeffs[n] * np.cos(2.0 * math.pi * n * x)
    return float(out) if out.ndim == 0 else out


def fourier_coeff(T: TrigPoly, n: int) -> float:
    n = abs(n)
    return T.coeffs[n] if n <= T.degree else 0.0


def indicator(beta: float, x) -> np.ndarray:
    """Closed-interval periodic indicator of [-beta/2, beta/2]."""
    x = np.asarray(x, dtype=float)
    frac = (x + 0.5) % 1.0 - 0.5
    return (np.abs(frac) <= beta / 2 + 1e-15).astype(float)


@dataclass(frozen=True)
class BSDiagnostics:
    K: int
    beta: float
    k_beta: float
    c0_error_minus: float
    c0_error_plus: float
    sandwich_violation: float
    even_coeff_sum: float          # |sum_{n>=1} c(2n)|, worst side
    log_identity_dev: float        # |sum n c(n)^2 - log(K beta)/(2 pi^2)|, worst side
    max_coeff_n: float             # max |c(n) n|
    prime_sum_dev: float           # place-weighted version of the log identity
    log_checks_apply: bool


def bs_diagnostics(pair: tuple[TrigPoly, TrigPoly], grid_size: int,
                   q: int) -> BSDiagnostics:
    """Grid and coefficient diagnostics for a minorant/majorant pair.

    The log identities are only meaningful for K beta > 1; below that they
    are reported but flagged non-applicable.
    """
    minus, plus = pair
    K, beta = plus.degree, plus.beta
    xs = np.arange(grid_size) / grid_size
    ind = indicator(beta, xs)
    v_plus = float(np.max(ind - trig_eval(plus, xs)))
    v_minus = float(np.max(trig_eval(minus, xs) - ind))
    sandwich = max(v_plus, v_minus, 0.0)

    c0m = abs(minus.coeffs[0] - (beta - 1.0 / (K + 1)))
    c0p = abs(plus.coeffs[0] - (beta + 1.0 / (K + 1)))

    ref = math.log(K * beta) / (2 * math.pi**2) if K * beta > 0 else 0.0
    even_sum = 0.0
    log_dev = 0.0
    prime_dev = 0.0
    max_cn = 0.0
    for T in (minus, plus):
        even_sum = max(even_sum, abs(math.fsum(
            T.coeffs[n] for n in range(2, K + 1, 2))))
        log_dev = max(log_dev, abs(math.fsum(
            n * T.coeffs[n]**2 for n in range(1, K + 1)) - ref))
        max_cn = max(max_cn, max(abs(n * T.coeffs[n]) for n in range(1, K + 1)))
        psum = math.fsum(
            T.coeffs[n]**2 * n**2 * (place_count(q, n) + (1 if n == 1 else 0))
            / q**n for n in range(1, K + 1))
        prime_dev = max(prime_dev, abs(psum - ref))
    return BSDiagnostics(K, beta, K * beta, c0m, c0p, sandwich, even_sum,
                         log_dev, max_cn, prime_dev, K * beta > 1)
