"""Shared numerics for the closed-form evaluators.

SeriesWorkspace holds the log-factorial table and the antenna cap: the
combinatorial coefficients in the closed forms grow factorially with the
antenna count, so evaluation refuses M beyond the cap (default 10) where the
Monte Carlo oracle has validated double-precision accuracy.

PolyExpTerms is a little algebra of finite sums

    sum_i  sign_i * exp(logc_i) * v**a_i * exp(-m*v) * L**p_i * exp(-q_i*L)

with L = (m+1)*mu - m*v, closed under differentiation in v and under exact
integration over sub-intervals of the band [mu, (1+1/m)*mu].  Every term is
evaluated as a single exp of its summed log-magnitude so that individual
terms can underflow harmlessly instead of polluting the alternating sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SeriesWorkspace", "PolyExpTerms", "DEFAULT_WORKSPACE"]

_TABLE_SIZE = 128  # factorial arguments never exceed ~4x the antenna cap


class SeriesWorkspace:
    """Precomputed log-factorials plus the supported antenna range."""

    def __init__(self, max_antennas_supported: int = 10):
        if max_antennas_supported < 1:
            raise ValueError("max_antennas_supported must be >= 1")
        self.max_antennas_supported = max_antennas_supported
        n = max(_TABLE_SIZE, 4 * max_antennas_supported)
        # exact integer factorials rounded once to double: correct to 0.5 ulp
        self.log_factorials = np.array(
            [math.log(math.factorial(k)) for k in range(n)], dtype=float)

    def check_antennas(self, m: int) -> None:
        if not 1 <= m <= self.max_antennas_supported:
            raise ValueError(
                f"antenna count {m} outside supported range "
                f"[1, {self.max_antennas_supported}]")

    def log_factorial(self, n: int) -> float:
        if n < 0:
            raise ValueError("factorial of negative integer")
        return float(self.log_factorials[n])

    def log_binomial(self, n: int, k: int) -> float:
        if not 0 <= k <= n:
            raise ValueError(f"binomial ({n}, {k}) out of range")
        return (self.log_factorials[n] - self.log_factorials[k]
                - self.log_factorials[n - k])

    @staticmethod
    def compensated_sum(values) -> float:
        """Exactly-rounded accumulation for alternating series."""
        return math.fsum(values)


DEFAULT_WORKSPACE = SeriesWorkspace()


@dataclass(frozen=True)
class PolyExpTerms:
    """Finite term sum on the band v in [mu, (1+1/m)*mu]; see module docstring.

    Terms are (sign, logc, a, p, q) for sign*exp(logc)*v^a*e^(-m v)*L^p*e^(-q L).
    """
    m: int
    mu: float
    terms: tuple = field(default_factory=tuple)

    @property
    def upper(self) -> float:
        return (1 + 1 / self.m) * self.mu

    def value(self, v: float) -> float:
        ell = (self.m + 1) * self.mu - self.m * v
        if ell < 0 or v < 0:
            return 0.0
        logv = math.log(v) if v > 0 else -math.inf
        logl = math.log(ell) if ell > 0 else -math.inf
        acc = []
        for sign, logc, a, p, q in self.terms:
            e = logc - self.m * v - q * ell
            if a:
                e += a * logv
            if p:
                if ell == 0.0:
                    continue
                e += p * logl
            acc.append(sign * math.exp(e))
        return math.fsum(acc)

    def derivative(self) -> "PolyExpTerms":
        """d/dv of the sum; closed in the same term family."""
        out = []
        m = self.m
        for sign, logc, a, p, q in self.terms:
            if a:
                out.append((sign, logc + math.log(a), a - 1, p, q))
            drift = m * (q - 1)  # d/dv exp(-m v - q L) = (q-1) m exp(...)
            if drift:
                s = sign if drift > 0 else -sign
                out.append((s, logc + math.log(abs(drift)), a, p, q))
            if p:
                out.append((-sign, logc + math.log(p * m), a, p - 1, q))
        return PolyExpTerms(m=self.m, mu=self.mu, terms=tuple(out))

    def integral(self, v0: float | None = None, v1: float | None = None) -> float:
        """Exact integral over [v0, v1] (defaults to the whole band).

        Repeated integration by parts reduces (a, p) to (0, 0); results are
        memoized per exponent pair.  The q = 1 family has a constant
        exponential factor and integrates through a pure polynomial recursion.
        """
        m, mu = self.m, self.mu
        if v0 is None:
            v0 = mu
        if v1 is None:
            v1 = self.upper
        if v1 <= v0:
            return 0.0

        def ell(v):
            return (m + 1) * mu - m * v

        def boundary(a, p, q, v):
            w = ell(v)
            if w < 0:
                w = 0.0
            if p and w == 0.0:
                return 0.0
            e = -m * v - q * w
            if a:
                e += a * math.log(v)
            if p:
                e += p * math.log(w)
            return math.exp(e)

        acc = []
        for sign, logc, a, p, q in self.terms:
            drift = m * (1 - q)
            memo: dict[tuple[int, int], float] = {}

            def anti(a_, p_):
                if (a_, p_) in memo:
                    return memo[(a_, p_)]
                if drift != 0:
                    val = (boundary(a_, p_, q, v0) - boundary(a_, p_, q, v1)) / drift
                    if a_:
                        val += a_ * anti(a_ - 1, p_) / drift
                    if p_:
                        val -= m * p_ * anti(a_, p_ - 1) / drift
                else:
                    val = math.exp(-(m + 1) * mu) * poly(a_, p_)
                memo[(a_, p_)] = val
                return val

            pmemo: dict[tuple[int, int], float] = {}

            def poly(a_, p_):
                # integral of v^a L^p with no exponential left (q == 1 family)
                if (a_, p_) in pmemo:
                    return pmemo[(a_, p_)]
                if p_ == 0:
                    val = (v1 ** (a_ + 1) - v0 ** (a_ + 1)) / (a_ + 1)
                else:
                    val = (v1 ** (a_ + 1) * ell(v1) ** p_
                           - v0 ** (a_ + 1) * ell(v0) ** p_) / (a_ + 1)
                    val += m * p_ * poly(a_ + 1, p_ - 1) / (a_ + 1)
                pmemo[(a_, p_)] = val
                return val

            acc.append(sign * math.exp(logc) * anti(a, p))
        return math.fsum(acc)
