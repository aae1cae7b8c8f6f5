"""Middle-band probabilities for the harvested-energy law.

With z_m the sum of the m largest of M i.i.d. unit exponentials and a_(m+1)
the (m+1)-th largest, the event "exactly m beams active and per-beam level at
least v" is, for v in the band [mu, (1+1/m)*mu],

    B_m(v) = P[ z_m >= m*v  and  z_m + a_(m+1) < (m+1)*mu ].

Its value at v = mu is the PMF mass of the active-beam count m (1 <= m < M),
and -dB_m/dv is the density contribution of the m-active event to the
harvested energy (in threshold units).

Two mathematically identical representations are provided:

* band_probability / band_density integrate the joint law of (a_(m+1), z_m)
  in shifted coordinates, which leaves incomplete-gamma differences with O(1)
  coefficients: absolute error stays near machine epsilon over the whole
  supported antenna range.

* band_terms expands the same integral into the polynomial-exponential
  family of PolyExpTerms.  This form admits exact band integrals (used by the
  mean) and serves as an independent cross-check of the first representation,
  at the price of larger alternating coefficients.
"""
from __future__ import annotations

import math
from functools import lru_cache

from .series import DEFAULT_WORKSPACE, PolyExpTerms, SeriesWorkspace

__all__ = [
    "band_upper",
    "band_probability",
    "band_density",
    "band_terms",
    "band_mass",
    "band_integral",
]


def band_upper(m: int, mu: float) -> float:
    """Right edge of band m: per-beam level where the m-active event empties."""
    return (1 + 1 / m) * mu


def _check(ws: SeriesWorkspace | None, total: int, m: int, mu: float):
    ws = ws or DEFAULT_WORKSPACE
    ws.check_antennas(total)
    if not 1 <= m <= total - 1:
        raise ValueError(f"band index m={m} must lie in [1, {total - 1}]")
    if not (math.isfinite(mu) and mu > 0):
        raise ValueError("bands are defined for mu > 0")
    return ws


def _exp_poly_integrals(c: float, a: float, b: float, ell: float, tmax: int):
    """R_t = int_0^ell exp(c x) (a - b x)^t dx for t = 0..tmax, with c <= 0
    and a - b*ell >= 0 on the band, by upward recursion in t."""
    tail = a - b * ell
    ecl = math.exp(c * ell)
    out = []
    if c == 0.0:
        for t in range(tmax + 1):
            out.append((a ** (t + 1) - tail ** (t + 1)) / (b * (t + 1)))
        return out
    r = (ecl - 1.0) / c
    out.append(r)
    for t in range(1, tmax + 1):
        r = (ecl * tail ** t - a ** t) / c + t * b * r / c
        out.append(r)
    return out


def band_probability(total: int, m: int, mu: float, v: float,
                     ws: SeriesWorkspace | None = None) -> float:
    """P[z_m >= m*v and z_m + a_(m+1) < (m+1)*mu] for v in the band.

    Integrating the joint law of x = a_(m+1), u = z_m - m*x over
    {u >= m(v-x), u < (m+1)(mu-x)} gives, term by term in the binomial
    expansion of (1 - e^-x)^(M-m-1), differences of incomplete-gamma tails
    that reduce to the R_t primitives of _exp_poly_integrals.  The common
    leading parts of the two gamma tails cancel algebraically, not
    numerically, so every floating-point piece is O(1).
    """
    ws = _check(ws, total, m, mu)
    ell = (m + 1) * mu - m * v
    if ell <= 0:
        return 0.0
    if v < mu:
        raise ValueError("band probability evaluated left of the band")
    # prefactor M! / ((M-m-1)! m!) == C * (m-1)! with C the joint-law constant
    pref = math.exp(ws.log_factorial(total) - ws.log_factorial(total - m - 1)
                    - ws.log_factorial(m))
    a_hi = (m + 1) * mu   # rail from the upper constraint
    a_lo = m * v          # rail from the lower constraint
    e_hi, e_lo = math.exp(-a_hi), math.exp(-a_lo)
    pieces = []
    for k in range(total - m):
        w = math.comb(total - m - 1, k) * (-1 if k % 2 else 1)
        r_lo = _exp_poly_integrals(-(k + 1.0), a_lo, m, ell, m - 1)
        r_hi = _exp_poly_integrals(float(-k), a_hi, m + 1, ell, m - 1)
        inv_fact = 1.0
        for t in range(m):
            if t:
                inv_fact /= t
            pieces.append(w * inv_fact * (e_lo * r_lo[t] - e_hi * r_hi[t]))
    return pref * math.fsum(pieces)


def band_density(total: int, m: int, mu: float, v: float,
                 ws: SeriesWorkspace | None = None) -> float:
    """-d/dv band_probability: all contributions are non-negative.

    Equals m * integral over x in [0, ell] of the joint law of
    (a_(m+1), z_m) at z_m = m*v, so no alternating cancellation survives
    beyond the mild binomial weights in k.
    """
    ws = _check(ws, total, m, mu)
    ell = (m + 1) * mu - m * v
    if ell <= 0:
        return 0.0
    if v < mu:
        raise ValueError("band density evaluated left of the band")
    logpref = (ws.log_factorial(total) - ws.log_factorial(total - m - 1)
               - ws.log_factorial(m) - ws.log_factorial(m - 1)
               + m * math.log(m) - m * v)
    pieces = []
    for k in range(total - m):
        w = math.comb(total - m - 1, k) * (-1 if k % 2 else 1)
        r = _exp_poly_integrals(-(k + 1.0), v, 1.0, ell, m - 1)[m - 1]
        pieces.append(w * r)
    s = math.fsum(pieces)
    if s <= 0.0:  # roundoff at the band edge where the true value -> 0
        return 0.0
    return math.exp(logpref + math.log(s))


def band_mass(total: int, m: int, mu: float,
              ws: SeriesWorkspace | None = None) -> float:
    """PMF mass of the m-active event (1 <= m < M): the band value at v = mu."""
    return band_probability(total, m, mu, mu, ws)


@lru_cache(maxsize=512)
def _band_terms_cached(total: int, m: int, mu: float, cap: int) -> PolyExpTerms:
    ws = SeriesWorkspace(cap) if cap != DEFAULT_WORKSPACE.max_antennas_supported \
        else DEFAULT_WORKSPACE
    lf = ws.log_factorial
    lb = ws.log_binomial
    log_mu1 = math.log((m + 1) * mu)
    terms = []

    def add(sign, logc, a, p, q):
        terms.append((sign, logc, a, p, q))

    for i in range(total - m):
        sign_i = -1 if i % 2 else 1
        log_ci = lf(total) - lf(total - m - 1 - i) - lf(m) - lf(m - 1) - lf(i)
        for j in range(m):
            sign_j = -1 if (m - 1 - j) % 2 else 1
            log_bj = lb(m - 1, j) + (m - 1 - j) * math.log(m)
            for t in range(j + 1):
                base_sign = sign_i * sign_j
                base_log = log_ci + log_bj + lf(j) - lf(j - t)
                a = j - t
                l1 = base_log + a * math.log(m)
                # inner integral against the lower rail, antiderivative part
                add(base_sign, l1 + lf(m - 1 - j) - (m - j) * math.log(i + 1),
                    a, 0, 0)
                # ... and its boundary series at x = ell
                for r in range(m - j):
                    add(-base_sign,
                        l1 + lf(m - 1 - j) - lf(m - 1 - j - r)
                        - (r + 1) * math.log(i + 1),
                        a, m - 1 - j - r, i + 1)
                # upper-rail block, with exp(-(m+1)mu) folded into (q=1) terms
                for s in range(j - t + 1):
                    sign_s = -base_sign * (-1 if s % 2 else 1)
                    log_s = base_log + lb(j - t, s) + (j - t - s) * log_mu1
                    if i >= 1:
                        add(sign_s,
                            log_s + lf(m - 1 - j + s) - (m - j + s) * math.log(i),
                            0, 0, 1)
                        for r in range(m - j + s):
                            add(-sign_s,
                                log_s + lf(m - 1 - j + s) - lf(m - 1 - j + s - r)
                                - (r + 1) * math.log(i),
                                0, m - 1 - j + s - r, i + 1)
                    else:
                        add(sign_s, log_s - math.log(m - j + s),
                            0, m - j + s, 1)
    return PolyExpTerms(m=m, mu=mu, terms=tuple(terms))


def band_terms(total: int, m: int, mu: float,
               ws: SeriesWorkspace | None = None) -> PolyExpTerms:
    """Expanded polynomial-exponential form of band_probability.

    Same function of v; larger internal coefficients (the alternating series
    loses roughly M-dependent digits near small mu) but closed under exact
    integration, which band_integral exploits.
    """
    ws = _check(ws, total, m, mu)
    return _band_terms_cached(total, m, mu, ws.max_antennas_supported)


def band_integral(total: int, m: int, mu: float,
                  ws: SeriesWorkspace | None = None) -> float:
    """Exact integral of band_probability over its whole band."""
    return band_terms(total, m, mu, ws).integral()
