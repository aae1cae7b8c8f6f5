"""Densities of partial sums of ordered unit exponentials.

For M i.i.d. unit-exponential projection powers, a_(1:M) >= ... >= a_(M:M)
are the order statistics and z_m = a_(1:M) + ... + a_(m:M) the top-m partial
sum.  These laws drive every harvested-energy statistic.
"""
from __future__ import annotations

import math

from .series import DEFAULT_WORKSPACE, SeriesWorkspace

__all__ = ["pdf_z1", "pdf_zm", "joint_pdf_next_and_sum"]


def _workspace(ws, total):
    ws = ws or DEFAULT_WORKSPACE
    ws.check_antennas(total)
    return ws


def pdf_z1(total: int, x: float, ws: SeriesWorkspace | None = None) -> float:
    """Density of the largest of `total` unit exponentials."""
    _workspace(ws, total)
    if x < 0:
        raise ValueError("density argument must be >= 0")
    e = math.exp(-x)
    return total * e * (1.0 - e) ** (total - 1)


def pdf_zm(total: int, m: int, x: float,
           ws: SeriesWorkspace | None = None) -> float:
    """Density of the top-m partial sum z_m of `total` unit exponentials.

    For m == total this is the unit-rate gamma (Erlang) density.  Otherwise
    the law is a gamma head plus exponential relaxation kernels (m/j)^(m-1)
    e^(-j x / m), each corrected by the truncated series that removes its
    polynomial part of degree below m-1.
    """
    ws = _workspace(ws, total)
    if not 1 <= m <= total:
        raise ValueError(f"m={m} must lie in [1, {total}]")
    if x < 0:
        raise ValueError("density argument must be >= 0")
    if m == total:
        if x == 0.0:
            return 1.0 if total == 1 else 0.0
        return math.exp((total - 1) * math.log(x) - x - ws.log_factorial(total - 1))

    pieces = [x ** (m - 1) / math.factorial(m - 1)]
    for j in range(1, total - m + 1):
        sign = -1.0 if (m + j - 1) % 2 else 1.0
        coef = math.comb(total - m, j) * (m / j) ** (m - 1)
        pieces.append(sign * coef * math.exp(-j * x / m))
        w = -j * x / m
        corr = 1.0
        for t in range(m - 1):
            if t:
                corr *= w / t
            pieces.append(-sign * coef * corr)
    head = math.exp(ws.log_factorial(total) - ws.log_factorial(total - m)
                    - ws.log_factorial(m) - x)
    return head * math.fsum(pieces)


def joint_pdf_next_and_sum(total: int, m: int, x: float, y: float,
                           ws: SeriesWorkspace | None = None) -> float:
    """Joint density of (a_(m+1:M), z_m) at (x, y); zero off the wedge y >= m x.

    Alternating sum over i of (y - m x)^(m-1) e^(-y - (i+1) x) with
    coefficients M! / ((M-m-1-i)! m! (m-1)! i!), accumulated compensated.
    """
    ws = _workspace(ws, total)
    if not 1 <= m <= total - 1:
        raise ValueError(f"m={m} must lie in [1, {total - 1}] "
                         "(the next order statistic must exist)")
    if x < 0:
        raise ValueError("density argument must be >= 0")
    if y < m * x:
        return 0.0
    gap = y - m * x
    if m > 1:
        if gap == 0.0:
            return 0.0
        log_kernel = (m - 1) * math.log(gap) - y
    else:
        log_kernel = -y
    pieces = []
    for i in range(total - m):
        sign = -1.0 if i % 2 else 1.0
        logc = (ws.log_factorial(total) - ws.log_factorial(total - m - 1 - i)
                - ws.log_factorial(m) - ws.log_factorial(m - 1)
                - ws.log_factorial(i))
        pieces.append(sign * math.exp(logc + log_kernel - (i + 1) * x))
    return math.fsum(pieces)
