"""Brute-force Diophantine approximation tools.

The quality of a gain tuple g = (g_1, ..., g_m) is measured by how small
|p + q_1 g_1 + ... + q_m g_m| can get over integer q with |q|_inf <= N.
Exhaustive search keeps every result exact and checkable; no lattice
reduction is used.  The Khintchine-Groshev profile normalizes those
minima by N^(m+eps) to expose the empirical constant c_hat that lower
bounds the linear form for almost every real tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, SizeCapError

SEARCH_CAP = 100_000_000


@dataclass(frozen=True)
class LinearFormResult:
    """Minimum |p + q . g| over nonzero |q|_inf <= N with optimal p.

    q is canonical: its first nonzero entry is positive, and among exact
    ties the lexicographically smallest q is reported.  p is the nearest
    integer to -q . g (ties to even).
    """

    value: float
    p: int
    q: tuple[int, ...]
    N: int


class Relation(NamedTuple):
    p: int
    q: tuple[int, ...]


@dataclass(frozen=True)
class KGProfile:
    """Normalized linear-form minima m(N) * N^(m+eps) over a ladder of N."""

    epsilon: float
    rows: tuple[tuple[int, float, float], ...]  # (N, m(N), m(N) * N^(m+eps))
    c_hat: float


def min_linear_form(g: Sequence[float], N: int) -> LinearFormResult:
    """Exhaustive minimum of |p + q . g| over canonical nonzero q, |q|_inf <= N."""
    g = [float(x) for x in g]
    m = len(g)
    if m < 1:
        raise ParameterError("empty gain tuple")
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    space = (2 * N + 1) ** m
    if space > SEARCH_CAP:
        raise SizeCapError(f"search space {space} exceeds cap {SEARCH_CAP}")

    best_val = math.inf
    best_q: tuple[int, ...] | None = None
    best_s = 0.0

    # Canonical region: q_j > 0 for the first nonzero coordinate j, the
    # coordinates before it zero and the rest free.
    for j in range(m):
        tail = g[j + 1 :]
        if tail:
            inner = _grid_values(tail, N)
            inner_digits = len(tail)
        else:
            inner = np.zeros(1)
            inner_digits = 0
        for qj in range(1, N + 1):
            s = qj * g[j] + inner
            vals = np.abs(s - np.rint(s))
            v = float(vals.min())
            if v > best_val:
                continue
            for idx in np.flatnonzero(vals == vals.min()):
                q = (0,) * j + (qj,) + _digits(int(idx), inner_digits, N)
                if v < best_val or q < best_q:
                    best_val = v
                    best_q = q
                    best_s = float(s[idx])

    assert best_q is not None
    p = int(np.rint(-best_s))
    return LinearFormResult(value=best_val, p=p, q=best_q, N=N)


def _grid_values(g: Sequence[float], N: int) -> np.ndarray:
    """q . g over the full grid q in [-N, N]^len(g), mixed-radix order."""
    m = len(g)
    base = 2 * N + 1
    size = base**m
    idx = np.arange(size)
    vals = np.zeros(size)
    for k in range(m):
        vals += g[k] * ((idx // base ** (m - 1 - k)) % base - N)
    return vals


def _digits(idx: int, m: int, N: int) -> tuple[int, ...]:
    base = 2 * N + 1
    out = []
    for k in range(m - 1, -1, -1):
        out.append((idx // base**k) % base - N)
    return tuple(out)


def kg_profile(g: Sequence[float], epsilon: float, N_list: Sequence[int]) -> KGProfile:
    """Profile m(N) and m(N) * N^(len(g)+eps) over an increasing N ladder."""
    N_list = list(N_list)
    if not N_list:
        raise ParameterError("empty N list")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ParameterError(f"N list must be strictly increasing, got {N_list}")
    exponent = len(g) + epsilon
    rows = []
    for N in N_list:
        m_val = min_linear_form(g, N).value
        rows.append((N, m_val, m_val * float(N) ** exponent))
    return KGProfile(
        epsilon=epsilon, rows=tuple(rows), c_hat=min(r[2] for r in rows)
    )


def find_integer_relation(g: Sequence[Fraction]) -> Relation:
    """Integer relation p + q . g = 0 for exact rational inputs.

    Clears the denominator of the first coordinate: for g_1 = a/b in
    lowest terms the relation is q = (b, 0, ..., 0), p = -a.  Nonempty
    rational input always has one.
    """
    if len(g) == 0:
        raise ParameterError("empty input: no relation to find")
    exact = []
    for i, x in enumerate(g):
        if not isinstance(x, (Fraction, int)):
            raise ParameterError(f"entry {i} is {type(x).__name__}, need exact rationals")
        exact.append(Fraction(x))
    first = exact[0]
    q = (first.denominator,) + (0,) * (len(exact) - 1)
    return Relation(p=-first.numerator, q=q)


def suspected_relation(g: Sequence[float], N: int, tau: float) -> Relation | None:
    """Heuristic near-relation: the best linear form if it beats tau, else None.

    A small value only suggests rational dependence at resolution tau; it
    proves nothing about the underlying reals.
    """
    if tau <= 0:
        raise ParameterError(f"tolerance must be positive, got {tau}")
    res = min_linear_form(g, N)
    if res.value < tau:
        return Relation(p=res.p, q=res.q)
    return None


def psi_series_partial_sum(K: int, epsilon: float, q_max: int) -> float:
    """Partial sum sum_{q=1}^{q_max} q^(K-2) * q^-(K-1+eps) = sum q^-(1+eps).

    Finite for every eps > 0, which is what makes the cutoff function
    psi(q) = q^-(K-1+eps) admissible for the measure-zero direction of
    the Khintchine-Groshev theorem.
    """
    if K < 2:
        raise ParameterError(f"K must be >= 2, got {K}")
    if epsilon <= 0:
        raise ParameterError(f"series diverges for epsilon <= 0, got {epsilon}")
    if q_max < 1:
        raise ParameterError(f"q_max must be >= 1, got {q_max}")
    q = np.arange(1, q_max + 1, dtype=float)
    return float(np.sum(q ** -(1.0 + epsilon)))
