"""Closed-form sets of exact solutions for one real measurement.

With ``u = p - eps_hat * q`` the volume fractions reproducing the measurement
are the points of the domain on the hyperplane ``u . phi = 0``.  That set is
the convex hull of the crossings of the hyperplane with the domain's edges.
Two domains are handled: the simplex and the dominant-component ordered
simplex (``phi_0 >= phi_i``).

Generators are returned as-is, without hull reduction, so duplicates are
possible when an entry of ``u`` vanishes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import FrozenSet, List, Tuple

import numpy as np

from .errors import EmptyMinimizerSet
from .forward import PQVectors

ZERO_RTOL = 1e-9

SIMPLEX = "simplex"
ORDERED_SIMPLEX = "ordered_simplex"


@dataclass(frozen=True)
class UVector:
    u: np.ndarray
    eps_hat: complex

    @property
    def n(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class SignPartition:
    positive: Tuple[int, ...]
    negative: Tuple[int, ...]
    zero: Tuple[int, ...]


@dataclass(frozen=True)
class OrderedVertex:
    S: FrozenSet[int]
    phi: np.ndarray


@dataclass
class MinimizerSet:
    generators: List[np.ndarray]
    domain: str

    def as_array(self) -> np.ndarray:
        return np.array(self.generators)


def build_u(pq: PQVectors, eps_hat: complex) -> UVector:
    u = pq.p - eps_hat * pq.q
    if np.iscomplexobj(u) and not np.any(u.imag):
        u = u.real
    return UVector(u=u, eps_hat=eps_hat)


def _real(u) -> np.ndarray:
    if isinstance(u, UVector):
        u = u.u
    return np.real(np.asarray(u))


def sign_partition(u, rtol: float = ZERO_RTOL) -> SignPartition:
    u = _real(u)
    tol = rtol * np.max(np.abs(u), initial=0.0)
    idx = range(len(u))
    return SignPartition(
        positive=tuple(i for i in idx if u[i] > tol),
        negative=tuple(i for i in idx if u[i] < -tol),
        zero=tuple(i for i in idx if abs(u[i]) <= tol),
    )


def simplex_minimizers(u) -> MinimizerSet:
    """Generators of the exact-solution set on the simplex.

    One crossing per (positive, negative) pair of entries of ``u`` plus the
    vertex ``e_i`` for every vanishing entry.
    """
    u = _real(u)
    n = len(u)
    part = sign_partition(u)
    if not part.zero and (not part.positive or not part.negative):
        raise EmptyMinimizerSet(
            "all entries of u share one sign: the measurement lies outside the model range"
        )
    gens = []
    for i in part.positive:
        for j in part.negative:
            g = np.zeros(n)
            g[i] = u[j] / (u[j] - u[i])
            g[j] = -u[i] / (u[j] - u[i])
            gens.append(g)
    for i in part.zero:
        gens.append(np.eye(n)[i])
    return MinimizerSet(gens, SIMPLEX)


def _vertex(n, S) -> np.ndarray:
    phi = np.zeros(n)
    members = [0, *sorted(S)]
    phi[members] = 1.0 / len(members)
    return phi


def ordered_vertices(n: int) -> List[OrderedVertex]:
    """All ``2**(n-1)`` vertices of the ordered simplex, by subset size then lexically."""
    if n < 2:
        raise ValueError("n must be >= 2")
    out = []
    for size in range(n):
        for S in itertools.combinations(range(1, n), size):
            out.append(OrderedVertex(frozenset(S), _vertex(n, S)))
    return out


def ordered_edges(n: int) -> List[Tuple[FrozenSet[int], int]]:
    """Edges ``phi^S -- phi^(S + {k})`` as ``(S, k)`` pairs, ``(n-1) 2**(n-2)`` of them."""
    edges = []
    for v in ordered_vertices(n):
        for k in range(1, n):
            if k not in v.S:
                edges.append((v.S, k))
    return edges


def vertex_value(u, S) -> float:
    """``u . phi^S``, the mean of ``u_0`` and the ``u_i`` with ``i`` in ``S``."""
    u = _real(u)
    members = [0, *sorted(S)]
    return float(np.sum(u[members]) / len(members))


def ordered_simplex_minimizers(u) -> MinimizerSet:
    """Generators of the exact-solution set on the ordered simplex.

    Every edge whose endpoint values of ``u . phi`` have strictly opposite
    signs contributes its crossing; vertices where ``u . phi`` vanishes are
    included as well.
    """
    u = _real(u)
    n = len(u)
    tol = ZERO_RTOL * np.max(np.abs(u), initial=0.0)
    values = {v.S: vertex_value(u, v.S) for v in ordered_vertices(n)}
    gens = []
    for S, k in ordered_edges(n):
        Sk = S | {k}
        uS, uSk = values[S], values[Sk]
        if abs(uS) <= tol or abs(uSk) <= tol or uS * uSk >= 0:
            continue
        t = uSk / (uSk - uS)
        gens.append(t * _vertex(n, S) + (1.0 - t) * _vertex(n, Sk))
    for S, val in values.items():
        if abs(val) <= tol:
            gens.append(_vertex(n, S))
    if not gens:
        raise EmptyMinimizerSet("u . phi keeps one sign over the ordered simplex")
    return MinimizerSet(gens, ORDERED_SIMPLEX)
