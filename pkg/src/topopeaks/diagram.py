"""Persistence diagrams and the bottleneck distance between them."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain

import numpy as np


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """A multiset of (birth, death) points with birth >= death.

    Equality compares points as a multiset: the order they were collected in
    carries no meaning.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = []
        for p in self.points:
            b, d = float(p[0]), float(p[1])
            if not (np.isfinite(b) and np.isfinite(d)):
                raise ValueError("diagram points must be finite")
            if b < d:
                raise ValueError(f"birth {b} below death {d}")
            pts.append((b, d))
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return sorted(self.points) == sorted(other.points)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.points)))


def write_diagram_csv(diagram: PersistenceDiagram, path) -> None:
    """Write one ``birth,death`` row per diagram point."""
    with open(path, "w", newline="") as fh:
        for b, d in diagram.points:
            fh.write(f"{b!r},{d!r}\n")


def _feasible(t: float, cost: np.ndarray, diag1: np.ndarray, diag2: np.ndarray) -> bool:
    """Perfect matching test at threshold t.

    Left side: points of the first diagram plus one diagonal slot per point of
    the second; right side is the mirror image. A point may match a point of
    the other diagram at infinity-norm cost <= t, or the diagonal when its own
    gap to the diagonal is <= t; diagonal slots match each other freely.
    """
    n1, n2 = cost.shape
    adj = cost <= t
    d1ok = diag1 <= t
    d2ok = diag2 <= t
    free_b = range(n2, n2 + n1)
    d2_real = np.flatnonzero(d2ok)

    match_b = [-1] * (n1 + n2)

    def neighbors(u: int):
        if u < n1:
            real = np.flatnonzero(adj[u])
            return chain(real, free_b) if d1ok[u] else iter(real)
        return chain(d2_real, free_b)

    def augment(u: int, seen: list[bool]) -> bool:
        for v in neighbors(u):
            if seen[v]:
                continue
            seen[v] = True
            if match_b[v] == -1 or augment(match_b[v], seen):
                match_b[v] = u
                return True
        return False

    for u in range(n1 + n2):
        if not augment(u, [False] * (n1 + n2)):
            return False
    return True


def bottleneck_distance(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Exact bottleneck distance between two diagrams.

    The optimum is one of finitely many values: a pairwise infinity-norm cost
    or a point's half-gap to the diagonal. The candidates are enumerated and
    the smallest feasible one is found by bisection over the sorted list, so
    no floating tolerance enters the result.
    """
    p1 = np.array(d1.points, dtype=np.float64).reshape(-1, 2)
    p2 = np.array(d2.points, dtype=np.float64).reshape(-1, 2)
    if p1.shape[0] == 0 and p2.shape[0] == 0:
        return 0.0
    diag1 = (p1[:, 0] - p1[:, 1]) / 2.0
    diag2 = (p2[:, 0] - p2[:, 1]) / 2.0
    cost = np.maximum(
        np.abs(p1[:, 0][:, None] - p2[:, 0][None, :]),
        np.abs(p1[:, 1][:, None] - p2[:, 1][None, :]),
    )
    cands = {0.0}
    cands.update(map(float, diag1))
    cands.update(map(float, diag2))
    cands.update(map(float, cost.ravel()))
    ordered = sorted(cands)
    if _feasible(ordered[0], cost, diag1, diag2):
        return ordered[0]
    lo, hi = 0, len(ordered) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _feasible(ordered[mid], cost, diag1, diag2):
            hi = mid
        else:
            lo = mid
    return ordered[hi]
