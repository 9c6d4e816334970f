"""Energy-normalized QAM/PSK signal sets and set-partition trees.

A 2^bits QAM set is normalized to mean symbol energy = bits (matching the
total energy of `bits` unit-energy binary transmissions) and recursively
split into subsets whose minimum squared distance doubles at every level:
level k holds 2^k subsets of 2^(bits-k) points each, with within-subset
minimum distances Delta_0 < Delta_1 < ... < Delta_(bits-1).

Even bits use the square grid directly; odd bits build the 2^(bits+1)
square grid at the same mean energy, split it once, and keep one coset
(the one containing the most-negative corner, for deterministic output).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

QAM_BITS_MIN = 2
QAM_BITS_MAX = 12
_REL_TOL = 1e-9


@dataclass(frozen=True)
class SignalPoint:
    """One constellation point; ``index`` is its fixed label."""

    index: int
    I: float
    Q: float

    @property
    def as_complex(self) -> complex:
        return complex(self.I, self.Q)

    def energy(self) -> float:
        return self.I * self.I + self.Q * self.Q


@dataclass(frozen=True)
class Constellation:
    """A plain signal set (no partition tree)."""

    bits: int
    points: tuple[SignalPoint, ...]

    @property
    def size(self) -> int:
        return len(self.points)

    def point_array(self) -> np.ndarray:
        return np.array([p.as_complex for p in self.points], dtype=np.complex128)

    def mean_energy(self) -> float:
        return float(np.mean([p.energy() for p in self.points]))

    def min_distance_sq(self) -> float:
        return _min_distance_sq(self.point_array())


@dataclass(frozen=True)
class PartitionedConstellation(Constellation):
    """Signal set plus its set-partition tree.

    ``levels[k]`` lists the level-k subsets as tuples of point indices;
    subset s at level k splits into subsets 2s and 2s+1 at level k+1.
    ``delta_sq[k]`` is the minimum squared distance inside level-k subsets.
    """

    levels: tuple[tuple[tuple[int, ...], ...], ...] = ()
    delta_sq: tuple[float, ...] = ()

    @property
    def delta(self) -> tuple[float, ...]:
        return tuple(math.sqrt(d) for d in self.delta_sq)

    def subset_of_point(self, level: int, point_index: int) -> int:
        for s, subset in enumerate(self.levels[level]):
            if point_index in subset:
                return s
        raise ValueError(f"point {point_index} not found at level {level}")


def _min_distance_sq(coords: np.ndarray) -> float:
    if len(coords) < 2:
        return math.inf
    best = math.inf
    chunk = 512
    for start in range(0, len(coords), chunk):
        block = coords[start : start + chunk]
        d2 = np.abs(block[:, None] - coords[None, :]) ** 2
        rows = np.arange(start, start + len(block))
        d2[np.arange(len(block)), rows] = np.inf
        best = min(best, float(d2.min()))
    return best


def _bipartition(coords: np.ndarray, indices: Sequence[int]) -> tuple[list[int], list[int]]:
    """Two-color the minimum-distance graph of coords[indices].

    Returns the color classes as lists of entries of ``indices`` (the class
    containing the lowest index first). Raises ValueError when the graph is
    disconnected (ambiguous coloring), not bipartite, or unbalanced — all
    signs the input is not a square-lattice section.
    """
    pts = coords[list(indices)]
    m = len(pts)
    if m < 2:
        raise ValueError("cannot split fewer than 2 points")
    dmin_sq = _min_distance_sq(pts)
    edge_cut = dmin_sq * (1 + _REL_TOL)
    neighbors: list[list[int]] = [[] for _ in range(m)]
    chunk = 512
    for start in range(0, m, chunk):
        block = pts[start : start + chunk]
        d2 = np.abs(block[:, None] - pts[None, :]) ** 2
        for a, b in zip(*np.nonzero(d2 <= edge_cut)):
            ga = start + int(a)
            if ga != int(b):
                neighbors[ga].append(int(b))
    color = [-1] * m
    color[0] = 0
    queue = [0]
    seen = 1
    while queue:
        u = queue.pop()
        for v in neighbors[u]:
            if color[v] == -1:
                color[v] = color[u] ^ 1
                queue.append(v)
                seen += 1
            elif color[v] == color[u]:
                raise ValueError("minimum-distance graph is not bipartite")
    if seen != m:
        raise ValueError("minimum-distance graph is disconnected; coloring ambiguous")
    side_a = [indices[t] for t in range(m) if color[t] == 0]
    side_b = [indices[t] for t in range(m) if color[t] == 1]
    if len(side_a) != len(side_b):
        raise ValueError("split is unbalanced; input is not a lattice coset")
    return side_a, side_b


def ungerboeck_split(points: Sequence[SignalPoint]):
    """Split a point set into the two color classes of its min-distance graph.

    The subset containing the lowest-indexed point comes first. Each half of
    a square-lattice section has twice the parent's squared minimum distance.
    """
    ordered = sorted(points, key=lambda p: p.index)
    coords = np.array([p.as_complex for p in ordered], dtype=np.complex128)
    side_a, side_b = _bipartition(coords, list(range(len(ordered))))
    return tuple(ordered[t] for t in side_a), tuple(ordered[t] for t in side_b)


def _square_grid(side: int, spacing_half: float) -> list[complex]:
    """Row-major grid of side x side points at odd multiples of spacing_half."""
    axis = [(2 * k - side + 1) * spacing_half for k in range(side)]
    return [complex(i_val, q_val) for q_val in axis for i_val in axis]


def build_qam(bits: int) -> PartitionedConstellation:
    """Construct the partitioned 2^bits QAM set with mean symbol energy = bits."""
    if not QAM_BITS_MIN <= bits <= QAM_BITS_MAX:
        raise ValueError(
            f"bits must be in {QAM_BITS_MIN}..{QAM_BITS_MAX}, got {bits}"
        )
    grid_bits = bits if bits % 2 == 0 else bits + 1
    order = 1 << grid_bits
    side = 1 << (grid_bits // 2)
    half = math.sqrt(1.5 * bits / (order - 1))
    grid = _square_grid(side, half)
    coords = np.array(grid, dtype=np.complex128)

    if bits % 2 == 1:
        # One split of the larger grid; keep the coset of the most-negative
        # corner (grid index 0). Both cosets are congruent by symmetry.
        keep, _ = _bipartition(coords, list(range(order)))
        coords = coords[keep]

    points = tuple(
        SignalPoint(idx, float(c.real), float(c.imag)) for idx, c in enumerate(coords)
    )
    mean_energy = float(np.mean(np.abs(coords) ** 2))
    if abs(mean_energy - bits) > _REL_TOL * bits:
        raise AssertionError(f"energy normalization drifted: {mean_energy} != {bits}")

    levels: list[tuple[tuple[int, ...], ...]] = [(tuple(range(len(points))),)]
    for _ in range(1, bits):
        next_level: list[tuple[int, ...]] = []
        for subset in levels[-1]:
            side_a, side_b = _bipartition(coords, list(subset))
            next_level.append(tuple(side_a))
            next_level.append(tuple(side_b))
        levels.append(tuple(next_level))
    delta_sq = tuple(
        min(_min_distance_sq(coords[list(subset)]) for subset in level)
        for level in levels
    )
    return PartitionedConstellation(
        bits=bits,
        points=points,
        levels=tuple(levels),
        delta_sq=delta_sq,
    )


def dmin_formula(bits: int) -> float:
    """Closed-form minimum distance of the normalized 2^bits QAM set."""
    if bits < 2:
        raise ValueError(f"bits must be >= 2, got {bits}")
    if bits % 2 == 0:
        return 2.0 * math.sqrt(1.5 * bits / ((1 << bits) - 1))
    return 2.0 * math.sqrt(2.0) * math.sqrt(1.5 * bits / ((1 << (bits + 1)) - 1))


def build_psk(bits: int) -> Constellation:
    """2^bits points equally spaced on the circle of squared radius = bits."""
    if bits < 2:
        raise ValueError(f"bits must be >= 2, got {bits}")
    order = 1 << bits
    radius = math.sqrt(bits)
    points = tuple(
        SignalPoint(
            k,
            radius * math.cos(2.0 * math.pi * k / order),
            radius * math.sin(2.0 * math.pi * k / order),
        )
        for k in range(order)
    )
    return Constellation(bits=bits, points=points)


def psk_min_distance_sq(bits: int) -> float:
    """Closed form 4 * bits * sin^2(pi / 2^bits)."""
    return 4.0 * bits * math.sin(math.pi / (1 << bits)) ** 2


def level_path(constellation: PartitionedConstellation, point_index: int) -> str:
    """Subset-choice bits for a point down the tree (levels 1..bits-1)."""
    path = []
    for level in range(1, len(constellation.levels)):
        path.append(str(constellation.subset_of_point(level, point_index) & 1))
    return "".join(path)


def dump_csv(constellation: PartitionedConstellation, stream: IO[str]) -> None:
    """Write `index,I,Q,level-path` rows for the whole point set."""
    writer = csv.writer(stream)
    writer.writerow(["index", "I", "Q", "level-path"])
    for p in constellation.points:
        writer.writerow(
            [p.index, f"{p.I:.6g}", f"{p.Q:.6g}", level_path(constellation, p.index)]
        )
