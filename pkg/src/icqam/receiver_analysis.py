"""Per-receiver effective constellations and distance analysis.

Fixing a receiver's side-information values leaves a coset of codewords
still possible; its image under the symbol mapping is the effective
constellation that receiver actually decides between. Each surviving
point is labeled with the wanted-message value(s) that produce it, and
the distance that matters is the minimum between points carrying
different labels (equal-label pairs cause no message error).
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import IO, TYPE_CHECKING, Sequence

from .constellation import PartitionedConstellation, SignalPoint
from .errors import DecodabilityError, ValidationError
from .index_coding import IndexCode, eta

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .mapper import CodewordMapping

# Effective sets are built by enumerating message vectors.
ANALYSIS_N_LIMIT = 20


def gather_bits(word: int, positions: Sequence[int]) -> int:
    """Pack word's bits at the given positions (ascending) into a small int."""
    out = 0
    for t, pos in enumerate(positions):
        out |= ((word >> pos) & 1) << t
    return out


@dataclass(frozen=True)
class EffectiveConstellation:
    """Surviving points and wanted-value labels for one (receiver, realization)."""

    receiver: int
    realization: int
    points: tuple[SignalPoint, ...]
    wanted_labels: tuple[int, ...]
    dmin_sq: float  # inf when no differing-label pair exists
    spectrum: tuple[tuple[float, int], ...]  # (squared distance, pair count)


def _spectrum_and_dmin(
    points: Sequence[SignalPoint], labels: Sequence[int]
) -> tuple[float, tuple[tuple[float, int], ...]]:
    hist: Counter[float] = Counter()
    dmin_sq = math.inf
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if labels[a] == labels[b]:
                continue
            di = points[a].I - points[b].I
            dq = points[a].Q - points[b].Q
            d2 = di * di + dq * dq
            hist[round(d2, 9)] += 1
            dmin_sq = min(dmin_sq, d2)
    return dmin_sq, tuple(sorted(hist.items()))


def effective_constellation(
    mapping: "CodewordMapping", code: IndexCode, i: int, realization: int
) -> EffectiveConstellation:
    """Image of the codewords consistent with one side-information realization.

    ``realization`` packs the side-information values over sorted(K_i),
    bit t giving the value of the t-th smallest known message.
    """
    problem = code.problem
    if not 0 <= i < problem.m:
        raise ValidationError(f"receiver index {i} out of range (m={problem.m})")
    if problem.n > ANALYSIS_N_LIMIT:
        raise ValidationError(
            f"effective-set enumeration guard: n={problem.n} > {ANALYSIS_N_LIMIT}"
        )
    receiver = problem.receivers[i]
    knows = receiver.knows
    if not 0 <= realization < (1 << len(knows)):
        raise ValidationError(
            f"realization {realization} does not fit {len(knows)} known bits"
        )
    unknown = [j for j in range(problem.n) if j not in set(knows)]
    rows = code.matrix.row_words

    base_x = 0
    for t, k in enumerate(knows):
        base_x |= ((realization >> t) & 1) << k

    label_of_point: dict[int, int] = {}
    for combo in range(1 << len(unknown)):
        x = base_x
        for t, j in enumerate(unknown):
            x |= ((combo >> t) & 1) << j
        y = 0
        rest = x
        while rest:
            low = rest & -rest
            y ^= rows[low.bit_length() - 1]
            rest ^= low
        point = mapping.assignment[y]
        label = gather_bits(x, receiver.wants)
        previous = label_of_point.setdefault(point, label)
        if previous != label:
            raise DecodabilityError(
                f"receiver {i + 1}: wanted value is ambiguous at point {point} "
                f"under realization {realization}; code is not decodable"
            )
    point_ids = sorted(label_of_point)
    points = tuple(mapping.constellation.points[p] for p in point_ids)
    labels = tuple(label_of_point[p] for p in point_ids)
    dmin_sq, spectrum = _spectrum_and_dmin(points, labels)
    return EffectiveConstellation(i, realization, points, labels, dmin_sq, spectrum)


def effective_constellations(
    mapping: "CodewordMapping", code: IndexCode, i: int
) -> tuple[EffectiveConstellation, ...]:
    """Effective sets for every side-information realization, ascending."""
    count = 1 << len(code.problem.receivers[i].knows)
    return tuple(
        effective_constellation(mapping, code, i, a) for a in range(count)
    )


def receiver_dmin_sq(mapping: "CodewordMapping", code: IndexCode, i: int) -> float:
    """Worst-case (minimum over realizations) effective squared distance."""
    return min(e.dmin_sq for e in effective_constellations(mapping, code, i))


def receiver_dmin(mapping: "CodewordMapping", code: IndexCode, i: int) -> float:
    return math.sqrt(receiver_dmin_sq(mapping, code, i))


def ml_decode(effective: EffectiveConstellation, sample) -> int:
    """Wanted-value label of the Euclidean-nearest effective point.

    Ties go to the lowest point index (points are stored in index order).
    """
    if not effective.points:
        raise ValidationError("effective constellation is empty")
    si, sq = (sample.real, sample.imag) if isinstance(sample, complex) else sample
    best = math.inf
    best_label = effective.wanted_labels[0]
    for point, label in zip(effective.points, effective.wanted_labels):
        d2 = (point.I - si) ** 2 + (point.Q - sq) ** 2
        if d2 < best:
            best = d2
            best_label = label
    return best_label


def bracket_sq(
    constellation: PartitionedConstellation, code_length: int, eta_i: int, threshold: int
) -> tuple[float | None, float | None]:
    """Guaranteed squared-distance bracket [lo, hi] for a receiver.

    Receivers with 1 <= eta < threshold are steered into level
    (l - eta) subsets, giving Delta_{l-eta} at best and Delta_{l-eta-1}
    at worst. Others only ever see the base distance (lo = Delta_0,
    hi unbounded -> None). eta = 0 receivers have no distance to bound.
    """
    if eta_i == 0:
        return None, None
    if eta_i < threshold:
        return (
            constellation.delta_sq[code_length - eta_i - 1],
            constellation.delta_sq[code_length - eta_i],
        )
    return constellation.delta_sq[0], None


def write_distance_report(
    mapping: "CodewordMapping", code: IndexCode, stream: IO[str]
) -> None:
    """CSV report: receiver,eta,dmin_sq,bracket_lo_sq,bracket_hi_sq,spectrum_histogram.

    The histogram aggregates differing-label pair distances over all
    side-information realizations ("d2:count" entries, ascending).
    """
    constellation = mapping.constellation
    if not isinstance(constellation, PartitionedConstellation):
        raise ValidationError("distance report needs a partitioned constellation")
    writer = csv.writer(stream)
    writer.writerow(
        ["receiver", "eta", "dmin_sq", "bracket_lo_sq", "bracket_hi_sq", "spectrum_histogram"]
    )
    for i in range(code.problem.m):
        effectives = effective_constellations(mapping, code, i)
        dmin_sq = min(e.dmin_sq for e in effectives)
        hist: Counter[float] = Counter()
        for e in effectives:
            for value, count in e.spectrum:
                hist[value] += count
        lo, hi = bracket_sq(constellation, code.length, eta(code, i), mapping.threshold)
        writer.writerow(
            [
                i + 1,
                eta(code, i),
                "inf" if math.isinf(dmin_sq) else f"{dmin_sq:.6g}",
                "" if lo is None else f"{lo:.6g}",
                "" if hi is None else f"{hi:.6g}",
                ";".join(f"{v:.6g}:{c}" for v, c in sorted(hist.items())),
            ]
        )
