"""Greedy codeword-to-symbol labeling driven by side information.

Receivers are served in non-decreasing order of their unresolved
dimension count eta: fixing a receiver's side information confines the
transmitted codeword to a coset of 2^(rank of the unknown rows) values,
and the labeling tries to keep each such coset inside a single
partition-tree subset at level (l - eta), whose internal distance is
Delta_{l-eta}. Receivers at or above the priority threshold get no
placement guarantee beyond the base constellation distance.

Placement of one codeword from the working coset prefers the level
subset already holding most of that coset; when every such subset is
full it spills into the nearest non-full ancestor subset, keeping the
achieved distance at or above the next partition level down. Ties
resolve to the lowest numeric candidate, keeping the core fully
deterministic.

The optional seed explores alternative valid labelings by applying a
seeded codeword translation y -> y xor t to the finished table. Cosets
map to cosets and wanted labels flip by a constant under translation,
so every receiver's effective geometry (and hence performance) is
provably unchanged; free-form randomness inside the greedy can instead
break the distance floor of low-priority receivers.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass
from typing import IO, Sequence

from .constellation import Constellation, PartitionedConstellation, SignalPoint
from .errors import ValidationError
from .index_coding import IndexCode, eta, minrank, problem_hash
from .receiver_analysis import bracket_sq, receiver_dmin_sq

_REL_TOL = 1e-9


@dataclass(frozen=True)
class CodewordMapping:
    """Bijection from l-bit codewords to constellation point indices."""

    length: int
    assignment: tuple[int, ...]  # assignment[codeword] = point index
    threshold: int
    receiver_order: tuple[int, ...]
    seed: int | None
    constellation: Constellation

    def __post_init__(self) -> None:
        size = 1 << self.length
        if len(self.assignment) != size or sorted(self.assignment) != list(range(size)):
            raise ValidationError("assignment is not a codeword/point bijection")
        if self.constellation.size != size:
            raise ValidationError(
                f"constellation has {self.constellation.size} points, "
                f"codewords need {size}"
            )

    def point_of(self, codeword: int) -> int:
        return self.assignment[codeword]

    def point(self, codeword: int) -> SignalPoint:
        return self.constellation.points[self.assignment[codeword]]


@dataclass(frozen=True)
class RealizationPool:
    """Remaining side-information realizations for one receiver."""

    receiver: int
    remaining: tuple[int, ...]


def initial_pool(code: IndexCode, i: int) -> RealizationPool:
    """Starting pool: every assignment to the receiver's known coordinates."""
    count = 1 << len(code.problem.receivers[i].knows)
    return RealizationPool(i, tuple(range(count)))


def unknown_row_span(code: IndexCode, i: int) -> tuple[int, ...]:
    """All XOR combinations of the rows outside K_i (codewords as ints)."""
    receiver = code.problem.receivers[i]
    knows = set(receiver.knows)
    span = {0}
    for row_idx in range(code.problem.n):
        if row_idx in knows:
            continue
        word = code.matrix.row_words[row_idx]
        span |= {s ^ word for s in span}
    return tuple(sorted(span))


def realization_codeword(code: IndexCode, i: int, realization: int) -> int:
    """Codeword produced by the side-information values with unknowns zero."""
    receiver = code.problem.receivers[i]
    if not 0 <= realization < (1 << len(receiver.knows)):
        raise ValidationError(
            f"realization {realization} does not fit {len(receiver.knows)} known bits"
        )
    word = 0
    for t, k in enumerate(receiver.knows):
        if (realization >> t) & 1:
            word ^= code.matrix.row_words[k]
    return word


def consistent_codewords(code: IndexCode, i: int, realization: int) -> frozenset[int]:
    """Codewords reachable once K_i is pinned to the given realization."""
    base = realization_codeword(code, i, realization)
    return frozenset(base ^ h for h in unknown_row_span(code, i))


def translation_mask(length: int, seed: int | None) -> int:
    """Codeword translation selected by the seed (0 for the default run)."""
    if seed is None:
        return 0
    return random.Random(seed).randrange(1 << length)


def resolve_threshold(code: IndexCode, threshold: int | str) -> int:
    if threshold == "minrank":
        return minrank(code.problem).value
    if threshold == "length":
        return code.length
    if isinstance(threshold, int) and not isinstance(threshold, bool) and threshold >= 0:
        return threshold
    raise ValidationError(f"threshold must be 'minrank', 'length' or an int >= 0, got {threshold!r}")


def build_mapping(
    code: IndexCode,
    constellation: PartitionedConstellation,
    *,
    threshold: int | str = "minrank",
    seed: int | None = None,
    order: Sequence[int] | None = None,
) -> CodewordMapping:
    """Label all 2^l codewords onto the partitioned constellation.

    ``order`` overrides the receiver priority order (must still be a
    permutation in non-decreasing eta, since equal-eta receivers may be
    served in any order). With no prioritized receiver the labeling is the
    identity on indices (arbitrary order).
    """
    length = code.length
    if not code.full_rank():
        raise ValidationError(
            f"encoding matrix must have full column rank {length}; "
            "fewer than 2^l distinct codewords otherwise"
        )
    if constellation.size != 1 << length:
        raise ValidationError(
            f"constellation size {constellation.size} != 2^{length}"
        )
    t_value = resolve_threshold(code, threshold)
    etas = [eta(code, i) for i in range(code.problem.m)]
    if order is None:
        order_t = tuple(sorted(range(code.problem.m), key=lambda i: (etas[i], i)))
    else:
        order_t = tuple(order)
        if sorted(order_t) != list(range(code.problem.m)):
            raise ValidationError("order must be a permutation of all receivers")
        ordered_etas = [etas[i] for i in order_t]
        if ordered_etas != sorted(ordered_etas):
            raise ValidationError("order must be non-decreasing in eta")

    total = 1 << length
    t_mask = translation_mask(length, seed)
    assignment: dict[int, int] = {}
    if not order_t or etas[order_t[0]] >= t_value:
        return CodewordMapping(
            length,
            tuple(c ^ t_mask for c in range(total)),
            t_value,
            order_t,
            seed,
            constellation,
        )

    # eta = 0 receivers are confined to single codewords per realization;
    # any bijection serves them, so they impose no placement work.
    prioritized = [i for i in order_t if 1 <= etas[i] < t_value]

    cosets: dict[int, dict[int, frozenset[int]]] = {}
    reps: dict[int, dict[int, int]] = {}
    pools: dict[int, list[int]] = {}
    for i in prioritized:
        span = unknown_row_span(code, i)
        per_real = {}
        rep = {}
        for a in range(1 << len(code.problem.receivers[i].knows)):
            base = realization_codeword(code, i, a)
            cset = frozenset(base ^ h for h in span)
            per_real[a] = cset
            rep[a] = min(cset)
        cosets[i] = per_real
        reps[i] = rep
        pools[i] = sorted(per_real)

    coords = [p.as_complex for p in constellation.points]
    subset_of: dict[int, list[int]] = {}  # level -> point index -> subset id

    def subsets_at(level: int) -> tuple[tuple[int, ...], ...]:
        if level not in subset_of:
            lookup = [0] * constellation.size
            for s, subset in enumerate(constellation.levels[level]):
                for p in subset:
                    lookup[p] = s
            subset_of[level] = lookup
        return constellation.levels[level]

    used: set[int] = set()

    def place(codeword: int, coset: frozenset[int], level: int) -> int:
        subsets = subsets_at(level)
        lookup = subset_of[level]
        placed = [assignment[c] for c in coset if c in assignment]
        counts = [0] * len(subsets)
        for p in placed:
            counts[lookup[p]] += 1
        max_count = max(counts)
        with_free = [
            s
            for s, cnt in enumerate(counts)
            if cnt == max_count and any(p not in used for p in subsets[s])
        ]
        if with_free:
            s = with_free[0]
            free_points = [p for p in subsets[s] if p not in used]
            return _farthest(free_points, placed)[0]
        # Every fullest subset is already labeled: spill into the nearest
        # non-full ancestor of that subset. Choosing within the sibling
        # first keeps the coset inside one level-(l-eta-1) subset, which is
        # what floors the achieved distance at Delta_{l-eta-1}; a bare
        # farthest-free-point rule wastes remote points and lets late
        # cosets collapse to the base distance.
        s_star = next(s for s, cnt in enumerate(counts) if cnt == max_count)
        for up in range(1, level + 1):
            ancestor = constellation.levels[level - up][s_star >> up]
            free_points = [p for p in ancestor if p not in used]
            if free_points:
                return _farthest(free_points, placed)[0]
        raise AssertionError("no free point left while codewords remain")

    def _farthest(free_points: list[int], placed: list[int]) -> list[int]:
        """Free points maximizing the minimum distance to the placed set."""
        if not placed:
            return free_points
        scores = [
            min(abs(coords[p] - coords[q]) ** 2 for q in placed)
            for p in free_points
        ]
        best = max(scores)
        return [
            p for p, sc in zip(free_points, scores) if sc >= best * (1 - _REL_TOL)
        ]

    while len(assignment) < total:
        mapped_one = False
        removed_one = False
        for i in prioritized:
            pool = pools[i]
            if not pool:
                continue
            per_real = cosets[i]
            overlaps = {a: sum(1 for c in per_real[a] if c in assignment) for a in pool}
            best_overlap = max(overlaps.values())
            seen_reps = set()
            candidates = []
            for a in pool:
                if overlaps[a] != best_overlap:
                    continue
                r = reps[i][a]
                if r not in seen_reps:
                    seen_reps.add(r)
                    candidates.append(a)
            a_star = candidates[0]
            coset = per_real[a_star]
            unmapped = sorted(c for c in coset if c not in assignment)
            if not unmapped:
                # Whole coset already labeled: drop every realization that
                # produces it and move on to the next receiver.
                rep = reps[i][a_star]
                pools[i] = [a for a in pool if reps[i][a] != rep]
                removed_one = True
                continue
            codeword = unmapped[0]
            point = place(codeword, coset, length - etas[i])
            assignment[codeword] = point
            used.add(point)
            mapped_one = True
            break  # restart the sweep at the top-priority receiver
        if mapped_one or removed_one:
            continue
        # All prioritized pools exhausted; label leftovers in codeword order.
        free = sorted(set(range(total)) - used)
        for codeword in range(total):
            if codeword not in assignment:
                assignment[codeword] = free.pop(0)
        break

    return CodewordMapping(
        length,
        tuple(assignment[c ^ t_mask] for c in range(total)),
        t_value,
        order_t,
        seed,
        constellation,
    )


@dataclass(frozen=True)
class ReceiverMappingCheck:
    receiver: int
    eta: int
    prioritized: bool
    dmin_sq: float
    bracket_lo_sq: float | None
    bracket_hi_sq: float | None
    ok: bool


@dataclass(frozen=True)
class MappingReport:
    threshold: int
    top_receiver: int | None
    top_exact: bool
    checks: tuple[ReceiverMappingCheck, ...]

    @property
    def all_ok(self) -> bool:
        return self.top_exact and all(c.ok for c in self.checks)


def verify_mapping(mapping: CodewordMapping, code: IndexCode) -> MappingReport:
    """Check every receiver's worst-case distance against its bracket.

    Prioritized receivers (eta < threshold) must land inside
    [Delta_{l-eta-1}, Delta_{l-eta}]; everyone else only has to reach the
    base distance. The top-priority receiver must hit the top of its
    bracket exactly.
    """
    constellation = mapping.constellation
    if not isinstance(constellation, PartitionedConstellation):
        raise ValidationError("verification needs a partitioned constellation")
    length = code.length
    checks = []
    dmins = {}
    for i in range(code.problem.m):
        e = eta(code, i)
        d2 = receiver_dmin_sq(mapping, code, i)
        dmins[i] = d2
        lo, hi = bracket_sq(constellation, length, e, mapping.threshold)
        if e == 0:
            ok = True
        elif e < mapping.threshold:
            ok = lo * (1 - _REL_TOL) <= d2 <= hi * (1 + _REL_TOL)
        else:
            ok = d2 >= lo * (1 - _REL_TOL)
        checks.append(
            ReceiverMappingCheck(i, e, e < mapping.threshold, d2, lo, hi, ok)
        )
    top = next(
        (i for i in mapping.receiver_order if 1 <= eta(code, i) < mapping.threshold),
        None,
    )
    if top is None:
        top_exact = True
    else:
        target = constellation.delta_sq[length - eta(code, top)]
        top_exact = abs(dmins[top] - target) <= _REL_TOL * target
    return MappingReport(mapping.threshold, top, top_exact, tuple(checks))


def codeword_bits(codeword: int, length: int) -> str:
    """Bit string y_1..y_l, leftmost first."""
    return "".join(str((codeword >> j) & 1) for j in range(length))


def write_mapping_csv(mapping: CodewordMapping, stream: IO[str]) -> None:
    """Rows `codeword_bits,point_index,I,Q` in codeword order."""
    writer = csv.writer(stream)
    writer.writerow(["codeword_bits", "point_index", "I", "Q"])
    for codeword in range(1 << mapping.length):
        point = mapping.point(codeword)
        writer.writerow(
            [
                codeword_bits(codeword, mapping.length),
                point.index,
                f"{point.I:.6g}",
                f"{point.Q:.6g}",
            ]
        )


def mapping_hash(mapping: CodewordMapping) -> str:
    blob = ",".join(str(p) for p in mapping.assignment)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def write_mapping_json(
    mapping: CodewordMapping, code: IndexCode, stream: IO[str], tool_version: str
) -> None:
    """Replayable mapping record: assignment plus run parameters."""
    data = {
        "tool_version": tool_version,
        "problem_hash": problem_hash(code.problem, code.matrix),
        "l": mapping.length,
        "threshold": mapping.threshold,
        "seed": mapping.seed,
        "receiver_order": [i + 1 for i in mapping.receiver_order],
        "mapping_hash": mapping_hash(mapping),
        "assignment": {
            codeword_bits(c, mapping.length): mapping.assignment[c]
            for c in range(1 << mapping.length)
        },
    }
    json.dump(data, stream, indent=2)
    stream.write("\n")
