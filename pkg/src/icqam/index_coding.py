"""Index-coding problem model and side-information analysis.

An instance has n binary messages and m receivers; receiver i demands the
messages in ``wants`` and already holds the ones in ``knows``. A linear
code of length ``l`` is an n x l GF(2) matrix L broadcasting y = xL. This
module computes, per receiver, the codeword bits known a priori (S_i),
the unresolved-dimension count eta_i = min(n - |K_i|, l - |S_i|), the
decodability of a chosen code, and the exact minrank N (the optimal code
length) by searching column spaces in increasing dimension.

All message and receiver indices in the Python API are 0-based; the JSON
problem-file format uses 1-based message indices.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from .errors import ValidationError
from .gf2 import BitMatrix, BitVector, enumerate_subspaces, in_span, mat_vec_mul, rank

# Exact minrank search enumerates RREF subspaces of F_2^n.
MINRANK_N_LIMIT = 16


@dataclass(frozen=True)
class Receiver:
    """One receiver: demanded messages and a-priori known messages (0-based)."""

    wants: tuple[int, ...]
    knows: tuple[int, ...]

    @classmethod
    def of(cls, wants: Iterable[int], knows: Iterable[int]) -> "Receiver":
        return cls(tuple(sorted(set(wants))), tuple(sorted(set(knows))))

    @property
    def knows_set(self) -> frozenset[int]:
        return frozenset(self.knows)

    def knows_mask(self) -> int:
        mask = 0
        for k in self.knows:
            mask |= 1 << k
        return mask


@dataclass(frozen=True)
class IndexCodingProblem:
    """An index-coding instance: n messages plus the receiver demands."""

    n: int
    receivers: tuple[Receiver, ...]

    @classmethod
    def of(cls, n: int, receivers: Iterable[tuple[Iterable[int], Iterable[int]]]):
        return cls(n, tuple(Receiver.of(w, k) for w, k in receivers))

    @property
    def m(self) -> int:
        return len(self.receivers)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    single_unicast: bool
    errors: tuple[str, ...]


def validate(problem: IndexCodingProblem) -> ValidationReport:
    """Check the instance invariants; each violation is named individually."""
    errors: list[str] = []
    if problem.n < 1:
        errors.append(f"message count n must be >= 1, got {problem.n}")
    if not problem.receivers:
        errors.append("instance has no receivers")
    full = frozenset(range(problem.n))
    for i, r in enumerate(problem.receivers):
        tag = f"receiver {i + 1}"
        if not r.wants:
            errors.append(f"{tag}: empty wants set")
        out_of_range = [x for x in (*r.wants, *r.knows) if not 0 <= x < problem.n]
        if out_of_range:
            errors.append(f"{tag}: message index out of range: {sorted(set(out_of_range))}")
        overlap = set(r.wants) & set(r.knows)
        if overlap:
            errors.append(f"{tag}: wants and knows overlap on {sorted(overlap)}")
        if problem.n >= 1 and r.knows_set == full:
            errors.append(f"{tag}: side information covers all messages")
    single = bool(problem.receivers) and all(len(r.wants) == 1 for r in problem.receivers)
    if single:
        wanted = [r.wants[0] for r in problem.receivers]
        single = len(set(wanted)) == len(wanted)
    return ValidationReport(not errors, single, tuple(errors))


def require_valid(problem: IndexCodingProblem) -> None:
    report = validate(problem)
    if not report.valid:
        raise ValidationError("; ".join(report.errors))


def split_demands(problem: IndexCodingProblem) -> IndexCodingProblem:
    """Split every receiver into one single-demand receiver per wanted message."""
    receivers = []
    for r in problem.receivers:
        for w in r.wants:
            receivers.append(Receiver((w,), r.knows))
    return IndexCodingProblem(problem.n, tuple(receivers))


@dataclass(frozen=True)
class IndexCode:
    """A problem together with a chosen n x l encoding matrix."""

    problem: IndexCodingProblem
    matrix: BitMatrix

    def __post_init__(self) -> None:
        if self.matrix.rows != self.problem.n:
            raise ValidationError(
                f"encoding matrix has {self.matrix.rows} rows, problem has "
                f"{self.problem.n} messages"
            )

    @property
    def length(self) -> int:
        return self.matrix.cols

    def encode(self, message: BitVector) -> BitVector:
        return mat_vec_mul(message, self.matrix)

    def full_rank(self) -> bool:
        return rank(self.matrix) == self.length


def _check_receiver_index(code: IndexCode, i: int) -> Receiver:
    if not 0 <= i < code.problem.m:
        raise ValidationError(
            f"receiver index {i} out of range (m={code.problem.m})"
        )
    return code.problem.receivers[i]


def known_transmissions(code: IndexCode, i: int) -> frozenset[int]:
    """S_i: codeword bit positions that combine side-information messages only."""
    receiver = _check_receiver_index(code, i)
    knows = receiver.knows_set
    return frozenset(
        j
        for j in range(code.length)
        if set(code.matrix.column_support(j)) <= knows
    )


def eta(code: IndexCode, i: int) -> int:
    """min(n - |K_i|, l - |S_i|), clamped at zero."""
    receiver = _check_receiver_index(code, i)
    s_i = known_transmissions(code, i)
    value = min(
        code.problem.n - len(receiver.knows),
        code.length - len(s_i),
    )
    return max(value, 0)


@dataclass(frozen=True)
class ReceiverAnalysis:
    """Per-receiver side-information summary for a chosen code."""

    receiver: int
    known_transmissions: frozenset[int]
    eta: int
    gains_sicg: bool  # unresolved dimensions below the code length


def analyze_receiver(code: IndexCode, i: int) -> ReceiverAnalysis:
    s_i = known_transmissions(code, i)
    e = eta(code, i)
    return ReceiverAnalysis(i, s_i, e, e < code.length)


def decodable(code: IndexCode, i: int) -> bool:
    """True iff receiver i can recover every wanted message from (y, K_i).

    Standard linear criterion: the wanted indicator vector must lie in the
    span of the code's columns together with the side-information units.
    """
    receiver = _check_receiver_index(code, i)
    n = code.problem.n
    basis = [BitVector(n, code.matrix.column_word(j)) for j in range(code.length)]
    basis += [BitVector.unit(n, k) for k in receiver.knows]
    return all(in_span(BitVector.unit(n, w), basis) for w in receiver.wants)


def all_decodable(code: IndexCode) -> bool:
    return all(decodable(code, i) for i in range(code.problem.m))


def bandwidth_gain(code: IndexCode) -> Fraction:
    """Complex-dimension saving of one 2^l-ary symbol versus l binary uses."""
    return Fraction(code.length, 2)


@dataclass(frozen=True)
class MinrankResult:
    value: int
    witness: BitMatrix  # n x value encoding matrix, decodable for all receivers

    def code(self, problem: IndexCodingProblem) -> IndexCode:
        return IndexCode(problem, self.witness)


@lru_cache(maxsize=64)
def minrank(problem: IndexCodingProblem) -> MinrankResult:
    """Exact optimal linear code length over GF(2), with a witness matrix.

    Decodability depends only on the column space of L, so the search
    enumerates canonical RREF bases of d-dimensional subspaces of F_2^n in
    increasing d and returns on the first subspace V with
    e_w in V + span{e_k : k in K_i} for every receiver demand. The witness
    packs the basis as columns; determinism comes from the canonical
    enumeration order (minimum d, lexicographically first basis).
    """
    require_valid(problem)
    n = problem.n
    if n > MINRANK_N_LIMIT:
        raise ValidationError(
            f"minrank search is exact and desk-scale only: n={n} exceeds "
            f"the guard ({MINRANK_N_LIMIT})"
        )
    # Per receiver: coordinates outside K_i survive the quotient by
    # span{e_k}; membership then reduces to span tests on masked bases.
    full_mask = (1 << n) - 1
    checks = []  # (unknown-coordinate mask, wanted unit words)
    for r in problem.receivers:
        mask = full_mask ^ r.knows_mask()
        checks.append((mask, tuple(1 << w for w in r.wants)))
    # Receivers with little side information constrain hardest; trying
    # them first makes most candidate subspaces fail fast.
    checks.sort(key=lambda c: c[0].bit_count(), reverse=True)

    for d in range(n + 1):
        for basis in enumerate_subspaces(n, d):
            if _subspace_serves_all(basis.row_words, checks):
                witness = BitMatrix(
                    n,
                    max(d, 1),
                    tuple(
                        sum(((basis.row_words[j] >> row) & 1) << j for j in range(d))
                        for row in range(n)
                    ),
                ) if d else BitMatrix.zeros(n, 1)
                # d = 0 cannot serve a valid instance (wants are nonempty
                # and disjoint from knows); keep the guard anyway.
                return MinrankResult(d, witness)
    raise AssertionError("full space always serves every valid instance")


def _subspace_serves_all(
    basis_words: tuple[int, ...], checks: list[tuple[int, tuple[int, ...]]]
) -> bool:
    for mask, wants in checks:
        reduced: list[int] = []
        for word in basis_words:
            word &= mask
            for b in reduced:
                if word & (b & -b):
                    word ^= b
            if word:
                reduced.append(word)
        for want in wants:
            res = want
            for b in reduced:
                if res & (b & -b):
                    res ^= b
            if res:
                return False
    return True


# ---------------------------------------------------------------------------
# Problem-file round trip (JSON, 1-based message indices)

_TOP_KEYS = {"n", "receivers", "L"}
_RECEIVER_KEYS = {"wants", "knows"}


def _indices_from_json(raw, n: int, where: str) -> tuple[int, ...]:
    if not isinstance(raw, list):
        raise ValidationError(f"{where}: expected a list of message indices")
    out = []
    for x in raw:
        if not isinstance(x, int) or isinstance(x, bool):
            raise ValidationError(f"{where}: non-integer index {x!r}")
        if not 1 <= x <= n:
            raise ValidationError(f"{where}: index {x} outside 1..{n}")
        out.append(x - 1)
    if len(set(out)) != len(out):
        raise ValidationError(f"{where}: duplicate indices")
    return tuple(sorted(out))


def load_problem(path: str | Path) -> tuple[IndexCodingProblem, IndexCode | None]:
    """Load a problem file; returns the instance and the embedded code, if any."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top level must be an object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ValidationError(f"{path}: unknown keys {sorted(unknown)}")
    if "n" not in data or "receivers" not in data:
        raise ValidationError(f"{path}: required keys: n, receivers")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"{path}: n must be a positive integer")
    if not isinstance(data["receivers"], list) or not data["receivers"]:
        raise ValidationError(f"{path}: receivers must be a non-empty list")
    receivers = []
    for i, entry in enumerate(data["receivers"]):
        where = f"{path}: receivers[{i}]"
        if not isinstance(entry, dict) or set(entry) - _RECEIVER_KEYS:
            raise ValidationError(f"{where}: expected keys wants, knows")
        wants = _indices_from_json(entry.get("wants", []), n, f"{where}.wants")
        knows = _indices_from_json(entry.get("knows", []), n, f"{where}.knows")
        receivers.append(Receiver(wants, knows))
    problem = IndexCodingProblem(n, tuple(receivers))
    report = validate(problem)
    if not report.valid:
        raise ValidationError(f"{path}: " + "; ".join(report.errors))

    code = None
    if "L" in data:
        rows = data["L"]
        if (
            not isinstance(rows, list)
            or len(rows) != n
            or any(
                not isinstance(row, list) or any(v not in (0, 1) for v in row)
                for row in rows
            )
        ):
            raise ValidationError(f"{path}: L must be n rows of 0/1 entries")
        widths = {len(row) for row in rows}
        if len(widths) != 1 or 0 in widths:
            raise ValidationError(f"{path}: L rows must share one positive width")
        code = IndexCode(problem, BitMatrix.from_rows(rows))
    return problem, code


def problem_to_json(problem: IndexCodingProblem, matrix: BitMatrix | None = None) -> str:
    """Canonical JSON serialization (stable bytes; 1-based indices)."""
    data: dict = {
        "n": problem.n,
        "receivers": [
            {
                "wants": [w + 1 for w in r.wants],
                "knows": [k + 1 for k in r.knows],
            }
            for r in problem.receivers
        ],
    }
    if matrix is not None:
        data["L"] = matrix.to_lists()
    return json.dumps(data, indent=2) + "\n"


def save_problem(
    path: str | Path, problem: IndexCodingProblem, matrix: BitMatrix | None = None
) -> None:
    Path(path).write_text(problem_to_json(problem, matrix))


def problem_hash(problem: IndexCodingProblem, matrix: BitMatrix | None = None) -> str:
    """Stable hex digest identifying the instance (and code, if given)."""
    return hashlib.sha256(problem_to_json(problem, matrix).encode()).hexdigest()[:16]
