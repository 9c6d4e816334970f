"""Exact linear algebra over GF(2) on packed integer bitsets.

Vectors and matrices are immutable values. Bits pack little-endian into
Python ints (bit i of a word is coordinate i), which keeps row reduction,
span tests and the subspace enumeration cheap inside the exact-search
loops built on top.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

# Enumerating subspaces of F_2^n is Gaussian-binomial sized; past this the
# search is not desk-scale.
SUBSPACE_ENUM_LIMIT = 16


def _pack_bits(bits: Iterable[int]) -> tuple[int, int]:
    word = 0
    length = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit entries must be 0 or 1, got {b!r}")
        word |= b << length
        length += 1
    return word, length


@dataclass(frozen=True)
class BitVector:
    """Vector over GF(2); bit i of ``word`` is coordinate i."""

    length: int
    word: int = 0

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"BitVector length must be >= 1, got {self.length}")
        if not 0 <= self.word < (1 << self.length):
            raise ValueError(
                f"word {self.word:#x} does not fit in {self.length} bits"
            )

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        word, length = _pack_bits(bits)
        return cls(length, word)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        if not 0 <= index < length:
            raise ValueError(f"unit index {index} out of range for length {length}")
        return cls(length, 1 << index)

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(f"bit index {i} out of range for length {self.length}")
        return (self.word >> i) & 1

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.word >> i) & 1 for i in range(self.length))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.length) if (self.word >> i) & 1)

    def weight(self) -> int:
        return self.word.bit_count()

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError(
                f"length mismatch: {self.length} vs {other.length}"
            )
        return BitVector(self.length, self.word ^ other.word)


@dataclass(frozen=True)
class BitMatrix:
    """Matrix over GF(2), one packed word per row (bit j of a row is column j).

    rows = 0 is allowed and denotes an empty basis (used by the subspace
    enumeration for the trivial subspace).
    """

    rows: int
    cols: int
    row_words: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 1:
            raise ValueError(f"bad shape {self.rows}x{self.cols}")
        if len(self.row_words) != self.rows:
            raise ValueError(
                f"{self.rows} rows declared but {len(self.row_words)} row words given"
            )
        top = 1 << self.cols
        for r, w in enumerate(self.row_words):
            if not 0 <= w < top:
                raise ValueError(f"row {r} word {w:#x} does not fit in {self.cols} bits")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        if not rows:
            raise ValueError("from_rows needs at least one row; use zeros/empty instead")
        packed = []
        cols = len(rows[0])
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged rows")
            word, _ = _pack_bits(row)
            packed.append(word)
        return cls(len(rows), cols, tuple(packed))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence[int]) -> "BitMatrix":
        if rows * cols != len(entries):
            raise ValueError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        words = []
        for r in range(rows):
            word, _ = _pack_bits(entries[r * cols : (r + 1) * cols])
            words.append(word)
        return cls(rows, cols, tuple(words))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    def entry(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"entry ({r},{c}) out of range for {self.rows}x{self.cols}")
        return (self.row_words[r] >> c) & 1

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(
            (self.row_words[r] >> c) & 1
            for r in range(self.rows)
            for c in range(self.cols)
        )

    def row(self, r: int) -> BitVector:
        return BitVector(self.cols, self.row_words[r])

    def column(self, c: int) -> BitVector:
        word = 0
        for r in range(self.rows):
            word |= ((self.row_words[r] >> c) & 1) << r
        return BitVector(max(self.rows, 1), word) if self.rows else BitVector(1, 0)

    def column_word(self, c: int) -> int:
        word = 0
        for r in range(self.rows):
            word |= ((self.row_words[r] >> c) & 1) << r
        return word

    def column_support(self, c: int) -> tuple[int, ...]:
        return tuple(r for r in range(self.rows) if (self.row_words[r] >> c) & 1)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(
            self.cols, max(self.rows, 1),
            tuple(self.column_word(c) for c in range(self.cols)),
        )

    def to_lists(self) -> list[list[int]]:
        return [
            [(w >> c) & 1 for c in range(self.cols)] for w in self.row_words
        ]


def mat_vec_mul(x: BitVector, matrix: BitMatrix) -> BitVector:
    """Return y = x @ matrix over GF(2) (x a row vector of matrix.rows bits)."""
    if x.length != matrix.rows:
        raise ValueError(
            f"dimension mismatch: vector length {x.length} vs matrix rows "
            f"{matrix.rows} (matrix is {matrix.rows}x{matrix.cols})"
        )
    word = 0
    xw = x.word
    for r in range(matrix.rows):
        if (xw >> r) & 1:
            word ^= matrix.row_words[r]
    return BitVector(matrix.cols, word)


def _reduce_word(word: int, basis: dict[int, int]) -> int:
    """Reduce word modulo a pivot-indexed basis {pivot_bit: row_word}."""
    for pivot, row in basis.items():
        if word & pivot:
            word ^= row
    return word


def _eliminate(words: Iterable[int]) -> dict[int, int]:
    """Row-reduce; returns {pivot_bit: reduced_row} with mutually clear pivots."""
    basis: dict[int, int] = {}
    for word in words:
        word = _reduce_word(word, basis)
        if word == 0:
            continue
        pivot = word & -word
        for p in list(basis):
            if basis[p] & pivot:
                basis[p] ^= word
        basis[pivot] = word
    return basis


def rank(matrix: BitMatrix) -> int:
    """GF(2) rank via row reduction."""
    return len(_eliminate(matrix.row_words))


def rank_of_words(words: Iterable[int]) -> int:
    return len(_eliminate(words))


def in_span(v: BitVector, basis: Sequence[BitVector]) -> bool:
    """True iff v is a GF(2) linear combination of the basis vectors."""
    for b in basis:
        if b.length != v.length:
            raise ValueError(f"length mismatch: {b.length} vs {v.length}")
    reduced = _eliminate(b.word for b in basis)
    return _reduce_word(v.word, reduced) == 0


def span_solve(generators: Sequence[BitVector], target: BitVector) -> int | None:
    """Express target as a XOR of generators.

    Returns a packed coefficient mask (bit g set means generators[g] is
    used), or None when target is outside the span.
    """
    for g in generators:
        if g.length != target.length:
            raise ValueError(f"length mismatch: {g.length} vs {target.length}")
    # Eliminate while tracking which generator combination each row is.
    rows: list[tuple[int, int]] = []  # (word, combination mask)
    for g_idx, g in enumerate(generators):
        word, combo = g.word, 1 << g_idx
        for rw, rc in rows:
            if word & (rw & -rw):
                word ^= rw
                combo ^= rc
        if word:
            pivot = word & -word
            rows = [
                (rw ^ word, rc ^ combo) if rw & pivot else (rw, rc)
                for rw, rc in rows
            ]
            rows.append((word, combo))
    res, combo = target.word, 0
    for rw, rc in rows:
        if res & (rw & -rw):
            res ^= rw
            combo ^= rc
    return combo if res == 0 else None


def nullspace_masks(generators: Sequence[BitVector]) -> list[int]:
    """Basis of XOR relations among generators, as packed coefficient masks."""
    rows: list[tuple[int, int]] = []
    relations: list[int] = []
    for g_idx, g in enumerate(generators):
        word, combo = g.word, 1 << g_idx
        for rw, rc in rows:
            if word & (rw & -rw):
                word ^= rw
                combo ^= rc
        if word:
            rows.append((word, combo))
        else:
            relations.append(combo)
    return relations


def span_words(words: Sequence[int]) -> list[int]:
    """All XOR combinations of the given words, sorted ascending."""
    span = {0}
    for w in words:
        span |= {s ^ w for s in span}
    return sorted(span)


def enumerate_subspaces(n: int, d: int) -> Iterator[BitMatrix]:
    """Yield one canonical RREF basis per d-dimensional subspace of F_2^n.

    Bases come out as d x n matrices, pivot patterns in lexicographic
    order (and free entries in row-major binary-counter order within each
    pattern), so the stream order is reproducible.
    """
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    if n > SUBSPACE_ENUM_LIMIT:
        raise ValueError(
            f"n={n} exceeds the enumeration guard ({SUBSPACE_ENUM_LIMIT}); "
            "the number of subspaces grows as a Gaussian binomial"
        )
    if d == 0:
        yield BitMatrix(0, n, ())
        return
    for pivots in combinations(range(n), d):
        pivot_set = frozenset(pivots)
        free_cells = [
            (r, c)
            for r in range(d)
            for c in range(pivots[r] + 1, n)
            if c not in pivot_set
        ]
        base = tuple(1 << p for p in pivots)
        for counter in range(1 << len(free_cells)):
            words = list(base)
            for t, (r, c) in enumerate(free_cells):
                if (counter >> t) & 1:
                    words[r] |= 1 << c
            yield BitMatrix(d, n, tuple(words))
