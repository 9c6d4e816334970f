"""Monte Carlo wanted-message error rates over the AWGN broadcast channel.

Energy accounting keeps the schemes comparable: one 2^l-ary symbol
carries mean energy E_s = l, and the binary baseline spends the same
total energy as l unit-energy antipodal (+/-1) real channel uses. Noise
is independent Gaussian with variance N_0/2 per real dimension and the
SNR axis is E_s/N_0 in dB.

Per trial a uniform message vector is drawn; each receiver reads its
side-information values from that vector, ML-decodes over its effective
constellation (symbol schemes) or bit-by-bit (binary scheme), and an
error is counted when the decoded wanted value differs from the truth.
Chunks of trials draw from independent RNG streams keyed by
(seed, snr index, chunk index), so results are bitwise reproducible and
order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Mapping, Sequence

import numpy as np

from .constellation import build_psk
from .errors import DecodabilityError, ValidationError
from .gf2 import BitVector, nullspace_masks, span_solve
from .index_coding import IndexCode, known_transmissions, problem_hash
from .mapper import CodewordMapping, mapping_hash
from .receiver_analysis import EffectiveConstellation, effective_constellations

SCHEMES = ("qam-mapped", "psk-arbitrary", "binary")
CHUNK_TRIALS = 1 << 17
_SIM_N_LIMIT = 20
_SIM_KNOWN_LIMIT = 16
_COMBO_ENUM_LIMIT = 16

ENERGY_CONVENTION = (
    "Es = l per symbol; binary scheme uses l unit-energy antipodal bits; "
    "noise variance N0/2 per real dimension; snr_db = 10*log10(Es/N0)"
)


def q_function(x: float) -> float:
    """Tail probability of the standard normal distribution."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def n0_from_snr_db(symbol_energy: float, snr_db: float) -> float:
    return symbol_energy / (10.0 ** (snr_db / 10.0))


def snr_db_from_n0(symbol_energy: float, n0: float) -> float:
    return 10.0 * math.log10(symbol_energy / n0)


@dataclass(frozen=True)
class SimConfig:
    scheme: str
    snr_db_points: tuple[float, ...]
    trials_per_point: int
    rng_seed: int

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValidationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.snr_db_points:
            raise ValidationError("snr_db_points must be non-empty")
        if self.trials_per_point < 1:
            raise ValidationError("trials_per_point must be >= 1")


@dataclass(frozen=True)
class SimCell:
    scheme: str
    receiver: int
    snr_db: float
    trials: int
    errors: int

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials

    @property
    def stderr(self) -> float:
        p = self.error_rate
        return math.sqrt(p * (1.0 - p) / self.trials)


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    receivers: tuple[int, ...]
    cells: tuple[SimCell, ...]

    def cell(self, receiver: int, snr_db: float) -> SimCell:
        for c in self.cells:
            if c.receiver == receiver and c.snr_db == snr_db:
                return c
        raise KeyError((receiver, snr_db))


def _gather_positions(x: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    out = np.zeros_like(x)
    for t, pos in enumerate(positions):
        out |= ((x >> pos) & 1) << t
    return out


def _codeword_table(code: IndexCode) -> np.ndarray:
    n = code.problem.n
    if n > _SIM_N_LIMIT:
        raise ValidationError(f"simulation guard: n={n} > {_SIM_N_LIMIT}")
    idx = np.arange(1 << n, dtype=np.int64)
    table = np.zeros(1 << n, dtype=np.int64)
    for row in range(n):
        table[((idx >> row) & 1) == 1] ^= code.matrix.row_words[row]
    return table


class _SymbolEngine:
    """Shared decode pipeline for the one-symbol (QAM/PSK) schemes."""

    def __init__(self, code: IndexCode, mapping: CodewordMapping, receivers: Sequence[int]):
        self.code = code
        self.receivers = tuple(receivers)
        self.y_table = _codeword_table(code)
        self.points = mapping.constellation.point_array()
        point_of = np.array(mapping.assignment, dtype=np.int64)
        size = len(self.points)
        n = code.problem.n
        idx = np.arange(1 << n, dtype=np.int64)
        tx_point = point_of[self.y_table]
        self.labels: dict[int, np.ndarray] = {}
        self.knows: dict[int, tuple[int, ...]] = {}
        self.wants: dict[int, tuple[int, ...]] = {}
        for i in self.receivers:
            receiver = code.problem.receivers[i]
            if len(receiver.knows) > _SIM_KNOWN_LIMIT:
                raise ValidationError(
                    f"receiver {i + 1}: |K_i|={len(receiver.knows)} exceeds "
                    f"simulation guard {_SIM_KNOWN_LIMIT}"
                )
            if (1 << len(receiver.knows)) * size > (1 << 26):
                raise ValidationError(
                    f"receiver {i + 1}: realization/point lookup would need "
                    f"{(1 << len(receiver.knows)) * size} cells; out of desk scale"
                )
            a = _gather_positions(idx, receiver.knows)
            want = _gather_positions(idx, receiver.wants)
            lin = a * size + tx_point
            order = np.argsort(lin, kind="stable")
            lin_sorted = lin[order]
            want_sorted = want[order]
            dup = lin_sorted[1:] == lin_sorted[:-1]
            if np.any(dup & (want_sorted[1:] != want_sorted[:-1])):
                raise DecodabilityError(
                    f"receiver {i + 1}: wanted value ambiguous at some "
                    "(realization, point); code is not decodable"
                )
            table = np.full((1 << len(receiver.knows)) * size, -1, dtype=np.int32)
            table[lin] = want
            self.labels[i] = table.reshape(-1, size)
            self.knows[i] = receiver.knows
            self.wants[i] = receiver.wants
        self.tx_point = tx_point

    def run(self, x: np.ndarray, noise: np.ndarray) -> dict[int, int]:
        rx = self.points[self.tx_point[x]] + noise
        dist_sq = np.abs(rx[:, None] - self.points[None, :]) ** 2
        errors = {}
        for i in self.receivers:
            a = _gather_positions(x, self.knows[i])
            label_rows = self.labels[i][a]
            masked = np.where(label_rows >= 0, dist_sq, np.inf)
            decided = label_rows[np.arange(len(x)), np.argmin(masked, axis=1)]
            truth = _gather_positions(x, self.wants[i])
            errors[i] = int(np.count_nonzero(decided != truth))
        return errors


def _binary_combination(code: IndexCode, i: int, want: int) -> int:
    """Bit-mask of codeword positions XOR-combined to recover one message.

    Solves e_w = L c + sum(lambda_k e_k) and, among all solutions, keeps
    the one using the fewest codeword bits outside S_i (the bits that must
    be decoded from noise), ties to the lexicographically smallest mask.
    """
    n = code.problem.n
    receiver = code.problem.receivers[i]
    generators = [
        BitVector(n, code.matrix.column_word(j)) for j in range(code.length)
    ]
    generators += [BitVector.unit(n, k) for k in receiver.knows]
    target = BitVector.unit(n, want)
    base = span_solve(generators, target)
    if base is None:
        raise DecodabilityError(
            f"receiver {i + 1}: message {want + 1} is not decodable"
        )
    known_bits = 0
    for j in known_transmissions(code, i):
        known_bits |= 1 << j
    code_mask = (1 << code.length) - 1

    def noisy_mask(mask: int) -> int:
        return mask & code_mask & ~known_bits

    relations = nullspace_masks(generators)
    best = base
    best_cost = noisy_mask(base).bit_count()
    if len(relations) <= _COMBO_ENUM_LIMIT:
        for combo in range(1, 1 << len(relations)):
            mask = base
            for t, rel in enumerate(relations):
                if (combo >> t) & 1:
                    mask ^= rel
            cost = noisy_mask(mask).bit_count()
            if cost < best_cost or (cost == best_cost and mask < best):
                best, best_cost = mask, cost
    return noisy_mask(best)


def binary_distance_sq(code: IndexCode, i: int) -> float:
    """Worst-case squared distance of the l-fold binary scheme: always 4.

    Unit-energy antipodal bits sit 2 apart, and every receiver's decoding
    combination must read at least one codeword bit it does not already
    know (verified here), so the governing distance is 4 regardless of l.
    """
    masks = [
        _binary_combination(code, i, w) for w in code.problem.receivers[i].wants
    ]
    if any(mask == 0 for mask in masks):
        raise AssertionError(
            "decoding combination uses no noisy bit; wanted message would "
            "be a side-information function"
        )
    return 4.0


class _BinaryEngine:
    """l antipodal channel uses; unknown bits decoded independently."""

    def __init__(self, code: IndexCode, receivers: Sequence[int]):
        self.code = code
        self.receivers = tuple(receivers)
        self.y_table = _codeword_table(code)
        self.length = code.length
        self.noisy_masks: dict[int, tuple[int, ...]] = {}
        for i in self.receivers:
            receiver = code.problem.receivers[i]
            self.noisy_masks[i] = tuple(
                _binary_combination(code, i, w) for w in receiver.wants
            )

    def run(self, x: np.ndarray, noise: np.ndarray) -> dict[int, int]:
        y = self.y_table[x]
        bits = ((y[:, None] >> np.arange(self.length)[None, :]) & 1).astype(np.int8)
        symbols = 1.0 - 2.0 * bits
        rx = symbols + noise
        flips = (rx < 0).astype(np.int8) != bits
        errors = {}
        for i in self.receivers:
            wrong = np.zeros(len(x), dtype=bool)
            for mask in self.noisy_masks[i]:
                positions = [j for j in range(self.length) if (mask >> j) & 1]
                if positions:
                    parity = flips[:, positions].sum(axis=1) & 1
                    wrong |= parity.astype(bool)
            errors[i] = int(np.count_nonzero(wrong))
        return errors


def _make_engine(code: IndexCode, config_scheme: str, mapping, receivers):
    if config_scheme == "qam-mapped":
        if mapping is None:
            raise ValidationError("qam-mapped scheme needs a codeword mapping")
        if mapping.length != code.length:
            raise ValidationError(
                f"mapping length {mapping.length} != code length {code.length}"
            )
        return _SymbolEngine(code, mapping, receivers)
    if config_scheme == "psk-arbitrary":
        if mapping is not None:
            raise ValidationError("psk-arbitrary uses its own arbitrary-order labeling")
        size = 1 << code.length
        psk_map = CodewordMapping(
            code.length, tuple(range(size)), 0, (), None, build_psk(code.length)
        )
        return _SymbolEngine(code, psk_map, receivers)
    if mapping is not None:
        raise ValidationError("binary scheme takes no mapping")
    return _BinaryEngine(code, receivers)


def _noise_for(engine, rng: np.random.Generator, count: int, sigma: float) -> np.ndarray:
    if isinstance(engine, _BinaryEngine):
        return rng.normal(0.0, sigma, size=(count, engine.length))
    re = rng.normal(0.0, sigma, size=count)
    im = rng.normal(0.0, sigma, size=count)
    return re + 1j * im


def _chunk_trials(engine) -> int:
    # The symbol decoder builds a (trials x 2^l) distance matrix per chunk;
    # cap the product so large constellations stay within memory.
    if isinstance(engine, _BinaryEngine):
        return CHUNK_TRIALS
    return max(1024, min(CHUNK_TRIALS, (1 << 22) // len(engine.points)))


def simulate(
    code: IndexCode,
    config: SimConfig,
    mapping: CodewordMapping | None = None,
    receivers: Sequence[int] | None = None,
) -> SimResult:
    """Estimate per-receiver wanted-message error rates on an SNR grid."""
    chosen = tuple(receivers) if receivers is not None else tuple(range(code.problem.m))
    engine = _make_engine(code, config.scheme, mapping, chosen)
    n = code.problem.n
    cells = []
    for si, snr_db in enumerate(config.snr_db_points):
        n0 = n0_from_snr_db(float(code.length), snr_db)
        sigma = math.sqrt(n0 / 2.0)
        counts = {i: 0 for i in chosen}
        remaining = config.trials_per_point
        chunk_index = 0
        chunk_cap = _chunk_trials(engine)
        while remaining > 0:
            count = min(remaining, chunk_cap)
            rng = np.random.default_rng(
                np.random.SeedSequence(
                    entropy=config.rng_seed, spawn_key=(si, chunk_index)
                )
            )
            x = rng.integers(0, 1 << n, size=count, dtype=np.int64)
            noise = _noise_for(engine, rng, count, sigma)
            for i, e in engine.run(x, noise).items():
                counts[i] += e
            remaining -= count
            chunk_index += 1
        for i in chosen:
            cells.append(
                SimCell(config.scheme, i, snr_db, config.trials_per_point, counts[i])
            )
    return SimResult(config, chosen, tuple(cells))


def exhaustive_message_check(
    code: IndexCode,
    scheme: str,
    mapping: CodewordMapping | None = None,
    snr_db: float | None = 60.0,
    rng_seed: int = 0,
) -> int:
    """Total wanted-message errors over every message vector, once each.

    At the default 60 dB the noise is negligible against every fixture
    distance, so a decodable system must return 0. ``snr_db=None`` turns
    the noise off entirely.
    """
    chosen = tuple(range(code.problem.m))
    engine = _make_engine(code, scheme, mapping, chosen)
    x = np.arange(1 << code.problem.n, dtype=np.int64)
    if snr_db is None:
        sigma = 0.0
        noise = (
            np.zeros((len(x), code.length))
            if isinstance(engine, _BinaryEngine)
            else np.zeros(len(x), dtype=np.complex128)
        )
    else:
        sigma = math.sqrt(n0_from_snr_db(float(code.length), snr_db) / 2.0)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=rng_seed))
        noise = _noise_for(engine, rng, len(x), sigma)
    return sum(engine.run(x, noise).values())


def union_bound_estimate(
    effectives_by_receiver: Mapping[int, Sequence[EffectiveConstellation]],
    n0: float,
) -> dict[int, float]:
    """Pairwise-error upper estimate per receiver at noise level N_0.

    Sums Q(d / (2 sigma)) over differing-label pairs, averaged over the
    transmitted point (uniform) and the side-information realizations.
    """
    sigma = math.sqrt(n0 / 2.0)
    out = {}
    for i, effectives in effectives_by_receiver.items():
        total = 0.0
        for eff in effectives:
            if not eff.points:
                continue
            pair_sum = sum(
                count * q_function(math.sqrt(d2) / (2.0 * sigma))
                for d2, count in eff.spectrum
            )
            total += 2.0 * pair_sum / len(eff.points)
        out[i] = total / len(effectives)
    return out


def union_bound(
    mapping: CodewordMapping,
    code: IndexCode,
    n0: float,
    receivers: Sequence[int] | None = None,
) -> dict[int, float]:
    chosen = tuple(receivers) if receivers is not None else tuple(range(code.problem.m))
    effectives = {i: effective_constellations(mapping, code, i) for i in chosen}
    return union_bound_estimate(effectives, n0)


def write_results_csv(
    result: SimResult,
    stream: IO[str],
    code: IndexCode,
    mapping: CodewordMapping | None = None,
    tool_version: str = "0.1.0",
) -> None:
    """Results CSV with a provenance comment block (replayable runs)."""
    rows = ";".join(
        "".join(str((w >> c) & 1) for c in range(code.matrix.cols))
        for w in code.matrix.row_words
    )
    stream.write(f"# tool: icqam {tool_version}\n")
    stream.write(f"# problem_hash: {problem_hash(code.problem, code.matrix)}\n")
    stream.write(f"# L: {rows}\n")
    stream.write(
        f"# mapping_hash: {mapping_hash(mapping) if mapping is not None else 'none'}\n"
    )
    stream.write(f"# seed: {result.config.rng_seed}\n")
    stream.write(f"# energy: {ENERGY_CONVENTION}\n")
    stream.write("scheme,receiver,snr_db,trials,errors,error_rate,stderr\n")
    for c in result.cells:
        stream.write(
            f"{c.scheme},{c.receiver + 1},{c.snr_db:.6g},{c.trials},{c.errors},"
            f"{c.error_rate:.6g},{c.stderr:.6g}\n"
        )
