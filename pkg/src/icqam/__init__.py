"""Index coding over AWGN broadcast channels with QAM labeling.

Library layout:

- ``gf2``: exact GF(2) vectors/matrices, rank, span tests, subspace
  enumeration.
- ``index_coding``: problem model, side-information analysis (S_i, eta),
  decodability, exact minrank, problem-file round trip.
- ``constellation``: energy-normalized QAM/PSK sets, set-partition trees,
  closed-form distances.
- ``mapper``: codeword-to-symbol labeling that protects
  side-information-rich receivers, plus verification.
- ``receiver_analysis``: effective constellations, worst-case distances,
  ML decoding.
- ``awgn_sim``: Monte Carlo error rates, union-bound cross-check.
- ``cli``: the ``icqam`` command.
"""

__version__ = "0.1.0"

from .constellation import (  # noqa: F401
    Constellation,
    PartitionedConstellation,
    SignalPoint,
    build_psk,
    build_qam,
    dmin_formula,
    ungerboeck_split,
)
from .errors import DecodabilityError, IcqamError, ValidationError  # noqa: F401
from .gf2 import BitMatrix, BitVector, enumerate_subspaces, in_span, mat_vec_mul, rank  # noqa: F401
from .index_coding import (  # noqa: F401
    IndexCode,
    IndexCodingProblem,
    Receiver,
    bandwidth_gain,
    decodable,
    eta,
    known_transmissions,
    load_problem,
    minrank,
    save_problem,
    split_demands,
    validate,
)
from .mapper import CodewordMapping, build_mapping, consistent_codewords, verify_mapping  # noqa: F401
from .receiver_analysis import (  # noqa: F401
    EffectiveConstellation,
    effective_constellation,
    ml_decode,
    receiver_dmin,
    receiver_dmin_sq,
)
from .awgn_sim import SimConfig, SimResult, simulate, union_bound_estimate  # noqa: F401
