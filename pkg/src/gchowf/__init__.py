"""Classical-classical one-way function built from basis-seeded GCH circuit families."""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    GchError,
    IncompatiblePair,
    InvalidEncoding,
    MalformedCircuitEncoding,
    OffBasisInput,
    RetriesExhausted,
    SamplingExhausted,
    TooLarge,
    UnsupportedSize,
)
from .gch import (
    GchBasis,
    GchState,
    Single,
    apply_cnot_symbolic,
    basis_of,
    enumerate_bases,
    enumerate_states,
    inner_product,
    is_compatible,
    swap_test,
    to_statevector,
)
from .encoding import decode_state, encode_state, validate_encoding
from .owf import OwfOutput, cc_owf, eval_family, sample_circuit_family, seed_from_basis
from .prng import PrngStream
