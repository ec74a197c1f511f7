"""Fixed test vectors for bit-exact reproducibility.

Run as a script to print the vectors as JSON; tests/vectors/golden.json holds
the frozen copy.
"""

import hashlib
import json

from gchowf.encoding import bits_to_bytes, encode_circuit_family, sample_uniform_state
from gchowf.gch import basis_of, canonical_basis_bytes
from gchowf.owf import cc_owf, sample_circuit_family
from gchowf.prng import PrngStream

SIZES = (4, 6, 8, 10, 12, 16)
SEEDS = (0, 1, 2, 7, 2**64 - 1)


def compute():
    rows = []
    for n in SIZES:
        for seed in SEEDS:
            x, state = sample_uniform_state(n, PrngStream.from_int(seed))
            basis = basis_of(state)
            family = sample_circuit_family.__wrapped__(basis)
            out = cc_owf(x, n)
            row = {
                "n": n,
                "seed": seed,
                "prng_head": PrngStream.from_int(seed).read(16).hex(),
                "x": bits_to_bytes(x).hex(),
                "basis_seed": hashlib.sha256(canonical_basis_bytes(basis)).hexdigest(),
                "family_sha256": hashlib.sha256(encode_circuit_family(family)).hexdigest(),
                "y": out.y,
                "y_prime_sha256": hashlib.sha256(out.y_prime).hexdigest(),
            }
            if n <= 6:
                row["y_prime"] = out.y_prime.hex()
            rows.append(row)
    return rows


if __name__ == "__main__":
    print(json.dumps(compute(), indent=1, sort_keys=True))
