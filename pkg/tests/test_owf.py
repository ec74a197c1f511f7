import pytest
from hypothesis import given, settings, strategies as st

from gchowf.circuits import COMPUTATIONAL
from gchowf.encoding import decode_state, encode_state, sample_uniform_state
from gchowf.errors import OffBasisInput, UnsupportedSize
from gchowf.gch import GchState, basis_of, enumerate_bases, random_state_of_basis, states_of_basis
from gchowf.owf import (
    OwfOutput,
    _Skeleton,
    born_readout,
    cc_owf,
    eval_constituent,
    eval_family,
    eval_family_with,
    measured_count,
    off_basis_sample,
    output_length,
    sample_circuit_family,
    sample_constituent_circuit,
    seed_from_basis,
)
from gchowf.prng import PrngStream


def random_state(n, seed):
    return sample_uniform_state(n, PrngStream.from_int(seed))[1]


@pytest.mark.parametrize("n", [3, 2, 5, 0])
def test_unsupported_sizes(n):
    with pytest.raises(UnsupportedSize):
        cc_owf("0" * 12, n)


def test_output_length():
    assert [output_length(n) for n in (4, 6, 8, 10)] == [8, 24, 48, 80]
    with pytest.raises(ValueError):
        OwfOutput(4, "0" * 7, b"")


def test_family_sampling_is_a_pure_function_of_the_basis():
    b = basis_of(random_state(8, 1))
    first = sample_circuit_family.__wrapped__(b)
    again = sample_circuit_family.__wrapped__(b)
    assert first == again
    assert seed_from_basis(b).read(8) == seed_from_basis(b).read(8)


def test_family_structure():
    for seed in range(10):
        fam = sample_circuit_family(basis_of(random_state(6, seed)))
        assert len(fam.circuits) == 6
        for circ in fam.circuits:
            assert len(circ.layers) == 6
            assert len(circ.measured) == measured_count(6)
            for layer in circ.layers:
                ends = [q for g in layer.gates for q in (g.control, g.target)]
                assert len(ends) == len(set(ends))


def test_every_basis_at_n4_gets_a_family():
    for b in enumerate_bases(4):
        fam = sample_circuit_family(b)
        for s in states_of_basis(b):
            y = eval_family_with(fam, s)
            assert y == born_readout(fam, s)


def test_measurement_bases_match_labels():
    s = random_state(8, 4)
    fam = sample_circuit_family(basis_of(s))
    for circ in fam.circuits:
        bits, restored = eval_constituent(s, circ)
        assert restored == s
        for i, flag in enumerate(circ.measurement_basis):
            assert bits[2 * i] == ("0" if flag == COMPUTATIONAL else "1")


@settings(max_examples=30)
@given(seed=st.integers(0, 2**32), n=st.sampled_from([4, 6, 8, 10]))
def test_same_basis_states_share_the_family(seed, n):
    s = random_state(n, seed)
    t = random_state_of_basis(basis_of(s), PrngStream.from_int(seed + 1))
    a, b = eval_family(s), eval_family(t)
    assert a.circuit_bytes == b.circuit_bytes
    assert len(a.y) == len(b.y) == output_length(n)
    if s == t:
        assert a == b


def test_cc_owf_matches_eval_family():
    s = random_state(6, 3)
    out = cc_owf(encode_state(s), 6)
    assert out == eval_family(s)
    assert OwfOutput.from_bytes(out.y_prime, 6) == out


def test_y_prime_parsing_errors():
    with pytest.raises(ValueError):
        OwfOutput.from_bytes(b"", 4)
    with pytest.raises(ValueError):
        OwfOutput.from_bytes(b"\xff", 6)  # 24-bit y needs 3 bytes


def test_off_basis_state_rejected():
    s = GchState.product("0000")
    fam = sample_circuit_family(basis_of(GchState.product("++++")))
    with pytest.raises(OffBasisInput):
        eval_family_with(fam, s)


def test_off_basis_dense_sampling_is_defined():
    fam = sample_circuit_family(basis_of(GchState.product("++++")))
    s = GchState.product("0000")
    r = PrngStream.from_int(0)
    y = off_basis_sample(fam, s, r)
    assert len(y) == output_length(4)
    on = GchState.product("+-+-")
    assert off_basis_sample(fam, on, r) == eval_family_with(fam, on)


def test_skeleton_tracks_every_state_of_the_basis():
    # every gate the skeleton admits is compatible for each concrete state
    from gchowf.gch import is_compatible

    for b in enumerate_bases(4):
        skel = _Skeleton(b)
        for s in states_of_basis(b):
            for c in range(1, 5):
                for t in range(1, 5):
                    if c != t and skel.compatible(c, t):
                        assert is_compatible(s, c, t), (b, s, c, t)


def test_constituent_sampling_consumes_its_stream():
    b = basis_of(random_state(4, 0))
    s1, s2 = PrngStream.from_int(5), PrngStream.from_int(5)
    assert sample_constituent_circuit(b, s1) == sample_constituent_circuit(b, s2)
    assert s1.position == s2.position > 0


def test_off_basis_outputs_spread():
    fam = sample_circuit_family(basis_of(GchState.product("0000")))
    r = PrngStream.from_int(3)
    seen = {off_basis_sample(fam, GchState.product("++++"), r) for _ in range(1000)}
    assert len(seen) > 1


def test_n2_inputs_rejected():
    from gchowf.gch import enumerate_states

    for s in enumerate_states(2):
        with pytest.raises(UnsupportedSize):
            cc_owf(encode_state(s), 2)
