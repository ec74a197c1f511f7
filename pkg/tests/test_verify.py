import numpy as np
import pytest

from gchowf import statevector as sv
from gchowf.encoding import decode_state, encode_circuit_family, encode_state, sample_uniform_state
from gchowf.errors import DimensionMismatch, TooLarge
from gchowf.gch import basis_of, enumerate_states
from gchowf.owf import OwfOutput, cc_owf, sample_circuit_family
from gchowf.prng import PrngStream
from gchowf import verify


def test_raw_scan_matches_enumeration_small_n():
    for n in (1, 2, 3):
        assert sorted(verify.iter_valid_encodings_raw(n)) == sorted(encode_state(s) for s in enumerate_states(n))


def test_brute_force_invert_finds_planted_input():
    r = PrngStream.from_int(3)
    for _ in range(10):
        x, _ = sample_uniform_state(4, r)
        out = cc_owf(x, 4)
        hits = verify.brute_force_invert(out, 4)
        assert x in hits
        assert all(cc_owf(h, 4) == out for h in hits)
        assert hits == sorted(hits, key=lambda e: (len(e), e))


def test_invert_caps():
    out = cc_owf(sample_uniform_state(6, PrngStream.from_int(1))[0], 6)
    with pytest.raises(TooLarge):
        verify.brute_force_invert(out, 6)
    assert all(cc_owf(h, 6) == out for h in verify.brute_force_invert(out, 6, cap=50))


def test_invert_unreachable_output():
    out = cc_owf(sample_uniform_state(4, PrngStream.from_int(1))[0], 4)
    bogus = OwfOutput(4, "1" * 8 if out.y != "1" * 8 else "0" * 8, out.circuit_bytes)
    hits = verify.brute_force_invert(bogus, 4)
    assert all(cc_owf(h, 4).y_prime == bogus.y_prime for h in hits)


def test_census_n4():
    c = verify.collision_census(4)
    assert (c.inputs, c.outputs, c.collisions, c.cross_basis_collisions) == (532, 308, 296, 0)
    assert '"cross_basis_collisions": 0' in c.to_json()
    assert "inputs=532" in c.to_text()
    assert sum(row["inputs"] for row in c.per_basis.values()) == 532


def test_census_size_limit():
    with pytest.raises(TooLarge):
        verify.collision_census(6)


def test_reductions_small_sample():
    inst = verify.algorithm1_instance(4)
    r = PrngStream.from_int(4)
    for _ in range(10):
        x, s = sample_uniform_state(4, r)
        y = inst(x)
        psi = verify.reduction_thm1(verify.exhaustive_inverter, inst, y)
        assert psi is not None and inst.f2(psi) == y
        fam = sample_circuit_family(basis_of(s))
        got = verify.reduction_thm3(fam, y.y, verify.exhaustive_inverter)
        assert got is not None and basis_of(got) == basis_of(s)


def test_reductions_report_failure():
    def useless(n, out):
        return None

    def liar(n, out):
        return encode_state(enumerate_states(4)[0])

    inst = verify.algorithm1_instance(4)
    x = sample_uniform_state(4, PrngStream.from_int(6))[0]
    y = inst(x)
    assert verify.reduction_thm1(useless, inst, y) is None
    if inst(liar(4, y)) != y:
        assert verify.reduction_thm1(liar, inst, y) is None
    fam = sample_circuit_family(basis_of(decode_state(x, 4)))
    assert verify.reduction_thm3(fam, y.y, useless) is None


def test_reverse_attack_on_bell_circuit():
    u = [("h", 1), ("cx", 1, 2)]
    guess = verify.reverse_circuit_attack(u, "11")
    assert verify.outcome_probability(u, guess, {1: 1, 2: 1}) == pytest.approx(1.0)
    # CX maps |11> to |10>, H then gives |-0>
    expected = np.kron([1, -1], [1, 0]) / np.sqrt(2)
    assert sv.equal_up_to_phase(guess.amplitudes, expected)


def test_substitute_attack_partial():
    u = [("cx", 1, 2)]
    guess = verify.substitute_attack(u, {2: 1}, 2)
    assert verify.outcome_probability(u, guess, {2: 1}) == pytest.approx(1.0)


def test_attack_argument_checks():
    with pytest.raises(DimensionMismatch):
        verify.reverse_circuit_attack([("cx", 1, 3)], "00")
    with pytest.raises(DimensionMismatch):
        verify.reverse_circuit_attack([], "")
    with pytest.raises(DimensionMismatch):
        verify.substitute_attack([], {3: 0}, 2)
    with pytest.raises(ValueError):
        verify.attack_trials("guess", 1, PrngStream.from_int(0))


@pytest.mark.parametrize("method", ["reverse", "substitute"])
def test_attack_trials_small(method):
    assert verify.attack_trials(method, 50, PrngStream.from_int(2), 4) == 1.0


def test_size_profile_shape():
    rows = verify.size_profile([4, 8], seed=1)
    assert [r["n"] for r in rows] == [4, 8]
    for r in rows:
        assert r["gates"] <= r["bound"]
        assert r["layers"] == [r["n"]] * r["n"]
    with pytest.raises(TooLarge):
        verify.size_profile([34])
