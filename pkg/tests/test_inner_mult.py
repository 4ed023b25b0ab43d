"""Inner multiplier code: search, verification, encoding."""

import math
from fractions import Fraction

import pytest

from wordcode.errors import (
    ImpossibleThresholdError,
    LayoutError,
    MultiplierNotFoundError,
    ParameterError,
)
from wordcode.inner_mult import (
    DEFAULT_DELTA,
    DELTA_LADDER,
    InnerCode,
    find_multiplier,
    inner_encode,
    pair_min_distance,
    threshold_for,
)
from wordcode.wordram import FieldLayout, OpLedger, WideInt, pack_fields, unpack_fields


def distance_oracle(m, b):
    """Exhaustive pair scan in plain ints, no early exit."""
    out_mask = (1 << (4 * (b + 1))) - 1
    codes = [(a * m) & out_mask for a in range(1 << (b + 1))]
    best = 1 << 30
    for i in range(len(codes) - 1):
        for j in range(i + 1, len(codes)):
            best = min(best, bin(codes[i] ^ codes[j]).count("1"))
    return best


def search_oracle(b, t):
    """First multiplier passing the oracle distance, scanning from 1."""
    for m in range(1, 1 << (3 * (b + 1))):
        if distance_oracle(m, b) >= t:
            return m
    return None


# Search results at delta = 1/2, frozen after the first full run.
FROZEN_MULTIPLIERS = {
    3: 3,
    4: 3,
    5: 23,
    6: 29,
    7: 185,
    8: 185,
    9: 2669,
    10: 2807,
}


def test_threshold_for():
    assert threshold_for(6, Fraction(1, 2)) == 3
    assert threshold_for(10, Fraction(1, 3)) == 4
    assert threshold_for(4, 1) == 4


def test_pair_min_distance_matches_oracle():
    for b in (3, 4):
        for m in (1, 3, 13, 19, 255):
            assert pair_min_distance(m, b) == distance_oracle(m, b)


def test_pair_min_distance_rejects_bad_args():
    with pytest.raises(ParameterError):
        pair_min_distance(3, 11)
    with pytest.raises(ParameterError):
        pair_min_distance(0, 4)
    with pytest.raises(ParameterError):
        pair_min_distance(1 << 15, 4)


def test_frozen_multiplier_table():
    for b, expected in FROZEN_MULTIPLIERS.items():
        ic = find_multiplier(b, Fraction(1, 2))
        assert ic.m == expected
        assert ic.threshold == math.ceil(b / 2)
        assert ic.delta == Fraction(1, 2)
        assert ic.out_bits == 4 * (b + 1)


def test_found_multiplier_passes_exhaustive_oracle():
    for b in (4, 6):
        ic = find_multiplier(b, DEFAULT_DELTA[b])
        assert distance_oracle(ic.m, b) >= ic.threshold


def test_returned_multiplier_is_smallest():
    for b in (3, 4, 5):
        ic = find_multiplier(b, Fraction(1, 2))
        assert ic.m == search_oracle(b, ic.threshold)


def test_default_delta_is_top_of_ladder():
    assert DELTA_LADDER[0] == Fraction(1, 2)
    assert max(DELTA_LADDER) == Fraction(1, 2)
    for b in (3, 4, 5, 6, 7, 8):
        assert DEFAULT_DELTA[b] == Fraction(1, 2)
        find_multiplier(b, DEFAULT_DELTA[b])


def test_impossible_threshold_rejected():
    # ceil(6*4) = 24 bits demanded of a 20-bit code.
    with pytest.raises(ImpossibleThresholdError):
        find_multiplier(4, 6)


def test_search_exhaustion_raises_not_found():
    # 15 of 16 bits at b=3 is out of reach of any multiplier.
    with pytest.raises(MultiplierNotFoundError) as exc_info:
        find_multiplier(3, 5)
    err = exc_info.value
    assert err.bits == 3
    assert err.delta == Fraction(5)
    assert err.achievable is None


def test_find_multiplier_rejects_bad_args():
    with pytest.raises(ParameterError):
        find_multiplier(0, Fraction(1, 2))
    with pytest.raises(ParameterError):
        find_multiplier(11, Fraction(1, 2))
    with pytest.raises(ParameterError):
        find_multiplier(4, 0)
    with pytest.raises(ParameterError):
        find_multiplier(4, Fraction(-1, 2))


def test_find_multiplier_deterministic():
    a = find_multiplier(6, Fraction(1, 2))
    b = find_multiplier(6, Fraction(1, 2))
    assert a == b


def test_scan_same_result_with_threads(monkeypatch):
    monkeypatch.setenv("WORDCODE_THREADS", "4")
    for b in (4, 6, 7):
        assert find_multiplier(b, Fraction(1, 2)).m == FROZEN_MULTIPLIERS[b]


def test_search_charges_closed_form():
    # b=4 finds m=3: three candidates scanned, each charged at the full
    # pair count regardless of how the kernel actually early-exits.
    led = OpLedger(64)
    find_multiplier(4, Fraction(1, 2), led)
    pairs = 32 * 31 // 2
    assert led.mul == 3 * 32
    assert led.bitwise == 3 * pairs
    assert led.cmp == 3 * pairs
    assert led.add == led.sub == led.shift == 0


def test_inner_encode_zero():
    ic = InnerCode(4, 13, Fraction(1, 2), 2)
    layout = FieldLayout(20, 2, 5)
    out = inner_encode(WideInt(0, 40), ic, layout)
    assert int(out) == 0
    assert out.bits == 40


def test_inner_encode_pinned_slots():
    ic = InnerCode(4, 13, Fraction(1, 2), 2)
    layout = FieldLayout(20, 2, 5)
    word = pack_fields([6, 15], layout)
    out = inner_encode(word, ic, layout)
    wide = FieldLayout(20, 2, 20)
    assert unpack_fields(out, wide) == [78, 195]


def test_inner_encode_matches_per_slot_oracle():
    import random
    rng = random.Random(20260817)
    ic = find_multiplier(6, Fraction(1, 2))
    layout = FieldLayout(30, 6, 7)
    wide = FieldLayout(30, 6, 28)
    for _ in range(200):
        vals = [rng.randrange(128) for _ in range(6)]
        out = inner_encode(pack_fields(vals, layout), ic, layout)
        assert unpack_fields(out, wide) == [v * ic.m for v in vals]
        assert out.bits == layout.total_bits


def test_inner_encode_rejects_narrow_layout():
    ic = InnerCode(6, 29, Fraction(1, 2), 3)
    with pytest.raises(LayoutError):
        inner_encode(WideInt(0, 40), ic, FieldLayout(20, 2, 5))


def test_inner_encode_rejects_oversized_word():
    ic = InnerCode(4, 13, Fraction(1, 2), 2)
    with pytest.raises(LayoutError):
        inner_encode(WideInt(0, 60), ic, FieldLayout(20, 2, 5))


def test_inner_encode_cost_value_independent():
    ic = InnerCode(6, 29, Fraction(1, 2), 3)
    layout = FieldLayout(30, 6, 7)
    seen = set()
    for vals in ([0] * 6, [127] * 6, [5, 0, 99, 1, 2, 3]):
        led = OpLedger(64)
        inner_encode(pack_fields(vals, layout), ic, layout, led)
        seen.add(tuple(sorted(led.as_dict().items())))
    assert len(seen) == 1
    (only,) = seen
    # One 3x1-word multiply plus a mask over the 201-bit product.
    assert dict(only) == {"add": 0, "sub": 0, "mul": 3, "shift": 0,
                          "bitwise": 4, "cmp": 0}
