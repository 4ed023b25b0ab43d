"""Signature construction: greedy selection, evaluation, file formats."""

import json
import random

import pytest

from wordcode.ecc_core import build_code, encode
from wordcode.errors import CodecFormatError, DuplicateKeyError, ParameterError
from wordcode.sighash import (
    SignatureFn,
    build_signature,
    cap_constant,
    load_signature,
    position_cap,
    read_keys_file,
    save_signature,
    sig_eval,
    signature_from_obj,
    signature_to_obj,
    verify_injective,
    write_keys_file,
)
from wordcode.wordram import WideInt


def distinct_keys(rng, w, n):
    keys = set()
    while len(keys) < n:
        keys.add(rng.randrange(1 << w))
    return sorted(keys)


def test_single_key_no_positions():
    code, _ = build_code(16, None, 1)
    fn = build_signature(code, [5])
    assert fn.positions == ()
    assert fn.n == 1
    assert position_cap(code, 1) == 0
    sig = sig_eval(fn, 5)
    assert sig.bits == 0 and int(sig) == 0
    assert sig.to_hex() == ""
    assert verify_injective(fn, [5])


def test_two_keys_single_position():
    code, _ = build_code(16, None, 1)
    fn = build_signature(code, [0, 777])
    assert len(fn.positions) == 1
    assert verify_injective(fn, [0, 777])
    a, b = sig_eval(fn, 0), sig_eval(fn, 777)
    assert int(a) != int(b)


def test_duplicate_keys_rejected():
    code, _ = build_code(16, None, 1)
    with pytest.raises(DuplicateKeyError) as exc_info:
        build_signature(code, [1, 2, 3, 2, 5])
    err = exc_info.value
    assert (err.index_a, err.index_b) == (1, 3)
    assert err.key_hex == "0002"
    # WideInt and int spellings of the same key still collide.
    with pytest.raises(DuplicateKeyError):
        build_signature(code, [WideInt(9, 16), 9])


def test_rejects_bad_keys():
    code, _ = build_code(16, None, 1)
    with pytest.raises(ParameterError):
        build_signature(code, [])
    with pytest.raises(ParameterError):
        build_signature(code, [1 << 16])
    with pytest.raises(ParameterError):
        build_signature(code, [-1])
    with pytest.raises(ParameterError):
        build_signature(code, [WideInt(0, 17)])


def test_rejects_oversized_key_set():
    code, _ = build_code(16, None, 1)
    # 4473 keys make 10,001,628 pairs, just past the cap; the check
    # fires before any encoding happens.
    with pytest.raises(ParameterError):
        build_signature(code, range(4473))


def test_cap_constant_dominates_greedy_cap():
    import math

    code, _ = build_code(16, None, 1)
    c = cap_constant(code)
    assert c >= 3
    rng = random.Random(11)
    for n in [2, 3, 7] + [rng.randrange(2, 4000) for _ in range(40)]:
        assert position_cap(code, n) <= c * math.log2(n)


def test_injective_on_build_set():
    code, _ = build_code(16, None, 1)
    rng = random.Random(2026)
    keys = distinct_keys(rng, 16, 300)
    fn = build_signature(code, keys)
    assert verify_injective(fn, keys)
    assert len(fn.positions) <= position_cap(code, 300)
    sigs = [int(sig_eval(fn, k)) for k in keys]
    assert len(set(sigs)) == 300


def test_eval_total_and_deterministic():
    code, _ = build_code(16, None, 1)
    fn = build_signature(code, [1, 2, 3])
    outsider = 60000
    once = sig_eval(fn, outsider)
    again = sig_eval(fn, outsider)
    assert once == again
    assert once.bits == len(fn.positions)


def test_eval_matches_codeword_bits():
    code, _ = build_code(16, None, 1)
    rng = random.Random(3)
    keys = distinct_keys(rng, 16, 40)
    fn = build_signature(code, keys)
    for k in keys[:10]:
        cw = encode(code, k)
        sig = sig_eval(fn, k)
        for j, pos in enumerate(fn.positions):
            assert sig.bit(j) == cw.bit(pos)


def test_verify_rejects_handmade_non_injective():
    code, _ = build_code(16, None, 1)
    bogus = SignatureFn(code, (), 2)
    assert verify_injective(bogus, [0, 1]) is False


def test_greedy_deterministic():
    code, _ = build_code(16, None, 1)
    keys = distinct_keys(random.Random(8), 16, 100)
    assert build_signature(code, keys) == build_signature(code, keys)


def test_level2_code_signature():
    code, _ = build_code(16, None, 2)
    keys = distinct_keys(random.Random(4), 16, 40)
    fn = build_signature(code, keys)
    assert verify_injective(fn, keys)


def test_signature_round_trip(tmp_path):
    code, _ = build_code(16, None, 1)
    keys = distinct_keys(random.Random(5), 16, 60)
    fn = build_signature(code, keys)
    again = signature_from_obj(signature_to_obj(fn))
    assert again == fn
    path = tmp_path / "sig.json"
    save_signature(path, fn)
    assert load_signature(path) == fn


def test_signature_obj_rejects_malformed():
    code, _ = build_code(16, None, 1)
    fn = build_signature(code, [1, 2])
    obj = signature_to_obj(fn)
    with pytest.raises(CodecFormatError):
        signature_from_obj([])
    bad = dict(obj)
    del bad["positions"]
    with pytest.raises(CodecFormatError):
        signature_from_obj(bad)
    bad = dict(obj)
    bad["version"] = 9
    with pytest.raises(CodecFormatError):
        signature_from_obj(bad)
    bad = dict(obj)
    bad["positions"] = [code.codeword_bits]
    with pytest.raises(CodecFormatError):
        signature_from_obj(bad)
    bad = dict(obj)
    bad["n"] = 0
    with pytest.raises(CodecFormatError):
        signature_from_obj(bad)


def test_keys_file_round_trip(tmp_path):
    path = tmp_path / "keys.txt"
    vals = [0, 1, 65535, 4660]
    write_keys_file(path, vals, 16)
    text = path.read_text()
    assert "1234" in text and "ffff" in text
    assert read_keys_file(path, 16) == vals


def test_keys_file_ignores_blank_lines(tmp_path):
    path = tmp_path / "keys.txt"
    path.write_text("0001\n\n0002\n\n\n0003\n")
    assert read_keys_file(path, 16) == [1, 2, 3]


def test_keys_file_rejects_bad_lines(tmp_path):
    path = tmp_path / "keys.txt"
    for bad in ("abc\n", "ABCD\n", "12g4\n", "12345\n"):
        path.write_text(bad)
        with pytest.raises(ParameterError):
            read_keys_file(path, 16)
    # Right digit count but above 2^w.
    path.write_text("fff\n")
    with pytest.raises(ParameterError):
        read_keys_file(path, 10)
