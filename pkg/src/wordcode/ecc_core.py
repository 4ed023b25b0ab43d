"""Whole-code assembly: split, RS residue, inner multiply, concatenate.

A level-1 code carries the full pipeline for one word size: the split
into 5 interleaved words, the packed Reed-Solomon residue over P, and
the distance-amplifying multiplier on every residue slot.  A level-2
code drops the multiplier and instead runs a complete level-1 code,
built for the tiny word size B+1, over each residue slot; that trades
constant-time encoding for a construction whose ledger cost is o(w).

Construction, encoding, and distance estimation are deterministic.
Ledger charges for the construction-time searches are closed forms in
the search outcome, so they never depend on kernel backend or thread
count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import (
    CodecFormatError,
    CodecVersionError,
    CodeValidationError,
    MultiplierError,
    MultiplierNotFoundError,
    ParameterError,
)
from .inner_mult import (
    DEFAULT_DELTA,
    DELTA_LADDER,
    InnerCode,
    find_multiplier,
    inner_encode,
    threshold_for,
)
from .numtheory import _prime_factors
from .outer_rs import (
    GeneratorPoly,
    RsParams,
    W_MAX,
    W_MIN,
    _derive_params_any,
    build_generator,
    rs_encode,
    split5,
)
from .wordram import (
    OpLedger,
    WideInt,
    unpack_fields,
    wide_or,
    wide_shl,
)

FORMAT_VERSION = 1

_DESCRIPTION_KEYS = {
    "version", "level", "w", "B", "P", "alpha", "r_deg", "S",
    "g_coeffs", "m", "delta_num", "delta_den", "inner",
}


@dataclass(frozen=True)
class EccCode:
    """A constructed code; immutable, shareable, value-comparable."""

    level: int
    params: RsParams
    gen: GeneratorPoly
    inner: InnerCode | None
    inner_ecc: "EccCode | None"
    codeword_bits: int
    delta_prime_bound: Fraction

    def __post_init__(self):
        if self.level == 1:
            ok = self.inner is not None and self.inner_ecc is None
        elif self.level == 2:
            ok = self.inner is None and self.inner_ecc is not None
        else:
            ok = False
        if not ok:
            raise ParameterError(
                f"level {self.level} code must carry exactly the matching "
                "inner stage"
            )

    @property
    def delta(self) -> Fraction:
        """The delta that parametrized the (innermost) multiplier search."""
        if self.level == 1:
            return self.inner.delta
        return self.inner_ecc.delta

    def guaranteed_min_bits(self) -> int:
        """Distance floor from the residue-weight and multiplier bounds."""
        if self.level == 1:
            return (self.params.r_deg + 1) * self.inner.threshold
        return (self.params.r_deg + 1) * self.inner_ecc.guaranteed_min_bits()


@dataclass(frozen=True)
class CostReport:
    """Ledger totals for one build, in model word operations at size w."""

    construction_ops: dict
    encode_ops: dict
    generator_ops: dict
    w: int

    def construction_total(self) -> int:
        return sum(self.construction_ops.values())

    def encode_total(self) -> int:
        return sum(self.encode_ops.values())

    def generator_total(self) -> int:
        return sum(self.generator_ops.values())

    def as_dict(self) -> dict:
        return {
            "w": self.w,
            "construction_ops": dict(self.construction_ops),
            "encode_ops": dict(self.encode_ops),
            "generator_ops": dict(self.generator_ops),
        }


# ---------------------------------------------------------------------------
# Construction


def _trial_division_steps(n: int) -> int:
    # Mirrors the is_prime loop shape so the charge tracks its work.
    if n % 2 == 0:
        return 1
    steps = 1
    d = 3
    while d * d <= n:
        steps += 1
        if n % d == 0:
            break
        d += 2
    return steps


def _charge_param_search(p: RsParams, ledger: OpLedger):
    """Model cost of the prime scan and the primitive-root search.

    Both searches run on host integers; the ledger charge reconstructs
    the count of model-word multiply/compare steps they correspond to,
    as a deterministic function of the parameters found.
    """
    for n in range(1 << p.B, p.P + 1):
        steps = _trial_division_steps(n)
        nw = ledger.words(n.bit_length())
        ledger.charge_counted("mul", steps, nw * nw)
        ledger.charge_counted("cmp", steps, nw)
    pw = ledger.words(p.P.bit_length())
    factors = _prime_factors(p.P - 1)
    for a in range(2, p.alpha + 1):
        for q in factors:
            exp_bits = ((p.P - 1) // q).bit_length()
            # Square-and-multiply with a reduction per step.
            ledger.charge_counted("mul", 2 * exp_bits, pw * pw)


def _resolve_delta(b: int, delta) -> Fraction:
    if delta is None:
        if b not in DEFAULT_DELTA:
            raise ParameterError(
                f"no inner code is searchable for {b}-bit symbols; "
                f"the word size needs a level-2 construction")
        return DEFAULT_DELTA[b]
    return Fraction(delta)


def _find_multiplier_reporting(b: int, delta: Fraction,
                               ledger: OpLedger) -> InnerCode:
    """Search; on failure, re-raise with the best achievable delta attached.

    "Achievable" is probed over the standard delta ladder, strongest
    first, so the reported fallback is always one a retry can use.
    """
    try:
        return find_multiplier(b, delta, ledger)
    except MultiplierNotFoundError:
        achievable = None
        for cand in DELTA_LADDER:
            if cand >= delta:
                continue
            try:
                find_multiplier(b, cand)
            except MultiplierError:
                continue
            achievable = cand
            break
        raise MultiplierNotFoundError(b, delta, achievable) from None


def _build(w: int, delta, level: int, ledger: OpLedger):
    params = _derive_params_any(w)
    _charge_param_search(params, ledger)
    before = ledger.as_dict()
    gen = build_generator(params, ledger)
    after = ledger.as_dict()
    generator_ops = {k: after[k] - before[k] for k in after}

    if level == 1:
        d = _resolve_delta(params.B, delta)
        ic = _find_multiplier_reporting(params.B, d, ledger)
        cw_bits = 5 * params.word_out_bits
        code = EccCode(
            level=1, params=params, gen=gen, inner=ic, inner_ecc=None,
            codeword_bits=cw_bits,
            delta_prime_bound=Fraction(
                (params.r_deg + 1) * ic.threshold, cw_bits),
        )
    else:
        inner_code, _ = _build(params.B + 1, delta, 1, ledger)
        cw_bits = 5 * params.out_slots * inner_code.codeword_bits
        code = EccCode(
            level=2, params=params, gen=gen, inner=None, inner_ecc=inner_code,
            codeword_bits=cw_bits,
            delta_prime_bound=Fraction(
                (params.r_deg + 1) * inner_code.guaranteed_min_bits(),
                cw_bits),
        )
    return code, generator_ops


def build_code(w: int, delta=None, level: int = 1):
    """Construct the code for word size w; returns (EccCode, CostReport).

    delta defaults to the frozen per-B table.  Level 2 recursively
    builds its inner stage as a level-1 code for word size B+1; the
    construction ledger covers both levels, charged at word size w.
    """
    if level not in (1, 2):
        raise ParameterError(f"level must be 1 or 2, got {level}")
    if not W_MIN <= w <= W_MAX:
        raise ParameterError(f"word size must be in [{W_MIN}, {W_MAX}], got {w}")
    ledger = OpLedger(w)
    code, generator_ops = _build(w, delta, level, ledger)
    probe = OpLedger(w)
    encode(code, WideInt(0, w), probe)
    report = CostReport(
        construction_ops=ledger.as_dict(),
        encode_ops=probe.as_dict(),
        generator_ops=generator_ops,
        w=w,
    )
    return code, report


# ---------------------------------------------------------------------------
# Encoding


def encode(code: EccCode, x, ledger: OpLedger | None = None) -> WideInt:
    """Map a w-bit word to its codeword_bits-bit codeword.

    Word 1 of the split lands in the least-significant position, slot 0
    of each word below its higher slots.
    """
    p = code.params
    if isinstance(x, int):
        if not 0 <= x < (1 << p.w):
            raise ParameterError(f"input must be in [0, 2^{p.w})")
        x = WideInt(x, p.w)
    elif x.bits > p.w:
        raise ParameterError(
            f"input of {x.bits} bits exceeds word size {p.w}")
    words = split5(x.extend(p.w), p, ledger)
    out_layout = p.out_layout()

    if code.level == 1:
        seg_bits = p.word_out_bits
        segments = []
        for wd in words:
            resid = rs_encode(wd, code.gen, p, ledger)
            segments.append(inner_encode(resid, code.inner, out_layout, ledger))
    else:
        inner = code.inner_ecc
        seg_bits = inner.codeword_bits
        segments = []
        for wd in words:
            resid = rs_encode(wd, code.gen, p, ledger)
            for v in unpack_fields(resid, out_layout, ledger):
                segments.append(encode(inner, WideInt(v, inner.params.w), ledger))

    acc = segments[0]
    for i, seg in enumerate(segments[1:], start=1):
        acc = wide_or(acc, wide_shl(seg, i * seg_bits, ledger), ledger)
    assert acc.bits == code.codeword_bits
    return acc


# ---------------------------------------------------------------------------
# Distance measurement


def _codeword_limb_count(code: EccCode) -> int:
    return -(-code.codeword_bits // 64)


def _to_limbs(value: int, limbs: int, out: np.ndarray, row: int):
    mask = (1 << 64) - 1
    for t in range(limbs):
        out[row, t] = (value >> (64 * t)) & mask


def _batch_encode(code: EccCode, keys: np.ndarray) -> np.ndarray:
    """Codewords of many keys as little-endian uint64 limb rows."""
    p = code.params
    limbs = _codeword_limb_count(code)
    if code.level == 1 and p.w <= 64:
        g = np.array(code.gen.coeffs, dtype=np.int64)
        return _kernels.batch_encode_small(
            keys, p.w, p.B, p.n_blocks, p.blocks_per_word, p.out_slots,
            p.S, p.P, code.inner.m, g, limbs)
    out = np.zeros((keys.shape[0], limbs), dtype=np.uint64)
    for row, k in enumerate(keys):
        _to_limbs(int(encode(code, int(k))), limbs, out, row)
    return out


def _sample_keys(rng, w: int, n: int) -> np.ndarray:
    if w <= 64:
        return rng.integers(0, 1 << w, size=n, dtype=np.uint64)
    # Wider words as object ints, composed from 64-bit draws.
    chunks = rng.integers(0, 1 << 64, size=(n, -(-w // 64)), dtype=np.uint64)
    vals = np.empty(n, dtype=object)
    top_mask = (1 << w) - 1
    for i in range(n):
        v = 0
        for t, c in enumerate(chunks[i]):
            v |= int(c) << (64 * t)
        vals[i] = v & top_mask
    return vals


def distance_report(code: EccCode, mode: str = "random",
                    samples: int = 100_000, seed: int = 0) -> dict:
    """Minimum codeword distance over checked pairs.

    exhaustive: all pairs of all 2^w inputs; only for w <= 12.
    random: `samples` pairs of distinct inputs from a seeded generator.

    Raises CodeValidationError if any checked pair lands below the
    construction's guaranteed floor, since that would disprove the code.
    """
    p = code.params
    if mode == "exhaustive":
        if p.w > 12:
            raise ParameterError(
                f"exhaustive distance scan caps at w=12, got w={p.w}")
        n = 1 << p.w
        keys = np.arange(n, dtype=np.uint64)
        limbs = _batch_encode(code, keys)
        min_bits = _kernels.min_pairwise_hamming(limbs)
        pairs = n * (n - 1) // 2
    elif mode == "random":
        if samples < 1:
            raise ParameterError("need at least one sample pair")
        rng = np.random.default_rng(seed)
        min_bits = 1 << 62
        pairs = 0
        chunk = 1 << 16
        remaining = samples
        while remaining > 0:
            take = min(chunk, remaining)
            xs = _sample_keys(rng, p.w, take)
            ys = _sample_keys(rng, p.w, take)
            dup = xs == ys
            while bool(np.any(dup)):
                ys[dup] = _sample_keys(rng, p.w, int(np.sum(dup)))
                dup = xs == ys
            d = int(_kernels.paired_min_hamming(
                _batch_encode(code, xs), _batch_encode(code, ys)))
            min_bits = min(min_bits, d)
            pairs += take
            remaining -= take
    else:
        raise ParameterError(f"mode must be 'exhaustive' or 'random', got {mode!r}")

    floor = code.guaranteed_min_bits()
    if min_bits < floor:
        raise CodeValidationError(
            f"pair at distance {min_bits} bits violates the guaranteed "
            f"floor {floor}"
        )
    return {
        "min_bits": min_bits,
        "min_relative": min_bits / code.codeword_bits,
        "pairs_checked": pairs,
    }


# ---------------------------------------------------------------------------
# Serialization


def _to_obj(code: EccCode) -> dict:
    p = code.params
    return {
        "version": FORMAT_VERSION,
        "level": code.level,
        "w": p.w,
        "B": p.B,
        "P": p.P,
        "alpha": p.alpha,
        "r_deg": p.r_deg,
        "S": p.S,
        "g_coeffs": list(code.gen.coeffs),
        "m": code.inner.m if code.level == 1 else None,
        "delta_num": code.delta.numerator,
        "delta_den": code.delta.denominator,
        "inner": _to_obj(code.inner_ecc) if code.level == 2 else None,
    }


def serialize(code: EccCode) -> bytes:
    return json.dumps(_to_obj(code), separators=(",", ":")).encode("ascii")


def _require(cond: bool, msg: str):
    if not cond:
        raise CodecFormatError(msg)


def _check_shape(obj) -> None:
    _require(isinstance(obj, dict), "code description must be an object")
    missing = _DESCRIPTION_KEYS - obj.keys()
    _require(not missing, f"missing fields: {sorted(missing)}")
    extra = obj.keys() - _DESCRIPTION_KEYS
    _require(not extra, f"unknown fields: {sorted(extra)}")
    for key in ("version", "level", "w", "B", "P", "alpha", "r_deg", "S",
                "delta_num", "delta_den"):
        _require(isinstance(obj[key], int) and not isinstance(obj[key], bool),
                 f"field {key!r} must be an integer")
    _require(isinstance(obj["g_coeffs"], list)
             and all(isinstance(c, int) and not isinstance(c, bool)
                     for c in obj["g_coeffs"]),
             "g_coeffs must be a list of integers")


def _from_obj(obj, expect_w: int | None) -> EccCode:
    _check_shape(obj)
    if obj["version"] != FORMAT_VERSION:
        raise CodecVersionError(
            f"unsupported description version {obj['version']}")
    level = obj["level"]
    _require(level in (1, 2), f"level must be 1 or 2, got {level}")
    w = obj["w"]

    def invalid(msg):
        return CodeValidationError(msg)

    if expect_w is None:
        if not W_MIN <= w <= W_MAX:
            raise invalid(f"word size {w} outside [{W_MIN}, {W_MAX}]")
    elif w != expect_w:
        raise invalid(f"inner word size {w} does not match outer B+1 = {expect_w}")

    try:
        params = _derive_params_any(w)
    except ParameterError as exc:
        raise invalid(str(exc)) from exc
    for key, actual in (("B", params.B), ("P", params.P),
                        ("alpha", params.alpha), ("r_deg", params.r_deg),
                        ("S", params.S)):
        if obj[key] != actual:
            raise invalid(
                f"stored {key}={obj[key]} but word size {w} derives {actual}")

    gen = build_generator(params)
    if tuple(obj["g_coeffs"]) != gen.coeffs:
        raise invalid("stored generator coefficients fail recomputation")

    if obj["delta_den"] == 0:
        raise CodecFormatError("delta_den must be nonzero")
    delta = Fraction(obj["delta_num"], obj["delta_den"])

    if level == 1:
        if obj["inner"] is not None:
            raise invalid("level 1 carries no nested inner code")
        if not isinstance(obj["m"], int) or isinstance(obj["m"], bool):
            raise CodecFormatError("level 1 requires an integer multiplier")
        try:
            ic = find_multiplier(params.B, delta)
        except (ParameterError, MultiplierError) as exc:
            raise invalid(f"multiplier re-validation failed: {exc}") from exc
        if ic.m != obj["m"]:
            raise invalid(
                f"stored multiplier {obj['m']} but search returns {ic.m}")
        cw_bits = 5 * params.word_out_bits
        return EccCode(
            level=1, params=params, gen=gen, inner=ic, inner_ecc=None,
            codeword_bits=cw_bits,
            delta_prime_bound=Fraction(
                (params.r_deg + 1) * ic.threshold, cw_bits),
        )

    if obj["m"] is not None:
        raise invalid("level 2 carries no multiplier of its own")
    if obj["inner"] is None:
        raise CodecFormatError("level 2 requires a nested inner code")
    inner_code = _from_obj(obj["inner"], expect_w=params.B + 1)
    if inner_code.delta != delta:
        raise invalid(
            f"outer delta {delta} does not match inner delta {inner_code.delta}")
    cw_bits = 5 * params.out_slots * inner_code.codeword_bits
    return EccCode(
        level=2, params=params, gen=gen, inner=None, inner_ecc=inner_code,
        codeword_bits=cw_bits,
        delta_prime_bound=Fraction(
            (params.r_deg + 1) * inner_code.guaranteed_min_bits(), cw_bits),
    )


def deserialize(data) -> EccCode:
    """Parse, then re-derive and re-verify every stored parameter."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CodecFormatError(f"not a text description: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise CodecFormatError(f"not a JSON description: {exc}") from exc
    return _from_obj(obj, expect_w=None)
