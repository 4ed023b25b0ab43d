"""Outer Reed-Solomon layer over the prime field just above 2^B.

A w-bit key is cut into n_blocks pieces of B = ceil(log2 w) bits (most
significant block first, zero-padded at the tail) and dealt round-robin
into 5 packed words, so that each word carries every fifth block.  Each
word is then encoded as a polynomial over GF(P): multiplying the packed
word by the packed generator z_r is exactly polynomial convolution, and
one parallel_mod pass reduces every coefficient.  Encoding therefore
costs a constant number of whole-word operations regardless of how many
blocks a word carries.

The generator g(gamma) = (gamma - alpha)(gamma - alpha^2)...(gamma -
alpha^r_deg) makes every nonzero multiple have at least r_deg + 1
nonzero coefficients (BCH bound), which is where the outer distance
comes from; min_weight_multiple_check measures that bound directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .numtheory import FieldPrime, PrimitiveRoot, find_field_prime, find_primitive_root
from .wordram import (
    FieldLayout,
    OpLedger,
    WideInt,
    _reciprocal_any_width,
    div_by_const,
    pack_fields,
    parallel_mod,
    unpack_fields,
    wide_mul,
)

W_MIN = 10
W_MAX = 8192
_W_INTERNAL_MIN = 4


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


@dataclass(frozen=True)
class RsParams:
    """Everything derived from the word size w."""

    w: int
    B: int
    prime: FieldPrime
    root: PrimitiveRoot
    n_blocks: int
    blocks_per_word: int
    r_deg: int
    S: int
    out_slots: int

    @property
    def P(self) -> int:
        return self.prime.P

    @property
    def alpha(self) -> int:
        return self.root.alpha

    @property
    def word_in_bits(self) -> int:
        return self.blocks_per_word * self.S

    @property
    def word_out_bits(self) -> int:
        return self.out_slots * self.S

    def msg_layout(self) -> FieldLayout:
        return FieldLayout(self.S, self.blocks_per_word, self.B)

    def out_layout(self) -> FieldLayout:
        """Slots holding field elements in [0, P)."""
        return FieldLayout(self.S, self.out_slots, self.B + 1)

    def conv_value_bound(self) -> int:
        terms = max(self.blocks_per_word, self.r_deg) + 1
        return 2 * (self.B + 1) + _ceil_log2(terms)

    def conv_layout(self) -> FieldLayout:
        """Slots wide enough for raw convolution sums, pre-reduction."""
        return FieldLayout(self.S, self.out_slots, self.conv_value_bound())


def _derive_params_any(w: int) -> RsParams:
    """Parameter derivation without the public word-size gate; the
    level-2 construction recurses into word sizes as small as 5."""
    if w < _W_INTERNAL_MIN:
        raise ParameterError(f"word size {w} below internal minimum {_W_INTERNAL_MIN}")
    b = (w - 1).bit_length()
    prime = find_field_prime(b)
    root = find_primitive_root(prime.P)
    n_blocks = -(-w // b)
    bpw = -(-n_blocks // 5)
    r_deg = -(-w // (5 * b))
    s = max(5 * b, 4 * (b + 1))
    out_slots = bpw + r_deg
    params = RsParams(w, b, prime, root, n_blocks, bpw, r_deg, s, out_slots)
    if r_deg < 1:
        raise ParameterError(f"r_deg must be at least 1, got {r_deg}")
    if params.conv_value_bound() > s:
        raise ParameterError(
            f"slot stride {s} cannot hold convolution sums "
            f"({params.conv_value_bound()} bits) at w={w}"
        )
    if bpw + r_deg > prime.P - 1:
        raise ParameterError(
            f"code length {bpw + r_deg} exceeds cyclic bound P-1 = {prime.P - 1} at w={w}"
        )
    return params


def derive_params(w: int) -> RsParams:
    if not W_MIN <= w <= W_MAX:
        raise ParameterError(f"word size must be in [{W_MIN}, {W_MAX}], got {w}")
    return _derive_params_any(w)


# ---------------------------------------------------------------------------
# split5


class _SplitPlan:
    """Masks and shifts for the 5-way block deal, built once per params.

    Reading blocks most-significant-first while keeping slot 0 = the
    word's first block means the natural comb extraction would deliver
    the blocks in reversed order; a log2(n_blocks)-round block-reversal
    butterfly fixes the order with shifts and masks only, after which
    every word is one comb mask and one shift.
    """

    __slots__ = ("pad", "width", "rounds", "drop", "combs", "block_count2")

    def __init__(self, p: RsParams):
        if p.blocks_per_word > 1 and p.S != 5 * p.B:
            raise ParameterError(
                f"slot stride {p.S} incompatible with 5-block comb at B={p.B}"
            )
        nb, b = p.n_blocks, p.B
        n2 = 1 << _ceil_log2(max(nb, 1))
        self.block_count2 = n2
        self.pad = nb * b - p.w
        self.width = n2 * b
        self.drop = (n2 - nb) * b
        rounds = []
        half = 1
        while half < n2:
            g = b * half
            mask = 0
            period = 2 * g
            low = (1 << g) - 1
            for start in range(0, self.width, period):
                mask |= low << start
            rounds.append((g, mask))
            half *= 2
        self.rounds = tuple(rounds)
        block_mask = (1 << b) - 1
        combs = []
        for i in range(5):
            comb = 0
            j = i
            while j < nb:
                comb |= block_mask << (j * b)
                j += 5
            combs.append(comb)
        self.combs = tuple(combs)


@lru_cache(maxsize=64)
def _split_plan(p: RsParams) -> _SplitPlan:
    return _SplitPlan(p)


def split5(x: WideInt, p: RsParams, ledger: OpLedger | None = None):
    """Deal the blocks of x into 5 packed words, slot stride S.

    Word i (1-based) holds blocks b_i, b_{i+5}, ... with slot 0 = b_i;
    blocks past n_blocks read as zero.  Cost: a shared O(log n_blocks)
    reversal prologue per key, then two ops (mask, shift) per word.
    """
    if x.bits > p.w:
        raise ParameterError(f"key of {x.bits} bits exceeds w={p.w}")
    plan = _split_plan(p)
    v = x.value << plan.pad
    if ledger is not None:
        ledger.charge_shift(p.w, plan.pad)
    for g, mask in plan.rounds:
        v = ((v >> g) & mask) | ((v & mask) << g)
        if ledger is not None:
            ledger.charge_shift(plan.width)
            ledger.charge_bitwise(plan.width)
            ledger.charge_bitwise(plan.width)
            ledger.charge_shift(plan.width - g, g)
            ledger.charge_bitwise(plan.width)
    if plan.drop:
        v >>= plan.drop
        if ledger is not None:
            ledger.charge_shift(plan.width)
    words = []
    b = p.B
    for i in range(5):
        # Comb stride is 5B, which equals S whenever a word carries more
        # than one block (checked in the plan); single-block words land
        # wholly in slot 0 either way.
        wv = (v & plan.combs[i]) >> (i * b)
        if ledger is not None:
            ledger.charge_bitwise(plan.width)
            ledger.charge_shift(plan.width)
        words.append(WideInt(wv, p.word_in_bits))
    return tuple(words)


def split5_reassemble(words, p: RsParams) -> WideInt:
    """Inverse of split5; test and audit helper, not on the encode path."""
    blocks = [0] * p.n_blocks
    layout = p.msg_layout()
    for i, word in enumerate(words):
        for t, val in enumerate(unpack_fields(word, layout)):
            j = i + 5 * t
            if j < p.n_blocks:
                blocks[j] = val
            elif val:
                raise ParameterError(f"nonzero phantom block {j} in word {i + 1}")
    acc = 0
    for val in blocks:
        acc = (acc << p.B) | val
    return WideInt(acc >> (p.n_blocks * p.B - p.w), p.w)


# ---------------------------------------------------------------------------
# Generator polynomial


@dataclass(frozen=True)
class GeneratorPoly:
    """Coefficients of prod_{i=1..r_deg} (gamma - alpha^i) mod P.

    coeffs[i] is the coefficient of gamma^i, each in [0, P); z_packed
    carries the same values at slot stride S.
    """

    coeffs: tuple
    z_packed: WideInt


def _gen_layout(p: RsParams) -> FieldLayout:
    return FieldLayout(p.S, p.r_deg + 1, 2 * (p.B + 1) + 1)


def build_generator(p: RsParams, ledger: OpLedger | None = None) -> GeneratorPoly:
    """Expand the generator by iterated packed monomial multiplication.

    Each step wide-multiplies the packed polynomial by the packed
    monomial (gamma - alpha^i) — coefficients [P - alpha^i, 1] — and
    immediately parallel_mods the convolution back below P.  Powers of
    alpha advance incrementally with one multiply and one reciprocal
    reduction per step, so the whole build charges O(r_deg) whole-word
    operations.
    """
    prime_p, alpha, r = p.P, p.alpha, p.r_deg
    coeff_layout = FieldLayout(p.S, 2, p.B + 1)
    gen_layout = _gen_layout(p)
    slot_cap = 1 << gen_layout.value_bound
    pow_rec = _reciprocal_any_width(prime_p, 2 * prime_p.bit_length())
    z = pack_fields([prime_p - alpha, 1], coeff_layout, ledger)
    z = z.extend(gen_layout.total_bits)
    a_i = alpha
    for _ in range(2, r + 1):
        if ledger is not None:
            ledger.charge_mul(prime_p.bit_length(), prime_p.bit_length())
        a_i = div_by_const(a_i * alpha, pow_rec, ledger)[1]
        mono = pack_fields([prime_p - a_i, 1], coeff_layout, ledger)
        raw = wide_mul(z, mono, ledger)
        for slot in unpack_fields(raw, FieldLayout(p.S, r + 2, p.S)):
            if slot >= slot_cap:
                raise ParameterError(
                    f"convolution slot value {slot} overflows the "
                    f"{gen_layout.value_bound}-bit bound: stride invariant broken"
                )
        z = parallel_mod(raw, gen_layout, prime_p, ledger)
    coeffs = tuple(unpack_fields(z, gen_layout))
    if coeffs[r] != 1:
        raise ParameterError(f"generator is not monic: leading slot {coeffs[r]}")
    return GeneratorPoly(coeffs, z)


# ---------------------------------------------------------------------------
# Encoding


def rs_encode(x_word: WideInt, g: GeneratorPoly, p: RsParams,
              ledger: OpLedger | None = None) -> WideInt:
    """f_1: multiply the packed message word by z_r, reduce mod P.

    The integer product is the polynomial convolution of message slots
    with generator slots; parallel_mod leaves each of the out_slots
    coefficients in [0, P).  Two charged operations regardless of how
    many slots the word has.
    """
    prod = wide_mul(x_word, g.z_packed, ledger)
    return parallel_mod(prod, p.conv_layout(), p.P, ledger)


def min_weight_multiple_check(g: GeneratorPoly, p: RsParams,
                              mode: str = "exhaustive",
                              samples: int = 100_000,
                              seed: int = 0) -> int:
    """Minimal count of nonzero coefficients over nonzero multiples of g.

    Messages are polynomials of degree < blocks_per_word over GF(P);
    their products with g are what rs_encode emits, so this is a direct
    measurement of the outer code's distance.  The result must reach
    r_deg + 1 (BCH bound for consecutive-power roots); falling short
    would mean the field arithmetic is broken, and raises.
    """
    prime_p, bpw, out_len = p.P, p.blocks_per_word, p.out_slots
    if mode == "exhaustive":
        count = prime_p**bpw
        if count > 1 << 20:
            raise ParameterError(
                f"P^blocks_per_word = {count} messages is past the exhaustive"
                f" cap 2^20; use mode='random'"
            )
        idx = np.arange(1, count, dtype=np.int64)
        msgs = np.empty((count - 1, bpw), dtype=np.int64)
        for j in range(bpw):
            msgs[:, j] = (idx // prime_p**j) % prime_p
    elif mode == "random":
        if samples < 1:
            raise ParameterError(f"need at least one sample, got {samples}")
        rng = np.random.default_rng(seed)
        msgs = rng.integers(0, prime_p, size=(samples, bpw), dtype=np.int64)
        zero_rows = ~msgs.any(axis=1)
        while zero_rows.any():
            msgs[zero_rows] = rng.integers(
                0, prime_p, size=(int(zero_rows.sum()), bpw), dtype=np.int64
            )
            zero_rows = ~msgs.any(axis=1)
    else:
        raise ParameterError(f"unknown mode {mode!r}")

    gen = np.asarray(g.coeffs, dtype=np.int64)
    best = out_len + 1
    chunk = 1 << 16
    for lo in range(0, msgs.shape[0], chunk):
        part = msgs[lo:lo + chunk]
        conv = np.zeros((part.shape[0], out_len), dtype=np.int64)
        for j in range(bpw):
            for k, gk in enumerate(gen):
                conv[:, j + k] += part[:, j] * int(gk)
        weights = np.count_nonzero(conv % prime_p, axis=1)
        best = min(best, int(weights.min()))
    if best < p.r_deg + 1:
        raise ParameterError(
            f"observed multiple of weight {best}, below the BCH bound {p.r_deg + 1}"
        )
    return best
