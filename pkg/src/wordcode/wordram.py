"""Word-RAM primitives: wide integers, an operation ledger, packed fields.

The model machine has words of `w` bits, where `w` is a parameter of the
ledger and deliberately decoupled from the host word size.  A value of
`L` bits occupies words(L) = ceil(L / w) machine words, and every
operation is charged in machine words:

    add/sub/cmp/bitwise   max(words(a), words(b))
    mul                   words(a) * words(b)   (schoolbook)
    shift                 words(operand bits + bits shifted in)

Values are held as host Python integers inside `WideInt`, which pins an
explicit bit width so that charges depend only on declared widths, never
on the numeric value that happens to be stored.

The packed-field routines treat one wide integer as an array of fixed
width slots (slot 0 least significant).  `parallel_mod` reduces every
slot modulo a small prime with a constant number of whole-word
operations, using a precomputed reciprocal so that no division is ever
issued; `parallel_mod_reference` computes the same result one slot at a
time and exists as the independent slow route.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import LayoutError, ReciprocalError

RECIPROCAL_VALUE_BITS_MAX = 24


class WideInt:
    """Immutable unsigned integer with an explicit bit width.

    The width is part of the identity: WideInt(1, 8) != WideInt(1, 16).
    A width of zero is allowed and holds only the value zero.
    """

    __slots__ = ("value", "bits")

    def __init__(self, value: int, bits: int):
        if bits < 0:
            raise LayoutError(f"negative width {bits}")
        if value < 0 or value >> bits:
            raise LayoutError(f"value {value:#x} does not fit in {bits} bits")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, _value):
        raise AttributeError(f"WideInt is immutable, cannot set {name!r}")

    @classmethod
    def from_hex(cls, text: str, bits: int) -> "WideInt":
        return cls(int(text, 16), bits)

    def to_hex(self) -> str:
        digits = -(-self.bits // 4)
        return format(self.value, f"0{digits}x") if digits else ""

    def bit(self, i: int) -> int:
        if not 0 <= i < self.bits:
            raise LayoutError(f"bit index {i} outside width {self.bits}")
        return (self.value >> i) & 1

    def extend(self, bits: int) -> "WideInt":
        """Zero-extend to a larger declared width.  Free: no data moves."""
        if bits < self.bits:
            raise LayoutError(f"cannot extend {self.bits} bits down to {bits}")
        return WideInt(self.value, bits)

    def __int__(self) -> int:
        return self.value

    def __eq__(self, other) -> bool:
        if not isinstance(other, WideInt):
            return NotImplemented
        return self.value == other.value and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.value, self.bits))

    def __repr__(self) -> str:
        return f"WideInt({self.value:#x}, bits={self.bits})"


@dataclass
class OpLedger:
    """Counter of model operations, grouped by kind.

    `word_bits` is the model word size w.  The ledger never inspects
    operand values, only declared bit widths, so two runs over different
    inputs of the same shape always charge identically.
    """

    word_bits: int
    add: int = 0
    sub: int = 0
    mul: int = 0
    shift: int = 0
    bitwise: int = 0
    cmp: int = 0

    def __post_init__(self):
        if self.word_bits < 1:
            raise LayoutError(f"word size must be positive, got {self.word_bits}")

    def words(self, bits: int) -> int:
        return -(-bits // self.word_bits)

    def charge_add(self, bits_a: int, bits_b: int = 0):
        self.add += max(self.words(bits_a), self.words(bits_b))

    def charge_sub(self, bits_a: int, bits_b: int = 0):
        self.sub += max(self.words(bits_a), self.words(bits_b))

    def charge_mul(self, bits_a: int, bits_b: int):
        self.mul += self.words(bits_a) * self.words(bits_b)

    def charge_shift(self, bits_operand: int, bits_in: int = 0):
        self.shift += self.words(bits_operand + bits_in)

    def charge_bitwise(self, bits_a: int, bits_b: int = 0):
        self.bitwise += max(self.words(bits_a), self.words(bits_b))

    def charge_cmp(self, bits_a: int, bits_b: int = 0):
        self.cmp += max(self.words(bits_a), self.words(bits_b))

    def charge_counted(self, kind: str, count: int, word_units: int):
        """Post `count` operations of `word_units` words each in one go.

        Bulk accounting for construction-time searches, where posting
        billions of unit charges one call at a time is not practical.
        """
        if kind not in ("add", "sub", "mul", "shift", "bitwise", "cmp"):
            raise ValueError(f"unknown op kind {kind!r}")
        if count < 0 or word_units < 0:
            raise ValueError("counts must be non-negative")
        setattr(self, kind, getattr(self, kind) + count * word_units)

    def total(self) -> int:
        return self.add + self.sub + self.mul + self.shift + self.bitwise + self.cmp

    def as_dict(self) -> dict:
        return {
            "add": self.add,
            "sub": self.sub,
            "mul": self.mul,
            "shift": self.shift,
            "bitwise": self.bitwise,
            "cmp": self.cmp,
        }

    def copy(self) -> "OpLedger":
        return OpLedger(self.word_bits, **self.as_dict())


# ---------------------------------------------------------------------------
# Wide operations.  Every function takes an optional ledger; passing None
# computes the value without charging, which the construction-time code
# uses for building masks and other one-off constants.


def wide_add(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> WideInt:
    if ledger is not None:
        ledger.charge_add(a.bits, b.bits)
    return WideInt(a.value + b.value, max(a.bits, b.bits) + 1)


def wide_sub(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> WideInt:
    if b.value > a.value:
        raise ValueError("wide_sub underflow: subtrahend exceeds minuend")
    if ledger is not None:
        ledger.charge_sub(a.bits, b.bits)
    return WideInt(a.value - b.value, max(a.bits, b.bits))


def wide_mul(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> WideInt:
    if ledger is not None:
        ledger.charge_mul(a.bits, b.bits)
    return WideInt(a.value * b.value, a.bits + b.bits)


def wide_shl(a: WideInt, amount: int, ledger: OpLedger | None = None) -> WideInt:
    if amount < 0:
        raise ValueError(f"negative shift {amount}")
    if ledger is not None:
        ledger.charge_shift(a.bits, amount)
    return WideInt(a.value << amount, a.bits + amount)


def wide_shr(a: WideInt, amount: int, ledger: OpLedger | None = None) -> WideInt:
    if amount < 0:
        raise ValueError(f"negative shift {amount}")
    if ledger is not None:
        ledger.charge_shift(a.bits)
    return WideInt(a.value >> amount, max(a.bits - amount, 0))


def wide_and(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> WideInt:
    if ledger is not None:
        ledger.charge_bitwise(a.bits, b.bits)
    return WideInt(a.value & b.value, max(a.bits, b.bits))


def wide_or(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> WideInt:
    if ledger is not None:
        ledger.charge_bitwise(a.bits, b.bits)
    return WideInt(a.value | b.value, max(a.bits, b.bits))


def wide_xor(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> WideInt:
    if ledger is not None:
        ledger.charge_bitwise(a.bits, b.bits)
    return WideInt(a.value ^ b.value, max(a.bits, b.bits))


def wide_trunc(a: WideInt, bits: int, ledger: OpLedger | None = None) -> WideInt:
    """Keep the low `bits` bits.  Charged as one mask over the operand."""
    if bits < 0:
        raise LayoutError(f"negative width {bits}")
    if ledger is not None:
        ledger.charge_bitwise(a.bits)
    return WideInt(a.value & ((1 << bits) - 1), bits)


def wide_cmp(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> int:
    if ledger is not None:
        ledger.charge_cmp(a.bits, b.bits)
    if a.value == b.value:
        return 0
    return -1 if a.value < b.value else 1


def hamming(a: WideInt, b: WideInt, ledger: OpLedger | None = None) -> int:
    """Number of differing bits.  Operands must share a width.

    Charged as the single xor; the population count is treated as a free
    aggregate, the same convention the model uses for equality tests.
    """
    if a.bits != b.bits:
        raise LayoutError(f"width mismatch: {a.bits} vs {b.bits}")
    if ledger is not None:
        ledger.charge_bitwise(a.bits, b.bits)
    return (a.value ^ b.value).bit_count()


# ---------------------------------------------------------------------------
# Packed fields.


@dataclass(frozen=True)
class FieldLayout:
    """A wide integer viewed as `slot_count` slots of `slot_width` bits.

    Slot i occupies bits [i*slot_width, (i+1)*slot_width), slot 0 least
    significant.  Packed values are promised to be below 2**value_bound;
    the headroom between value_bound and slot_width is what lets whole
    word arithmetic act on all slots at once without carries leaking.
    """

    slot_width: int
    slot_count: int
    value_bound: int

    def __post_init__(self):
        if self.slot_width < 1:
            raise LayoutError(f"slot width must be positive, got {self.slot_width}")
        if self.slot_count < 0:
            raise LayoutError(f"negative slot count {self.slot_count}")
        if not 0 <= self.value_bound <= self.slot_width:
            raise LayoutError(
                f"value bound {self.value_bound} outside [0, slot width {self.slot_width}]"
            )

    @property
    def total_bits(self) -> int:
        return self.slot_width * self.slot_count


def pack_fields(values, layout: FieldLayout, ledger: OpLedger | None = None) -> WideInt:
    """Assemble slot values into one wide integer.  Linear cost in slots."""
    values = list(values)
    if len(values) != layout.slot_count:
        raise LayoutError(
            f"expected {layout.slot_count} values, got {len(values)}"
        )
    bound = 1 << layout.value_bound
    acc = 0
    for i, v in enumerate(values):
        if not 0 <= v < bound:
            raise LayoutError(f"slot {i} value {v} outside [0, {bound})")
        acc |= v << (i * layout.slot_width)
        if ledger is not None:
            if i:
                ledger.charge_shift(layout.value_bound, i * layout.slot_width)
            ledger.charge_bitwise(layout.total_bits)
    return WideInt(acc, layout.total_bits)


def unpack_fields(word: WideInt, layout: FieldLayout, ledger: OpLedger | None = None) -> list[int]:
    """Read all slot values back out.  Linear cost in slots."""
    if word.bits < layout.total_bits:
        raise LayoutError(
            f"word of {word.bits} bits shorter than layout ({layout.total_bits})"
        )
    mask = (1 << layout.slot_width) - 1
    out = []
    for i in range(layout.slot_count):
        if ledger is not None:
            ledger.charge_shift(word.bits)
            ledger.charge_bitwise(word.bits)
        out.append((word.value >> (i * layout.slot_width)) & mask)
    return out


# ---------------------------------------------------------------------------
# Reciprocal (division-free) modular reduction.


@dataclass(frozen=True)
class Reciprocal:
    """Magic constant pair (magic, shift) with floor(c*magic >> shift) ==
    c // divisor proven for every c below 2**value_bits."""

    divisor: int
    magic: int
    shift: int
    value_bits: int


def make_reciprocal(divisor: int, value_bits: int) -> Reciprocal:
    """Find the smallest shift k with M = ceil(2**k / divisor) exact on
    the whole validated range [0, 2**value_bits).

    The error term e = M*divisor - 2**k satisfies e*(2**value_bits - 1)
    < 2**k at the chosen k, which makes floor((c*M) / 2**k) == c//divisor
    for every c in range; the construction finishes with an exhaustive
    check of that fact, so a returned Reciprocal is trustworthy by
    brute force and not only by argument.
    """
    if divisor < 2:
        raise ReciprocalError(f"divisor must be at least 2, got {divisor}")
    if not 0 <= value_bits <= RECIPROCAL_VALUE_BITS_MAX:
        raise ReciprocalError(
            f"value_bits {value_bits} outside [0, {RECIPROCAL_VALUE_BITS_MAX}]"
        )
    top = (1 << value_bits) - 1
    cap = value_bits + 2 * divisor.bit_length() + 2
    found = None
    for k in range(1, cap + 1):
        magic = -(-(1 << k) // divisor)
        err = magic * divisor - (1 << k)
        if err * top < (1 << k):
            found = (magic, k)
            break
    if found is None:
        raise ReciprocalError(
            f"no shift up to {cap} is exact for divisor {divisor} over {value_bits} bits"
        )
    magic, k = found
    if (top * magic).bit_length() <= 63 and top > 0:
        c = np.arange(top + 1, dtype=np.uint64)
        ok = (c * np.uint64(magic)) >> np.uint64(k) == c // np.uint64(divisor)
        bad = int(np.argmin(ok)) if not ok.all() else None
    else:
        bad = next(
            (c for c in range(top + 1) if (c * magic) >> k != c // divisor),
            None,
        )
    if bad is not None:
        raise ReciprocalError(
            f"reciprocal for {divisor} failed exhaustive check at c={bad}"
        )
    return Reciprocal(divisor, magic, k, value_bits)


@lru_cache(maxsize=256)
def _reciprocal_any_width(divisor: int, value_bits: int) -> Reciprocal:
    """Reciprocal for ranges past the exhaustive cap.

    Same minimal-shift construction; exactness over [0, 2**value_bits)
    follows from the error inequality alone, so validation here is a
    deterministic sample (range extremes plus a strided sweep) instead
    of the full enumeration that make_reciprocal performs.
    """
    if value_bits <= RECIPROCAL_VALUE_BITS_MAX:
        return make_reciprocal(divisor, value_bits)
    if divisor < 2:
        raise ReciprocalError(f"divisor must be at least 2, got {divisor}")
    top = (1 << value_bits) - 1
    cap = value_bits + 2 * divisor.bit_length() + 2
    for k in range(1, cap + 1):
        magic = -(-(1 << k) // divisor)
        if (magic * divisor - (1 << k)) * top < (1 << k):
            break
    else:
        raise ReciprocalError(
            f"no shift up to {cap} is exact for divisor {divisor} over {value_bits} bits"
        )
    stride = max(1, (top + 1) >> 20)
    samples = list(range(0, top + 1, stride))
    samples += [top - i for i in range(min(64, top + 1))]
    for c in samples:
        if (c * magic) >> k != c // divisor:
            raise ReciprocalError(
                f"reciprocal for {divisor} failed sampled check at c={c}"
            )
    return Reciprocal(divisor, magic, k, value_bits)


def div_by_const(c: int, rec: Reciprocal, ledger: OpLedger | None = None) -> tuple[int, int]:
    """Quotient and remainder of c by rec.divisor, without dividing.

    Two multiplies, one shift, one subtract; charged at the widths of
    the validated range, not of the particular value.
    """
    if not 0 <= c < (1 << rec.value_bits):
        raise ValueError(
            f"dividend {c} outside validated range [0, 2**{rec.value_bits})"
        )
    q = (c * rec.magic) >> rec.shift
    if ledger is not None:
        qbits = (((1 << rec.value_bits) - 1) // rec.divisor).bit_length()
        ledger.charge_mul(rec.value_bits, rec.magic.bit_length())
        ledger.charge_shift(rec.value_bits + rec.magic.bit_length())
        ledger.charge_mul(qbits, rec.divisor.bit_length())
        ledger.charge_sub(rec.value_bits, rec.value_bits)
    return q, c - q * rec.divisor


# ---------------------------------------------------------------------------
# Parallel modular reduction of every slot at once.
#
# Strategy: multiplying the whole word by the magic constant M makes each
# slot's product spill past its own slot, so the word is first split into
# its even slots and its odd slots (stride 2*slot_width); within one
# parity the spill lands in a dead neighbour and never reaches the next
# live slot.  Per parity: mask, one whole-word multiply by M, one shift
# right by k plus a mask that isolates each quotient, one whole-word
# multiply by the divisor, one subtract.  The parities are OR-ed back
# together and a single conditional-correction sweep (compare all slots
# to the divisor via an indicator bit, subtract the divisor from exactly
# the slots at or above it) leaves every slot fully reduced.


class _ParallelModPlan:
    __slots__ = (
        "layout", "divisor", "rec", "qbits",
        "even_mask", "odd_mask", "q_even_mask", "q_odd_mask",
        "field_bits", "slot_ones", "correction_addend", "indicator_mask",
        "magic_bits", "divisor_bits",
    )

    def __init__(self, layout: FieldLayout, divisor: int):
        s, n, v = layout.slot_width, layout.slot_count, layout.value_bound
        self.layout = layout
        self.divisor = divisor
        rec = _reciprocal_any_width(divisor, v)
        self.rec = rec
        top = (1 << v) - 1
        prod_bits = (top * rec.magic).bit_length()
        if prod_bits > 2 * s:
            raise LayoutError(
                f"product of a slot value and the magic constant needs {prod_bits} bits,"
                f" more than two slots ({2 * s}); layout too tight for divisor {divisor}"
            )
        qbits = max((top // divisor).bit_length(), 1)
        if rec.shift + qbits > 2 * s:
            raise LayoutError(
                f"quotient window (shift {rec.shift} + {qbits} bits) exceeds two slots"
                f" ({2 * s}); layout too tight for divisor {divisor}"
            )
        field = divisor.bit_length() + 1
        if field + 1 > s:
            raise LayoutError(
                f"correction field needs {field + 1} bits, slot width is only {s}"
            )
        self.qbits = qbits
        self.field_bits = field
        self.magic_bits = rec.magic.bit_length()
        self.divisor_bits = divisor.bit_length()
        even = odd = 0
        q_even = q_odd = 0
        ones = 0
        slot_full = (1 << s) - 1
        q_full = (1 << qbits) - 1
        for i in range(n):
            pos = i * s
            ones |= 1 << pos
            if i % 2 == 0:
                even |= slot_full << pos
                q_even |= q_full << pos
            else:
                odd |= slot_full << pos
                q_odd |= q_full << pos
        self.even_mask = even
        self.odd_mask = odd
        self.q_even_mask = q_even
        self.q_odd_mask = q_odd
        self.slot_ones = ones
        self.correction_addend = ((1 << field) - divisor) * ones
        self.indicator_mask = ones


@lru_cache(maxsize=256)
def _parallel_mod_plan(layout: FieldLayout, divisor: int) -> _ParallelModPlan:
    return _ParallelModPlan(layout, divisor)


def parallel_mod(word: WideInt, layout: FieldLayout, divisor: int,
                 ledger: OpLedger | None = None) -> WideInt:
    """Reduce every slot of `word` modulo `divisor` in one packed pass.

    Bits of `word` above layout.total_bits are ignored.  The charged
    cost depends only on the layout and divisor, never on slot values.
    """
    if divisor < 2:
        raise LayoutError(f"divisor must be at least 2, got {divisor}")
    if word.bits < layout.total_bits:
        raise LayoutError(
            f"word of {word.bits} bits shorter than layout ({layout.total_bits})"
        )
    n = layout.slot_count
    if n == 0:
        return WideInt(0, 0)
    plan = _parallel_mod_plan(layout, divisor)
    bits = layout.total_bits
    wide = bits + plan.magic_bits

    def _reduce_parity(selected: int, q_mask: int) -> int:
        prod = selected * plan.rec.magic
        quot = (prod >> plan.rec.shift) & q_mask
        return selected - quot * plan.divisor

    x = word.value
    rem = _reduce_parity(x & plan.even_mask, plan.q_even_mask)
    if ledger is not None:
        ledger.charge_bitwise(bits)
        ledger.charge_mul(bits, plan.magic_bits)
        ledger.charge_shift(wide)
        ledger.charge_bitwise(wide)
        ledger.charge_mul(bits, plan.divisor_bits)
        ledger.charge_sub(bits, bits)
    if n > 1:
        rem |= _reduce_parity(x & plan.odd_mask, plan.q_odd_mask)
        if ledger is not None:
            ledger.charge_bitwise(bits)
            ledger.charge_mul(bits, plan.magic_bits)
            ledger.charge_shift(wide)
            ledger.charge_bitwise(wide)
            ledger.charge_mul(bits, plan.divisor_bits)
            ledger.charge_sub(bits, bits)
            ledger.charge_bitwise(bits)
    # Single correction sweep: slot values here are < 2*divisor, one
    # conditional subtract of the divisor finishes the reduction.
    t = rem + plan.correction_addend
    sel = (t >> plan.field_bits) & plan.indicator_mask
    out = rem - sel * plan.divisor
    if ledger is not None:
        ledger.charge_add(bits, bits)
        ledger.charge_shift(bits)
        ledger.charge_bitwise(bits)
        ledger.charge_mul(bits, plan.divisor_bits)
        ledger.charge_sub(bits, bits)
    return WideInt(out, bits)


def parallel_mod_reference(word: WideInt, layout: FieldLayout, divisor: int,
                           ledger: OpLedger | None = None) -> WideInt:
    """Slot-at-a-time route with the same contract as parallel_mod.

    Linear cost in slot_count; kept as the independent implementation
    that the packed route is checked against.
    """
    if divisor < 2:
        raise LayoutError(f"divisor must be at least 2, got {divisor}")
    if word.bits < layout.total_bits:
        raise LayoutError(
            f"word of {word.bits} bits shorter than layout ({layout.total_bits})"
        )
    if layout.slot_count == 0:
        return WideInt(0, 0)
    rec = _reciprocal_any_width(divisor, layout.value_bound)
    slots = unpack_fields(wide_trunc(word, layout.total_bits, ledger), layout, ledger)
    reduced = [div_by_const(c, rec, ledger)[1] for c in slots]
    out_layout = FieldLayout(layout.slot_width, layout.slot_count,
                             min(divisor.bit_length(), layout.slot_width))
    return WideInt(pack_fields(reduced, out_layout, ledger).value, layout.total_bits)
