"""Inner code: multiply by a constant, exhaustively chosen.

A single multiplier m turns any (B+1)-bit value v into the 4(B+1)-bit
codeword v*m.  The search scans m = 1, 2, ... and keeps the first one
whose images of all pairs of distinct (B+1)-bit values differ in at
least T = ceil(delta*B) bit positions.  Keeping m below 2^(3(B+1))
means every product fits its 4(B+1)-bit slot, so one whole-word
multiplication encodes every slot of a packed word at once.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .errors import (
    ImpossibleThresholdError,
    LayoutError,
    MultiplierNotFoundError,
    ParameterError,
)
from .wordram import FieldLayout, OpLedger, WideInt, wide_mul, wide_trunc

B_MAX = 10

# Candidates per work item when the scan is split across threads.
_SCAN_CHUNK = 8192

# Thresholds to try, strongest first, when a caller wants the best
# achievable distance rather than a specific one.
DELTA_LADDER = (
    Fraction(1, 2),
    Fraction(1, 3),
    Fraction(1, 4),
    Fraction(1, 6),
)

# Largest ladder entry whose search succeeds, per B.  The full scan
# finds a multiplier for delta = 1/2 at every supported B; the table
# keeps the per-B shape in case a future range extension breaks that.
DEFAULT_DELTA = {b: Fraction(1, 2) for b in range(1, B_MAX + 1)}


@dataclass(frozen=True)
class InnerCode:
    """A verified multiplier for B-bit message symbols."""

    B: int
    m: int
    delta: Fraction
    threshold: int

    @property
    def out_bits(self) -> int:
        return 4 * (self.B + 1)


def threshold_for(b: int, delta: Fraction) -> int:
    return math.ceil(Fraction(delta) * b)


def pair_min_distance(m: int, b: int) -> int:
    """Exact minimum Hamming distance over all pairs of distinct images.

    Full scan, no early exit; this is the independent verifier for any
    multiplier the search returns.
    """
    if not 1 <= b <= B_MAX:
        raise ParameterError(f"B must be in [1, {B_MAX}], got {b}")
    if not 1 <= m < (1 << (3 * (b + 1))):
        raise ParameterError(f"multiplier {m} outside [1, 2^(3(B+1)))")
    return _kernels.pair_min_distance(m, b)


def _charge_scan(ledger: OpLedger, b: int, candidates: int):
    """Model cost of scanning `candidates` multipliers, full pairs each.

    The charge is a closed form in the candidate count alone, so it does
    not depend on kernel backend, early-exit order, or thread count.
    """
    values = 1 << (b + 1)
    pairs = values * (values - 1) // 2
    mul_units = ledger.words(b + 1) * ledger.words(3 * (b + 1))
    pair_units = ledger.words(4 * (b + 1))
    ledger.charge_counted("mul", candidates * values, mul_units)
    ledger.charge_counted("bitwise", candidates * pairs, pair_units)
    ledger.charge_counted("cmp", candidates * pairs, pair_units)


def _scan(b: int, m_hi: int, threshold: int) -> int:
    workers = _kernels.worker_count()
    if workers <= 1:
        return _kernels.scan_multiplier(b, 1, m_hi, threshold)
    # Disjoint ascending ranges; the first batch containing any hit
    # already holds the global smallest, because batches are consumed
    # in range order.
    with ThreadPoolExecutor(max_workers=workers) as pool:
        lo = 1
        while lo < m_hi:
            futs = []
            for _ in range(workers):
                if lo >= m_hi:
                    break
                hi = min(lo + _SCAN_CHUNK, m_hi)
                futs.append(pool.submit(
                    _kernels.scan_multiplier, b, lo, hi, threshold))
                lo = hi
            hits = [f.result() for f in futs]
            found = [m for m in hits if m != -1]
            if found:
                return min(found)
    return -1


def find_multiplier(b: int, delta, ledger: OpLedger | None = None) -> InnerCode:
    """Smallest m in [1, 2^(3(B+1))) with pair distance >= ceil(delta*B)."""
    if not 1 <= b <= B_MAX:
        raise ParameterError(f"B must be in [1, {B_MAX}], got {b}")
    delta = Fraction(delta)
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    t = threshold_for(b, delta)
    if t > 4 * (b + 1):
        # delta > 1 territory; no code of this length can separate pairs
        # that far, so refuse before scanning.
        raise ImpossibleThresholdError(
            f"threshold {t} exceeds code length {4 * (b + 1)} bits"
        )
    m_hi = 1 << (3 * (b + 1))
    m = _scan(b, m_hi, t)
    if m == -1:
        if ledger is not None:
            _charge_scan(ledger, b, m_hi - 1)
        raise MultiplierNotFoundError(b, delta)
    if ledger is not None:
        _charge_scan(ledger, b, m)
    # Second route: confirm with the no-early-exit scan before trusting
    # the search result.
    verified = _kernels.pair_min_distance(m, b)
    if verified < t:
        raise MultiplierNotFoundError(b, delta)
    return InnerCode(b, m, delta, t)


def inner_encode(word: WideInt, ic: InnerCode, layout: FieldLayout,
                 ledger: OpLedger | None = None) -> WideInt:
    """f_2: one whole-word multiply by m, then cut back to the layout.

    Requires each slot value below 2^(B+1); products then stay below
    2^(4(B+1)) <= 2^S and cannot carry across slot boundaries, which is
    what makes the single multiplication equal the per-slot map.
    """
    if layout.slot_width < 4 * (ic.B + 1):
        raise LayoutError(
            f"slot width {layout.slot_width} below product bound "
            f"{4 * (ic.B + 1)} bits"
        )
    if word.bits > layout.total_bits:
        raise LayoutError(
            f"word of {word.bits} bits does not fit layout "
            f"({layout.total_bits} bits)"
        )
    m_word = WideInt(ic.m, 3 * (ic.B + 1))
    prod = wide_mul(word.extend(layout.total_bits), m_word, ledger)
    return wide_trunc(prod, layout.total_bits, ledger)
