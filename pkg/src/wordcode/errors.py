"""Exception hierarchy.

Everything raised on purpose by this package derives from WordcodeError,
so callers can catch one type at the boundary.  Classes that also derive
from ValueError keep `except ValueError` code working for plain misuse.
"""


class WordcodeError(Exception):
    pass


class ParameterError(WordcodeError, ValueError):
    """A derived parameter violates one of the construction constraints."""


class LayoutError(WordcodeError, ValueError):
    """Packed-field misuse: width mismatch, slot overflow, bad layout."""


class ReciprocalError(WordcodeError, ValueError):
    """No valid reciprocal constant exists below the shift cap."""


class MultiplierError(WordcodeError):
    """Base for inner-code multiplier search failures."""


class ImpossibleThresholdError(MultiplierError, ValueError):
    """Requested Hamming threshold exceeds the inner code length."""


class MultiplierNotFoundError(MultiplierError):
    """Exhaustive search ended with no multiplier meeting the threshold.

    `achievable` carries the largest ladder fraction that does succeed for
    this word size, or None when even the smallest fails.
    """

    def __init__(self, bits, delta, achievable=None):
        self.bits = bits
        self.delta = delta
        self.achievable = achievable
        msg = f"no multiplier reaches delta={delta} for B={bits}"
        if achievable is not None:
            msg += f" (largest achievable delta is {achievable})"
        super().__init__(msg)


class CodecError(WordcodeError):
    """Base for serialization failures."""


class CodecFormatError(CodecError):
    """Input is not a code description (bad magic / missing fields)."""


class CodecVersionError(CodecError):
    """Code description uses an unsupported format version."""


class CodeValidationError(CodecError):
    """Stored parameters fail re-validation against their own word size."""


class DuplicateKeyError(WordcodeError, ValueError):
    """Key set for signature construction contains a repeated key."""

    def __init__(self, index_a, index_b, key_hex):
        self.index_a = index_a
        self.index_b = index_b
        self.key_hex = key_hex
        super().__init__(
            f"duplicate key at positions {index_a} and {index_b}: {key_hex}"
        )
