"""Order-isomorphic codecs between field values and arbitrary-precision ordinals.

Every codec maps its value domain onto ``[0, cardinality)`` so that the
field's natural order (numeric, chronological, or collated-lexicographic)
coincides with integer order of the ordinals, and composite keys reduce to a
mixed-radix number over the per-field ordinals.  Python ints carry the
arbitrary precision; no separate big-integer wrapper is needed.

All codecs are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import struct
from datetime import datetime, timedelta, timezone
from typing import Sequence

from .collation import CollationRules
from .errors import DomainError, GridScrollError, LengthExceeded, OutOfRange

_SIGN64 = 1 << 63
_MASK64 = (1 << 64) - 1


def string_count(alphabet_size: int, max_length: int) -> int:
    """Number of strings of length <= max_length over the alphabet.

    Geometric series 1 + a + a^2 + ... + a^m (the 1 is the empty string).
    """
    if alphabet_size < 1 or max_length < 0:
        raise DomainError("alphabet_size must be >= 1 and max_length >= 0")
    if alphabet_size == 1:
        return max_length + 1
    return (alphabet_size ** (max_length + 1) - 1) // (alphabet_size - 1)


def length_weights(alphabet_size: int, max_length: int) -> tuple[int, ...]:
    """Per-position weights for length-aware string encoding.

    ``w[i]`` counts the strings of length <= max_length - 1 - i, i.e. how many
    shorter continuations fit under position ``i``.  Built as running partial
    sums of the geometric series rather than by exponentiation.
    """
    weights = [0] * max_length
    acc = 0
    for i in range(max_length - 1, -1, -1):
        acc = acc * alphabet_size + 1
        weights[i] = acc
    return tuple(weights)


class ScalarCodec:
    """Base for single-field codecs: a monotone bijection onto [0, cardinality)."""

    kind: str
    cardinality: int

    def encode(self, value) -> int:
        raise NotImplementedError

    def decode(self, ordinal: int) -> object:
        raise NotImplementedError

    def _check_ordinal(self, ordinal: int) -> None:
        if not isinstance(ordinal, int) or isinstance(ordinal, bool):
            raise OutOfRange(f"ordinal must be an int, got {type(ordinal).__name__}")
        if not 0 <= ordinal < self.cardinality:
            raise OutOfRange(
                f"ordinal {ordinal} outside [0, {self.cardinality}) for {self.kind}"
            )

    def __repr__(self) -> str:
        return f"<{type(self).__name__} cardinality={self.cardinality}>"


class BitCodec(ScalarCodec):
    kind = "bit"
    cardinality = 2

    def encode(self, value) -> int:
        if isinstance(value, bool):
            return int(value)
        if value in (0, 1):
            return int(value)
        raise DomainError(f"bit value must be a bool or 0/1, got {value!r}")

    def decode(self, ordinal: int) -> bool:
        self._check_ordinal(ordinal)
        return bool(ordinal)


class _SignedIntCodec(ScalarCodec):
    """Signed fixed-width integers shift by half the cardinality."""

    bits: int

    def __init__(self):
        self._offset = 1 << (self.bits - 1)
        self.cardinality = 1 << self.bits

    def encode(self, value) -> int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise DomainError(f"{self.kind} value must be an int, got {value!r}")
        if not -self._offset <= value < self._offset:
            raise DomainError(f"{value} outside the {self.kind} range")
        return value + self._offset

    def decode(self, ordinal: int) -> int:
        self._check_ordinal(ordinal)
        return ordinal - self._offset


class Int32Codec(_SignedIntCodec):
    kind = "int32"
    bits = 32


class Int64Codec(_SignedIntCodec):
    kind = "int64"
    bits = 64


class Float64Codec(ScalarCodec):
    """IEEE-754 doubles under the monotone bit-image order.

    Negative values have all 64 bits of their bit image inverted, positive
    values get the sign bit set; the result sorts as an unsigned integer.
    This refines numeric order: -0.0 encodes just below +0.0, and the default
    quiet NaN encodes above every number (NaNs sort by their raw bit image,
    so sign-bit NaN payloads land below; normal Python code never makes one).
    """

    kind = "float64"
    cardinality = 1 << 64

    def encode(self, value) -> int:
        try:
            bits = struct.unpack("<Q", struct.pack("<d", value))[0]
        except (struct.error, TypeError):
            raise DomainError(f"float64 value must be a float, got {value!r}") from None
        if bits & _SIGN64:
            return bits ^ _MASK64
        return bits | _SIGN64

    def decode(self, ordinal: int) -> float:
        self._check_ordinal(ordinal)
        if ordinal & _SIGN64:
            bits = ordinal ^ _SIGN64
        else:
            bits = ordinal ^ _MASK64
        return struct.unpack("<d", struct.pack("<Q", bits))[0]


class DatetimeCodec(_SignedIntCodec):
    """Timestamps as signed 64-bit epoch milliseconds.

    The codec's value type is the integer millisecond count itself, covering
    the full 64-bit range; ISO-8601 conversion happens at file and wire
    boundaries (see ``datetime_to_millis`` / ``millis_to_datetime``).
    """

    kind = "datetime"
    bits = 64


class PlainStringCodec(ScalarCodec):
    """Strings under plain lexicographic order of an explicit alphabet."""

    kind = "string"

    def __init__(self, alphabet: str, max_length: int):
        if len(set(alphabet)) != len(alphabet):
            raise DomainError("alphabet contains duplicate characters")
        if not alphabet:
            raise DomainError("alphabet must not be empty")
        if max_length < 0:
            raise DomainError("max_length must be >= 0")
        self.alphabet = alphabet
        self.max_length = max_length
        self._index = {ch: i for i, ch in enumerate(alphabet)}
        self.weights = length_weights(len(alphabet), max_length)
        self.cardinality = string_count(len(alphabet), max_length)

    def digits_of(self, s: str) -> list[int]:
        try:
            return [self._index[ch] for ch in s]
        except KeyError as exc:
            raise DomainError(f"character {exc.args[0]!r} not in alphabet") from None

    def encode(self, value: str) -> int:
        if len(value) > self.max_length:
            raise LengthExceeded(
                f"string of length {len(value)} exceeds max_length {self.max_length}"
            )
        return encode_length_prefixed(self.digits_of(value), self.weights)

    def decode(self, ordinal: int) -> str:
        self._check_ordinal(ordinal)
        digits = decode_length_prefixed(ordinal, self.weights)
        return "".join(self.alphabet[d] for d in digits)


def encode_length_prefixed(digits: Sequence[int], weights: Sequence[int]) -> int:
    """Ordinal of a digit string where every prefix sorts before its extensions.

    The string's length contributes one count per character (each prefix is a
    smaller string), each digit contributes its value times the number of
    bounded-length continuations below it.
    """
    ordinal = len(digits)
    for digit, weight in zip(digits, weights):
        ordinal += digit * weight
    return ordinal


def decode_length_prefixed(ordinal: int, weights: Sequence[int]) -> list[int]:
    """Inverse of :func:`encode_length_prefixed` (mixed-radix with length bias)."""
    digits: list[int] = []
    g = ordinal
    for weight in weights:
        if g <= 0:
            break
        g -= 1
        digits.append(g // weight)
        g %= weight
    return digits


class CollatedStringCodec(ScalarCodec):
    """Strings ordered by three-pass collation rules.

    The primary components are encoded like a plain string over the group
    alphabet, the variant and case components as fixed-width numbers in bases
    ``max_variants`` and ``max_case_forms``; the three parts are concatenated
    radix-style, so accent- and case-insensitive closeness is preserved.

    Because per-group variant/case counts may be below the structure-wide
    maxima, the ordinal range has gaps: encoding is injective and monotone
    but not surjective.  Decoding a gap ordinal raises NoSuchSlot unless
    ``clamp_slots`` asks for the offending digits to be zeroed.
    """

    kind = "string"

    def __init__(self, rules: CollationRules, max_length: int):
        if max_length < 0:
            raise DomainError("max_length must be >= 0")
        self.rules = rules
        self.max_length = max_length
        a0 = rules.alphabet_size
        a1 = rules.max_variants
        a2 = rules.max_case_forms
        self.weights = length_weights(a0, max_length)
        self.primary_count = string_count(a0, max_length)
        self._variant_scale = a1 ** max_length
        self._case_scale = a2 ** max_length
        self._variant_weights = tuple(
            a1 ** (max_length - 1 - i) for i in range(max_length)
        )
        self._case_weights = tuple(
            a2 ** (max_length - 1 - i) for i in range(max_length)
        )
        self.cardinality = self.primary_count * self._variant_scale * self._case_scale

    def encode(self, value: str) -> int:
        if len(value) > self.max_length:
            raise LengthExceeded(
                f"string of length {len(value)} exceeds max_length {self.max_length}"
            )
        components = [self.rules.components_of(ch) for ch in value]
        primary_part = len(components)
        variant_part = 0
        case_part = 0
        for i, comp in enumerate(components):
            primary_part += comp.primary_index * self.weights[i]
            variant_part += comp.variant_index * self._variant_weights[i]
            case_part += comp.case_index * self._case_weights[i]
        return (
            primary_part * self._variant_scale + variant_part
        ) * self._case_scale + case_part

    def decode(self, ordinal: int, clamp_slots: bool = False) -> str:
        self._check_ordinal(ordinal)
        case_part = ordinal % self._case_scale
        rest = ordinal // self._case_scale
        variant_part = rest % self._variant_scale
        primary_part = rest // self._variant_scale
        primaries = decode_length_prefixed(primary_part, self.weights)

        a1 = self.rules.max_variants
        a2 = self.rules.max_case_forms
        groups = self.rules.groups
        chars = []
        for i, p in enumerate(primaries):
            v = (variant_part // self._variant_weights[i]) % a1
            c = (case_part // self._case_weights[i]) % a2
            if clamp_slots:
                variants = groups[p]
                if v >= len(variants):
                    v = 0
                if c >= len(variants[v]):
                    c = 0
                chars.append(variants[v][c])
            else:
                chars.append(self.rules.char_of(p, v, c))
        return "".join(chars)


class CompositeCodec:
    """Mixed-radix combination of scalar codecs, most significant field first.

    The ordinal equals the lexicographic rank of the tuple over the product
    domain; evaluation uses the nested multiply-add form (n-1 multiplications),
    decoding peels fields right to left by div/mod.
    """

    def __init__(self, fields: Sequence[ScalarCodec]):
        if not fields:
            raise DomainError("composite codec needs at least one field")
        self.fields = tuple(fields)
        cardinality = 1
        for codec in self.fields:
            cardinality *= codec.cardinality
        self.cardinality = cardinality

    def encode(self, values: Sequence) -> int:
        if len(values) != len(self.fields):
            raise DomainError(
                f"expected {len(self.fields)} key values, got {len(values)}"
            )
        ordinal = self._member_encode(0, values[0])
        for i in range(1, len(self.fields)):
            ordinal = ordinal * self.fields[i].cardinality + self._member_encode(
                i, values[i]
            )
        return ordinal

    def decode(self, ordinal: int, clamp_slots: bool = False) -> tuple:
        if not isinstance(ordinal, int) or isinstance(ordinal, bool):
            raise OutOfRange(f"ordinal must be an int, got {type(ordinal).__name__}")
        if not 0 <= ordinal < self.cardinality:
            raise OutOfRange(f"ordinal {ordinal} outside [0, {self.cardinality})")
        parts: list[int] = []
        g = ordinal
        for codec in reversed(self.fields):
            parts.append(g % codec.cardinality)
            g //= codec.cardinality
        parts.reverse()
        return tuple(
            self._member_decode(i, part, clamp_slots)
            for i, part in enumerate(parts)
        )

    def _member_encode(self, i: int, value) -> int:
        try:
            return self.fields[i].encode(value)
        except GridScrollError as exc:
            raise type(exc)(f"key field {i}: {exc}") from exc

    def _member_decode(self, i: int, part: int, clamp_slots: bool):
        codec = self.fields[i]
        try:
            if isinstance(codec, CollatedStringCodec):
                return codec.decode(part, clamp_slots=clamp_slots)
            return codec.decode(part)
        except GridScrollError as exc:
            raise type(exc)(f"key field {i}: {exc}") from exc

    def __repr__(self) -> str:
        kinds = ",".join(codec.kind for codec in self.fields)
        return f"<CompositeCodec [{kinds}]>"


# -- datetime boundary helpers -------------------------------------------------

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_MS = timedelta(milliseconds=1)


def datetime_to_millis(dt: datetime) -> int:
    """Epoch milliseconds of a datetime; naive datetimes count as UTC."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return (dt - _EPOCH) // _MS


def millis_to_datetime(ms: int) -> datetime:
    """UTC datetime for an epoch millisecond count within datetime's range."""
    return _EPOCH + ms * _MS


def parse_iso_millis(text: str) -> int:
    """Epoch milliseconds from an ISO-8601 string ('Z' suffix accepted)."""
    return datetime_to_millis(datetime.fromisoformat(text.replace("Z", "+00:00")))


def format_iso_millis(ms: int) -> str:
    return millis_to_datetime(ms).isoformat(timespec="milliseconds")
