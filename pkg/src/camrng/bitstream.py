"""Packed bit sequences.

Bit streams in this package routinely reach hundreds of megabits, so they
are stored packed, eight bits per byte.  Internally the packing order is
little-endian within each byte (bit i of the stream lives in byte i // 8
at bit position i % 8).  That choice makes a packed stream directly
viewable as little-endian machine words, which the extractor relies on.

Exported byte streams use the opposite convention, MSB of each byte is
the earliest bit; see :meth:`BitString.to_msb_bytes`.
"""

from __future__ import annotations

import numpy as np

# Reversal table: _BIT_REVERSE[b] is byte b with its bit order mirrored.
# Converts between the internal LSB-first packing and MSB-first export
# without unpacking to one byte per bit.
_BIT_REVERSE = np.zeros(256, dtype=np.uint8)
for _b in range(256):
    _r = 0
    for _i in range(8):
        if _b & (1 << _i):
            _r |= 1 << (7 - _i)
    _BIT_REVERSE[_b] = _r
del _b, _r, _i


class BitString:
    """An immutable-by-convention sequence of bits, stored packed.

    Attributes:
        packed: uint8 array, ceil(n_bits / 8) long, little-endian bit order.
            Bits past n_bits in the final byte are always zero.
        n_bits: number of valid bits.
    """

    __slots__ = ("packed", "n_bits")

    def __init__(self, packed: np.ndarray, n_bits: int):
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        if n_bits < 0:
            raise ValueError(f"n_bits must be nonnegative, got {n_bits}")
        if packed.ndim != 1 or packed.size != (n_bits + 7) // 8:
            raise ValueError(
                f"packed length {packed.size} inconsistent with {n_bits} bits"
            )
        tail = n_bits % 8
        if tail and packed.size:
            # Zero the unused high bits of the final byte so equality and
            # popcounts never see stale data.
            packed = packed.copy()
            packed[-1] &= (1 << tail) - 1
        self.packed = packed
        self.n_bits = int(n_bits)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_bits01(cls, bits) -> "BitString":
        """Pack an array of 0/1 values."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1:
            bits = bits.ravel()
        if bits.size and bits.max() > 1:
            raise ValueError("bit array may only contain 0 and 1")
        return cls(np.packbits(bits, bitorder="little"), bits.size)

    @classmethod
    def zeros(cls, n_bits: int) -> "BitString":
        return cls(np.zeros((n_bits + 7) // 8, dtype=np.uint8), n_bits)

    @classmethod
    def concat(cls, parts: "list[BitString]") -> "BitString":
        """Concatenate bit strings, preserving order.

        Fast path when every part except the last ends on a byte
        boundary; otherwise falls back to unpack/repack.
        """
        parts = [p for p in parts if p.n_bits]
        if not parts:
            return cls.zeros(0)
        if len(parts) == 1:
            return parts[0]
        if all(p.n_bits % 8 == 0 for p in parts[:-1]):
            packed = np.concatenate([p.packed for p in parts])
            return cls(packed, sum(p.n_bits for p in parts))
        bits = np.concatenate([p.to_bits01() for p in parts])
        return cls.from_bits01(bits)

    # ------------------------------------------------------------------
    # Views and exports
    # ------------------------------------------------------------------

    def to_bits01(self) -> np.ndarray:
        """Unpack to one uint8 per bit (0 or 1)."""
        return np.unpackbits(self.packed, count=self.n_bits, bitorder="little")

    def to_msb_bytes(self) -> tuple[bytes, int]:
        """Serialize with the earliest bit in the MSB of each byte.

        Returns (payload, padding_bits) where padding_bits counts the
        zero bits appended to fill the final byte.
        """
        padding = (-self.n_bits) % 8
        return _BIT_REVERSE[self.packed].tobytes(), padding

    def count_ones(self) -> int:
        return int(np.bitwise_count(self.packed).sum())

    # ------------------------------------------------------------------
    # Operators
    # ------------------------------------------------------------------

    def __len__(self) -> int:
        return self.n_bits

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self.n_bits == other.n_bits and np.array_equal(
            self.packed, other.packed
        )

    def __xor__(self, other: "BitString") -> "BitString":
        if not isinstance(other, BitString):
            return NotImplemented
        if self.n_bits != other.n_bits:
            raise ValueError(
                f"length mismatch: {self.n_bits} vs {other.n_bits} bits"
            )
        return BitString(self.packed ^ other.packed, self.n_bits)

    def __repr__(self) -> str:
        return f"BitString(n_bits={self.n_bits})"
