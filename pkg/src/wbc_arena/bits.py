"""Bitstrings are plain ``str`` objects over the alphabet ``{'0', '1'}``.

Structured values (tuples such as ``<q, q', a>``) are packed with a 32-bit
big-endian length prefix in front of every field, so parsing is unambiguous.
"""

from __future__ import annotations

LEN_PREFIX_BITS = 32


def is_bits(s: object) -> bool:
    return isinstance(s, str) and not s.strip("01")


def zeros(n: int) -> str:
    return "0" * n


def int_to_bits(value: int, width: int) -> str:
    if value < 0 or value.bit_length() > width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def bits_to_int(s: str) -> int:
    return int(s, 2) if s else 0


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise ValueError("xor of bitstrings with different lengths")
    if not a:
        return ""
    return int_to_bits(int(a, 2) ^ int(b, 2), len(a))


def bytes_to_bits(data: bytes) -> str:
    if not data:
        return ""
    return format(int.from_bytes(data, "big"), f"0{8 * len(data)}b")


def bits_to_bytes(s: str) -> bytes:
    """Pack bits left-aligned; the final byte is zero padded on the right."""
    if not s:
        return b""
    pad = (-len(s)) % 8
    return int(s + "0" * pad, 2).to_bytes((len(s) + pad) // 8, "big")


def bits_to_hex(s: str) -> str:
    return bits_to_bytes(s).hex()


def hex_to_bits(h: str, length: int) -> str:
    bits = bytes_to_bits(bytes.fromhex(h))
    if length > len(bits) or bits[length:].strip("0"):
        raise ValueError("hex string does not encode the requested bit length")
    return bits[:length]


def pack_fields(*fields: str) -> str:
    out = []
    for f in fields:
        out.append(int_to_bits(len(f), LEN_PREFIX_BITS))
        out.append(f)
    return "".join(out)


def unpack_fields(s: str, count: int | None = None) -> list[str]:
    """Inverse of :func:`pack_fields`; raises ``ValueError`` on malformed input."""
    fields = []
    pos = 0
    while pos < len(s):
        if pos + LEN_PREFIX_BITS > len(s):
            raise ValueError("truncated length prefix")
        n = int(s[pos:pos + LEN_PREFIX_BITS], 2)
        pos += LEN_PREFIX_BITS
        if pos + n > len(s):
            raise ValueError("truncated field")
        fields.append(s[pos:pos + n])
        pos += n
    if count is not None and len(fields) != count:
        raise ValueError(f"expected {count} fields, found {len(fields)}")
    return fields
