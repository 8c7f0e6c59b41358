"""Seven-segment encoding for a 6 digit common-cathode display.

Masks are active-high in gfedcba order (bit 0 = segment a); the decimal
point travels separately and occupies bit 7 when a digit is written out as
a byte.

        a
      f   b
        g
      e   c
        d   dp
"""

from __future__ import annotations

from dataclasses import dataclass

N_DIGITS = 6
DP_BIT = 0x80

# gfedcba
_DIGIT_MASKS = (0x3F, 0x06, 0x5B, 0x4F, 0x66, 0x6D, 0x7D, 0x07, 0x7F, 0x6F)
_GLYPHS = {
    " ": 0x00,
    "-": 0x40,
    "E": 0x79,
    "r": 0x50,
    **{str(d): m for d, m in enumerate(_DIGIT_MASKS)},
}
_GLYPH_OF_MASK = {m: ch for ch, m in _GLYPHS.items()}

METERS_LIMIT_CM = 1_000_000
EFFICIENCY_LIMIT_BP = 99_999


@dataclass(frozen=True, slots=True)
class SegmentMask:
    bits: int = 0
    dp: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.bits < 0x80:
            raise ValueError(f"segment mask 0x{self.bits:X} does not fit 7 bits")

    @property
    def byte(self) -> int:
        return self.bits | (DP_BIT if self.dp else 0)


BLANK = SegmentMask(0)
DASH = SegmentMask(_GLYPHS["-"])


@dataclass(frozen=True, slots=True)
class SegmentFrame:
    """Contents of all six digits, most significant first."""

    digits: tuple[SegmentMask, ...]

    def __post_init__(self) -> None:
        if len(self.digits) != N_DIGITS:
            raise ValueError(f"a frame holds {N_DIGITS} digits, got {len(self.digits)}")

    def hex(self) -> str:
        """D5..D0 as two-digit hex bytes, comma separated (bit 7 = dp)."""
        return ",".join(f"{d.byte:02X}" for d in self.digits)

    @property
    def is_error(self) -> bool:
        return self == ERROR_FRAME


ERROR_FRAME = SegmentFrame((DASH,) * N_DIGITS)


def encode_digit(d: int) -> SegmentMask:
    if not 0 <= d <= 9:
        raise ValueError(f"not a decimal digit: {d}")
    return SegmentMask(_DIGIT_MASKS[d])


def render_text(text: str) -> SegmentFrame:
    """Right-justify ``text`` on the display.

    A ``.`` lights the decimal point of the character before it and does
    not take a digit of its own.
    """
    cells: list[SegmentMask] = []
    for ch in text:
        if ch == ".":
            if not cells:
                raise ValueError("decimal point with no digit before it")
            cells[-1] = SegmentMask(cells[-1].bits, dp=True)
            continue
        try:
            cells.append(SegmentMask(_GLYPHS[ch]))
        except KeyError:
            raise ValueError(f"no seven-segment glyph for {ch!r}") from None
    if len(cells) > N_DIGITS:
        raise ValueError(f"{text!r} needs {len(cells)} digits")
    return SegmentFrame((BLANK,) * (N_DIGITS - len(cells)) + tuple(cells))


def decode_frame(frame: SegmentFrame) -> str:
    """Inverse of ``render_text``, leading blanks kept."""
    out = []
    for cell in frame.digits:
        try:
            out.append(_GLYPH_OF_MASK[cell.bits])
        except KeyError:
            raise ValueError(f"unknown segment pattern 0x{cell.bits:02X}") from None
        if cell.dp:
            out.append(".")
    return "".join(out)


def _render_hundredths(value: int, limit: int) -> SegmentFrame:
    if not 0 <= value <= limit:
        return ERROR_FRAME
    whole, frac = divmod(value, 100)
    return render_text(f"{whole}.{frac:02d}")


def render_meters(length_cm: int) -> SegmentFrame:
    """Cloth length as meters with two decimals, e.g. 3901 cm -> ``39.01``."""
    return _render_hundredths(length_cm, METERS_LIMIT_CM - 1)


def render_efficiency(eff_bp: int) -> SegmentFrame:
    """Efficiency as a percentage with two decimals, e.g. 8000 bp -> ``80.00``."""
    return _render_hundredths(eff_bp, EFFICIENCY_LIMIT_BP)


def render_error(code: int) -> SegmentFrame:
    """``Err`` followed by a two digit error code."""
    if not 0 <= code <= 99:
        raise ValueError(f"error code {code} does not fit two digits")
    return render_text(f"Err {code:02d}")
