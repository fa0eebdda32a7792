"""Value domain: exact integers, fixed-point decimals, text, booleans, and null.

Runtime representation:
  * Integer -> python int (arbitrary width)
  * Decimal -> Dec (exact fixed-point, global scale, stored as scaled units)
  * Text    -> python str
  * Boolean -> python bool
  * Null    -> None

Null is a member of every semantic type.  Comparisons with a Null operand
are false under the engine's two-valued logic (see eval helpers in the
expressions module); arithmetic over Null yields Null.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ExprTypeError

# Semantic type tags.
T_INT = "int"
T_DEC = "dec"
T_TEXT = "text"
T_BOOL = "bool"
TYPES = (T_INT, T_DEC, T_TEXT, T_BOOL)

_SCALE = 2


def decimal_scale() -> int:
    return _SCALE


def set_decimal_scale(scale: int) -> None:
    """Set the global fractional-digit count for Dec values.

    Must be called before any Dec is constructed; changing the scale does
    not rescale existing values.
    """
    global _SCALE
    if scale < 0:
        raise ValueError("decimal scale must be >= 0")
    _SCALE = scale


def _round_half_even(num: int, den: int) -> int:
    """Exact num/den rounded to the nearest integer, ties to even."""
    if den < 0:
        num, den = -num, -den
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q % 2 != 0):
        q += 1
    return q


@dataclass(frozen=True)
class Dec:
    """Fixed-point decimal: value = units / 10**decimal_scale()."""

    units: int

    @classmethod
    def from_string(cls, text: str) -> "Dec":
        sign = -1 if text.strip().startswith("-") else 1
        body = text.strip().lstrip("+-")
        if "." in body:
            whole, frac = body.split(".", 1)
        else:
            whole, frac = body, ""
        frac = (frac + "0" * _SCALE)[:_SCALE]
        extra = body.split(".", 1)[1][_SCALE:] if "." in body else ""
        if extra and any(ch != "0" for ch in extra):
            raise ValueError(f"decimal literal {text!r} exceeds scale {_SCALE}")
        units = int(whole or "0") * 10 ** _SCALE + int(frac or "0")
        return cls(sign * units if sign < 0 else units)

    @classmethod
    def from_int(cls, n: int) -> "Dec":
        return cls(n * 10 ** _SCALE)

    def as_fraction(self) -> Fraction:
        return Fraction(self.units, 10 ** _SCALE)

    def __str__(self) -> str:
        s = 10 ** _SCALE
        sign = "-" if self.units < 0 else ""
        mag = abs(self.units)
        if _SCALE == 0:
            return f"{sign}{mag}"
        return f"{sign}{mag // s}.{mag % s:0{_SCALE}d}"

    def __repr__(self) -> str:
        return f"Dec({str(self)})"

    def _units_of(self, other) -> Optional[int]:
        if isinstance(other, Dec):
            return other.units
        if isinstance(other, bool):
            return None
        if isinstance(other, int):
            return other * 10 ** _SCALE
        return None

    def __add__(self, other):
        u = self._units_of(other)
        if u is None:
            return NotImplemented
        return Dec(self.units + u)

    __radd__ = __add__

    def __sub__(self, other):
        u = self._units_of(other)
        if u is None:
            return NotImplemented
        return Dec(self.units - u)

    def __rsub__(self, other):
        u = self._units_of(other)
        if u is None:
            return NotImplemented
        return Dec(u - self.units)

    def __mul__(self, other):
        u = self._units_of(other)
        if u is None:
            return NotImplemented
        return Dec(_round_half_even(self.units * u, 10 ** _SCALE))

    __rmul__ = __mul__

    def __truediv__(self, other):
        u = self._units_of(other)
        if u is None:
            return NotImplemented
        if u == 0:
            raise ZeroDivisionError
        return Dec(_round_half_even(self.units * 10 ** _SCALE, u))

    def __rtruediv__(self, other):
        u = self._units_of(other)
        if u is None:
            return NotImplemented
        if self.units == 0:
            raise ZeroDivisionError
        return Dec(_round_half_even(u * 10 ** _SCALE, self.units))

    def _cmp_units(self, other) -> Optional[int]:
        u = self._units_of(other)
        if u is None:
            return None
        return u

    def __lt__(self, other):
        u = self._cmp_units(other)
        if u is None:
            return NotImplemented
        return self.units < u

    def __le__(self, other):
        u = self._cmp_units(other)
        if u is None:
            return NotImplemented
        return self.units <= u

    def __gt__(self, other):
        u = self._cmp_units(other)
        if u is None:
            return NotImplemented
        return self.units > u

    def __ge__(self, other):
        u = self._cmp_units(other)
        if u is None:
            return NotImplemented
        return self.units >= u


Value = Union[None, bool, int, Dec, str]


def type_of_value(v: Value) -> Optional[str]:
    """Semantic type tag of a value; None for Null (member of every type)."""
    if v is None:
        return None
    if isinstance(v, bool):
        return T_BOOL
    if isinstance(v, int):
        return T_INT
    if isinstance(v, Dec):
        return T_DEC
    if isinstance(v, str):
        return T_TEXT
    raise ExprTypeError(f"not an engine value: {v!r}")


def value_conforms(v: Value, type_tag: str) -> bool:
    t = type_of_value(v)
    return t is None or t == type_tag


def render_value(v: Value) -> str:
    """Render a value for CSV files and pretty-printed output."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def parse_value(text: str, type_tag: str) -> Value:
    """Parse a CSV cell according to a schema type; empty cell is Null."""
    if text == "":
        return None
    if type_tag == T_INT:
        return int(text)
    if type_tag == T_DEC:
        return Dec.from_string(text)
    if type_tag == T_BOOL:
        low = text.strip().lower()
        if low in ("true", "t", "1"):
            return True
        if low in ("false", "f", "0"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if type_tag == T_TEXT:
        return text
    raise ValueError(f"unknown type tag {type_tag!r}")


def value_to_json(v: Value) -> dict:
    if v is None:
        return {"t": "null"}
    if isinstance(v, bool):
        return {"t": T_BOOL, "v": v}
    if isinstance(v, int):
        return {"t": T_INT, "v": v}
    if isinstance(v, Dec):
        return {"t": T_DEC, "v": str(v)}
    if isinstance(v, str):
        return {"t": T_TEXT, "v": v}
    raise ExprTypeError(f"not an engine value: {v!r}")


def value_from_json(obj: dict) -> Value:
    tag = obj["t"]
    if tag == "null":
        return None
    if tag == T_BOOL:
        return bool(obj["v"])
    if tag == T_INT:
        return int(obj["v"])
    if tag == T_DEC:
        return Dec.from_string(str(obj["v"]))
    if tag == T_TEXT:
        return str(obj["v"])
    raise ValueError(f"unknown value tag {tag!r}")


class TextDict:
    """Engine-wide dictionary encoding of text values to dense integer codes.

    Codes are stable for the lifetime of a database instance: the first
    string seen gets 0, the next new one 1, and so on.
    """

    def __init__(self):
        self._codes: dict[str, int] = {}
        self._strings: list[str] = []

    def encode(self, s: str) -> int:
        code = self._codes.get(s)
        if code is None:
            code = len(self._strings)
            self._codes[s] = code
            self._strings.append(s)
        return code

    def lookup(self, s: str) -> Optional[int]:
        return self._codes.get(s)

    def decode(self, code: int) -> str:
        return self._strings[code]

    def __len__(self) -> int:
        return len(self._strings)
