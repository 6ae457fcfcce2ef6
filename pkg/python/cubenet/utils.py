import json
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Any, Mapping

from .exceptions import SchemaError


def fraction_str(value: Any) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(value: Any) -> Fraction:
    """Read an exact rational from JSON: an int, "p/q", "n" or a decimal."""
    if isinstance(value, bool):
        raise SchemaError(f"Expected a rational, got {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        # decimal text as written, not the binary float behind it
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise SchemaError(f"'{value}' is not a rational") from e
    raise SchemaError(f"Expected a rational, got {value!r}")


class KitchenSinkEncoder(json.JSONEncoder):
    def default(self, o):  # type: ignore  # pylint: disable=method-hidden
        if isinstance(o, Fraction):
            return fraction_str(o)
        if isinstance(o, Enum):
            return o.value
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        try:
            return o._serialize()  # pylint: disable=protected-access
        except AttributeError:
            return super().default(o)

    def iterencode(self, o, _one_shot=False):  # type: ignore
        return super().iterencode(_normalize(o), _one_shot)


def _normalize(o: Any) -> Any:
    # Fractions inside tuples never reach default(), so convert them up front
    if isinstance(o, Fraction):
        return fraction_str(o)
    if isinstance(o, Mapping):
        return {_key(k): _normalize(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_normalize(v) for v in o]
    if hasattr(o, "_serialize"):
        return _normalize(o._serialize())  # pylint: disable=protected-access
    return o


def _key(key: Any) -> Any:
    if isinstance(key, Enum):
        return key.value
    if isinstance(key, Fraction):
        return fraction_str(key)
    return key


def dump_json(document: Any) -> str:
    return (
        json.dumps(document, cls=KitchenSinkEncoder, sort_keys=True, indent=2) + "\n"
    )
