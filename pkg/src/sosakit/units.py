"""UCUM quantities from custom-datatype literals, with exact conversion.

A cdt literal's lexical form is ``<decimal> <ucum-code>``, e.g.
``"101000 Pa"^^cdt:pressure``. Values are held as exact rationals and
rendered as decimals; a conversion whose result has no terminating decimal
expansion cannot be rendered and raises :class:`ResultNotRepresentable`.

>>> q = parse_quantity("1022.05 hPa")
>>> format_quantity(convert(q, "Pa"))
'102205 Pa'
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .rdf import Graph, IRI, Literal, Term
from .vocab import CDT, SOSA

Dimension = Tuple[int, int, int, int, int, int, int]
DIMENSION_AXES = ("length", "mass", "time", "luminous-intensity", "temperature", "amount", "current")


class UnitError(ValueError):
    pass


class MalformedLexical(UnitError):
    pass


class UnknownUnit(UnitError):
    pass


class Incommensurable(UnitError):
    pass


class ResultNotRepresentable(UnitError):
    pass


class AmbiguousResult(UnitError):
    pass


class UnitTableError(ValueError):
    pass


@dataclass(frozen=True)
class UnitDef:
    code: str
    dimension: Dimension
    factor: Fraction
    offset: Fraction = Fraction(0)

    @property
    def affine(self) -> bool:
        return self.offset != 0


def _parse_dimension(cell: str) -> Dimension:
    parts = [int(x) for x in cell.split(",")]
    if len(parts) != len(DIMENSION_AXES):
        raise ValueError(f"dimension vector needs {len(DIMENSION_AXES)} entries")
    return tuple(parts)  # type: ignore[return-value]


class UnitTable:
    """Immutable map from UCUM code to dimension and exact factor."""

    def __init__(self, entries: Mapping[str, UnitDef]):
        self._entries: Dict[str, UnitDef] = dict(entries)

    def __contains__(self, code: str) -> bool:
        return code in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries))

    def __getitem__(self, code: str) -> UnitDef:
        try:
            return self._entries[code]
        except KeyError:
            raise UnknownUnit(f"unknown unit {code!r}") from None

    def codes_with_dimension(self, dim: Dimension):
        return sorted(c for c, u in self._entries.items() if u.dimension == dim)

    def extended(self, other: "UnitTable") -> "UnitTable":
        merged = dict(self._entries)
        merged.update(other._entries)
        return UnitTable(merged)

    @classmethod
    def parse(cls, text: str, source: str = "<units>") -> "UnitTable":
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) not in (3, 4):
                raise UnitTableError(f"{source}:{lineno}: expected 3 or 4 tab-separated fields")
            try:
                code = cells[0].strip()
                dim = _parse_dimension(cells[1].strip())
                factor = Fraction(cells[2].strip())
                offset = Fraction(cells[3].strip()) if len(cells) == 4 else Fraction(0)
            except (ValueError, ZeroDivisionError) as exc:
                raise UnitTableError(f"{source}:{lineno}: {exc}") from None
            if factor <= 0:
                raise UnitTableError(f"{source}:{lineno}: factor must be positive")
            entries[code] = UnitDef(code, dim, factor, offset)
        return cls(entries)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "UnitTable":
        return cls.parse(Path(path).read_text(encoding="utf-8"), str(path))


@lru_cache(maxsize=None)
def default_unit_table() -> UnitTable:
    text = resources.files("sosakit").joinpath("data/units.tsv").read_text(encoding="utf-8")
    return UnitTable.parse(text, "units.tsv")


@lru_cache(maxsize=None)
def qudt_unit_map() -> Mapping[IRI, str]:
    text = resources.files("sosakit").joinpath("data/qudt_units.tsv").read_text(encoding="utf-8")
    mapping = {}
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            iri, code = line.split("\t")
            mapping[IRI(iri.strip())] = code.strip()
    return mapping


@dataclass(frozen=True)
class Quantity:
    value: Fraction
    unit: str
    dimension: Dimension

    @property
    def decimal(self) -> Decimal:
        return to_decimal(self.value)

    def __str__(self) -> str:
        try:
            return format_quantity(self)
        except ResultNotRepresentable:
            return f"{self.value} {self.unit}"


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def to_decimal(value: Fraction) -> Decimal:
    """Exact decimal for ``value``; raises if the expansion does not terminate."""
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise ResultNotRepresentable(f"{value} has no terminating decimal expansion")
    scale = max(twos, fives)
    scaled = value.numerator * 10**scale // value.denominator
    digits = tuple(int(c) for c in str(abs(scaled)))
    return Decimal((1 if scaled < 0 else 0, digits, -scale))


_LEXICAL = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?) (\S+)$")


def parse_quantity(lexical: str, table: Optional[UnitTable] = None) -> Quantity:
    table = table or default_unit_table()
    m = _LEXICAL.match(lexical)
    if m is None:
        raise MalformedLexical(f"expected '<decimal> <unit>', got {lexical!r}")
    try:
        value = Fraction(Decimal(m.group(1)))
    except InvalidOperation:
        raise MalformedLexical(f"not a decimal: {m.group(1)!r}") from None
    unit = table[m.group(2)]
    return Quantity(value, unit.code, unit.dimension)


def format_quantity(q: Quantity) -> str:
    return f"{format(q.decimal, 'f')} {q.unit}"


def quantity(value, unit: str, table: Optional[UnitTable] = None) -> Quantity:
    """Build a quantity from a number or numeric string."""
    table = table or default_unit_table()
    u = table[unit]
    if isinstance(value, str):
        value = Decimal(value)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a str or Decimal")
    return Quantity(Fraction(value), u.code, u.dimension)


def convert(q: Quantity, target: str, table: Optional[UnitTable] = None) -> Quantity:
    table = table or default_unit_table()
    src = table[q.unit]
    dst = table[target]
    if src.dimension != dst.dimension:
        raise Incommensurable(f"cannot convert {q.unit} to {target}")
    coherent = (q.value + src.offset) * src.factor
    return Quantity(coherent / dst.factor - dst.offset, dst.code, dst.dimension)


def compare(a: Quantity, b: Quantity, table: Optional[UnitTable] = None) -> Ordering:
    """Order ``a`` against ``b`` after converting ``b`` into ``a``'s unit."""
    other = convert(b, a.unit, table).value
    if a.value < other:
        return Ordering.LESS
    if a.value > other:
        return Ordering.GREATER
    return Ordering.EQUAL


# cdt datatypes that constrain the unit's dimension; cdt:ucum accepts any unit
CDT_DIMENSIONS: Dict[IRI, Dimension] = {
    CDT.length: (1, 0, 0, 0, 0, 0, 0),
    CDT.mass: (0, 1, 0, 0, 0, 0, 0),
    CDT.time: (0, 0, 1, 0, 0, 0, 0),
    CDT.luminousIntensity: (0, 0, 0, 1, 0, 0, 0),
    CDT.luminousFlux: (0, 0, 0, 1, 0, 0, 0),
    CDT.illuminance: (-2, 0, 0, 1, 0, 0, 0),
    CDT.temperature: (0, 0, 0, 0, 1, 0, 0),
    CDT.amountOfSubstance: (0, 0, 0, 0, 0, 1, 0),
    CDT.electricCurrent: (0, 0, 0, 0, 0, 0, 1),
    CDT.pressure: (-1, 1, -2, 0, 0, 0, 0),
    CDT.speed: (1, 0, -1, 0, 0, 0, 0),
    CDT.frequency: (0, 0, -1, 0, 0, 0, 0),
    CDT.angle: (0, 0, 0, 0, 0, 0, 0),
    CDT.dimensionless: (0, 0, 0, 0, 0, 0, 0),
}


def is_cdt_literal(term: Term) -> bool:
    return isinstance(term, Literal) and term.datatype.value.startswith(str(CDT))


def literal_quantity(lit: Literal, table: Optional[UnitTable] = None) -> Quantity:
    """Decode a cdt literal, enforcing the datatype's dimension if it has one."""
    q = parse_quantity(lit.lexical, table)
    expected = CDT_DIMENSIONS.get(lit.datatype)
    if expected is not None and q.dimension != expected:
        name = lit.datatype.value[len(str(CDT)):]
        raise Incommensurable(f"unit {q.unit!r} is not a {name} unit")
    return q


QUDT_NUMERIC = (IRI("http://qudt.org/1.1/schema/qudt#numericValue"), IRI("http://qudt.org/schema/qudt/numericValue"))
QUDT_UNIT_PROPS = (IRI("http://qudt.org/1.1/schema/qudt#unit"), IRI("http://qudt.org/schema/qudt/unit"))


def _first(graph: Graph, node: Term, props: Iterable[IRI]):
    for p in props:
        for o in graph.objects(node, p):
            return o
    return None


def _structured(graph: Graph, node: Term, table: UnitTable) -> Optional[Quantity]:
    number = _first(graph, node, QUDT_NUMERIC)
    unit = _first(graph, node, QUDT_UNIT_PROPS)
    if not isinstance(number, Literal) or not isinstance(unit, IRI):
        return None
    code = qudt_unit_map().get(unit)
    if code is None:
        raise UnknownUnit(f"no UCUM code for QUDT unit {unit.value}")
    try:
        value = Fraction(Decimal(number.lexical.strip()))
    except (InvalidOperation, ValueError):
        raise MalformedLexical(f"not a number: {number.lexical!r}") from None
    u = table[code]
    return Quantity(value, u.code, u.dimension)


def extract_result_quantity(graph: Graph, event: Term, table: Optional[UnitTable] = None) -> Optional[Quantity]:
    """The quantity an observation/actuation/sampling produced, if any.

    Looks at a cdt-typed ``hasSimpleResult`` first, then at ``hasResult``
    nodes carrying a QUDT numeric value and unit. Raises AmbiguousResult
    when several found quantities disagree.
    """
    table = table or default_unit_table()
    found = []
    for lit in graph.objects(event, SOSA.hasSimpleResult):
        if is_cdt_literal(lit):
            found.append(parse_quantity(lit.lexical, table))
    for node in graph.objects(event, SOSA.hasResult):
        q = _structured(graph, node, table)
        if q is not None:
            found.append(q)
    if not found:
        return None
    first = found[0]
    for other in found[1:]:
        try:
            same = compare(first, other, table) == Ordering.EQUAL
        except Incommensurable:
            same = False
        if not same:
            raise AmbiguousResult(f"{event} has conflicting results {first} and {other}")
    return first
