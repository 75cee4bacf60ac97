import doctest
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import sosakit.units
from conftest import load
from graphgen import EX
from sosakit.rdf import Graph, Literal, Triple
from sosakit.units import (
    AmbiguousResult,
    Incommensurable,
    MalformedLexical,
    Ordering,
    ResultNotRepresentable,
    UnitTable,
    UnitTableError,
    UnknownUnit,
    compare,
    convert,
    default_unit_table,
    extract_result_quantity,
    format_quantity,
    literal_quantity,
    parse_quantity,
    quantity,
    to_decimal,
)
from sosakit.vocab import CDT, SOSA

# Written out by hand from SI prefixes and textbook conversions, kept
# separate from the bundled table: coherent = (value + offset) * factor.
ORACLE = {
    "pressure": {"Pa": 1, "hPa": 100, "kPa": 1000, "MPa": 10**6, "bar": 10**5, "mbar": 100},
    "length": {"m": 1, "km": 1000, "cm": Fraction(1, 100), "mm": Fraction(1, 1000)},
    "time": {"s": 1, "ms": Fraction(1, 1000), "min": 60, "h": 3600, "d": 86400},
    "mass": {"kg": 1, "g": Fraction(1, 1000), "mg": Fraction(1, 10**6), "t": 1000},
    "speed": {"m/s": 1, "km/h": Fraction(1000, 3600)},
    "temperature": {"K": (1, 0), "Cel": (1, Fraction("273.15")), "[degF]": (Fraction(5, 9), Fraction("459.67"))},
}


def oracle_convert(value: Fraction, src: str, dst: str) -> Fraction:
    for table in ORACLE.values():
        if src in table and dst in table:
            fs, os_ = table[src] if isinstance(table[src], tuple) else (table[src], 0)
            fd, od = table[dst] if isinstance(table[dst], tuple) else (table[dst], 0)
            return (value + os_) * fs / fd - od
    raise KeyError((src, dst))


def test_module_doctest():
    assert doctest.testmod(sosakit.units).failed == 0


def test_pressure_lexicals_parse():
    q = parse_quantity("101000 Pa")
    assert (q.value, q.unit) == (101000, "Pa")
    h = parse_quantity("1022.05 hPa")
    assert (h.value, h.unit) == (Fraction("1022.05"), "hPa")
    assert q.dimension == h.dimension == (-1, 1, -2, 0, 0, 0, 0)


def test_hpa_to_pa_is_exact():
    q = convert(parse_quantity("1022.05 hPa"), "Pa")
    assert q.value == oracle_convert(Fraction("1022.05"), "hPa", "Pa") == 102205
    assert format_quantity(q) == "102205 Pa"
    assert format_quantity(convert(parse_quantity("101000 Pa"), "Pa")) == "101000 Pa"


def test_bundled_minimum_and_prefix_consistency():
    table = default_unit_table()
    for code in ["Pa", "hPa", "kPa", "bar", "lm", "m", "km", "cm", "s", "min", "h", "g", "kg", "Cel", "K", "deg", "m/s"]:
        assert code in table
    assert table["hPa"].factor == 100 * table["Pa"].factor
    assert table["km"].factor == 1000 * table["m"].factor
    assert table["kg"].factor == 1000 * table["g"].factor


def test_oracle_agrees_with_bundled_factors():
    table = default_unit_table()
    for group in ORACLE.values():
        codes = list(group)
        for a in codes:
            for b in codes:
                assert convert(quantity("3.5", a), b).value == oracle_convert(Fraction("3.5"), a, b)
                assert table[a].dimension == table[b].dimension


def test_errors():
    with pytest.raises(UnknownUnit):
        parse_quantity("5 flurbs")
    for bad in ["101000Pa", "abc Pa", "1  Pa", "", "1 Pa extra"]:
        with pytest.raises(MalformedLexical):
            parse_quantity(bad)
    with pytest.raises(Incommensurable):
        convert(quantity("800", "lm"), "Pa")
    with pytest.raises(UnknownUnit):
        convert(quantity("1", "Pa"), "flurbs")


def test_compare_examples():
    assert compare(parse_quantity("101000 Pa"), parse_quantity("1022.05 hPa")) == Ordering.LESS
    q = parse_quantity("1022.05 hPa")
    assert compare(q, q) == Ordering.EQUAL
    assert compare(quantity("1", "km"), quantity("1000", "m")) == Ordering.EQUAL
    with pytest.raises(Incommensurable):
        compare(quantity("1", "km"), quantity("1", "s"))


def test_affine_temperature():
    assert format_quantity(convert(quantity("0", "Cel"), "K")) == "273.15 K"
    assert format_quantity(convert(quantity("212", "[degF]"), "Cel")) == "100 Cel"


def test_non_terminating_result_is_reported_not_rounded():
    q = convert(quantity("1", "min"), "h")
    assert q.value == Fraction(1, 60)
    with pytest.raises(ResultNotRepresentable):
        format_quantity(q)
    assert convert(q, "min").value == 1


def test_to_decimal_exact():
    assert to_decimal(Fraction(1, 8)) == Decimal("0.125")
    assert to_decimal(Fraction(-5, 2)) == Decimal("-2.5")


def test_cdt_literal_dimension():
    assert literal_quantity(Literal("101000 Pa", CDT.pressure)).unit == "Pa"
    assert literal_quantity(Literal("3 m", CDT.ucum)).unit == "m"
    with pytest.raises(Incommensurable):
        literal_quantity(Literal("3 m", CDT.pressure))


def test_extract_result_quantity():
    assert format_quantity(extract_result_quantity(load("sample.ttl"), EX.Obs123)) == "101000 Pa"
    actuation = load("actuation.ttl")
    assert format_quantity(extract_result_quantity(actuation, EX["actuation/046677455286"])) == "800 lm"
    assert extract_result_quantity(load("sampling.ttl"), EX.IceCore12Obs) is None


def test_extract_conflicting_results():
    g = load("actuation.ttl")
    g.add(Triple(EX["actuation/046677455286"], SOSA.hasSimpleResult, Literal("900 lm", CDT.luminousFlux)))
    with pytest.raises(AmbiguousResult):
        extract_result_quantity(g, EX["actuation/046677455286"])
    agree = Graph([Triple(EX.o, SOSA.hasSimpleResult, Literal("1 km", CDT.length)), Triple(EX.o, SOSA.hasSimpleResult, Literal("1000 m", CDT.length))])
    assert extract_result_quantity(agree, EX.o).unit in {"km", "m"}


def test_unit_table_file(tmp_path):
    path = tmp_path / "extra.tsv"
    path.write_text("# furlongs\n[fur_us]\t1,0,0,0,0,0,0\t201168/1000\n", encoding="utf-8")
    table = default_unit_table().extended(UnitTable.load(path))
    assert format_quantity(convert(quantity("1", "[fur_us]", table), "m", table)) == "201.168 m"
    with pytest.raises(UnitTableError):
        UnitTable.parse("bad\tline")
    with pytest.raises(UnitTableError):
        UnitTable.parse("x\t1,0,0,0,0,0,0\t0")


UNIT_PAIRS = [(a, b) for group in ORACLE.values() for a in group for b in group]
DECIMALS = st.decimals(min_value=-(10**12), max_value=10**12, places=6, allow_nan=False, allow_infinity=False)


@given(DECIMALS, st.sampled_from(UNIT_PAIRS))
@settings(max_examples=500, deadline=None)
def test_round_trip_conversion_is_exact(value, pair):
    src, dst = pair
    q = quantity(value, src)
    there = convert(q, dst)
    assert there.value == oracle_convert(Fraction(value), src, dst)
    back = convert(there, src)
    assert back.value == q.value and back.dimension == q.dimension


@given(DECIMALS, st.sampled_from(sorted(default_unit_table())))
@settings(max_examples=300, deadline=None)
def test_parse_format_identity(value, unit):
    q = quantity(value, unit)
    again = parse_quantity(format_quantity(q))
    assert (again.value, again.unit) == (q.value, q.unit)


@given(DECIMALS, DECIMALS, st.sampled_from(UNIT_PAIRS))
@settings(max_examples=300, deadline=None)
def test_compare_is_antisymmetric(x, y, pair):
    a, b = quantity(x, pair[0]), quantity(y, pair[1])
    assert compare(a, b) == -compare(b, a)
