import logging

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load
from graphgen import EX, random_graph
from sosakit import build_observation, entities_of_class, normalize_property_names, validate
from sosakit.model import ModelError, is_instant_literal, view
from sosakit.rdf import RDF_TYPE, XSD, Graph, Literal, Triple
from sosakit.vocab import CDT, QUDT, SOSA, default_vocabulary


def test_build_reproduces_sample_observation():
    g = build_observation(
        Graph(),
        EX.Obs123,
        feature_of_interest=EX.HurricaneMariaAPSampleAtStation1,
        observed_property=EX.AtmosphericPressure,
        simple_result=Literal("101000 Pa", CDT.pressure),
        result_time="2017-09-19T23:00:00Z",
    )
    assert len(g) == 5
    expected, _ = normalize_property_names(load("sample.ttl"))
    assert set(g) == expected.match(EX.Obs123, None, None)


def test_build_minimal():
    assert set(build_observation(Graph(), EX.o)) == {Triple(EX.o, RDF_TYPE, SOSA.Observation)}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"result_time": EX.t},
        {"result_time": Literal("yesterday", XSD.dateTime)},
        {"result_time": Literal("2017-09-19T23:00:00", XSD.dateTimeStamp)},
        {"simple_result": EX.r},
        {"simple_result": Literal("1"), "result": EX.r},
    ],
)
def test_build_rejects_bad_values(kwargs):
    with pytest.raises(ModelError):
        build_observation(Graph(), EX.o, **kwargs)


def test_build_rejects_existing_observation():
    g = build_observation(Graph(), EX.o)
    with pytest.raises(ModelError):
        build_observation(g, EX.o)


def test_instant_literals():
    assert is_instant_literal(Literal("2017-08-18T00:00:12+00:00", XSD.dateTimeStamp))
    assert is_instant_literal(Literal("2017-04-03T11:12:00", XSD.dateTime))
    assert not is_instant_literal(Literal("2017-04-03", XSD.date))


def test_entities_of_class():
    samples = entities_of_class(load("sampling.ttl"), SOSA.Sample)
    assert {v.node for v in samples} == {EX.IceCore12}
    assert entities_of_class(Graph(), SOSA.Sample) == set()
    platforms = entities_of_class(load("platform.ttl"), SOSA.Platform)
    assert {v.node for v in platforms} == {EX["iphone7/35-207306-844818-0"]}


def test_entities_of_non_sosa_class():
    g = load("actuation.ttl")
    found = entities_of_class(g, QUDT.QuantityValue)
    assert len(found) == 1


def test_view_time_values():
    v = view(load("platform.ttl"), EX["35-207306-844818-0/location/1"])
    assert v.sosa_types == {SOSA.Observation}
    assert v.result_time().literal.lexical == "2017-08-18T00:00:12+00:00"
    assert v.phenomenon_time() is None


def test_several_sosa_types_at_once():
    g = Graph(
        [
            Triple(EX.s, RDF_TYPE, SOSA.Sensor),
            Triple(EX.s, RDF_TYPE, SOSA.FeatureOfInterest),
            Triple(EX.o, SOSA.madeBySensor, EX.s),
            Triple(EX.o, SOSA.hasFeatureOfInterest, EX.s),
        ]
    )
    assert view(g, EX.s).sosa_types == {SOSA.Sensor, SOSA.FeatureOfInterest}
    assert validate(g).conforms


def test_normalization_counts(caplog):
    with caplog.at_level(logging.INFO, logger="sosakit.model"):
        g, n = normalize_property_names(load("sample.ttl"))
    assert n == 1
    assert (EX.Obs123, SOSA.hasFeatureOfInterest, EX.HurricaneMariaAPSampleAtStation1) in g
    assert "featureOfInterest" in caplog.text
    assert normalize_property_names(g)[1] == 0
    assert normalize_property_names(load("actuation.ttl"))[1] == 1


def test_normalization_leaves_objects_alone():
    g = Graph([Triple(EX.a, EX.p, SOSA.featureOfInterest)])
    out, n = normalize_property_names(g)
    assert n == 0 and out == g


@given(st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_normalization_is_idempotent(rng):
    g = random_graph(rng)
    for _ in range(rng.randint(0, 3)):
        g.add(Triple(rng.choice([EX.n0, EX.n1]), SOSA.featureOfInterest, EX.n2))
    once, _ = normalize_property_names(g)
    twice, n = normalize_property_names(once)
    assert once == twice and n == 0


def test_vocabulary_tables():
    vocab = default_vocabulary()
    assert len(vocab.classes) == 13
    assert len(vocab.properties) == 18
    assert len(vocab.inverse_pairs) == 4
    for p, q in vocab.inverse_pairs:
        assert p in vocab.properties and q in vocab.properties
        assert vocab.inverse_of(q) == p
    assert all(c.value.startswith(str(SOSA)) for c in vocab.classes)
