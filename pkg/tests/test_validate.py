import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load
from graphgen import EX, random_graph, random_triple
from sosakit import infer, normalize_property_names, validate
from sosakit.rdf import RDF_TYPE, XSD, Graph, Literal, Namespace, Triple
from sosakit.validate import RULES, Severity
from sosakit.vocab import CDT, GEO, SOSA

GROUND_TRUTH = ["sample.ttl", "platform.ttl", "actuation.ttl", "hosting.ttl"]


def normalized(name):
    return normalize_property_names(load(name))[0]


def replace(g, old, new):
    g.remove(old)
    g.add(new)
    return g


def _sample_result_time(g):
    return next(g.triples(EX.Obs123, SOSA.resultTime, None))


def _platform_result_time(g):
    return next(g.triples(None, SOSA.resultTime, None))


MUTATIONS = {
    "resultTime-iri": ("sample.ttl", "R1", lambda g: replace(g, _sample_result_time(g), Triple(EX.Obs123, SOSA.resultTime, EX.noon))),
    "resultTime-plain-string": (
        "sample.ttl",
        "R1",
        lambda g: replace(g, _sample_result_time(g), Triple(EX.Obs123, SOSA.resultTime, Literal("2017-09-19T23:00:00Z"))),
    ),
    "resultTime-stamp-without-zone": (
        "platform.ttl",
        "R1",
        lambda g: replace(
            g,
            _platform_result_time(g),
            Triple(_platform_result_time(g).subject, SOSA.resultTime, Literal("2017-08-18T00:00:12", XSD.dateTimeStamp)),
        ),
    ),
    "resultTime-date": (
        "actuation.ttl",
        "R1",
        lambda g: replace(
            g,
            _platform_result_time(g),
            Triple(_platform_result_time(g).subject, SOSA.resultTime, Literal("2017-10-06", XSD.date)),
        ),
    ),
    "phenomenonTime-literal": (
        "sample.ttl",
        "R2",
        lambda g: g.add(Triple(EX.Obs123, SOSA.phenomenonTime, Literal("2017-09-19T23:00:00Z", XSD.dateTime))) and g,
    ),
    "phenomenonTime-year": (
        "actuation.ttl",
        "R2",
        lambda g: g.add(Triple(EX["actuation/046677455286"], SOSA.phenomenonTime, Literal("2017", XSD.gYear))) and g,
    ),
    "sample-unlinked": (
        "sample.ttl",
        "R3",
        lambda g: g.remove(Triple(EX.HurricaneMariaAPSampleAtStation1, SOSA.isSampleOf, EX.HurricaneMaria)) and g,
    ),
    "sample-orphan": ("hosting.ttl", "R3", lambda g: g.add(Triple(EX.orphan, RDF_TYPE, SOSA.Sample)) and g),
    "pressure-in-metres": (
        "sample.ttl",
        "R8",
        lambda g: replace(
            g,
            next(g.triples(EX.Obs123, SOSA.hasSimpleResult, None)),
            Triple(EX.Obs123, SOSA.hasSimpleResult, Literal("101000 m", CDT.pressure)),
        ),
    ),
    "pressure-not-a-number": (
        "sample.ttl",
        "R8",
        lambda g: replace(
            g,
            next(g.triples(EX.Obs123, SOSA.hasSimpleResult, None)),
            Triple(EX.Obs123, SOSA.hasSimpleResult, Literal("lots Pa", CDT.pressure)),
        ),
    ),
    "unknown-unit": (
        "hosting.ttl",
        "R8",
        lambda g: g.add(Triple(EX["philips/46N7743619"], EX.rating, Literal("5 flurbs", CDT.ucum))) and g,
    ),
    "length-in-seconds": (
        "platform.ttl",
        "R8",
        lambda g: g.add(Triple(EX["iphone7/35-207306-844818-0"], EX.height, Literal("3 s", CDT.length))) and g,
    ),
}


@pytest.mark.parametrize("name", GROUND_TRUTH)
def test_ground_truth_fixtures_have_no_errors(name):
    report = validate(normalized(name))
    assert report.conforms
    assert report.counts["Error"] == 0


@pytest.mark.parametrize("mutation", sorted(MUTATIONS))
def test_single_mutation_yields_one_error(mutation):
    name, rule, mutate = MUTATIONS[mutation]
    g = normalized(name)
    before = validate(g).errors()
    after = validate(mutate(g)).errors()
    assert before == []
    assert [f.rule_id for f in after] == [rule]


def test_mutation_suite_covers_the_hard_rules():
    assert len(MUTATIONS) >= 10
    assert {rule for _, rule, _ in MUTATIONS.values()} == {"R1", "R2", "R3", "R8"}


def test_sampling_fixture():
    report = validate(load("sampling.ttl"))
    r7 = report.by_rule("R7")
    assert [f.focus for f in r7] == [EX.IceCore12Obs]
    assert report.by_rule("R3") == []
    assert report.conforms


def test_sensor_that_is_also_a_feature():
    g = Graph()
    for cls in (SOSA.Sensor, SOSA.FeatureOfInterest, SOSA.Sample, SOSA.Result):
        g.add(Triple(EX.thing, RDF_TYPE, cls))
    g.add(Triple(EX.thing, SOSA.isSampleOf, EX.thing))
    g.add(Triple(EX.obs, RDF_TYPE, SOSA.Observation))
    g.add(Triple(EX.obs, SOSA.madeBySensor, EX.thing))
    g.add(Triple(EX.obs, SOSA.hasFeatureOfInterest, EX.thing))
    g.add(Triple(EX.obs, SOSA.hasResult, EX.thing))
    assert validate(g).errors() == []


def test_empty_graph():
    report = validate(Graph(), strict=True, geo_sanity=True)
    assert report.findings == ()
    assert report.conforms


def test_strict_promotes_warnings():
    g = load("sampling.ttl")
    lax = validate(g)
    strict = validate(g, strict=True)
    assert lax.warnings() and lax.conforms
    assert strict.warnings() == [] and not strict.conforms
    assert len(strict.errors()) == len(lax.findings)


def test_sample_link_rule_can_be_demoted():
    g = Graph([Triple(EX.s, RDF_TYPE, SOSA.Sample)])
    assert [f.rule_id for f in validate(g).errors()] == ["R3"]
    lenient = validate(g, sample_link_error=False)
    assert lenient.conforms and [f.rule_id for f in lenient.warnings()] == ["R3"]


def test_incoming_has_sample_satisfies_link():
    g = Graph([Triple(EX.s, RDF_TYPE, SOSA.Sample), Triple(EX.f, SOSA.hasSample, EX.s)])
    assert validate(g).by_rule("R3") == []


def test_geo_sanity_is_opt_in():
    g = Graph([Triple(EX.p, GEO.lat, Literal("91", XSD.decimal)), Triple(EX.p, GEO.long, Literal("-180", XSD.decimal))])
    assert validate(g).by_rule("R9") == []
    found = validate(g, geo_sanity=True).by_rule("R9")
    assert [(f.path, f.severity) for f in found] == [(GEO.lat, Severity.WARNING)]
    assert validate(load("sampling.ttl"), geo_sanity=True).by_rule("R9") == []


def test_result_and_sampling_rules():
    g = Graph(
        [
            Triple(EX.o, RDF_TYPE, SOSA.Observation),
            Triple(EX.s, RDF_TYPE, SOSA.Sampling),
            Triple(EX.s, SOSA.hasResult, EX.core),
        ]
    )
    report = validate(g)
    assert [f.focus for f in report.by_rule("R6")] == [EX.o]
    assert [f.focus for f in report.by_rule("R10")] == [EX.core]


def test_result_given_through_inverse():
    g = Graph([Triple(EX.o, RDF_TYPE, SOSA.Observation), Triple(EX.r, SOSA.isResultOf, EX.o)])
    assert validate(g).by_rule("R6") == []


def test_domain_warnings_deduplicated_per_property():
    g = Graph([Triple(EX.x, SOSA.hosts, EX[f"s{i}"]) for i in range(5)])
    assert len([f for f in validate(g).by_rule("R4") if f.focus == EX.x]) == 1


def test_inverse_closure_avoids_false_range_warnings():
    report = validate(load("hosting.ttl"))
    paths = {f.path for f in report.by_rule("R4") + report.by_rule("R5")}
    assert SOSA.hosts not in paths and SOSA.isHostedBy not in paths
    # an Actuator using a procedure is outside usedProcedure's domainIncludes
    assert [f.focus for f in report.by_rule("R4")] == [EX["actuator/philips/HJC42XB/bulb"]]


def test_report_ordering_and_formats():
    g = Graph(
        [
            Triple(EX.b, RDF_TYPE, SOSA.Sample),
            Triple(EX.a, RDF_TYPE, SOSA.Sample),
            Triple(EX.a, SOSA.resultTime, EX.t),
            Triple(EX.o, RDF_TYPE, SOSA.Observation),
        ]
    )
    report = validate(g)
    keys = [(f.severity, f.rule_id, f.focus) for f in report.findings]
    assert keys[:3] == [(Severity.ERROR, "R1", EX.a), (Severity.ERROR, "R3", EX.a), (Severity.ERROR, "R3", EX.b)]
    assert all(f.severity is Severity.WARNING for f in report.findings[3:])
    lines = report.to_json_lines().splitlines()
    assert len(lines) == len(report.findings)
    first = json.loads(lines[0])
    assert set(first) == {"severity", "ruleId", "focus", "path", "message"}
    assert report.to_text().splitlines()[-1].startswith("conforms: false")


def test_every_rule_has_a_name_and_severity():
    assert list(RULES) == [f"R{i}" for i in range(1, 11)]


@given(st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_validation_is_deterministic(rng):
    g = random_graph(rng)
    h = Graph(reversed(sorted(g, key=str)))
    assert validate(g).to_text() == validate(h).to_text()
    assert validate(g).to_json_lines() == validate(g).to_json_lines()


FRESH = Namespace("http://example.org/fresh/")


def _local(term):
    return getattr(term, "value", getattr(term, "label", "")).rsplit("/", 1)[-1]


def _finding_ids(report):
    return {(f.severity, f.rule_id, f.focus, f.path, f.message) for f in report.findings}


@given(st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_adding_unrelated_triples_keeps_findings(rng):
    g = random_graph(rng)
    extension = Graph()
    for _ in range(rng.randint(1, 10)):
        s, p, o = random_triple(rng)
        s = FRESH[_local(s)]
        if p != RDF_TYPE and not isinstance(o, Literal):
            o = FRESH[_local(o)]
        extension.add(Triple(s, p, o))
    bigger = g.copy()
    bigger.update(extension)
    assert _finding_ids(validate(g)) <= _finding_ids(validate(bigger))


@given(st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_inference_never_adds_domain_or_range_warnings(rng):
    g = random_graph(rng)
    enriched, _ = infer(g, "all")
    count = lambda r: len(r.by_rule("R4")) + len(r.by_rule("R5"))
    assert count(validate(enriched)) <= count(validate(g))
