"""Checks a graph against SOSA's hard invariants and its informal
domainIncludes/rangeIncludes annotations.

Rule catalog:

    R1  resultTime-literal      Error    resultTime object is an xsd:dateTime/dateTimeStamp literal
    R2  phenomenonTime-object   Error    phenomenonTime object is a node, not a literal
    R3  sample-linked           Error    a Sample has isSampleOf, or is the object of hasSample
    R4  domain-includes         Warning  subject typed with one of the property's domainIncludes
    R5  range-includes          Warning  object typed with one of the property's rangeIncludes
    R6  result-present          Warning  an Observation/Actuation has hasResult or hasSimpleResult
    R7  simple-result-unitless  Warning  hasSimpleResult is a cdt-typed literal
    R8  cdt-dimension           Error    cdt literals parse and match the datatype's dimension
    R9  geo-range               Warning  geo:lat in [-90, 90], geo:long in [-180, 180] (opt-in)
    R10 sampling-result-sample  Warning  the result of a Sampling is typed Sample

R4 and R5 look at types after inverse closure and the alignment type
rules, so idiomatic data does not need ``infer`` first. That closure is
computed on a copy; the input graph is never modified.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Dict, List, Optional, Set, Tuple

from .infer import materialize
from .model import is_instant_literal
from .rdf import RDF_TYPE, BNode, Graph, IRI, Literal, Term, term_key
from .units import UnitError, UnitTable, default_unit_table, is_cdt_literal, literal_quantity
from .vocab import GEO, SOSA, Vocabulary, default_vocabulary


class Severity(str, enum.Enum):
    ERROR = "Error"
    WARNING = "Warning"


RULES: Dict[str, Tuple[str, Severity]] = {
    "R1": ("resultTime-literal", Severity.ERROR),
    "R2": ("phenomenonTime-object", Severity.ERROR),
    "R3": ("sample-linked", Severity.ERROR),
    "R4": ("domain-includes", Severity.WARNING),
    "R5": ("range-includes", Severity.WARNING),
    "R6": ("result-present", Severity.WARNING),
    "R7": ("simple-result-unitless", Severity.WARNING),
    "R8": ("cdt-dimension", Severity.ERROR),
    "R9": ("geo-range", Severity.WARNING),
    "R10": ("sampling-result-sample", Severity.WARNING),
}
_RULE_ORDER = {rid: i for i, rid in enumerate(RULES)}
_CLOSURE_RULES = ("I1", "I2", "I3", "I4", "I5", "I7")


@dataclass(frozen=True)
class Finding:
    severity: Severity
    rule_id: str
    focus: Term
    path: Optional[IRI]
    message: str

    @property
    def rule_name(self) -> str:
        return RULES[self.rule_id][0]

    def sort_key(self):
        return (
            0 if self.severity is Severity.ERROR else 1,
            _RULE_ORDER[self.rule_id],
            term_key(self.focus),
            self.path.value if self.path else "",
            self.message,
        )

    def as_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "ruleId": self.rule_id,
            "focus": _show(self.focus),
            "path": self.path.value if self.path else None,
            "message": self.message,
        }


def _show(term: Term) -> str:
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, BNode):
        return str(term)
    return term.n3()


@dataclass(frozen=True)
class ValidationReport:
    findings: Tuple[Finding, ...]

    @property
    def counts(self) -> Dict[str, int]:
        counts = {s.value: 0 for s in Severity}
        for f in self.findings:
            counts[f.severity.value] += 1
        return counts

    @property
    def conforms(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    def warnings(self) -> List[Finding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]

    def by_rule(self, rule_id: str) -> List[Finding]:
        return [f for f in self.findings if f.rule_id == rule_id]

    def to_text(self) -> str:
        lines = []
        for f in self.findings:
            where = f" [{f.path.value}]" if f.path else ""
            lines.append(f"{f.severity.value.upper()} {f.rule_id} {f.rule_name} {_show(f.focus)}{where}: {f.message}")
        c = self.counts
        lines.append(
            f"conforms: {'true' if self.conforms else 'false'} "
            f"({c['Error']} errors, {c['Warning']} warnings)"
        )
        return "\n".join(lines) + "\n"

    def to_json_lines(self) -> str:
        return "".join(json.dumps(f.as_dict(), sort_keys=True) + "\n" for f in self.findings)


class _Collector:
    def __init__(self, strict: bool, sample_link_error: bool):
        self.strict = strict
        self.sample_link_error = sample_link_error
        self.found: Dict[tuple, Finding] = {}

    def add(self, rule_id: str, focus: Term, path: Optional[IRI], message: str) -> None:
        severity = RULES[rule_id][1]
        if rule_id == "R3" and not self.sample_link_error:
            severity = Severity.WARNING
        if self.strict:
            severity = Severity.ERROR
        key = (rule_id, focus, path)
        if key not in self.found:
            self.found[key] = Finding(severity, rule_id, focus, path, message)


def _short(vocab: Vocabulary, iris) -> str:
    return ", ".join(sorted(vocab.curie(i) for i in iris))


def validate(
    graph: Graph,
    strict: bool = False,
    geo_sanity: bool = False,
    sample_link_error: bool = True,
    vocab: Optional[Vocabulary] = None,
    units: Optional[UnitTable] = None,
) -> ValidationReport:
    """Apply every rule in the catalog and return a deterministic report.

    ``strict`` turns every Warning into an Error; ``sample_link_error=False``
    demotes R3 to a Warning. Never raises on graph content.
    """
    vocab = vocab or default_vocabulary()
    units = units or default_unit_table()
    out = _Collector(strict, sample_link_error)
    closure, _ = materialize(graph, _CLOSURE_RULES, vocab=vocab)

    for s, p, o in graph.triples(None, SOSA.resultTime, None):
        if not isinstance(o, Literal):
            out.add("R1", s, p, f"resultTime must be a dateTime literal, not the node {_show(o)}")
        elif not is_instant_literal(o):
            out.add("R1", s, p, f"resultTime literal {o.n3()} is not a valid xsd:dateTime or xsd:dateTimeStamp")

    for s, p, o in graph.triples(None, SOSA.phenomenonTime, None):
        if isinstance(o, Literal):
            out.add("R2", s, p, f"phenomenonTime must point to a time entity, not the literal {o.n3()}")

    for sample in closure.subjects(RDF_TYPE, SOSA.Sample):
        if next(closure.triples(sample, SOSA.isSampleOf, None), None) is None:
            out.add("R3", sample, SOSA.isSampleOf, "sample is not linked to a feature of interest via isSampleOf/hasSample")

    type_cache: Dict[Term, Set[IRI]] = {}

    def types(node: Term) -> Set[IRI]:
        cached = type_cache.get(node)
        if cached is None:
            cached = type_cache[node] = closure.types(node)
        return cached

    for prop, info in sorted(vocab.properties.items(), key=lambda kv: kv[0].value):
        for s, p, o in closure.triples(None, prop, None):
            if info.domain_includes and not (types(s) & info.domain_includes):
                out.add("R4", s, p, f"subject has none of the expected types ({_short(vocab, info.domain_includes)})")
            if (
                info.is_object
                and info.range_includes
                and not isinstance(o, Literal)
                and not (types(o) & info.range_includes)
            ):
                out.add("R5", o, p, f"object has none of the expected types ({_short(vocab, info.range_includes)})")

    for cls in (SOSA.Observation, SOSA.Actuation):
        for act in closure.subjects(RDF_TYPE, cls):
            has_result = next(closure.triples(act, SOSA.hasResult, None), None)
            has_simple = next(graph.triples(act, SOSA.hasSimpleResult, None), None)
            if has_result is None and has_simple is None:
                out.add("R6", act, None, f"{vocab.curie(cls)} has neither hasResult nor hasSimpleResult")

    for s, p, o in graph.triples(None, SOSA.hasSimpleResult, None):
        if not is_cdt_literal(o):
            out.add("R7", s, p, f"simple result {_show(o)} carries no unit (not a cdt literal)")

    for s, p, o in graph:
        if is_cdt_literal(o):
            try:
                literal_quantity(o, units)
            except UnitError as exc:
                out.add("R8", s, p, f"{o.n3()}: {exc}")

    if geo_sanity:
        for prop, bound in ((GEO.lat, 90), (GEO.long, 180)):
            for s, p, o in graph.triples(None, prop, None):
                value = None
                if isinstance(o, Literal):
                    try:
                        value = Decimal(o.lexical.strip())
                    except InvalidOperation:
                        value = None
                if value is None or not value.is_finite():
                    out.add("R9", s, p, f"{_show(o)} is not a number")
                elif not -bound <= value <= bound:
                    out.add("R9", s, p, f"{o.lexical} is outside [-{bound}, {bound}]")

    for sampling in closure.subjects(RDF_TYPE, SOSA.Sampling):
        for result in closure.objects(sampling, SOSA.hasResult):
            if isinstance(result, Literal) or SOSA.Sample not in types(result):
                out.add("R10", result, SOSA.hasResult, "result of a Sampling is not typed sosa:Sample")

    findings = tuple(sorted(out.found.values(), key=Finding.sort_key))
    return ValidationReport(findings)
