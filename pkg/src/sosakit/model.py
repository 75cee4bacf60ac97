from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import FrozenSet, Mapping, Optional, Set, Tuple, Union

from .rdf import RDF_TYPE, XSD, BNode, Graph, IRI, Literal, Term, Triple
from .vocab import SOSA, Vocabulary, default_vocabulary

log = logging.getLogger(__name__)

XSD_DATETIME = XSD.dateTime
XSD_DATETIMESTAMP = XSD.dateTimeStamp
TIME_DATATYPES = frozenset({XSD_DATETIME, XSD_DATETIMESTAMP})

_DATETIME = re.compile(
    r"^-?\d{4,}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(?:\.\d+)?(?P<tz>Z|[+-]\d{2}:\d{2})?$"
)


class ModelError(ValueError):
    pass


def is_instant_literal(term: Term) -> bool:
    """An xsd:dateTime literal, or an xsd:dateTimeStamp carrying a timezone."""
    if not isinstance(term, Literal) or term.datatype not in TIME_DATATYPES:
        return False
    m = _DATETIME.match(term.lexical)
    if m is None:
        return False
    return term.datatype != XSD_DATETIMESTAMP or m.group("tz") is not None


@dataclass(frozen=True)
class InstantLiteral:
    literal: Literal


@dataclass(frozen=True)
class TimeEntity:
    node: Union[IRI, BNode]


TimeValue = Union[InstantLiteral, TimeEntity]


@dataclass(frozen=True)
class EntityView:
    """Read-only view of one node and the SOSA classes asserted for it.

    Several classes at once is normal: SOSA declares no disjointness.
    """

    node: Term
    graph: Graph = field(compare=False, hash=False, repr=False)
    sosa_types: FrozenSet[IRI] = frozenset()

    def values(self, prop: IRI) -> Set[Term]:
        return set(self.graph.objects(self.node, prop))

    def value(self, prop: IRI) -> Optional[Term]:
        found = sorted(self.values(prop), key=str)
        return found[0] if found else None

    def result_time(self) -> Optional[InstantLiteral]:
        v = self.value(SOSA.resultTime)
        return InstantLiteral(v) if isinstance(v, Literal) else None

    def phenomenon_time(self) -> Optional[TimeEntity]:
        v = self.value(SOSA.phenomenonTime)
        return TimeEntity(v) if isinstance(v, (IRI, BNode)) else None


def view(graph: Graph, node: Term, vocab: Optional[Vocabulary] = None) -> EntityView:
    vocab = vocab or default_vocabulary()
    return EntityView(node, graph, frozenset(graph.types(node) & vocab.classes))


def entities_of_class(graph: Graph, cls: IRI, vocab: Optional[Vocabulary] = None) -> Set[EntityView]:
    return {view(graph, s, vocab) for s in graph.subjects(RDF_TYPE, cls)}


def _as_node(value, what: str) -> Union[IRI, BNode]:
    if isinstance(value, str):
        return IRI(value)
    if isinstance(value, (IRI, BNode)):
        return value
    raise ModelError(f"{what} must be an IRI or blank node, got {value!r}")


def build_observation(
    graph: Graph,
    id: Union[IRI, str],
    *,
    sensor=None,
    procedure=None,
    feature_of_interest=None,
    observed_property=None,
    result=None,
    simple_result=None,
    result_time=None,
    phenomenon_time=None,
) -> Graph:
    """Assert an observation and its links into ``graph`` (in place) and return it.

    ``result_time`` accepts an xsd:dateTime/dateTimeStamp literal or a
    dateTime lexical string; ``simple_result`` must be a Literal.
    """
    node = _as_node(id, "observation id")
    if (node, RDF_TYPE, SOSA.Observation) in graph:
        raise ModelError(f"{node} is already typed sosa:Observation")
    if result is not None and simple_result is not None:
        raise ModelError("give either result or simple_result, not both")
    if simple_result is not None and not isinstance(simple_result, Literal):
        raise ModelError("simple_result must be a Literal")
    if isinstance(result_time, str):
        result_time = Literal(result_time, XSD_DATETIME)
    if result_time is not None and not is_instant_literal(result_time):
        raise ModelError("result_time must be an xsd:dateTime or xsd:dateTimeStamp literal")

    triples = [Triple(node, RDF_TYPE, SOSA.Observation)]
    links = (
        (SOSA.madeBySensor, sensor),
        (SOSA.usedProcedure, procedure),
        (SOSA.hasFeatureOfInterest, feature_of_interest),
        (SOSA.observedProperty, observed_property),
        (SOSA.hasResult, result),
        (SOSA.phenomenonTime, phenomenon_time),
    )
    for prop, value in links:
        if value is not None:
            triples.append(Triple(node, prop, _as_node(value, prop.value)))
    if simple_result is not None:
        triples.append(Triple(node, SOSA.hasSimpleResult, simple_result))
    if result_time is not None:
        triples.append(Triple(node, SOSA.resultTime, result_time))
    graph.update(triples)
    return graph


def normalize_property_names(
    graph: Graph, synonyms: Optional[Mapping[IRI, IRI]] = None
) -> Tuple[Graph, int]:
    """Rewrite non-canonical predicates to their canonical SOSA names.

    Returns a new graph and the number of triples rewritten. Only the
    predicate position is touched.
    """
    if synonyms is None:
        synonyms = default_vocabulary().synonyms
    out = graph.copy()
    count = 0
    for old, new in synonyms.items():
        for t in list(out.triples(None, old, None)):
            out.remove(t)
            out.add(Triple(t.subject, new, t.object))
            count += 1
            log.info("renamed %s -> %s on %s", old.value, new.value, t.subject)
    return out, count
