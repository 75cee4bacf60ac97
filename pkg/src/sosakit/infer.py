"""Forward-chaining materialization of SOSA modelling and alignment axioms.

Rules (ids are stable and used by ``explain`` and the CLI):

    I1  inverse closure over the vocabulary's inverse pairs
    I2  Observation/Actuation/Sampling -> prov:Activity, Procedure -> prov:Plan
    I3  Observation/Actuation/Sampling -> dul:Event
    I4  sosa:Observation <-> om:OM_Observation (both directions)
    I5  oboe:Measurement -> sosa:Observation, Procedure -> oboe:Protocol
    I6  Procedure whose users are all Observations -> sosa-om:ObservationProcedure
    I7  Sensor or ObservationProcedure -> om:OM_Process
    I8  collection classes: membership implies a superclass and fixed property values
    I9  casting: (x, property, individual) <-> x a ClassName

Every rule only adds triples, so the result is the least fixpoint whatever
the application order.

I6 is evaluated closed-world: the universally quantified condition is
checked against the ``usedProcedure`` edges present in the *input* graph
(no rule derives such edges from them), and against the types known at the
current step. It is therefore not part of the default selection and must
be requested explicitly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .rdf import RDF_TYPE, Graph, IRI, Literal, Term, Triple
from .vocab import DUL, OBOE, OM, PROV, SOSA, SOSA_OM, Vocabulary, default_vocabulary

RULE_IDS = ("I1", "I2", "I3", "I4", "I5", "I6", "I7", "I8", "I9")
DEFAULT_RULES = ("I1", "I2", "I3", "I4", "I5", "I7", "I8", "I9")

RULE_NAMES = {
    "inverses": ("I1",),
    "prov": ("I2",),
    "dul": ("I3",),
    "om": ("I4",),
    "oboe": ("I5",),
    "observation-procedure": ("I6",),
    "om-process": ("I7",),
    "collections": ("I8",),
    "casting": ("I9",),
    "alignments": ("I2", "I3", "I4", "I5", "I7"),
    "default": DEFAULT_RULES,
    "all": RULE_IDS,
}

ACTS = (SOSA.Observation, SOSA.Actuation, SOSA.Sampling)

_ABSOLUTE_IRI = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>\"{}|\\^`]+$")


class RuleConfigError(ValueError):
    pass


class NotDerived(LookupError):
    pass


@dataclass(frozen=True)
class CollectionDef:
    collection_class: IRI
    fixed_bindings: Tuple[Tuple[IRI, Term], ...]
    super_class: IRI

    def __post_init__(self) -> None:
        if not self.fixed_bindings:
            raise RuleConfigError(f"collection {self.collection_class} needs at least one fixed binding")
        _check_iri(self.collection_class)
        _check_iri(self.super_class)
        for prop, value in self.fixed_bindings:
            _check_iri(prop)
            if isinstance(value, IRI):
                _check_iri(value)


@dataclass(frozen=True)
class CastingDef:
    class_name: IRI
    property: IRI
    individual: IRI

    def __post_init__(self) -> None:
        for iri in (self.class_name, self.property, self.individual):
            _check_iri(iri)


def _check_iri(iri: object) -> None:
    if not isinstance(iri, IRI) or not _ABSOLUTE_IRI.match(iri.value):
        raise RuleConfigError(f"malformed IRI {iri!r}")


Premises = Tuple[Triple, ...]
Derivations = Iterator[Tuple[Triple, Premises]]


@dataclass(frozen=True)
class Rule:
    id: str
    kind: str
    fire: Callable[[Graph], Derivations] = field(compare=False, repr=False)


def _typed(out: Graph, cls: IRI) -> List[Term]:
    return list(out.subjects(RDF_TYPE, cls))


def _subsume(sources: Sequence[IRI], target: IRI) -> Callable[[Graph], Derivations]:
    def fire(out: Graph) -> Derivations:
        for cls in sources:
            for x in _typed(out, cls):
                yield Triple(x, RDF_TYPE, target), (Triple(x, RDF_TYPE, cls),)

    return fire


def _chain(*fires: Callable[[Graph], Derivations]) -> Callable[[Graph], Derivations]:
    def fire(out: Graph) -> Derivations:
        for f in fires:
            yield from f(out)

    return fire


def _inverse_rule(vocab: Vocabulary) -> Callable[[Graph], Derivations]:
    pairs = vocab.inverse_pairs

    def fire(out: Graph) -> Derivations:
        for p, q in pairs:
            for forward, backward in ((p, q), (q, p)):
                for t in list(out.triples(None, forward, None)):
                    if not isinstance(t.object, Literal):
                        yield Triple(t.object, backward, t.subject), (t,)

    return fire


def _observation_procedure_rule(base: Graph) -> Callable[[Graph], Derivations]:
    users: Dict[Term, List[Triple]] = {}
    for t in base.triples(None, SOSA.usedProcedure, None):
        users.setdefault(t.object, []).append(t)

    def fire(out: Graph) -> Derivations:
        for proc in _typed(out, SOSA.Procedure):
            edges = users.get(proc)
            if not edges:
                continue
            typings = [Triple(e.subject, RDF_TYPE, SOSA.Observation) for e in edges]
            if all(t in out for t in typings):
                premises = (Triple(proc, RDF_TYPE, SOSA.Procedure),) + tuple(edges) + tuple(typings)
                yield Triple(proc, RDF_TYPE, SOSA_OM.ObservationProcedure), premises

    return fire


def _collection_rule(defs: Sequence[CollectionDef]) -> Callable[[Graph], Derivations]:
    def fire(out: Graph) -> Derivations:
        for d in defs:
            for x in _typed(out, d.collection_class):
                premise = (Triple(x, RDF_TYPE, d.collection_class),)
                yield Triple(x, RDF_TYPE, d.super_class), premise
                for prop, value in d.fixed_bindings:
                    yield Triple(x, prop, value), premise

    return fire


def _casting_rule(defs: Sequence[CastingDef]) -> Callable[[Graph], Derivations]:
    def fire(out: Graph) -> Derivations:
        for d in defs:
            for x in _typed(out, d.class_name):
                yield Triple(x, d.property, d.individual), (Triple(x, RDF_TYPE, d.class_name),)
            for x in list(out.subjects(d.property, d.individual)):
                yield Triple(x, RDF_TYPE, d.class_name), (Triple(x, d.property, d.individual),)

    return fire


def resolve_rules(names: Union[str, Iterable[str], None]) -> Tuple[str, ...]:
    """Turn rule ids and group names into an ordered, duplicate-free id tuple."""
    if names is None:
        return DEFAULT_RULES
    if isinstance(names, str):
        names = [n for n in names.split(",")]
    ids: List[str] = []
    for name in names:
        name = name.strip()
        if not name:
            continue
        expanded = (name,) if name in RULE_IDS else RULE_NAMES.get(name)
        if expanded is None:
            raise RuleConfigError(f"unknown rule {name!r}")
        for rid in expanded:
            if rid not in ids:
                ids.append(rid)
    return tuple(ids)


def build_rules(
    graph: Graph,
    selection: Sequence[str],
    collections: Sequence[CollectionDef] = (),
    castings: Sequence[CastingDef] = (),
    vocab: Optional[Vocabulary] = None,
) -> List[Rule]:
    """Rule objects for ``selection`` in the given order; I6 reads ``graph``."""
    vocab = vocab or default_vocabulary()
    factories: Dict[str, Callable[[], Rule]] = {
        "I1": lambda: Rule("I1", "InverseClosure", _inverse_rule(vocab)),
        "I2": lambda: Rule("I2", "TypeSubsumption", _chain(_subsume(ACTS, PROV.Activity), _subsume((SOSA.Procedure,), PROV.Plan))),
        "I3": lambda: Rule("I3", "TypeSubsumption", _subsume(ACTS, DUL.Event)),
        "I4": lambda: Rule(
            "I4",
            "TypeEquivalence",
            _chain(_subsume((SOSA.Observation,), OM.OM_Observation), _subsume((OM.OM_Observation,), SOSA.Observation)),
        ),
        "I5": lambda: Rule(
            "I5",
            "TypeSubsumption",
            _chain(_subsume((OBOE.Measurement,), SOSA.Observation), _subsume((SOSA.Procedure,), OBOE.Protocol)),
        ),
        "I6": lambda: Rule("I6", "ObservationProcedureClassification", _observation_procedure_rule(graph)),
        "I7": lambda: Rule("I7", "TypeSubsumption", _subsume((SOSA.Sensor, SOSA_OM.ObservationProcedure), OM.OM_Process)),
        "I8": lambda: Rule("I8", "CollectionExpansion", _collection_rule(list(collections))),
        "I9": lambda: Rule("I9", "Casting", _casting_rule(list(castings))),
    }
    rules = []
    for rid in selection:
        if rid not in factories:
            raise RuleConfigError(f"unknown rule {rid!r}")
        rules.append(factories[rid]())
    return rules


def materialize(
    graph: Graph,
    rules: Union[str, Sequence[str], None] = None,
    collections: Sequence[CollectionDef] = (),
    castings: Sequence[CastingDef] = (),
    vocab: Optional[Vocabulary] = None,
) -> Tuple[Graph, Dict[Triple, Tuple[str, Premises]]]:
    """Fixpoint of the selected rules plus the first derivation of each new triple."""
    selection = resolve_rules(rules)
    compiled = build_rules(graph, selection, collections, castings, vocab)
    out = graph.copy()
    provenance: Dict[Triple, Tuple[str, Premises]] = {}
    changed = True
    while changed:
        changed = False
        for rule in compiled:
            fresh = [(c, p) for c, p in rule.fire(out) if c not in out]
            for conclusion, premises in fresh:
                if out.add(conclusion):
                    provenance[conclusion] = (rule.id, premises)
                    changed = True
    return out, provenance


def infer(
    graph: Graph,
    rules: Union[str, Sequence[str], None] = None,
    collections: Sequence[CollectionDef] = (),
    castings: Sequence[CastingDef] = (),
    vocab: Optional[Vocabulary] = None,
) -> Tuple[Graph, int]:
    """Materialize ``rules`` over a copy of ``graph``.

    ``rules`` lists rule ids or group names (see ``RULE_NAMES``), applied in
    that order each round; ``None`` selects the default set (all but I6).
    Returns the new graph and the number of added triples.
    """
    out, _ = materialize(graph, rules, collections, castings, vocab)
    return out, len(out) - len(graph)


@dataclass(frozen=True)
class Step:
    rule: str
    conclusion: Triple
    premises: Premises


@dataclass(frozen=True)
class Derivation:
    triple: Triple
    asserted: bool
    steps: Tuple[Step, ...] = ()


def explain(
    graph: Graph,
    rules: Union[str, Sequence[str], None],
    triple: Triple,
    collections: Sequence[CollectionDef] = (),
    castings: Sequence[CastingDef] = (),
    vocab: Optional[Vocabulary] = None,
) -> Derivation:
    """Rule applications leading from asserted triples to ``triple``.

    Steps are ordered so that every premise is asserted or concluded by an
    earlier step.
    """
    if triple in graph:
        return Derivation(triple, asserted=True)
    out, provenance = materialize(graph, rules, collections, castings, vocab)
    if triple not in provenance:
        raise NotDerived(f"{triple} is neither asserted nor derivable")
    steps: List[Step] = []
    seen = set()

    def visit(t: Triple) -> None:
        if t in seen or t not in provenance:
            return
        seen.add(t)
        rule, premises = provenance[t]
        for p in premises:
            visit(p)
        steps.append(Step(rule, t, premises))

    visit(triple)
    return Derivation(triple, asserted=False, steps=tuple(steps))


_RULE_TOKEN = re.compile(r'\s*(<[^>]*>|[=,]|[^\s=,<>]+)')


def _rule_terms(line: str, lineno: int) -> List[str]:
    tokens = []
    pos = 0
    while pos < len(line.rstrip()):
        m = _RULE_TOKEN.match(line, pos)
        if m is None:
            raise RuleConfigError(f"line {lineno}: cannot read {line[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def _rule_iri(token: str, lineno: int, prefixes: Mapping[str, str]) -> IRI:
    if token.startswith("<") and token.endswith(">"):
        iri = IRI(token[1:-1])
    else:
        prefix, sep, local = token.partition(":")
        if not sep or prefix not in prefixes:
            raise RuleConfigError(f"line {lineno}: malformed IRI {token!r}")
        iri = IRI(prefixes[prefix] + local)
    try:
        _check_iri(iri)
    except RuleConfigError as exc:
        raise RuleConfigError(f"line {lineno}: {exc}") from None
    return iri


def parse_rules_file(
    text: str, prefixes: Optional[Mapping[str, str]] = None
) -> Tuple[List[CollectionDef], List[CastingDef]]:
    """Read collection and casting definitions.

    ::

        collection <Class> subclassOf <Super> where <prop> = <value> [, <prop> = <value> ...]
        cast <Class> via <prop> = <individual>

    IRIs are written in angle brackets, or as prefixed names when
    ``prefixes`` maps the prefix.
    """
    prefixes = prefixes or {}
    collections: List[CollectionDef] = []
    castings: List[CastingDef] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _rule_terms(line, lineno)
        head = tokens[0]
        if head == "collection":
            if len(tokens) < 8 or tokens[2] != "subclassOf" or tokens[4] != "where":
                raise RuleConfigError(f"line {lineno}: expected 'collection <C> subclassOf <S> where <p> = <v>'")
            cls = _rule_iri(tokens[1], lineno, prefixes)
            sup = _rule_iri(tokens[3], lineno, prefixes)
            rest = tokens[5:]
            bindings = []
            while rest:
                if len(rest) < 3 or rest[1] != "=":
                    raise RuleConfigError(f"line {lineno}: expected '<p> = <v>' in collection bindings")
                bindings.append((_rule_iri(rest[0], lineno, prefixes), _rule_iri(rest[2], lineno, prefixes)))
                rest = rest[3:]
                if rest:
                    if rest[0] != ",":
                        raise RuleConfigError(f"line {lineno}: expected ',' between bindings")
                    rest = rest[1:]
                    if not rest:
                        raise RuleConfigError(f"line {lineno}: trailing ','")
            collections.append(CollectionDef(cls, tuple(bindings), sup))
        elif head == "cast":
            if len(tokens) != 6 or tokens[2] != "via" or tokens[4] != "=":
                raise RuleConfigError(f"line {lineno}: expected 'cast <C> via <p> = <individual>'")
            castings.append(
                CastingDef(
                    _rule_iri(tokens[1], lineno, prefixes),
                    _rule_iri(tokens[3], lineno, prefixes),
                    _rule_iri(tokens[5], lineno, prefixes),
                )
            )
        else:
            raise RuleConfigError(f"line {lineno}: unknown directive {head!r}")
    return collections, castings


def load_rules_file(path: Union[str, Path], prefixes: Optional[Mapping[str, str]] = None):
    return parse_rules_file(Path(path).read_text(encoding="utf-8"), prefixes)
