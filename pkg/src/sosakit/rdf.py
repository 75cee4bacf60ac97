"""RDF terms, triples and an indexed in-memory graph.

Terms compare syntactically: two literals are equal only when lexical form,
datatype and language tag all match. Value-space comparison of quantities
lives in :mod:`sosakit.units`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, NamedTuple, Optional, Set, Union


@dataclass(frozen=True, slots=True)
class IRI:
    value: str

    def __str__(self) -> str:
        return self.value

    def n3(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class BNode:
    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"

    def n3(self) -> str:
        return f"_:{self.label}"


XSD_NS = "http://www.w3.org/2001/XMLSchema#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_STRING = IRI(XSD_NS + "string")
RDF_LANGSTRING = IRI(RDF_NS + "langString")


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: IRI = XSD_STRING
    lang: Optional[str] = None

    def __post_init__(self) -> None:
        if self.lang is not None and self.datatype != RDF_LANGSTRING:
            object.__setattr__(self, "datatype", RDF_LANGSTRING)
        elif self.lang is None and self.datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal requires a language tag")

    def __str__(self) -> str:
        return self.lexical

    def n3(self) -> str:
        text = self.lexical.replace("\\", "\\\\").replace('"', '\\"')
        text = text.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        if self.lang is not None:
            return f'"{text}"@{self.lang}'
        if self.datatype == XSD_STRING:
            return f'"{text}"'
        return f'"{text}"^^{self.datatype.n3()}'


Term = Union[IRI, BNode, Literal]


class Triple(NamedTuple):
    subject: Union[IRI, BNode]
    predicate: IRI
    object: Term


class Namespace(str):
    """String subclass whose attribute and item access build IRIs."""

    def __getattr__(self, name: str) -> IRI:
        if name.startswith("__"):
            raise AttributeError(name)
        return IRI(str(self) + name)

    def __getitem__(self, name):  # type: ignore[override]
        if isinstance(name, str):
            return IRI(str(self) + name)
        return str.__getitem__(self, name)


RDF = Namespace(RDF_NS)
RDFS = Namespace(RDFS_NS)
XSD = Namespace(XSD_NS)

RDF_TYPE = RDF.type


def term_key(term: Term) -> tuple:
    """Total sort key over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, IRI):
        return (0, term.value, "", "")
    if isinstance(term, BNode):
        return (1, term.label, "", "")
    return (2, term.lexical, term.datatype.value, term.lang or "")


def triple_key(t: Triple) -> tuple:
    return (term_key(t.subject), term_key(t.predicate), term_key(t.object))


class Graph:
    """A set of triples with per-position indexes and a prefix map.

    Mutable during construction. Once handed to validation, inference or
    serialization it is only read, so sharing it between readers is safe.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[Dict[str, str]] = None):
        self._triples: Set[Triple] = set()
        self._by_s: Dict[Term, Set[Triple]] = {}
        self._by_p: Dict[Term, Set[Triple]] = {}
        self._by_o: Dict[Term, Set[Triple]] = {}
        self.prefixes: Dict[str, str] = dict(prefixes or {})
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> bool:
        """Insert ``triple``; return False if it was already present."""
        if triple in self._triples:
            return False
        s, p, o = triple
        if isinstance(s, Literal):
            raise TypeError("literal in subject position")
        if not isinstance(p, IRI):
            raise TypeError("predicate must be an IRI")
        if not isinstance(triple, Triple):
            triple = Triple(s, p, o)
        self._triples.add(triple)
        self._by_s.setdefault(s, set()).add(triple)
        self._by_p.setdefault(p, set()).add(triple)
        self._by_o.setdefault(o, set()).add(triple)
        return True

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.add(t))

    def remove(self, triple: Triple) -> bool:
        if triple not in self._triples:
            return False
        self._triples.discard(triple)
        for index, key in ((self._by_s, triple[0]), (self._by_p, triple[1]), (self._by_o, triple[2])):
            bucket = index[key]
            bucket.discard(triple)
            if not bucket:
                del index[key]
        return True

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __repr__(self) -> str:
        return f"<Graph of {len(self)} triples>"

    def copy(self) -> "Graph":
        g = Graph(prefixes=self.prefixes)
        g._triples = set(self._triples)
        g._by_s = {k: set(v) for k, v in self._by_s.items()}
        g._by_p = {k: set(v) for k, v in self._by_p.items()}
        g._by_o = {k: set(v) for k, v in self._by_o.items()}
        return g

    def triples(self, s: Optional[Term] = None, p: Optional[Term] = None, o: Optional[Term] = None) -> Iterator[Triple]:
        """Yield triples agreeing with every bound (non-None) position."""
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)  # type: ignore[arg-type]
            if t in self._triples:
                yield t
            return
        candidates = None
        for index, key in ((self._by_s, s), (self._by_p, p), (self._by_o, o)):
            if key is None:
                continue
            bucket = index.get(key)
            if not bucket:
                return
            if candidates is None or len(bucket) < len(candidates):
                candidates = bucket
        if candidates is None:
            yield from list(self._triples)
            return
        for t in list(candidates):
            if (s is None or t[0] == s) and (p is None or t[1] == p) and (o is None or t[2] == o):
                yield t

    def match(self, s: Optional[Term] = None, p: Optional[Term] = None, o: Optional[Term] = None) -> Set[Triple]:
        return set(self.triples(s, p, o))

    def objects(self, s: Term, p: Term) -> Iterator[Term]:
        for t in self.triples(s, p, None):
            yield t[2]

    def subjects(self, p: Term, o: Term) -> Iterator[Term]:
        for t in self.triples(None, p, o):
            yield t[0]

    def types(self, node: Term) -> Set[IRI]:
        return {o for o in self.objects(node, RDF_TYPE) if isinstance(o, IRI)}

    def subject_terms(self) -> Set[Term]:
        return set(self._by_s)

    def nodes(self) -> Set[Term]:
        """Every term used in subject or object position."""
        return set(self._by_s) | set(self._by_o)

    def expand(self, name: str) -> IRI:
        """Expand ``prefix:local`` through the prefix map, or accept ``<iri>``."""
        if name.startswith("<") and name.endswith(">"):
            return IRI(name[1:-1])
        prefix, sep, local = name.partition(":")
        if sep and prefix in self.prefixes:
            return IRI(self.prefixes[prefix] + local)
        if sep and local.startswith("//"):
            return IRI(name)
        raise KeyError(f"unknown prefix in {name!r}")

    def compact(self, iri: IRI) -> str:
        best = None
        for prefix, ns in self.prefixes.items():
            if iri.value.startswith(ns) and (best is None or len(ns) > len(best[1])):
                best = (prefix, ns)
        if best is None:
            return iri.value
        return f"{best[0]}:{iri.value[len(best[1]):]}"


def blank_nodes(graph: Iterable[Triple]) -> Set[BNode]:
    found = set()
    for s, _, o in graph:
        if isinstance(s, BNode):
            found.add(s)
        if isinstance(o, BNode):
            found.add(o)
    return found


def relabel_blanks(graph: Graph, mapping) -> Graph:
    """Copy of ``graph`` with blank nodes renamed by ``mapping`` (dict or callable)."""
    rename = mapping if callable(mapping) else (lambda b: mapping.get(b, b))

    def fix(term):
        return rename(term) if isinstance(term, BNode) else term

    return Graph((Triple(fix(s), p, fix(o)) for s, p, o in graph), prefixes=graph.prefixes)


def _has_blank(t: Triple) -> bool:
    return isinstance(t[0], BNode) or isinstance(t[2], BNode)


def _refine(tri1, blanks1, tri2, blanks2):
    """Iterated neighbourhood refinement of blank-node colours for two graphs.

    A shared palette keeps colours comparable across the two graphs.
    """
    palette: Dict[tuple, int] = {}

    def initial(triples, blanks):
        sig = {b: [] for b in blanks}
        for s, p, o in triples:
            if isinstance(s, BNode):
                sig[s].append(("out", p.value, (-1,) if isinstance(o, BNode) else term_key(o)))
            if isinstance(o, BNode):
                sig[o].append(("in", p.value, (-1,) if isinstance(s, BNode) else term_key(s)))
        return {b: palette.setdefault(("init", tuple(sorted(v))), len(palette)) for b, v in sig.items()}

    def step(triples, blanks, colour):
        sig = {b: [] for b in blanks}
        for s, p, o in triples:
            if isinstance(s, BNode) and isinstance(o, BNode):
                sig[s].append(("out", p.value, colour[o]))
                sig[o].append(("in", p.value, colour[s]))
        return {b: palette.setdefault((colour[b], tuple(sorted(v))), len(palette)) for b, v in sig.items()}

    c1 = initial(tri1, blanks1)
    c2 = initial(tri2, blanks2)
    n_classes = -1
    while True:
        n = len(set(c1.values()) | set(c2.values()))
        if n == n_classes:
            return c1, c2
        n_classes = n
        c1 = step(tri1, blanks1, c1)
        c2 = step(tri2, blanks2, c2)


def isomorphic(g1: Graph, g2: Graph) -> bool:
    """True iff a bijection between blank nodes makes the triple sets equal.

    Backtracking over candidate bijections, pruned by refined per-node
    signatures (degrees and incident predicates). Exponential in the worst
    case; intended for small graphs.
    """
    if len(g1) != len(g2):
        return False
    tri1 = [t for t in g1 if _has_blank(t)]
    tri2 = [t for t in g2 if _has_blank(t)]
    if len(tri1) != len(tri2):
        return False
    for t in g1:
        if not _has_blank(t) and t not in g2:
            return False
    blanks1, blanks2 = blank_nodes(tri1), blank_nodes(tri2)
    if len(blanks1) != len(blanks2):
        return False
    if not blanks1:
        return True

    c1, c2 = _refine(tri1, blanks1, tri2, blanks2)
    hist1: Dict[int, int] = {}
    hist2: Dict[int, int] = {}
    for c in c1.values():
        hist1[c] = hist1.get(c, 0) + 1
    for c in c2.values():
        hist2[c] = hist2.get(c, 0) + 1
    if hist1 != hist2:
        return False

    by_colour: Dict[int, list] = {}
    for b, c in c2.items():
        by_colour.setdefault(c, []).append(b)
    order = sorted(blanks1, key=lambda b: (hist1[c1[b]], c1[b], b.label))
    incident: Dict[BNode, list] = {b: [] for b in blanks1}
    for t in tri1:
        for b in {x for x in (t[0], t[2]) if isinstance(x, BNode)}:
            incident[b].append(t)
    target = set(tri2)
    mapping: Dict[BNode, BNode] = {}
    used: Set[BNode] = set()

    def image(term):
        return mapping.get(term) if isinstance(term, BNode) else term

    def consistent(b) -> bool:
        for s, p, o in incident[b]:
            s2, o2 = image(s), image(o)
            if s2 is None or o2 is None:
                continue
            if Triple(s2, p, o2) not in target:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        b = order[i]
        for cand in by_colour[c1[b]]:
            if cand in used:
                continue
            mapping[b] = cand
            used.add(cand)
            if consistent(b) and search(i + 1):
                return True
            del mapping[b]
            used.discard(cand)
        return False

    return search(0)


_fresh = itertools.count()


def fresh_bnode(prefix: str = "n") -> BNode:
    return BNode(f"{prefix}{next(_fresh)}")
