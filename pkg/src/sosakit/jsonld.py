"""Flat JSON-LD: a ``@context`` of plain prefix mappings plus a ``@graph`` of
node objects whose values are ``@id`` references, ``@value`` objects or
plain JSON scalars.

Term definitions, ``@container``, ``@reverse``, ``@list``, remote contexts
and embedded node objects are rejected with :class:`ParseError`.
"""

from __future__ import annotations

import json
import re
from typing import Any, Dict, List, Optional

from .errors import ParseError
from .rdf import RDF_TYPE, XSD, XSD_STRING, BNode, Graph, IRI, Literal, Term, Triple, term_key

__all__ = ["parse_jsonld", "serialize_jsonld"]

_SCHEME_ONLY = {"urn", "mailto", "tag", "did", "data", "file"}
_COMPACT_SAFE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.context: Dict[str, str] = {}

    def fail(self, message: str, needle: Optional[str] = None) -> ParseError:
        offset = 0
        if needle is not None:
            found = self.text.find(json.dumps(needle))
            if found >= 0:
                offset = found
        return ParseError.at(self.text, offset, message)

    def load_context(self, ctx: Any) -> None:
        if ctx is None:
            return
        if isinstance(ctx, str):
            raise self.fail("remote @context is not supported", ctx)
        if isinstance(ctx, list):
            for item in ctx:
                self.load_context(item)
            return
        if not isinstance(ctx, dict):
            raise self.fail("@context must be an object")
        for prefix, ns in ctx.items():
            if prefix.startswith("@"):
                raise self.fail(f"context keyword {prefix} is not supported", prefix)
            if not isinstance(ns, str):
                raise self.fail(f"term definition for {prefix!r} is not supported; only prefix mappings", prefix)
            self.context[prefix] = ns

    def expand(self, value: str) -> Term:
        if value.startswith("_:"):
            return BNode(value[2:])
        return self.expand_iri(value)

    def expand_iri(self, value: str) -> IRI:
        prefix, sep, local = value.partition(":")
        if not sep:
            return IRI(value)
        if prefix in self.context:
            return IRI(self.context[prefix] + local)
        if local.startswith("//") or prefix.lower() in _SCHEME_ONLY:
            return IRI(value)
        raise self.fail(f"unknown prefix {prefix + ':'!r}", value)

    def literal(self, value: Any, key: str) -> Literal:
        if isinstance(value, bool):
            return Literal("true" if value else "false", XSD.boolean)
        if isinstance(value, int):
            return Literal(str(value), XSD.integer)
        if isinstance(value, float):
            return Literal(repr(value), XSD.double)
        if isinstance(value, str):
            return Literal(value)
        raise self.fail(f"unsupported value for {key!r}", key)

    def value(self, value: Any, key: str) -> Optional[Term]:
        if value is None:
            return None
        if not isinstance(value, dict):
            return self.literal(value, key)
        if "@id" in value:
            if len(value) > 1:
                raise self.fail(f"nested node objects under {key!r} are not supported; use an @id reference", key)
            return self.expand(value["@id"])
        if "@value" in value:
            extra = set(value) - {"@value", "@type", "@language"}
            if extra:
                raise self.fail(f"unsupported keys {sorted(extra)} in value object", key)
            raw = value["@value"]
            if "@language" in value:
                return Literal(str(raw), lang=value["@language"])
            if "@type" in value:
                lexical = raw if isinstance(raw, str) else self.literal(raw, key).lexical
                return Literal(lexical, self.expand_iri(value["@type"]))
            return self.literal(raw, key)
        if "@list" in value or "@set" in value:
            raise self.fail(f"@list/@set under {key!r} is not supported", key)
        raise self.fail(f"nested node objects under {key!r} are not supported", key)

    def node(self, obj: Any, graph: Graph) -> None:
        if not isinstance(obj, dict):
            raise self.fail("node objects must be JSON objects")
        if "@context" in obj:
            self.load_context(obj["@context"])
        ident = obj.get("@id")
        subject = self.expand(ident) if isinstance(ident, str) else None
        if subject is None:
            if any(not k.startswith("@") for k in obj) or "@type" in obj:
                raise self.fail("node objects must carry an @id")
            return
        for key, raw in obj.items():
            if key in ("@id", "@context"):
                continue
            values = raw if isinstance(raw, list) else [raw]
            if key == "@type":
                for t in values:
                    if not isinstance(t, str):
                        raise self.fail("@type values must be strings", key)
                    graph.add(Triple(subject, RDF_TYPE, self.expand_iri(t)))
                continue
            if key.startswith("@"):
                raise self.fail(f"keyword {key} is not supported", key)
            predicate = self.expand_iri(key)
            for v in values:
                term = self.value(v, key)
                if term is not None:
                    graph.add(Triple(subject, predicate, term))

    def parse(self) -> Graph:
        try:
            doc = json.loads(self.text)
        except json.JSONDecodeError as exc:
            offset = exc.pos
            raise ParseError.at(self.text, offset, f"malformed JSON: {exc.msg}") from None
        graph = Graph()
        if isinstance(doc, dict) and "@graph" in doc:
            self.load_context(doc.get("@context"))
            nodes = doc["@graph"]
            if not isinstance(nodes, list):
                nodes = [nodes]
            for obj in nodes:
                self.node(obj, graph)
        elif isinstance(doc, dict):
            self.node(doc, graph)
        else:
            raise self.fail("top level must be a node object or an object with @graph")
        graph.prefixes = dict(self.context)
        return graph


def parse_jsonld(text: str) -> Graph:
    """Read flat JSON-LD into a :class:`Graph`; blank labels are preserved."""
    return _Reader(text).parse()


def _compact(iri: IRI, namespaces) -> str:
    for prefix, ns in namespaces:
        if iri.value.startswith(ns):
            local = iri.value[len(ns):]
            if not local.startswith("//"):
                return f"{prefix}:{local}"
    return iri.value


def serialize_jsonld(graph: Graph, indent: Optional[int] = 2) -> str:
    namespaces = sorted(
        ((p, ns) for p, ns in graph.prefixes.items() if _COMPACT_SAFE.match(p)),
        key=lambda item: (-len(item[1]), item[0]),
    )
    labels: Dict[BNode, str] = {}

    def ident(term) -> str:
        if isinstance(term, BNode):
            if term not in labels:
                labels[term] = f"_:b{len(labels)}"
            return labels[term]
        return _compact(term, namespaces)

    def value(term: Term) -> Any:
        if isinstance(term, Literal):
            if term.lang is not None:
                return {"@value": term.lexical, "@language": term.lang}
            if term.datatype == XSD_STRING:
                return term.lexical
            return {"@value": term.lexical, "@type": _compact(term.datatype, namespaces)}
        return {"@id": ident(term)}

    nodes: List[Dict[str, Any]] = []
    for subject in sorted(graph.subject_terms(), key=term_key):
        node: Dict[str, Any] = {"@id": ident(subject)}
        grouped: Dict[IRI, list] = {}
        for _, p, o in graph.triples(subject, None, None):
            grouped.setdefault(p, []).append(o)
        types = grouped.pop(RDF_TYPE, [])
        iri_types = sorted(_compact(t, namespaces) for t in types if isinstance(t, IRI))
        if iri_types and len(iri_types) == len(types):
            node["@type"] = iri_types[0] if len(iri_types) == 1 else iri_types
        elif types:
            grouped[RDF_TYPE] = types
        for p in sorted(grouped, key=lambda x: _compact(x, namespaces)):
            vals = [value(o) for o in sorted(grouped[p], key=term_key)]
            node[_compact(p, namespaces)] = vals[0] if len(vals) == 1 else vals
        nodes.append(node)
    doc = {"@context": dict(sorted(graph.prefixes.items())), "@graph": nodes}
    return json.dumps(doc, indent=indent, ensure_ascii=False) + "\n"
