"""Reader and writer for the Turtle subset used by SOSA documents.

Supported: ``@prefix``/``PREFIX``, a single leading ``@base``/``BASE``, the
``a`` keyword, ``;`` and ``,`` lists, ``[...]`` blank-node property lists,
``_:label`` blank nodes, typed and language-tagged literals, bare
integer/decimal/double/boolean literals and ``#`` comments.

Collections ``( ... )``, triple-quoted strings and ``@base`` declarations
after the first statement raise :class:`ParseError` naming the feature.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple
from urllib.parse import urljoin

from .errors import ParseError
from .rdf import (
    RDF_TYPE,
    XSD,
    XSD_STRING,
    BNode,
    Graph,
    IRI,
    Literal,
    Term,
    Triple,
    term_key,
)

__all__ = ["parse_turtle", "serialize_turtle", "ParseError"]

_PN_ESC = r"\\[-_~.!$&'()*+,;=/?#@%]"
_LOCAL_FIRST = rf"(?:[A-Za-z0-9_:%/]|{_PN_ESC})"
_LOCAL_MID = rf"(?:[A-Za-z0-9_\-.:/%]|{_PN_ESC})"
_LOCAL_LAST = rf"(?:[A-Za-z0-9_\-:/%]|{_PN_ESC})"

_TOKEN = re.compile(
    r"""
    (?P<ws>(?:\s+|\#[^\n]*)+)
  | (?P<iri><(?:[^<>"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>)
  | (?P<triplequote>\"\"\"|''')
  | (?P<string>"(?:[^"\\\n\r]|\\.)*"|'(?:[^'\\\n\r]|\\.)*')
  | (?P<unterminated>["'])
  | (?P<at>@[A-Za-z][A-Za-z0-9]*(?:-[A-Za-z0-9]+)*)
  | (?P<caret>\^\^)
  | (?P<double>[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+))
  | (?P<decimal>[+-]?\d*\.\d+)
  | (?P<integer>[+-]?\d+)
  | (?P<blank>_:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)
  | (?P<pname>(?:[A-Za-z](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?:
        (?:"""
    + _LOCAL_FIRST
    + r"(?:"
    + _LOCAL_MID
    + r"*"
    + _LOCAL_LAST
    + r""")?)?)
  | (?P<name>[A-Za-z][A-Za-z0-9_\-]*)
  | (?P<punct>[.;,\[\]()])
    """,
    re.VERBOSE,
)

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_UCHAR = re.compile(r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})")
_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")

XSD_INTEGER = XSD.integer
XSD_DECIMAL = XSD.decimal
XSD_DOUBLE = XSD.double
XSD_BOOLEAN = XSD.boolean


def _unescape_string(body: str) -> str:
    if "\\" not in body:
        return body
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in _ECHAR:
            out.append(_ECHAR[nxt])
            i += 2
        elif nxt == "u":
            out.append(chr(int(body[i + 2 : i + 6], 16)))
            i += 6
        elif nxt == "U":
            out.append(chr(int(body[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ValueError(f"invalid escape \\{nxt}")
    return "".join(out)


def _unescape_iri(body: str) -> str:
    if "\\" not in body:
        return body
    return _UCHAR.sub(lambda m: chr(int(m.group(1) or m.group(2), 16)), body)


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    match = _TOKEN.match
    while pos < n:
        m = match(text, pos)
        if m is None:
            raise ParseError.at(text, pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind == "triplequote":
            raise ParseError.at(text, pos, "triple-quoted strings are not supported")
        if kind == "unterminated":
            raise ParseError.at(text, pos, "unterminated string")
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, base: Optional[str]):
        self.text = text
        self.base = base
        self.base_declared = False
        self.tokens = _tokenize(text)
        self.i = 0
        self.graph = Graph()
        self.prefixes: Dict[str, str] = {}
        self.anon = 0
        self.bnodes: Dict[str, BNode] = {}
        self.iris: Dict[str, IRI] = {}

    def error(self, message: str, tok=None) -> ParseError:
        if tok is None:
            tok = self.tokens[self.i] if self.i < len(self.tokens) else None
        if tok is None:
            offset = max(0, len(self.text.rstrip()) - 1)
            return ParseError.at(self.text, offset, message + " (unexpected end of input)")
        return ParseError.at(self.text, tok[2], message)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise self.error("incomplete statement")
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1]!r}", tok)
        return tok

    def iri(self, ref: str) -> IRI:
        cached = self.iris.get(ref)
        if cached is not None:
            return cached
        value = ref
        if self.base is not None and not _SCHEME.match(ref):
            value = urljoin(self.base, ref)
        result = self.iris[ref] = IRI(value)
        return result

    def pname(self, tok) -> IRI:
        prefix, _, local = tok[1].partition(":")
        if prefix not in self.prefixes:
            raise self.error(f"unknown prefix {prefix + ':'!r}", tok)
        if "\\" in local:
            local = re.sub(r"\\(.)", r"\1", local)
        return IRI(self.prefixes[prefix] + local)

    def parse(self) -> Graph:
        while self.peek() is not None:
            self.statement()
        self.graph.prefixes = dict(self.prefixes)
        return self.graph

    def statement(self) -> None:
        kind, value, _ = self.peek()
        if kind == "at" and value in ("@prefix", "@base"):
            self.next()
            if value == "@prefix":
                self.prefix_decl()
            else:
                self.base_decl()
            self.expect(".")
            return
        if kind == "name" and value.upper() in ("PREFIX", "BASE"):
            self.next()
            if value.upper() == "PREFIX":
                self.prefix_decl()
            else:
                self.base_decl()
            return
        self.triples()
        self.expect(".")

    def prefix_decl(self) -> None:
        tok = self.next()
        if tok[0] != "pname" or not tok[1].endswith(":") or tok[1].count(":") != 1:
            raise self.error("expected a prefix name such as 'ex:'", tok)
        iri_tok = self.next()
        if iri_tok[0] != "iri":
            raise self.error("expected <IRI> in prefix declaration", iri_tok)
        self.prefixes[tok[1][:-1]] = self.iri(_unescape_iri(iri_tok[1][1:-1])).value

    def base_decl(self) -> None:
        tok = self.tokens[self.i - 1]
        if self.base_declared or len(self.graph):
            raise self.error("@base re-declaration is not supported", tok)
        iri_tok = self.next()
        if iri_tok[0] != "iri":
            raise self.error("expected <IRI> in base declaration", iri_tok)
        self.base = self.iri(_unescape_iri(iri_tok[1][1:-1])).value
        self.base_declared = True
        self.iris.clear()

    def triples(self) -> None:
        tok = self.peek()
        if tok[1] == "[":
            subject = self.blank_property_list()
            nxt = self.peek()
            if nxt is not None and nxt[1] != ".":
                self.predicate_object_list(subject)
            return
        subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self) -> Term:
        tok = self.next()
        kind = tok[0]
        if kind == "iri":
            return self.iri(_unescape_iri(tok[1][1:-1]))
        if kind == "pname":
            return self.pname(tok)
        if kind == "blank":
            return self.blank(tok[1][2:])
        if tok[1] == "(":
            raise self.error("collections '( ... )' are not supported", tok)
        raise self.error(f"expected a subject, found {tok[1]!r}", tok)

    def blank(self, label: str) -> BNode:
        node = self.bnodes.get(label)
        if node is None:
            node = self.bnodes[label] = BNode(label)
        return node

    def fresh(self) -> BNode:
        # '[' cannot occur in a Turtle label, so these never clash with _:labels
        self.anon += 1
        return BNode(f"[{self.anon}]")

    def predicate_object_list(self, subject: Term) -> None:
        while True:
            predicate = self.verb()
            self.object_list(subject, predicate)
            tok = self.peek()
            if tok is None or tok[1] != ";":
                return
            while tok is not None and tok[1] == ";":
                self.next()
                tok = self.peek()
            if tok is None or tok[1] in (".", "]"):
                return

    def verb(self) -> IRI:
        tok = self.next()
        kind, value, _ = tok
        if kind == "name" and value == "a":
            return RDF_TYPE
        if kind == "iri":
            return self.iri(_unescape_iri(value[1:-1]))
        if kind == "pname":
            return self.pname(tok)
        raise self.error(f"expected a predicate, found {value!r}", tok)

    def object_list(self, subject: Term, predicate: IRI) -> None:
        add = self.graph.add
        while True:
            add(Triple(subject, predicate, self.object()))
            tok = self.peek()
            if tok is None or tok[1] != ",":
                return
            self.next()

    def object(self) -> Term:
        tok = self.next()
        kind, value, _ = tok
        if kind == "iri":
            return self.iri(_unescape_iri(value[1:-1]))
        if kind == "pname":
            return self.pname(tok)
        if kind == "blank":
            return self.blank(value[2:])
        if kind == "string":
            return self.literal(tok)
        if kind == "integer":
            return Literal(value, XSD_INTEGER)
        if kind == "decimal":
            return Literal(value, XSD_DECIMAL)
        if kind == "double":
            return Literal(value, XSD_DOUBLE)
        if kind == "name" and value in ("true", "false"):
            return Literal(value, XSD_BOOLEAN)
        if value == "[":
            self.i -= 1
            return self.blank_property_list()
        if value == "(":
            raise self.error("collections '( ... )' are not supported", tok)
        raise self.error(f"expected an object, found {value!r}", tok)

    def literal(self, tok) -> Literal:
        try:
            lexical = _unescape_string(tok[1][1:-1])
        except (ValueError, IndexError) as exc:
            raise self.error(str(exc), tok) from None
        nxt = self.peek()
        if nxt is not None and nxt[0] == "at" and nxt[2] == tok[2] + len(tok[1]):
            self.next()
            return Literal(lexical, lang=nxt[1][1:])
        if nxt is not None and nxt[0] == "caret":
            self.next()
            dt_tok = self.next()
            if dt_tok[0] == "iri":
                datatype = self.iri(_unescape_iri(dt_tok[1][1:-1]))
            elif dt_tok[0] == "pname":
                datatype = self.pname(dt_tok)
            else:
                raise self.error("expected a datatype IRI after '^^'", dt_tok)
            return Literal(lexical, datatype)
        return Literal(lexical, XSD_STRING)

    def blank_property_list(self) -> BNode:
        self.expect("[")
        node = self.fresh()
        tok = self.peek()
        if tok is not None and tok[1] == "]":
            self.next()
            return node
        self.predicate_object_list(node)
        self.expect("]")
        return node


def parse_turtle(text: str, base: Optional[str] = None) -> Graph:
    """Parse a Turtle document into a :class:`Graph`.

    Relative IRIs are resolved against ``base`` (or a leading ``@base``);
    without either they are kept as written. Raises :class:`ParseError` at
    the first violation.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    return _Parser(text, base).parse()


_PREFIX_OK = re.compile(r"^(?:[A-Za-z](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?$")
_LOCAL_OK = re.compile(r"^(?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?$")
_BARE = {
    XSD_INTEGER: re.compile(r"^[+-]?\d+$"),
    XSD_DECIMAL: re.compile(r"^[+-]?\d*\.\d+$"),
    XSD_DOUBLE: re.compile(r"^[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)$"),
    XSD_BOOLEAN: re.compile(r"^(?:true|false)$"),
}
_IRI_UNSAFE = re.compile(r'[<>"{}|^`\\\x00-\x20]')


class _Writer:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.namespaces = sorted(
            ((p, ns) for p, ns in graph.prefixes.items() if _PREFIX_OK.match(p)),
            key=lambda item: -len(item[1]),
        )
        self.labels: Dict[BNode, str] = {}
        self.emitted: set = set()
        self.stack: set = set()
        in_count: Dict[BNode, int] = {}
        for _, _, o in graph:
            if isinstance(o, BNode):
                in_count[o] = in_count.get(o, 0) + 1
        self.inline_ok = {b for b, n in in_count.items() if n == 1}

    def label(self, node: BNode) -> str:
        if node not in self.labels:
            self.labels[node] = f"b{len(self.labels)}"
        return "_:" + self.labels[node]

    def iri(self, iri: IRI) -> str:
        value = iri.value
        for prefix, ns in self.namespaces:
            if value.startswith(ns) and _LOCAL_OK.match(value[len(ns):]):
                return f"{prefix}:{value[len(ns):]}"
        return "<" + _IRI_UNSAFE.sub(lambda m: f"\\u{ord(m.group()):04X}", value) + ">"

    def literal(self, lit: Literal) -> str:
        if lit.lang is None:
            bare = _BARE.get(lit.datatype)
            if bare is not None and bare.match(lit.lexical):
                return lit.lexical
        text = lit.lexical.replace("\\", "\\\\").replace('"', '\\"')
        text = text.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        text = re.sub(r"[\x00-\x08\x0b\x0c\x0e-\x1f]", lambda m: f"\\u{ord(m.group()):04X}", text)
        if lit.lang is not None:
            return f'"{text}"@{lit.lang}'
        if lit.datatype == XSD_STRING:
            return f'"{text}"'
        return f'"{text}"^^{self.iri(lit.datatype)}'

    def term(self, term: Term) -> str:
        if isinstance(term, IRI):
            return self.iri(term)
        if isinstance(term, Literal):
            return self.literal(term)
        if term in self.inline_ok and term not in self.emitted and term not in self.stack:
            return self.inline(term)
        return self.label(term)

    def inline(self, node: BNode) -> str:
        self.emitted.add(node)
        body = self.predicates(node)
        return f"[ {body} ]" if body else "[]"

    def predicates(self, subject: Term, sep: str = " ; ") -> str:
        self.stack.add(subject)
        grouped: Dict[IRI, list] = {}
        for _, p, o in self.graph.triples(subject, None, None):
            grouped.setdefault(p, []).append(o)
        parts = []
        for p in sorted(grouped, key=lambda x: (x != RDF_TYPE, term_key(x))):
            verb = "a" if p == RDF_TYPE else self.iri(p)
            objects = ", ".join(self.term(o) for o in sorted(grouped[p], key=term_key))
            parts.append(f"{verb} {objects}")
        self.stack.discard(subject)
        return sep.join(parts)

    def write(self) -> str:
        lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(self.graph.prefixes.items()) if _PREFIX_OK.match(p)]
        subjects = sorted(self.graph.subject_terms(), key=term_key)
        blocks = []
        pending = [s for s in subjects if not (isinstance(s, BNode) and s in self.inline_ok)]
        # inline candidates only reachable through a blank-node cycle
        leftovers = [s for s in subjects if isinstance(s, BNode) and s in self.inline_ok]
        for group in (pending, leftovers):
            for subject in group:
                if subject in self.emitted:
                    continue
                self.emitted.add(subject)
                head = self.label(subject) if isinstance(subject, BNode) else self.iri(subject)
                body = self.predicates(subject, sep=" ;\n    ")
                blocks.append(f"{head} {body} .")
        out = "\n".join(lines)
        if blocks:
            out = (out + "\n\n" if out else "") + "\n\n".join(blocks)
        return out + "\n" if out else ""


def serialize_turtle(graph: Graph) -> str:
    """Deterministic Turtle for ``graph``.

    Subjects are sorted by term, ``rdf:type`` is written as ``a`` and first,
    and blank nodes are relabelled ``_:b0``, ``_:b1``... in first-use order.
    Blank nodes referenced exactly once are written inline as ``[ ... ]``.
    """
    return _Writer(graph).write()
