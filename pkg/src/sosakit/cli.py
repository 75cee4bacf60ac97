"""Command-line front end.

Exit codes: 0 success; 1 validation Errors (or no usable quantity for
``quantity``); 2 unreadable or unparsable input; 3 bad rule configuration.
Graphs and reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .errors import ParseError
from .infer import RuleConfigError, infer, load_rules_file, resolve_rules
from .jsonld import parse_jsonld, serialize_jsonld
from .model import normalize_property_names
from .rdf import RDF_TYPE, BNode, Graph, IRI, relabel_blanks
from .turtle import parse_turtle, serialize_turtle
from .units import (
    UnitError,
    UnitTable,
    UnitTableError,
    convert,
    default_unit_table,
    extract_result_quantity,
    format_quantity,
)
from .validate import validate
from .vocab import default_vocabulary

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_PARSE = 2
EXIT_RULES = 3

UNIT_TABLE_ENV = "SOSAKIT_UNIT_TABLE"
_EXTENSIONS = {".ttl": "turtle", ".jsonld": "jsonld", ".json": "jsonld"}


@dataclass
class CliConfig:
    command: str
    input_paths: List[str]
    format: str = "auto"
    output_format: Optional[str] = None
    base: Optional[str] = None
    strict: bool = False
    geo_sanity: bool = False
    normalize_names: bool = False
    lenient_samples: bool = False
    rules_file: Optional[str] = None
    unit_table_file: Optional[str] = None
    rule_selection: List[str] = field(default_factory=list)
    added_count: bool = False
    extract: Optional[str] = None
    convert_to: Optional[str] = None


@dataclass
class CliResult:
    stdout: str
    stderr: str
    exit_code: int


class _InputError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sosa-kit", description="Tools for SOSA observation graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("inputs", nargs="+", metavar="PATH", help="input files; '-' reads stdin")
        p.add_argument("--format", choices=["turtle", "jsonld", "auto"], default="auto")
        p.add_argument("--base", help="base IRI for relative IRIs in Turtle input")
        p.add_argument("--normalize-names", action="store_true", help="rewrite non-canonical SOSA property names")

    p = sub.add_parser("validate", help="check a graph and print a findings report")
    common(p)
    p.add_argument("--strict", action="store_true", help="treat warnings as errors")
    p.add_argument("--geo-sanity", action="store_true", help="check geo:lat/geo:long ranges")
    p.add_argument("--lenient-samples", action="store_true", help="report unlinked samples as warnings")
    p.add_argument("--output-format", choices=["text", "json-lines"], default="text")
    p.add_argument("--unit-table", help="extra unit table (default: $%s)" % UNIT_TABLE_ENV)

    p = sub.add_parser("convert", help="convert between Turtle and JSON-LD")
    common(p)
    p.add_argument("--to", dest="output_format", choices=["turtle", "jsonld"], required=True)

    p = sub.add_parser("infer", help="materialize inference rules")
    common(p)
    p.add_argument("--rules", action="append", default=[], help="rule ids or groups, comma separated (default: all but I6)")
    p.add_argument("--rules-file", help="collection/casting definitions")
    p.add_argument("--added-count", action="store_true", help="print the number of added triples to stderr")
    p.add_argument("--to", dest="output_format", choices=["turtle", "jsonld"], default="turtle")

    p = sub.add_parser("stats", help="count instances of each SOSA class")
    common(p)
    p.add_argument("--output-format", choices=["text", "json-lines"], default="text")

    p = sub.add_parser("quantity", help="extract and convert a result quantity")
    common(p)
    p.add_argument("--extract", required=True, metavar="NODE", help="observation/actuation IRI or prefixed name")
    p.add_argument("--convert-to", metavar="UCUM")
    p.add_argument("--unit-table", help="extra unit table (default: $%s)" % UNIT_TABLE_ENV)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> CliConfig:
    ns = _build_parser().parse_args(argv)
    return CliConfig(
        command=ns.command,
        input_paths=ns.inputs,
        format=ns.format,
        output_format=getattr(ns, "output_format", None),
        base=ns.base,
        strict=getattr(ns, "strict", False),
        geo_sanity=getattr(ns, "geo_sanity", False),
        normalize_names=ns.normalize_names,
        lenient_samples=getattr(ns, "lenient_samples", False),
        rules_file=getattr(ns, "rules_file", None),
        unit_table_file=getattr(ns, "unit_table", None),
        rule_selection=getattr(ns, "rules", []),
        added_count=getattr(ns, "added_count", False),
        extract=getattr(ns, "extract", None),
        convert_to=getattr(ns, "convert_to", None),
    )


def _detect_format(path: str, requested: str) -> str:
    if requested != "auto":
        return requested
    if path == "-":
        raise _InputError("reading stdin requires an explicit --format")
    fmt = _EXTENSIONS.get(Path(path).suffix.lower())
    if fmt is None:
        raise _InputError(f"{path}: cannot tell the format from the extension; pass --format")
    return fmt


def _read_graph(path: str, fmt: str, base: Optional[str], stdin: Optional[bytes]) -> Graph:
    if path == "-":
        text = (stdin or b"").decode("utf-8")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise _InputError(f"{path}: {exc}") from None
    try:
        if fmt == "turtle":
            return parse_turtle(text, base=base)
        return parse_jsonld(text)
    except ParseError as exc:
        name = "<stdin>" if path == "-" else path
        raise _InputError(f"{name}:{exc.line}:{exc.column}: {exc.message}\n    {exc.snippet}") from None


def load_inputs(config: CliConfig, stdin: Optional[bytes] = None) -> Graph:
    """Parse every input and merge them, renaming blank nodes apart."""
    graphs = []
    for path in config.input_paths:
        fmt = _detect_format(path, config.format)
        graphs.append(_read_graph(path, fmt, config.base, stdin))
    if len(graphs) == 1:
        return graphs[0]
    merged = Graph()
    for i, g in enumerate(graphs):
        for prefix, ns in g.prefixes.items():
            merged.prefixes.setdefault(prefix, ns)
        merged.update(relabel_blanks(g, lambda b, i=i: BNode(f"f{i}.{b.label}")))
    return merged


def _unit_table(config: CliConfig) -> UnitTable:
    table = default_unit_table()
    extra = config.unit_table_file or os.environ.get(UNIT_TABLE_ENV)
    if extra:
        table = table.extended(UnitTable.load(extra))
    return table


def _resolve_node(graph: Graph, name: str) -> IRI:
    if name.startswith("<") and name.endswith(">"):
        return IRI(name[1:-1])
    prefix, sep, _ = name.partition(":")
    if sep and prefix in graph.prefixes:
        return graph.expand(name)
    return IRI(name)


def _serialize(graph: Graph, fmt: str) -> str:
    return serialize_jsonld(graph) if fmt == "jsonld" else serialize_turtle(graph)


def _cmd_validate(config: CliConfig, graph: Graph, out, err) -> int:
    report = validate(
        graph,
        strict=config.strict,
        geo_sanity=config.geo_sanity,
        sample_link_error=not config.lenient_samples,
        units=_unit_table(config),
    )
    out.write(report.to_json_lines() if config.output_format == "json-lines" else report.to_text())
    return EXIT_OK if report.conforms else EXIT_FINDINGS


def _cmd_infer(config: CliConfig, graph: Graph, out, err) -> int:
    selection = resolve_rules([r for arg in config.rule_selection for r in arg.split(",")] or None)
    collections, castings = [], []
    if config.rules_file:
        prefixes = dict(default_vocabulary().prefixes)
        prefixes.update(graph.prefixes)
        try:
            collections, castings = load_rules_file(config.rules_file, prefixes)
        except OSError as exc:
            raise RuleConfigError(f"{config.rules_file}: {exc}") from None
    result, added = infer(graph, selection, collections, castings)
    out.write(_serialize(result, config.output_format or "turtle"))
    if config.added_count:
        err.write(f"{added}\n")
    return EXIT_OK


def _cmd_stats(config: CliConfig, graph: Graph, out, err) -> int:
    vocab = default_vocabulary()
    rows = [(cls, len(set(graph.subjects(RDF_TYPE, cls)))) for cls in sorted(vocab.classes, key=lambda c: c.value)]
    if config.output_format == "json-lines":
        for cls, n in rows:
            out.write(json.dumps({"class": cls.value, "count": n}) + "\n")
        out.write(json.dumps({"triples": len(graph)}) + "\n")
    else:
        for cls, n in rows:
            out.write(f"{vocab.curie(cls)}\t{n}\n")
        out.write(f"triples\t{len(graph)}\n")
    return EXIT_OK


def _cmd_quantity(config: CliConfig, graph: Graph, out, err) -> int:
    table = _unit_table(config)
    node = _resolve_node(graph, config.extract or "")
    try:
        q = extract_result_quantity(graph, node, table)
        if q is None:
            err.write(f"no quantity result for {node.value}\n")
            return EXIT_FINDINGS
        if config.convert_to:
            q = convert(q, config.convert_to, table)
        out.write(format_quantity(q) + "\n")
    except UnitError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_FINDINGS
    return EXIT_OK


def _cmd_convert(config: CliConfig, graph: Graph, out, err) -> int:
    out.write(_serialize(graph, config.output_format or "turtle"))
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "convert": _cmd_convert,
    "infer": _cmd_infer,
    "stats": _cmd_stats,
    "quantity": _cmd_quantity,
}


class _StreamHandler(logging.Handler):
    def __init__(self, stream):
        super().__init__(logging.INFO)
        self.stream = stream

    def emit(self, record: logging.LogRecord) -> None:
        self.stream.write(f"{record.getMessage()}\n")


def run(config: CliConfig, stdin: Optional[bytes] = None) -> CliResult:
    out, err = io.StringIO(), io.StringIO()
    try:
        graph = load_inputs(config, stdin)
        if config.normalize_names:
            logger = logging.getLogger("sosakit.model")
            handler = _StreamHandler(err)
            logger.addHandler(handler)
            old_level = logger.level
            logger.setLevel(logging.INFO)
            try:
                graph, count = normalize_property_names(graph)
            finally:
                logger.removeHandler(handler)
                logger.setLevel(old_level)
            err.write(f"normalized {count} property name(s)\n")
        code = _COMMANDS[config.command](config, graph, out, err)
    except _InputError as exc:
        err.write(f"error: {exc}\n")
        code = EXIT_PARSE
    except UnitTableError as exc:
        err.write(f"error: {exc}\n")
        code = EXIT_PARSE
    except RuleConfigError as exc:
        err.write(f"rule configuration error: {exc}\n")
        code = EXIT_RULES
    return CliResult(out.getvalue(), err.getvalue(), code)


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = parse_args(argv)
    stdin = sys.stdin.buffer.read() if "-" in config.input_paths else None
    result = run(config, stdin)
    sys.stdout.write(result.stdout)
    sys.stderr.write(result.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
