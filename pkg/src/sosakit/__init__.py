"""Parse, validate, enrich and convert SOSA observation/actuation/sampling graphs."""

from .errors import ParseError
from .infer import CastingDef, CollectionDef, RuleConfigError, explain, infer
from .jsonld import parse_jsonld, serialize_jsonld
from .model import build_observation, entities_of_class, normalize_property_names
from .rdf import IRI, BNode, Graph, Literal, Triple, isomorphic
from .turtle import parse_turtle, serialize_turtle
from .units import compare, convert, extract_result_quantity, format_quantity, parse_quantity
from .validate import Severity, ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "BNode",
    "CastingDef",
    "CollectionDef",
    "Graph",
    "IRI",
    "Literal",
    "ParseError",
    "RuleConfigError",
    "Severity",
    "Triple",
    "ValidationReport",
    "build_observation",
    "compare",
    "convert",
    "entities_of_class",
    "explain",
    "extract_result_quantity",
    "format_quantity",
    "infer",
    "isomorphic",
    "normalize_property_names",
    "parse_jsonld",
    "parse_quantity",
    "parse_turtle",
    "serialize_jsonld",
    "serialize_turtle",
    "validate",
]
