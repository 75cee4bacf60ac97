"""SOSA terms as data, loaded from the bundled ``sosa.vocab`` table."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, Mapping, Optional, Tuple, Union

from .rdf import IRI, Namespace

SOSA = Namespace("http://www.w3.org/ns/sosa/")
TIME = Namespace("http://www.w3.org/2006/time#")
GEO = Namespace("http://www.w3.org/2003/01/geo/wgs84_pos#")
CDT = Namespace("http://w3id.org/lindt/custom_datatypes#")
QUDT = Namespace("http://qudt.org/1.1/schema/qudt#")
QUDT_UNIT = Namespace("http://qudt.org/1.1/vocab/unit#")
PROV = Namespace("http://www.w3.org/ns/prov#")
DUL = Namespace("http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#")
OM = Namespace("http://def.isotc211.org/iso19156/2011/Observation#")
OBOE = Namespace("http://ecoinformatics.org/oboe/oboe.1.2/oboe-core.owl#")
SOSA_OM = Namespace("http://www.w3.org/ns/sosa/om#")


class VocabularyError(ValueError):
    pass


@dataclass(frozen=True)
class PropertyInfo:
    iri: IRI
    domain_includes: FrozenSet[IRI]
    range_includes: FrozenSet[IRI]
    inverse: Optional[IRI]
    is_object: bool


@dataclass(frozen=True)
class Vocabulary:
    prefixes: Mapping[str, str]
    classes: FrozenSet[IRI]
    properties: Mapping[IRI, PropertyInfo]
    synonyms: Mapping[IRI, IRI] = field(default_factory=dict)

    @property
    def inverse_pairs(self) -> Tuple[Tuple[IRI, IRI], ...]:
        """Each inverse pair once, as (p, q) with p sorted before q."""
        pairs = set()
        for info in self.properties.values():
            if info.inverse is not None:
                pairs.add(tuple(sorted((info.iri, info.inverse), key=lambda i: i.value)))
        return tuple(sorted(pairs, key=lambda pq: pq[0].value))

    def inverse_of(self, prop: IRI) -> Optional[IRI]:
        info = self.properties.get(prop)
        return info.inverse if info else None

    def domain_includes(self, prop: IRI) -> FrozenSet[IRI]:
        info = self.properties.get(prop)
        return info.domain_includes if info else frozenset()

    def range_includes(self, prop: IRI) -> FrozenSet[IRI]:
        info = self.properties.get(prop)
        return info.range_includes if info else frozenset()

    def curie(self, iri: IRI) -> str:
        for prefix, ns in self.prefixes.items():
            if iri.value.startswith(ns) and len(iri.value) > len(ns):
                return f"{prefix}:{iri.value[len(ns):]}"
        return iri.value


def _parse_vocab(text: str, source: str) -> Vocabulary:
    prefixes: Dict[str, str] = {}
    classes = set()
    raw_props = []
    synonyms: Dict[IRI, IRI] = {}

    def expand(curie: str, lineno: int) -> IRI:
        prefix, sep, local = curie.partition(":")
        if not sep or prefix not in prefixes:
            raise VocabularyError(f"{source}:{lineno}: cannot expand {curie!r}")
        return IRI(prefixes[prefix] + local)

    def expand_list(cell: str, lineno: int) -> FrozenSet[IRI]:
        if cell.strip() == "-":
            return frozenset()
        return frozenset(expand(c.strip(), lineno) for c in cell.split(",") if c.strip())

    for lineno, line in enumerate(text.splitlines(), 1):
        # IRIs contain '#', so only whole-line comments
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in line.split("\t") if c.strip()]
        kind = cells[0]
        if kind == "prefix" and len(cells) == 3:
            prefixes[cells[1]] = cells[2]
        elif kind == "class" and len(cells) == 2:
            classes.add(expand(cells[1], lineno))
        elif kind == "property" and len(cells) == 6:
            raw_props.append((lineno, cells[1:]))
        elif kind == "synonym" and len(cells) == 3:
            synonyms[expand(cells[1], lineno)] = expand(cells[2], lineno)
        else:
            raise VocabularyError(f"{source}:{lineno}: malformed record {line!r}")

    properties: Dict[IRI, PropertyInfo] = {}
    for lineno, (name, dom, rng, inv, kind) in raw_props:
        if kind not in ("object", "datatype"):
            raise VocabularyError(f"{source}:{lineno}: property kind must be object or datatype")
        iri = expand(name, lineno)
        properties[iri] = PropertyInfo(
            iri=iri,
            domain_includes=expand_list(dom, lineno),
            range_includes=expand_list(rng, lineno),
            inverse=None if inv == "-" else expand(inv, lineno),
            is_object=kind == "object",
        )
    for info in properties.values():
        if info.inverse is None:
            continue
        other = properties.get(info.inverse)
        if other is None or other.inverse != info.iri:
            raise VocabularyError(f"{source}: inverse of {info.iri} is not declared symmetrically")
    return Vocabulary(prefixes=prefixes, classes=frozenset(classes), properties=properties, synonyms=synonyms)


def load_vocabulary(path: Union[str, Path, None] = None) -> Vocabulary:
    """Load a vocabulary table; ``None`` loads the bundled one."""
    if path is None:
        return default_vocabulary()
    return _parse_vocab(Path(path).read_text(encoding="utf-8"), str(path))


@lru_cache(maxsize=None)
def default_vocabulary() -> Vocabulary:
    text = resources.files("sosakit").joinpath("data/sosa.vocab").read_text(encoding="utf-8")
    return _parse_vocab(text, "sosa.vocab")
