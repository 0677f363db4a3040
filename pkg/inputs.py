"""
Readers for the command-line inputs: complexes, pair descriptors,
pair files and ring files.
"""

import json
import logging
import os
import re
from typing import Dict, List, Tuple

from complex_core import SimplicialComplex, parse_complex
from errors import ComplexFormatError, InputError, PreconditionError, RingPresentationError
from pairs import ConePair, DiskSphere, GradedRing, PairFamily, SimplicialPair

logger = logging.getLogger(__name__)


def read_source(value: str) -> str:
    """Contents of the file at value, or value itself when it is not a path."""
    if os.path.isfile(value):
        with open(value, "r", encoding="utf-8") as f:
            return f.read()
    return value


def load_complex(value: str) -> SimplicialComplex:
    return parse_complex(read_source(value))


def parse_int_list(text: str) -> List[int]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise PreconditionError(f"Expected a bracketed list, got {text!r}")
    try:
        return [int(v) for v in body[1:-1].split(",") if v.strip()]
    except ValueError as e:
        raise PreconditionError(f"Non-integer entry in {text!r}") from e


def _complex_from(document) -> SimplicialComplex:
    if isinstance(document, str):
        return parse_complex(document)
    try:
        return SimplicialComplex.from_facets(int(document["m"]), document.get("facets", []))
    except (KeyError, TypeError, ValueError) as e:
        raise ComplexFormatError(f"Invalid complex in pair file: {e}") from e


def parse_pair_file(text: str, name: str = "pair") -> List[SimplicialPair]:
    """
    A JSON document {"X": ..., "A": ...} or {"pairs": [{"X": ..., "A": ...}, ...]},
    or text with lines "X: m=..; facets=..." and "A: ...".
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            document = json.loads(text)
        except ValueError as e:
            raise ComplexFormatError(f"Invalid pair file: {e}") from e
        entries = document.get("pairs", [document])
        return [
            SimplicialPair(_complex_from(e["X"]), _complex_from(e["A"]), e.get("name", f"{name}{k + 1}"))
            for k, e in enumerate(entries)
        ]
    found: Dict[str, str] = {}
    for line in text.splitlines():
        match = re.match(r"\s*([XA])\s*:\s*(.*)", line)
        if match:
            found[match.group(1)] = match.group(2)
    if set(found) != {"X", "A"}:
        raise ComplexFormatError("Pair file must define both X and A")
    return [SimplicialPair(parse_complex(found["X"]), parse_complex(found["A"]), name)]


def parse_ring_file(text: str) -> GradedRing:
    """
    JSON {"generators": [[name, degree], ...], "products": [[a, b, {c: coeff}], ...]}
    or text lines "gen x 2" and "x*y = 2*z + w".
    """
    text = text.strip()
    names: List[str] = []
    degrees: List[int] = []
    raw: List[Tuple[str, str, Dict[str, int]]] = []
    if text.startswith("{"):
        try:
            document = json.loads(text)
            for name, degree in document.get("generators", []):
                names.append(str(name))
                degrees.append(int(degree))
            for a, b, terms in document.get("products", []):
                raw.append((str(a), str(b), {str(k): int(v) for k, v in terms.items()}))
        except (ValueError, TypeError) as e:
            raise RingPresentationError(f"Invalid ring file: {e}") from e
    else:
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            gen = re.fullmatch(r"gen\s+(\S+)\s+(-?\d+)", line)
            if gen:
                names.append(gen.group(1))
                degrees.append(int(gen.group(2)))
                continue
            prod = re.fullmatch(r"(\S+)\s*\*\s*(\S+)\s*=\s*(.+)", line)
            if not prod:
                raise RingPresentationError(f"Cannot read ring file line {line!r}")
            raw.append((prod.group(1), prod.group(2), _parse_terms(prod.group(3))))
    index = {name: k for k, name in enumerate(names)}
    products = {}
    for a, b, terms in raw:
        try:
            products[(index[a], index[b])] = {index[k]: c for k, c in terms.items()}
        except KeyError as e:
            raise RingPresentationError(f"Unknown generator {e} in ring file") from e
    return GradedRing(names, degrees, products)


def _parse_terms(text: str) -> Dict[str, int]:
    terms: Dict[str, int] = {}
    if text.strip() == "0":
        return terms
    for sign, body in re.findall(r"([+-]?)\s*([^+-]+)", text):
        body = body.strip()
        coeff, _, name = body.rpartition("*")
        value = int(coeff) if coeff else 1
        terms[name.strip()] = terms.get(name.strip(), 0) + (-value if sign == "-" else value)
    return terms


def parse_pairs(text: str, m: int) -> PairFamily:
    """
    Descriptors: disk-sphere:n, disk-sphere:[n1,...], pair-file:<path>,
    cone:<ring-file>, each optionally followed by ;suspend:[t1,...].
    """
    parts = [p.strip() for p in text.split(";") if p.strip()]
    if not parts:
        raise InputError("Empty pair descriptor")
    suspension = None
    descriptors = None
    for part in parts:
        kind, _, value = part.partition(":")
        kind = kind.strip().lower()
        if kind == "suspend":
            suspension = tuple(parse_int_list(value))
        elif kind == "disk-sphere":
            value = value.strip()
            if value.startswith("["):
                ns = parse_int_list(value)
            elif value.isdigit():
                ns = [int(value)] * m
            else:
                raise PreconditionError(f"Invalid disk dimension {value!r}")
            descriptors = tuple(DiskSphere(n) for n in ns)
        elif kind == "pair-file":
            pairs = parse_pair_file(read_source(value), os.path.basename(value) or "pair")
            descriptors = tuple(pairs) if len(pairs) > 1 else tuple(pairs) * m
        elif kind == "cone":
            ring = parse_ring_file(read_source(value))
            descriptors = (ConePair(ring, os.path.basename(value) or "cone"),) * m
        else:
            raise InputError(f"Unknown pair descriptor {kind!r}")
    if descriptors is None:
        raise InputError("Pair descriptor names no family")
    family = PairFamily(descriptors, suspension)
    family.check_length(m)
    logger.debug(f"Parsed pair family {family.label()}")
    return family
