"""JSON readers and writers for the command line tools."""
from __future__ import annotations

import json
from pathlib import Path

from .base import ParseError, fmt, jsonable, to_number
from .consistency import Family
from .matsym import DensitySeries, SpectralSymbol
from .moments import AtomicMeasure
from .mspace import MeasureSpace, SelfMap
from .trees import TreeProfile


def load_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def parse_number(value, where: str = "value"):
    try:
        return to_number(value)
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _point_id(value, where: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: point id must be an integer, got {value!r}") from None


def space_from_json(doc: dict, map_doc: dict | None = None) -> tuple[MeasureSpace, SelfMap]:
    if not isinstance(doc, dict) or "points" not in doc:
        raise ParseError("space document needs a 'points' array")
    masses = {}
    for i, entry in enumerate(doc["points"]):
        pid = _point_id(entry.get("id"), f"points[{i}].id")
        if pid in masses:
            raise ParseError(f"points[{i}]: duplicate id {pid}")
        masses[pid] = parse_number(entry.get("mass"), f"points[{i}].mass")
    source = map_doc if map_doc is not None else doc
    raw = source.get("map")
    if not isinstance(raw, dict):
        raise ParseError("missing 'map' object")
    image = {
        _point_id(k, f"map key {k!r}"): _point_id(v, f"map[{k!r}]") for k, v in raw.items()
    }
    boundary = [_point_id(p, "boundary") for p in source.get("boundary", doc.get("boundary", []))]
    exits = [_point_id(p, "exits") for p in source.get("exits", doc.get("exits", []))]
    try:
        space = MeasureSpace.from_masses(masses)
        phi = SelfMap(image, boundary, exits)
        phi.check_total(space)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return space, phi


def space_to_json(space: MeasureSpace, phi: SelfMap) -> dict:
    out = {
        "points": [{"id": p, "mass": fmt(space.mass[p])} for p in space.points],
        "map": {str(x): str(y) for x, y in sorted(phi.image.items())},
    }
    if phi.boundary:
        out["boundary"] = sorted(phi.boundary)
    if phi.exits:
        out["exits"] = sorted(phi.exits)
    return out


def measure_from_json(atoms, where: str = "measure") -> AtomicMeasure:
    if not isinstance(atoms, list):
        raise ParseError(f"{where}: expected a list of atoms")
    pairs = []
    for i, atom in enumerate(atoms):
        t = parse_number(atom.get("t"), f"{where}[{i}].t")
        w = parse_number(atom.get("w"), f"{where}[{i}].w")
        if t < 0 or w < 0:
            raise ParseError(f"{where}[{i}]: atoms and weights must be nonnegative")
        pairs.append((t, w))
    return AtomicMeasure.of(pairs)


def measure_to_json(m: AtomicMeasure) -> list[dict]:
    return [{"t": fmt(t), "w": fmt(w)} for t, w in m]


def family_from_json(doc: dict) -> Family:
    raw = doc.get("measures") if isinstance(doc, dict) else None
    if not isinstance(raw, dict):
        raise ParseError("family document needs a 'measures' object")
    measures = {
        _point_id(k, f"measures key {k!r}"): measure_from_json(v, f"measures[{k!r}]")
        for k, v in raw.items()
    }
    try:
        return Family(measures)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def family_to_json(family: Family) -> dict:
    return {"measures": {str(x): measure_to_json(family[x]) for x in sorted(family.measures)}}


def sequence_from_json(values) -> list:
    return [parse_number(v, f"sequence[{i}]") for i, v in enumerate(values)]


def profile_from_json(doc: dict) -> TreeProfile:
    m_lo, m_hi = int(doc["m_lo"]), int(doc["m_hi"])
    kappa = doc["kappa"]
    alpha = doc["alpha"]
    if isinstance(kappa, list):
        kappa = {m_lo + i: int(k) for i, k in enumerate(kappa)}
    if isinstance(alpha, list):
        alpha = {m_lo + i: parse_number(a, f"alpha[{i}]") for i, a in enumerate(alpha)}
    else:
        alpha = parse_number(alpha, "alpha")
    return TreeProfile.build(m_lo, m_hi, kappa, alpha)


def symbol_from_json(doc: dict) -> SpectralSymbol:
    cplx = bool(doc.get("complex", False))
    try:
        if "matrix" in doc:
            return SpectralSymbol.from_symmetric(
                [[parse_number(v, "matrix") for v in row] for row in doc["matrix"]], cplx
            )
        return SpectralSymbol(
            int(doc["dim"]),
            tuple(parse_number(v, "eigenvalues") for v in doc["eigenvalues"]),
            tuple(tuple(parse_number(c, "basis") for c in vec) for vec in doc["basis"]),
            cplx,
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad symbol: {exc}") from None


def density_from_json(doc) -> DensitySeries:
    coeffs = doc["coefficients"] if isinstance(doc, dict) else doc
    try:
        return DensitySeries(tuple(parse_number(a, f"coefficients[{i}]") for i, a in enumerate(coeffs)))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dumps(doc) -> str:
    return json.dumps(jsonable(doc), indent=2, sort_keys=True)


__all__ = [
    "load_json",
    "parse_number",
    "space_from_json",
    "space_to_json",
    "measure_from_json",
    "measure_to_json",
    "family_from_json",
    "family_to_json",
    "sequence_from_json",
    "profile_from_json",
    "symbol_from_json",
    "density_from_json",
    "dumps",
]
