"""JSON documents for jets, maps, polynomials and normal-form specs.

Coefficients are strings in the grammar ``R``, ``R+Ri``, ``R-Ri``; terms are
written in lexicographic monomial order so output is byte-stable.
"""
from __future__ import annotations

import json
from typing import Any

from .errors import ValidationError
from .hypersurface import HypersurfaceJet, MapJet
from .normalform import PRESETS, LineChoice, NormalFormSpec, custom_spec, line_kind, preset
from .scalars import CoefficientSyntaxError, GaussianRational
from .series import HoloSeries, PuSeries, Signature

__all__ = [
    "DocumentError",
    "loads",
    "dumps",
    "poly_from_doc",
    "poly_to_doc",
    "jet_from_doc",
    "jet_to_doc",
    "map_from_doc",
    "map_to_doc",
    "spec_from_doc",
    "spec_to_doc",
]


class DocumentError(ValueError):
    """Malformed document: bad JSON, missing or mistyped fields, bad coefficient syntax."""


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _render(x, depth: int) -> str:
    pad = "  " * (depth + 1)
    if isinstance(x, dict) and x:
        if all(not isinstance(v, (dict, list)) or _flat(v) for v in x.values()) and depth >= 2:
            return json.dumps(x)
        items = [f"{pad}{json.dumps(k)}: {_render(v, depth + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * depth + "}"
    if isinstance(x, list) and x and not _flat(x):
        items = [pad + _render(v, depth + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + "  " * depth + "]"
    return json.dumps(x)


def _flat(x) -> bool:
    return isinstance(x, list) and all(not isinstance(v, (dict, list)) for v in x)


def dumps(doc: Any) -> str:
    """Indented JSON with one term per line and inline exponent lists."""
    return _render(doc, 0) + "\n"


def _field(doc: dict, name: str, where: str):
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: expected an object")
    if name not in doc:
        raise DocumentError(f"{where}: missing field {name!r}")
    return doc[name]


def _int(value, where: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise DocumentError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise DocumentError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _multi_index(value, n: int, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or len(value) != n:
        raise DocumentError(f"{where}: expected a list of {n} exponents")
    return tuple(_int(v, where, 0) for v in value)


def _coeff(value, where: str) -> GaussianRational:
    if not isinstance(value, str):
        raise DocumentError(f"{where}: coefficient must be a string, got {value!r}")
    try:
        return GaussianRational.parse(value)
    except CoefficientSyntaxError as exc:
        raise DocumentError(f"{where}: {exc}") from None


def _pu_terms(terms, n: int, where: str) -> dict:
    if not isinstance(terms, list):
        raise DocumentError(f"{where}: 'terms' must be a list")
    out: dict = {}
    for i, t in enumerate(terms):
        w = f"{where}.terms[{i}]"
        alpha = _multi_index(_field(t, "z", w), n, w + ".z")
        beta = _multi_index(_field(t, "zbar", w), n, w + ".zbar")
        l = _int(_field(t, "u", w), w + ".u", 0)
        c = _coeff(_field(t, "coeff", w), w + ".coeff")
        key = (alpha, beta, l)
        out[key] = out.get(key, GaussianRational(0)) + c
    return out


def _header(doc: dict, where: str) -> tuple[int, int]:
    n = _int(_field(doc, "n", where), where + ".n", 1)
    W = _int(_field(doc, "max_weight", where), where + ".max_weight", 0)
    return n, W


def _check_weight(coeffs: dict, W: int, where: str, weight):
    for mono in coeffs:
        if weight(mono) > W:
            raise ValidationError(f"{where}: monomial {mono} exceeds max_weight {W}")


def poly_from_doc(doc: dict, where: str = "poly") -> PuSeries:
    n, W = _header(doc, where)
    coeffs = _pu_terms(_field(doc, "terms", where), n, where)
    _check_weight(coeffs, W, where, lambda m: sum(m[0]) + sum(m[1]) + 2 * m[2])
    return PuSeries(n, W, coeffs)


def _pu_term_list(p: PuSeries) -> list[dict]:
    return [
        {"z": list(m.alpha), "zbar": list(m.beta), "u": m.l, "coeff": str(c)}
        for m, c in sorted(p.coeffs.items(), key=lambda mc: (mc[0].alpha, mc[0].beta, mc[0].l))
    ]


def poly_to_doc(p: PuSeries, eps=None) -> dict:
    doc = {"n": p.n, "max_weight": p.max_weight}
    if eps is not None:
        doc["eps"] = list(eps)
    doc["terms"] = _pu_term_list(p)
    return doc


def _eps(doc: dict, n: int, where: str) -> Signature:
    eps = _field(doc, "eps", where)
    if not isinstance(eps, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in eps):
        raise DocumentError(f"{where}.eps: expected a list of integers")
    if len(eps) != n:
        raise ValidationError(f"{where}.eps: expected {n} entries, got {len(eps)}")
    return Signature(eps)


def jet_from_doc(doc: dict, where: str = "jet") -> HypersurfaceJet:
    n, W = _header(doc, where)
    sig = _eps(doc, n, where)
    return HypersurfaceJet(poly_from_doc(doc, where), sig)


def jet_to_doc(jet: HypersurfaceJet) -> dict:
    return {
        "n": jet.n,
        "eps": list(jet.sig) if jet.sig is not None else None,
        "max_weight": jet.max_weight,
        "terms": _pu_term_list(jet.phi),
    }


def _holo_terms(terms, n: int, W: int, where: str) -> HoloSeries:
    if not isinstance(terms, list):
        raise DocumentError(f"{where}: expected a list of terms")
    out: dict = {}
    for i, t in enumerate(terms):
        w = f"{where}[{i}]"
        alpha = _multi_index(_field(t, "z", w), n, w + ".z")
        l = _int(_field(t, "w", w), w + ".w", 0)
        c = _coeff(_field(t, "coeff", w), w + ".coeff")
        out[(alpha, l)] = out.get((alpha, l), GaussianRational(0)) + c
    _check_weight(out, W, where, lambda m: sum(m[0]) + 2 * m[1])
    return HoloSeries(n, W, out)


def _holo_term_list(s: HoloSeries) -> list[dict]:
    return [
        {"z": list(m.alpha), "w": m.l, "coeff": str(c)}
        for m, c in sorted(s.coeffs.items(), key=lambda mc: (mc[0].alpha, mc[0].l))
    ]


def map_from_doc(doc: dict, where: str = "map") -> MapJet:
    n, W = _header(doc, where)
    f = _field(doc, "f", where)
    if not isinstance(f, list) or len(f) != n:
        raise DocumentError(f"{where}.f: expected {n} term lists")
    fs = [_holo_terms(fj, n, W, f"{where}.f[{j}]") for j, fj in enumerate(f)]
    g = _holo_terms(_field(doc, "g", where), n, W, f"{where}.g")
    return MapJet(fs, g)


def map_to_doc(h: MapJet) -> dict:
    return {
        "n": h.n,
        "max_weight": h.max_weight,
        "f": [_holo_term_list(fj) for fj in h.f],
        "g": _holo_term_list(h.g),
    }


_CHOICE_FIELDS = {"k>=2": ("m", "mp"), "k=1": ("m", "mp", "mpp"), "k=0": ("m", "mp", "mt", "mtp")}


def _preset_name(value, where: str) -> str:
    if not isinstance(value, str):
        raise DocumentError(f"{where}: preset name must be a string")
    name = value.strip().lower().replace("-", "_")
    if name not in PRESETS:
        raise ValidationError(
            f"{where}: unknown preset {value!r}; expected one of "
            + ", ".join(p.replace("_", "-") for p in PRESETS)
        )
    return name


def spec_from_doc(doc: dict, max_weight: int | None = None, where: str = "spec") -> NormalFormSpec:
    """``{"preset": name}`` or ``{"custom": [...], "base"?: name, "max_weight"?: W}``.

    Lines whose conditions are fixed need not be listed.  Without ``base`` every
    other line up to the spec's max weight must be listed.
    """
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: expected an object")
    if "max_weight" in doc:
        max_weight = _int(doc["max_weight"], where + ".max_weight", 2)
    if "preset" in doc:
        if "custom" in doc:
            raise DocumentError(f"{where}: give either 'preset' or 'custom', not both")
        return preset(_preset_name(doc["preset"], where + ".preset"), max_weight or 2)
    entries = _field(doc, "custom", where)
    if not isinstance(entries, list):
        raise DocumentError(f"{where}.custom: expected a list")
    base = _preset_name(doc["base"], where + ".base") if "base" in doc else None
    choices = []
    for i, e in enumerate(entries):
        w = f"{where}.custom[{i}]"
        kind = _field(e, "kind", w)
        k = _int(_field(e, "k", w), w + ".k", 0)
        l = _int(_field(e, "l", w), w + ".l", 0)
        if kind not in _CHOICE_FIELDS:
            raise DocumentError(f"{w}.kind: expected one of {', '.join(_CHOICE_FIELDS)}")
        if kind != line_kind(k):
            raise ValidationError(f"{w}: kind {kind!r} does not match k={k}")
        fixed = LineChoice(k, l).is_fixed
        if fixed:
            idx = ()
        else:
            idx = tuple(_int(_field(e, name, w), f"{w}.{name}") for name in _CHOICE_FIELDS[kind])
        choices.append(LineChoice(k, l, idx))
    if max_weight is None:
        max_weight = max([2] + [c.weight for c in choices])
    table = {}
    if base is not None:
        table.update(preset(base, max_weight).choices)
    for w in range(max_weight + 1):
        for l in range(w // 2 + 1):
            c = LineChoice(w - 2 * l, l)
            if c.is_fixed:
                table.setdefault((c.k, c.l), c)
    for c in choices:
        table[(c.k, c.l)] = c
    return custom_spec(table.values(), max_weight)


def spec_to_doc(spec: NormalFormSpec) -> dict:
    if spec.preset is not None:
        return {"preset": spec.preset.replace("_", "-"), "max_weight": spec.max_weight}
    entries = []
    for (k, l), c in sorted(spec.choices.items()):
        if c.is_fixed:
            continue
        e = {"kind": c.kind, "k": k, "l": l}
        e.update(zip(_CHOICE_FIELDS[c.kind], c.indices))
        entries.append(e)
    return {"custom": entries, "max_weight": spec.max_weight}
