"""``crnormal`` command line.

Exit codes: 0 success, 1 validation error, 2 internal invariant violated,
3 document could not be parsed.  ``-`` stands for stdin or stdout.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .errors import InternalInvariantError, ValidationError
from .hypersurface import apply_map, check_transformation_identity, quadric
from .normalform import PRESETS, NormalFormSpec, check, conditions_up_to, preset
from .oracle import normalize_oracle
from .scalars import CoefficientSyntaxError
from .series import PuSeries, Signature
from .solver import normalize
from .trace import trace_decompose, trace_power

EXIT_OK, EXIT_VALIDATION, EXIT_INTERNAL, EXIT_PARSE = 0, 1, 2, 3


def _read(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return io.loads(text)


def _write(path: str | None, doc) -> None:
    text = io.dumps(doc)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_spec(arg: str, max_weight: int | None) -> NormalFormSpec:
    name = arg.strip().lower().replace("-", "_")
    if name in PRESETS:
        return preset(name, max(2, max_weight or 2))
    return io.spec_from_doc(_read(arg), max_weight)


def _load_jet(path: str, max_weight: int | None = None):
    jet = io.jet_from_doc(_read(path))
    if max_weight is not None:
        if max_weight > jet.max_weight:
            raise ValidationError(f"--max-weight {max_weight} exceeds the jet's max_weight {jet.max_weight}")
        jet = jet.truncate(max_weight)
    return jet


def cmd_normalize(args) -> int:
    jet = _load_jet(args.jet, args.max_weight)
    spec = _load_spec(args.spec, jet.max_weight)
    result = normalize(jet, spec)
    if args.oracle:
        other = normalize_oracle(jet, spec)
        if other.normal_form != result.normal_form or other.map != result.map:
            raise InternalInvariantError("line solver and generic oracle disagree")
        _note("oracle: agrees")
    nf_doc, map_doc = io.jet_to_doc(result.normal_form), io.map_to_doc(result.map)
    if args.out_nf is None and args.out_map is None:
        _write("-", {"normal_form": nf_doc, "map": map_doc})
    else:
        if args.out_nf is not None:
            _write(args.out_nf, nf_doc)
        if args.out_map is not None:
            _write(args.out_map, map_doc)
    n_cond = len(conditions_up_to(spec, jet.max_weight))
    _note(f"certificate: {n_cond} conditions up to weight {jet.max_weight}, {len(result.certificate)} violations")
    return EXIT_OK


def cmd_check(args) -> int:
    jet = _load_jet(args.jet)
    spec = _load_spec(args.spec, jet.max_weight)
    violations = check(jet, spec)
    for v in violations:
        print(v)
    print(f"{len(violations)} violation(s) among {len(conditions_up_to(spec, jet.max_weight))} conditions")
    return EXIT_OK if not violations else EXIT_VALIDATION


def cmd_apply(args) -> int:
    jet = _load_jet(args.jet)
    h = io.map_from_doc(_read(args.map))
    image = apply_map(jet, h)
    if args.verify:
        residual = check_transformation_identity(jet, h, image)
        if residual:
            raise InternalInvariantError(f"transformation identity residual is nonzero: {residual}")
        _note("verify: transformation identity holds exactly")
    _write(args.out, io.jet_to_doc(image))
    return EXIT_OK


def _parse_eps(text: str) -> Signature:
    try:
        return Signature(int(e) for e in text.split(","))
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise io.DocumentError(f"--eps: expected comma-separated +1/-1 entries, got {text!r}") from None


def cmd_decompose(args) -> int:
    doc = _read(args.poly)
    p = io.poly_from_doc(doc)
    if args.eps is not None:
        sig = _parse_eps(args.eps)
    elif isinstance(doc, dict) and "eps" in doc:
        sig = io._eps(doc, p.n, "poly")
    else:
        raise ValidationError("decompose needs --eps or an 'eps' field in the document")
    if len(sig) != p.n:
        raise ValidationError(f"signature has {len(sig)} entries but n={p.n}")
    if args.s < 1:
        raise ValidationError("s must be >= 1")
    dec = trace_decompose(p, args.s, sig)
    if args.verify:
        back = dec.q * PuSeries.levi_form(sig, p.max_weight) ** args.s + dec.r
        if back != p or trace_power(dec.r, sig, args.s):
            raise InternalInvariantError("decomposition failed re-multiplication or trace check")
        _note("verify: P = Q<z,z>^s + R and tr^s R = 0")
    _write(args.out, {"q": io.poly_to_doc(dec.q, sig), "r": io.poly_to_doc(dec.r, sig)})
    return EXIT_OK


def cmd_spec_validate(args) -> int:
    spec = _load_spec(args.spec, args.max_weight)
    if args.max_weight is not None:
        spec = spec.extended(args.max_weight)
    conds = conditions_up_to(spec, spec.max_weight)
    label = spec.preset.replace("_", "-") if spec.preset else "custom"
    print(f"valid {label} spec: {len(spec.choices)} lines, {len(conds)} conditions up to weight {spec.max_weight}")
    return EXIT_OK


def cmd_quadric(args) -> int:
    _write(args.out, io.jet_to_doc(quadric(_parse_eps(args.eps), args.max_weight)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crnormal", description="Exact normal forms of real hypersurface jets.")
    sub = p.add_subparsers(dest="command", required=True)

    spec_help = "preset name (" + ", ".join(t.replace("_", "-") for t in PRESETS) + ") or path to a spec document"

    q = sub.add_parser("normalize", help="normalize a jet")
    q.add_argument("jet")
    q.add_argument("--spec", default="chern-moser", help=spec_help)
    q.add_argument("--max-weight", type=int)
    q.add_argument("--out-nf")
    q.add_argument("--out-map")
    q.add_argument("--oracle", action="store_true", help="cross-check with the generic linear-system solver")
    q.set_defaults(func=cmd_normalize)

    q = sub.add_parser("check", help="list normal-form violations")
    q.add_argument("jet")
    q.add_argument("--spec", default="chern-moser", help=spec_help)
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("apply", help="transform a jet by a map")
    q.add_argument("jet")
    q.add_argument("map")
    q.add_argument("--out", default="-")
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=cmd_apply)

    q = sub.add_parser("decompose", help="split P = Q<z,z>^s + R with tr^s R = 0")
    q.add_argument("poly")
    q.add_argument("s", type=int)
    q.add_argument("--eps", help="signature such as 1,-1 (overrides the document)")
    q.add_argument("--out", default="-")
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=cmd_decompose)

    q = sub.add_parser("spec", help="spec utilities")
    spec_sub = q.add_subparsers(dest="spec_command", required=True)
    v = spec_sub.add_parser("validate", help="validate a spec document or preset")
    v.add_argument("spec", help=spec_help)
    v.add_argument("--max-weight", type=int)
    v.set_defaults(func=cmd_spec_validate)

    q = sub.add_parser("quadric", help="write the quadric jet")
    q.add_argument("--eps", required=True, help="signature such as 1,-1")
    q.add_argument("--max-weight", type=int, default=6)
    q.add_argument("--out", default="-")
    q.set_defaults(func=cmd_quadric)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (io.DocumentError, CoefficientSyntaxError) as exc:
        _note(f"parse error: {exc}")
        return EXIT_PARSE
    except InternalInvariantError as exc:
        _note(f"internal error: {exc}")
        return EXIT_INTERNAL
    except (ValidationError, ZeroDivisionError) as exc:
        _note(f"validation error: {exc}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
