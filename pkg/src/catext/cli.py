"""Command-line front end: JSON in, JSON report out.

Exit codes: 0 ok, 1 violations found, 2 malformed input, 3 resource refusal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Any, Callable, Sequence

from .abgrp import PresentedAbGroup
from .adams import (
    PToralData, adams_of_degree, enumerate_ad, extension_class_order, group_cohomology,
    h1_weyl_vanishing, torus_cohomology, validate_ptoral, z1_elements,
)
from .cobar import Cochain, cohomology, scalar_action_on_class
from .errors import CatextError, ResourceRefusal, max_cells
from .extension import (
    Extension, aut_id_id_mod_inner, are_equivalent, build_from_cocycle, extension_class,
    is_split, morphism_exists, validate_extension,
)
from .fincat import (
    AbFunctor, CatFunctor, FinCat, one_object_cat, scalar_nat_trans, validate_abfunctor,
    validate_category,
)
from .padic import units

EXIT_OK, EXIT_VIOLATIONS, EXIT_MALFORMED, EXIT_REFUSED = 0, 1, 2, 3


class Malformed(Exception):
    pass


class Violations(Exception):
    def __init__(self, violations, result=None):
        super().__init__("violations found")
        self.violations = violations
        self.result = result


def _inv(G: PresentedAbGroup) -> list[int]:
    return [d for d in G.invariants if d != 1]


def _check(violations) -> None:
    if violations:
        raise Violations([v.to_json() for v in violations])


def _load_category_functor(data: dict) -> tuple[FinCat, AbFunctor]:
    if "group" in data:
        C = one_object_cat(data["group"])
    else:
        C = FinCat.from_json(data["category"])
    _check(validate_category(C))
    F = AbFunctor.from_json(C, data["functor"])
    _check(validate_abfunctor(F))
    return C, F


def _load_extension(data: dict) -> Extension:
    E = Extension.from_json(data)
    _check(validate_extension(E))
    return E


def _load_ptoral(data: dict) -> PToralData:
    S = PToralData.from_json(data)
    _check(validate_ptoral(S))
    return S


# ---------------------------------------------------------------------------
# commands; each returns (result, witnesses)


def cmd_validate(data: dict, args) -> tuple[Any, Any]:
    if "total" in data:
        kind, found = "extension", validate_extension(Extension.from_json(data))
    elif "pi" in data:
        kind, found = "ptoral", validate_ptoral(PToralData.from_json(data))
    elif "functor" in data:
        C = one_object_cat(data["group"]) if "group" in data else FinCat.from_json(data["category"])
        found = validate_category(C)
        if not found:
            found = validate_abfunctor(AbFunctor.from_json(C, data["functor"]))
        kind = "functor"
    elif "comp" in data:
        kind, found = "category", validate_category(FinCat.from_json(data))
    else:
        raise Malformed("cannot tell what kind of object the input describes")
    if found:
        raise Violations([v.to_json() for v in found], {"kind": kind, "valid": False})
    return {"kind": kind, "valid": True}, None


def cmd_cohom(data: dict, args) -> tuple[Any, Any]:
    top = 2 if args.degree is None else args.degree
    if "torus" in data:
        # discrete torus coefficients: group table, integral action matrices, prime
        t = data["torus"]
        k = args.precision or int(t.get("k", 2))
        out = {str(n): torus_cohomology(data["group"], t["action"], int(t["p"]), k, n).to_json()
               for n in range(top + 1)}
        return {"coefficients": "torus", "cohomology": out}, None
    C, F = _load_category_functor(data)
    out = {str(n): _inv(cohomology(C, F, n, max_degree=max(top, 3)).group) for n in range(top + 1)}
    return {"coefficients": "functor", "cohomology": out}, None


def cmd_ext_class(data: dict, args) -> tuple[Any, Any]:
    x = extension_class(_load_extension(data))
    return {"is_zero": x.is_zero(), "order": x.order(), "group_invariants": list(x.ambient.invariants),
            "coordinates": list(x.coordinates())}, {"cocycle": x.representative.to_json()}


def cmd_ext_build(data: dict, args) -> tuple[Any, Any]:
    C, F = _load_category_functor(data)
    z = Cochain.from_json(F, data["cocycle"])
    E = build_from_cocycle(C, F, z)
    _check(validate_extension(E))
    return E.to_json(), None


def _pair(data) -> tuple[dict, dict]:
    if isinstance(data, list) and len(data) == 2:
        return data[0], data[1]
    if isinstance(data, dict) and "first" in data and "second" in data:
        return data["first"], data["second"]
    raise Malformed("expected two extensions (two files, or {\"first\", \"second\"})")


def cmd_ext_equiv(data, args) -> tuple[Any, Any]:
    a, b = _pair(data)
    E, E2 = _load_extension(a), _load_extension(b)
    M = are_equivalent(E, E2)
    return {"equivalent": M is not None}, (M.to_json() if M else None)


def cmd_ext_split(data: dict, args) -> tuple[Any, Any]:
    E = _load_extension(data)
    s = is_split(E)
    if s is not None:
        return {"split": True, "verdict": "split"}, {"section": s.to_json()}
    x = extension_class(E)
    return {"split": False, "verdict": "not split"}, {
        "class_order": x.order(), "group_invariants": list(x.ambient.invariants),
        "coordinates": list(x.coordinates())}


def cmd_ext_aut(data: dict, args) -> tuple[Any, Any]:
    A = aut_id_id_mod_inner(_load_extension(data))
    return {"aut_mod_inner_invariants": _inv(A.group), "order": A.group.order}, {
        "generators": [M.functor.to_json() for M in A.generator_automorphisms]}


def cmd_ext_scalar_aut(data: dict, args) -> tuple[Any, Any]:
    if args.zeta is None:
        raise Malformed("--zeta is required")
    E = _load_extension(data)
    eta = scalar_nat_trans(E.coeff, args.zeta)
    M = morphism_exists(E, E, CatFunctor.identity(E.base), eta)
    x = extension_class(E)
    out = {"zeta": args.zeta, "exists": M is not None,
           "class_fixed": scalar_action_on_class(x, args.zeta) == x}
    return out, (M.functor.to_json() if M else None)


def cmd_adams(data: dict, args) -> tuple[Any, Any]:
    S = _load_ptoral(data)
    if args.precision is not None and args.precision != S.k:
        raise Malformed(f"--precision {args.precision} does not match the datum's level {S.k}")
    order, m = extension_class_order(S)
    degrees = [u.residue for u in units(S.p, S.k) if adams_of_degree(S, u) is not None]
    out: dict[str, Any] = {"p": S.p, "k": S.k, "class_order": order, "m": m,
                           "realized_degrees": degrees, "z1_count": len(z1_elements(S))}
    wit = None
    if args.zeta is not None:
        psi = adams_of_degree(S, args.zeta)
        out["zeta"] = args.zeta
        out["exists"] = psi is not None
        wit = psi.to_json() if psi else None
    if args.enumerate:
        out["ad_count"] = len(enumerate_ad(S, bound=max_cells(args.max_cells)))
    return out, wit


def cmd_group_cohom(data: dict, args) -> tuple[Any, Any]:
    top = 2 if args.degree is None else args.degree
    G = data["group"]
    one_object_cat(G)
    M = PresentedAbGroup.from_json(data["module"]) if "module" in data else PresentedAbGroup.free(1)
    action = data.get("action")
    out = {str(n): _inv(group_cohomology(G, M, action, n)) for n in range(top + 1)}
    return {"cohomology": out}, None


def cmd_weyl_h1(data: dict, args) -> tuple[Any, Any]:
    k = args.precision or int(data.get("k", 2))
    one_object_cat(data["group"])
    rep = h1_weyl_vanishing(data["group"], data["action"], data.get("D", []), int(data["p"]), k)
    return rep, None


def cmd_psu_demo(data, args) -> tuple[Any, Any]:
    from .psu import psu_demo
    return psu_demo(args.p, args.K), None


COMMANDS: dict[str, tuple[Callable, bool, str]] = {
    "validate": (cmd_validate, True, "check a category, functor, extension or p-toral datum"),
    "cohom": (cmd_cohom, True, "cohomology of a category with functor (or torus) coefficients"),
    "ext-class": (cmd_ext_class, True, "class of an extension in H^2"),
    "ext-build": (cmd_ext_build, True, "build an extension from a regular 2-cocycle"),
    "ext-equiv": (cmd_ext_equiv, True, "test two extensions for equivalence"),
    "ext-split": (cmd_ext_split, True, "decide whether an extension splits"),
    "ext-aut": (cmd_ext_aut, True, "automorphisms over the identity modulo inner ones"),
    "ext-scalar-aut": (cmd_ext_scalar_aut, True, "lift multiplication by --zeta to the extension"),
    "adams": (cmd_adams, True, "Adams automorphisms of a p-toral datum"),
    "group-cohom": (cmd_group_cohom, True, "cohomology of a finite group with module coefficients"),
    "weyl-h1": (cmd_weyl_h1, True, "vanishing criteria for H^1 of a Weyl group in a torus"),
    "psu-demo": (cmd_psu_demo, False, "no-section computation in PSU(2p)"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catext", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name, (_, takes_input, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, help=helptext)
        if takes_input:
            sp.add_argument("inputs", nargs="*", help="JSON files ('-' or nothing for stdin)")
        sp.add_argument("--degree", type=int)
        sp.add_argument("--precision", type=int)
        sp.add_argument("--pretty", action="store_true")
        sp.add_argument("--max-cells", type=int, dest="max_cells")
        if name in ("ext-scalar-aut", "adams"):
            sp.add_argument("--zeta", type=int)
        if name == "adams":
            sp.add_argument("--enumerate", action="store_true")
        if name == "psu-demo":
            sp.add_argument("--p", type=int, default=3)
            sp.add_argument("--K", type=int, default=2)
    return parser


def _read_inputs(paths: Sequence[str], stdin) -> Any:
    texts = []
    if not paths or paths == ["-"]:
        texts.append(("<stdin>", stdin.read()))
    else:
        for path in paths:
            if path == "-":
                texts.append(("<stdin>", stdin.read()))
                continue
            try:
                with open(path) as fh:
                    texts.append((path, fh.read()))
            except OSError as exc:
                raise Malformed(f"cannot read {path}: {exc.strerror}") from None
    docs = []
    for name, text in texts:
        try:
            docs.append(json.loads(text))
        except json.JSONDecodeError as exc:
            raise Malformed(f"{name}: invalid JSON at line {exc.lineno} column {exc.colno} "
                            f"(char {exc.pos}): {exc.msg}") from None
    return docs[0] if len(docs) == 1 else docs


def _pretty(value: Any, prefix: str = "") -> list[str]:
    if isinstance(value, dict):
        lines = []
        for key in sorted(value):
            lines += _pretty(value[key], f"{prefix}.{key}" if prefix else str(key))
        return lines or [f"{prefix}: {{}}"]
    if isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
        lines = []
        for i, v in enumerate(value):
            lines += _pretty(v, f"{prefix}[{i}]")
        return lines
    return [f"{prefix}: {json.dumps(value, sort_keys=True)}"]


def run(argv: Sequence[str], stdin=None, stdout=None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    func, takes_input, _ = COMMANDS[args.command]
    report: dict[str, Any] = {"command": args.command}
    saved = os.environ.get("CATEXT_MAX_CELLS")
    if args.max_cells is not None:
        os.environ["CATEXT_MAX_CELLS"] = str(args.max_cells)
    start = time.perf_counter()
    try:
        data = _read_inputs(args.inputs, stdin) if takes_input else None
        result, witnesses = func(data, args)
        report.update(status="ok", result=result, witnesses=witnesses)
        code = EXIT_OK
    except Violations as exc:
        report.update(status="violations", result=exc.result, witnesses=exc.violations)
        code = EXIT_VIOLATIONS
    except ResourceRefusal as exc:
        report.update(status="refused", result=None,
                      witnesses={"what": exc.what, "estimate": exc.estimate, "limit": exc.limit})
        code = EXIT_REFUSED
    except (Malformed, CatextError, KeyError, TypeError, ValueError, IndexError) as exc:
        detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        report.update(status="malformed", result=None, witnesses={"error": detail})
        code = EXIT_MALFORMED
    finally:
        if args.max_cells is not None:
            if saved is None:
                os.environ.pop("CATEXT_MAX_CELLS", None)
            else:
                os.environ["CATEXT_MAX_CELLS"] = saved
    report["timing"] = round(time.perf_counter() - start, 6)
    if args.pretty:
        stdout.write("\n".join(_pretty(report)) + "\n")
    else:
        stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))
