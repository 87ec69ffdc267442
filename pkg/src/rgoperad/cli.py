"""Command line front end.

Exit codes: 0 ok, 1 parse error, 2 enumeration cap exceeded,
3 algebraic precondition violated, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from itertools import product
from pathlib import Path

from .combinatorics import Permutation
from .contraction_operad import (
    DEFAULT_CAP,
    CapExceeded,
    ContractionMap,
    ContractionOperad,
    QftModel,
    VertexType,
    admissible_system,
    closure_check,
    enumerate_diagrams,
    intersection,
    model_operad,
    one_pi_system,
    vertex_type_system,
)
from .graphs import ColorSignature
from .group import (
    GroupElement,
    LieElement,
    exp_map,
    group_inverse,
    group_product,
    log_map,
    prelie_associator_symmetry,
)
from .operad import check_operad_axioms
from .wick_rg import coupling_operad, morphism, rg_action, wick_differential, wick_enumerate

EXIT_OK, EXIT_PARSE, EXIT_CAP, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3, 4


class ParseError(Exception):
    pass


class Precondition(Exception):
    pass


# -- model config -------------------------------------------------------------------

_TOP_KEYS = {"fields", "vertex_colors", "admissible", "vertex_types", "require_1pi", "forbid_tadpoles"}
_REQUIRED = {"fields", "vertex_colors", "admissible", "vertex_types"}


def _reject_unknown(obj: dict, allowed: set, where: str):
    extra = set(obj) - allowed
    if extra:
        raise ParseError(f"unknown keys in {where}: {sorted(extra)}")


def model_from_config(data, raw_admissible: bool = False) -> QftModel:
    """Build a model from a parsed JSON config.

    The admissible pairs are closed under swapping unless ``raw_admissible``
    is set, which also disables the symmetry check.
    """
    if not isinstance(data, dict):
        raise ParseError("config must be a JSON object")
    _reject_unknown(data, _TOP_KEYS, "config")
    missing = _REQUIRED - set(data)
    if missing:
        raise ParseError(f"missing keys in config: {sorted(missing)}")
    try:
        names, parity = [], {}
        for f in data["fields"]:
            _reject_unknown(f, {"name", "parity"}, "field")
            names.append(f["name"])
            parity[f["name"]] = f.get("parity", "boson")
        sig = ColorSignature(tuple(data["vertex_colors"]), tuple(names), parity)
        pairs = set()
        for p in data["admissible"]:
            if not isinstance(p, list) or len(p) != 2:
                raise ParseError(f"admissible entries must be pairs, got {p!r}")
            pairs.add(tuple(p))
            if not raw_admissible:
                pairs.add((p[1], p[0]))
        types = []
        for t in data["vertex_types"]:
            _reject_unknown(t, {"color", "corolla", "name"}, "vertex type")
            types.append(VertexType(t["color"], tuple(t["corolla"]), t.get("name")))
        for key in ("require_1pi", "forbid_tadpoles"):
            if not isinstance(data.get(key, True), bool):
                raise ParseError(f"{key} must be a boolean")
        return QftModel(
            sig,
            frozenset(pairs),
            tuple(types),
            require_1pi=data.get("require_1pi", True),
            forbid_tadpoles=data.get("forbid_tadpoles", True),
            check_symmetry=not raw_admissible,
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed config: {exc!r}") from exc
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def load_model(path: str, raw_admissible: bool = False) -> QftModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return model_from_config(data, raw_admissible)


# -- element files ------------------------------------------------------------------

def render_element(x) -> str:
    return x.render()


def parse_element(text: str, carrier: ContractionOperad, order: int, cls=GroupElement):
    """Read a group or Lie element: contraction-map lines of arities 2..order."""
    try:
        entries = ContractionMap.parse_lines(text, carrier.signature)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    by_arity: dict[int, dict] = {}
    for (m, K), v in entries.items():
        by_arity.setdefault(m.n, {})[(m, K)] = v
    bad = sorted(n for n in by_arity if not 2 <= n <= order)
    if bad:
        raise Precondition(f"element has components of arity {bad}, outside 2..{order}")
    comps = []
    for n in range(2, order + 1):
        try:
            comps.append(carrier.element(n, by_arity.get(n, {})))
        except ValueError as exc:
            raise Precondition(str(exc)) from exc
    return cls(carrier, order, comps)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------------

def cmd_diagrams(args) -> int:
    model = load_model(args.model, args.raw_admissible)
    diagrams = enumerate_diagrams(model, args.n, cap=args.cap)
    text = "".join(f"{m}\n" for m in diagrams)
    if args.out:
        _emit(text, args.out)
        print(len(diagrams))
    else:
        sys.stdout.write(text)
        print(len(diagrams), file=sys.stderr)
    return EXIT_OK


def _carrier(args):
    model = load_model(args.model, args.raw_admissible)
    return model, ContractionOperad(model, cap=args.cap)


def cmd_compose(args) -> int:
    _, P = _carrier(args)
    g = parse_element(_read(args.left), P, args.order)
    h = parse_element(_read(args.right), P, args.order)
    _emit(render_element(group_product(g, h)), args.out)
    return EXIT_OK


def cmd_invert(args) -> int:
    _, P = _carrier(args)
    g = parse_element(_read(args.element), P, args.order)
    _emit(render_element(group_inverse(g)), args.out)
    return EXIT_OK


def cmd_exp(args) -> int:
    _, P = _carrier(args)
    lie = parse_element(_read(args.element), P, args.order, LieElement)
    _emit(render_element(exp_map(lie)), args.out)
    return EXIT_OK


def cmd_log(args) -> int:
    _, P = _carrier(args)
    g = parse_element(_read(args.element), P, args.order)
    _emit(render_element(log_map(g)), args.out)
    return EXIT_OK


def cmd_rg_action(args) -> int:
    model, P = _carrier(args)
    g = parse_element(_read(args.element), P, args.order)
    try:
        series = rg_action(g)
    except ValueError as exc:
        raise Precondition(str(exc)) from exc
    _emit(series.render(model.type_names), args.out)
    return EXIT_OK


def _verify_axioms(model, args):
    carrier = model_operad(model, args.cap)
    rng = random.Random(args.seed)
    report = check_operad_axioms(carrier, rng=rng, n_samples=args.samples, max_arity=args.arity)
    text = report.summary()
    if report.passed and args.arity >= 2:
        handedness = prelie_associator_symmetry(carrier, args.arity, rng)
        text += f"\npre-Lie associator symmetry: {handedness}"
    return report.passed, text


def _verify_closure(model, args):
    systems = [one_pi_system(), admissible_system(model), vertex_type_system(model)]
    systems.append(intersection(*systems))
    lines, ok = [], True
    for S in systems:
        report = closure_check(S, model, args.arity, cap=args.cap)
        ok = ok and report.passed
        lines.append(report.summary())
    return ok, "\n".join(lines)


def _verify_wick(model, args):
    checked = 0
    for n in range(1, args.arity + 1):
        for combo in product(model.vertex_types, repeat=n):
            checked += 1
            a, b = wick_enumerate(model, combo), wick_differential(model, combo)
            if a != b:
                names = ", ".join(t.name for t in combo)
                return False, (f"wick: FAIL after {checked} tuples\n  counterexample: ({names})\n"
                               f"  enumeration:\n{a.render()}  differential:\n{b.render()}")
    return True, f"wick: pass ({checked} vertex tuples)"


def _verify_morphism(model, args):
    P = model_operad(model, args.cap)
    E = coupling_operad(model)
    rng = random.Random(args.seed)
    shapes = [(x, y) for x in range(1, args.arity + 1) for y in range(1, args.arity + 1) if x + y - 1 <= args.arity]
    checks = 0
    for _ in range(args.samples):
        n1, n2 = rng.choice(shapes)
        a, b = P.random_element(n1, rng), P.random_element(n2, rng)
        i = rng.randint(1, n1)
        checks += 1
        if morphism(P.pcomp(a, i, b), model) != E.pcomp(morphism(a, model), i, morphism(b, model)):
            return False, f"morphism: FAIL\n  counterexample: composition at slot {i}\n{a.render()}  with\n{b.render()}"
        sigma = Permutation(tuple(rng.sample(range(1, n1 + 1), n1)))
        checks += 1
        if morphism(P.act(a, sigma), model) != E.act(morphism(a, model), sigma):
            return False, f"morphism: FAIL\n  counterexample: action of {sigma.images} on\n{a.render()}"
    return True, f"morphism: pass ({checks} checks)"


_VERIFIERS = {
    "axioms": _verify_axioms,
    "closure": _verify_closure,
    "wick": _verify_wick,
    "morphism": _verify_morphism,
}


def cmd_verify(args) -> int:
    model = load_model(args.model, args.raw_admissible)
    ok, text = _VERIFIERS[args.which](model, args)
    print(text)
    return EXIT_OK if ok else EXIT_VERIFY


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="model config (JSON)")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="diagram enumeration cap")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--raw-admissible", action="store_true",
                        help="use the admissible pairs as written: no swap closure, no symmetry check")

    algebra = argparse.ArgumentParser(add_help=False)
    algebra.add_argument("--order", type=int, required=True, help="truncation order m")

    parser = argparse.ArgumentParser(prog="rgoperad", description="Contraction operads and renormalization group actions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagrams", parents=[common], help="list model diagrams with n vertices")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_diagrams)

    p = sub.add_parser("compose", parents=[common, algebra], help="group product of two elements")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_compose)

    for name, func, help_text in (
        ("invert", cmd_invert, "group inverse"),
        ("exp", cmd_exp, "exponential of a Lie element"),
        ("log", cmd_log, "logarithm of a group element"),
        ("rg-action", cmd_rg_action, "induced formal diffeomorphism of coupling space"),
    ):
        p = sub.add_parser(name, parents=[common, algebra], help=help_text)
        p.add_argument("element")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="run a property check")
    p.add_argument("which", choices=sorted(_VERIFIERS))
    p.add_argument("--arity", type=int, default=3, help="largest arity (vertex count) to check")
    p.add_argument("--samples", type=int, default=20, help="random samples for sampled checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "order", 2) < 1:
        print("error: --order must be >= 1", file=sys.stderr)
        return EXIT_PRECONDITION
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except Precondition as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
