"""Command line interface.

Subcommands: basis (dump harmonic/slice families), invariants (evaluate a
form file or a directory of them), equiv (decide orthogonal equivalence),
reconstruct (build a form from prescribed invariant values), rewrite
(express an invariant in the generators), render (OBJ surface export).

Exit codes: 0 success, 1 usage, 2 degenerate input, 3 not an invariant,
4 no unambiguous reconstruction.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .forms import form_from_json, form_to_json, load_form, format_form
from .harmonic import slice_basis, spanning_set
from .invariants import (
    NoUnambiguousReconstruction,
    Verdict,
    equivalent,
    evaluate_invariants,
    invariants_from_json,
    invariants_to_json,
    quad_invariants,
)
from .meshes import sample_surface, write_obj
from .reference import reference_scales
from .rewrite import (
    NotInvariantError,
    parse_expression,
    quartic_aux_rewrite,
    rewrite_invariant,
    verify_rewrite,
)
from .slicing import DEFAULT_GAP_TOL, DegenerateForm

EXIT_USAGE = 1
EXIT_DEGENERATE = 2
EXIT_NOT_INVARIANT = 3
EXIT_NO_RECONSTRUCTION = 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


def _emit(data, output: str | None) -> None:
    text = json.dumps(data, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _check_degree_flag(form, flag) -> str | None:
    if flag is not None and flag != form.degree:
        return f"--degree {flag} does not match the form file (degree {form.degree})"
    return None


# ---------------------------------------------------------------------------


def cmd_basis(args) -> int:
    two_d = args.degree
    if two_d % 2 or two_d < 4:
        return _fail(EXIT_USAGE, "basis requires an even degree >= 4")
    d = two_d // 2
    if args.slice:
        basis = slice_basis(d)
        entries = [
            {"i": i, "j": j, "zeta": block.zeta, "xi": block.xi,
             "label": block.label, "form": form_to_json(block.forms[i - 1])}
            for j, block in enumerate(basis.blocks)
            for i in (1, 2, 3)
        ]
        payload = {
            "degree": two_d, "family": "slice", "k": basis.k_slice,
            "elements": entries,
        }
        if basis.w_infinity is not None:
            payload["w_infinity"] = form_to_json(basis.w_infinity)
    else:
        ss = spanning_set(d)
        entries = [
            {"i": i, "j": j, "zeta": ss.signature.zeta[j], "xi": ss.signature.xi[j],
             "form": form_to_json(ss.element(i, j))}
            for j in range(ss.k)
            for i in (1, 2, 3)
        ]
        payload = {
            "degree": two_d, "family": "harmonic", "k": ss.k,
            "relation": ss.relation, "elements": entries,
        }
        if two_d in (4, 6, 8):
            payload["reference_scales"] = {
                f"{i},{j}": str(scale)
                for (i, j), scale in sorted(reference_scales(two_d).items())
            }
    if args.json:
        _emit(payload, args.output)
        return 0
    lines = [f"degree {two_d}  family {payload['family']}"]
    if "relation" in payload:
        lines.append(f"relation: {payload['relation']}")
    for entry in payload["elements"]:
        form = form_from_json(entry["form"])
        lines.append(
            f"({entry['i']},{entry['j']}) zeta={entry['zeta']} xi={entry['xi']}: "
            + format_form(form)
        )
    if "w_infinity" in payload:
        lines.append("w_inf: " + format_form(form_from_json(payload["w_infinity"])))
    if "reference_scales" in payload:
        lines.append("scales vs integer-normalized reference: "
                     + ", ".join(f"({k})={v}" for k, v in payload["reference_scales"].items()))
    text = "\n".join(lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _invariants_for_file(path: str, tol: float):
    form = load_form(path)
    if form.degree == 2:
        e = quad_invariants(form)
        return {"degree": 2, "e1": _num(e.e1), "e2": _num(e.e2), "e3": _num(e.e3)}
    if form.degree % 2 or form.degree < 4:
        raise ValueError(f"unsupported degree {form.degree}")
    return invariants_to_json(evaluate_invariants(form, tol))


def _num(x):
    from fractions import Fraction

    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def cmd_invariants(args) -> int:
    if os.path.isdir(args.form):
        files = sorted(
            os.path.join(args.form, name)
            for name in os.listdir(args.form) if name.endswith(".json")
        )
        results: dict[str, dict] = {}
        degenerate = False

        def work(path):
            try:
                return path, _invariants_for_file(path, args.tol)
            except DegenerateForm as exc:
                return path, {"error": "degenerate", "message": str(exc)}
            except Exception as exc:
                return path, {"error": "invalid", "message": str(exc)}

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            for path, result in pool.map(work, files):
                results[os.path.basename(path)] = result
                degenerate = degenerate or result.get("error") == "degenerate"
        _emit(results, args.output)
        return EXIT_DEGENERATE if degenerate else 0

    form = load_form(args.form)
    problem = _check_degree_flag(form, args.degree)
    if problem:
        return _fail(EXIT_USAGE, problem)
    try:
        result = _invariants_for_file(args.form, args.tol)
    except DegenerateForm as exc:
        return _fail(EXIT_DEGENERATE, f"invariants undefined at this form: {exc}")
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    _emit(result, args.output)
    return 0


def cmd_equiv(args) -> int:
    left = load_form(args.left)
    right = load_form(args.right)
    if left.degree != right.degree or left.degree % 2:
        return _fail(EXIT_USAGE, "equiv requires two forms of the same even degree")
    try:
        verdict = equivalent(left, right, args.tol)
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    print(verdict.value.capitalize())
    if verdict is Verdict.UNDECIDED:
        return EXIT_DEGENERATE
    return 0


def cmd_reconstruct(args) -> int:
    with open(args.values) as fh:
        try:
            mu = invariants_from_json(json.load(fh))
        except (KeyError, ValueError) as exc:
            return _fail(EXIT_USAGE, f"bad invariant vector file: {exc}")
    try:
        from .invariants import reconstruct

        form = reconstruct(mu)
    except NoUnambiguousReconstruction as exc:
        return _fail(EXIT_NO_RECONSTRUCTION, str(exc))
    _emit(form_to_json(form), args.output)
    return 0


def cmd_rewrite(args) -> int:
    two_d = args.degree
    if two_d % 2 or two_d < 4:
        return _fail(EXIT_USAGE, "rewrite requires an even degree >= 4")
    d = two_d // 2
    system = "aux" if args.aux else "minimal"
    if args.aux and d != 2:
        return _fail(EXIT_USAGE, "the auxiliary system applies to degree 4 only")
    try:
        expr = parse_expression(args.expression, d, system)
    except ValueError as exc:
        return _fail(EXIT_USAGE, f"cannot parse expression: {exc}")
    try:
        result = quartic_aux_rewrite(expr) if args.aux else rewrite_invariant(expr, d)
    except NotInvariantError as exc:
        return _fail(EXIT_NOT_INVARIANT, f"not an invariant: {exc}")
    print(result)
    if args.verify:
        ok = verify_rewrite(expr, result, d, samples=args.verify,
                            seed=args.seed, system=system)
        print(f"verification ({args.verify} samples): {'ok' if ok else 'FAILED'}")
        if not ok:
            return EXIT_NOT_INVARIANT
    return 0


def cmd_render(args) -> int:
    form = load_form(args.form)
    mesh = sample_surface(form, args.subdiv)
    write_obj(mesh, args.output)
    print(f"wrote {len(mesh.vertices)} vertices, {len(mesh.faces)} faces to {args.output}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="terninv",
                             description="Rational orthogonal invariants of ternary forms")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", parents=[], help="dump an equivariant family")
    p.add_argument("--degree", type=int, required=True, help="form degree 2d (even, >= 4)")
    p.add_argument("--slice", action="store_true", help="dump the slice family instead")
    p.add_argument("--json", action="store_true", help="JSON output (default: text)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("invariants", help="evaluate the generating invariants")
    p.add_argument("form", help="form JSON file, or a directory of them")
    p.add_argument("--tol", type=float, default=DEFAULT_GAP_TOL,
                   help="relative eigenvalue-gap tolerance")
    p.add_argument("--degree", type=int, help="expected degree (checked against the file)")
    p.add_argument("--jobs", type=int, default=4, help="parallel workers for directories")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("equiv", help="decide orthogonal equivalence of two forms")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--tol", type=float, default=DEFAULT_GAP_TOL)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("reconstruct", help="build a form with prescribed invariants")
    p.add_argument("values", help="invariant vector JSON file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("rewrite", help="express an invariant in the generators")
    p.add_argument("expression", help="expression over a1..a3, al[i][j], ainf")
    p.add_argument("--degree", type=int, default=4, help="form degree 2d")
    p.add_argument("--aux", action="store_true",
                   help="use the 13-element auxiliary quartic system")
    p.add_argument("--verify", type=int, default=0, metavar="N",
                   help="numerically verify on N random samples")
    p.add_argument("--seed", type=int, default=0, help="seed for verification sampling")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("render", help="export the form surface as OBJ")
    p.add_argument("form")
    p.add_argument("--subdiv", type=int, default=4, help="icosphere subdivision level")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
