"""Command-line interface: every pipeline stage with scriptable JSON I/O.

Exit codes: 0 success, 1 usage or input errors, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
from mpmath import mp

from . import reference
from .conditions import (
    leading_error_term,
    lyndon_coefficient_matrix,
    order_conditions,
    residual_of_scheme,
)
from .magnus import (
    SchemeParameters,
    assemble_scheme_expression,
    eighth_order_condition_sets,
    gauss_rule_order8,
    inverse_quadrature_map,
    magnus_alphabet,
    magnus_rhs_for_word,
    positivity_check,
    quadrature_map,
    scheme_from_json_dict,
    scheme_to_json_dict,
)
from .ncexpr import parse_expression, print_expression, substitute_parameters, to_json_dict
from .oracle import series_of
from .poly import PolyRational
from .rings import (
    GUARD_DIGITS,
    default_digits,
    mpc_str,
    rat_str,
)
from .solver import (
    PolySystem,
    build_magnus8_stage1,
    build_splitting4_system,
    magnus8_stage1_variables,
    multistart_search,
    solve_splitting_example,
    staged_solve_magnus8,
)
from .wcoeff import wcoeff
from .words import GradedAlphabet, Word, lyndon_bracketing, lyndon_words_of_grade, lyndon_words_of_odd_grade_up_to


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_expr_arg(value: str) -> str:
    if value.startswith("@"):
        return Path(value[1:]).read_text().strip()
    return value


def _parse_params(value: str | None) -> tuple[tuple[str, ...], dict]:
    """Parameter names, plus values when a JSON assignment file is given."""
    if not value:
        return (), {}
    path = Path(value)
    if value.endswith(".json") and path.exists():
        doc = json.loads(path.read_text())
        names = tuple(doc)
        values = {k: Fraction(v) if isinstance(v, str) else Fraction(v) for k, v in doc.items()}
        return names, values
    return tuple(p.strip() for p in value.split(",") if p.strip()), {}


def _scalar_text(value, digits: int) -> str:
    if isinstance(value, Fraction):
        return rat_str(value)
    if isinstance(value, PolyRational):
        return str(value)
    if isinstance(value, mpmath.mpc):
        return mpc_str(value, digits)
    return mpmath.nstr(mpmath.mpf(value), digits)


def _add_common(sub, alphabet=True, params=False):
    sub.add_argument("--digits", type=int, default=None, help="working precision (decimal digits)")
    if alphabet:
        sub.add_argument("--alphabet", default="A:1,B:1", help='symbols with grades, e.g. "A:1,B:1"')
    if params:
        sub.add_argument("--params", default=None, help="comma-separated names or a JSON assignment file")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="expocon")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wcoeff", help="coefficient of a word in an expression")
    p.add_argument("--word", required=True, help='word, e.g. "A A B" or "AAB"')
    p.add_argument("--expr", required=True, help="expression text or @file")
    _add_common(p, params=True)

    p = sub.add_parser("expand", help="truncated series of an expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--max-grade", type=int, required=True)
    _add_common(p, params=True)

    p = sub.add_parser("lyndon", help="Lyndon words by grade")
    p.add_argument("--grade", type=int, default=None)
    p.add_argument("--odd-up-to", type=int, default=None)
    p.add_argument("--bracket", action="store_true", help="include the Lyndon bracketings")
    _add_common(p)

    p = sub.add_parser("conditions", help="order conditions for an ansatz")
    p.add_argument("--ansatz", required=True, help="expression text or @file")
    p.add_argument("--target", required=True, help='expression text, @file, or "magnus"')
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--self-adjoint", action="store_true")
    _add_common(p, params=True)

    p = sub.add_parser("leading-error", help="lowest-grade error term of an expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--max-grade", type=int, required=True)
    _add_common(p, params=True)

    p = sub.add_parser("magnus-rhs", help="closed-form flow coefficient of a word")
    p.add_argument("--word", required=True, help='word over A1..AK, e.g. "A1 A2"')
    p.add_argument("--k", type=int, default=4, help="number of generators")
    p.add_argument("--digits", type=int, default=None)

    p = sub.add_parser("quadrature", help="map exponent rows to per-node rows (or back)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", default=None)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--digits", type=int, default=None)

    p = sub.add_parser("solve", help="multistart search on a polynomial system")
    p.add_argument("--system", required=True, help="JSON file with variables and equations")
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="check a scheme against the flow coefficients")
    p.add_argument("--scheme", required=True, help="scheme JSON file")
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--tol", default="1e-12")

    p = sub.add_parser("repro", help="recompute bundled reference results")
    p.add_argument("target", choices=["strang", "splitting4", "magnus8"])
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=0, help="magnus8: run a multistart census too")
    p.add_argument("--out", default=None)

    return parser


def _alphabet_from(args) -> GradedAlphabet:
    return GradedAlphabet.from_spec(args.alphabet)


def _digits_from(args) -> int:
    return args.digits if args.digits is not None else default_digits()


def cmd_wcoeff(args) -> int:
    alphabet = _alphabet_from(args)
    names, values = _parse_params(args.params)
    expr = parse_expression(_read_expr_arg(args.expr), alphabet, names)
    if values:
        expr = substitute_parameters(expr, values)
    word = Word.parse(alphabet, args.word)
    digits = _digits_from(args)
    with mp.workdps(digits + GUARD_DIGITS):
        value = wcoeff(word, expr)
        doc = {"word": str(word), "coefficient": _scalar_text(value, digits)}
    _emit(doc, None)
    return 0


def cmd_expand(args) -> int:
    alphabet = _alphabet_from(args)
    names, values = _parse_params(args.params)
    expr = parse_expression(_read_expr_arg(args.expr), alphabet, names)
    if values:
        expr = substitute_parameters(expr, values)
    digits = _digits_from(args)
    with mp.workdps(digits + GUARD_DIGITS):
        series = series_of(expr, args.max_grade, alphabet=alphabet)
        doc = {
            "max_grade": args.max_grade,
            "coefficients": {
                word: _scalar_text(value, digits)
                for word, value in series.to_dict().items()
            },
        }
    _emit(doc, None)
    return 0


def cmd_lyndon(args) -> int:
    alphabet = _alphabet_from(args)
    if (args.grade is None) == (args.odd_up_to is None):
        raise ValueError("give exactly one of --grade or --odd-up-to")
    if args.grade is not None:
        words = lyndon_words_of_grade(alphabet, args.grade)
    else:
        words = lyndon_words_of_odd_grade_up_to(alphabet, args.odd_up_to)
    if args.bracket:
        doc = [{"word": str(w), "bracket": str(lyndon_bracketing(w))} for w in words]
    else:
        doc = [str(w) for w in words]
    _emit(doc, None)
    return 0


def cmd_conditions(args) -> int:
    alphabet = _alphabet_from(args)
    names, values = _parse_params(args.params)
    S = parse_expression(_read_expr_arg(args.ansatz), alphabet, names)
    if values:
        S = substitute_parameters(S, values)
    if args.target == "magnus":
        system = order_conditions(
            S, None, p=args.order, self_adjoint=args.self_adjoint,
            rhs_provider=magnus_rhs_for_word,
        )
    else:
        E = parse_expression(_read_expr_arg(args.target), alphabet, names)
        system = order_conditions(S, E, p=args.order, self_adjoint=args.self_adjoint)
    doc = [
        {"word": str(w), "polynomial": str(p)}
        for w, p in zip(system.words, system.condition_polynomials())
    ]
    _emit(doc, None)
    return 0


def cmd_leading_error(args) -> int:
    alphabet = _alphabet_from(args)
    names, values = _parse_params(args.params)
    expr = parse_expression(_read_expr_arg(args.expr), alphabet, names)
    if values:
        expr = substitute_parameters(expr, values)
    term = leading_error_term(expr, args.max_grade)
    if term is None:
        doc = {"grade": None, "terms": [], "note": f"no nonzero term through grade {args.max_grade}"}
    else:
        doc = term.to_json_dict()
    _emit(doc, None)
    return 0


def cmd_magnus_rhs(args) -> int:
    alphabet = magnus_alphabet(args.k)
    word = Word.parse(alphabet, args.word)
    doc = {"word": str(word), "coefficient": rat_str(magnus_rhs_for_word(word))}
    _emit(doc, None)
    return 0


def cmd_quadrature(args) -> int:
    digits = args.digits if args.digits is not None else default_digits()
    doc_in = json.loads(Path(args.infile).read_text())
    is_complex = bool(doc_in.get("complex"))
    with mp.workdps(digits + GUARD_DIGITS):
        if args.inverse:
            key = "a" if "a" in doc_in else "f"
            rows = _rows_from_json(doc_in[key], is_complex)
            f = inverse_quadrature_map(rows, digits=digits)
            a = quadrature_map(f, digits=digits)
        else:
            rows = _rows_from_json(doc_in["f"], is_complex)
            f = SchemeParameters(rows)
            a = quadrature_map(f, digits=digits)
        doc = scheme_to_json_dict(f, a, digits, is_complex)
    _emit(doc, args.outfile)
    return 0


def _rows_from_json(rows, is_complex):
    from .rings import mpc_from_str

    out = []
    for row in rows:
        if is_complex:
            out.append([mpc_from_str(x) for x in row])
        else:
            out.append([mpmath.mpf(x) for x in row])
    return out


def cmd_solve(args) -> int:
    digits = args.digits if args.digits is not None else 50
    doc_in = json.loads(Path(args.system).read_text())
    variables = list(doc_in["variables"])
    from .ncexpr import parse_polynomial

    equations = [parse_polynomial(text, variables) for text in doc_in["equations"]]
    system = PolySystem(equations, variables)
    report = multistart_search(
        system, n_starts=args.starts, digits=digits, seed=args.seed
    )
    _emit(report.to_json_dict(), args.out)
    return 0


def cmd_verify(args) -> int:
    digits = args.digits if args.digits is not None else default_digits()
    doc_in = json.loads(Path(args.scheme).read_text())
    f = scheme_from_json_dict(doc_in, digits)
    alphabet = magnus_alphabet(f.K)
    with mp.workdps(digits + GUARD_DIGITS):
        expr = assemble_scheme_expression(f, alphabet)
        words = lyndon_words_of_odd_grade_up_to(alphabet, args.order)
        rhs = [magnus_rhs_for_word(w) for w in words]
        residual = residual_of_scheme(expr, words, rhs, digits)
        tol = mpmath.mpf(args.tol)
        passed = bool(residual <= tol)
        doc = {
            "order": args.order,
            "conditions": len(words),
            "residual": mpmath.nstr(residual, 8),
            "tolerance": mpmath.nstr(tol, 8),
            "passed": passed,
        }
    _emit(doc, None)
    return 0 if passed else 2


# -- reproduction targets -------------------------------------------------------


def repro_strang(digits: int) -> tuple[dict, bool]:
    alphabet = GradedAlphabet(("A", "B"), (1, 1))
    X = parse_expression("exp(1/2*B)*exp(A)*exp(1/2*B) - exp(A+B)", alphabet)
    words = [Word.parse(alphabet, text) for text in reference.STRANG_WORDS]
    coeffs = [wcoeff(w, X) for w in words]
    term = leading_error_term(X, 3)
    ok = coeffs == reference.STRANG_COEFFS
    ok = ok and term is not None and term.grade == reference.STRANG_ERROR_GRADE
    if ok:
        got_terms = [(str(b), c) for c, b in term.terms()]
        ok = got_terms == reference.STRANG_ERROR_TERMS
    doc = {
        "expression": print_expression(X),
        "words": [str(w) for w in words],
        "coefficients": [rat_str(c) for c in coeffs],
        "leading_error": term.to_json_dict() if term else None,
        "matches_reference": ok,
    }
    return doc, ok


def repro_splitting4(digits: int) -> tuple[dict, bool]:
    S, E, oc = build_splitting4_system()
    solution = solve_splitting_example(digits)
    alphabet = GradedAlphabet(("A", "B"), (1, 1))
    scheme = substitute_parameters(S, solution)
    X = scheme - E
    words5, _, t5 = lyndon_coefficient_matrix(alphabet, 5)
    c_w = [wcoeff(w, X) for w in words5]
    term = leading_error_term(X, 5)
    ok = solution == reference.SPLITTING4_SOLUTION
    ok = ok and [[int(x) for x in row] for row in t5] == reference.SPLITTING4_T5
    ok = ok and c_w == reference.SPLITTING4_CW
    ok = ok and term is not None and term.grade == 5
    ok = ok and term.coefficients == reference.SPLITTING4_CB
    doc = {
        "equations": [str(p) for p in oc.condition_polynomials()],
        "solution": {k: rat_str(v) for k, v in solution.items()},
        "T5": [[int(x) for x in row] for row in t5],
        "grade5_words": [str(w) for w in words5],
        "c_w": [rat_str(c) for c in c_w],
        "c_b": [rat_str(c) for c in term.coefficients] if term else None,
        "matches_reference": ok,
    }
    return doc, ok


def _verify_table(kind: str, digits: int) -> tuple[dict, bool]:
    """Recover exponent rows from a bundled table and check all 22 conditions."""
    alphabet = magnus_alphabet(4)
    if kind == "real":
        rows = reference.load_real_table(digits)
    else:
        rows = reference.load_complex_table(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        f = inverse_quadrature_map(rows, digits=digits)
        mirror = max(f.mirror_errors())
        expr = assemble_scheme_expression(f, alphabet)
        groups = eighth_order_condition_sets(alphabet)
        words = [w for ws, _ in groups for w in ws]
        rhs = [r for _, rs in groups for r in rs]
        residual = residual_of_scheme(expr, words, rhs, digits)
        positivity = positivity_check(f)
        ok = bool(residual <= mpmath.mpf("1e-16"))
        doc = {
            "table": kind,
            "mirror_error": mpmath.nstr(mirror, 5),
            "residual_22_conditions": mpmath.nstr(residual, 8),
            "positivity_rows": positivity.per_row,
            "positivity": positivity.passed,
        }
        if kind == "real":
            published = reference.load_reference_parameters(digits)
            worst = mpmath.mpf(0)
            for j in range(1, 5):
                for k in range(1, 5):
                    diff = abs(f.rows[j - 1][k - 1] - published[f"f{j}{k}"])
                    worst = max(worst, diff)
            doc["parameter_crosscheck_error"] = mpmath.nstr(worst, 5)
            ok = ok and worst <= mpmath.mpf("1e-16")
        else:
            ok = ok and positivity.passed
    return doc, ok


def _verify_staged(digits: int) -> tuple[dict, bool]:
    """Re-derive the last two parameter columns from the published first two."""
    published = reference.load_reference_parameters(digits)
    stage1 = {name: published[name] for name in magnus8_stage1_variables()}
    staged = staged_solve_magnus8(stage1, digits=digits)
    with mp.workdps(digits + GUARD_DIGITS):
        worst = mpmath.mpf(0)
        for j in range(1, 5):
            for k in (3, 4):
                diff = abs(staged.parameters[f"f{j}{k}"] - published[f"f{j}{k}"])
                worst = max(worst, diff)
        ok = bool(worst <= mpmath.mpf("1e-45")) and bool(
            staged.residual <= mpmath.mpf("1e-45")
        )
        doc = {
            "derived_column_error": mpmath.nstr(worst, 5),
            "residual_22_conditions": mpmath.nstr(staged.residual, 8),
        }
    return doc, ok


def repro_magnus8(digits: int, seed: int, starts: int, out: str | None) -> tuple[dict, bool]:
    doc_real, ok_real = _verify_table("real", digits)
    doc_complex, ok_complex = _verify_table("complex", digits)
    staged_digits = max(digits, 50)
    doc_staged, ok_staged = _verify_staged(staged_digits)
    doc = {
        "real_table": doc_real,
        "complex_table": doc_complex,
        "staged_from_published": doc_staged,
    }
    ok = ok_real and ok_complex and ok_staged
    if starts:
        _, system = build_magnus8_stage1()
        report = multistart_search(system, n_starts=starts, digits=50, seed=seed)
        census = []
        for sol in report.solutions:
            staged = staged_solve_magnus8(sol.assignment, digits=50)
            census.append(
                {
                    "is_real": sol.is_real,
                    "stage1_residual": mpmath.nstr(sol.residual, 8),
                    "residual_22_conditions": mpmath.nstr(staged.residual, 8),
                }
            )
        doc["census"] = {
            "starts": starts,
            "distinct_solutions": len(report.solutions),
            "solutions": census,
        }
        ok = ok and all(
            mpmath.mpf(entry["residual_22_conditions"]) < mpmath.mpf("1e-40")
            for entry in census
        )
    doc["matches_reference"] = ok
    return doc, ok


def cmd_repro(args) -> int:
    digits = args.digits if args.digits is not None else default_digits()
    if args.target == "strang":
        doc, ok = repro_strang(digits)
    elif args.target == "splitting4":
        doc, ok = repro_splitting4(digits)
    else:
        doc, ok = repro_magnus8(digits, args.seed, args.starts, args.out)
    _emit(doc, args.out)
    return 0 if ok else 2


_COMMANDS = {
    "wcoeff": cmd_wcoeff,
    "expand": cmd_expand,
    "lyndon": cmd_lyndon,
    "conditions": cmd_conditions,
    "leading-error": cmd_leading_error,
    "magnus-rhs": cmd_magnus_rhs,
    "quadrature": cmd_quadrature,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "repro": cmd_repro,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
