"""Command-line interface: ``sbo-kit print|verify|vanish|eval-num``."""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from sbo_kit import render
from sbo_kit.indices import OperatorSignature
from sbo_kit.suites import SUITES, ConfigError, SuiteConfig, jobs_from_env, parse_range, run_suite

SCHEMA_VERSION = "v1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _index_set(text: str) -> tuple[int, ...]:
    body = text.strip().strip("{}").strip()
    if not body:
        return ()
    try:
        return tuple(sorted(int(v) for v in body.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad index set {text!r}") from exc


def _point(text: str) -> list[float]:
    try:
        return [float(Fraction(v)) for v in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from exc


def _signature(args, kappa: int | None = None) -> OperatorSignature:
    i = args.i if args.i is not None else 0
    j = args.j if args.j is not None else i
    k = kappa if kappa is not None else (args.kappa or 0)
    try:
        return OperatorSignature(args.n, i, j, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- print ------------------------------------------------------------------


def _specialize(op, lam):
    return op if lam is None else op.specialize(lam=lam)


def cmd_print(args) -> tuple[int, str]:
    from sbo_kit.kernels import kernel_matrix
    from sbo_kit.operators import branson_operator, juhl_symbol, sbo_differential

    fmt, target = args.format, args.target
    if args.l is not None and args.l < 0:
        raise UsageError("--l must be non-negative")
    if target != "kernel" and args.l is None:
        raise UsageError(f"print {target} needs --l")
    if target == "juhl":
        if args.n < 2:
            raise UsageError("juhl operators need n ≥ 2")
        op = _specialize(juhl_symbol(args.n, args.l), args.lam)
        if fmt == "plain":
            return EXIT_OK, render.juhl_plain(op)
        if fmt == "latex":
            return EXIT_OK, render.latex_document(render.juhl_latex(op))
        body = {"target": "juhl", "n": args.n, "l": args.l, "operator": render.juhl_plain(op),
                "terms": [{"exponent": list(e), "coefficient": str(c)} for e, c in op]}
        return EXIT_OK, render.dump_json(body)
    if target in ("sbo", "branson"):
        if target == "sbo":
            if args.kappa is not None and args.kappa != args.l % 2:
                raise UsageError("--kappa must have the parity of --l")
            sig = _signature(args, args.l % 2)
            fop = sbo_differential(sig, args.l)
        else:
            if args.i is None or not 0 <= args.i <= args.n:
                raise UsageError(f"--i must lie in 0..{args.n}")
            fop = branson_operator(args.n, args.i, args.l)
        fop = _specialize(fop, args.lam)
        if fmt == "plain":
            if target == "sbo" and fop.i == fop.j == 0:
                op = fop.entry((), ())
                try:
                    return EXIT_OK, render.juhl_plain(op)
                except ValueError:
                    return EXIT_OK, render.op_plain(op)
            return EXIT_OK, render.form_plain(fop)
        if fmt == "latex":
            return EXIT_OK, render.latex_document(render.form_latex(fop))
        return EXIT_OK, render.dump_json({"target": target, "l": args.l, **render.form_json(fop)})
    sig = _signature(args)
    matrix = kernel_matrix(sig)
    if fmt == "plain":
        return EXIT_OK, render.kernel_plain(matrix)
    if fmt == "latex":
        rows = [
            rf"{render._latex_set(I)} \mapsto {render._latex_set(J)} &: {render.kernel_latex(e)}"
            for (I, J), e in sorted(matrix.items())
        ]
        return EXIT_OK, render.latex_document(r"\begin{aligned}" + r" \\ ".join(rows) + r"\end{aligned}")
    body = {"target": "kernel", "n": sig.n, "i": sig.i, "j": sig.j, "kappa": sig.kappa,
            "entries": [{"I": list(I), "J": list(J), "kernel": str(e)} for (I, J), e in sorted(matrix.items())]}
    return EXIT_OK, render.dump_json(body)


# -- verify -----------------------------------------------------------------

_LATEX_CHARS = {
    "κ": r"$\kappa$", "λ": r"$\lambda$", "ν": r"$\nu$", "≤": r"$\le$", "→": r"$\to$", "−": "-",
    "²": r"$^2$", "·": r"$\cdot$", "∂": r"$\partial$", "_": r"\_", "{": r"\{", "}": r"\}",
    "#": r"\#", "&": r"\&", "%": r"\%", "$": r"\$",
}


def _latex_text(text: str) -> str:
    return "".join(_LATEX_CHARS.get(ch, ch) for ch in text)


def _config(args) -> SuiteConfig:
    try:
        grid = parse_range(args.grid, [-5, 5])
        return SuiteConfig(
            n=parse_range(args.n, []) if args.n else None,
            i=parse_range(args.i, []) if args.i else None,
            j=parse_range(args.j, []) if args.j else None,
            l=parse_range(args.l, []) if args.l else None,
            m=parse_range(args.m, []) if args.m else None,
            k=parse_range(args.k, []) if args.k else None,
            kappa=parse_range(args.kappa, []) if args.kappa else None,
            grid=(min(grid), max(grid)),
            tol=args.tol,
            jobs=jobs_from_env(args.jobs),
            mode=args.mode,
            kappa1_numerator=args.kappa1_numerator,
        ).validate()
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc


def report_document(suite: str, reports) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "suite": suite,
        "passed": all(r.passed for r in reports),
        "total": len(reports),
        "failures": sum(not r.passed for r in reports),
        "cases": [r.to_json() for r in reports],
    }


def cmd_verify(args) -> tuple[int, str]:
    cfg = _config(args)
    if args.mode == "numeric" and args.suite != "numeric":
        raise UsageError("--mode numeric applies to the numeric suite only")
    try:
        reports = run_suite(args.suite, cfg)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    doc = report_document(args.suite, reports)
    code = EXIT_OK if doc["passed"] else EXIT_FAIL
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(render.dump_json(doc) + "\n")
    if args.format == "json":
        return code, render.dump_json(doc)
    if args.format == "latex":
        rows = [
            rf"{_latex_text(r.case)} & {r.status} & {r.millis:.1f} \\" for r in reports
        ]
        table = "\n".join(
            [r"\begin{longtable}{lll}", r"case & status & ms \\ \hline", *rows, r"\end{longtable}"]
        )
        doc_text = "\n".join(
            [r"\documentclass{article}", r"\usepackage{longtable}", r"\begin{document}",
             rf"\section*{{Suite {args.suite}: {doc['total'] - doc['failures']}/{doc['total']} passed}}",
             table, r"\end{document}", ""]
        )
        return code, doc_text
    lines = [str(r) for r in reports if args.verbose or not r.passed]
    lines.append(f"{args.suite}: {doc['total'] - doc['failures']}/{doc['total']} passed")
    return code, "\n".join(lines)


# -- vanish -----------------------------------------------------------------


def vanish_verdict(lam, nu, sig: OperatorSignature) -> tuple[bool, str]:
    from sbo_kit.vanishing import admissible, vanish_branch

    if not admissible(lam, nu, sig.kappa):
        return False, "nonzero (off-parity)"
    branch = vanish_branch(lam, nu, sig)
    return (True, f"vanishes: {branch}") if branch else (False, "nonzero")


def cmd_vanish(args) -> tuple[int, str]:
    if args.kappa not in (None, 0, 1):
        raise UsageError("--kappa must be 0 or 1")
    sig = _signature(args)
    vanishes, text = vanish_verdict(args.lam, args.nu, sig)
    if args.format == "json":
        return EXIT_OK, render.dump_json(
            {"lambda": str(args.lam), "nu": str(args.nu), "n": sig.n, "i": sig.i, "j": sig.j,
             "kappa": sig.kappa, "vanishes": vanishes, "verdict": text}
        )
    if args.format == "latex":
        return EXIT_OK, render.latex_document(rf"\text{{{text.replace('_', chr(92) + '_')}}}")
    return EXIT_OK, text


# -- eval-num ---------------------------------------------------------------


def cmd_eval_num(args) -> tuple[int, str]:
    from sbo_kit.kernels import kernel_entry
    from sbo_kit.numeric import ConvergenceError, TestForm, evaluate_kernel, integrate_pairing

    sig = _signature(args)
    I = args.I if args.I is not None else tuple(range(1, sig.i + 1))
    J = args.J if args.J is not None else tuple(range(1, sig.j + 1))
    if len(I) != sig.i or len(J) != sig.j or any(not 1 <= p <= sig.n for p in I) or any(
        not 1 <= q <= sig.n - 1 for q in J
    ):
        raise UsageError("index sets do not match the signature")
    entry = kernel_entry(sig, I, J)
    lam, nu = float(args.lam), float(args.nu)
    try:
        if args.x is not None:
            if len(args.x) != sig.n:
                raise UsageError(f"--x needs {sig.n} coordinates")
            value = evaluate_kernel(entry, args.x, lam, nu)
            body = {"kind": "kernel", "value": [value.real, value.imag]}
        else:
            res = integrate_pairing(entry, TestForm.gaussian(sig.n), lam, nu, args.tol)
            value = res.value
            body = {"kind": "pairing", "value": [value.real, value.imag], "error": res.error, "status": res.status}
    except ConvergenceError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        return EXIT_OK, render.dump_json(body)
    text = f"{value.real:.15g}" if value.imag == 0 else f"{value.real:.15g} + {value.imag:.15g}i"
    if args.format == "latex":
        return EXIT_OK, render.latex_document(text)
    if body["kind"] == "pairing":
        text += f"  (error ≤ {body['error']:.3g}, {body['status']})"
    return EXIT_OK, text


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sbo-kit", description="Symmetry breaking operators on differential forms.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=render.FORMATS, default="plain")

    pp = sub.add_parser("print", help="render an operator or kernel")
    pp.add_argument("target", choices=("juhl", "sbo", "branson", "kernel"))
    pp.add_argument("--n", type=int, required=True)
    pp.add_argument("--i", type=int)
    pp.add_argument("--j", type=int)
    pp.add_argument("--l", type=int)
    pp.add_argument("--kappa", type=int)
    pp.add_argument("--lambda", dest="lam", type=_rational, help="specialize λ (p/q)")
    common(pp)

    vp = sub.add_parser("verify", help="run a verification suite")
    vp.add_argument("suite", choices=SUITES)
    for name in ("n", "i", "j", "l", "m", "k", "kappa"):
        vp.add_argument(f"--{name}", help="range such as 3, 2..5 or 1,3")
    vp.add_argument("--grid", help="λ, ν range for the vanish suite")
    vp.add_argument("--tol", type=float, default=1e-6)
    vp.add_argument("--jobs", type=int)
    vp.add_argument("--mode", choices=("symbolic", "numeric", "both"), default="symbolic")
    vp.add_argument("--kappa1-numerator", type=_rational, default=Fraction(2))
    vp.add_argument("--out", help="also write the JSON report here")
    vp.add_argument("-v", "--verbose", action="store_true")
    common(vp)

    np_ = sub.add_parser("vanish", help="does the normalized operator vanish at (λ, ν)?")
    np_.add_argument("--lambda", dest="lam", type=_rational, required=True)
    np_.add_argument("--nu", type=_rational, required=True)
    np_.add_argument("--n", type=int, required=True)
    np_.add_argument("--i", type=int)
    np_.add_argument("--j", type=int)
    np_.add_argument("--kappa", type=int)
    common(np_)

    ep = sub.add_parser("eval-num", help="evaluate a kernel entry or its Gaussian pairing")
    ep.add_argument("--n", type=int, required=True)
    ep.add_argument("--i", type=int)
    ep.add_argument("--j", type=int)
    ep.add_argument("--kappa", type=int)
    ep.add_argument("--I", type=_index_set)
    ep.add_argument("--J", type=_index_set)
    ep.add_argument("--lambda", dest="lam", type=_rational, required=True)
    ep.add_argument("--nu", type=_rational, required=True)
    ep.add_argument("--x", type=_point, help="point x (comma separated); omit for the pairing")
    ep.add_argument("--tol", type=float, default=1e-8)
    common(ep)
    return p


COMMANDS = {"print": cmd_print, "verify": cmd_verify, "vanish": cmd_vanish, "eval-num": cmd_eval_num}


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``--grid -5..5`` and ``--lambda -3/2`` through argparse."""
    out: list[str] = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        if tok.startswith("--") and "=" not in tok and k + 1 < len(argv) and re.match(r"-\d", argv[k + 1]):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
            continue
        out.append(tok)
        k += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"sbo-kit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
