"""Command-line entry point.

Subcommands: witness, verify, sweep, mackey, bruhat.  Exit codes:
0 success, 1 verification failure (or sweep failures), 2 invalid input,
3 unsupported field, 4 internal theory violation, 5 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time

from .bruhat import bruhat_cell
from .certificate import dump_certificate, load_certificate, verify_certificate
from .errors import (
    BudgetExceeded,
    CertificateFormatError,
    KlyachkoError,
    TheoryViolation,
    UnsupportedField,
)
from .matlin import parse_matrix, to_text
from .modelgroups import DEFAULT_BUDGET, PairShape
from .oracle import mackey_json, mackey_report, mackey_table, sweep_verify
from .witness import find_witness

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_FIELD, EXIT_THEORY, EXIT_BUDGET = 0, 1, 2, 3, 4, 5


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_matrix(args):
    g = parse_matrix(_read(args.matrix))
    if args.p is not None and g.p != args.p:
        raise ValueError(f"matrix header says p={g.p} but --p {args.p} was given")
    if args.n is not None and g.nrows != args.n:
        raise ValueError(f"matrix has size {g.nrows} but --n {args.n} was given")
    return g


def parse_pairs(text: str | None, n: int):
    """'all' or 'r,rp;r,rp;...'."""
    if text in (None, "all"):
        return None
    pairs = []
    for chunk in text.replace(" ", "").split(";"):
        if chunk:
            r, rp = chunk.split(",")
            pairs.append((int(r), int(rp)))
    return pairs


def cmd_witness(args) -> int:
    try:
        g = _load_matrix(args)
        shape = PairShape(g.nrows, args.r, args.rprime)
        cert = find_witness(g, shape)
    except TheoryViolation as exc:
        print(f"theory violation: {exc}", file=sys.stderr)
        for line in exc.trace:
            print(f"  {line}", file=sys.stderr)
        return EXIT_THEORY
    except UnsupportedField as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIELD
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (KlyachkoError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(dump_certificate(g, shape, cert), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        g, shape, cert = load_certificate(_read(args.certificate))
        verdict = verify_certificate(g, shape, cert)
    except (CertificateFormatError, KlyachkoError, ValueError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(verdict)
    return EXIT_OK if verdict else EXIT_FAIL


def cmd_sweep(args) -> int:
    try:
        pairs = parse_pairs(args.pairs, args.n)
        report = sweep_verify(args.n, args.q, pairs, budget=args.budget, workers=args.workers)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (KlyachkoError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = report.to_json() + "\n" if args.json else report.to_text(footer=not args.no_footer)
    _emit(text, args.out)
    return EXIT_OK if report.failures == 0 else EXIT_FAIL


def cmd_mackey(args) -> int:
    start = time.perf_counter()
    try:
        table = mackey_table(args.n, args.q, budget=args.budget)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (KlyachkoError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        text = mackey_json(table) + "\n"
    else:
        text = mackey_report(table, None if args.no_footer else time.perf_counter() - start)
    _emit(text, args.out)
    return EXIT_OK if table.passed else EXIT_FAIL


def cmd_bruhat(args) -> int:
    try:
        g = _load_matrix(args)
        shape = PairShape(g.nrows, args.r, args.rprime)
        cell = bruhat_cell(g, shape)
    except (KlyachkoError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = "w: " + " ".join(map(str, cell.w)) + "\np:\n" + to_text(cell.p) + "pbar:\n" + to_text(cell.pbar)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klyachko", description="Witness certificates for Klyachko model orbits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def matrix_opts(sp):
        sp.add_argument("--matrix", required=True, help="matrix file in the 'n=<size> p=<prime>' format, or - for stdin")
        sp.add_argument("--p", type=int, help="field modulus (checked against the matrix header)")
        sp.add_argument("--n", type=int, help="matrix size (checked against the matrix header)")
        sp.add_argument("--r", type=int, required=True)
        sp.add_argument("--rprime", type=int, required=True)
        sp.add_argument("--out", help="write to this file instead of stdout")

    w = sub.add_parser("witness", help="construct a certificate")
    matrix_opts(w)
    w.set_defaults(func=cmd_witness)

    v = sub.add_parser("verify", help="check a certificate document")
    v.add_argument("certificate", help="certificate file, or - for stdin")
    v.set_defaults(func=cmd_verify)

    def oracle_opts(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        sp.add_argument("--out")
        sp.add_argument("--no-footer", action="store_true", help="omit the timing footer")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    s = sub.add_parser("sweep", help="exhaustive check over GL_n(F_q)")
    oracle_opts(s)
    s.add_argument("--pairs", default="all", help="'all' or 'r,r';r,r';...'")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("mackey", help="intertwining-number table")
    oracle_opts(m)
    m.set_defaults(func=cmd_mackey)

    b = sub.add_parser("bruhat", help="cell and factorisation of a matrix")
    matrix_opts(b)
    b.set_defaults(func=cmd_bruhat)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
