"""Command-line front end; every subcommand is a thin adapter over the library."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import census, mersenne, restricted
from .modarith import FactorizationError, multiplicative_order
from .subgroup import generate_cyclic
from .sumset import SearchBudgetExceeded, sumset_growth
from .weight import VerificationError, min_weight_multiple

FORMATS = ("table", "jsonl", "csv")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit_rows(rows: list[dict], fmt: str, out):
    if fmt == "jsonl":
        for r in rows:
            out.write(json.dumps(r, separators=(",", ":")) + "\n")
    elif fmt == "csv":
        if rows:
            out.write(",".join(rows[0]) + "\n")
            for r in rows:
                out.write(",".join("" if v is None else str(v) for v in r.values()) + "\n")
    else:
        for r in rows:
            out.write(" ".join(f"{k}={'-' if v is None else v}" for k, v in r.items()) + "\n")


def cmd_order(args, out):
    prof = multiplicative_order(args.r, args.p)
    _emit_rows([{"ord": prof.ord, "s": prof.s, "w": prof.w}], args.format, out)


def cmd_classify(args, out):
    rec = census.classify_prime(args.p, compute_t6=args.t6)
    if args.format == "jsonl":
        out.write(rec.to_json() + "\n")
        return
    row = {"p": rec.p, "ord2": rec.ord2, "s": rec.s, "w": rec.w, "t1": rec.in_t1,
           "t2": rec.in_t2, "mt": rec.min_terms_neg1}
    _emit_rows([row], args.format, out)


def cmd_census(args, out):
    jsonl = None
    if args.format == "jsonl" or args.output:
        jsonl = args.output or (args.checkpoint + ".jsonl" if args.checkpoint else None)
    tmp = None
    if args.format == "jsonl" and jsonl is None:
        import tempfile
        fd, tmp = tempfile.mkstemp(suffix=".jsonl")
        os.close(fd)
        jsonl = tmp
    try:
        rep = census.run_census(args.X, compute_t6=args.t6, checkpoint_path=args.checkpoint,
                                workers=args.workers, jsonl_path=jsonl)
        if args.format == "jsonl":
            with open(jsonl) as fh:
                out.write(fh.read())
            return
    finally:
        if tmp:
            os.unlink(tmp)
    if args.format == "csv":
        out.write(rep.to_csv())
        return
    width = max(len(k) for k, _ in rep.summary_rows())
    for k, v in rep.summary_rows():
        out.write(f"{k:<{width}}  {v}\n")
    out.write("t2_exceptions:\n")
    for p in rep.t2_exception_list:
        mt = rep.t2_exception_terms[p]
        if args.t6_exceptions:
            out.write(f"  {p}  min_terms={'>6' if mt is None else mt}\n")
        else:
            out.write(f"  {p}\n")


def _factor_text(cert) -> str:
    return f"{cert.cofactor}·{cert.p}"


def cmd_minweight(args, out):
    cert = min_weight_multiple(args.p, weight_cap=args.cap)
    if args.format == "table":
        if cert is None:
            out.write(f"weight>{args.cap}\n")
        else:
            out.write(f"weight={cert.weight} value=0x{cert.value:X}={cert.value}={_factor_text(cert)}\n")
        return
    row = {"p": args.p, "weight": None if cert is None else cert.weight,
           "value": None if cert is None else cert.value, "cap": args.cap}
    _emit_rows([row], args.format, out)


def cmd_certificate(args, out):
    cert = min_weight_multiple(args.p)
    if not cert.verify():
        raise VerificationError(f"certificate for {args.p} does not verify")
    if args.format == "table":
        out.write(f"{cert}\nbinary=0b{cert.value:b}\nhex=0x{cert.value:X}\n")
        return
    _emit_rows([{"p": cert.p, "weight": cert.weight, "exps": ";".join(map(str, cert.exponents)),
                 "value_hex": f"0x{cert.value:X}", "value_bin": f"0b{cert.value:b}",
                 "cofactor": cert.cofactor}], args.format, out)


def cmd_mersenne(args, out):
    w = mersenne.mersenne_witness(args.n, args.k)
    _emit_rows([w.row()], args.format, out)


def cmd_restricted(args, out):
    exs = restricted.scan_restricted(args.a, args.limit, args.min_ratio)
    if args.format == "csv":
        out.write(restricted.to_csv(exs))
        return
    rows = [dict(zip(restricted.CSV_HEADER.split(","), ex.csv_row().split(","))) for ex in exs]
    _emit_rows(rows, args.format, out)
    if args.format == "table":
        out.write(f"count={len(exs)}\n")


def _emit_list(values, fmt, out):
    if fmt == "table":
        out.write(" ".join(map(str, values)) + "\n")
    else:
        _emit_rows([{"p": v} for v in values], fmt, out)


def cmd_halforder(args, out):
    _emit_list(restricted.find_halforder_primes(args.a, args.limit), args.format, out)


def cmd_primroot34(args, out):
    _emit_list(restricted.find_primroot_3mod4_primes(args.limit), args.format, out)


def cmd_growth(args, out):
    g = sumset_growth(generate_cyclic(args.r, args.p))
    _emit_rows([{"size_R": g.size_R, "size_2R": g.size_2R,
                 "ratio_to_8_5": f"{g.ratio_to_8_5:.6f}"}], args.format, out)


def _default_workers() -> int:
    return int(os.environ.get("SPARSEMUL_WORKERS", "1"))


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sparsemul", description=__doc__)
    ap.add_argument("--format", choices=FORMATS, default="table")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    # --format is accepted on either side of the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    sp = add("order", cmd_order, "multiplicative order of r mod p")
    sp.add_argument("r", type=int)
    sp.add_argument("p", type=int)

    sp = add("classify", cmd_classify, "T_1/T_2 membership of one prime")
    sp.add_argument("p", type=int)
    sp.add_argument("--t6", action="store_true", help="fill min terms for every prime")

    sp = add("census", cmd_census, "classify every prime up to X")
    sp.add_argument("X", type=int)
    sp.add_argument("--workers", type=_positive, default=_default_workers())
    sp.add_argument("--checkpoint")
    sp.add_argument("--t6-exceptions", action="store_true",
                    help="list min terms for each T_2 exception")
    sp.add_argument("--t6", action="store_true", help="min terms for every prime")
    sp.add_argument("--output", help="write per-prime JSONL here")

    sp = add("minweight", cmd_minweight, "minimal Hamming weight multiple of p")
    sp.add_argument("p", type=int)
    sp.add_argument("--cap", type=_positive)

    sp = add("certificate", cmd_certificate, "print the sparse multiple in binary and hex")
    sp.add_argument("p", type=int)

    sp = add("mersenne", cmd_mersenne, "weight-floor witness among factors of 2**n-1")
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)

    sp = add("restricted", cmd_restricted, "odd-order subgroup examples up to limit")
    sp.add_argument("a", type=int)
    sp.add_argument("limit", type=int)
    sp.add_argument("--min-ratio", type=float, default=0.0)

    sp = add("halforder", cmd_halforder, "primes with ord_p(a) = (p-1)/2 odd")
    sp.add_argument("a", type=int)
    sp.add_argument("limit", type=int)

    sp = add("primroot34", cmd_primroot34, "primes 3 mod 4 with 2 primitive")
    sp.add_argument("limit", type=int)

    sp = add("growth", cmd_growth, "|R + R| for R = <r> mod p")
    sp.add_argument("r", type=int)
    sp.add_argument("p", type=int)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(stream=sys.stderr, format="%(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    try:
        args.fn(args, out)
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FactorizationError, SearchBudgetExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main_entry():
    sys.exit(main())
