"""Command-line front end.

Every run writes a JSON (or CSV) report that embeds its own run
configuration, so any output file can be reproduced byte-for-byte by
re-executing the embedded argv.  Exit codes: 0 success, 1 domain error in
the inputs, 2 verification failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict

import numpy as np

from . import verify
from .core import (
    CoeffSeq,
    format_float,
    read_coeff_csv,
    read_matrix_csv,
    write_coeff_csv,
)
from .dyadic import (
    DEFAULT_OVERSAMPLE,
    besov_detail,
    dyadic_kernel,
    dyadic_profile,
    hard_block_bound,
)
from .errors import DomainError, InvalidParameter
from .extremal import (
    assemble_majorant,
    flat_polynomial,
    problem88_witness,
    psi,
    weighted_moment,
)
from .mazur import antidiagonal_average, cesaro_product, problem8_witness
from .tensornorm import injective_norm_exact, injective_norm_search, projective_bracket, v2_profile

GOLDEN_SCHEMAS = {
    "wn": ("n", "length", "sequence"),
    "besov": ("s", "p", "q", "nmax", "grid", "values", "norm", "error_bound", "truncated"),
    "profile": ("s", "p", "q", "nmax", "grid", "values", "norm", "error_bound", "truncated"),
    "inj-norm": ("value", "method", "x", "y", "evaluations"),
    "proj-norm": ("lower", "upper", "lower_cert", "upper_cert", "strategies"),
    "v2": ("nmax", "brackets"),
    "mazur-a": ("length", "sequence"),
    "mazur-b": ("length", "sequence"),
    "witness8": ("params", "blocks", "fit", "flags"),
    "witness88": ("t", "g", "nmax", "length", "block_bound"),
    "flatpoly": ("targets_l2", "sup_norm", "ratio", "method", "seed", "descent_iterations"),
    "lkk": ("k_achieved", "besov_value", "chain_bound", "block_bound", "blocks", "fidelity_exact"),
    "moment": ("t", "beta", "kmax", "checkpoints", "diagnosis"),
    "psi": ("t", "value"),
    "verify": ("suites", "passed"),
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def _parse_exponent(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def _sequence_entries(seq: CoeffSeq) -> list:
    rows = []
    for k in np.nonzero(seq.coeffs)[0].tolist():
        v = seq.coeffs[k]
        if seq.is_complex:
            rows.append([int(k), float(v.real), float(v.imag)])
        else:
            rows.append([int(k), float(v)])
    return rows


def _options(args) -> dict:
    skip = {"command", "handler"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        out[key] = _jsonable(value)
    return out


def _run_config(args, argv) -> dict:
    return {"subcommand": args.command, "argv": list(argv), "options": _options(args)}


def _write_csv_table(path, header: str, rows, comment: str) -> None:
    lines = ["# " + comment, header]
    for row in rows:
        lines.append(",".join(format_float(v) if isinstance(v, float) else str(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _emit(args, argv, payload: dict, csv_payload=None) -> int:
    """Write the report; csv_payload is a CoeffSeq or (header, rows) table."""
    cfg = _run_config(args, argv)
    fmt = args.format
    if fmt is None:
        fmt = "csv" if (args.out or "").endswith(".csv") else "json"
    if fmt == "json":
        doc = {"run_config": cfg}
        doc.update(payload)
        text = json.dumps(_jsonable(doc), indent=2) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if csv_payload is None:
        raise InvalidParameter(f"{args.command} has no CSV form; use --format json")
    if not args.out:
        raise InvalidParameter("CSV output needs --out")
    comment = json.dumps(_jsonable(cfg))
    if isinstance(csv_payload, CoeffSeq):
        write_coeff_csv(args.out, csv_payload, comment=comment)
    else:
        header, rows = csv_payload
        _write_csv_table(args.out, header, rows, comment)
    return 0


def _maybe_export(args, seq: CoeffSeq, argv) -> None:
    if getattr(args, "coeffs_out", None):
        write_coeff_csv(args.coeffs_out, seq, comment=json.dumps(_jsonable(_run_config(args, argv))))


# ---------------------------------------------------------------------------
# Handlers.
# ---------------------------------------------------------------------------


def _cmd_wn(args, argv):
    seq = dyadic_kernel(args.n)
    payload = {"n": args.n, "length": len(seq), "sequence": _sequence_entries(seq)}
    return _emit(args, argv, payload, csv_payload=seq)


def _cmd_besov(args, argv):
    f = read_coeff_csv(args.input)
    norm, bound, prof = besov_detail(f, args.s, args.p, args.q, args.nmax, args.oversample)
    payload = {
        "s": prof.s,
        "p": prof.p,
        "q": args.q,
        "nmax": prof.nmax,
        "grid": prof.grid,
        "values": prof.values,
        "norm": norm,
        "error_bound": bound,
        "truncated": prof.truncated,
    }
    rows = list(zip(range(prof.nmax + 1), prof.values.tolist()))
    return _emit(args, argv, payload, csv_payload=("n,value", rows))


def _cmd_profile(args, argv):
    f = read_coeff_csv(args.input)
    prof = dyadic_profile(f, args.s, args.p, args.nmax, args.oversample)
    payload = {
        "s": prof.s,
        "p": prof.p,
        "q": None,
        "nmax": prof.nmax,
        "grid": prof.grid,
        "values": prof.values,
        "norm": None,
        "error_bound": float(prof.error_bounds.max()),
        "truncated": prof.truncated,
    }
    rows = list(zip(range(prof.nmax + 1), prof.values.tolist()))
    return _emit(args, argv, payload, csv_payload=("n,value", rows))


def _cmd_inj_norm(args, argv):
    Q = read_matrix_csv(args.input)
    if args.method == "exact":
        value, x, y = injective_norm_exact(Q)
        evals = None
    else:
        out = injective_norm_search(Q, args.budget, args.seed)
        value, x, y, evals = out.value, out.x, out.y, out.evaluations
    payload = {
        "value": value,
        "method": args.method,
        "x": x.entries.tolist(),
        "y": y.entries.tolist(),
        "evaluations": evals,
    }
    return _emit(args, argv, payload)


def _bracket_json(br) -> dict:
    return {
        "lower": br.lower,
        "upper": br.upper,
        "lower_cert": br.lower_certificate,
        "upper_cert": [{"a": a.tolist(), "b": b.tolist()} for a, b in br.upper_certificate],
        "strategies": list(br.strategies),
    }


def _cmd_proj_norm(args, argv):
    Q = read_matrix_csv(args.input)
    br = projective_bracket(Q, args.budget, args.seed)
    return _emit(args, argv, _bracket_json(br))


def _cmd_v2(args, argv):
    Q = read_matrix_csv(args.input)
    brackets = v2_profile(Q, args.nmax)
    payload = {"nmax": args.nmax, "brackets": [_bracket_json(b) for b in brackets]}
    return _emit(args, argv, payload)


def _cmd_mazur_a(args, argv):
    Q = read_matrix_csv(args.input)
    seq = antidiagonal_average(Q)
    payload = {"length": len(seq), "sequence": _sequence_entries(seq)}
    return _emit(args, argv, payload, csv_payload=seq)


def _cmd_mazur_b(args, argv):
    x = read_coeff_csv(args.input)
    y = read_coeff_csv(args.input2)
    seq = cesaro_product(x, y)
    payload = {"length": len(seq), "sequence": _sequence_entries(seq)}
    return _emit(args, argv, payload, csv_payload=seq)


def _cmd_witness8(args, argv):
    z, report = problem8_witness(args.nmax, args.seed, args.sign_mode, oversample=args.oversample)
    _maybe_export(args, z, argv)
    payload = {
        "params": report.params,
        "blocks": report.blocks,
        "fit": report.fit,
        "flags": report.flags,
    }
    rows = [(b["n"], b["l1"]) for b in report.blocks]
    return _emit(args, argv, payload, csv_payload=("n,value", rows))


def _cmd_witness88(args, argv):
    alpha, params = problem88_witness(args.t, args.nmax)
    _maybe_export(args, alpha, argv)
    payload = {
        "t": params.t,
        "g": params.g,
        "nmax": params.nmax,
        "length": len(alpha),
        "block_bound": hard_block_bound(alpha, params.nmax),
    }
    return _emit(args, argv, payload, csv_payload=alpha)


def _cmd_flatpoly(args, argv):
    beta = read_coeff_csv(args.input)
    f, report = flat_polynomial(beta, args.seed, args.budget, args.oversample)
    _maybe_export(args, f, argv)
    return _emit(args, argv, asdict(report), csv_payload=f)


def _cmd_lkk(args, argv):
    alpha = read_coeff_csv(args.input)
    phi, report = assemble_majorant(alpha, args.seed, args.budget, args.oversample)
    _maybe_export(args, phi, argv)
    return _emit(args, argv, asdict(report), csv_payload=phi)


def _cmd_moment(args, argv):
    gamma = read_coeff_csv(args.input)
    rep = weighted_moment(gamma, args.t, args.beta, args.kmax)
    payload = {
        "t": rep.t,
        "beta": rep.beta,
        "kmax": args.kmax,
        "checkpoints": [[int(K), S] for K, S in rep.checkpoints],
        "diagnosis": asdict(rep.diagnosis),
    }
    rows = [(int(K), S) for K, S in rep.checkpoints]
    return _emit(args, argv, payload, csv_payload=("k,value", rows))


def _cmd_psi(args, argv):
    return _emit(args, argv, {"t": args.t, "value": psi(args.t)})


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise InvalidParameter(f"override must look like key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _cmd_verify(args, argv):
    overrides = _parse_overrides(args.override)
    thresholds = verify.merged_thresholds(overrides) if overrides else None
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    reports = verify.run_suites(names, seed=args.seed, thresholds=thresholds)
    for rep in reports:
        for case in rep.cases:
            tag = "PASS" if case.passed else "FAIL"
            print(f"[{tag}] {rep.suite}/{case.name}: {case.detail}")
    all_passed = all(r.passed for r in reports)
    payload = {
        "suites": [
            {
                "suite": r.suite,
                "passed": r.passed,
                "cases": [asdict(c) for c in r.cases],
            }
            for r in reports
        ],
        "passed": all_passed,
    }
    rc = _emit(args, argv, payload) if args.out else 0
    return rc if all_passed else 2


# ---------------------------------------------------------------------------
# Parser assembly.
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="scottish-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, seeded=False, budgeted=False, oversampled=False, coeffs_out=False):
        p.add_argument("--out", default=None, help="output path (stdout if omitted)")
        p.add_argument("--format", choices=("json", "csv"), default=None,
                       help="default: csv when --out ends in .csv, else json")
        if seeded:
            p.add_argument("--seed", type=int, default=0)
        if budgeted:
            p.add_argument("--budget", type=int, default=4096)
        if oversampled:
            p.add_argument("--oversample", type=int, default=DEFAULT_OVERSAMPLE)
        if coeffs_out:
            p.add_argument("--coeffs-out", default=None,
                           help="also export the constructed sequence as CSV")

    p = sub.add_parser("wn", help="coefficients of the n-th dyadic kernel")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(handler=_cmd_wn)

    p = sub.add_parser("besov", help="weighted dyadic-profile norm of a polynomial")
    p.add_argument("--input", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=_parse_exponent, required=True)
    p.add_argument("--q", type=_parse_exponent, required=True)
    p.add_argument("--nmax", type=int, required=True)
    common(p, oversampled=True)
    p.set_defaults(handler=_cmd_besov)

    p = sub.add_parser("profile", help="dyadic block profile of a polynomial")
    p.add_argument("--input", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=_parse_exponent, required=True)
    p.add_argument("--nmax", type=int, required=True)
    common(p, oversampled=True)
    p.set_defaults(handler=_cmd_profile)

    p = sub.add_parser("inj-norm", help="bilinear sign-form norm of a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=("exact", "search"), default="exact")
    common(p, seeded=True, budgeted=True)
    p.set_defaults(handler=_cmd_inj_norm)

    p = sub.add_parser("proj-norm", help="bracket for the decomposition norm")
    p.add_argument("--input", required=True)
    common(p, seeded=True, budgeted=True)
    p.set_defaults(handler=_cmd_proj_norm)

    p = sub.add_parser("v2", help="brackets for leading corner truncations")
    p.add_argument("--input", required=True)
    p.add_argument("--nmax", type=int, required=True)
    common(p)
    p.set_defaults(handler=_cmd_v2)

    p = sub.add_parser("mazur-a", help="antidiagonal averages of a matrix")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(handler=_cmd_mazur_a)

    p = sub.add_parser("mazur-b", help="Cesaro-normalized Cauchy product")
    p.add_argument("--input", required=True)
    p.add_argument("--input2", required=True)
    common(p)
    p.set_defaults(handler=_cmd_mazur_b)

    p = sub.add_parser("witness8", help="decaying sequence with growing block norms")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--sign-mode", choices=("random", "rudin_shapiro"), default="random")
    common(p, seeded=True, oversampled=True, coeffs_out=True)
    p.set_defaults(handler=_cmd_witness8)

    p = sub.add_parser("witness88", help="slow-decay block-constant target sequence")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    common(p, coeffs_out=True)
    p.set_defaults(handler=_cmd_witness88)

    p = sub.add_parser("flatpoly", help="signs for prescribed coefficient moduli")
    p.add_argument("--input", required=True)
    common(p, seeded=True, budgeted=True, oversampled=True, coeffs_out=True)
    p.set_defaults(handler=_cmd_flatpoly)

    p = sub.add_parser("lkk", help="assemble a coefficient majorant block by block")
    p.add_argument("--input", required=True)
    common(p, seeded=True, budgeted=True, oversampled=True, coeffs_out=True)
    p.set_defaults(handler=_cmd_lkk)

    p = sub.add_parser("moment", help="weighted coefficient moments at dyadic checkpoints")
    p.add_argument("--input", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--kmax", type=int, required=True)
    common(p)
    p.set_defaults(handler=_cmd_moment)

    p = sub.add_parser("psi", help="regime boundary exponent")
    p.add_argument("--t", type=float, required=True)
    common(p)
    p.set_defaults(handler=_cmd_psi)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all",
                   choices=tuple(verify.SUITES) + ("all",))
    p.add_argument("--override", action="append", default=None,
                   metavar="KEY=VALUE", help="threshold override; repeatable")
    common(p, seeded=True)
    p.set_defaults(handler=_cmd_verify)

    return parser


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 64
    try:
        return args.handler(args, argv)
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


# ---------------------------------------------------------------------------
# Schema, rerun, and exit-code self-check (the cli-roundtrip suite body).
# ---------------------------------------------------------------------------


def rerun_config_argv(path: str) -> list:
    """Extract the embedded argv from a JSON or CSV report."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if first.startswith("# "):
            return json.loads(first[2:])["argv"]
        doc = json.loads(first + fh.read())
        return doc["run_config"]["argv"]


def _run_quiet(argv) -> int:
    """run() with stdout/stderr swallowed; nested output would confuse the
    parent verify report."""
    with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
        return run(argv)


def self_check(seed: int = 0):
    from .verify import CaseResult, SuiteReport

    cases = []

    def check(name, ok, detail):
        cases.append(CaseResult(name, bool(ok), detail))

    with tempfile.TemporaryDirectory(prefix="scottish-lab-") as tmp:
        fcsv = os.path.join(tmp, "f.csv")
        seq = np.zeros(9)
        seq[2] = 1.0
        seq[8] = 1.0
        write_coeff_csv(fcsv, CoeffSeq(seq))
        mcsv = os.path.join(tmp, "m.csv")
        with open(mcsv, "w", encoding="utf-8") as fh:
            fh.write("1.0,1.0\n1.0,-1.0\n")
        xcsv = os.path.join(tmp, "x.csv")
        write_coeff_csv(xcsv, CoeffSeq(np.ones(8)))

        invocations = {
            "wn": ["wn", "--n", "2"],
            "besov": ["besov", "--input", fcsv, "--s", "1", "--p", "inf", "--q", "1", "--nmax", "4"],
            "profile": ["profile", "--input", fcsv, "--s", "0", "--p", "1", "--nmax", "4"],
            "inj-norm": ["inj-norm", "--input", mcsv],
            "proj-norm": ["proj-norm", "--input", mcsv],
            "v2": ["v2", "--input", mcsv, "--nmax", "1"],
            "mazur-a": ["mazur-a", "--input", mcsv],
            "mazur-b": ["mazur-b", "--input", xcsv, "--input2", xcsv],
            "witness8": ["witness8", "--nmax", "6", "--seed", "1", "--sign-mode", "rudin_shapiro"],
            "witness88": ["witness88", "--t", "0.5", "--nmax", "8"],
            "flatpoly": ["flatpoly", "--input", fcsv, "--seed", "2"],
            "lkk": ["lkk", "--input", fcsv, "--seed", "2"],
            "moment": ["moment", "--input", fcsv, "--t", "1", "--beta", "0.5", "--kmax", "8"],
            "psi": ["psi", "--t", "1"],
            "verify": ["verify", "--suite", "besov"],
        }
        for name, argv in invocations.items():
            out = os.path.join(tmp, f"{name}.json")
            rc = _run_quiet(argv + ["--out", out])
            ok = rc == 0 and os.path.exists(out)
            keys_ok = False
            if ok:
                with open(out, "r", encoding="utf-8") as fh:
                    doc = json.load(fh)
                expected = set(GOLDEN_SCHEMAS[name]) | {"run_config"}
                keys_ok = set(doc.keys()) == expected
            check(f"schema-{name}", ok and keys_ok, f"rc={rc}, keys match documented schema: {keys_ok}")

        for name in ("psi", "witness8"):
            out = os.path.join(tmp, f"{name}-rerun.json")
            rc = _run_quiet(invocations[name] + ["--out", out])
            with open(out, "rb") as fh:
                before = fh.read()
            argv = rerun_config_argv(out)
            os.unlink(out)
            rc2 = _run_quiet(argv)
            with open(out, "rb") as fh:
                after = fh.read()
            check(f"rerun-{name}", rc == 0 and rc2 == 0 and before == after,
                  f"byte-identical rerun from embedded config: {before == after}")

        wn_csv = os.path.join(tmp, "w2.csv")
        rc = _run_quiet(["wn", "--n", "2", "--out", wn_csv])
        with open(wn_csv, "r", encoding="utf-8") as fh:
            data_rows = [ln for ln in fh if ln.strip() and not ln.startswith("#")][1:]
        check("wn-csv-sparse", rc == 0 and len(data_rows) == 5,
              f"W_2 CSV carries {len(data_rows)} coefficient rows (want 5)")

        rt = read_coeff_csv(wn_csv)
        check("csv-round-trip", rt == dyadic_kernel(2), "kernel CSV reads back bit-identical")

        check("exit-usage", _run_quiet(["besov", "--nonsense"]) == 64, "unknown flag exits 64")
        check("exit-domain", _run_quiet(["psi", "--t", "-1"]) == 1, "domain error exits 1")
        rc_ok = _run_quiet(["verify", "--suite", "besov", "--seed", str(seed)])
        check("exit-verify-pass", rc_ok == 0, f"passing suite exits {rc_ok}")
        rc_bad = _run_quiet(["verify", "--suite", "besov", "--override", "besov.rel_tol=0"])
        check("exit-verify-fail", rc_bad == 2, f"violated threshold exits {rc_bad}")

    return SuiteReport("cli-roundtrip", cases)
