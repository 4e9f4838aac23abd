"""Command-line interface: ``gfib <subcommand> [options]``.

Exit status: 0 success, 1 usage error, 2 verification failure,
3 precision ceiling exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__, config
from .closedform import approx_value, error_term, fib_closed, required_precision
from .combinatorics import count_compositions, enumerate_compositions
from .errors import EnumerationCapError, InvalidOrderError, PrecisionCeilingError
from .exact import fib_at, fib_sequence
from .interval import CertifiedReal
from .renewal import build_distribution, proposition_value, simulate_first_passage
from .roots import blackwell_constant, characteristic_residual, mean_lifetime, solve_q
from .verification import run_all

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# number rendering --------------------------------------------------------------


def _place_point(units: int, decimals: int) -> str:
    """Render the integer ``units`` scaled by ``10**-decimals``."""
    sign = "-" if units < 0 else ""
    digits = str(abs(units)).rjust(decimals + 1, "0")
    if decimals == 0:
        return sign + digits
    return f"{sign}{digits[:-decimals]}.{digits[-decimals:]}"


def exact_decimal(x: Fraction) -> str:
    """Exact decimal expansion of a dyadic rational."""
    den = x.denominator
    k = den.bit_length() - 1
    if den != 1 << k:
        raise ValueError(f"{x} is not dyadic")
    return _place_point(x.numerator * 5**k, k)


def fixed(x: Fraction, decimals: int, truncate: bool = False) -> str:
    """``x`` with ``decimals`` places, rounded half-even or truncated toward zero."""
    scaled = x * 10**decimals
    units = int(scaled) if truncate else round(scaled)
    return _place_point(units, decimals)


def _interval_json(prefix: str, x: CertifiedReal) -> dict:
    return {f"{prefix}_mid": exact_decimal(x.mid), f"{prefix}_radius": exact_decimal(x.radius)}


# output --------------------------------------------------------------------


def _emit_text_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def _emit_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit_json(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _render(args, header, rows, payload) -> str:
    if args.format == "json":
        return _emit_json(payload)
    if args.format == "csv":
        return _emit_csv(header, rows)
    return _emit_text_table(header, rows)


def _meta(**extra) -> dict:
    return {"version": __version__, **extra}


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for '{args.command}'")


# subcommands ---------------------------------------------------------------


def cmd_exact(args) -> tuple[str, int]:
    _require(args, "d")
    if args.n is None and args.n_max is None:
        raise UsageError("'exact' needs --n or --n-max")
    if args.n is not None:
        value = fib_at(args.d, args.n)
        if args.format == "text":
            return f"{value}\n", EXIT_OK
        rows = [[str(args.n), str(value)]]
        payload = {"params": {"d": args.d, "n": args.n}, "rows": [{"n": args.n, "exact": value}], "meta": _meta()}
    else:
        seq = fib_sequence(args.d, args.n_max)
        rows = [[str(n), str(v)] for n, v in enumerate(seq.values)]
        payload = {
            "params": {"d": args.d, "n_max": args.n_max},
            "rows": [{"n": n, "exact": v} for n, v in enumerate(seq.values)],
            "meta": _meta(),
        }
    return _render(args, ["n", "exact"], rows, payload), EXIT_OK


def cmd_closed(args) -> tuple[str, int]:
    _require(args, "d", "n")
    v = fib_closed(args.d, args.n)
    if args.format == "text":
        return f"{v.rounded}\n", EXIT_OK
    approx = fixed(v.approx.mid, args.decimals, args.truncate) if v.approx is not None else ""
    rows = [[str(v.n), str(v.rounded), approx, str(v.certified).lower(), str(v.precision_bits)]]
    row = {"n": v.n, "rounded": v.rounded, "certified": v.certified, "precision_bits": v.precision_bits}
    if v.approx is not None:
        row.update(_interval_json("approx", v.approx))
    payload = {"params": {"d": args.d, "n": args.n}, "rows": [row], "meta": _meta()}
    return _render(args, ["n", "rounded", "approx", "certified", "precision_bits"], rows, payload), EXIT_OK


def cmd_root(args) -> tuple[str, int]:
    _require(args, "d")
    enc = solve_q(args.d, args.precision_bits)
    q = enc.interval()
    residual = characteristic_residual(enc)
    lo, hi = exact_decimal(enc.q_lo), exact_decimal(enc.q_hi)
    if args.format == "text":
        text = (
            f"d = {args.d}\n"
            f"q ~ {fixed(q.mid, args.decimals)}\n"
            f"q_lo = {lo}\n"
            f"q_hi = {hi}\n"
            f"width = 2^-{enc.precision_bits}\n"
            f"certified = {str(enc.is_certified()).lower()}\n"
            f"residual at 1/q contains 0 = {str(residual.contains(0)).lower()}\n"
        )
        return text, EXIT_OK
    rows = [[str(args.d), lo, hi, str(enc.precision_bits)]]
    payload = {
        "params": {"d": args.d, "precision_bits": args.precision_bits},
        "rows": [{"d": args.d, "q_lo": lo, "q_hi": hi, "precision_bits": enc.precision_bits,
                  "certified": enc.is_certified(), **_interval_json("residual", residual)}],
        "meta": _meta(precision_bits=args.precision_bits),
    }
    return _render(args, ["d", "q_lo", "q_hi", "precision_bits"], rows, payload), EXIT_OK


def cmd_constant(args) -> tuple[str, int]:
    _require(args, "d")
    enc = solve_q(args.d, args.precision_bits)
    values = {
        "mean_lifetime": mean_lifetime(enc),
        "c_reciprocal_mean": blackwell_constant(enc, "reciprocal_mean"),
        "c_closed_form": blackwell_constant(enc, "closed_form"),
    }
    agree = values["c_reciprocal_mean"].intersects(values["c_closed_form"])
    rows = [[name, fixed(v.mid, args.decimals, args.truncate), exact_decimal(v.radius)] for name, v in values.items()]
    if args.format == "text":
        lines = [f"{name} = {mid} +/- {float(v.radius):.3e}" for (name, mid, _), v in zip(rows, values.values())]
        lines.append(f"methods agree = {str(agree).lower()}")
        return "\n".join(lines) + "\n", EXIT_OK
    payload = {
        "params": {"d": args.d, "precision_bits": args.precision_bits},
        "rows": [{"name": name, **_interval_json("value", v)} for name, v in values.items()],
        "meta": _meta(precision_bits=args.precision_bits, methods_agree=agree),
    }
    return _render(args, ["name", "value", "radius"], rows, payload), EXIT_OK


def table_rows(d: int, n_min: int, n_max: int, precision_bits: int):
    """Per-row certified quantities: (n, exact, approx, x_n, bound, precision)."""
    for n in range(n_min, n_max + 1):
        prec = precision_bits
        if n >= 1:
            prec = max(prec, required_precision(d, n) + 64)
        rec = error_term(d, n, prec)
        approx = approx_value(d, n, prec)
        yield n, fib_at(d, n), approx, rec.x_n, rec.bound, prec


def cmd_table(args) -> tuple[str, int]:
    _require(args, "d", "n_max")
    n_min = args.n_min if args.n_min is not None else 0
    if n_min > args.n_max:
        raise UsageError("--n-min must not exceed --n-max")
    rows, json_rows, precs = [], [], set()
    for n, exact, approx, x, bound, prec in table_rows(args.d, n_min, args.n_max, args.precision_bits):
        rows.append([str(n), str(exact)] + [fixed(v.mid, args.decimals, args.truncate) for v in (approx, x, bound)])
        json_rows.append({
            "n": n,
            "exact": exact,
            **_interval_json("approx", approx),
            **_interval_json("error", x),
            **_interval_json("bound", bound),
            "precision_bits": prec,
        })
        precs.add(prec)
    payload = {
        "params": {"d": args.d, "n_min": n_min, "n_max": args.n_max, "precision_bits": args.precision_bits},
        "rows": json_rows,
        "meta": _meta(precision_bits=max(precs)),
    }
    return _render(args, ["n", "exact", "approx", "error", "bound"], rows, payload), EXIT_OK


def cmd_compositions(args) -> tuple[str, int]:
    _require(args, "d", "n")
    if args.count:
        value = count_compositions(args.d, args.n)
        if args.format == "text":
            return f"{value}\n", EXIT_OK
        payload = {"params": {"d": args.d, "n": args.n}, "rows": [{"n": args.n, "count": value}], "meta": _meta()}
        return _render(args, ["n", "count"], [[str(args.n), str(value)]], payload), EXIT_OK
    comps = enumerate_compositions(args.d, args.n, cap=args.cap)
    if args.format == "json":
        payload = {
            "params": {"d": args.d, "n": args.n},
            "rows": [list(c) for c in comps],
            "meta": _meta(count=len(comps)),
        }
        return _emit_json(payload), EXIT_OK
    if args.format == "csv":
        return _emit_csv(["composition"], [[" ".join(map(str, c))] for c in comps]), EXIT_OK
    lines = ["(" + ", ".join(map(str, c)) + ")" for c in comps]
    lines.append(f"# {len(comps)} compositions")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_simulate(args) -> tuple[str, int]:
    _require(args, "d", "n")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    dist = build_distribution(solve_q(args.d, args.precision_bits))
    exact = proposition_value(dist, args.n)
    rep = simulate_first_passage(dist, args.n, args.reps, args.seed, workers=args.workers)
    z = (rep.estimate - float(exact.mid)) / rep.std_error if rep.std_error > 0 else float("nan")
    fields = {
        "d": rep.d,
        "n": rep.n,
        "replications": rep.replications,
        "seed": rep.seed,
        "hits": rep.hits,
        "estimate": rep.estimate,
        "std_error": rep.std_error,
        "ci95_lo": rep.ci95[0],
        "ci95_hi": rep.ci95[1],
        "exact": fixed(exact.mid, args.decimals),
        "z_score": z,
    }
    if args.format == "text":
        return "".join(f"{k} = {v}\n" for k, v in fields.items()), EXIT_OK
    payload = {
        "params": {"d": args.d, "n": args.n, "reps": args.reps, "seed": args.seed},
        "rows": [{**fields, "exact": exact_decimal(exact.mid)}],
        "meta": _meta(generator="numpy.random.PCG64", block_size=rep.block_size),
    }
    return _render(args, list(fields), [[str(v) for v in fields.values()]], payload), EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    results = run_all(quick=args.quick)
    ok = all(r.passed for r in results)
    rows = [[r.module, r.name, "PASS" if r.passed else "FAIL", r.detail] for r in results]
    payload = {
        "params": {"quick": args.quick},
        "rows": [{"module": r.module, "check": r.name, "passed": r.passed, "detail": r.detail} for r in results],
        "meta": _meta(passed=ok),
    }
    if args.format == "text":
        text = "".join(f"[{s}] {m}: {n} ({d})\n" for m, n, s, d in rows)
        text += f"{sum(r.passed for r in results)}/{len(results)} checks passed\n"
    else:
        text = _render(args, ["module", "check", "status", "detail"], rows, payload)
    return text, EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(args) -> tuple[str, int]:
    ds = [args.d] if args.d is not None else [2, 3, 5, 8]
    ns = [args.n] if args.n is not None else [10, 100, 1000]
    rows = []
    for d in ds:
        for n in ns:
            for name, fn in (
                ("fib_sequence", lambda: fib_sequence(d, n)),
                ("fib_at", lambda: fib_at(d, n)),
                ("fib_closed", lambda: fib_closed(d, n)),
            ):
                fn()  # warm caches (root enclosures)
                reps = 0
                start = time.perf_counter()
                while True:
                    fn()
                    reps += 1
                    elapsed = time.perf_counter() - start
                    if elapsed > 0.05 or reps >= 1000:
                        break
                rows.append([name, str(d), str(n), f"{1e6 * elapsed / reps:.1f}"])
    payload = {
        "params": {"d": ds, "n": ns},
        "rows": [{"function": f, "d": int(d), "n": int(n), "microseconds": float(t)} for f, d, n, t in rows],
        "meta": _meta(),
    }
    return _render(args, ["function", "d", "n", "microseconds"], rows, payload), EXIT_OK


COMMANDS = {
    "exact": (cmd_exact, "exact F_n or the sequence F_0..F_{n-max}"),
    "closed": (cmd_closed, "F_n by certified rounding of c_d q^-(n-1)"),
    "root": (cmd_root, "certified enclosure of q"),
    "constant": (cmd_constant, "mean lifetime and c_d by both formulas"),
    "table": (cmd_table, "exact value, approximation, error and bound for a range of n"),
    "compositions": (cmd_compositions, "list or count compositions with parts 1..d"),
    "simulate": (cmd_simulate, "Monte Carlo estimate of P(S_tau_n = n)"),
    "verify": (cmd_verify, "run every invariant suite"),
    "bench": (cmd_bench, "time fib_sequence, fib_at and fib_closed"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--d", type=int, help="order d >= 2")
    common.add_argument("--n", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--n-min", type=int)
    common.add_argument("--precision-bits", type=int, default=config.DEFAULT_PRECISION_BITS)
    common.add_argument("--format", choices=["text", "csv", "json"], default="text")
    common.add_argument("--decimals", type=int, default=6)
    common.add_argument("--truncate", action="store_true", help="truncate decimals toward zero instead of rounding")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--reps", type=int, default=100_000)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--count", action="store_true", help="compositions: print only the count")
    common.add_argument("--cap", type=int, default=config.DEFAULT_ENUMERATION_CAP)
    common.add_argument("--quick", action="store_true", help="verify: reduced ranges")
    common.add_argument("--out", help="write output to this file instead of stdout")

    parser = _Parser(prog="gfib", description="d-generalized Fibonacci numbers via renewal theory")
    parser.add_argument("--version", action="version", version=f"gfib {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.decimals < 0:
            raise UsageError("--decimals must be >= 0")
        if args.d is not None and args.d < 2:
            raise UsageError(f"--d must be >= 2, got {args.d}")
        text, status = COMMANDS[args.command][0](args)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (InvalidOrderError, EnumerationCapError, ValueError, IndexError) as exc:
        print(f"gfib: error: {exc}", file=stderr)
        return EXIT_USAGE
    except PrecisionCeilingError as exc:
        print(f"gfib: precision ceiling: {exc}", file=stderr)
        return EXIT_PRECISION
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
