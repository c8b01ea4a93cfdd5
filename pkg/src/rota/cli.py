"""Command-line entry point: ``rota <command> [options]``.

Exit status: 0 success, 1 verification or decomposition failure, 2 usage
error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .constants import constants_report
from .decompose import Decomposition, decompose, verify
from .errors import BudgetExceeded, RotaError
from .exact import FOUND, INDETERMINATE, SearchBudget, oracle_decompose
from .field import FieldSpec
from .harness import ExperimentConfig, run_experiment, to_csv
from .linalg import TSet, is_dispersed
from .sample import BasisFamily, RngStream, TSpec, sample_family, t_enumerate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _load_family(path: str) -> BasisFamily:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return BasisFamily.loads(text)


def _parse_ns(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        out += list(range(int(lo), int(hi) + 1)) if hi else [int(lo)]
    return out


# ------------------------------------------------------------ commands


def cmd_sample(args) -> int:
    if args.n is None and not args.t.startswith(("graphic:", "file:")):
        raise UsageError("sample needs -n")
    spec = TSpec.parse(args.t, args.field, args.n)
    fam = sample_family(spec, RngStream(args.seed))
    _emit(args, fam.dumps(hex_rows=args.hex))
    return EXIT_OK


def cmd_decompose(args) -> int:
    fam = _load_family(args.family)
    rng = RngStream(args.seed) if args.seed_given else None
    res = decompose(fam, args.mode, args.n_prime, args.retries, rng)
    if res.success:
        out = res.decomposition.to_json()
        if args.diagnostics:
            out["diagnostics"] = [d.to_json() for d in res.attempts]
        _emit(args, json.dumps(out))
        return EXIT_OK
    _emit(args, json.dumps({"success": False, "diagnostics": [d.to_json() for d in res.attempts]}))
    return EXIT_FAIL


def cmd_verify(args) -> int:
    fam = _load_family(args.family)
    d = Decomposition.from_json(json.loads(Path(args.decomposition).read_text()))
    rep = verify(fam, d)
    _emit(args, json.dumps(rep.to_json()))
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    if args.family:
        fam = _load_family(args.family)
    elif args.n is not None:
        fam = sample_family(TSpec.parse(args.t, args.field, args.n), RngStream(args.seed))
    else:
        raise UsageError("oracle needs a family file or -n")
    res = oracle_decompose(fam, SearchBudget(args.node_limit, args.time_limit))
    _emit(args, json.dumps(res.to_json()))
    if res.status == FOUND:
        return EXIT_OK
    return EXIT_BUDGET if res.status == INDETERMINATE else EXIT_FAIL


def cmd_constants(args) -> int:
    rep = constants_report(args.c, args.k_max, args.eps)
    _emit(args, json.dumps(rep.to_json(args.digits), indent=2))
    return EXIT_OK


def cmd_dispersed(args) -> int:
    if args.vectors:
        obj = json.loads(Path(args.vectors).read_text())
        t = TSet.of(obj["vectors"] if isinstance(obj, dict) else obj, args.field)
    else:
        if args.n is None:
            raise UsageError("dispersed needs -n or --vectors")
        t = t_enumerate(TSpec.parse(args.t, args.field, args.n))
    c = args.c
    if c is None:
        spec_kind = args.t.partition(":")[0]
        if args.vectors or spec_kind not in ("full", "entries"):
            raise UsageError("--c is required for this T")
        size = args.field.p if spec_kind == "full" else len(TSpec.parse(args.t, args.field, 1).entries)
        c = f"1/{size}"
    rep = is_dispersed(t, c, args.field, args.budget)
    _emit(args, json.dumps(rep.to_json()))
    return EXIT_OK if rep.dispersed else EXIT_FAIL


def cmd_experiment(args) -> int:
    if not args.ns:
        raise UsageError("experiment needs --ns (e.g. 8,16,32)")
    cfg = ExperimentConfig(
        field=args.field,
        t=args.t,
        ns=tuple(_parse_ns(args.ns)),
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        retries=args.retries,
        diagnostics=args.diagnostics,
        timing=args.timing,
        workers=args.workers,
        artifacts=args.artifacts,
    )
    records, summary = run_experiment(cfg)
    _emit(args, to_csv(records).rstrip("\n"))
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")
    else:
        sys.stderr.write(json.dumps(summary["results"]) + "\n")
    return EXIT_OK


# --------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help="master seed (u64, default 0)")
    common.add_argument("--field", type=_field, default=FieldSpec.prime(2), help="gf:<p> or zz")
    common.add_argument("--t", default="full", help="full | entries:<csv> | file:<path> | graphic:<v>")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--mode", choices=("full", "halves"), default="full")
    common.add_argument("--retries", type=int, default=3)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("-n", type=int, default=None, help="dimension")

    p = _Parser(prog="rota", description="Transversal basis decompositions of random bases.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", parents=[common], help="sample a basis family as JSON")
    s.add_argument("--hex", action="store_true", help="GF(2) rows as hex words")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("decompose", parents=[common], help="decompose a family JSON")
    s.add_argument("family", help="family JSON path, or - for stdin")
    s.add_argument("--n-prime", type=int, default=None)
    s.add_argument("--diagnostics", action="store_true", help="include per-attempt diagnostics")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("verify", parents=[common], help="check a decomposition against a family")
    s.add_argument("family")
    s.add_argument("decomposition")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", parents=[common], help="exhaustive decomposition search")
    s.add_argument("family", nargs="?")
    s.add_argument("--node-limit", type=int, default=10**7)
    s.add_argument("--time-limit", type=float, default=None)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("constants", parents=[common], help="certified proof constants")
    s.add_argument("--c", required=True)
    s.add_argument("--k-max", type=int, default=20)
    s.add_argument("--eps", type=float, default=1e-12)
    s.add_argument("--digits", type=int, default=20)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("dispersed", parents=[common], help="check c-dispersedness of T")
    s.add_argument("--c", default=None, help="default 1/|S| for full or entries T")
    s.add_argument("--vectors", help="JSON file with an explicit vector list")
    s.add_argument("--budget", type=int, default=2**20)
    s.set_defaults(func=cmd_dispersed)

    s = sub.add_parser("experiment", parents=[common], help="seeded Monte-Carlo sweep to CSV")
    s.add_argument("--ns", help="comma list of n values, ranges allowed (8,16,32 or 2-6)")
    s.add_argument("--diagnostics", type=int, choices=(0, 1, 2), default=0)
    s.add_argument("--summary", help="write the JSON summary here")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--timing", action="store_true", help="fill the ms column (breaks byte-identity)")
    s.add_argument("--artifacts", help="directory for per-trial family/decomposition JSON")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = 0
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except (RotaError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
