"""Command-line entry point: ``qduality {campaign,werner,axioms,evaluate}``.

Exit codes: 0 every check passed, 1 some inequality or axiom was violated,
2 bad usage, 3 input/output failure.
"""
import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import verify
from .config import Tolerances
from .errors import QDualityError
from .states import werner_matrix

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

CAMPAIGN_COLUMNS = (
    "d", "sample_id", "seed", "rank", *verify.MEASURE_FIELDS,
    "slack_tohs_l", "slack_tohs_vn", "slack_heub", "slack_heub2", "slack_cpl1", "pass_all",
)
WERNER_SUMS = {
    "chs_plus_phsl": ("c_hs", "p_hs_l"),
    "chs_plus_phsvn": ("c_hs", "p_hs_vn"),
    "cwy_plus_phsl": ("c_wy", "p_hs_l"),
    "cwy_plus_phsvn": ("c_wy", "p_hs_vn"),
    "cl1_plus_pl1": ("c_l1", "p_l1"),
}
WERNER_COLUMNS = ("d", "w", "a", *CAMPAIGN_COLUMNS[2:-1], *WERNER_SUMS, "pass_all")
AXIOM_COLUMNS = ("measure", "axiom", "d", "trials", "violations", "skipped", "worst_slack", "tolerance")
ALL_MEASURES = (*verify.WAVE, *verify.PREDICTABILITY)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    d_min: int = 2
    d_max: int = 8
    samples: int = 1000
    rank: object = "full"
    seed: int = 1
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_path: str = None
    w_list: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    a_steps: int = 101
    measures: tuple = ALL_MEASURES
    trials: int = 1000
    threads: int = None
    input_path: str = None
    werner_point: tuple = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _d_range(text):
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise UsageError(f"--d: expected N or N..M, got {text!r}") from None


def _floats(flag, text, count=None):
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if not values or (count is not None and len(values) != count):
        raise UsageError(f"{flag}: expected {count or 'at least one'} value(s), got {text!r}")
    return values


def _build_parser():
    p = _Parser(prog="qduality", description="Check coherence/predictability trade-offs on random states.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, campaign_like=True):
        sp.add_argument("--d", help="dimension N or range N..M within 2..16 (default 2..8, or 4 for werner/axioms)")
        if campaign_like:
            sp.add_argument("--samples", type=int, default=1000)
            sp.add_argument("--rank", default="full", help="integer rank or 'full'")
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--tol-validation", type=float)
        sp.add_argument("--tol-derived", type=float)
        sp.add_argument("--tol-eig", type=float)
        sp.add_argument("--tol-permutation", type=float)
        sp.add_argument("-o", "--output", help="CSV output path")
        sp.add_argument("--threads", type=int, help="worker threads (default: QDUALITY_THREADS or CPU count)")

    common(sub.add_parser("campaign", help="random-state campaign"))
    w = sub.add_parser("werner", help="Werner ququart sweep")
    common(w, campaign_like=False)
    w.add_argument("--w", default="0,0.25,0.5,0.75,1")
    w.add_argument("--a-steps", type=int, default=101)
    ax = sub.add_parser("axioms", help="numerical axiom suites")
    common(ax, campaign_like=False)
    ax.add_argument("--measure", action="append", choices=ALL_MEASURES)
    ax.add_argument("--trials", type=int, default=1000)
    ev = sub.add_parser("evaluate", help="evaluate one state")
    src = ev.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="JSON file with 'real' (and optional 'imag') matrices")
    src.add_argument("--werner", help="W,A")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("-o", "--output")
    return p


def parse_config(argv):
    """Parse and validate ``argv``; raises :class:`UsageError` naming the bad flag."""
    args = _build_parser().parse_args(argv)
    cfg = RunConfig(args.command, seed=args.seed, output_path=args.output)
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError(f"--seed: must be an unsigned 64-bit integer, got {args.seed}")
    if args.command == "evaluate":
        cfg.input_path = args.input
        if args.werner is not None:
            cfg.werner_point = _floats("--werner", args.werner, count=2)
        return cfg

    cfg.d_min, cfg.d_max = _d_range(args.d or ("2..8" if args.command == "campaign" else "4"))
    if not 2 <= cfg.d_min <= cfg.d_max <= verify.MAX_DIM:
        raise UsageError(f"--d: need 2 <= d_min <= d_max <= {verify.MAX_DIM}, got {args.d}")
    overrides = {name: getattr(args, f"tol_{name}") for name in ("validation", "derived", "eig", "permutation")}
    try:
        cfg.tolerances = dataclasses.replace(cfg.tolerances, **{k: v for k, v in overrides.items() if v is not None})
    except ValueError as exc:
        raise UsageError(f"tolerance override: {exc}") from None
    if args.threads is not None and args.threads < 1:
        raise UsageError("--threads: must be at least 1")
    cfg.threads = args.threads

    if args.command == "campaign":
        if args.samples < 1:
            raise UsageError(f"--samples: must be at least 1, got {args.samples}")
        cfg.samples = args.samples
        if args.rank != "full":
            try:
                cfg.rank = int(args.rank)
            except ValueError:
                raise UsageError(f"--rank: expected an integer or 'full', got {args.rank!r}") from None
            if not 1 <= cfg.rank <= cfg.d_min:
                raise UsageError(f"--rank: must lie in 1..{cfg.d_min} for every dimension, got {cfg.rank}")
    elif args.command == "werner":
        if cfg.d_min != 4 or cfg.d_max != 4:
            raise UsageError("--d: the Werner family is defined for d = 4 only")
        cfg.w_list = _floats("--w", args.w)
        if any(not 0.0 <= w <= 1.0 for w in cfg.w_list):
            raise UsageError(f"--w: values must lie in [0, 1], got {args.w}")
        if args.a_steps < 2:
            raise UsageError(f"--a-steps: must be at least 2, got {args.a_steps}")
        cfg.a_steps = args.a_steps
    elif args.command == "axioms":
        cfg.measures = tuple(args.measure) if args.measure else ALL_MEASURES
        if args.trials < 1:
            raise UsageError(f"--trials: must be at least 1, got {args.trials}")
        cfg.trials = args.trials
    return cfg


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def record_row(rec, columns):
    """Values of ``rec`` in ``columns`` order, formatted for CSV."""
    out = []
    for col in columns:
        if col == "d":
            v = rec.dim
        elif col.startswith("slack_"):
            v = rec.slacks[col[len("slack_"):]]
        elif col in WERNER_SUMS:
            x, y = WERNER_SUMS[col]
            v = getattr(rec, x) + getattr(rec, y)
        else:
            v = getattr(rec, col)
        out.append(_fmt(v))
    return out


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _summary_table(per_dim):
    names = list(verify.VERDICTS)
    lines = ["d  samples  pass_all  mean(S_l-C_hs)  " + "  ".join(names)]
    for d, s in sorted(per_dim.items()):
        counts = "  ".join(f"{s.verdict_passes[n]:>{len(n)}}" for n in names)
        lines.append(f"{d:<2} {s.samples:>8} {s.passes:>9}  {s.mean_slack_tohs_l:>14.6f}  {counts}")
    return "\n".join(lines)


def _run_campaign(cfg, out, state_hook):
    res = verify.campaign(
        range(cfg.d_min, cfg.d_max + 1), cfg.samples,
        rank=None if cfg.rank == "full" else cfg.rank, seed=cfg.seed,
        tolerances=cfg.tolerances, workers=cfg.threads, state_hook=state_hook,
    )
    path = cfg.output_path or "campaign.csv"
    _write_csv(path, CAMPAIGN_COLUMNS, (record_row(r, CAMPAIGN_COLUMNS) for r in res.records))
    print(_summary_table(res.per_dim), file=out)
    print(f"wrote {len(res.records)} rows to {path}", file=out)
    if res.violations:
        dump = path + ".violations.json"
        with open(dump, "w") as fh:
            json.dump([v.to_json() for v in res.violations], fh, indent=1)
        print(f"{len(res.violations)} violating state(s) written to {dump}", file=out)
        return EXIT_VIOLATION
    return EXIT_OK


def _run_werner(cfg, out):
    recs = verify.werner_sweep(cfg.w_list, cfg.a_steps, cfg.tolerances, seed=cfg.seed)
    path = cfg.output_path or "werner.csv"
    _write_csv(path, WERNER_COLUMNS, (record_row(r, WERNER_COLUMNS) for r in recs))
    failed = sum(not r.pass_all for r in recs)
    print(f"{len(recs)} grid points, {len(recs) - failed} pass all inequalities; wrote {path}", file=out)
    for w in cfg.w_list:
        sub = [r for r in recs if r.w == w]
        sums = {k: max(getattr(r, x) + getattr(r, y) for r in sub) for k, (x, y) in WERNER_SUMS.items()}
        print(f"w={w:g}: " + "  ".join(f"max {k}={v:.6f}" for k, v in sums.items()), file=out)
    return EXIT_VIOLATION if failed else EXIT_OK


def _run_axioms(cfg, out):
    reports = []
    for d in range(cfg.d_min, cfg.d_max + 1):
        for m in cfg.measures:
            suite = verify.axiom_suite_wave if m in verify.WAVE else verify.axiom_suite_predictability
            reports += [(d, r) for r in suite(m, d=d, trials=cfg.trials, seed=cfg.seed, tolerances=cfg.tolerances)]
    rows = [[r.measure, r.axiom, str(d), _fmt(r.trials), _fmt(r.violations), _fmt(r.skipped),
             _fmt(r.worst_slack), _fmt(r.tolerance)] for d, r in reports]
    if cfg.output_path:
        _write_csv(cfg.output_path, AXIOM_COLUMNS, rows)
    for d, r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} d={d} {r.measure:8} {r.axiom}: {r.violations}/{r.trials} violations, "
              f"{r.skipped} skipped, worst slack {r.worst_slack:.3e}", file=out)
    return EXIT_OK if all(r.passed for _, r in reports) else EXIT_VIOLATION


def _load_matrix(path):
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, list):
        return np.asarray(data, dtype=np.complex128)
    try:
        return np.asarray(data["real"], dtype=np.float64) + 1j * np.asarray(data.get("imag", 0.0), dtype=np.float64)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"--input: expected a matrix or an object with 'real'/'imag', got {exc}") from None


def _run_evaluate(cfg, out):
    if cfg.werner_point is not None:
        rho = werner_matrix(*cfg.werner_point)
    else:
        rho = _load_matrix(cfg.input_path)
    rec = verify.evaluate(rho, cfg.tolerances, seed=cfg.seed)
    for name in verify.MEASURE_FIELDS:
        print(f"{name:14} {getattr(rec, name): .12g}", file=out)
    for name, slack in rec.slacks.items():
        ok = slack >= -getattr(cfg.tolerances, verify.VERDICTS[name])
        print(f"slack_{name:9} {slack: .3e}  {'pass' if ok else 'FAIL'}", file=out)
    if cfg.output_path:
        _write_csv(cfg.output_path, CAMPAIGN_COLUMNS, [record_row(rec, CAMPAIGN_COLUMNS)])
    return EXIT_OK if rec.pass_all else EXIT_VIOLATION


def execute(cfg, state_hook=None, out=None):
    """Run a parsed config; returns the process exit code."""
    out = sys.stdout if out is None else out
    try:
        if cfg.command == "campaign":
            return _run_campaign(cfg, out, state_hook)
        if cfg.command == "werner":
            return _run_werner(cfg, out)
        if cfg.command == "axioms":
            return _run_axioms(cfg, out)
        return _run_evaluate(cfg, out)
    except OSError as exc:
        print(f"qduality: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, QDualityError, json.JSONDecodeError) as exc:
        print(f"qduality: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"qduality: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return execute(cfg)
