"""Command-line interface.

Every command prints a JSON envelope ``{manifest, inputs, result}`` (or CSV
rows with ``--format csv``).  Exit status: 0 on success, 2 on argument
errors, 3 when a size guard refuses the computation.
"""

import argparse
import csv
import io
import json
import os
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .lattice import Window
from .models import (AllOrNone, Corner, IidDirected, IsotropicDegreeTwo, NsEw, TwoDpNeighbor,
                     TwoEps, as_fraction, fraction_str, sample_configuration)
from .oracle import SCENARIOS, GuardError

SCHEMA_PATH = Path(__file__).with_name("schema") / "result.schema.json"


class UsageError(ValueError):
    pass


def _git_describe():
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).parent)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _frac(text):
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def model_from_args(args):
    m = args.model
    if m == "twoeps":
        return TwoEps(args.eps if args.eps is not None else 0)
    if m == "iso":
        if args.rho is None:
            raise UsageError("--rho is required for the iso model")
        return IsotropicDegreeTwo(args.rho)
    p = args.p if args.p is not None else Fraction(1, 2)
    if m == "2dp":
        return TwoDpNeighbor(args.d, p)
    if m == "iid":
        return IidDirected(p, args.d)
    if m == "aon":
        return AllOrNone(p, args.d)
    if m == "nsew":
        return NsEw(p)
    if m == "corner":
        return Corner(p)
    raise UsageError(f"unknown model {m!r}")


def _est_row(label, e):
    return {"label": label, "mean": e.mean, "stderr": e.stderr, "ci95_lo": e.lo,
            "ci95_hi": e.hi, "trials": e.trials}


# -- commands: each returns (result json, csv rows) ---------------------------

def cmd_sample(args):
    spec = model_from_args(args)
    cfg = sample_configuration(spec, Window((0,) * spec.d, args.radius), args.seed, args.trial)
    rows = [{"rank": i, "mask": int(m)} for i, m in enumerate(cfg.outcomes.tolist())]
    res = {"model": spec.to_json(), "radius": args.radius,
           "masks": [int(m) for m in cfg.outcomes.tolist()]}
    if spec.d == 2:
        res["text"] = cfg.text()
    return res, rows


def _exploration(args):
    from .explore import explore_dual_forward
    spec = model_from_args(args)
    if spec.d != 2:
        raise UsageError("the dual exploration needs a planar model")
    cfg = sample_configuration(spec, Window((0, 0), args.radius + 1), args.seed, args.trial)
    return cfg, explore_dual_forward(cfg, (0, 0), Window((0, 0), args.radius))


def cmd_explore(args):
    _, rec = _exploration(args)
    rows = [{"n": s.index, "a": s.edge.tail[0], "b": s.edge.tail[1],
             "dir": "ENWS"[s.edge.direction], "open": int(s.open)} for s in rec.steps]
    return rec.to_json(), rows


def cmd_survival(args):
    from .estimate import survival
    e = survival(model_from_args(args), args.n, args.trials, args.seed, args.threads)
    return e.to_json(), [_est_row("survival", e)]


def cmd_tail(args):
    from .estimate import dual_tail
    curve = dual_tail(model_from_args(args), args.n_max, args.trials, args.seed, args.threads)
    return ({"curve": curve.to_json(), "non_increasing": curve.non_increasing()},
            [_est_row(str(n), e) for n, e in zip(curve.ns, curve.estimates)])


def cmd_pc(args):
    from .estimate import estimate_pc
    r = estimate_pc(model_from_args(args), args.n, args.trials, args.tol, args.seed,
                    args.lo, args.hi, args.criterion, args.threads)
    return r.to_json(), [_est_row(repr(p), e) for p, e in r.probes]


def cmd_crossing(args):
    from .estimate import crossing
    e = crossing(model_from_args(args), args.L, args.trials, args.seed, args.threads)
    return e.to_json(), [_est_row("crossing", e)]


def cmd_annulus(args):
    from .estimate import annulus_cycle
    r = annulus_cycle(model_from_args(args), args.L, args.trials, args.seed, args.threads)
    return r.to_json(), [_est_row("exact", r.exact), _est_row("glue", r.glue)]


def cmd_compare(args):
    from .estimate import theta_comparison
    table = theta_comparison(args.n, args.trials, args.seed, args.p or Fraction(1, 2),
                             args.threads)
    return ({"table": [{"model": k, **e.to_json()} for k, e in table]},
            [_est_row(k, e) for k, e in table])


def cmd_rho_sweep(args):
    from .estimate import theta_vs_rho
    curve = theta_vs_rho(args.rho_grid, args.n, args.trials, args.seed, args.threads)
    return ({"curve": [{"rho": fraction_str(r), **e.to_json()} for r, e in curve]},
            [_est_row(fraction_str(r), e) for r, e in curve])


def cmd_russo(args):
    from .enhance import MAX_RUSSO_RADIUS, finite_difference, russo_estimates
    if args.n > MAX_RUSSO_RADIUS:
        raise GuardError(f"russo sweeps are limited to n <= {MAX_RUSSO_RADIUS}")
    dp, dq = russo_estimates(args.p, args.q, args.n, args.trials, args.seed)
    res = {"dp": dp.to_json(), "dq": dq.to_json()}
    rows = [_est_row("dp", dp), _est_row("dq", dq)]
    if args.fd:
        fp = finite_difference(args.p, args.q, args.n, args.trials, args.seed, args.h, "p")
        fq = finite_difference(args.p, args.q, args.n, args.trials, args.seed, args.h, "q")
        res.update(fd_p=fp.to_json(), fd_q=fq.to_json(), h=args.h)
        rows += [_est_row("fd_p", fp), _est_row("fd_q", fq)]
    return res, rows


def cmd_oracle(args):
    from . import oracle
    if args.saw is not None:
        c = oracle.saw_count(args.saw)
        return {"saw_count": c, "n": args.saw}, [{"n": args.saw, "saw_count": c}]
    if args.escape is not None:
        spec = model_from_args(args)
        pr = oracle.exhaustive_window_probability(spec, args.escape, oracle.escapes)
        return ({"probability": fraction_str(pr), "float": float(pr)},
                [{"probability": fraction_str(pr)}])
    if args.model == "twoeps" or args.eps is not None:
        spec = TwoEps(args.eps if args.eps is not None else 0)
    else:
        spec = model_from_args(args)
    sc = oracle.ConditionalScenario(spec, oracle.SCENARIOS[args.scenario])
    pr = oracle.conditional_dual_probability(sc)
    return {"probability": fraction_str(pr)}, [{"probability": fraction_str(pr)}]


def cmd_render(args):
    from .render import render_svg
    if args.what == "config":
        spec = model_from_args(args)
        cfg = sample_configuration(spec, Window((0, 0), args.radius), args.seed, args.trial)
        text = render_svg(cfg, args.out)
    else:
        cfg, rec = _exploration(args)
        text = render_svg(rec, args.out, cfg if args.with_config else None)
    res = {"path": args.out, "bytes": len(text.encode())}
    if args.out is None:
        res["svg"] = text
    return res, [res]


COMMANDS = {
    "sample": cmd_sample, "explore": cmd_explore, "survival": cmd_survival,
    "tail": cmd_tail, "pc": cmd_pc, "crossing": cmd_crossing, "annulus": cmd_annulus,
    "compare": cmd_compare, "rho-sweep": cmd_rho_sweep, "russo": cmd_russo,
    "oracle": cmd_oracle, "render": cmd_render,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    default_seed = int(os.environ.get("NEIGHPERC_SEED", "0"))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--output", "-o", default=None, help="write the result here")
    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", default="2dp",
                       choices=("2dp", "twoeps", "iid", "aon", "nsew", "corner", "iso"))
    model.add_argument("--p", type=_frac, default=None)
    model.add_argument("--d", type=int, default=2)
    model.add_argument("--eps", type=_frac, default=None)
    model.add_argument("--rho", type=_frac, default=None)

    parser = _Parser(prog="neighperc", description="Neighbour percolation experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, with_model=True):
        return sub.add_parser(name, parents=[common] + ([model] if with_model else []))

    s = add("sample")
    s.add_argument("--radius", type=int, default=4)
    s.add_argument("--trial", type=int, default=0)
    for name in ("explore", "render"):
        s = add(name)
        s.add_argument("--radius", type=int, default=16)
        s.add_argument("--trial", type=int, default=0)
        if name == "render":
            s.add_argument("--what", choices=("config", "explore"), default="explore")
            s.add_argument("--out", default=None)
            s.add_argument("--with-config", action="store_true")
    s = add("survival")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=1000)
    s = add("tail")
    s.add_argument("--n-max", type=int, default=100)
    s.add_argument("--trials", type=int, default=1000)
    s = add("pc")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--tol", type=float, default=0.01)
    s.add_argument("--lo", type=float, default=0.0)
    s.add_argument("--hi", type=float, default=1.0)
    s.add_argument("--criterion", type=float, default=0.5)
    for name in ("crossing", "annulus"):
        s = add(name)
        s.add_argument("--L", type=int, required=True)
        s.add_argument("--trials", type=int, default=1000)
    s = add("compare", with_model=False)
    s.add_argument("--n", type=int, default=128)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--p", type=_frac, default=None)
    s = add("rho-sweep", with_model=False)
    s.add_argument("--rho-grid", type=_frac, nargs="+",
                   default=[Fraction(0), Fraction(1, 12), Fraction(1, 6), Fraction(1, 4)])
    s.add_argument("--n", type=int, default=128)
    s.add_argument("--trials", type=int, default=1000)
    s = add("russo", with_model=False)
    s.add_argument("--p", type=_frac, default=Fraction(1, 2))
    s.add_argument("--q", type=_frac, default=Fraction(3, 10))
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--fd", action="store_true", help="add central finite differences")
    s.add_argument("--h", type=float, default=0.02)
    s = add("oracle")
    s.add_argument("--scenario", choices=sorted(SCENARIOS), default="w-closed")
    s.add_argument("--saw", type=int, default=None)
    s.add_argument("--escape", type=int, default=None, metavar="RADIUS")
    return parser



def _inputs(args):
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("format", "output", "threads"):
            continue
        if isinstance(v, Fraction):
            v = fraction_str(v)
        elif isinstance(v, list):
            v = [fraction_str(x) if isinstance(x, Fraction) else x for x in v]
        out[k] = v
    return out


def _csv(rows):
    buf = io.StringIO()
    if rows:
        keys = list(rows[0])
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def run(argv=None, stdout=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        t0 = time.perf_counter()
        result, rows = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - t0
    except UsageError as exc:
        print(f"neighperc: error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"neighperc: guard: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"neighperc: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:      # --help / --version
        return int(exc.code or 0)
    manifest = {"command": args.command, "parameters": _inputs(args), "seed": args.seed,
                "version": __version__, "wall_clock_s": round(elapsed, 3),
                "git_describe": _git_describe()}
    if args.format == "csv":
        text = _csv(rows)
    else:
        text = json.dumps({"manifest": manifest, "inputs": _inputs(args), "result": result},
                          indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
