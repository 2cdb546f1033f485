"""Batch command line front end.

Usage::

    gaussnet [COMMAND] --config PATH [--seed N] [--samples N] [--tol X]
             [--output PATH] [--full-table] [--format json|csv] [-v]

Exit status is 0 on success, 1 on usage or config errors and 2 when an input
violates a physical constraint. Errors are written to stderr as a JSON object.
"""

import argparse
import logging
import sys

from . import __version__
from .classify import canonical_array, classify, verify_classification
from .errors import BoundViolationError, ClassificationError, GaussNetError, PhysicalityError
from .measure import DEFAULT_MAX_MODES, ggqc
from .network import Designed, build_initial_state, check_sufficiency, design_optimal, run_protocol, verify_network
from .report import COMMANDS, dumps, error_object, inputs_digest, parse_config, sweep_csv
from .search import SearchConfig, random_search_max_ggqc, sweep_lambda

log = logging.getLogger("gaussnet")

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS = 0, 1, 2


class UsageError(Exception):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="gaussnet", description="GGQC, Sp(4,R) normal forms and network verification.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="overrides or supplies the config's command")
    p.add_argument("--config", required=True, help="JSON config path, or - for stdin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--output", default=None, help="write the report here instead of stdout")
    p.add_argument("--full-table", action="store_true", help="include the per-bipartition table")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="csv is only valid for sweep")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--version", action="version", version=f"gaussnet {__version__}")
    return p


def _max_modes(cfg):
    return int(cfg.options.get("max_modes", DEFAULT_MAX_MODES))


def compute(cfg):
    """Run the command of a parsed config. Returns the results object (or sweep rows)."""
    if cfg.command == "classify":
        res = classify(cfg.matrix, tol=cfg.tol)
        out = res.to_dict()
        out["verification"] = verify_classification(cfg.matrix, res)
        return out
    if cfg.command == "design":
        d = cfg.payload["design"]
        g1, g2 = float(d["gamma1"]), float(d["gamma2"])
        des = design_optimal(d["type"], g1, g2, float(d.get("margin", Designed.margin)), d.get("rule", "table"))
        suff = check_sufficiency(canonical_array(des.form.kind, *des.form.params), g1, g2)
        out = des.to_dict()
        out.update({"gamma1": g1, "gamma2": g2, "eq9_ok": suff.holds, "eq9_lhs": suff.lhs, "eq9_rhs": suff.rhs})
        return out
    if cfg.command == "ggqc":
        final, _ = run_protocol(build_initial_state(cfg.spec), cfg.spec, tol=cfg.tol)
        out = ggqc(final, _max_modes(cfg)).to_dict(cfg.full_table)
        out["n_modes"] = final.n
        return out
    if cfg.command == "verify-network":
        out = verify_network(cfg.spec, _max_modes(cfg)).to_dict()
        if cfg.options.get("search"):
            rules = cfg.options.get("design_rules", [])
            sc = SearchConfig(cfg.spec, cfg.samples, cfg.seed, cfg.options.get("sampler", "mixed"),
                              tuple(Designed("I", r) for r in rules))
            out["search"] = random_search_max_ggqc(sc, _max_modes(cfg)).to_dict()
        return out
    return sweep_lambda(cfg.spec, cfg.options["sweep_type"], cfg.options["grid"], _max_modes(cfg))


def render(cfg, results, fmt):
    if cfg.command == "sweep" and fmt != "json":
        return sweep_csv(results)
    if cfg.command == "sweep":
        results = [{"lambda": r.lam, "ggqc": r.ggqc, "eq9": r.eq9, "gap": r.gap} for r in results]
    return dumps({
        "command": cfg.command,
        "inputs_digest": inputs_digest(cfg),
        "results": results,
        "seed": cfg.seed,
        "version": __version__,
    })


def _fail(exc, status):
    sys.stderr.write(dumps(error_object(exc)))
    return status


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(exc, EXIT_USAGE)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.samples < 1:
            raise UsageError("--samples must be >= 1")
        if args.format == "csv" and args.command not in (None, "sweep"):
            raise UsageError("--format csv is only available for sweep")
        try:
            if args.config == "-":
                text = sys.stdin.read()
            else:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        cfg = parse_config(text, args.command, args.tol, args.seed, args.samples, args.full_table)
        if args.format == "csv" and cfg.command != "sweep":
            raise UsageError("--format csv is only available for sweep")
        text = render(cfg, compute(cfg), args.format)
    except (PhysicalityError, ClassificationError, BoundViolationError) as exc:
        return _fail(exc, EXIT_PHYSICS)
    except (GaussNetError, UsageError) as exc:
        return _fail(exc, EXIT_USAGE)
    # Render fully before writing so a failure never leaves a partial report.
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            exc.code = "io"
            return _fail(exc, EXIT_USAGE)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
