"""``exprecog`` command line.

Exit codes: 0 test passed, 1 mathematical refutation (report still written),
2 usage or input error.  Reports are JSON with sorted keys and no timestamps,
so identical arguments and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .errors import (DegenerateOrderError, DegenerateRootError, HypothesisViolation,
                     InvalidArgument, InvalidInput, OracleDomainError)
from .expr import (ExpressionError, NotRonkinForm, evaluate_expression, expression_oracle,
                   expression_to_ronkin, parse_expression, to_text)
from .exppoly import ExpPoly, RonkinRejection, ronkin_to_exppoly
from .hankel import TestGrid, default_grid, estimate_order, lattice_grid, popoviciu_test
from .kronecker import density_probe, generators_in_ball
from .montel import MontelHypothesis, montel_verify, rado_test
from .oracle import FunctionOracle, SampledOracle, line_restriction
from .prony import RecoveredExpPoly1D, RecoveryConfig, infer_step, recover_1d
from .samples import SampleFormatError, load_samples

SEED_ENV = "EXPRECOG_SEED"
EXIT_PASS, EXIT_REFUTED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    tol: float = 1e-8
    grid_size: int = 12
    seed: int = 42
    n_max: int = 8
    output: str | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.grid_size < 4:
            raise UsageError("--grid-size must be at least 4")
        if self.n_max < 1:
            raise UsageError("--n-max must be at least 1")


# --- JSON ------------------------------------------------------------------

def jsonable(obj):
    """Plain JSON types; complex -> {"re", "im"}, non-finite floats -> None."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    return obj


def dump_report(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def model_json(p: ExpPoly) -> dict:
    terms = []
    for poly, lam in p.terms:
        if p.dim == 1:
            coeffs = [[c.real, c.imag] for c in map(complex, poly.coeffs_1d())]
            terms.append({"exponent_re": lam[0].real, "exponent_im": lam[0].imag, "coefficients": coeffs})
        else:
            coeffs = [{"monomial": list(a), "re": complex(c).real, "im": complex(c).imag}
                      for a, c in sorted(poly.terms.items())]
            terms.append({"exponent_re": [complex(v).real for v in lam],
                          "exponent_im": [complex(v).imag for v in lam], "coefficients": coeffs})
    terms.sort(key=lambda t: json.dumps(jsonable([t["exponent_re"], t["exponent_im"]])))
    return {"dim": p.dim, "terms": terms}


def recovery_json(r) -> dict:
    if isinstance(r, RecoveredExpPoly1D):
        return {"recovered": True, "order": r.order, "step": r.step,
                "fit_residual": r.fit_residual, "aliasing_resolved": r.aliasing_resolved,
                "condition": r.condition,
                "multiplicities": sorted([[complex(l).real, complex(l).imag, m] for l, m in r.exponents]),
                "model": model_json(r.model)}
    return {"recovered": False, "stage": r.stage, "detail": r.detail, "order": r.order}


# --- function sources ------------------------------------------------------

def _floats(text: str | None, name: str) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{name} must be comma-separated numbers") from None


def load_function(args) -> tuple[FunctionOracle, dict]:
    if args.expr is not None:
        dim = args.dim or 1
        node = parse_expression(args.expr, dim)
        f = expression_oracle(args.expr, dim)
        return f, {"expr": to_text(node), "dim": dim}
    s = load_samples(args.input)
    if args.dim is not None and args.dim != s.dim:
        raise UsageError(f"--dim {args.dim} does not match sample dimension {s.dim}")
    return SampledOracle(s.points, s.values), {"input": os.path.basename(args.input), "dim": s.dim,
                                              "num_samples": len(s)}


def lattice_steps(f: SampledOracle) -> np.ndarray:
    """One step per axis: the modal spacing of that coordinate."""
    steps = []
    for i in range(f.dim):
        e = np.zeros(f.dim)
        e[i] = infer_step(f.points[:, i])
        steps.append(e)
    return np.array(steps)


def hankel_grid(f: FunctionOracle, cfg: RunConfig) -> TestGrid:
    if isinstance(f, SampledOracle):
        return lattice_grid(f, lattice_steps(f), seed=cfg.seed, tol=cfg.tol)
    return default_grid(f.dim, cfg.grid_size, cfg.seed, cfg.tol)


def _require_closed_form(f: FunctionOracle, command: str):
    if isinstance(f, SampledOracle):
        raise UsageError(f"{command} evaluates off any fixed lattice; use --expr")


# --- subcommands -----------------------------------------------------------

def cmd_check(args, cfg: RunConfig, f: FunctionOracle, report: dict) -> int:
    if args.order is None:
        raise UsageError("check needs --order")
    r = popoviciu_test(f, args.order, hankel_grid(f, cfg))
    w = r.worst_window
    report.update(verdict="pass" if r.passed else "fail", order=r.n,
                  worst_magnitude=r.worst_magnitude, window_magnitudes=r.magnitudes,
                  worst_window={"x": w.x, "h": w.h, "raw_det": r.worst_raw_det,
                                "row_scaled_magnitude": r.worst_magnitude})
    return EXIT_PASS if r.passed else EXIT_REFUTED


def cmd_order(args, cfg: RunConfig, f: FunctionOracle, report: dict) -> int:
    grid = hankel_grid(f, cfg)
    n = estimate_order(f, cfg.n_max, grid)
    worst = []
    for k in range(cfg.n_max + 1 if n is None else n + 1):
        if len(grid.pairs(k)[0]) == 0:
            break
        worst.append({"n": k, "worst_magnitude": popoviciu_test(f, k, grid).worst_magnitude})
    report.update(order=n, verdict="found" if n is not None else "not-found", per_order=worst)
    return EXIT_PASS if n is not None else EXIT_REFUTED


def cmd_fit(args, cfg: RunConfig, f: FunctionOracle, report: dict) -> int:
    if f.dim != 1:
        raise UsageError("fit needs one-variable data (use `lines` in several variables)")
    rc = RecoveryConfig(seed=cfg.seed, confirm_step=args.confirm_step)
    if isinstance(f, SampledOracle):
        rc.grid = lattice_grid(f, [infer_step(f.points)], seed=cfg.seed, tol=cfg.tol)
    else:
        rc.grid = default_grid(1, cfg.grid_size, cfg.seed, cfg.tol)
    report["confirm_step"] = args.confirm_step
    r = recover_1d(f, cfg.n_max, rc)
    report.update(recovery_json(r))
    report["verdict"] = "recovered" if isinstance(r, RecoveredExpPoly1D) else "rejected"
    return EXIT_PASS if isinstance(r, RecoveredExpPoly1D) else EXIT_REFUTED


def cmd_rado(args, cfg: RunConfig, f: FunctionOracle, report: dict) -> int:
    if not args.coeffs:
        raise UsageError("rado needs --coeffs 'a0;a1;...;an' in variables h1..hd")
    nodes = [parse_expression(t, f.dim, prefix="h") for t in args.coeffs.split(";")]
    if len(nodes) < 2:
        raise UsageError("rado needs at least two coefficients")
    if isinstance(f, SampledOracle):
        steps = lattice_steps(f)
        n = len(nodes) - 1
        ok = np.ones(len(f.points), dtype=bool)
        for h in steps:
            for k in range(1, n + 1):
                ok &= f.contains(f.points + k * h)
        xs = f.points[ok]
        if len(xs) == 0:
            raise InvalidInput("no sample has all of its translates x + k h in the table")
    else:
        g = default_grid(f.dim, cfg.grid_size, cfg.seed, cfg.tol)
        xs, steps = g.base_points, g.steps
    table = np.column_stack([evaluate_expression(nd, steps) for nd in nodes])
    r = rado_test(f, table, steps, xs, cfg.tol)
    report.update(coefficients=[to_text(nd, "h") for nd in nodes],
                  verdict="pass" if r.passed else "fail", worst_residual=r.worst_residual,
                  witness=None if r.witness is None else {"x": r.witness[0], "h": r.witness[1]})
    return EXIT_PASS if r.passed else EXIT_REFUTED


def _ball(args, dim: int):
    center = _floats(args.center, "--center") or [0.0] * dim
    if len(center) == 1 and dim > 1:
        center = center * dim
    if len(center) != dim:
        raise UsageError(f"--center needs {dim} coordinates")
    return np.array(center), args.radius


def cmd_generators(args, cfg: RunConfig, report: dict) -> int:
    dim = args.dim or 1
    center, radius = _ball(args, dim)
    g = generators_in_ball(center, radius, dim)
    budget = args.budget if args.budget is not None else 10_000
    d = density_probe(g, args.targets, args.eps, budget, cfg.seed)
    report.update(dim=dim, center=center, radius=radius, scale=g.scale, theta=g.theta,
                  generators=g.generators, eps=args.eps, budget=budget, num_targets=d.num_targets,
                  hit_rate=d.hit_rate, worst_error=d.worst_error,
                  verdict="dense" if d.hit_rate == 1.0 else "missed")
    return EXIT_PASS if d.hit_rate == 1.0 else EXIT_REFUTED


def cmd_montel(args, cfg: RunConfig, f: FunctionOracle, report: dict) -> int:
    _require_closed_form(f, "montel")
    if args.order is None:
        raise UsageError("montel needs --order")
    center, radius = _ball(args, f.dim)
    gens = generators_in_ball(center, radius, f.dim)
    size = max(cfg.grid_size, 24, 2 * args.order + 5)
    hyp = MontelHypothesis.build(gens, args.order, grid_size=size, rank_tol=cfg.tol, seed=cfg.seed)
    r = montel_verify(f, hyp)
    report.update(center=center, radius=radius, conclusion=r.conclusion, note=r.note,
                  verdict=r.conclusion, sample_grid_size=size,
                  per_generator=[{"generator": c.generator, "order": c.order, "observed_rank": c.observed_rank,
                                  "passed": c.passed, "doubled_rank": c.doubled_rank}
                                 for c in r.per_generator])
    return EXIT_PASS if r.certified else EXIT_REFUTED


def cmd_lines(args, cfg: RunConfig, f: FunctionOracle, report: dict) -> int:
    _require_closed_form(f, "lines")
    center, radius = _ball(args, f.dim)
    gens = generators_in_ball(np.zeros(f.dim), radius, f.dim).generators
    rc = RecoveryConfig(seed=cfg.seed, grid=default_grid(1, cfg.grid_size, cfg.seed, cfg.tol))
    lines, ok = [], True
    for g in gens:
        r = recover_1d(line_restriction(f, center, g), cfg.n_max, rc)
        ok &= isinstance(r, RecoveredExpPoly1D)
        lines.append({"x0": center, "direction": g, **recovery_json(r)})
    report.update(center=center, lines=lines, verdict="all-recovered" if ok else "rejected")
    return EXIT_PASS if ok else EXIT_REFUTED


def cmd_ronkin(args, cfg: RunConfig, report: dict) -> int:
    if args.expr is None:
        raise UsageError("ronkin needs --expr")
    dim = args.dim or 1
    node = parse_expression(args.expr, dim)
    try:
        form = expression_to_ronkin(node, dim)
    except NotRonkinForm as exc:
        raise UsageError(f"not a Ronkin form: {exc}") from None
    report.update(expr=to_text(node), dim=dim)
    out = ronkin_to_exppoly(form)
    if isinstance(out, RonkinRejection):
        report.update(verdict="not-exppoly", degree=out.degree, offending_terms=out.offending_terms,
                      monomial=out.monomial, witness_direction=out.witness)
        return EXIT_REFUTED
    report.update(verdict="exppoly", model=model_json(out))
    return EXIT_PASS


# --- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exprecog", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"exprecog {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, source=True):
        if source:
            src = sp.add_mutually_exclusive_group(required=True)
            src.add_argument("--expr", help="closed form in x1..xd, e.g. 'exp(x1*x2)'")
            src.add_argument("--input", help="sample file (.csv or .json)")
        sp.add_argument("--dim", type=int)
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--grid-size", type=int, default=12)
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--n-max", type=int, default=8)
        sp.add_argument("--json-out", help="write the report here instead of stdout")
        return sp

    common(sub.add_parser("check", help="Hankel determinant test at a given order")).add_argument(
        "--order", type=int)
    common(sub.add_parser("order", help="smallest order whose Hankel test passes"))
    common(sub.add_parser("fit", help="recover a one-variable model")).add_argument(
        "--confirm-step", type=float, help="second step for resolving 2*pi*i/h aliasing")
    common(sub.add_parser("rado", help="check a recurrence sum_k a_k(h) f(x+kh) = 0")).add_argument(
        "--coeffs", help="';'-separated expressions in h1..hd")
    g = common(sub.add_parser("generators", help="dense generator set in a ball + density probe"), source=False)
    g.add_argument("--center")
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--eps", type=float, default=0.02)
    g.add_argument("--budget", type=int)
    g.add_argument("--targets", type=int, default=100)
    m = common(sub.add_parser("montel", help="finite-step span-dimension verification"))
    m.add_argument("--order", type=int)
    m.add_argument("--center")
    m.add_argument("--radius", type=float, default=1.0)
    ln = common(sub.add_parser("lines", help="recover restrictions to lines through a point"))
    ln.add_argument("--center")
    ln.add_argument("--radius", type=float, default=1.0)
    common(sub.add_parser("ronkin", help="decide whether a Ronkin form is an exponential polynomial"))
    return p


def _resolve_seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def run_command(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(args.tol, args.grid_size, _resolve_seed(args), args.n_max, args.json_out)
        if args.dim is not None and args.dim < 1:
            raise UsageError("--dim must be positive")
        report = {"tool": "exprecog", "version": __version__, "command": args.command,
                  "config": {k: v for k, v in asdict(cfg).items() if k != "output"}}
        if args.command == "generators":
            code = cmd_generators(args, cfg, report)
        elif args.command == "ronkin":
            code = cmd_ronkin(args, cfg, report)
        else:
            f, source = load_function(args)
            report["source"] = source
            handler = {"check": cmd_check, "order": cmd_order, "fit": cmd_fit, "rado": cmd_rado,
                       "montel": cmd_montel, "lines": cmd_lines}[args.command]
            code = handler(args, cfg, f, report)
    except (UsageError, ExpressionError, SampleFormatError, InvalidArgument, InvalidInput,
            OracleDomainError, HypothesisViolation, DegenerateOrderError, DegenerateRootError,
            OSError) as exc:
        print(f"exprecog: error: {exc}", file=stderr)
        return EXIT_USAGE
    text = dump_report(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
