"""``design`` command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain/feasibility error (including a
failed ``verify``), 3 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields

from . import designs as dz
from .criteria import Criterion, CriterionEvaluator, SelectionSet, verify_lambda
from .errors import (
    DesignDataError,
    DesignError,
    DesignParseError,
    DomainError,
)
from .harmonics import ModelSpec
from .rounding import round_design

COMMANDS = ("build", "verify", "criteria", "round")
CONSTRUCTS = ("circle", "torus", "mimura", "bajnok", "grid", "project", "product", "haar", "tetrahedral", "icosahedron")
CSV_COLUMNS = ["criterion", "param", "value", "reference_value", "efficiency", "feasible"]
EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _opt(flag, help, **kw):
    return field(default=kw.pop("default", None), metadata={"flag": flag, "help": help, **kw})


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation. ``to_argv`` gives the canonical flag list."""

    command: str = "build"
    manifold: str | None = _opt("--manifold", "circle, torus, s2, s3, so3 or s2xso3")
    truncation: str | None = _opt("--truncation", "max level: '1', or comma list for torus/s2xso3")
    construct: str | None = _opt("--construct", "constructor: " + ", ".join(CONSTRUCTS))
    input: str | None = _opt("--input", "design file (text or .json)")
    a: str | None = _opt("--a", "first product factor file (s2)")
    b: str | None = _opt("--b", "second product factor file (so3)")
    n_points: int | None = _opt("--points", "circle point count", type=int)
    counts: str | None = _opt("--counts", "comma-separated grid counts")
    t: int = _opt("--t", "interval design strength (bajnok)", type=int, default=2)
    n1: int = _opt("--n1", "nodes of the w_1 interval design", type=int, default=2)
    n2: int = _opt("--n2", "nodes of the w_2 interval design", type=int, default=2)
    circle_points: int = _opt("--circle-points", "polygon size in the bajnok composition", type=int, default=3)
    count: int = _opt("--count", "Haar sample size", type=int, default=100)
    reference: str = _opt("--reference", "reference design file, or 'haar' for M = I", default="haar")
    levels: str | None = _opt("--levels", "selected level positions, e.g. 0,1,2 (default: all)")
    p: tuple = _opt("--p", "p value or range lo..hi:step (hi excluded); repeatable", default=(), multi=True)
    es: tuple = _opt("--es", "s value or inclusive range lo..hi; repeatable", default=(), multi=True)
    max_level: int | None = _opt("--max-level", "highest level checked by verify", type=int)
    n: int | None = _opt("--n", "sample size for round", type=int)
    out: str | None = _opt("--out", "output path (default stdout)")
    format: str | None = _opt("--format", "text, json or csv")
    seed: int = _opt("--seed", "random seed", type=int, default=0)
    beta_convention: str = _opt("--beta-convention", "endpoints, midpoint or leftOpen", default=dz.DEFAULT_GRID_CONVENTION)

    def to_argv(self) -> list[str]:
        argv = [self.command]
        for f in fields(self)[1:]:
            val = getattr(self, f.name)
            if val == f.default:
                continue
            if f.metadata.get("multi"):
                for v in val:
                    argv.append(f"{f.metadata['flag']}={v}")
            else:
                argv.append(f"{f.metadata['flag']}={val}")
        return argv

    @classmethod
    def from_argv(cls, argv) -> "RunConfig":
        return config_from_namespace(build_parser().parse_args(argv))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    for f in fields(RunConfig)[1:]:
        md = f.metadata
        kw = {"dest": f.name, "help": md["help"], "default": argparse.SUPPRESS}
        if md.get("multi"):
            kw["action"] = "append"
        elif "type" in md:
            kw["type"] = md["type"]
        common.add_argument(md["flag"], **kw)
    parser = _Parser(prog="design", description=__doc__.splitlines()[0].strip("`"))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("build", parents=[common], help="construct a design and write it")
    sub.add_parser("verify", parents=[common], help="check the lambda-design property level by level")
    sub.add_parser("criteria", parents=[common], help="criterion values and efficiencies as CSV")
    sub.add_parser("round", parents=[common], help="efficient rounding to sample size --n")
    return parser


def config_from_namespace(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(ns, "config", None):
        try:
            with open(ns.config) as fh:
                values = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DesignDataError(f"{ns.config}: {exc}") from None
        unknown = set(values) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for f in fields(RunConfig)[1:]:
        if hasattr(ns, f.name):
            values[f.name] = getattr(ns, f.name)
    values["command"] = ns.command
    for key in ("p", "es"):
        if key in values:
            values[key] = tuple(str(v) for v in values[key])
    return RunConfig(**values)


# -- argument helpers ---------------------------------------------------------


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except (AttributeError, ValueError):
        raise UsageError(f"{what} must be a comma-separated list of integers") from None


def model_from_config(cfg: RunConfig) -> ModelSpec:
    if cfg.manifold is None or cfg.truncation is None:
        raise UsageError("--manifold and --truncation are required")
    tr = _ints(cfg.truncation, "--truncation")
    if cfg.manifold in ("torus", "s2xso3"):
        return ModelSpec(cfg.manifold, tr)
    if len(tr) != 1:
        raise UsageError(f"{cfg.manifold} truncation is a single integer")
    return ModelSpec(cfg.manifold, tr[0])


def p_values(spec: str) -> list[float]:
    """``-inf``, a number, or ``lo..hi:step`` with ``hi`` excluded."""
    spec = spec.strip()
    if ".." not in spec:
        return [float(spec)]
    lo, rest = spec.split("..", 1)
    hi, _, step = rest.partition(":")
    lo, hi, step = float(lo), float(hi), float(step or 1)
    if step <= 0:
        raise UsageError("p step must be positive")
    count = math.ceil((hi - lo) / step - 1e-9)
    return [round(lo + k * step, 12) for k in range(max(count, 0))]


def es_values(spec: str) -> list[int]:
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(spec)]


def criteria_from_config(cfg: RunConfig) -> list[Criterion]:
    out = []
    try:
        for spec in cfg.p:
            out += [Criterion("p", v) for v in p_values(spec)]
        for spec in cfg.es:
            out += [Criterion("Es", v) for v in es_values(spec)]
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise UsageError(f"bad criterion range: {exc}") from None
    if not out:
        out = [Criterion("p", 0.0), Criterion("p", -1.0), Criterion("p", -math.inf)]
    return out


# -- design sources -------------------------------------------------------------


def design_from_config(cfg: RunConfig) -> dz.Design:
    if cfg.construct is None:
        if cfg.input is None:
            raise UsageError("need --input or --construct")
        return dz.load_design(cfg.input, cfg.manifold)
    c, m = cfg.construct, cfg.manifold
    if c == "circle":
        if cfg.n_points is None:
            raise UsageError("circle needs --points")
        return dz.circle_design(cfg.n_points)
    if c == "torus":
        return dz.torus_grid(_ints(cfg.counts, "--counts"))
    if c == "mimura":
        return dz.mimura_tight_2design()
    if c == "tetrahedral":
        return dz.binary_tetrahedral_design()
    if c == "icosahedron":
        return dz.icosahedron_design()
    if c == "bajnok":
        c1 = dz.interval_t_design(1, cfg.t, cfg.n1, seed=cfg.seed)
        c2 = dz.interval_t_design(2, cfg.t, cfg.n2, seed=cfg.seed)
        return dz.bajnok_s3_design(c1, c2, cfg.circle_points)
    if c == "grid":
        counts = _ints(cfg.counts, "--counts")
        want = {"s2": 2, "so3": 3, "s2xso3": 5}.get(m)
        if want is None or len(counts) != want:
            raise UsageError("grid needs --manifold s2 (2 counts), so3 (3) or s2xso3 (5)")
        if m == "s2":
            return dz.sphere2_grid(*counts, cfg.beta_convention)
        if m == "so3":
            return dz.euler_grid(*counts, cfg.beta_convention)
        return dz.product_design(
            dz.sphere2_grid(*counts[:2], cfg.beta_convention), dz.euler_grid(*counts[2:], cfg.beta_convention)
        )
    if c == "project":
        if cfg.input is None:
            raise UsageError("project needs --input (an s3 design)")
        return dz.project_su2_to_so3(dz.load_design(cfg.input, "s3"))
    if c == "product":
        if cfg.a is None or cfg.b is None:
            raise UsageError("product needs --a (s2 design) and --b (so3 design)")
        return dz.product_design(dz.load_design(cfg.a, "s2"), dz.load_design(cfg.b, "so3"))
    if c == "haar":
        if m is None:
            raise UsageError("haar needs --manifold")
        dim = len(_ints(cfg.truncation, "--truncation")) if m == "torus" and cfg.truncation else 2
        return dz.haar_sample(m, cfg.count, cfg.seed, torus_dim=dim)
    raise UsageError(f"unknown construct {c!r}; choose from {', '.join(CONSTRUCTS)}")


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _design_text(d: dz.Design, fmt: str | None, out: str | None) -> str:
    fmt = fmt or ("json" if (out and out.endswith(".json")) or not d.is_equal_weight else "text")
    if fmt == "json":
        return json.dumps(dz.design_to_json(d), indent=1) + "\n"
    if fmt != "text":
        raise UsageError(f"designs are written as text or json, not {fmt}")
    if not d.is_equal_weight:
        raise DomainError("text format holds equal-weight designs only; use --format json")
    return dz.format_points(d.points)


# -- commands ------------------------------------------------------------------------


def cmd_build(cfg: RunConfig) -> int:
    d = design_from_config(cfg)
    text = _design_text(d, cfg.format, cfg.out)
    _emit(text, cfg.out)
    if cfg.out is not None:
        print(f"{len(d)} points on {d.manifold} -> {cfg.out}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    d = design_from_config(cfg)
    if cfg.truncation is None and cfg.max_level is not None:
        cfg = dataclasses.replace(cfg, truncation=str(cfg.max_level))
    model = model_from_config(dataclasses.replace(cfg, manifold=cfg.manifold or d.manifold))
    rep = verify_lambda(d, model, cfg.max_level)
    for key, res in rep.level_residuals.items():
        print(f"level {key}: max residual {res:.3e}")
    print(f"{'PASS' if rep.passed else 'FAIL'} max residual {rep.max_residual:.3e} (tol {rep.tol:.0e})")
    return EXIT_OK if rep.passed else EXIT_DOMAIN


def _g12(x: float) -> str:
    return format(x, ".12g")


def criteria_rows(cfg: RunConfig) -> list[dict]:
    model = model_from_config(cfg)
    d = design_from_config(cfg)
    sel = SelectionSet(model, _ints(cfg.levels, "--levels")) if cfg.levels else None
    ref = None if cfg.reference == "haar" else dz.load_design(cfg.reference, model.manifold)
    num = CriterionEvaluator(d, model, sel)
    den = CriterionEvaluator(ref, model, sel)
    rows = []
    for crit in criteria_from_config(cfg):
        r = den.evaluate(crit)
        if not r.feasible or r.value <= 0:
            raise DomainError(f"reference design is infeasible for {crit}")
        v = num.evaluate(crit)
        rows.append(
            {
                "criterion": crit.kind,
                "param": crit.param_text,
                "value": _g12(v.value),
                "reference_value": _g12(r.value),
                "efficiency": _g12(v.value / r.value),
                "feasible": "true" if v.feasible else "false",
            }
        )
    return rows


def cmd_criteria(cfg: RunConfig) -> int:
    rows = criteria_rows(cfg)
    if cfg.format == "json":
        text = json.dumps(rows, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_round(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise UsageError("round needs --n")
    d = design_from_config(cfg)
    exact, app = round_design(d, cfg.n)
    for pt, cnt in zip(d.points, app.counts):
        print(" ".join(format(x, ".12g") for x in pt), cnt)
    if cfg.out is not None:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(_design_text(exact, cfg.format or "json", cfg.out))
    return EXIT_OK


HANDLERS = {"build": cmd_build, "verify": cmd_verify, "criteria": cmd_criteria, "round": cmd_round}


def main(argv=None) -> int:
    try:
        cfg = RunConfig.from_argv(sys.argv[1:] if argv is None else argv)
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DesignParseError, DesignDataError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DesignError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
