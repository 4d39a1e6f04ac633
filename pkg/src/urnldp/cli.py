"""Command line entry point: ``urnldp <subcommand> ...``.

Curves are written as CSV and reports as JSON, with floats at 17 significant
digits.  Every artifact starts with a provenance header (tool version and
the echoed configuration); wall time goes to stderr so that identical runs
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import __version__
from .cgf import bernoulli_cgf, linear_cgf_with_slope, rate_phi_curve, solve_cgf
from .contacts import find_contacts, support_membership
from .errors import NumericalError, UrnError, UrnSpecError, UrnValidationError
from .exact import psi_n, terminal_distribution
from .rate import Trajectory, action_S, entropy_J, rate_I
from .simulate import empirical_terminal
from .trajectories import zero_cost_boundary, zero_cost_interior
from .urn import BagchiPalMatrix, bagchi_pal_to_linear, inverse_design, linear_to_bagchi_pal, load_urn


@dataclass
class RunConfig:
    subcommand: str
    urn: str | None = None
    params: dict = field(default_factory=dict)
    out: str = "-"
    seed: int | None = None


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _json_float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _provenance(config: RunConfig) -> dict:
    return {"tool": "urnldp", "version": __version__, "config": _clean(asdict(config))}


def _write(config: RunConfig, text: str) -> None:
    if config.out == "-":
        sys.stdout.write(text)
    else:
        with open(config.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def emit_csv(config: RunConfig, header: list[str], rows) -> None:
    buf = io.StringIO()
    buf.write(f"# urnldp {__version__}\n")
    buf.write("# config: " + json.dumps(_provenance(config)["config"], sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    _write(config, buf.getvalue())


def emit_json(config: RunConfig, result: dict) -> None:
    doc = {"provenance": _provenance(config), "result": result}
    text = json.dumps(_round17(_clean(doc)), indent=2, sort_keys=True) + "\n"
    _write(config, text)


def _round17(obj):
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round17(v) for v in obj]
    if isinstance(obj, float):
        return float(format(obj, ".17g"))
    return obj


def parse_range(text: str) -> np.ndarray:
    """``lo:hi:steps`` to an inclusive grid of ``steps`` points; a comma list is taken as is."""
    if ":" not in text:
        try:
            return np.array([float(v) for v in text.split(",")])
        except ValueError:
            raise UrnSpecError(f"expected lo:hi:steps or a comma list, got {text!r}")
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UrnSpecError(f"expected lo:hi:steps, got {text!r}")
    if steps < 1:
        raise UrnSpecError(f"steps must be >= 1 in {text!r}")
    return np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])


def parse_init(text: str | None):
    if text is None or text == "uniform":
        return "uniform"
    try:
        m, x = (int(v) for v in text.split(","))
    except ValueError:
        raise UrnSpecError(f"expected --init m,X or 'uniform', got {text!r}")
    return (m, x)


def _ints(text: str, count: int, flag: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",")]
    except ValueError:
        raise UrnSpecError(f"{flag}: expected {count} comma-separated integers, got {text!r}")
    if len(values) != count:
        raise UrnSpecError(f"{flag}: expected {count} values, got {len(values)}")
    return values


# -- subcommands ----------------------------------------------------------------

def cmd_classify(args, config):
    u = load_urn(args.urn)
    analysis = find_contacts(u, eps_eq=args.eps, grid_n=args.grid)
    report = analysis.to_dict()
    for i, contact in enumerate(report["contacts"]):
        contact["support"] = support_membership(u, analysis, i)
    emit_json(config, report)


def cmd_dist(args, config):
    u = load_urn(args.urn)
    dist = terminal_distribution(u, args.n, parse_init(args.init))
    p = dist.p
    emit_csv(config, ["k", "log_p", "p"], ((k, dist.log_p[k], p[k]) for k in range(args.n + 1)))


def cmd_psi_n(args, config):
    u = load_urn(args.urn)
    lam = parse_range(args.lambda_grid)
    dist = terminal_distribution(u, args.n, parse_init(args.init))
    values = np.atleast_1d(psi_n(dist, lam))
    emit_csv(config, ["lambda", "psi_n"], zip(lam, values))


def cmd_simulate(args, config):
    u = load_urn(args.urn)
    counts = empirical_terminal(u, args.n, args.trials, args.seed, parse_init(args.init))
    freq = counts / counts.sum()
    emit_csv(config, ["k", "count", "frequency"], ((k, counts[k], freq[k]) for k in range(args.n + 1)))


def _read_table(path: str, columns: int) -> tuple[np.ndarray, list[str] | None]:
    """Numeric CSV rows (comment lines skipped) and the header names, if any."""
    rows, header = [], None
    try:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = [p.strip() for p in line.split(",")]
                try:
                    rows.append([float(v) for v in parts])
                except ValueError:
                    if rows or header is not None:
                        raise
                    header = parts
    except OSError as exc:
        raise UrnSpecError(f"cannot read {path}: {exc}")
    except ValueError as exc:
        raise UrnSpecError(f"{path}: non-numeric entry ({exc})")
    try:
        table = np.array(rows, dtype=float)
    except ValueError:
        raise UrnSpecError(f"{path}: rows have different lengths")
    if table.ndim != 2 or table.shape[1] < columns:
        raise UrnSpecError(f"{path}: expected at least {columns} numeric columns")
    return table, header


def _column(table: np.ndarray, header: list[str] | None, name: str, default: int) -> np.ndarray:
    if header is not None and name in header:
        return table[:, header.index(name)]
    return table[:, default]


def cmd_rate(args, config):
    u = load_urn(args.urn)
    table, header = _read_table(args.trajectory, 2)
    traj = Trajectory(_column(table, header, "tau", 0), _column(table, header, "phi", 1))
    emit_json(config, {"J": entropy_J(traj), "S": action_S(u, traj), "I": rate_I(u, traj)})


def _boundary_interval(analysis, s: float) -> int:
    i = analysis.interval_index(s)
    if i is not None and analysis.interval_signs[i] != 0:
        return i
    for j, a in enumerate(analysis.interval_signs):
        lo, hi = analysis.intervals[j]
        if a != 0 and hi > lo and abs(analysis.stable_end(j) - s) < 1e-9:
            if 0 < j < len(analysis.intervals) - 1:
                return j
    raise UrnValidationError("boundary family", [f"s={s} is not in, or the stable end of, an interior K interval"])


def cmd_trajectory(args, config):
    u = load_urn(args.urn)
    analysis = find_contacts(u)
    if args.t is None:
        traj = zero_cost_interior(u, analysis, args.s, nodes=args.nodes)
    else:
        traj = zero_cost_boundary(u, analysis, _boundary_interval(analysis, args.s), args.t, nodes=args.nodes)
    grid, values = traj.curve.grid, traj.curve.values
    emit_csv(config, ["tau", "u", "phi"], zip(grid, traj.u, values))


def cmd_cgf(args, config):
    u = load_urn(args.urn)
    lam = parse_range(args.lambda_grid)
    if args.method == "dp":
        dist = terminal_distribution(u, args.n)
        values = np.atleast_1d(psi_n(dist, lam))
        emit_csv(config, ["lambda", "psi", "dpsi"], ((l, v, None) for l, v in zip(lam, values)))
        return
    rows = {}
    if args.method == "closed":
        if u.kind == "constant":
            p = float(u.params["p"])
            for l in lam:
                psi = bernoulli_cgf(p, l)
                rows[float(l)] = (psi, p * math.exp(l - psi))
        elif u.kind == "linear":
            a, b = float(u.params["a"]), float(u.params["b"])
            for l in lam:
                rows[float(l)] = (0.0, None) if l == 0 else linear_cgf_with_slope(a, b, float(l))
        else:
            raise UrnValidationError("closed-form CGF", [f"only constant and linear urns have one (got {u.kind})"])
    else:
        analysis = find_contacts(u)
        for side in (1, -1):
            chosen = lam[lam * side > 0]
            if chosen.size:
                curve = solve_cgf(u, analysis, side, lambdas=chosen)
                for l, p, d in zip(curve.lambdas, curve.psi, curve.dpsi):
                    rows[float(l)] = (p, d)
    emit_csv(config, ["lambda", "psi", "dpsi"],
             ((l, *rows.get(float(l), (0.0, None))) for l in lam))


def cmd_phi(args, config):
    u = load_urn(args.urn)
    analysis = find_contacts(u)
    grid = parse_range(args.s_grid)
    extra = [c for c in (analysis.inf_contact, analysis.sup_contact) if grid[0] <= c <= grid[-1]]
    grid = np.unique(np.concatenate([grid, extra]))
    values = rate_phi_curve(u, grid, analysis)
    emit_csv(config, ["s", "phi", "method", "uncertainty"], ((v.s, v.value, v.method, v.uncertainty) for v in values))


def cmd_bagchi_pal(args, config):
    if args.matrix is not None:
        a11, a12, a21, a22 = _ints(args.matrix, 4, "--matrix")
        matrix = BagchiPalMatrix(a11, a12, a21, a22, args.B0, args.W0)
    else:
        if args.s0 is None or args.b is None or args.M is None:
            raise UrnSpecError("bagchi-pal needs --matrix or all of --s0, --b, --M")
        matrix = linear_to_bagchi_pal(args.s0, args.b, args.M, args.B0, args.W0)
    corr = bagchi_pal_to_linear(matrix)
    s0, b = corr.exact()
    emit_json(config, {
        "matrix": [[matrix.a11, matrix.a12], [matrix.a21, matrix.a22]],
        "B0": matrix.B0, "W0": matrix.W0, "M": matrix.M,
        "s0": None if s0 is None else str(s0), "b": str(b),
        "s0_float": corr.s0, "b_float": corr.b, "intercept": corr.intercept,
        "polya": corr.polya, "tenability_issues": matrix.tenability(),
        "urn": corr.urn().to_spec(),
    })


def cmd_invert_design(args, config):
    table, header = _read_table(args.f, 2)
    s, f = _column(table, header, "s", 0), _column(table, header, "f", 1)
    order = np.argsort(s)
    s, f = s[order], f[order]
    if s[0] != 0.0 or s[-1] != 1.0:
        raise UrnValidationError("invert-design table", ["s must cover [0, 1] with both end points"])
    spline = CubicSpline(s, f)
    urn = inverse_design(lambda x: spline(x), grid=args.grid, df=lambda x: spline(x, 1), strict=not args.lenient)
    points = [[float(a), float(b)] for a, b in urn.params["points"]]
    doc = {"kind": "tabulated", "points": points, "rule": "linear"}
    report = urn.params["_report"]
    print(f"endpoint gaps: {report.gap0:.3g}, {report.gap1:.3g}", file=sys.stderr)
    emit_json(config, {"urn": doc})


COMMANDS = {
    "classify": cmd_classify,
    "dist": cmd_dist,
    "psi-n": cmd_psi_n,
    "simulate": cmd_simulate,
    "rate": cmd_rate,
    "trajectory": cmd_trajectory,
    "cgf": cmd_cgf,
    "phi": cmd_phi,
    "bagchi-pal": cmd_bagchi_pal,
    "invert-design": cmd_invert_design,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UrnSpecError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="urnldp", description="Large deviations for generalised two-colour urns.")
    parser.add_argument("--version", action="version", version=f"urnldp {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def command(name, help_text, urn=True):
        p = sub.add_parser(name, help=help_text)
        if urn:
            p.add_argument("--urn", required=True, help="path to a spec file or an inline spec")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        return p

    p = command("classify", "contacts, K intervals and reachable interval (JSON)")
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--eps", type=float, default=1e-10)

    p = command("dist", "exact terminal law (CSV)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--init")

    p = command("psi-n", "finite-n CGF from the exact law (CSV)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda-grid", required=True)
    p.add_argument("--init")

    p = command("simulate", "Monte Carlo histogram of the terminal count (CSV)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--init")

    p = command("rate", "J, S and I of a trajectory given as tau,phi CSV (JSON)")
    p.add_argument("--trajectory", required=True)

    p = command("trajectory", "zero-cost trajectory (CSV)")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--nodes", type=int, default=10_001)

    p = command("cgf", "limit CGF by ODE, closed form or exact finite-n law (CSV)")
    p.add_argument("--method", choices=("ode", "closed", "dp"), default="ode")
    p.add_argument("--lambda", dest="lambda_grid", required=True)
    p.add_argument("--n", type=int, default=4000, help="horizon for --method dp")

    p = command("phi", "terminal rate function (CSV)")
    p.add_argument("--s-grid", required=True)

    p = command("bagchi-pal", "Bagchi-Pal matrix <-> linear urn (JSON)", urn=False)
    p.add_argument("--matrix", help="a11,a12,a21,a22")
    p.add_argument("--s0", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--M", type=int)
    p.add_argument("--B0", type=int, default=1)
    p.add_argument("--W0", type=int, default=1)

    p = command("invert-design", "urn whose rate function is a tabulated f (JSON urn spec)", urn=False)
    p.add_argument("--f", required=True, help="CSV with columns s,f covering [0, 1]")
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--lenient", action="store_true", help="do not fail on endpoint inconsistency")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k not in ("subcommand", "urn", "out", "seed")}
    return RunConfig(args.subcommand, getattr(args, "urn", None), params, args.out, getattr(args, "seed", None))


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--flag -1,2`` into ``--flag=-1,2`` so argparse does not read the value as an option."""
    out = []
    for token in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and len(token) > 1 \
                and token[0] == "-" and (token[1].isdigit() or token[1] == "."):
            out[-1] = out[-1] + "=" + token
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    start = time.perf_counter()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        config = make_config(args)
        COMMANDS[args.subcommand](args, config)
    except UrnError as exc:
        kind = {UrnSpecError: "parse", UrnValidationError: "validation", NumericalError: "numeric"}.get(type(exc), "error")
        print(f"urnldp: {kind} error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(f"urnldp: done in {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return 0
