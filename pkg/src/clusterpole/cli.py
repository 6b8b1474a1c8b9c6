"""Experiment runner: reproducible sweeps, CSV artifacts, gnuplot scripts.

Every invocation builds an :class:`ExperimentManifest` from its arguments,
runs it, and saves the manifest next to the artifacts; ``clusterpole replay
manifest.json`` reruns one and reproduces byte-identical CSV output. Exit
codes: 2 unknown subcommand / bad usage, 3 invalid parameters, 4 I/O failure,
1 failed ``--check``.

Sweeps over n run in a thread pool; the environment variable ``CR_THREADS``
caps the worker count. Output assembly is ordered by n regardless of
scheduling.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import approximants, clustering, fitting, lightning, potential, quadrature
from .core import build_graded_grid, fit_grid, fit_rate, report_grid, sup_error, write_csv

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BAD_PARAMS = 3
EXIT_IO = 4

FAMILIES = ("newman", "trap", "stenger", "ls", "lawson")


@dataclass
class ExperimentManifest:
    """What ran and where its artifacts went; replayable."""

    name: str
    subcommand: str
    parameters: dict
    outputs: list = field(default_factory=list)
    seed: int | None = None

    def save(self, out_dir: Path) -> Path:
        path = out_dir / f"{self.name}.manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _max_workers() -> int:
    cap = os.environ.get("CR_THREADS", "").strip()
    workers = min(4, os.cpu_count() or 1)
    if cap:
        workers = max(1, min(workers, int(cap)))
    return workers


def _map_ordered(fn, items):
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        return list(pool.map(fn, items))


def _gnuplot_script(path: Path, csvs, title: str, ylabel: str = "error"):
    lines = [
        "set logscale y",
        f'set title "{title}"',
        'set xlabel "sqrt(n)"',
        f'set ylabel "{ylabel}"',
        "set datafile separator ','",
        "plot \\",
    ]
    plots = [
        f"  '{name}' using (sqrt($1)):2 skip 1 with linespoints title '{label}'"
        for name, label in csvs
    ]
    lines.append(", \\\n".join(plots))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# experiment bodies (each returns (outputs, check_ok or None))
# ---------------------------------------------------------------------------

def _family_error(family: str, n: int, grid, fine):
    f = np.sqrt
    if family == "newman":
        r = approximants.newman(n, "classic")
        return sup_error(f, lambda x: approximants.evaluate(r, x), fine).norm_inf
    if family == "trap":
        return sup_error(f, lambda x: approximants.trapezoidal_sqrt_direct(x, n), fine).norm_inf
    if family == "stenger":
        r = approximants.stenger_interpolant(f, n)
        return sup_error(f, lambda x: approximants.evaluate(r, x), fine).norm_inf
    poles = clustering.uniform_poles(n, np.pi / np.sqrt(n))
    problem = fitting.FitProblem(f=f, poles=poles, grid=grid)
    if family == "ls":
        res = fitting.least_squares_fit(problem)
    else:
        res = fitting.lawson_minimax_fit(problem)
    return sup_error(f, lambda x: approximants.evaluate(res.approximant, x), fine).norm_inf


def exp_approx_sweep(params: dict, out_dir: Path, csv_only: bool):
    family = params["family"]
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    nmax = int(params["nmax"])
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    grid, fine = fit_grid(), report_grid()
    ns = list(range(1, nmax + 1))
    errs = _map_ordered(lambda n: _family_error(family, n, grid, fine), ns)
    csv = out_dir / f"approx_sweep_{family}.csv"
    write_csv(csv, ["n", "sup_error"], zip(ns, errs))
    outputs = [csv.name]
    if not csv_only:
        gp = out_dir / f"approx_sweep_{family}.gp"
        _gnuplot_script(gp, [(csv.name, family)], f"sup error, {family}")
        outputs.append(gp.name)
    return outputs, None


def _fig12_errors(kind: str, ns, grid, fine):
    def one(n):
        if kind == "uniform":
            poles = clustering.uniform_poles(n, np.pi / np.sqrt(n))
        else:
            poles = clustering.tapered_poles(n, np.sqrt(2.0) * np.pi)
        res = fitting.lawson_minimax_fit(
            fitting.FitProblem(f=np.sqrt, poles=poles, grid=grid)
        )
        return sup_error(
            np.sqrt, lambda x: approximants.evaluate(res.approximant, x), fine
        ).norm_inf

    return _map_ordered(one, ns)


def exp_fig12(params: dict, out_dir: Path, csv_only: bool):
    nmax = int(params["nmax"])
    if nmax < 4:
        raise ValueError("nmax must be >= 4")
    ns = list(range(2, nmax + 1, 2))
    grid, fine = fit_grid(), report_grid()
    outputs = []
    slopes = {}
    errors = {}
    for kind in ("uniform", "tapered"):
        errs = _fig12_errors(kind, ns, grid, fine)
        errors[kind] = errs
        csv = out_dir / f"fig12_{kind}.csv"
        write_csv(csv, ["n", "sup_error"], zip(ns, errs))
        outputs.append(csv.name)
        slopes[kind] = fit_rate(list(zip(ns, errs)), axis="sqrt_n").slope
    if not csv_only:
        gp = out_dir / "fig12.gp"
        _gnuplot_script(
            gp,
            [("fig12_uniform.csv", "uniform"), ("fig12_tapered.csv", "tapered")],
            "linear minimax with preassigned poles",
        )
        outputs.append(gp.name)
    ratio = slopes["tapered"] ** 2 / slopes["uniform"] ** 2
    dominance = all(
        t < u for n, t, u in zip(ns, errors["tapered"], errors["uniform"]) if n >= 16
    )
    check_ok = bool(1.6 <= ratio <= 2.4 and dominance)
    summary = out_dir / "fig12_summary.json"
    with open(summary, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "slope2_uniform": slopes["uniform"] ** 2,
                "slope2_tapered": slopes["tapered"] ** 2,
                "slope2_ratio": ratio,
                "tapered_below_uniform_from_16": dominance,
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    outputs.append(summary.name)
    return outputs, check_ok


def exp_cluster_dump(params: dict, out_dir: Path, csv_only: bool):
    kind = params["kind"]
    n = int(params["n"])
    if kind == "uniform":
        pole_set = clustering.uniform_poles(n, float(params.get("spacing") or np.pi / np.sqrt(n)))
    elif kind == "tapered":
        pole_set = clustering.tapered_poles(n, float(params.get("sigma") or np.sqrt(2.0) * np.pi))
    elif kind == "lightning":
        pole_set = clustering.lightning_poles(n, float(params.get("sigma") or 4.0))
    else:
        raise ValueError(f"kind must be uniform, tapered, or lightning, got {kind!r}")
    d = pole_set.distances
    k = np.arange(1, len(d) + 1)
    csv = out_dir / f"cluster_{kind}.csv"
    write_csv(csv, ["k", "d_k", "sqrt_k", "log_d_k"],
              zip(k, d, np.sqrt(k.astype(float)), np.log(d)))
    return [csv.name], None


def exp_phi_curves(params: dict, out_dir: Path, csv_only: bool):
    n = int(params.get("n") or 10)
    poles = clustering.tapered_poles(n, np.sqrt(2.0) * np.pi)
    grid = fit_grid()
    res = fitting.lawson_minimax_fit(fitting.FitProblem(f=np.sqrt, poles=poles, grid=grid))
    es = res.error_curve.es
    sign_flips = np.where(np.sign(es[:-1]) * np.sign(es[1:]) < 0)[0]
    nodes = np.sqrt(grid.points[sign_flips] * grid.points[sign_flips + 1])
    cfg = potential.PointConfiguration(
        interp_points=nodes.astype(complex), poles=poles.poles.astype(complex)
    )
    e_pts = grid.points[10::37].astype(complex)
    log_e = potential.log_abs_phi(cfg, e_pts)
    csv_e = out_dir / "phi_on_E.csv"
    write_csv(csv_e, ["x", "log_abs_phi"], zip(e_pts.real, log_e))
    d = poles.distances
    mids = -np.sqrt(d[:-1] * d[1:])
    log_g = potential.log_abs_phi(cfg, mids.astype(complex))
    csv_g = out_dir / "phi_on_gamma.csv"
    write_csv(csv_g, ["t", "log_abs_phi"], zip(mids, log_g))
    return [csv_e.name, csv_g.name], None


def exp_strip(params: dict, out_dir: Path, csv_only: bool):
    alpha = float(params.get("alpha") or 0.5)
    n = int(params.get("n") or 50)
    log10_eps = float(params.get("log10_eps") or -20.0 / np.log(10.0))
    model = potential.StripModel(alpha=alpha, n=n, epsilon=10.0**log10_eps)
    rows = []
    for X in np.linspace(2.0, -model.log_eps - 2.0, 25):
        for y in np.linspace(0.2, np.pi - 0.2, 9):
            s = complex(model.log_eps + X, y)
            rows.append((X, y,
                         potential.strip_potential_exact(model, s),
                         potential.strip_potential_bilinear(model, s)))
    csv = out_dir / "strip_potential.csv"
    write_csv(csv, ["x_minus_log_eps", "y", "u_exact", "u_bilinear"], rows)
    return [csv.name], None


_INTEGRANDS = {
    "sqrt1px": (lambda x: np.sqrt(1.0 + x), 4.0 * np.sqrt(2.0) / 3.0),
}


def exp_quad_sweep(params: dict, out_dir: Path, csv_only: bool):
    kind = params["kind"].replace("-", "_")
    nmax = int(params["nmax"])
    name = params.get("integrand") or "sqrt1px"
    if name not in _INTEGRANDS:
        raise ValueError(f"integrand must be one of {sorted(_INTEGRANDS)}, got {name!r}")
    f, I = _INTEGRANDS[name]
    ns = list(range(1, nmax + 1))
    errs = [abs(quadrature.integrate(quadrature.build_rule(kind, n), f) - I) for n in ns]
    csv = out_dir / f"quad_sweep_{kind}.csv"
    write_csv(csv, ["n", "abs_error"], zip(ns, errs))
    outputs = [csv.name]
    if not csv_only:
        gp = out_dir / f"quad_sweep_{kind}.gp"
        _gnuplot_script(gp, [(csv.name, kind)], f"quadrature error, {name}")
        outputs.append(gp.name)
    check_ok = None
    if params.get("check"):
        if kind == "tanh":
            pos = [(n, e) for n, e in zip(ns, errs) if e > 0 and n >= 4]
            slope = fit_rate(pos, axis="sqrt_n").slope
            check_ok = bool(abs(slope + np.pi) <= 0.2 * np.pi)
        else:
            check_ok = bool(errs[-1] <= 1e-12)
    return outputs, check_ok


def exp_quad_nodes(params: dict, out_dir: Path, csv_only: bool):
    kind = params["kind"].replace("-", "_")
    n = int(params["n"])
    rule = quadrature.build_rule(kind, n)
    d = quadrature.endpoint_distances(rule)
    k = np.arange(1, len(d) + 1)
    csv = out_dir / f"quad_nodes_{kind}.csv"
    write_csv(csv, ["k", "distance"], zip(k, d))
    return [csv.name], None


def exp_quad_gtm(params: dict, out_dir: Path, csv_only: bool):
    n = int(params.get("n") or 40)
    pts, _ = potential.graded_segment(-2.0, -1.0, -1.0, count=2000)
    outputs = []
    for kind in ("tanh", "tanh_sinh"):
        rule = quadrature.build_rule(kind, n)
        vals = np.abs(quadrature.characteristic_phi(pts) - quadrature.rule_rational(rule, pts))
        csv = out_dir / f"gtm_{kind}.csv"
        write_csv(csv, ["t", "abs_phi_minus_r"], zip(pts, vals))
        outputs.append(csv.name)
    return outputs, None


_BOUNDARY_DATA = {
    "logabs": lambda z0: (lambda z: np.log(np.abs(z - z0))),
    "rez2": lambda z0: (lambda z: (z**2).real),
}


def _read_polygon(path: str) -> lightning.PolygonDomain:
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    return lightning.PolygonDomain(rows[:, 0] + 1j * rows[:, 1])


def exp_lightning_solve(params: dict, out_dir: Path, csv_only: bool):
    if params.get("polygon"):
        domain = _read_polygon(params["polygon"])
    elif params.get("shape") == "lshape":
        domain = lightning.lshape_polygon()
    else:
        domain = lightning.snowflake_polygon()
    data = params.get("data") or "logabs"
    if data not in _BOUNDARY_DATA:
        raise ValueError(f"data must be one of {sorted(_BOUNDARY_DATA)}, got {data!r}")
    z0 = complex(params.get("z0") or 0.0)
    g = _BOUNDARY_DATA[data](z0)
    target = float(params.get("target") or 1e-6)
    rows = []
    best = None
    for n_per in (8, 16, 24, 32, 40, 48):
        degree = int(round(np.sqrt(domain.n_corners * n_per)))
        basis = lightning.build_basis(domain, n_per, degree)
        sol = lightning.solve(domain, basis, g)
        rows.append((sol.dof, sol.boundary_residual))
        if best is None or sol.boundary_residual < best[0].boundary_residual:
            best = (sol, basis)
        if sol.boundary_residual <= target:
            break
    sol, basis = best
    conv_csv = out_dir / "lightning_convergence.csv"
    write_csv(conv_csv, ["dof", "boundary_residual"], rows)
    poles_csv = out_dir / "lightning_poles.csv"
    write_csv(poles_csv, ["re", "im"], zip(basis.poles.real, basis.poles.imag))
    lo = min(v.real for v in domain.vertices), min(v.imag for v in domain.vertices)
    hi = max(v.real for v in domain.vertices), max(v.imag for v in domain.vertices)
    xs = np.linspace(lo[0], hi[0], 60)
    ys = np.linspace(lo[1], hi[1], 60)
    zz = (xs[None, :] + 1j * ys[:, None]).ravel()
    inside = basis.domain.contains(zz)
    vals = np.full(zz.shape, np.nan)
    if inside.any():
        vals[inside] = lightning.evaluate_solution(sol, basis, zz[inside])
    grid_csv = out_dir / "lightning_interior.csv"
    write_csv(grid_csv, ["re", "im", "u"], zip(zz.real, zz.imag, vals))
    summary = out_dir / "lightning_summary.json"
    with open(summary, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "dof": sol.dof,
                "boundary_residual": sol.boundary_residual,
                "samples": sol.samples_used,
                "target": target,
                "reached_target": bool(sol.boundary_residual <= target),
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    outputs = [conv_csv.name, poles_csv.name, grid_csv.name, summary.name]
    check_ok = bool(sol.boundary_residual <= target) if params.get("check") else None
    return outputs, check_ok


def exp_fig1(params: dict, out_dir: Path, csv_only: bool):
    outputs = []
    nmax = int(params.get("nmax") or 20)
    for family in FAMILIES:
        out, _ = exp_approx_sweep({"family": family, "nmax": nmax}, out_dir, True)
        outputs.extend(out)
    if not csv_only:
        gp = out_dir / "fig1.gp"
        _gnuplot_script(
            gp,
            [(f"approx_sweep_{f}.csv", f) for f in FAMILIES],
            "rational approximation of sqrt(x)",
        )
        outputs.append(gp.name)
    return outputs, None


def exp_fig6(params: dict, out_dir: Path, csv_only: bool):
    n = int(params.get("n") or 20)
    outputs = []
    for kind in ("uniform", "tapered", "lightning"):
        out, _ = exp_cluster_dump({"kind": kind, "n": n}, out_dir, csv_only)
        outputs.extend(out)
    return outputs, None


def exp_fig13(params: dict, out_dir: Path, csv_only: bool):
    outputs = []
    nmax = int(params.get("nmax") or 40)
    for kind in ("tanh", "tanh_sinh"):
        out, _ = exp_quad_sweep({"kind": kind, "nmax": nmax}, out_dir, csv_only)
        outputs.extend(out)
        out, _ = exp_quad_nodes({"kind": kind, "n": nmax}, out_dir, csv_only)
        outputs.extend(out)
    return outputs, None


EXPERIMENTS = {
    "approx sweep": exp_approx_sweep,
    "approx fig12": exp_fig12,
    "cluster dump": exp_cluster_dump,
    "potential phi-curves": exp_phi_curves,
    "potential strip": exp_strip,
    "quad sweep": exp_quad_sweep,
    "quad nodes": exp_quad_nodes,
    "quad gtm": exp_quad_gtm,
    "lightning solve": exp_lightning_solve,
    "fig1": exp_fig1,
    "fig6": exp_fig6,
    "fig10": exp_phi_curves,
    "fig12": exp_fig12,
    "fig13": exp_fig13,
    "fig14": exp_quad_gtm,
    "fig4": exp_lightning_solve,
}


def run(manifest: ExperimentManifest, out_dir: Path):
    """Execute a manifest; returns (exit_status, manifest with outputs)."""
    body = EXPERIMENTS.get(manifest.subcommand)
    if body is None:
        raise ValueError(f"unknown subcommand {manifest.subcommand!r}")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_only = bool(manifest.parameters.get("csv_only"))
    outputs, check_ok = body(manifest.parameters, out_dir, csv_only)
    manifest.outputs = sorted(outputs)
    manifest.save(out_dir)
    if manifest.parameters.get("check") and check_ok is False:
        return EXIT_CHECK_FAILED, manifest
    return 0, manifest


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--check", action="store_true",
                   help="exit nonzero if the experiment's acceptance check fails")
    p.add_argument("--csv-only", action="store_true", help="skip gnuplot scripts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterpole",
        description="Clustered-pole rational approximation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="rational approximants of sqrt(x)")
    ap = p.add_subparsers(dest="subcommand", required=True)
    sweep = ap.add_parser("sweep", help="(n, sup_error) sweep for one family")
    sweep.add_argument("--family", required=True, choices=FAMILIES)
    sweep.add_argument("--nmax", type=int, default=20)
    _add_common(sweep)
    fig12 = ap.add_parser("fig12", help="uniform vs tapered linear-minimax sweep")
    fig12.add_argument("--nmax", type=int, default=50)
    _add_common(fig12)

    p = sub.add_parser("cluster", help="clustered pole sets")
    cp = p.add_subparsers(dest="subcommand", required=True)
    dump = cp.add_parser("dump", help="(k, d_k, sqrt k, log d_k) table")
    dump.add_argument("--kind", required=True, choices=("uniform", "tapered", "lightning"))
    dump.add_argument("--n", type=int, required=True)
    dump.add_argument("--sigma", type=float, help="tapering rate (tapered/lightning)")
    dump.add_argument("--spacing", type=float, help="log spacing h (uniform)")
    _add_common(dump)

    p = sub.add_parser("potential", help="potential-theory diagnostics")
    pp = p.add_subparsers(dest="subcommand", required=True)
    curves = pp.add_parser("phi-curves", help="|phi| along E and along [-1, 0]")
    curves.add_argument("--n", type=int, default=10)
    _add_common(curves)
    strip = pp.add_parser("strip", help="exact vs bilinear strip potential")
    strip.add_argument("--alpha", type=float, default=0.5)
    strip.add_argument("--n", type=int, default=50)
    strip.add_argument("--log10-eps", type=float, dest="log10_eps",
                       default=-20.0 / np.log(10.0))
    _add_common(strip)

    p = sub.add_parser("quad", help="tanh / tanh-sinh quadrature")
    qp = p.add_subparsers(dest="subcommand", required=True)
    qs = qp.add_parser("sweep", help="(n, |I_n - I|) sweep")
    qs.add_argument("--kind", required=True, choices=("tanh", "tanh-sinh", "tanh_sinh"))
    qs.add_argument("--nmax", type=int, default=40)
    qs.add_argument("--integrand", default="sqrt1px", choices=sorted(_INTEGRANDS))
    _add_common(qs)
    qn = qp.add_parser("nodes", help="(k, endpoint distance) table")
    qn.add_argument("--kind", required=True, choices=("tanh", "tanh-sinh", "tanh_sinh"))
    qn.add_argument("--n", type=int, default=40)
    _add_common(qn)
    qg = qp.add_parser("gtm", help="|phi - r| over [-2, -1]")
    qg.add_argument("--n", type=int, default=40)
    _add_common(qg)

    p = sub.add_parser("lightning", help="Laplace solver on polygons")
    lp = p.add_subparsers(dest="subcommand", required=True)
    ls = lp.add_parser("solve", help="solve a Dirichlet problem")
    ls.add_argument("--polygon", help="CSV file, one 'x,y' vertex per line, counterclockwise")
    ls.add_argument("--shape", choices=("snowflake", "lshape"), default="snowflake",
                    help="built-in domain when --polygon is not given")
    ls.add_argument("--data", default="logabs", choices=sorted(_BOUNDARY_DATA))
    ls.add_argument("--z0", default="0", help="reference point for logabs data")
    ls.add_argument("--target", type=float, default=1e-6)
    _add_common(ls)

    for fig, helptext in (
        ("fig1", "sup-error sweeps for all approximant families"),
        ("fig6", "clustered distance tables"),
        ("fig10", "|phi| curves for a minimax-like configuration"),
        ("fig12", "uniform vs tapered linear-minimax sweep"),
        ("fig13", "quadrature error sweeps and node distances"),
        ("fig14", "|phi - r| profiles over [-2, -1]"),
        ("fig4", "lightning solve on the snowflake"),
    ):
        fp = sub.add_parser(fig, help=helptext)
        fp.add_argument("--nmax", type=int, default=None)
        fp.add_argument("--n", type=int, default=None)
        if fig == "fig4":
            fp.add_argument("--target", type=float, default=1e-6)
        _add_common(fp)

    rp = sub.add_parser("replay", help="re-run a saved manifest")
    rp.add_argument("manifest", help="path to a .manifest.json file")
    rp.add_argument("--out", default=None, help="override output directory")
    return parser


def _manifest_from_args(args) -> tuple:
    sub = getattr(args, "subcommand", None)
    subcommand = f"{args.command} {sub}" if sub else args.command
    skip = {"command", "subcommand", "out"}
    params = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    name = subcommand.replace(" ", "_").replace("-", "_")
    return ExperimentManifest(name=name, subcommand=subcommand, parameters=params), Path(args.out or "out")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            with open(args.manifest, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            manifest = ExperimentManifest(
                name=data["name"], subcommand=data["subcommand"],
                parameters=data["parameters"], seed=data.get("seed"),
            )
            out_dir = Path(args.out) if args.out else Path(args.manifest).parent
            status, _ = run(manifest, out_dir)
            return status
        manifest, out_dir = _manifest_from_args(args)
        status, _ = run(manifest, out_dir)
        return status
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
