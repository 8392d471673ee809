"""Command-line front end: preset runs, convergence studies, self-tests.

Exit codes: 0 success, 1 self-test failure, 2 configuration error,
3 numerical failure.  All diagnostics go to stderr; result files are
CSV plus a gnuplot script, written with full 17-digit precision so
reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import bandlu, diagnostics, expressions
from .basis import (
    MAX_SPACING,
    basis_value,
    make_mesh,
    stencil_weights,
)
from .problem import (
    MODEL_NAMES,
    BoundaryCondition,
    BoundaryPlan,
    InitialCondition,
    ParameterError,
    ProblemSetup,
    RDCoefficients,
    UnknownModelError,
    analytic_linear,
    normalize_model_name,
    preset,
)
from .stepper import SolverConfig, StepFailure, Trajectory, run

__all__ = ["RunConfig", "main", "main_script", "cmd_run", "cmd_converge",
           "cmd_selftest", "run_selftest"]

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_COEFF_KEYS = ("a1", "a2", "b1", "b2", "c1", "c2", "d1", "d2",
               "e1", "e2", "m1", "m2", "n1", "n2")


class ConfigError(ValueError):
    """Unusable run configuration."""


@dataclass
class RunConfig:
    """Declarative description of one solver invocation."""

    model: str = ""
    n: int | None = None
    dt: float | None = None
    t_end: float | None = None
    x0: float | None = None
    xn: float | None = None
    ic_u: str = ""
    ic_v: str = ""
    bc: list = field(default_factory=list)
    coefficients: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    snapshots: list | None = None
    probes: list | None = None
    out: str = "."

    def resolve(self) -> tuple[ProblemSetup, SolverConfig]:
        """Turn the configuration into solver inputs, or raise ConfigError."""
        if not self.model:
            raise ConfigError("no model selected; pass --model or a config file")
        if self.model == "custom":
            return self._resolve_custom()
        overrides = dict(self.params)
        for key in ("n", "dt", "t_end", "snapshots", "probes"):
            value = getattr(self, key)
            if value is not None:
                overrides[key] = value
        try:
            plan = preset(self.model, **overrides)
        except (UnknownModelError, ParameterError) as exc:
            raise ConfigError(str(exc)) from exc
        snapshots = plan.snapshot_times
        if self.snapshots is None:
            # Default snapshot grids assume the default horizon; keep
            # only the reachable ones when t_end shrinks.
            snapshots = tuple(t for t in snapshots if t <= plan.t_end + 1e-9)
            if not snapshots:
                snapshots = (plan.t_end,)
        config = SolverConfig(
            dt=plan.dt, t_end=plan.t_end,
            snapshot_times=snapshots, probe_points=plan.probe_points,
        )
        return plan.setup, config

    def _resolve_custom(self) -> tuple[ProblemSetup, SolverConfig]:
        missing = [name for name, value in (
            ("n", self.n), ("dt", self.dt), ("t_end", self.t_end),
            ("x0", self.x0), ("xn", self.xn),
        ) if value is None]
        if not self.ic_u:
            missing.append("ic_u")
        if not self.ic_v:
            missing.append("ic_v")
        if len(self.bc) != 8:
            raise ConfigError(
                f"custom model needs exactly 8 bc entries, got {len(self.bc)}"
            )
        if missing:
            raise ConfigError(f"custom model needs keys: {', '.join(missing)}")
        try:
            mesh = make_mesh(self.x0, self.xn, self.n)
            coeffs = RDCoefficients(**{
                k: float(v) for k, v in self.coefficients.items()
            })
            u_expr = expressions.parse(self.ic_u)
            v_expr = expressions.parse(self.ic_v)
            conditions = tuple(_parse_bc(entry) for entry in self.bc)
            boundary = BoundaryPlan(conditions)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        setup = ProblemSetup(
            coefficients=coeffs, mesh=mesh, boundary=boundary,
            initial=InitialCondition(u_init=u_expr, v_init=v_expr),
            label="custom",
        )
        config = SolverConfig(
            dt=self.dt, t_end=self.t_end,
            snapshot_times=tuple(self.snapshots or ()),
            probe_points=tuple(self.probes or ()),
        )
        return setup, config


def _parse_bc(entry: str) -> BoundaryCondition:
    parts = str(entry).split()
    if len(parts) not in (3, 4):
        raise ConfigError(
            f"bc entry {entry!r} must read 'species side order [target]'"
        )
    species, side, order = parts[0].lower(), parts[1].lower(), int(parts[2])
    target = float(parts[3]) if len(parts) == 4 else 0.0
    return BoundaryCondition(species=species, side=side, order=order,
                             target=target)


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc


def _config_from_sources(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        raw = _load_config_file(args.config)
        known = {
            "model", "n", "dt", "t_end", "x0", "xn", "ic_u", "ic_v",
            "bc", "snapshots", "probes", "out",
        }
        for key, value in raw.items():
            if key in known:
                setattr(cfg, key, value)
            elif key in _COEFF_KEYS:
                cfg.coefficients[key] = value
            else:
                cfg.params[key] = value
    if args.model:
        cfg.model = args.model
    if cfg.model and cfg.model != "custom":
        cfg.model = normalize_model_name(cfg.model)
    if args.n is not None:
        cfg.n = args.n
    if args.dt is not None:
        cfg.dt = args.dt
    if args.t_end is not None:
        cfg.t_end = args.t_end
    if args.snapshots is not None:
        cfg.snapshots = _parse_floats(args.snapshots, "--snapshots")
    if args.probes is not None:
        cfg.probes = _parse_floats(args.probes, "--probes")
    if args.out:
        cfg.out = args.out
    for item in args.param or ():
        if "=" not in item:
            raise ConfigError(f"--param needs KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        cfg.params[key.strip()] = float(value)
    if cfg.n is not None:
        cfg.n = int(cfg.n)
    for name in ("dt", "t_end", "x0", "xn"):
        value = getattr(cfg, name)
        if value is not None:
            setattr(cfg, name, float(value))
    return cfg


def _parse_floats(text: str, flag: str) -> list:
    try:
        return [float(part) for part in str(text).split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag} expects comma-separated numbers: {exc}") from exc


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_profile_csv(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("t,x,u,v\n")
        for t, x, u, v in rows:
            handle.write(f"{_fmt(t)},{_fmt(x)},{_fmt(u)},{_fmt(v)}\n")


def _write_outputs(outdir: Path, setup: ProblemSetup, config: SolverConfig,
                   traj: Trajectory, model: str) -> None:
    xs = setup.mesh.knots()
    snapshot_rows = []
    for snap in traj.snapshots:
        for x, u, v in zip(xs, snap.u, snap.v):
            snapshot_rows.append((snap.t, x, u, v))
    _write_profile_csv(outdir / "snapshots.csv", snapshot_rows)

    probe_rows = []
    probes = sorted(traj.probes, key=lambda p: p.x)
    if probes:
        for i, t in enumerate(probes[0].times):
            for series in probes:
                probe_rows.append((t, series.x, series.u[i], series.v[i]))
    _write_profile_csv(outdir / "probes.csv", probe_rows)

    (outdir / "report.txt").write_text(
        _report_text(setup, config, traj, model), encoding="utf-8"
    )
    (outdir / "plot.gp").write_text(
        _plot_script(config, bool(probe_rows)), encoding="utf-8"
    )


def _report_text(setup: ProblemSetup, config: SolverConfig,
                 traj: Trajectory, model: str) -> str:
    lines = [f"model: {model}",
             f"n: {setup.mesh.n}",
             f"dt: {_fmt(config.dt)}",
             f"t_end: {_fmt(config.t_end)}"]
    if traj.penultimate_u is not None:
        rel_u = diagnostics.relative_error(traj.penultimate_u, traj.final_u)
        rel_v = diagnostics.relative_error(traj.penultimate_v, traj.final_v)
        lines.append(f"final_step_relative_error_u: {_fmt(rel_u)}")
        lines.append(f"final_step_relative_error_v: {_fmt(rel_v)}")
    if model == "linear":
        a = -setup.coefficients.b1
        b = -setup.coefficients.c2
        d = setup.coefficients.a1
        xs = setup.mesh.knots()
        exact_u, exact_v = analytic_linear(xs, config.t_end, a, b, d)
        l2u, linfu = diagnostics.l2_linf(traj.final_u, exact_u, setup.mesh.h)
        l2v, linfv = diagnostics.l2_linf(traj.final_v, exact_v, setup.mesh.h)
        report = diagnostics.ErrorReport(
            l2_u=l2u, linf_u=linfu, l2_v=l2v, linf_v=linfv,
            n=setup.mesh.n, dt=config.dt, t=config.t_end, label=model,
        )
        lines.append(f"l2_u: {_fmt(report.l2_u)}")
        lines.append(f"linf_u: {_fmt(report.linf_u)}")
        lines.append(f"l2_v: {_fmt(report.l2_v)}")
        lines.append(f"linf_v: {_fmt(report.linf_v)}")
    for series in traj.probes:
        try:
            period = diagnostics.estimate_period(zip(series.times, series.u))
            lines.append(f"period_u_at_x={_fmt(series.x)}: {_fmt(period)}")
        except diagnostics.InsufficientPeaksError:
            lines.append(f"period_u_at_x={_fmt(series.x)}: none")
    for snap in traj.snapshots:
        span = float(snap.v.max() - snap.v.min())
        if span > 0.0:
            pulses = diagnostics.count_interior_maxima(snap.v, 0.05 * span)
        else:
            pulses = 0
        lines.append(f"pulses_v_at_t={_fmt(snap.t)}: {pulses}")
    lines.append(f"u_range: {_fmt(traj.u_range[0])} {_fmt(traj.u_range[1])}")
    lines.append(f"v_range: {_fmt(traj.v_range[0])} {_fmt(traj.v_range[1])}")
    return "\n".join(lines) + "\n"


def _plot_script(config: SolverConfig, have_probes: bool) -> str:
    lines = [
        "# gnuplot 5 script; run from this directory",
        "set datafile separator ','",
        "set key outside",
        "set xlabel 'x'",
        "set ylabel 'concentration'",
    ]
    for species, column in (("u", 3), ("v", 4)):
        terms = []
        for t in config.snapshot_times:
            terms.append(
                f"'snapshots.csv' using (abs($1-{_fmt(t)})<1e-9?$2:1/0):"
                f"{column} with lines title '{species}(t={_fmt(t)})'"
            )
        if terms:
            lines.append(f"set title 'snapshots: {species}'")
            lines.append("plot " + ", \\\n     ".join(terms))
            lines.append("pause -1 'press enter'")
    if have_probes:
        lines.append("set xlabel 't'")
        lines.append("set title 'probe series: u'")
        lines.append(
            "plot 'probes.csv' using 1:3 with lines title 'u at probes'"
        )
        lines.append("pause -1 'press enter'")
    return "\n".join(lines) + "\n"


def cmd_run(args) -> int:
    """Entry point of the `run` subcommand."""
    try:
        cfg = _config_from_sources(args)
        setup, config = cfg.resolve()
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, UnknownModelError, ParameterError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        traj = run(setup, config)
    except StepFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write_outputs(outdir, setup, config, traj, cfg.model)
    return EXIT_OK


def cmd_converge(args) -> int:
    """Entry point of the `converge` subcommand."""
    if args.model and normalize_model_name(args.model) != "linear":
        print(
            f"configuration error: convergence studies need the closed-form "
            f"solution; model {args.model!r} has none",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    try:
        dts = _parse_floats(args.dts, "--dts")
        if not dts:
            raise ConfigError("--dts needs at least one step size")
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = diagnostics.convergence_study(
            a=args.a, b=args.b, d=args.d, n=args.n, dts=dts, t_end=args.t_end
        )
    except StepFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with open(outdir / "convergence.csv", "w", encoding="utf-8") as handle:
        handle.write("dt,l2_u,linf_u,l2_v,linf_v,order_u,order_v\n")
        for row in table.rows:
            handle.write(
                ",".join(_fmt(v) for v in (
                    row.dt, row.l2_u, row.linf_u, row.l2_v, row.linf_v,
                    row.order_u, row.order_v,
                )) + "\n"
            )
    return EXIT_OK


def run_selftest(h_values, alpha_perturbation: float = 0.0,
                 stream=None) -> bool:
    """Basis and linear-algebra property checks; True when all pass.

    ``alpha_perturbation`` shifts the stencil table before the
    stencil/evaluation comparison; it exists so tests can verify that a
    corrupted table is actually caught.
    """
    stream = stream or sys.stdout
    all_ok = True

    def report(name: str, ok: bool) -> None:
        nonlocal all_ok
        print(("PASS" if ok else "FAIL") + f" {name}", file=stream)
        all_ok = all_ok and ok

    for h in h_values:
        if not 0.0 < h < MAX_SPACING:
            print(f"SKIP basis checks (h={h!r} precondition-rejected: "
                  f"admissible range is 0 < h < {MAX_SPACING:.6f})",
                  file=stream)
            continue
        mesh = make_mesh(0.0, 16.0 * h, 16)
        w = stencil_weights(h)

        worst = 0.0
        for order in range(5):
            scale = max(
                abs(basis_value(mesh, 8, mesh.knot(8) + s * h, order))
                for s in (-2.5, -1.5, -0.5, 0.5, 1.5, 2.5)
            )
            for knot in range(6, 11):
                x = mesh.knot(knot)
                left = basis_value(mesh, 8, x - 1e-13, order)
                right = basis_value(mesh, 8, x + 1e-13, order)
                worst = max(worst, abs(left - right) / max(scale, 1e-300))
        report(f"basis-continuity (h={h:g}, jump={worst:.2e})", worst <= 1e-9)

        rows = w.rows + alpha_perturbation
        worst = 0.0
        for order in range(5):
            scale = max(np.max(np.abs(w.rows[order])), 1e-300)
            for j in range(-2, 3):
                direct = basis_value(mesh, 8, mesh.knot(8 - j), order)
                worst = max(worst, abs(rows[order][j + 2] - direct) / scale)
        report(f"stencil-oracle (h={h:g}, err={worst:.2e})", worst <= 1e-12)

    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(20):
        n, kl, ku = 40, 5, 5
        a = bandlu.BandedMatrix.zeros(n, kl, ku)
        for i in range(n):
            for j in range(max(0, i - kl), min(n, i + ku + 1)):
                a.set(i, j, rng.normal())
            a.add(i, i, 12.0)
        b = rng.normal(size=n)
        x_band = bandlu.solve(bandlu.lu_factor(a), b)
        x_dense = bandlu.dense_solve(a.to_dense(), b)
        denom = max(float(np.max(np.abs(x_dense))), 1e-300)
        worst = max(worst, float(np.max(np.abs(x_band - x_dense))) / denom)
    report(f"banded-vs-dense (err={worst:.2e})", worst <= 1e-10)
    return all_ok


def cmd_selftest(args) -> int:
    """Entry point of the `selftest` subcommand."""
    try:
        h_values = _parse_floats(args.h_grid, "--h-grid")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    ok = run_selftest(h_values, alpha_perturbation=args.perturb_alpha)
    return EXIT_OK if ok else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdspline",
        description="Spline-collocation solver for 1-D reaction-diffusion systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a preset or custom model")
    p_run.add_argument("--model", help=f"one of {', '.join(MODEL_NAMES)} or custom")
    p_run.add_argument("--config", help="TOML config file")
    p_run.add_argument("--n", type=int, help="number of mesh intervals")
    p_run.add_argument("--dt", type=float, help="time step")
    p_run.add_argument("--t-end", dest="t_end", type=float, help="final time")
    p_run.add_argument("--snapshots", help="comma-separated snapshot times")
    p_run.add_argument("--probes", help="comma-separated probe locations")
    p_run.add_argument("--param", action="append",
                       help="model constant override KEY=VALUE")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("converge", help="temporal convergence study")
    p_conv.add_argument("--model", help="must be the linear model")
    p_conv.add_argument("--a", type=float, default=0.1)
    p_conv.add_argument("--b", type=float, default=0.01)
    p_conv.add_argument("--d", type=float, default=1.0)
    p_conv.add_argument("--n", type=int, default=512)
    p_conv.add_argument("--dts", default="0.005,0.01,0.02,0.04",
                        help="comma-separated step sizes")
    p_conv.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    p_conv.add_argument("--out", default=".", help="output directory")
    p_conv.set_defaults(func=cmd_converge)

    p_self = sub.add_parser("selftest", help="basis and solver property checks")
    p_self.add_argument("--h-grid", dest="h_grid", default="0.01,0.1,0.5",
                        help="comma-separated knot spacings")
    p_self.add_argument("--perturb-alpha", dest="perturb_alpha", type=float,
                        default=0.0, help=argparse.SUPPRESS)
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, matching the config-error code
        return int(exc.code) if exc.code else EXIT_OK
    return args.func(args)


def main_script() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_script()
