"""Click CLI: solve, analyze, export and validate.

Exit codes: 0 success, 1 usage/config/input error, 2 solver did not converge
(outputs are still written).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import numpy as np

from src import __version__
from src.analysis.report import analyze, render_text, report_rows
from src.analysis.singular import NoSingularPointError, WindowTooSmallError, phi_field
from src.geometry.extract import extract_profile
from src.geometry.ingest import load_centerline
from src.geometry.models import CurvatureTwistProfile, FramedCurve, InvalidFrameError, ProfileError
from src.journal.logger import JournalError, RunJournal
from src.models import MaterialParams, RunEvent, RunEventType, RunManifest
from src.solver.auglag import OuterIteration, solve
from src.solver.config import SolverConfigError, load_config
from src.solver.models import SolverConfig, SolverReport
from src.statics.fields import DegenerateFitError, SingularCurvatureError, evaluate_fields
from src.statics.residuals import residuals, window_mask
from src.tables.formats import (
    TableFormatError,
    read_curve,
    read_profile,
    write_curve,
    write_fields,
    write_key_values,
    write_plot_table,
    write_profile,
)
from src.tables.mesh import band_mesh, write_obj
from src.validation.base import ValidationSuite
from src.validation.checks import default_checks

logger = logging.getLogger(__name__)

EXIT_NOT_CONVERGED = 2

_INPUT_ERRORS = (
    SolverConfigError,
    TableFormatError,
    ProfileError,
    InvalidFrameError,
    SingularCurvatureError,
    DegenerateFitError,
    NoSingularPointError,
    WindowTooSmallError,
    JournalError,
)


class _ExitOneOnUsage:
    """Usage errors exit with 1 like every other input error."""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)  # type: ignore[misc, no-any-return]
        except click.UsageError as exc:
            exc.exit_code = 1
            raise


class BandCommand(_ExitOneOnUsage, click.Command):
    pass


class BandGroup(_ExitOneOnUsage, click.Group):
    command_class = BandCommand


@contextmanager
def _input_errors() -> Iterator[None]:
    try:
        yield
    except _INPUT_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc


def _manifest(
    command: str,
    config: dict[str, object] | None = None,
    inputs: list[str] | None = None,
    outputs: list[str] | None = None,
    seed: int | None = None,
) -> RunManifest:
    return RunManifest(
        tool_version=__version__,
        command=command,
        config=config or {},
        inputs=inputs or [],
        outputs=outputs or [],
        seed=seed,
    )


def _journal(ctx: click.Context) -> RunJournal | None:
    journal: RunJournal | None = ctx.obj.get("journal")
    return journal


def _log(ctx: click.Context, event: RunEvent) -> None:
    journal = _journal(ctx)
    if journal is not None:
        with _input_errors():
            journal.log(event)


def _load_run(
    run: str | None, profile_path: str | None, curve_path: str | None
) -> tuple[CurvatureTwistProfile, FramedCurve, list[str]]:
    if run is not None:
        profile_path = profile_path or str(Path(run) / "profile.csv")
        curve_path = curve_path or str(Path(run) / "curve.csv")
    if profile_path is None or curve_path is None:
        raise click.ClickException("give --run DIR or both --profile and --curve")
    profile = read_profile(profile_path)
    curve = read_curve(curve_path)
    if profile.n_nodes != curve.n_nodes:
        raise ProfileError(
            f"{profile_path} has {profile.n_nodes} nodes but {curve_path} has {curve.n_nodes}"
        )
    return profile, curve, [profile_path, curve_path]


@click.group(cls=BandGroup)
@click.option("--journal", default=None, help="Append hash-chained run events to this file.")
@click.option("-v", "--verbose", count=True, help="More log output (repeatable).")
@click.version_option(__version__, prog_name="moebius-band")
@click.pass_context
def cli(ctx: click.Context, journal: str | None, verbose: int) -> None:
    """Equilibrium shapes of inextensible elastic Moebius bands."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    ctx.ensure_object(dict)
    with _input_errors():
        ctx.obj["journal"] = RunJournal.from_env(journal) if journal else None


@cli.command("solve")
@click.option("--config", "config_path", default=None, help="key=value config file.")
@click.option("--n", "n_nodes", type=int, default=None, help="Number of grid nodes.")
@click.option("--length", type=float, default=None, help="Band length L.")
@click.option("--A", "A", type=float, default=None, help="Bending stiffness A.")
@click.option("--init", "init_mode", default=None,
              type=click.Choice(["analytic-moebius", "perturbed-circle", "from-file"]),
              help="Initial profile.")
@click.option("--init-file", default=None, help="Profile table for --init from-file.")
@click.option("--seed", type=int, default=None, help="Seed of the perturbed circle.")
@click.option("--orientable", is_flag=True, default=False,
              help="Close without the half twist.")
@click.option("--clamp-twist", is_flag=True, default=False, help="Hold W at zero.")
@click.option("--jacobian", default=None, type=click.Choice(["adjoint", "finite_difference"]))
@click.option("--max-outer", "max_outer_iter", type=int, default=None)
@click.option("--out", default="run", show_default=True, help="Output directory.")
@click.option("--checkpoint", default=None, help="Profile table rewritten every outer iteration.")
@click.pass_context
def solve_cmd(
    ctx: click.Context,
    config_path: str | None,
    n_nodes: int | None,
    length: float | None,
    A: float | None,
    init_mode: str | None,
    init_file: str | None,
    seed: int | None,
    orientable: bool,
    clamp_twist: bool,
    jacobian: str | None,
    max_outer_iter: int | None,
    out: str,
    checkpoint: str | None,
) -> None:
    """Relax a band to equilibrium and write profile.csv, curve.csv and report.txt."""
    with _input_errors():
        config = load_config(
            config_path,
            n_nodes=n_nodes,
            length=length,
            A=A,
            init_mode=init_mode,
            init_file=init_file,
            seed=seed,
            moebius=False if orientable else None,
            clamp_twist=True if clamp_twist else None,
            jacobian=jacobian,
            max_outer_iter=max_outer_iter,
        )
    outputs = ["profile.csv", "curve.csv", "report.txt"]
    inputs = [p for p in (config_path, config.init_file) if p]
    manifest = _manifest("solve", config.echo(), inputs, outputs, config.seed)
    header = manifest.header_lines()
    journal = _journal(ctx)

    on_checkpoint = _checkpoint_writer(ctx, checkpoint, header) if checkpoint else None
    with _input_errors():
        profile, curve, report = solve(config, checkpoint=on_checkpoint, journal=journal)
        out_dir = Path(out)
        write_profile(out_dir / "profile.csv", profile, header)
        write_curve(out_dir / "curve.csv", curve, header)
        _write_report(out_dir / "report.txt", header, config, report)

    for line in report.summary_lines():
        click.echo(line)
    if not report.converged:
        click.echo(f"Solver did not converge: {report.message}", err=True)
        ctx.exit(EXIT_NOT_CONVERGED)


def _checkpoint_writer(
    ctx: click.Context, path: str, header: list[str]
) -> Callable[[OuterIteration], None]:
    def write(it: OuterIteration) -> None:
        write_profile(path, it.profile, header + [f"# outer_iteration: {it.index}"])
        _log(ctx, RunEvent(
            event_type=RunEventType.CHECKPOINT_WRITTEN,
            action="solve",
            result="progress",
            details={"path": path, "index": it.index},
        ))

    return write


def _write_report(
    path: Path, header: list[str], config: SolverConfig, report: SolverReport
) -> None:
    lines = list(header)
    lines += report.summary_lines()
    lines.append(f"closure_target: {'half_twist' if config.moebius else 'orientable'}")
    lines.append("multipliers: " + ", ".join(format(v, ".17g") for v in report.multipliers))
    lines.append("")
    lines.append("outer,energy,constraint_norm,mu,inner_iterations")
    for k, (e, c, mu) in enumerate(
        zip(report.energy_history, report.constraint_history, report.mu_history, strict=True)
    ):
        inner = len(report.inner_histories[k]) - 1
        lines.append(f"{k},{e:.17g},{c:.17g},{mu:.17g},{inner}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def _centerline_run(centerline: str, n_nodes: int) -> tuple[CurvatureTwistProfile, FramedCurve]:
    curve = load_centerline(centerline, n_nodes)
    return extract_profile(curve), curve


@cli.command("analyze")
@click.option("--run", default=None, help="Directory holding profile.csv and curve.csv.")
@click.option("--profile", "profile_path", default=None, help="Profile table.")
@click.option("--curve", "curve_path", default=None, help="Curve table.")
@click.option("--centerline", default=None, help="External x y z centerline instead of a run.")
@click.option("--n", "n_nodes", type=int, default=256, show_default=True,
              help="Resampling size for --centerline.")
@click.option("--A", "A", type=float, default=1.0, show_default=True)
@click.option("--epsilon", type=float, default=0.0, show_default=True,
              help="Regularization of the field formulas (0: curvature floor).")
@click.option("--mask-fraction", type=float, default=0.02, show_default=True)
@click.option("--out", default=None, help="Output directory (default: the run directory).")
@click.pass_context
def analyze_cmd(
    ctx: click.Context,
    run: str | None,
    profile_path: str | None,
    curve_path: str | None,
    centerline: str | None,
    n_nodes: int,
    A: float,
    epsilon: float,
    mask_fraction: float,
    out: str | None,
) -> None:
    """Static fields, residuals and the singular-point/symmetry analysis."""
    with _input_errors():
        if centerline is not None:
            profile, curve = _centerline_run(centerline, n_nodes)
            inputs = [centerline]
        else:
            profile, curve, inputs = _load_run(run, profile_path, curve_path)
        if not (A > 0.0 and epsilon >= 0.0):
            raise click.ClickException("--A must be > 0 and --epsilon ≥ 0")
        params = MaterialParams(A=A, epsilon=epsilon)
        report = analyze(profile, curve, params, mask_fraction=mask_fraction)
        mask = (
            window_mask(profile, report.s_X, mask_fraction) if report.singular.found else None
        )
        fields = evaluate_fields(profile, params, regularized=True, mask=mask)
        res = residuals(profile, fields, mask)

    out_dir = Path(out or run or ".")
    outputs = ["fields.csv", "analysis.txt", "analysis.csv", "residuals.csv"]
    header = _manifest(
        "analyze", {"A": A, "epsilon": epsilon, "mask_fraction": mask_fraction}, inputs, outputs
    ).header_lines()
    write_fields(out_dir / "fields.csv", profile, phi_field(profile, signed=True), fields, res,
                 header)
    (out_dir / "analysis.txt").write_text("\n".join(header) + "\n" + render_text(report))
    write_key_values(out_dir / "analysis.csv", report_rows(report), header)
    rows = [("C", fields.C), ("epsilon", fields.epsilon),
            ("masked_nodes", float(np.sum(~res.mask)))]
    for name, norm in res.norms.items():
        rows += [(f"{name}_max", norm.max), (f"{name}_rms", norm.rms)]
    write_key_values(out_dir / "residuals.csv", rows, header)

    click.echo(render_text(report), nl=False)
    worst, value = res.worst()
    click.echo(f"worst residual: {worst} {value:.3e}")
    _log(ctx, RunEvent(
        event_type=RunEventType.ANALYSIS_COMPLETED,
        action="analyze",
        result="success",
        details={"s_X": report.s_X, "found": report.singular.found,
                 "w_zeros": report.w_zeros.count, "axis_rms": report.symmetry_axis.rms},
    ))


@cli.command("export")
@click.option("--run", default=None, help="Directory holding profile.csv and curve.csv.")
@click.option("--profile", "profile_path", default=None)
@click.option("--curve", "curve_path", default=None)
@click.option("--width", type=float, default=None,
              help="Display band width (default 0.05 L / 2 pi).")
@click.option("--out", default=None, help="Output directory (default: the run directory).")
@click.pass_context
def export_cmd(
    ctx: click.Context,
    run: str | None,
    profile_path: str | None,
    curve_path: str | None,
    width: float | None,
    out: str | None,
) -> None:
    """Write band.obj and the k.csv, w.csv, phi.csv plot tables."""
    with _input_errors():
        profile, curve, inputs = _load_run(run, profile_path, curve_path)
    w = 0.05 * profile.length / (2.0 * math.pi) if width is None else width
    if not w > 0.0:
        raise click.ClickException(f"--width must be > 0, got {w}")

    out_dir = Path(out or run or ".")
    outputs = ["band.obj", "k.csv", "w.csv", "phi.csv"]
    header = _manifest("export", {"width": w}, inputs, outputs).header_lines()
    mesh = band_mesh(curve, profile, w)
    write_obj(out_dir / "band.obj", mesh, header)
    K_L = profile.seam_sign * float(profile.K[0])
    W_L = float(profile.W[0])
    phi_L = math.degrees(math.atan2(W_L, K_L)) if (K_L or W_L) else math.nan
    write_plot_table(out_dir / "k.csv", profile, "K", profile.K, header, closing=K_L)
    write_plot_table(out_dir / "w.csv", profile, "W", profile.W, header)
    write_plot_table(
        out_dir / "phi.csv", profile, "phi", phi_field(profile, signed=True), header, closing=phi_L
    )

    click.echo(f"band.obj: {mesh.vertices.shape[0]} vertices, {mesh.faces.shape[0]} faces, "
               f"{'one-sided' if mesh.crosswise else 'two-sided'}")
    _log(ctx, RunEvent(
        event_type=RunEventType.EXPORT_COMPLETED,
        action="export",
        result="success",
        details={"width": w, "crosswise": mesh.crosswise},
    ))


@cli.command("validate")
@click.option("--quick", is_flag=True, help="Fast subset only.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def validate_cmd(ctx: click.Context, quick: bool, seed: int) -> None:
    """Run the self-test battery; exit 0 only if every check passes."""
    with _input_errors():
        suite = ValidationSuite(default_checks(), journal=_journal(ctx), seed=seed)
        results = suite.run(quick=quick)
    for result in results:
        click.echo(result.line())
    failed = [r for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        ctx.exit(1)


def main() -> None:
    cli(prog_name="moebius-band")
