"""Triangle summary, full analysis of a solved band and its text/table renderings."""

from __future__ import annotations

import logging

import numpy as np

from src.analysis.models import (
    AnalysisReport,
    NearXValues,
    PhiLimit,
    SingularPoint,
    TriangleSummary,
)
from src.analysis.singular import (
    NoSingularPointError,
    WindowTooSmallError,
    count_w_zeros,
    find_singular_point,
    near_x_values,
    phi_limit_at_X,
    window_bounds,
)
from src.analysis.symmetry import axis_crossing, fit_symmetry_axis
from src.geometry.models import CurvatureTwistProfile, FramedCurve, ProfileError
from src.geometry.rulings import generator_field
from src.models import MaterialParams

logger = logging.getLogger(__name__)


def _line_angle(g: np.ndarray, t: np.ndarray, b: np.ndarray) -> float:
    """Angle of the line along g from b towards t, folded into (-90, 90]."""
    angle = float(np.degrees(np.arctan2(g @ t, g @ b)))
    if angle > 90.0:
        angle -= 180.0
    elif angle <= -90.0:
        angle += 180.0
    return angle


def triangle_report(
    profile: CurvatureTwistProfile,
    curve: FramedCurve,
    singular: SingularPoint | None = None,
    mask_fraction: float = 0.02,
    k_floor: float | None = None,
) -> TriangleSummary:
    """Legs of the flat region around X and how far their ruled patch leaves a plane.

    The legs are the generators at the first nodes outside the core window. The
    patch is every ruling inside the window, extended by the core half-width to
    both sides; its deviation is the largest distance from the best-fit plane.
    """
    if profile.n_nodes != curve.n_nodes:
        raise ProfileError(f"Profile has {profile.n_nodes} nodes but curve has {curve.n_nodes}")
    singular = find_singular_point(profile) if singular is None else singular
    if not singular.found:
        raise NoSingularPointError(singular.value, singular.max_value)
    n = profile.n_nodes
    left, right = window_bounds(profile, singular.s_X, mask_fraction)
    rulings = generator_field(profile, curve, k_floor)
    apex = int(round(singular.s_X / profile.h)) % n
    t_X, b_X = curve.tangents[apex], curve.binormals[apex]
    legs = (
        _line_angle(rulings.directions[left], t_X, b_X),
        _line_angle(rulings.directions[right], t_X, b_X),
    )

    span = np.arange(left, left + (right - left) % n + 1) % n
    half = max(0.5 * mask_fraction * profile.length, profile.h)
    centers = curve.positions[span]
    offsets = half * rulings.directions[span]
    patch = np.vstack([centers + offsets, centers - offsets])
    centred = patch - patch.mean(axis=0)
    _, _, vt = np.linalg.svd(centred, full_matrices=False)
    deviation = float(np.max(np.abs(centred @ vt[-1])))
    size = float(2.0 * np.max(np.linalg.norm(centred, axis=1)))
    return TriangleSummary(
        apex=singular.s_X,
        leg_angles=legs,
        flat_window=(float(profile.s[left]), float(profile.s[right])),
        deviation=deviation,
        patch_size=size,
    )


def analyze(
    profile: CurvatureTwistProfile,
    curve: FramedCurve,
    params: MaterialParams,
    mask_fraction: float = 0.02,
    window_fraction: float = 0.05,
    k_floor: float | None = None,
) -> AnalysisReport:
    """Every post-processing measure of a solved band.

    Measures that need X are left empty, with a note, when the profile has no
    singular point or the fit windows are too coarse.
    """
    singular = find_singular_point(profile)
    zeros = count_w_zeros(profile, singular, mask_fraction)
    axis = fit_symmetry_axis(curve)
    crossing = axis_crossing(curve, axis)
    notes: list[str] = []
    phi_limit: PhiLimit | None = None
    near_x: NearXValues | None = None
    triangle: TriangleSummary | None = None
    if not singular.found:
        notes.append("no singular point: min(K^2+W^2) above 1% of its maximum")
    else:
        if not singular.unique:
            notes.append(f"singular point not unique: {len(singular.candidates)} candidates")
        try:
            phi_limit = phi_limit_at_X(profile, singular, mask_fraction, window_fraction)
        except WindowTooSmallError as exc:
            notes.append(str(exc))
        near_x = near_x_values(profile, singular, params, mask_fraction, k_floor)
        triangle = triangle_report(profile, curve, singular, mask_fraction, k_floor)
    if zeros.degenerate:
        notes.append("W vanishes identically")
    if zeros.touching:
        notes.append(f"{len(zeros.touching)} touching zero(s) of W")
    if axis.degenerate:
        notes.append("symmetry axis is degenerate")
    logger.info("Analysis: s_X=%.6g found=%s W zeros=%d axis rms=%.3e",
                singular.s_X, singular.found, zeros.count, axis.rms)
    return AnalysisReport(
        length=profile.length,
        n_nodes=profile.n_nodes,
        singular=singular,
        w_zeros=zeros,
        symmetry_axis=axis,
        axis_crossing=crossing,
        phi_limit=phi_limit,
        near_x=near_x,
        triangle=triangle,
        notes=notes,
    )


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else format(float(value), ".10g")


def _vec(values: tuple[float, ...]) -> str:
    return "(" + ", ".join(format(v, ".8g") for v in values) + ")"


def report_rows(report: AnalysisReport) -> list[tuple[str, float]]:
    """Flat (quantity, value) pairs; missing measures are NaN."""
    nan = float("nan")
    sing, axis = report.singular, report.symmetry_axis
    rows: list[tuple[str, float]] = [
        ("s_X", sing.s_X),
        ("singular_found", float(sing.found)),
        ("singular_candidates", float(len(sing.candidates))),
        ("K_at_X", sing.K_at_X),
        ("W_at_X", sing.W_at_X),
        ("min_K2_W2", sing.value),
        ("max_K2_W2", sing.max_value),
        ("phi_limit_deg", report.phi_limit.value if report.phi_limit else nan),
        ("phi_limit_left_deg", report.phi_limit.left if report.phi_limit else nan),
        ("phi_limit_right_deg", report.phi_limit.right if report.phi_limit else nan),
        ("phi_limit_spread_deg", report.phi_limit.spread if report.phi_limit else nan),
        ("w_zero_count", float(report.w_zeros.count)),
        ("w_zero_total", float(report.w_zeros.total)),
        ("w_touching_count", float(len(report.w_zeros.touching))),
        ("w_degenerate", float(report.w_zeros.degenerate)),
    ]
    rows += [(f"w_zero_{i}", s) for i, s in enumerate(report.w_zeros.crossings)]
    rows += [(f"axis_point_{c}", v) for c, v in zip("xyz", axis.point, strict=True)]
    rows += [(f"axis_direction_{c}", v) for c, v in zip("xyz", axis.direction, strict=True)]
    rows += [
        ("axis_rms", axis.rms),
        ("axis_relative_rms", axis.relative_rms),
        ("axis_degenerate", float(axis.degenerate)),
        ("axis_crossing_s", report.axis_crossing.s if report.axis_crossing else nan),
        ("axis_crossing_alignment",
         report.axis_crossing.alignment if report.axis_crossing else nan),
    ]
    if report.near_x is not None:
        rows += [(f"near_x_{k}", v) for k, v in report.near_x.model_dump().items()]
    tri = report.triangle
    rows += [
        ("triangle_leg_left_deg", tri.leg_angles[0] if tri else nan),
        ("triangle_leg_right_deg", tri.leg_angles[1] if tri else nan),
        ("triangle_window_start", tri.flat_window[0] if tri else nan),
        ("triangle_window_end", tri.flat_window[1] if tri else nan),
        ("triangle_deviation", tri.deviation if tri else nan),
        ("triangle_relative_deviation", tri.relative_deviation if tri else nan),
    ]
    return rows


def render_text(report: AnalysisReport) -> str:
    sing, axis, zeros = report.singular, report.symmetry_axis, report.w_zeros
    lines = [
        f"band: n_nodes={report.n_nodes} length={_fmt(report.length)}",
        "",
        "[singular point]",
        f"  found: {sing.found}",
        f"  s_X: {_fmt(sing.s_X)}",
        f"  K_at_X: {_fmt(sing.K_at_X)}",
        f"  W_at_X: {_fmt(sing.W_at_X)}",
        f"  min(K^2+W^2) / max: {_fmt(sing.value / sing.max_value if sing.max_value else 0.0)}",
        f"  candidates: {_vec(sing.candidates)}",
        "",
        "[generator angle]",
        f"  phi_limit_deg: {_fmt(report.phi_limit_deg)}",
    ]
    if report.phi_limit is not None:
        lines.append(f"  one-sided: left={_fmt(report.phi_limit.left)} "
                     f"right={_fmt(report.phi_limit.right)} "
                     f"spread={_fmt(report.phi_limit.spread)}")
    if report.near_x is not None:
        nx = report.near_x
        lines += [
            f"  near X: phi=({_fmt(nx.phi_left)}, {_fmt(nx.phi_right)}) "
            f"Mt=({_fmt(nx.Mt_left)}, {_fmt(nx.Mt_right)})",
            f"  at X: phi={_fmt(nx.phi_at_X)} Mt={_fmt(nx.Mt_at_X)}",
        ]
    lines += [
        "",
        "[zeros of W]",
        f"  count: {'degenerate' if zeros.degenerate else zeros.count}",
        f"  total with X: {zeros.total}",
        f"  crossings: {_vec(zeros.crossings)}",
        f"  touching: {_vec(zeros.touching)}",
        "",
        "[symmetry axis]",
        f"  point: {_vec(axis.point)}",
        f"  direction: {_vec(axis.direction)}",
        f"  rms: {_fmt(axis.rms)} ({_fmt(100.0 * axis.relative_rms)}% of diameter)",
        f"  degenerate: {axis.degenerate}",
    ]
    if report.axis_crossing is not None:
        lines.append(f"  meets midline at s={_fmt(report.axis_crossing.s)} "
                     f"(|b.axis|={_fmt(report.axis_crossing.alignment)})")
    if report.triangle is not None:
        tri = report.triangle
        lines += [
            "",
            "[flat triangle]",
            f"  apex: {_fmt(tri.apex)}",
            f"  leg angles (deg): {_vec(tri.leg_angles)}",
            f"  window: {_vec(tri.flat_window)}",
            f"  deviation: {_fmt(tri.deviation)}"
            f" ({_fmt(100.0 * tri.relative_deviation)}% of patch)",
        ]
    if report.notes:
        lines += ["", "[notes]"] + [f"  - {note}" for note in report.notes]
    return "\n".join(lines) + "\n"
