"""Distortion functionals over quadrature grids.

``mean_distortion`` integrates a gauged pointwise distortion against either
the uniform density or the conformally natural ``1/|w|^2`` density (polar
grids only).  ``deficit`` compares a candidate map against a reference spiral
stretch on the same grid, so the quadrature bias largely cancels.
``conformal_transfer_check`` verifies the chart identity that moves the
weighted annulus integral to an unweighted rectangle integral.

Grids must honor a map's break set: integrating a map whose derivative jumps
inside a cell is refused rather than silently degraded.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnsupportedVariantError
from .gauges import ConvexGauge
from .geometry import QuadratureGrid, RectangleDomain, integrate
from .maps import (
    LinearStretch,
    MapFamily,
    PiecewiseLinearStretch,
    PiecewiseRadialStretch,
    SpiralStretch,
)

__all__ = [
    "Density",
    "DistortionSample",
    "DeficitResult",
    "MeanDistortionResult",
    "TransferCheckResult",
    "conformal_transfer_check",
    "deficit",
    "distortion_many",
    "l1_distance",
    "mean_distortion",
    "pointwise_analysis",
]


class Density(enum.Enum):
    """Integration density: uniform area or ``1/|w|^2`` (polar grids only)."""

    UNIFORM = "uniform"
    INVERSE_SQUARE = "invsq"

    @classmethod
    def parse(cls, token: str) -> "Density":
        tok = token.strip().lower()
        for member in cls:
            if member.value == tok:
                return member
        raise InputError(f"unknown density token {token!r}")


@dataclass(frozen=True)
class DistortionSample:
    """Pointwise first-order data of a map at one point."""

    point: complex
    fz: complex
    fzb: complex
    mu: complex
    distortion: float
    jacobian: float
    degenerate: bool


def pointwise_analysis(family: MapFamily, z: complex) -> DistortionSample:
    """Evaluate the Wirtinger pair and derived quantities at one point.

    The distortion is ``(|f_z| + |f_zbar|) / (|f_z| - |f_zbar|)`` where the
    map is orientation-preserving; at degenerate points (``|f_zbar| >=
    |f_z|``) it is reported as 1.0 with the ``degenerate`` flag set.
    """
    fz, fzb = family.wirtinger(complex(z))
    afz, afzb = abs(fz), abs(fzb)
    jac = afz * afz - afzb * afzb
    degenerate = afzb >= afz
    dist = 1.0 if degenerate else (afz + afzb) / (afz - afzb)
    mu = fzb / fz if fz != 0 else complex("nan")
    return DistortionSample(
        point=complex(z),
        fz=fz,
        fzb=fzb,
        mu=mu,
        distortion=float(dist),
        jacobian=float(jac),
        degenerate=bool(degenerate),
    )


def _wirtinger_chunked(
    family: MapFamily, pts: np.ndarray, threads: int
) -> tuple[np.ndarray, np.ndarray]:
    threads = max(1, int(threads))
    if threads == 1 or pts.shape[0] < 4 * threads:
        return family.wirtinger_many(pts)
    chunks = np.array_split(pts, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(family.wirtinger_many, chunks))
    fz = np.concatenate([p[0] for p in parts])
    fzb = np.concatenate([p[1] for p in parts])
    return fz, fzb


def distortion_many(
    family: MapFamily, pts: np.ndarray, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized distortion: returns ``(K, degenerate_mask)`` arrays."""
    fz, fzb = _wirtinger_chunked(family, np.asarray(pts, dtype=np.complex128), threads)
    afz = np.abs(fz)
    afzb = np.abs(fzb)
    den = afz - afzb
    degenerate = den <= 0.0
    K = np.where(degenerate, 1.0, (afz + afzb) / np.where(degenerate, 1.0, den))
    return K, degenerate


def _check_breaks_honored(family: MapFamily, grid: QuadratureGrid) -> None:
    if grid.coordinate_kind == "polar":
        breaks = family.break_radii()
    else:
        breaks = family.break_abscissae()
    for b in breaks:
        if np.min(np.abs(grid.primary_edges - b)) > 1e-12:
            raise InputError(
                f"grid does not honor the mandatory break at {b!r}; rebuild it "
                f"with this break in its partition"
            )


@dataclass(frozen=True)
class MeanDistortionResult:
    """Value and diagnostics of a gauged mean-distortion integral."""

    value: float
    gauge: ConvexGauge
    density: Density
    cell_count: int
    degenerate_cells: int
    warning: str | None


def mean_distortion(
    family: MapFamily,
    gauge: ConvexGauge,
    grid: QuadratureGrid,
    density: Density = Density.UNIFORM,
    threads: int = 1,
) -> MeanDistortionResult:
    """Integrate ``phi(K(., family))`` over the grid against a density."""
    if density is Density.INVERSE_SQUARE and grid.coordinate_kind != "polar":
        raise InputError("inverse-square density requires a polar grid")
    _check_breaks_honored(family, grid)
    K, degenerate = distortion_many(family, grid.centers, threads)
    values = np.asarray(gauge.evaluate(K), dtype=np.float64)
    if density is Density.INVERSE_SQUARE:
        values = values / np.abs(grid.centers) ** 2
    value = integrate(grid, values)
    n_deg = int(np.count_nonzero(degenerate))
    warning = None
    if n_deg > 0.01 * grid.n_cells:
        warning = (
            f"{n_deg} of {grid.n_cells} cells are orientation-degenerate; "
            "the mean distortion there was clamped to the identity value"
        )
    return MeanDistortionResult(
        value=float(value),
        gauge=gauge,
        density=density,
        cell_count=grid.n_cells,
        degenerate_cells=n_deg,
        warning=warning,
    )


@dataclass(frozen=True)
class DeficitResult:
    """Relative gauged excess of a candidate over the reference stretch."""

    value: float
    numerator: float
    denominator: float
    below_tolerance: bool


def deficit(
    candidate: MapFamily,
    reference: SpiralStretch,
    gauge: ConvexGauge,
    grid: QuadratureGrid,
    threads: int = 1,
) -> DeficitResult:
    """``(I[candidate] - I[reference]) / I[reference]`` on one shared grid.

    ``I`` is the mean distortion against the ``1/|w|^2`` density.  Both terms
    use the same quadrature rule, so the leading discretization bias cancels
    in the difference.  ``below_tolerance`` flags values below ``-1e-8`` — a
    candidate that beats the reference by more than rounding, which for a
    correctly posed experiment signals a modeling error (or a genuinely
    non-convex gauge).
    """
    if not isinstance(reference, SpiralStretch) or reference.winding != 0:
        raise InputError("reference must be a SpiralStretch with winding 0")
    num_cand = mean_distortion(
        candidate, gauge, grid, Density.INVERSE_SQUARE, threads
    ).value
    num_ref = mean_distortion(
        reference, gauge, grid, Density.INVERSE_SQUARE, threads
    ).value
    if num_ref == 0.0:
        raise InputError("reference mean distortion is zero; deficit undefined")
    value = (num_cand - num_ref) / num_ref
    return DeficitResult(
        value=float(value),
        numerator=float(num_cand - num_ref),
        denominator=float(num_ref),
        below_tolerance=bool(value < -1e-8),
    )


def l1_distance(
    a: MapFamily, b: MapFamily, grid: QuadratureGrid, threads: int = 1
) -> float:
    """``integral |a - b|`` over the grid (uniform density)."""
    va = a.eval_many(grid.centers)
    vb = b.eval_many(grid.centers)
    return integrate(grid, np.abs(va - vb))


@dataclass(frozen=True)
class TransferCheckResult:
    """Both sides of the chart identity and their relative gap."""

    annulus_value: float
    rectangle_value: float
    rel_gap: float


def conformal_transfer_check(
    g: MapFamily,
    f: MapFamily,
    gauge: ConvexGauge,
    annulus_grid: QuadratureGrid,
    rectangle_grid: QuadratureGrid,
    threads: int = 1,
) -> TransferCheckResult:
    """Check ``integral phi(K(., g)) / |w|^2 == 4*pi^2 * integral phi(K(., f))``.

    The left side lives on the annulus ``[q, 1]``; the right side lives on the
    rectangle ``[0, ell] x [0, 1]`` with ``ell = log(1/q) / (2*pi)``, the
    conformal chart of the annulus.  The identity holds when ``f`` is the
    chart-side twin of ``g`` — the supported pairs are (spiral stretch, linear
    stretch with matching shear) and (piecewise radial stretch, piecewise
    linear stretch on the unit square, which requires ``ell = 1``).
    """
    if not math.isclose(
        annulus_grid.domain.inner_radius, g.q, rel_tol=1e-12
    ):
        raise InputError("annulus grid inner radius does not match the map's q")
    ell = math.log(1.0 / g.q) / (2.0 * math.pi)
    dom = rectangle_grid.domain
    if not isinstance(dom, RectangleDomain):
        raise InputError("rectangle_grid must cover a RectangleDomain")
    if not (
        math.isclose(dom.width, ell, rel_tol=1e-12)
        and math.isclose(dom.height, 1.0, rel_tol=1e-12)
    ):
        raise InputError(
            f"rectangle grid must cover [0, {ell!r}] x [0, 1] for q = {g.q!r}"
        )
    if isinstance(g, SpiralStretch) and isinstance(f, LinearStretch):
        if not math.isclose(f.k, g.k, rel_tol=1e-12):
            raise InputError("stretch exponents k of the pair must match")
        expected_n = -(g.theta + 2.0 * math.pi * g.winding) / (2.0 * math.pi * ell)
        if abs(f.n - expected_n) > 1e-12 * max(1.0, abs(expected_n)):
            raise InputError(
                f"shear n = {f.n!r} does not match the chart twin of the spiral "
                f"stretch (expected {expected_n!r})"
            )
    elif isinstance(g, PiecewiseRadialStretch) and isinstance(
        f, PiecewiseLinearStretch
    ):
        if not math.isclose(f.k, g.k, rel_tol=1e-12):
            raise InputError("stretch exponents k of the pair must match")
        if not math.isclose(f.eps, g.eps, rel_tol=1e-12):
            raise InputError("perturbation sizes eps of the pair must match")
        if not math.isclose(ell, 1.0, rel_tol=1e-12):
            raise InputError(
                "q must equal exp(-2*pi) for the unit-square piecewise family"
            )
    else:
        raise UnsupportedVariantError(
            "unsupported transfer pair; use (spiral, linear) or "
            "(piecewise radial, piecewise linear)"
        )
    lhs = mean_distortion(
        g, gauge, annulus_grid, Density.INVERSE_SQUARE, threads
    ).value
    rhs = (
        4.0
        * math.pi**2
        * mean_distortion(f, gauge, rectangle_grid, Density.UNIFORM, threads).value
    )
    rel_gap = abs(lhs - rhs) / max(abs(lhs), abs(rhs), np.finfo(float).tiny)
    return TransferCheckResult(
        annulus_value=float(lhs), rectangle_value=float(rhs), rel_gap=float(rel_gap)
    )
