"""Cauchy-Pompeiu transforms on annuli.

For a map ``f`` smooth off a break set, the representation

    f(w) = (1/(2*pi*i)) * boundary integral of f(xi)/(xi - w) d(xi)
         - (1/pi) * area integral of f_zbar(zeta)/(zeta - w) dA(zeta)

recovers interior values from the boundary trace and the ``dbar`` field.  The
boundary trace uses trapezoid nodes on both circles (spectrally accurate for
smooth data); the area term uses the midpoint grid with a 3x3 cell patch
around the target excluded, which keeps the singular kernel integrable at the
cost of an O(h log 1/h) hole error.

``psi_dbar_mass`` and ``phi_dbar_mass`` are the scalar ``dbar`` functionals of
a candidate map measured against its reference stretch, on the rectangle and
annulus sides respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import ordered_sum, pompeiu_sum
from .errors import AccuracyError, InputError, UnsupportedVariantError
from .geometry import (
    AnnulusDomain,
    QuadratureGrid,
    RectangleDomain,
    build_cartesian_grid,
    build_polar_grid,
    integrate,
)
from .maps import (
    Composition,
    InverseLinearStretch,
    InverseSpiralStretch,
    LinearStretch,
    MapFamily,
    SpiralStretch,
)

__all__ = [
    "BoundaryTrace",
    "DbarField",
    "ReconstructionResult",
    "TraceComponent",
    "annulus_trace",
    "cauchy_boundary",
    "dbar_field",
    "kernel_mass",
    "offset_targets",
    "phi_dbar_mass",
    "pompeiu_area",
    "psi_dbar_mass",
    "reconstruct",
    "reconstruct_many",
]


@dataclass(frozen=True)
class TraceComponent:
    """One boundary circle: nodes, map values, and complex ``d(xi)`` weights."""

    radius: float
    orientation: int
    nodes: np.ndarray
    values: np.ndarray
    dweights: np.ndarray

    @property
    def spacing(self) -> float:
        """Arc length between adjacent nodes."""
        return 2.0 * math.pi * self.radius / self.nodes.shape[0]


@dataclass(frozen=True)
class BoundaryTrace:
    """Oriented boundary data of an annulus: outer circle ccw, inner cw."""

    domain: AnnulusDomain
    components: tuple[TraceComponent, ...]

    def winding_number(self, w: complex) -> complex:
        """Discrete ``(1/(2*pi*i)) * integral d(xi)/(xi - w)``.

        Close to 1 for points inside the annulus, close to 0 outside; a
        cheap orientation sanity check.
        """
        total = 0.0 + 0.0j
        for comp in self.components:
            term = comp.dweights / (comp.nodes - complex(w))
            total += complex(
                ordered_sum(np.ascontiguousarray(term.real)),
                ordered_sum(np.ascontiguousarray(term.imag)),
            )
        return total / (2j * math.pi)


def annulus_trace(
    family: MapFamily, domain: AnnulusDomain, n_nodes: int
) -> BoundaryTrace:
    """Sample a map on the oriented boundary of an annulus.

    ``n_nodes`` trapezoid nodes per circle; the outer unit circle runs
    counterclockwise, the inner circle clockwise, so together they bound the
    annulus positively.
    """
    if n_nodes < 8:
        raise InputError("n_nodes must be >= 8")
    j = np.arange(n_nodes)
    unit = np.exp(2j * math.pi * j / n_nodes)
    step = 2.0 * math.pi / n_nodes
    comps = []
    outer_nodes = unit.copy()
    comps.append(
        TraceComponent(
            radius=1.0,
            orientation=+1,
            nodes=outer_nodes,
            values=np.asarray(family.eval_many(outer_nodes), dtype=np.complex128),
            dweights=1j * outer_nodes * step,
        )
    )
    a = domain.inner_radius
    inner_nodes = a * unit
    comps.append(
        TraceComponent(
            radius=a,
            orientation=-1,
            nodes=inner_nodes,
            values=np.asarray(family.eval_many(inner_nodes), dtype=np.complex128),
            dweights=-1j * inner_nodes * step,
        )
    )
    return BoundaryTrace(domain=domain, components=tuple(comps))


def cauchy_boundary(trace: BoundaryTrace, targets) -> np.ndarray:
    """``(1/(2*pi*i)) * sum values * dweights / (nodes - w)`` per target.

    Raises :class:`AccuracyError` when a target sits closer to a boundary
    circle than twice that circle's node spacing — inside that collar the
    trapezoid sum loses its spectral accuracy and the result would be junk.
    """
    pts = np.atleast_1d(np.asarray(targets, dtype=np.complex128))
    out = np.zeros(pts.shape, dtype=np.complex128)
    for comp in trace.components:
        guard = 2.0 * comp.spacing
        numer = comp.values * comp.dweights
        for idx, w in enumerate(pts):
            dist = np.abs(comp.nodes - w)
            nearest = float(np.min(dist))
            if nearest < guard:
                raise AccuracyError(
                    f"target {w!r} is within {guard!r} of the boundary nodes "
                    f"on the circle |xi| = {comp.radius!r}; refine the trace "
                    "or move the target"
                )
            term = numer / (comp.nodes - w)
            out[idx] += complex(
                ordered_sum(np.ascontiguousarray(term.real)),
                ordered_sum(np.ascontiguousarray(term.imag)),
            )
    return out / (2j * math.pi)


@dataclass(frozen=True)
class DbarField:
    """``f_zbar`` sampled on a quadrature grid, with the sampled map."""

    family: MapFamily
    grid: QuadratureGrid
    values: np.ndarray


def dbar_field(
    family: MapFamily, grid: QuadratureGrid, threads: int = 1
) -> DbarField:
    """Sample the ``dbar`` derivative of a map on all grid cells."""
    from .functionals import _wirtinger_chunked

    _, fzb = _wirtinger_chunked(family, grid.centers, threads)
    return DbarField(family=family, grid=grid, values=np.asarray(fzb))


_SNAP_CELLS = 1e-9


def _exclusion_mask(grid: QuadratureGrid, w: complex) -> np.ndarray:
    """Patch of cells around the target, as a uint8 mask.

    A cell is excluded when its center lies strictly within 1.5 cell-widths
    of the target in each axis (measured in index space, so uneven primary
    spacing from mandatory breaks is handled per cell).  For a target in the
    interior of a cell this is exactly that cell plus its 8 neighbors.  For a
    target on a cell edge or corner — where "the containing cell" is
    ambiguous — it degrades to the symmetric 2-cell-wide block instead, which
    keeps the patch centered on the target; the omitted-patch term only
    vanishes to leading order when that symmetry holds.  The secondary axis
    wraps on polar grids (angle is periodic) and clamps on cartesian grids;
    the primary axis always clamps.
    """
    wc = complex(w)
    edges = grid.primary_edges
    nsec = grid.n_secondary
    if grid.coordinate_kind == "polar":
        prim = abs(wc)
        sec = math.atan2(wc.imag, wc.real) % (2.0 * math.pi)
    else:
        prim = wc.real
        sec = wc.imag
    u = float(np.interp(prim, edges, np.arange(edges.size, dtype=np.float64)))
    s = sec / grid.secondary_step
    if abs(u - round(u)) <= _SNAP_CELLS:
        u = float(round(u))
    if abs(s - round(s)) <= _SNAP_CELLS:
        s = float(round(s))
    d_prim = np.abs(np.arange(grid.n_primary) + 0.5 - u)
    d_sec = np.arange(nsec) + 0.5 - s
    if grid.coordinate_kind == "polar":
        d_sec = np.abs((d_sec + nsec / 2.0) % nsec - nsec / 2.0)
    else:
        d_sec = np.abs(d_sec)
    patch = (d_prim[:, None] < 1.5) & (d_sec[None, :] < 1.5)
    return patch.ravel().astype(np.uint8)


def pompeiu_area(field: DbarField, w: complex) -> complex:
    """``(1/pi) * sum f_zbar * weight / (center - w)`` off the 3x3 patch."""
    grid = field.grid
    v = np.asarray(field.values, dtype=np.complex128)
    mask = _exclusion_mask(grid, w)
    re, im = pompeiu_sum(
        np.ascontiguousarray(grid.centers.real),
        np.ascontiguousarray(grid.centers.imag),
        grid.weights,
        np.ascontiguousarray(v.real),
        np.ascontiguousarray(v.imag),
        float(complex(w).real),
        float(complex(w).imag),
        mask,
    )
    return complex(re, im) / math.pi


@dataclass(frozen=True)
class ReconstructionResult:
    """Interior value recovered from boundary + area data, with its residual."""

    target: complex
    value: complex
    exact: complex
    residual: float
    near_break: bool


def _near_break(field: DbarField, w: complex) -> bool:
    grid = field.grid
    h = float(np.max(np.diff(grid.primary_edges)))
    breaks = set(grid.mandatory_breaks)
    if grid.coordinate_kind == "polar":
        breaks.update(field.family.break_radii())
        coord = abs(w)
    else:
        breaks.update(field.family.break_abscissae())
        coord = complex(w).real
    return any(abs(coord - b) <= 2.0 * h for b in breaks)


def reconstruct(
    trace: BoundaryTrace, field: DbarField, w: complex
) -> ReconstructionResult:
    """Recover ``family(w)`` from its boundary trace and ``dbar`` field."""
    value = complex(cauchy_boundary(trace, [w])[0]) - pompeiu_area(field, w)
    exact = field.family.eval(complex(w))
    return ReconstructionResult(
        target=complex(w),
        value=value,
        exact=exact,
        residual=abs(value - exact),
        near_break=_near_break(field, w),
    )


def reconstruct_many(
    trace: BoundaryTrace, field: DbarField, targets
) -> list[ReconstructionResult]:
    pts = np.atleast_1d(np.asarray(targets, dtype=np.complex128))
    return [reconstruct(trace, field, complex(w)) for w in pts]


def kernel_mass(grid: QuadratureGrid, xi: complex) -> float:
    """``sum weights / |centers - xi|`` — the discrete 1/r kernel mass.

    For any domain inside the unit disk this is bounded by ``4*pi``
    independently of the grid resolution, so its stability across refinements
    is a direct check that the singular kernel is being integrated sanely.
    """
    d = np.abs(grid.centers - complex(xi))
    if np.any(d == 0.0):
        raise InputError(f"kernel target {xi!r} coincides with a cell center")
    return ordered_sum(grid.weights / d)


def offset_targets(
    grid: QuadratureGrid,
    count: int,
    seed: int,
    margin: float = 0.1,
) -> np.ndarray:
    """Pick target points on cell corners, away from the domain boundary.

    Corners of the grid cells are the points farthest from all cell centers,
    which keeps both the excluded-patch error and the kernel mass behaved.
    Only corners at least ``margin`` (fraction of the primary span) away from
    the primary-axis boundary are eligible; the choice is seeded and
    reproducible.
    """
    if count < 1:
        raise InputError("count must be >= 1")
    if not (0.0 <= margin < 0.5):
        raise InputError("margin must be in [0, 0.5)")
    edges = grid.primary_edges
    lo, hi = float(edges[0]), float(edges[-1])
    pad = margin * (hi - lo)
    inner = edges[(edges >= lo + pad) & (edges <= hi - pad)]
    sec = (np.arange(grid.n_secondary)) * grid.secondary_step
    if grid.coordinate_kind == "polar":
        corners = (inner[:, None] * np.exp(1j * sec)[None, :]).ravel()
    else:
        corners = (inner[:, None] + 1j * sec[None, :]).ravel()
    if corners.size < count:
        raise InputError(
            f"only {corners.size} eligible corner targets, fewer than {count}"
        )
    rng = np.random.default_rng(seed)
    pick = rng.choice(corners.size, size=count, replace=False)
    return corners[np.sort(pick)]


def psi_dbar_mass(
    f: MapFamily,
    fstar: LinearStretch,
    n_x: int = 256,
    n_y: int = 256,
    threads: int = 1,
) -> float:
    """Source-normalized ``dbar`` mass of ``Psi = f after fstar^{-1}``.

    ``Psi`` compares a candidate square map with its reference stretch on the
    image rectangle ``[0, k] x [0, 1]``.  The mass is the integral of
    ``|Psi_wbar|`` over that rectangle divided by the constant Jacobian ``k``
    of the reference — equivalently, the integral of ``|Psi_wbar(fstar(z))|``
    over the source square, which is the quantity the stability estimates
    control.  Requires an unsheared reference (``n = 0``), so that the image
    is an axis-aligned rectangle.
    """
    if not isinstance(fstar, LinearStretch):
        raise InputError("fstar must be a LinearStretch")
    if fstar.n != 0.0:
        raise UnsupportedVariantError(
            "psi_dbar_mass requires an unsheared reference (n = 0); a sheared "
            "image parallelogram has no rectangle grid"
        )
    psi = Composition(f, InverseLinearStretch(fstar.k, fstar.n))
    domain = RectangleDomain(width=float(fstar.k), height=1.0)
    grid = build_cartesian_grid(domain, n_x, n_y, breaks=psi.break_abscissae())
    from .functionals import _wirtinger_chunked

    _, fzb = _wirtinger_chunked(psi, grid.centers, threads)
    return integrate(grid, np.abs(fzb)) / fstar.jacobian


def phi_dbar_mass(
    g: MapFamily,
    gstar: SpiralStretch,
    n_radial: int = 512,
    n_angular: int = 256,
    threads: int = 1,
) -> float:
    """``dbar`` mass of ``Phi = g after gstar^{-1}`` on the image annulus.

    ``Phi`` compares a candidate annulus map with its reference spiral stretch
    on the image annulus ``[q**k, 1]``; the mass is the plain integral of
    ``|Phi_wbar|`` there.  Exactly zero when ``g`` is the reference itself.
    """
    if not isinstance(gstar, SpiralStretch):
        raise InputError("gstar must be a SpiralStretch")
    if gstar.winding != 0:
        raise UnsupportedVariantError(
            "phi_dbar_mass requires a winding = 0 reference"
        )
    phi = Composition(g, InverseSpiralStretch(gstar.q, gstar.k, gstar.theta))
    domain = AnnulusDomain(inner_radius=gstar.q**gstar.k)
    grid = build_polar_grid(domain, n_radial, n_angular, breaks=phi.break_radii())
    from .functionals import _wirtinger_chunked

    _, fzb = _wirtinger_chunked(phi, grid.centers, threads)
    return integrate(grid, np.abs(fzb))
