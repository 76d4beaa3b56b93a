"""Self-similar decompositions of the box and cellwise averaging.

Two tiling families are supported (and only these two):

* pentadic -- ``5^{2n}`` translated copies of the box shrunk by ``5^{-n}``;
* dyadic   -- ``2^n`` copies of the box under the rotate-and-shrink map
  ``R = (1/sqrt(2)) [[0, -1], [1, 0]]``, normalized to tile the box with
  axis-aligned cells (portrait and landscape orientations alternate).

All cells are half-open and grid-aligned; averaging uses the midpoint rule,
which is exact for cellwise-constant samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from scalarlab.domain import BOX_HEIGHT, BOX_WIDTH, ScalarField
from scalarlab.errors import ResolutionError

#: minimum number of samples per cell side for quadrature to be trusted
MIN_SAMPLES_PER_CELL = 4

_ROT = np.array([[0.0, -1.0], [1.0, 0.0]]) / math.sqrt(2.0)
_ROT_INV = np.array([[0.0, 1.0], [-1.0, 0.0]]) * math.sqrt(2.0)


@dataclass(frozen=True)
class Box:
    """An axis-aligned cell congruent to a shrunk (possibly rotated) copy of B."""

    x0: float
    y0: float
    width: float
    height: float

    @property
    def orientation(self) -> int:
        """0 for landscape (w/h = sqrt(2)), 1 for portrait (w/h = 1/sqrt(2))."""
        return 0 if self.width >= self.height else 1

    @property
    def area(self) -> float:
        return self.width * self.height

    def __post_init__(self):
        ratio = self.width / self.height
        if not (
            math.isclose(ratio, math.sqrt(2.0), rel_tol=1e-9)
            or math.isclose(ratio, 1.0 / math.sqrt(2.0), rel_tol=1e-9)
        ):
            raise ValueError(f"cell aspect {ratio} not in {{sqrt2, 1/sqrt2}}")


FULL_BOX = Box(0.0, 0.0, BOX_WIDTH, BOX_HEIGHT)


def rotation_matrix(n: int) -> np.ndarray:
    """The matrix ``R^n`` (inverse powers for n < 0).

    Uses ``R^2 = -(1/2) I`` so arbitrary powers stay exact up to rounding.
    """
    k, odd = divmod(abs(n), 2)
    base = (-0.5) ** k * (np.eye(2) if not odd else (_ROT if n >= 0 else _ROT_INV))
    # R^{-n} = (R^n)^{-1}; for even powers the scalar inverts
    if n < 0 and not odd:
        base = np.eye(2) * (-2.0) ** k
    elif n < 0 and odd:
        base = (-2.0) ** k * _ROT_INV
    return base


def rotation_scale(point, n: int) -> np.ndarray:
    """Apply ``R^n`` to a point or an (N, 2) array of points."""
    pts = np.asarray(point, dtype=np.float64)
    return pts @ rotation_matrix(n).T


@dataclass(frozen=True)
class TilingGrid:
    """A level of one tiling family: uniform cells covering the box."""

    family: str  # "pentadic" | "dyadic"
    level: int
    ncols: int
    nrows: int

    @property
    def cell_width(self) -> float:
        return BOX_WIDTH / self.ncols

    @property
    def cell_height(self) -> float:
        return BOX_HEIGHT / self.nrows

    @property
    def ncells(self) -> int:
        return self.ncols * self.nrows

    def offsets(self) -> np.ndarray:
        """(ncells, 2) array of cell origins, row-major from the bottom-left."""
        ox = np.arange(self.ncols) * self.cell_width
        oy = np.arange(self.nrows) * self.cell_height
        OX, OY = np.meshgrid(ox, oy)
        return np.column_stack([OX.ravel(), OY.ravel()])

    def cell(self, col: int, row: int) -> Box:
        return Box(col * self.cell_width, row * self.cell_height,
                   self.cell_width, self.cell_height)

    def cells(self):
        for row in range(self.nrows):
            for col in range(self.ncols):
                yield self.cell(col, row)


def pentadic_grid(level: int) -> TilingGrid:
    if level < 0:
        raise ValueError("level must be nonnegative")
    n = 5 ** level
    return TilingGrid("pentadic", level, n, n)


def dyadic_grid(level: int) -> TilingGrid:
    """Level-n dyadic tiling: 2^n cells, aspect alternating with parity.

    ``R^n`` applied to the box produces negative coordinates; the tile set is
    normalized by translation so its bounding box coincides with B.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    ncols = 2 ** ((level + 1) // 2)
    nrows = 2 ** (level // 2)
    return TilingGrid("dyadic", level, ncols, nrows)


def grid_offsets(level: int, family: str, *, sample_grid: tuple[int, int] | None = None) -> TilingGrid:
    """The tiling lattice of the requested family and depth.

    When ``sample_grid=(nx, ny)`` is given, the resolution contract is
    enforced: every cell must align with the sample lattice and contain at
    least ``MIN_SAMPLES_PER_CELL`` samples per side.
    """
    if family == "pentadic":
        grid = pentadic_grid(level)
    elif family == "dyadic":
        grid = dyadic_grid(level)
    else:
        raise ValueError(f"unknown tiling family {family!r}")
    if sample_grid is not None:
        nx, ny = sample_grid
        _cell_index_ranges(grid, nx, ny)  # raises on misalignment / exhaustion
    return grid


def _cell_index_ranges(grid: TilingGrid, nx: int, ny: int) -> tuple[int, int]:
    """Samples per cell side, after checking alignment and the 4x4 contract."""
    if nx % grid.ncols or ny % grid.nrows:
        raise ResolutionError(
            f"{grid.family} level {grid.level} cells do not align with a "
            f"{nx}x{ny} sample grid"
        )
    bx, by = nx // grid.ncols, ny // grid.nrows
    if bx < MIN_SAMPLES_PER_CELL or by < MIN_SAMPLES_PER_CELL:
        raise ResolutionError(
            f"{grid.family} level {grid.level} cells hold only {bx}x{by} "
            f"samples; need {MIN_SAMPLES_PER_CELL}x{MIN_SAMPLES_PER_CELL}"
        )
    return bx, by


def box_average(field: ScalarField, cell: Box) -> float:
    """Mean of the field over one grid-aligned cell (midpoint quadrature)."""
    eps = 1e-9
    if cell.x0 < -eps or cell.y0 < -eps or cell.x0 + cell.width > BOX_WIDTH + eps \
            or cell.y0 + cell.height > BOX_HEIGHT + eps:
        raise ValueError("cell is not contained in the domain")
    i0 = cell.x0 / field.hx
    i1 = (cell.x0 + cell.width) / field.hx
    j0 = cell.y0 / field.hy
    j1 = (cell.y0 + cell.height) / field.hy
    idx = [i0, i1, j0, j1]
    if any(abs(v - round(v)) > 1e-6 for v in idx):
        raise ResolutionError("cell boundaries do not align with the sample grid")
    i0, i1, j0, j1 = (int(round(v)) for v in idx)
    if i1 - i0 < MIN_SAMPLES_PER_CELL or j1 - j0 < MIN_SAMPLES_PER_CELL:
        raise ResolutionError("cell holds fewer than 4x4 samples")
    return float(field.data[j0:j1, i0:i1].mean())


def cell_averages(field: ScalarField, grid: TilingGrid) -> np.ndarray:
    """(nrows, ncols) array of all cell means of one tiling level."""
    bx, by = _cell_index_ranges(grid, field.nx, field.ny)
    blocks = field.data.reshape(grid.nrows, by, grid.ncols, bx)
    return blocks.mean(axis=(1, 3))


def project_piecewise_constant(field: ScalarField, grid: TilingGrid) -> ScalarField:
    """Replace the field by its cell means on one tiling level.

    Preserves the global mean to machine precision and is idempotent.
    """
    bx, by = _cell_index_ranges(grid, field.nx, field.ny)
    means = cell_averages(field, grid)
    data = np.repeat(np.repeat(means, by, axis=0), bx, axis=1)
    return field.copy(data=data)


def two_cell_data(nx: int, ny: int, mode: str = "box") -> ScalarField:
    """Indicator of the left half of the box, sampled at cell centers."""
    if nx % 2:
        raise ResolutionError("two-cell data needs an even number of columns")
    data = np.zeros((ny, nx))
    data[:, : nx // 2] = 1.0
    return ScalarField(data, mode=mode)


def two_cell_indicator(x: np.ndarray) -> np.ndarray:
    """Pointwise two-cell data: 1 where x < sqrt(2)/2."""
    return (np.asarray(x) < BOX_WIDTH / 2.0).astype(np.float64)
