"""The computational domain and grid-sampled scalar fields.

Everything lives on the fixed box ``B = [0, sqrt(2)] x [0, 1]``; torus mode
identifies opposite sides.  Scalars are sampled at cell centers of a uniform
``nx x ny`` grid, so midpoint quadrature is exact for cellwise-constant data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

BOX_WIDTH = math.sqrt(2.0)
BOX_HEIGHT = 1.0
BOX_AREA = BOX_WIDTH * BOX_HEIGHT

#: tolerance for the nx/ny ~ sqrt(2) aspect contract (2 percent)
ASPECT_TOL = 0.02


def cell_centers(n: int, length: float) -> np.ndarray:
    """Midpoints of ``n`` uniform cells covering ``[0, length]``."""
    h = length / n
    return (np.arange(n) + 0.5) * h


@dataclass
class ScalarField:
    """Scalar samples on the uniform grid over the box.

    data is indexed ``[j, i]`` for the point ``(x_i, y_j)`` with
    ``x_i = (i + 1/2) hx`` and ``y_j = (j + 1/2) hy``.
    """

    data: np.ndarray
    mode: str = "torus"  # "torus" | "box"
    time: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError("ScalarField.data must be 2-D (ny, nx)")
        if self.mode not in ("torus", "box"):
            raise ValueError(f"unknown domain mode {self.mode!r}")
        ratio = (self.nx / self.ny) / math.sqrt(2.0)
        if abs(ratio - 1.0) > ASPECT_TOL:
            raise ValueError(
                f"grid {self.nx}x{self.ny} is too far from the sqrt(2) box aspect"
            )

    @property
    def ny(self) -> int:
        return self.data.shape[0]

    @property
    def nx(self) -> int:
        return self.data.shape[1]

    @property
    def hx(self) -> float:
        return BOX_WIDTH / self.nx

    @property
    def hy(self) -> float:
        return BOX_HEIGHT / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    def xs(self) -> np.ndarray:
        return cell_centers(self.nx, BOX_WIDTH)

    def ys(self) -> np.ndarray:
        return cell_centers(self.ny, BOX_HEIGHT)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs(), self.ys())

    def mean(self) -> float:
        return float(self.data.mean())

    def copy(self, **changes) -> "ScalarField":
        out = replace(self, **changes)
        if "data" not in changes:
            out.data = self.data.copy()
        return out

    def check_finite(self) -> None:
        if not np.isfinite(self.data).all():
            bad = int(np.count_nonzero(~np.isfinite(self.data)))
            raise ValueError(f"scalar field contains {bad} non-finite samples")


def constant_field(value: float, nx: int, ny: int, mode: str = "torus") -> ScalarField:
    return ScalarField(np.full((ny, nx), float(value)), mode=mode)


def field_from_function(fn, nx: int, ny: int, mode: str = "torus") -> ScalarField:
    X, Y = np.meshgrid(cell_centers(nx, BOX_WIDTH), cell_centers(ny, BOX_HEIGHT))
    return ScalarField(np.asarray(fn(X, Y), dtype=np.float64), mode=mode)


def wrap_coords(px: np.ndarray, py: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Wrap points into the fundamental box (torus topology)."""
    return np.mod(px, BOX_WIDTH), np.mod(py, BOX_HEIGHT)
