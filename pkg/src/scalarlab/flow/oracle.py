"""Exact grid-permutation mixing oracle.

The oracle acts out the carousel rounds as pixel-block moves: every
adjacent strip transposition becomes the 180-degree rotation of its
2-strip pixel rectangle (reverse both index orders), cellwise across the
level-n tiling.  Each step is a bijection of pixels, so mass is conserved
exactly, constants are fixed, and starting from the two-cell pattern every
level-(n+1) cell ends with its average equal to one half as an integer
count.  This is the kappa = 0 transport reference the smooth field is
measured against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scalarlab.domain import BOX_WIDTH
from scalarlab.errors import ResolutionError
from scalarlab.flow.carousel import NSTRIPS, ROUNDS


@dataclass
class MixerOracleState:
    """Binary configuration at pentadic stage ``level`` on its own pixel grid."""

    data: np.ndarray  # (ny, nx) of 0/1
    level: int = 0

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if self.data.ndim != 2:
            raise ValueError("oracle grid must be 2-D")

    @property
    def nx(self) -> int:
        return self.data.shape[1]

    @property
    def ny(self) -> int:
        return self.data.shape[0]

    def total_mass(self) -> int:
        return int(self.data.sum())

    def cell_averages(self, level: int | None = None) -> np.ndarray:
        """Exact per-cell averages (as rationals evaluated in float)."""
        lvl = self.level if level is None else level
        n = 5 ** lvl
        if self.nx % n or self.ny % n:
            raise ResolutionError(f"grid {self.nx}x{self.ny} has no level-{lvl} cells")
        bh, bw = self.ny // n, self.nx // n
        sums = self.data.reshape(n, bh, n, bw).sum(axis=(1, 3), dtype=np.int64)
        return sums / float(bh * bw)

    def cell_counts(self, level: int | None = None) -> np.ndarray:
        lvl = self.level if level is None else level
        n = 5 ** lvl
        bh, bw = self.ny // n, self.nx // n
        return self.data.reshape(n, bh, n, bw).sum(axis=(1, 3), dtype=np.int64)


def two_cell_state(nx: int = 1250, ny: int = 875) -> MixerOracleState:
    """The half-split start configuration on an oracle-friendly grid."""
    if nx % 2:
        raise ResolutionError("oracle grid needs an even pixel width")
    data = np.zeros((ny, nx), dtype=np.uint8)
    data[:, : nx // 2] = 1
    return MixerOracleState(data, level=0)


def mixer_oracle_step(state: MixerOracleState) -> MixerOracleState:
    """One exact stage: riffle the strips of every level-n cell by rotations."""
    n = 5 ** state.level
    nx, ny = state.nx, state.ny
    if nx % (n * NSTRIPS) or ny % n:
        raise ResolutionError(
            f"level-{state.level} step needs width divisible by {n * NSTRIPS} "
            f"and height divisible by {n}; got {nx}x{ny}"
        )
    bw, bh = nx // n, ny // n
    sw = bw // NSTRIPS
    if sw < 1 or bh < 1:
        raise ResolutionError("oracle resolution exhausted")
    blocks = state.data.reshape(n, bh, n, bw).copy()
    for swaps in ROUNDS:
        for p in swaps:
            rect = blocks[:, :, :, p * sw:(p + 2) * sw]
            blocks[:, :, :, p * sw:(p + 2) * sw] = np.flip(rect, axis=(1, 3))
    return MixerOracleState(blocks.reshape(ny, nx), level=state.level + 1)


def stripe_pattern(level: int, x: np.ndarray) -> np.ndarray:
    """Pointwise level-n configuration for two-cell data: vertical stripes.

    The solid content of the riffled strips is independent of the internal
    flips, so the stage-n set is exactly {frac(5^n x / sqrt(2)) < 1/2}.
    """
    u = np.mod(5.0 ** level * np.asarray(x, dtype=np.float64) / BOX_WIDTH, 1.0)
    return (u < 0.5).astype(np.float64)
