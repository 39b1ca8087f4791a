"""Resampling sweep over (image count, maximal depth) and parameter selection.

For every grid cell and iteration, identification images are sampled
without replacement, a region set is built, and its error is measured on a
freshly sampled holdout; the cell value is the RMSE of those errors. Every
iteration draws from an independent random stream derived from
(seed, image count, depth, iteration), so cells can be computed in any
order — or in parallel — with bit-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ComputationError, ValidationError
from .model import CameraDataset, RapConfig
from .quadtree import hair_error, identify_hair

_SEED_MASK = (1 << 64) - 1

#: Slack for threshold comparisons so that a decrease equal to the threshold
#: (up to float rounding of the subtraction) still counts as converged.
_DELTA_EPS = 1e-12

N_STAR_RULES = ("at_n", "from_n")


@dataclass(frozen=True)
class SweepConfig:
    """Grid axes and trial counts for the resampling experiment.

    ``a0`` overrides the threshold inside the ``rap`` snapshot so the sweep
    threshold is always explicit in one place.
    """

    n_values: tuple[int, ...] = tuple(range(10, 101, 10))
    d0_values: tuple[int, ...] = (1, 2, 3, 4, 5)
    iterations: int = 1000
    holdout_size: int = 10
    a0: float = 0.75
    seed: int = 0
    rap: RapConfig = field(default_factory=RapConfig)

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))
        object.__setattr__(self, "d0_values", tuple(int(v) for v in self.d0_values))
        if not self.n_values or list(self.n_values) != sorted(set(self.n_values)):
            raise ValidationError("n_values must be non-empty, unique, and ascending")
        if not self.d0_values or list(self.d0_values) != sorted(set(self.d0_values)):
            raise ValidationError("d0_values must be non-empty, unique, and ascending")
        if min(self.n_values) < 1 or min(self.d0_values) < 0:
            raise ValidationError("n_values must be >= 1 and d0_values >= 0")
        if self.iterations < 1:
            raise ValidationError("iterations must be >= 1")
        if self.holdout_size < 1:
            raise ValidationError("holdout_size must be >= 1")

    def rap_effective(self) -> RapConfig:
        return replace(self.rap, a0=self.a0)

    def cells(self) -> list[tuple[int, int]]:
        return [(n, d0) for n in self.n_values for d0 in self.d0_values]


@dataclass(frozen=True)
class SweepGrid:
    """RMSE per (image count, depth) cell, plus the config that produced it."""

    cells: dict
    seed: int
    config: SweepConfig
    errors: dict | None = None  # optional per-cell iteration errors

    def rmse_at(self, n: int, d0: int) -> float:
        return self.cells[(n, d0)]

    def rows(self) -> list[tuple[int, int, float]]:
        """Plot-ready (n, d0, rmse) rows in deterministic order."""
        return [(n, d0, self.cells[(n, d0)]) for n, d0 in sorted(self.cells)]


@dataclass(frozen=True)
class ParameterChoice:
    """Selected depth and image count, with the thresholds used."""

    d0_star: int
    n_star: int
    delta_depth_threshold: float = 0.01
    delta_n_threshold: float = 0.001


def rmse(errors: Sequence[float]) -> float:
    """Root mean square of a non-empty error list."""
    values = list(errors)
    if not values:
        raise ValueError("rmse of an empty list is undefined")
    return math.sqrt(sum(e * e for e in values) / len(values))


def _iteration_error(dataset: CameraDataset, config: SweepConfig,
                     n: int, d0: int, iteration: int) -> float:
    ss = np.random.SeedSequence([config.seed & _SEED_MASK, n, d0, iteration])
    rng = np.random.default_rng(ss)
    pool = len(dataset.images)
    ident_idx = np.sort(rng.choice(pool, size=n, replace=False))
    remaining = np.setdiff1d(np.arange(pool), ident_idx)
    hold_idx = np.sort(rng.choice(remaining, size=config.holdout_size, replace=False))

    cfg = config.rap_effective()
    ident_ids = [dataset.images[i].image_id for i in ident_idx]
    hair = identify_hair(dataset, ident_ids, cfg, d0)
    holdout = [dataset.images[i] for i in hold_idx]
    return hair_error(hair, holdout, cfg).error


def _cell_errors(dataset: CameraDataset, config: SweepConfig,
                 n: int, d0: int) -> tuple[float, ...]:
    return tuple(_iteration_error(dataset, config, n, d0, i)
                 for i in range(config.iterations))


def run_sweep(dataset: CameraDataset, config: SweepConfig,
              workers: int | None = None, keep_errors: bool = False) -> SweepGrid:
    """Compute the RMSE grid; reproducible for any worker count.

    ``workers`` > 1 distributes whole cells over a process pool. Results
    are keyed by cell, so scheduling cannot change the grid.
    """
    pool = len(dataset.images)
    if max(config.n_values) + config.holdout_size > pool:
        raise ValidationError(
            f"pool of {pool} images cannot supply max n {max(config.n_values)} "
            f"plus holdout {config.holdout_size}")

    cells = config.cells()
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool_exec:
            futures = {cell: pool_exec.submit(_cell_errors, dataset, config, *cell)
                       for cell in cells}
            per_cell = {cell: fut.result() for cell, fut in futures.items()}
    else:
        per_cell = {cell: _cell_errors(dataset, config, *cell) for cell in cells}

    grid_cells = {cell: rmse(errors) for cell, errors in per_cell.items()}
    return SweepGrid(
        cells=grid_cells,
        seed=config.seed,
        config=config,
        errors=dict(per_cell) if keep_errors else None,
    )


def select_parameters(grid: SweepGrid, delta_depth: float = 0.01,
                      delta_n: float = 0.001, n_rule: str = "at_n") -> ParameterChoice:
    """Pick the smallest depth and image count at which the RMSE has converged.

    The depth d0* is the smallest depth i (with at least one deeper depth
    available) such that going from i to any deeper j decreases the RMSE by
    at most ``delta_depth`` at every image count. The image count N* is the
    smallest n at which deepening past d0* decreases the RMSE by at most
    ``delta_n`` — at that n only (``n_rule="at_n"``), or at that n and all
    larger ones (``n_rule="from_n"``).
    """
    if n_rule not in N_STAR_RULES:
        raise ValueError(f"unknown n_rule {n_rule!r}")
    config = grid.config
    depths = list(config.d0_values)
    ns = list(config.n_values)
    missing = [cell for cell in config.cells() if cell not in grid.cells]
    if missing:
        raise ValidationError(f"grid is missing cells: {missing}")

    def converged(i: int, j: int, n: int, threshold: float) -> bool:
        decrease = grid.cells[(n, i)] - grid.cells[(n, j)]
        return decrease <= threshold + _DELTA_EPS

    d0_star = None
    for pos, i in enumerate(depths):
        deeper = depths[pos + 1:]
        if not deeper:
            break  # a depth with nothing deeper cannot demonstrate convergence
        if all(converged(i, j, n, delta_depth) for j in deeper for n in ns):
            d0_star = i
            break
    if d0_star is None:
        raise ComputationError("no convergence: d0")

    deeper = [j for j in depths if j > d0_star]
    n_star = None
    for pos, n in enumerate(ns):
        candidates = [n] if n_rule == "at_n" else ns[pos:]
        if all(converged(d0_star, j, k, delta_n) for j in deeper for k in candidates):
            n_star = n
            break
    if n_star is None:
        raise ComputationError("no convergence: N")

    return ParameterChoice(d0_star=d0_star, n_star=n_star,
                           delta_depth_threshold=delta_depth,
                           delta_n_threshold=delta_n)
