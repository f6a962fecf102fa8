"""Grid-cell partitioning of feature space and per-sample weighting.

Feature space (or a selected subset of its dimensions) is cut into
equal-width cells, ``lam`` divisions per dimension. Each non-empty cell
carries variation statistics; a cell's feature variation relative to the
grid average gives the uniqueness ``mu`` shared by its samples, and each
sample's target deviation inside its cell gives its abnormality ``gamma``.
The training weight of a sample is ``mu / (1 + gamma)``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class CellStats:
    count: int
    x_mean: np.ndarray
    sigma_x: float
    y_mean: np.ndarray
    sigma_y: float
    mu: float


@dataclass
class CellGrid:
    lam: int
    feature_subset: list[int]
    bounds: list[tuple[float, float]]  # per selected dimension
    cells: dict[tuple[int, ...], CellStats]
    sigma_x_bar: float
    fingerprint: str
    mu_floor: float = 0.0

    @property
    def n_cells(self) -> int:
        return len(self.cells)


def dataset_fingerprint(dataset: Dataset) -> str:
    """Cheap content hash used to detect grid/dataset mismatch."""
    h = hashlib.sha256()
    x = dataset.features
    h.update(np.int64([x.shape[0], x.shape[1]]).tobytes())
    h.update(x.min(axis=0).tobytes())
    h.update(x.max(axis=0).tobytes())
    h.update(x.sum(axis=0).tobytes())
    return h.hexdigest()


def _check_finite(features: np.ndarray) -> None:
    bad = ~np.isfinite(features)
    if bad.any():
        i = int(np.argwhere(bad.any(axis=1))[0, 0])
        raise ValueError(f"non-finite feature value at sample index {i}")


def _bin_indices(sub: np.ndarray, bounds, lam: int) -> np.ndarray:
    """Equal-width half-open bins; the upper bound folds into the last bin.
    Out-of-range coordinates clamp to the edge bins."""
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    width = hi - lo
    idx = np.zeros(sub.shape, dtype=np.int64)
    live = width > 0  # zero-range dimensions collapse to a single bin
    if live.any():
        scaled = (sub[:, live] - lo[live]) / width[live] * lam
        idx[:, live] = np.clip(np.floor(scaled).astype(np.int64), 0, lam - 1)
    return idx


def fit_grid(
    dataset: Dataset,
    lam: int,
    feature_subset: list[int] | None = None,
    mu_floor: float = 0.0,
) -> CellGrid:
    """Partition the fitting data into cells and compute all cell statistics.

    Single pass to assign samples to cells, then per-cell means and standard
    deviations over the selected feature dimensions and over the targets.
    """
    if dataset.n == 0:
        raise ValueError("cannot fit a grid on an empty dataset")
    if lam < 1:
        raise ValueError("lam must be a positive integer")
    if feature_subset is None:
        feature_subset = list(range(dataset.feature_dim))
    if len(set(feature_subset)) != len(feature_subset):
        raise ValueError("feature_subset indices must be distinct")
    if any(j < 0 or j >= dataset.feature_dim for j in feature_subset):
        raise ValueError("feature_subset index out of range")

    _check_finite(dataset.features)
    sub = dataset.features[:, feature_subset]
    bounds = [(float(c.min()), float(c.max())) for c in sub.T]
    idx = _bin_indices(sub, bounds, lam)

    members: dict[tuple[int, ...], list[int]] = {}
    for i, key in enumerate(map(tuple, idx)):
        members.setdefault(key, []).append(i)

    raw = {}
    for key, rows in members.items():
        cx, cy = sub[rows], dataset.targets[rows]
        x_mean, y_mean = cx.mean(axis=0), cy.mean(axis=0)
        sigma_x = float(np.sqrt(np.mean(np.sum((cx - x_mean) ** 2, axis=1))))
        sigma_y = float(np.sqrt(np.mean(np.sum((cy - y_mean) ** 2, axis=1))))
        raw[key] = (len(rows), x_mean, sigma_x, y_mean, sigma_y)

    sigma_x_bar = float(np.mean([r[2] for r in raw.values()]))
    cells = {}
    for key, (count, x_mean, sigma_x, y_mean, sigma_y) in raw.items():
        if sigma_x_bar > 0:
            mu = sigma_x**2 / sigma_x_bar**2
        else:
            mu = 1.0  # no variation anywhere: degrade to uniform weighting
        cells[key] = CellStats(count, x_mean, sigma_x, y_mean, sigma_y, max(mu, mu_floor))

    return CellGrid(
        lam=lam,
        feature_subset=list(feature_subset),
        bounds=bounds,
        cells=cells,
        sigma_x_bar=sigma_x_bar,
        fingerprint=dataset_fingerprint(dataset),
        mu_floor=mu_floor,
    )


def locate_cell(grid: CellGrid, features: np.ndarray) -> tuple[int, ...]:
    """Cell index of a single feature vector; out-of-bounds coordinates
    clamp to the nearest edge bin."""
    features = np.asarray(features, dtype=np.float64)
    if not np.isfinite(features).all():
        raise ValueError("non-finite coordinate")
    sub = features[grid.feature_subset][None, :]
    return tuple(_bin_indices(sub, grid.bounds, grid.lam)[0])


@dataclass(frozen=True)
class WeightTable:
    """Per-sample (mu, gamma, weight), fixed before training starts and
    independent of any model parameters."""

    mu: np.ndarray
    gamma: np.ndarray
    weight: np.ndarray
    norm_kind: str
    fingerprint: str

    def __len__(self) -> int:
        return len(self.weight)

    def export(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("index,mu,gamma,weight\n")
            for i in range(len(self.weight)):
                fh.write(f"{i},{float(self.mu[i])!r},{float(self.gamma[i])!r},{float(self.weight[i])!r}\n")


def compute_weights(grid: CellGrid, dataset: Dataset, norm_kind: str = "l2") -> WeightTable:
    """Derive the per-sample weight table from a fitted grid.

    gamma is the L1 or squared-L2 deviation of a sample's target from its
    cell mean, normalized by the cell's target deviation; cells with zero
    target deviation assign gamma = 0 to all their samples.
    """
    norm_kind = norm_kind.lower()
    if norm_kind not in ("l1", "l2"):
        raise ValueError(f"norm_kind must be 'l1' or 'l2', got {norm_kind!r}")
    if dataset_fingerprint(dataset) != grid.fingerprint:
        raise ValueError("dataset does not match the one the grid was fitted on")

    sub = dataset.features[:, grid.feature_subset]
    idx = _bin_indices(sub, grid.bounds, grid.lam)

    n = dataset.n
    mu = np.empty(n)
    gamma = np.empty(n)
    for i, key in enumerate(map(tuple, idx)):
        cell = grid.cells[key]
        mu[i] = cell.mu
        if cell.sigma_y == 0:
            gamma[i] = 0.0
            continue
        dev = dataset.targets[i] - cell.y_mean
        if norm_kind == "l1":
            gamma[i] = np.sum(np.abs(dev)) / cell.sigma_y
        else:
            gamma[i] = np.sum(dev**2) / cell.sigma_y**2

    weight = mu / (1.0 + gamma)
    for arr in (mu, gamma, weight):
        arr.setflags(write=False)
    return WeightTable(mu, gamma, weight, norm_kind, grid.fingerprint)


def localized_deviation(grid: CellGrid) -> float:
    """Sum of per-cell feature standard deviations over non-empty cells."""
    return float(sum(c.sigma_x for c in grid.cells.values()))


@dataclass(frozen=True)
class SweepEntry:
    lam: int
    ld: float
    n_cells: int


def select_lambda(
    dataset: Dataset,
    candidates: list[int],
    feature_subset: list[int] | None = None,
) -> tuple[int, list[SweepEntry]]:
    """Fit a grid per candidate division count and pick the one that
    maximizes localized deviation; ties go to the smaller candidate."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    report = []
    for lam in candidates:
        grid = fit_grid(dataset, lam, feature_subset)
        report.append(SweepEntry(lam, localized_deviation(grid), grid.n_cells))
    best = max(report, key=lambda e: (e.ld, -e.lam))
    return best.lam, report


def write_sweep_report(report: list[SweepEntry], path) -> None:
    with open(path, "w") as fh:
        fh.write("lambda,ld,nonempty_cells\n")
        for e in report:
            fh.write(f"{e.lam},{e.ld!r},{e.n_cells}\n")
