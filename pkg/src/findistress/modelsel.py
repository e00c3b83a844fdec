"""k-fold cross-validation and (C, gamma) grid search for the RBF SVM."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset, ScalerParams, fit_scaler, scale_dataset
from .kernel import KernelSpec
from .svm import TrainConfig, train_svm

# LIBSVM's svm-scale default target interval
PIPELINE_RANGE = (-1.0, 1.0)

DEFAULT_C_GRID = tuple(sorted({2.0**e for e in range(-5, 16, 2)} | {1.0}))
DEFAULT_GAMMA_GRID = tuple(sorted({2.0**e for e in range(-15, 4, 2)} | {0.25}))


class ModelSelectionError(ValueError):
    pass


@dataclass(frozen=True)
class FoldAssignment:
    folds: tuple[int, ...]
    k: int
    stratified: bool

    def __post_init__(self):
        object.__setattr__(self, "folds", tuple(int(f) for f in self.folds))
        sizes = self.sizes()
        if min(sizes) == 0:
            raise ModelSelectionError("every fold must be nonempty")

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for f in self.folds:
            counts[f] += 1
        return counts

    def split(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """Training and held-out indices for one fold."""
        a = np.asarray(self.folds)
        return np.flatnonzero(a != fold), np.flatnonzero(a == fold)


def kfold_split(ds: Dataset, k: int, seed: int = 0) -> FoldAssignment:
    """Seeded shuffle followed by round-robin fold assignment.

    When both classes have at least ``k`` members the shuffled indices are
    grouped by class before dealing, so each fold receives a proportional
    share of each class; the round-robin counter runs on across classes,
    which keeps fold sizes within one of each other.
    """
    n = len(ds)
    if k < 2:
        raise ModelSelectionError(f"k must be at least 2, got {k}")
    if k > n:
        raise ModelSelectionError(f"k exceeds dataset size ({k} > {n})")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    y = ds.y
    stratified = all((y == c).sum() >= k for c in (1, -1))
    if stratified:
        order = np.concatenate([order[y[order] == c] for c in (1, -1)])
    folds = np.empty(n, dtype=int)
    folds[order] = np.arange(n) % k
    return FoldAssignment(tuple(folds), k, stratified)


@dataclass
class CVScore:
    fold_accuracies: list[float]
    degenerate_folds: list[int] = field(default_factory=list)
    scalers: list[ScalerParams] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.fold_accuracies))


def cross_validate(
    ds: Dataset,
    kernel: KernelSpec,
    C: float,
    folds: FoldAssignment,
    feature_range=PIPELINE_RANGE,
) -> CVScore:
    """Per-fold accuracy; the scaler is fitted on each fold's training part only.

    A training part holding a single class cannot be fed to the solver; that
    fold is scored with the constant majority-label predictor and recorded
    in ``degenerate_folds``.
    """
    if len(folds.folds) != len(ds):
        raise ModelSelectionError("fold assignment does not match dataset size")
    score = CVScore(fold_accuracies=[])
    for f in range(folds.k):
        train_idx, test_idx = folds.split(f)
        train_ds, test_ds = ds.subset(train_idx), ds.subset(test_idx)
        scaler = fit_scaler(train_ds, feature_range)
        score.scalers.append(scaler)
        y_train = train_ds.y
        if len(set(y_train.tolist())) < 2:
            majority = 1 if (y_train == 1).sum() > (y_train == -1).sum() else -1
            pred = np.full(len(test_ds), majority)
            score.degenerate_folds.append(f)
        else:
            model = train_svm(scale_dataset(scaler, train_ds), kernel, TrainConfig(C=C))
            pred = model.predict(scaler.transform(test_ds.X))
        score.fold_accuracies.append(float((pred == test_ds.y).mean()))
    return score


def cv_accuracy(ds: Dataset, kernel: KernelSpec, C: float, folds: FoldAssignment) -> float:
    return cross_validate(ds, kernel, C, folds).mean


@dataclass(frozen=True)
class GridPoint:
    C: float
    gamma: float
    mean_accuracy: float
    fold_accuracies: tuple[float, ...]
    degenerate_folds: tuple[int, ...] = ()


@dataclass
class GridSearchResult:
    grid: list[GridPoint]
    best_C: float
    best_gamma: float
    k: int

    @property
    def best(self) -> GridPoint:
        return next(p for p in self.grid if p.C == self.best_C and p.gamma == self.best_gamma)

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["C", "gamma", *(f"fold{i}" for i in range(self.k)), "mean"])
            for p in self.grid:
                w.writerow([repr(p.C), repr(p.gamma), *(repr(a) for a in p.fold_accuracies), repr(p.mean_accuracy)])


def grid_search(
    ds: Dataset,
    C_grid=DEFAULT_C_GRID,
    gamma_grid=DEFAULT_GAMMA_GRID,
    k: int = 3,
    seed: int = 0,
) -> GridSearchResult:
    """Exhaustive RBF (C, gamma) search on one shared fold assignment.

    The best point has the highest mean CV accuracy; ties go to the smaller C,
    then the smaller gamma.
    """
    C_grid, gamma_grid = list(C_grid), list(gamma_grid)
    if not C_grid or not gamma_grid:
        raise ModelSelectionError("grids must be nonempty")
    folds = kfold_split(ds, k, seed)
    points = []
    for C in C_grid:
        for gamma in gamma_grid:
            s = cross_validate(ds, KernelSpec.rbf(gamma), C, folds)
            points.append(
                GridPoint(C, gamma, s.mean, tuple(s.fold_accuracies), tuple(s.degenerate_folds))
            )
    best = min(points, key=lambda p: (-p.mean_accuracy, p.C, p.gamma))
    return GridSearchResult(points, best.C, best.gamma, k)
