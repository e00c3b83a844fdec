"""Soft-margin kernel SVM trained by sequential two-variable dual ascent (SMO).

The dual problem solved is::

    maximise   W(a) = sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    subject to sum_i a_i y_i = 0,  0 <= a_i <= C

and the decision function is ``f(x) = sum_i a_i y_i K(x_i, x) + b``.

Working-pair selection follows the maximal-violating-pair rule: with
``F_i = sum_j a_j y_j K_ij - y_i`` (the prediction error without the bias),
the first index is the worst violator among the points whose ``y_i a_i``
may still grow, the second is the partner maximising ``|F_1 - F_2|`` among
the points whose ``y_j a_j`` may still shrink. The optimisation stops when
``max F(low) - min F(up)`` drops to the KKT tolerance, at which point the
bias can be placed so that every point's KKT residual is within tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .kernel import KernelSpec, gram_matrix, kernel_matrix, parse_kernel

logger = logging.getLogger(__name__)

SV_THRESHOLD = 1e-8


class SvmError(ValueError):
    pass


class SingleClassError(SvmError):
    def __init__(self):
        super().__init__("single-class dataset: both +1 and -1 samples are required")


class ConvergenceError(SvmError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"SMO did not converge after {iterations} pair updates "
            f"(final KKT residual {residual:.3g})"
        )


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    kkt_tolerance: float = 1e-3
    max_passes: int | None = None  # None -> 10 * n sweeps of n pair updates
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise SvmError(f"C must be positive, got {self.C!r}")
        if not self.kkt_tolerance > 0:
            raise SvmError(f"kkt_tolerance must be positive, got {self.kkt_tolerance!r}")
        if self.max_passes is not None and self.max_passes <= 0:
            raise SvmError("max_passes must be positive")
        if self.seed < 0:
            raise SvmError("seed must be non-negative")


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    sv_labels: np.ndarray
    alphas: np.ndarray
    bias: float
    kernel: KernelSpec
    C: float

    def __post_init__(self):
        sv = np.atleast_2d(np.asarray(self.support_vectors, dtype=float))
        labels = np.asarray(self.sv_labels, dtype=int).reshape(-1)
        alphas = np.asarray(self.alphas, dtype=float).reshape(-1)
        if not (len(sv) == len(labels) == len(alphas) >= 1):
            raise SvmError("support vectors, labels and alphas must be equally long and nonempty")
        for arr in (sv, labels, alphas):
            arr.setflags(write=False)
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "sv_labels", labels)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def n_support(self) -> int:
        return len(self.alphas)

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise SvmError(
                f"dimension mismatch: model expects {self.n_features} features, got {X.shape[1]}"
            )
        K = kernel_matrix(self.kernel, X, self.support_vectors)
        return K @ (self.alphas * self.sv_labels) + self.bias

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision_function(X) >= 0, 1, -1)

    def to_dict(self) -> dict:
        return {
            "kernel": str(self.kernel),
            "C": self.C,
            "bias": self.bias,
            "support_vectors": [
                {"alpha": float(a), "label": int(y), "x": [float(v) for v in x]}
                for a, y, x in zip(self.alphas, self.sv_labels, self.support_vectors)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        rows = d["support_vectors"]
        return cls(
            support_vectors=np.array([r["x"] for r in rows], dtype=float),
            sv_labels=np.array([r["label"] for r in rows], dtype=int),
            alphas=np.array([r["alpha"] for r in rows], dtype=float),
            bias=d["bias"],
            kernel=parse_kernel(d["kernel"]),
            C=d["C"],
        )


@dataclass
class SmoResult:
    """Full solver output, including dual variables of non-support vectors."""

    alpha: np.ndarray
    bias: float
    iterations: int
    kkt_gap: float
    objective_trace: list[float] = field(default_factory=list)


def dual_objective(alphas, labels, G) -> float:
    a = np.asarray(alphas, dtype=float)
    ay = a * np.asarray(labels, dtype=float)
    return float(a.sum() - 0.5 * ay @ np.asarray(G, dtype=float) @ ay)


def _up_low_masks(alpha, y, C):
    pos = y > 0
    up = (pos & (alpha < C)) | (~pos & (alpha > 0))
    low = (pos & (alpha > 0)) | (~pos & (alpha < C))
    return up, low


def _violation_gap(F, up, low) -> float:
    if not up.any() or not low.any():
        return 0.0
    return float(F[low].max() - F[up].min())


def compute_bias(alpha, y, G, C, sv_threshold: float = SV_THRESHOLD) -> float:
    """Bias placing every free support vector on its margin.

    Averages ``y_i - sum_j a_j y_j K_ij`` over free vectors (``0 < a_i < C``).
    When every support vector sits at a bound, returns the midpoint of the
    interval of biases consistent with the KKT inequalities.
    """
    alpha = np.asarray(alpha, dtype=float)
    y = np.asarray(y, dtype=float)
    F = np.asarray(G, dtype=float) @ (alpha * y) - y
    free = (alpha > sv_threshold) & (alpha < C - sv_threshold)
    if free.any():
        return float(-F[free].mean())
    up, low = _up_low_masks(alpha, y, C)
    # up: F_i + b >= 0, low: F_i + b <= 0
    lower = float((-F[up]).max()) if up.any() else None
    upper = float((-F[low]).min()) if low.any() else None
    if lower is None and upper is None:
        return 0.0
    if lower is None:
        return upper
    if upper is None:
        return lower
    return 0.5 * (lower + upper)


def _pair_step(i, j, alpha, y, F, G, C):
    """Analytic optimum of W along the feasible segment for the pair (i, j).

    Returns ``(delta_j, gain)`` where ``alpha_j`` moves by ``delta_j`` and
    ``alpha_i`` by ``-y_i y_j delta_j``; ``gain`` is the exact objective increase.
    """
    yi, yj = y[i], y[j]
    ai, aj = alpha[i], alpha[j]
    if yi != yj:
        lo, hi = max(0.0, aj - ai), min(C, C + aj - ai)
    else:
        lo, hi = max(0.0, ai + aj - C), min(C, ai + aj)
    if hi - lo <= 0:
        return 0.0, 0.0
    eta = G[i, i] + G[j, j] - 2.0 * G[i, j]
    slope = yj * (F[i] - F[j])

    def gain(d):
        return d * slope - 0.5 * eta * d * d

    if eta > 0:
        new = min(max(aj + slope / eta, lo), hi)
        d = new - aj
    else:
        # non-convex direction (possible with the sigmoid kernel): best endpoint
        d = max((lo - aj, hi - aj), key=gain)
    return d, gain(d)


def _select_pair(alpha, y, F, G, C, up, low, tol):
    """Worst violator first, partnered with the largest |F_i - F_j| that makes progress.

    Falls back to the next violators when a pair is blocked by its box
    (a zero-length step), so a stall is only reported when nothing moves.
    """
    up_idx = np.flatnonzero(up)
    up_idx = up_idx[np.argsort(F[up_idx], kind="stable")]
    low_idx = np.flatnonzero(low)
    low_idx = low_idx[np.argsort(-F[low_idx], kind="stable")]
    f_low_max = F[low_idx[0]]
    for i in up_idx:
        if F[i] >= f_low_max - tol:
            break
        for j in low_idx:
            if F[j] <= F[i]:
                break
            if j == i:
                continue
            d, gain = _pair_step(i, j, alpha, y, F, G, C)
            if d != 0.0 and gain > 0.0:
                return int(i), int(j), d
    return None


def smo_solve(
    G,
    y,
    C: float,
    tol: float = 1e-3,
    max_iter: int | None = None,
    seed: int = 0,
) -> SmoResult:
    """Maximise the box- and equality-constrained dual for a precomputed Gram matrix."""
    G = np.asarray(G, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if G.shape != (n, n):
        raise SvmError(f"Gram matrix shape {G.shape} does not match {n} labels")
    if not ((y > 0).any() and (y < 0).any()):
        raise SingleClassError()
    if max_iter is None:
        max_iter = 10 * n * n

    # the seed only decides which of several equally violating indices wins
    order = np.random.default_rng(seed).permutation(n)
    Gp, yp = G[np.ix_(order, order)], y[order]

    alpha = np.zeros(n)
    F = -yp.copy()  # g = 0 at alpha = 0
    objective = 0.0
    trace = [objective]
    snap = 1e-12 * C
    it = 0
    while True:
        up, low = _up_low_masks(alpha, yp, C)
        gap = _violation_gap(F, up, low)
        if gap <= tol:
            break
        if it >= max_iter:
            raise ConvergenceError(it, gap)

        step = _select_pair(alpha, yp, F, Gp, C, up, low, tol)
        if step is None:
            raise ConvergenceError(it, gap)
        i, j, dj = step
        old_i, old_j = alpha[i], alpha[j]
        for k, v in ((i, old_i - yp[i] * yp[j] * dj), (j, old_j + dj)):
            if v < snap:
                v = 0.0
            elif v > C - snap:
                v = C
            alpha[k] = v
        F += Gp[:, i] * (yp[i] * (alpha[i] - old_i)) + Gp[:, j] * (yp[j] * (alpha[j] - old_j))
        objective = float(alpha.sum() - 0.5 * (alpha * yp) @ (F + yp))
        trace.append(objective)
        it += 1

    inverse = np.argsort(order)
    alpha = alpha[inverse]
    bias = compute_bias(alpha, y, G, C)
    logger.debug("SMO converged: %d updates, gap %.3g, objective %.6g", it, gap, objective)
    return SmoResult(alpha=alpha, bias=bias, iterations=it, kkt_gap=gap, objective_trace=trace)


@dataclass
class SvmFit:
    model: SvmModel
    result: SmoResult
    gram: np.ndarray


def fit_svm(ds: Dataset, kernel: KernelSpec, cfg: TrainConfig | None = None) -> SvmFit:
    cfg = cfg or TrainConfig()
    X, y = ds.X, ds.y
    n = len(y)
    G = gram_matrix(kernel, X)
    passes = cfg.max_passes if cfg.max_passes is not None else 10 * n
    res = smo_solve(G, y, cfg.C, tol=cfg.kkt_tolerance, max_iter=passes * n, seed=cfg.seed)
    sv = res.alpha > SV_THRESHOLD
    model = SvmModel(
        support_vectors=X[sv],
        sv_labels=y[sv],
        alphas=res.alpha[sv],
        bias=res.bias,
        kernel=kernel,
        C=cfg.C,
    )
    return SvmFit(model=model, result=res, gram=G)


def train_svm(ds: Dataset, kernel: KernelSpec, cfg: TrainConfig | None = None) -> SvmModel:
    return fit_svm(ds, kernel, cfg).model


def decision_value(m: SvmModel, x) -> float:
    return float(m.decision_function(np.asarray(x, dtype=float).reshape(1, -1))[0])


def predict(m: SvmModel, x) -> int:
    """Sign of the decision value; an exact zero is classified +1."""
    return 1 if decision_value(m, x) >= 0 else -1


def kkt_violation(alpha, y, decision_values, C, sv_threshold: float = SV_THRESHOLD) -> float:
    """Largest soft-margin KKT residual given dual variables and decision values.

    With ``m_i = y_i f(x_i)``: ``1 - m_i`` for ``a_i = 0``, ``|m_i - 1|`` for
    free vectors, ``m_i - 1`` for ``a_i = C``; negative residuals count as 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    margins = np.asarray(y, dtype=float) * np.asarray(decision_values, dtype=float)
    at_zero = alpha <= sv_threshold
    at_c = alpha >= C - sv_threshold
    free = ~at_zero & ~at_c
    residual = np.zeros(len(alpha))
    residual[at_zero] = 1.0 - margins[at_zero]
    residual[free] = np.abs(margins[free] - 1.0)
    residual[at_c] = margins[at_c] - 1.0
    return float(max(0.0, residual.max()))


def kkt_report(m: SvmModel, ds: Dataset) -> float:
    """Largest KKT residual of ``m`` over ``ds``.

    Rows of ``ds`` are matched to stored support vectors by value; unmatched
    rows have dual variable 0.
    """
    X, y = ds.X, ds.y
    alpha = np.zeros(len(y))
    for a, label, sv in zip(m.alphas, m.sv_labels, m.support_vectors):
        hits = np.flatnonzero(np.all(X == sv, axis=1) & (y == label) & (alpha == 0))
        if hits.size:
            alpha[hits[0]] = a
    return kkt_violation(alpha, y, m.decision_function(X), m.C)
