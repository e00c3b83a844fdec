"""One-hidden-layer back-propagation network with momentum.

Forward pass (tanh on both layers)::

    net_k = sum_i w_ik x_i - theta_k      H_k = tanh(net_k)
    net_j = sum_k w_kj H_k - theta_j      Y_j = tanh(net_j)

Per-sample delta rule with momentum ``a`` and learning rate ``eta``::

    delta_j = (T_j - Y_j) (1 - Y_j^2)
    delta_k = (sum_j delta_j w_kj) (1 - H_k^2)
    dw_kj   = eta delta_j H_k + a dw_kj(prev)      dtheta_j = -eta delta_j + a dtheta_j(prev)
    dw_ik   = eta delta_k x_i + a dw_ik(prev)      dtheta_k = -eta delta_k + a dtheta_k(prev)

Training presents samples in dataset order, one update per sample, and stops
once the epoch RMS error falls below ``rms_target`` or ``max_epochs`` is hit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Dataset

ETA_RANGE = (0.6, 0.9)
MOMENTUM_RANGE = (0.1, 0.4)


class MlpError(ValueError):
    pass


class RecommendedRangeWarning(UserWarning):
    """Learning rate or momentum outside the range recommended for this network."""


@dataclass(frozen=True)
class MlpConfig:
    n_input: int = 4
    n_hidden: int = 4
    n_output: int = 1
    learning_rate: float = 0.7
    momentum: float = 0.3
    max_epochs: int = 10000
    rms_target: float = 0.01
    seed: int = 0

    def __post_init__(self):
        for name in ("n_input", "n_hidden", "n_output", "max_epochs"):
            if int(getattr(self, name)) <= 0:
                raise MlpError(f"{name} must be a positive integer")
        if self.n_output != 1:
            raise MlpError("only a single output unit is supported")
        if not self.learning_rate > 0:
            raise MlpError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise MlpError("momentum must lie in [0, 1)")
        if not self.rms_target > 0:
            raise MlpError("rms_target must be positive")
        if self.seed < 0:
            raise MlpError("seed must be non-negative")

    def out_of_range(self) -> list[str]:
        """Messages for hyperparameters outside the recommended ranges."""
        msgs = []
        lo, hi = ETA_RANGE
        if not lo <= self.learning_rate <= hi:
            msgs.append(f"learning rate {self.learning_rate} outside recommended [{lo}, {hi}]")
        lo, hi = MOMENTUM_RANGE
        if not lo <= self.momentum <= hi:
            msgs.append(f"momentum {self.momentum} outside recommended [{lo}, {hi}]")
        return msgs


@dataclass
class MlpModel:
    w_ih: np.ndarray  # (n_input, n_hidden)
    theta_hidden: np.ndarray  # (n_hidden,)
    w_ho: np.ndarray  # (n_hidden, n_output)
    theta_out: np.ndarray  # (n_output,)
    prev_dw_ih: np.ndarray
    prev_dtheta_hidden: np.ndarray
    prev_dw_ho: np.ndarray
    prev_dtheta_out: np.ndarray
    config: MlpConfig

    ARRAYS = (
        "w_ih",
        "theta_hidden",
        "w_ho",
        "theta_out",
        "prev_dw_ih",
        "prev_dtheta_hidden",
        "prev_dw_ho",
        "prev_dtheta_out",
    )

    def __post_init__(self):
        c = self.config
        shapes = {
            "w_ih": (c.n_input, c.n_hidden),
            "theta_hidden": (c.n_hidden,),
            "w_ho": (c.n_hidden, c.n_output),
            "theta_out": (c.n_output,),
        }
        for name in self.ARRAYS:
            arr = np.array(getattr(self, name), dtype=float)
            base = name[len("prev_d"):] if name.startswith("prev_d") else name
            if arr.shape != shapes[base]:
                raise MlpError(f"{name} has shape {arr.shape}, expected {shapes[base]}")
            if not np.isfinite(arr).all():
                raise MlpError(f"{name} contains non-finite values")
            setattr(self, name, arr)

    def copy(self) -> "MlpModel":
        return replace(self, **{name: getattr(self, name).copy() for name in self.ARRAYS})

    def to_dict(self) -> dict:
        d = {name: getattr(self, name).tolist() for name in self.ARRAYS}
        d["config"] = {
            "n_input": self.config.n_input,
            "n_hidden": self.config.n_hidden,
            "n_output": self.config.n_output,
            "learning_rate": self.config.learning_rate,
            "momentum": self.config.momentum,
            "max_epochs": self.config.max_epochs,
            "rms_target": self.config.rms_target,
            "seed": self.config.seed,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MlpModel":
        return cls(config=MlpConfig(**d["config"]), **{name: d[name] for name in cls.ARRAYS})

    def predict(self, X) -> np.ndarray:
        _, Y = forward_batch(self, X)
        return np.where(Y[:, 0] >= 0, 1, -1)


@dataclass
class TrainingTrace:
    rms: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.rms)


def init_network(cfg: MlpConfig) -> MlpModel:
    """Uniform [-0.5, 0.5] weights and thresholds from a seeded generator."""
    rng = np.random.default_rng(cfg.seed)

    def draw(*shape):
        return rng.uniform(-0.5, 0.5, size=shape)

    w_ih = draw(cfg.n_input, cfg.n_hidden)
    theta_hidden = draw(cfg.n_hidden)
    w_ho = draw(cfg.n_hidden, cfg.n_output)
    theta_out = draw(cfg.n_output)
    return MlpModel(
        w_ih=w_ih,
        theta_hidden=theta_hidden,
        w_ho=w_ho,
        theta_out=theta_out,
        prev_dw_ih=np.zeros_like(w_ih),
        prev_dtheta_hidden=np.zeros_like(theta_hidden),
        prev_dw_ho=np.zeros_like(w_ho),
        prev_dtheta_out=np.zeros_like(theta_out),
        config=cfg,
    )


def _check_input(m: MlpModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != m.config.n_input:
        raise MlpError(
            f"dimension mismatch: network has {m.config.n_input} inputs, got {x.shape[-1]}"
        )
    return x


def forward(m: MlpModel, x) -> tuple[np.ndarray, np.ndarray]:
    """Hidden activations H and outputs Y for one input vector."""
    x = _check_input(m, x).reshape(-1)
    H = np.tanh(x @ m.w_ih - m.theta_hidden)
    Y = np.tanh(H @ m.w_ho - m.theta_out)
    return H, Y


def forward_batch(m: MlpModel, X) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(_check_input(m, X))
    H = np.tanh(X @ m.w_ih - m.theta_hidden)
    Y = np.tanh(H @ m.w_ho - m.theta_out)
    return H, Y


def backward_deltas(m: MlpModel, H, Y, T) -> tuple[np.ndarray, np.ndarray]:
    """Output and hidden deltas, using tanh' = 1 - tanh^2 from the cached activations."""
    H, Y, T = (np.asarray(v, dtype=float).reshape(-1) for v in (H, Y, T))
    delta_out = (T - Y) * (1.0 - Y * Y)
    delta_hidden = (m.w_ho @ delta_out) * (1.0 - H * H)
    return delta_out, delta_hidden


def apply_update(m: MlpModel, x, H, delta_out, delta_hidden) -> MlpModel:
    """One momentum step; updates ``m`` in place and returns it."""
    eta, a = m.config.learning_rate, m.config.momentum
    x, H = np.asarray(x, dtype=float).reshape(-1), np.asarray(H, dtype=float).reshape(-1)

    dw_ho = eta * np.outer(H, delta_out) + a * m.prev_dw_ho
    dtheta_out = -eta * delta_out + a * m.prev_dtheta_out
    dw_ih = eta * np.outer(x, delta_hidden) + a * m.prev_dw_ih
    dtheta_hidden = -eta * delta_hidden + a * m.prev_dtheta_hidden

    m.w_ho += dw_ho
    m.theta_out += dtheta_out
    m.w_ih += dw_ih
    m.theta_hidden += dtheta_hidden
    m.prev_dw_ho, m.prev_dtheta_out = dw_ho, dtheta_out
    m.prev_dw_ih, m.prev_dtheta_hidden = dw_ih, dtheta_hidden
    return m


def rms_error(m: MlpModel, ds: Dataset) -> float:
    if len(ds) == 0:
        raise MlpError("empty dataset")
    _, Y = forward_batch(m, ds.X)
    T = ds.y.reshape(-1, 1).astype(float)
    return math.sqrt(float(((Y - T) ** 2).sum()) / len(ds))


def train(cfg: MlpConfig, ds: Dataset, model: MlpModel | None = None) -> tuple[MlpModel, TrainingTrace]:
    """Online back-propagation until the epoch RMS drops below the target.

    ``model`` continues training from an existing network (copied, not mutated).
    """
    if ds.n_features != cfg.n_input:
        raise MlpError(
            f"dimension mismatch: network has {cfg.n_input} inputs, dataset has {ds.n_features}"
        )
    for msg in cfg.out_of_range():
        warnings.warn(msg, RecommendedRangeWarning, stacklevel=2)
    m = init_network(cfg) if model is None else model.copy()
    X = ds.X
    T = ds.y.reshape(-1, 1).astype(float)
    trace = TrainingTrace()
    for epoch in range(1, cfg.max_epochs + 1):
        for x, t in zip(X, T):
            H, Y = forward(m, x)
            d_out, d_hidden = backward_deltas(m, H, Y, t)
            apply_update(m, x, H, d_out, d_hidden)
        rms = rms_error(m, ds)
        if not math.isfinite(rms) or not all(np.isfinite(getattr(m, n)).all() for n in MlpModel.ARRAYS):
            raise MlpError(f"non-finite values during training at epoch {epoch}")
        trace.rms.append(rms)
        if rms < cfg.rms_target:
            trace.converged = True
            break
    return m, trace


def predict_mlp(m: MlpModel, x) -> int:
    """+1 when the output is non-negative, else -1."""
    _, Y = forward(m, x)
    return 1 if Y[0] >= 0 else -1
