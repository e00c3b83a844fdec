"""Kernel functions and Gram matrices.

Four families are supported::

    linear      K(x, z) = x.z
    polynomial  K(x, z) = (x.z + 1) ** d
    sigmoid     K(x, z) = tanh(x.z + 1)        (not positive semidefinite in general)
    rbf         K(x, z) = exp(-gamma * |x - z|^2)

A kernel is written on the command line and in model files as
``linear``, ``poly:d=<int>``, ``sigmoid`` or ``rbf:gamma=<float>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("linear", "polynomial", "sigmoid", "rbf")

# no degree is ever stated for the polynomial kernel; 3 is only a convention
DEFAULT_DEGREE = 3


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    degree: int | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KernelError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "polynomial":
            if self.degree is None:
                object.__setattr__(self, "degree", DEFAULT_DEGREE)
            if int(self.degree) != self.degree or self.degree <= 0:
                raise KernelError(f"polynomial degree must be a positive integer, got {self.degree!r}")
            object.__setattr__(self, "degree", int(self.degree))
        elif self.degree is not None:
            raise KernelError(f"degree is only valid for the polynomial kernel")
        if self.kind == "rbf":
            if self.gamma is None or not (float(self.gamma) > 0 and math.isfinite(self.gamma)):
                raise KernelError(f"rbf gamma must be a positive real, got {self.gamma!r}")
            object.__setattr__(self, "gamma", float(self.gamma))
        elif self.gamma is not None:
            raise KernelError("gamma is only valid for the rbf kernel")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    @classmethod
    def polynomial(cls, degree: int = DEFAULT_DEGREE) -> "KernelSpec":
        return cls("polynomial", degree=degree)

    @classmethod
    def sigmoid(cls) -> "KernelSpec":
        return cls("sigmoid")

    @classmethod
    def rbf(cls, gamma: float) -> "KernelSpec":
        return cls("rbf", gamma=gamma)

    def __str__(self) -> str:
        if self.kind == "polynomial":
            return f"poly:d={self.degree}"
        if self.kind == "rbf":
            return f"rbf:gamma={self.gamma!r}"
        return self.kind


def parse_kernel(text: str) -> KernelSpec:
    """Parse ``linear | poly:d=<int> | sigmoid | rbf:gamma=<float>``."""
    text = text.strip()
    name, _, params = text.partition(":")
    kv = {}
    if params:
        for part in params.split(","):
            key, eq, value = part.partition("=")
            if not eq:
                raise KernelError(f"malformed kernel parameter {part!r} in {text!r}")
            kv[key.strip()] = value.strip()
    try:
        if name == "linear" and not kv:
            return KernelSpec.linear()
        if name == "sigmoid" and not kv:
            return KernelSpec.sigmoid()
        if name in ("poly", "polynomial") and set(kv) <= {"d"}:
            return KernelSpec.polynomial(int(kv["d"]) if "d" in kv else DEFAULT_DEGREE)
        if name == "rbf" and set(kv) == {"gamma"}:
            return KernelSpec.rbf(float(kv["gamma"]))
    except ValueError as exc:
        raise KernelError(f"bad kernel spec {text!r}: {exc}") from None
    raise KernelError(
        f"bad kernel spec {text!r}; expected linear | poly:d=<int> | sigmoid | rbf:gamma=<float>"
    )


def _as_vector(v) -> np.ndarray:
    return np.asarray(v, dtype=float).reshape(-1)


def kernel_eval(spec: KernelSpec, x, z) -> float:
    x, z = _as_vector(x), _as_vector(z)
    if x.shape != z.shape:
        raise KernelError(f"dimension mismatch: {x.size} vs {z.size}")
    if spec.kind == "rbf":
        d = x - z
        return math.exp(-spec.gamma * float(d @ d))
    # summing elementwise products in a fixed order keeps K(x, z) == K(z, x) exactly
    dot = float(math.fsum(x * z))
    if spec.kind == "linear":
        return dot
    if spec.kind == "polynomial":
        return (dot + 1.0) ** spec.degree
    return math.tanh(dot + 1.0)


def kernel_matrix(spec: KernelSpec, A, B) -> np.ndarray:
    """Cross-kernel matrix ``K[i, j] = K(A[i], B[j])``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise KernelError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if spec.kind == "rbf":
        diff = A[:, None, :] - B[None, :, :]
        return np.exp(-spec.gamma * np.einsum("ijk,ijk->ij", diff, diff))
    dot = np.einsum("ik,jk->ij", A, B)
    if spec.kind == "linear":
        return dot
    if spec.kind == "polynomial":
        return (dot + 1.0) ** spec.degree
    return np.tanh(dot + 1.0)


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise KernelError("empty point set")
    G = kernel_matrix(spec, X, X)
    # enforce exact symmetry against summation-order noise
    return np.triu(G) + np.triu(G, 1).T
