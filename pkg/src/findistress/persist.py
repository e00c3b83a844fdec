"""JSON model files: a fitted model together with the scaler it was trained behind.

Floats are written with Python's shortest round-trip repr, so a saved model
reloads bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import ScalerParams
from .mlp import MlpModel
from .svm import SvmModel

FORMAT_VERSION = 1


class ModelFileError(ValueError):
    pass


@dataclass(frozen=True)
class ModelBundle:
    model: SvmModel | MlpModel
    scaler: ScalerParams
    feature_names: tuple[str, ...]

    @property
    def kind(self) -> str:
        return "svm" if isinstance(self.model, SvmModel) else "mlp"

    def predict(self, X) -> np.ndarray:
        return self.model.predict(self.scaler.transform(X))


def save_model(bundle: ModelBundle, path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": bundle.kind,
        "feature_names": list(bundle.feature_names),
        "scaler": bundle.scaler.to_dict(),
        "model": bundle.model.to_dict(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_model(path) -> ModelBundle:
    try:
        doc = json.loads(Path(path).read_text())
        kind = doc["kind"]
        cls = {"svm": SvmModel, "mlp": MlpModel}[kind]
        return ModelBundle(
            model=cls.from_dict(doc["model"]),
            scaler=ScalerParams.from_dict(doc["scaler"]),
            feature_names=tuple(doc["feature_names"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"{path}: not a valid model file ({exc})") from None
