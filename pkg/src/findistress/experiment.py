"""End-to-end pipelines: scale, fit, sweep seeds, and the full SVM-vs-BPN comparison."""

from __future__ import annotations

import csv
import json
import statistics
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dataset import Dataset, fit_scaler, bundled_testing_set, bundled_training_set, save_csv, scale_dataset
from .evaluation import ComparisonTable, EvaluationReport, compare, evaluate
from .kernel import KernelSpec
from .mlp import MlpConfig, TrainingTrace, train
from .modelsel import PIPELINE_RANGE
from .persist import ModelBundle, save_model
from .svm import SmoResult, TrainConfig, fit_svm, kkt_report

DEFAULT_KERNEL = KernelSpec.rbf(0.25)
DEFAULT_C = 1.0
DEFAULT_SEEDS = tuple(range(10))

# pass/fail thresholds checked by `reproduce`
SVM_TRAIN_CORRECT = 20
SVM_SV_RANGE = (7, 11)
SVM_TEST_CORRECT = 25
MLP_BEST_TRAIN_CORRECT = 19
MLP_BEST_TEST_CORRECT = 24
MLP_MEDIAN_TEST_CORRECT = 22


@dataclass
class SvmRun:
    bundle: ModelBundle
    smo: SmoResult
    train_correct: int
    n_train: int
    kkt_residual: float

    @property
    def n_support(self) -> int:
        return self.bundle.model.n_support

    def summary(self) -> dict:
        return {
            "kernel": str(self.bundle.model.kernel),
            "C": self.bundle.model.C,
            "train_correct": self.train_correct,
            "n_train": self.n_train,
            "train_accuracy": self.train_correct / self.n_train,
            "n_support": self.n_support,
            "kkt_residual": self.kkt_residual,
            "smo_iterations": self.smo.iterations,
            "dual_objective": self.smo.objective_trace[-1],
        }


def train_svm_pipeline(
    ds: Dataset,
    kernel: KernelSpec = DEFAULT_KERNEL,
    C: float = DEFAULT_C,
    seed: int = 0,
    feature_range=PIPELINE_RANGE,
) -> SvmRun:
    scaler = fit_scaler(ds, feature_range)
    scaled = scale_dataset(scaler, ds)
    fit = fit_svm(scaled, kernel, TrainConfig(C=C, seed=seed))
    model = fit.model
    correct = int((model.predict(scaled.X) == scaled.y).sum())
    return SvmRun(
        bundle=ModelBundle(model, scaler, ds.feature_names),
        smo=fit.result,
        train_correct=correct,
        n_train=len(ds),
        kkt_residual=kkt_report(model, scaled),
    )


@dataclass
class SeedRun:
    seed: int
    bundle: ModelBundle
    trace: TrainingTrace
    train_correct: int
    n_train: int

    @property
    def final_rms(self) -> float:
        return self.trace.rms[-1]

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "epochs": self.trace.epochs_run,
            "converged": self.trace.converged,
            "final_rms": self.final_rms,
            "train_correct": self.train_correct,
            "n_train": self.n_train,
        }


def mlp_sweep(
    ds: Dataset,
    cfg: MlpConfig = MlpConfig(),
    seeds=DEFAULT_SEEDS,
    feature_range=PIPELINE_RANGE,
) -> list[SeedRun]:
    """Train one network per seed on the scaled data, in seed order."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    scaler = fit_scaler(ds, feature_range)
    scaled = scale_dataset(scaler, ds)
    runs = []
    with warnings.catch_warnings():
        # range warnings are reported once by the caller, not per seed
        warnings.simplefilter("ignore")
        for seed in seeds:
            model, trace = train(replace(cfg, seed=seed), scaled)
            correct = int((model.predict(scaled.X) == scaled.y).sum())
            runs.append(SeedRun(seed, ModelBundle(model, scaler, ds.feature_names), trace, correct, len(ds)))
    return runs


def best_seed(runs: list[SeedRun]) -> SeedRun:
    """Highest training accuracy, then lowest final RMS, then lowest seed."""
    return min(runs, key=lambda r: (-r.train_correct, r.final_rms, r.seed))


def write_trace_csv(trace: TrainingTrace, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "rms"])
        for epoch, rms in enumerate(trace.rms, start=1):
            w.writerow([epoch, repr(rms)])


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class Reproduction:
    svm: SvmRun
    svm_test: EvaluationReport
    mlp_runs: list[SeedRun]
    mlp_best: SeedRun
    mlp_test: EvaluationReport
    mlp_test_by_seed: dict[int, EvaluationReport]
    table: ComparisonTable
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def reproduce(
    seeds=DEFAULT_SEEDS,
    mlp_config: MlpConfig = MlpConfig(),
    train_ds: Dataset | None = None,
    test_ds: Dataset | None = None,
) -> Reproduction:
    """SVM (rbf gamma=0.25, C=1) vs. a seed sweep of 4-4-1 networks on the bundled data."""
    train_ds = train_ds or bundled_training_set()
    test_ds = test_ds or bundled_testing_set()

    svm = train_svm_pipeline(train_ds)
    svm_test = evaluate(svm.bundle.predict(test_ds.X), test_ds.y)

    runs = mlp_sweep(train_ds, mlp_config, seeds)
    best = best_seed(runs)
    by_seed = {r.seed: evaluate(r.bundle.predict(test_ds.X), test_ds.y) for r in runs}
    mlp_test = by_seed[best.seed]
    table = compare([("SVM", svm_test), ("BPN", mlp_test)])

    median_correct = statistics.median(r.correct for r in by_seed.values())
    lo, hi = SVM_SV_RANGE
    checks = [
        Check(
            "svm-train-accuracy",
            svm.train_correct >= SVM_TRAIN_CORRECT,
            f"{svm.train_correct}/{svm.n_train} (need {SVM_TRAIN_CORRECT}/{svm.n_train})",
        ),
        Check(
            "svm-support-vectors",
            lo <= svm.n_support <= hi,
            f"{svm.n_support} support vectors (need {lo}..{hi})",
        ),
        Check(
            "svm-test-accuracy",
            svm_test.correct >= SVM_TEST_CORRECT,
            f"{svm_test.correct}/{svm_test.n}, type I {svm_test.type1_count}, "
            f"type II {svm_test.type2_count} (need {SVM_TEST_CORRECT}/{svm_test.n})",
        ),
        Check(
            "bpn-best-train-accuracy",
            best.train_correct >= MLP_BEST_TRAIN_CORRECT,
            f"seed {best.seed}: {best.train_correct}/{best.n_train} (need >= {MLP_BEST_TRAIN_CORRECT})",
        ),
        Check(
            "bpn-best-test-accuracy",
            mlp_test.correct >= MLP_BEST_TEST_CORRECT and mlp_test.type1_count == 0,
            f"seed {best.seed}: {mlp_test.correct}/{mlp_test.n}, type I {mlp_test.type1_count}, "
            f"type II {mlp_test.type2_count} (need >= {MLP_BEST_TEST_CORRECT} with no type I)",
        ),
        Check(
            "bpn-median-test-accuracy",
            median_correct >= MLP_MEDIAN_TEST_CORRECT,
            f"median {median_correct}/{len(test_ds)} over {len(runs)} seeds "
            f"(need >= {MLP_MEDIAN_TEST_CORRECT})",
        ),
    ]
    return Reproduction(svm, svm_test, runs, best, mlp_test, by_seed, table, checks)


def write_artifacts(rep: Reproduction, out_dir, train_ds: Dataset | None = None, test_ds: Dataset | None = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(train_ds or bundled_training_set(), out / "train.csv")
    save_csv(test_ds or bundled_testing_set(), out / "test.csv")
    save_model(rep.svm.bundle, out / "svm_model.json")
    save_model(rep.mlp_best.bundle, out / "mlp_model.json")
    write_trace_csv(rep.mlp_best.trace, out / "mlp_trace.csv")
    (out / "svm_report.json").write_text(rep.svm_test.to_json() + "\n")
    (out / "mlp_report.json").write_text(rep.mlp_test.to_json() + "\n")
    (out / "comparison.txt").write_text(rep.table.render() + "\n")
    summary = {
        "svm": rep.svm.summary(),
        "mlp_seeds": [
            {**r.summary(), "test_correct": rep.mlp_test_by_seed[r.seed].correct}
            for r in rep.mlp_runs
        ],
        "mlp_best_seed": rep.mlp_best.seed,
        "comparison": rep.table.to_dict(),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in rep.checks],
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
