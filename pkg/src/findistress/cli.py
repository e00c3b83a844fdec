"""Command-line interface: ``findistress train-svm | train-mlp | gridsearch | evaluate | reproduce``.

When ``--data`` is omitted the bundled experiment data is used: the 20-company
training table for training commands, the 25-company hold-out table for
``evaluate``. Everything a command writes goes under ``--out``.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import click

from . import experiment
from .dataset import Dataset, DatasetError, load_csv, bundled_testing_set, bundled_training_set
from .evaluation import compare, evaluate
from .kernel import KernelError, KernelSpec, parse_kernel
from .mlp import MlpConfig, MlpError
from .modelsel import DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, ModelSelectionError, grid_search
from .persist import ModelFileError, load_model, save_model
from .svm import SvmError

MODULE_ERRORS = (DatasetError, KernelError, SvmError, MlpError, ModelSelectionError, ModelFileError)

data_option = click.option(
    "--data",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="CSV with header f1,...,fn,label. Defaults to the bundled table.",
)
out_option = click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("."),
    show_default=True,
    help="Output directory.",
)
format_option = click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv", "text"]),
    default="json",
    show_default=True,
)


def _load(path: Path | None, default) -> Dataset:
    return default() if path is None else load_csv(path)


def _parse_seeds(text: str) -> list[int]:
    """``"0-9"``, ``"1,4,7"`` or a single seed."""
    seeds: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                a, b = part.split("-", 1)
                seeds.extend(range(int(a), int(b) + 1))
            elif part:
                seeds.append(int(part))
    except ValueError:
        raise click.BadParameter(f"cannot parse seed list {text!r}") from None
    if not seeds or min(seeds) < 0:
        raise click.BadParameter(f"seed list {text!r} must contain non-negative integers")
    return seeds


def _parse_floats(text: str | None, default):
    if text is None:
        return list(default)
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"cannot parse number list {text!r}") from None


def _emit(out: Path, stem: str, payload: dict, text: str, fmt: str) -> None:
    """Print the payload in the chosen format and write it to ``out/stem.<ext>``."""
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        body, ext = json.dumps(payload, indent=2), "json"
    elif fmt == "text":
        body, ext = text, "txt"
    else:
        flat = {k: v for k, v in payload.items() if not isinstance(v, (list, dict))}
        body = ",".join(flat) + "\n" + ",".join(str(v) for v in flat.values())
        ext = "csv"
    (out / f"{stem}.{ext}").write_text(body + "\n")
    click.echo(body)


def _run(fn):
    """Turn module errors into exit status 1 with a one-line message."""
    try:
        return fn()
    except MODULE_ERRORS as exc:
        raise click.ClickException(str(exc)) from None


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    """Financial distress classification with a kernel SVM and a back-propagation network."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(name)s: %(message)s")


@main.command("train-svm")
@data_option
@click.option("--kernel", default="rbf:gamma=0.25", show_default=True,
              help="linear | poly:d=<int> | sigmoid | rbf:gamma=<float>")
@click.option("--c", "C", type=float, default=1.0, show_default=True)
@click.option("--gamma", type=float, default=None, help="Shortcut for --kernel rbf:gamma=<value>.")
@click.option("--seed", type=int, default=0, show_default=True)
@out_option
@format_option
def train_svm_cmd(data, kernel, C, gamma, seed, out, fmt):
    """Scale the data, train the SVM and write svm_model.json."""

    def go():
        ds = _load(data, bundled_training_set)
        spec = KernelSpec.rbf(gamma) if gamma is not None else parse_kernel(kernel)
        run = experiment.train_svm_pipeline(ds, spec, C, seed=seed)
        out.mkdir(parents=True, exist_ok=True)
        save_model(run.bundle, out / "svm_model.json")
        s = run.summary()
        text = (
            f"kernel {s['kernel']}, C={s['C']}\n"
            f"training accuracy {run.train_correct}/{run.n_train} "
            f"({100.0 * s['train_accuracy']:.1f}%)\n"
            f"support vectors {run.n_support}\n"
            f"KKT residual {run.kkt_residual:.3g}"
        )
        _emit(out, "svm_train_report", s, text, fmt)

    _run(go)


@main.command("train-mlp")
@data_option
@click.option("--seeds", default=None, help="Seed list for a sweep, e.g. 0-9 or 1,3,5.")
@click.option("--seed", type=int, default=None, help="Single seed (ignored when --seeds is given).")
@click.option("--eta", type=float, default=0.7, show_default=True, help="Learning rate.")
@click.option("--momentum", type=float, default=0.3, show_default=True)
@click.option("--hidden", type=int, default=4, show_default=True)
@click.option("--max-epochs", type=int, default=10000, show_default=True)
@click.option("--rms-target", type=float, default=0.01, show_default=True)
@out_option
@format_option
def train_mlp_cmd(data, seeds, seed, eta, momentum, hidden, max_epochs, rms_target, out, fmt):
    """Train one network per seed; keep the best (training accuracy, then RMS)."""

    def go():
        ds = _load(data, bundled_training_set)
        if seeds is not None:
            seed_list = _parse_seeds(seeds)
        else:
            seed_list = [seed if seed is not None else 0]
        cfg = MlpConfig(
            n_input=ds.n_features,
            n_hidden=hidden,
            learning_rate=eta,
            momentum=momentum,
            max_epochs=max_epochs,
            rms_target=rms_target,
        )
        for msg in cfg.out_of_range():
            click.echo(f"warning: {msg}", err=True)
        runs = experiment.mlp_sweep(ds, cfg, seed_list)
        best = experiment.best_seed(runs)
        out.mkdir(parents=True, exist_ok=True)
        save_model(best.bundle, out / "mlp_model.json")
        experiment.write_trace_csv(best.trace, out / "mlp_trace.csv")
        with (out / "mlp_seeds.csv").open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(runs[0].summary()), lineterminator="\n")
            w.writeheader()
            for r in runs:
                w.writerow(r.summary())
        payload = {"best_seed": best.seed, **best.summary(), "seeds": [r.summary() for r in runs]}
        lines = [
            f"seed {r.seed}: {r.train_correct}/{r.n_train} correct, RMS {r.final_rms:.4g}, "
            f"{r.trace.epochs_run} epochs" for r in runs
        ]
        lines.append(f"best seed {best.seed}: {best.train_correct}/{best.n_train}")
        _emit(out, "mlp_train_report", payload, "\n".join(lines), fmt)

    _run(go)


@main.command("gridsearch")
@data_option
@click.option("--k", type=int, default=3, show_default=True, help="Number of folds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--c-grid", default=None, help="Comma-separated C values (default 2^-5..2^15 step 2^2, plus 1).")
@click.option("--gamma-grid", default=None,
              help="Comma-separated gamma values (default 2^-15..2^3 step 2^2, plus 0.25).")
@out_option
def gridsearch_cmd(data, k, seed, c_grid, gamma_grid, out):
    """k-fold CV over a (C, gamma) grid for the RBF SVM; writes grid.csv."""

    def go():
        ds = _load(data, bundled_training_set)
        result = grid_search(
            ds,
            _parse_floats(c_grid, DEFAULT_C_GRID),
            _parse_floats(gamma_grid, DEFAULT_GAMMA_GRID),
            k=k,
            seed=seed,
        )
        out.mkdir(parents=True, exist_ok=True)
        result.write_csv(out / "grid.csv")
        click.echo(
            f"best C={result.best_C!r} gamma={result.best_gamma!r} "
            f"mean CV accuracy {result.best.mean_accuracy:.4f}"
        )

    _run(go)


@main.command("evaluate")
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@data_option
@out_option
@format_option
def evaluate_cmd(model_path, data, out, fmt):
    """Predict with a saved model (behind its stored scaler) and count Type I/II errors."""

    def go():
        bundle = load_model(model_path)
        ds = _load(data, bundled_testing_set)
        if ds.n_features != bundle.scaler.n_features:
            raise DatasetError(
                f"dimension mismatch: model expects {bundle.scaler.n_features} features, "
                f"data has {ds.n_features}"
            )
        report = evaluate(bundle.predict(ds.X), ds.y)
        table = compare([(bundle.kind.upper(), report)])
        _emit(out, "evaluation", report.to_dict(), table.render(), fmt)

    _run(go)


@main.command("reproduce")
@click.option("--seeds", default="0-9", show_default=True, help="BPN seed sweep.")
@out_option
@format_option
def reproduce_cmd(seeds, out, fmt):
    """SVM vs. BPN on the bundled data; exit 1 if any reproduction threshold fails."""

    def go():
        rep = experiment.reproduce(_parse_seeds(seeds))
        experiment.write_artifacts(rep, out)
        if fmt == "json":
            click.echo(json.dumps({"comparison": rep.table.to_dict()}, indent=2))
        else:
            click.echo(rep.table.render())
        for c in rep.checks:
            click.echo(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        failed = [c.name for c in rep.checks if not c.passed]
        if failed:
            raise click.ClickException(f"reproduction thresholds not met: {', '.join(failed)}")

    _run(go)


if __name__ == "__main__":
    main()
