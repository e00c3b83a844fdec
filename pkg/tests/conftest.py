import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from findistress import experiment
from findistress.dataset import bundled_testing_set, bundled_training_set


@pytest.fixture(scope="session")
def train_ds():
    return bundled_training_set()


@pytest.fixture(scope="session")
def test_ds():
    return bundled_testing_set()


@pytest.fixture(scope="session")
def reference_svm(train_ds):
    """SVM at rbf gamma=0.25, C=1 behind the [-1, 1] training scaler."""
    return experiment.train_svm_pipeline(train_ds)


@pytest.fixture(scope="session")
def reproduction():
    return experiment.reproduce()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
