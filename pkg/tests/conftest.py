import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from modelsteer.dataset import Dataset, FeatureSpec, ingest_csv
from modelsteer.forest import Hyperparameters, train

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "modelsteer" / "fixtures"


@pytest.fixture(scope="session")
def pima_csv_bytes() -> bytes:
    return (FIXTURES / "pima.csv").read_bytes()


@pytest.fixture(scope="session")
def pima_schema_doc() -> dict:
    return json.loads((FIXTURES / "pima.schema.json").read_text())


@pytest.fixture(scope="session")
def default_hp() -> Hyperparameters:
    doc = json.loads((FIXTURES / "default_hyperparameters.json").read_text())
    return Hyperparameters.from_dict(doc)


@pytest.fixture(scope="session")
def pima(pima_csv_bytes, pima_schema_doc) -> Dataset:
    return ingest_csv(pima_csv_bytes, pima_schema_doc)


@pytest.fixture(scope="session")
def pima_model(pima, default_hp):
    """Trained (artifact, metrics) pair on the shipped fixture; expensive, share it."""
    return train(pima, default_hp)


@pytest.fixture(scope="session")
def pima_issues(pima, default_hp):
    """Detected issues on the fixture; shared because each detection retrains."""
    from modelsteer.corrections import detect_issues

    return detect_issues(pima, default_hp)


@pytest.fixture(scope="session")
def pima_raw_rows(pima_csv_bytes) -> list[dict]:
    """CSV rows as raw string dicts, parsed independently of the engine."""
    reader = csv.DictReader(io.StringIO(pima_csv_bytes.decode("utf-8")))
    return list(reader)


def make_dataset(
    columns: dict[str, list],
    labels: list[int],
    target_labels: tuple[str, str] = ("neg", "pos"),
    zero_is_missing: frozenset[str] = frozenset(),
) -> Dataset:
    """Small-dataset helper: None marks a missing cell."""
    names = list(columns)
    n = len(labels)
    X = np.full((n, len(names)), np.nan)
    for j, name in enumerate(names):
        for i, v in enumerate(columns[name]):
            if v is not None:
                X[i, j] = float(v)
    schema = [
        FeatureSpec(name=name, zero_is_missing=(name in zero_is_missing))
        for name in names
    ]
    return Dataset(schema, "target", list(target_labels), X, np.array(labels))


@pytest.fixture
def separable_toy() -> Dataset:
    """100 noiseless rows split by the sign of a single feature."""
    gen = np.random.default_rng(0)
    x = np.concatenate([gen.uniform(-5, -0.1, 50), gen.uniform(0.1, 5, 50)])
    labels = [0] * 50 + [1] * 50
    return make_dataset({"x": list(x)}, labels)
