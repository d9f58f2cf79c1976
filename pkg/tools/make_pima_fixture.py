"""Generate the shipped diabetes fixture CSV.

Produces a deterministic synthetic cohort with the same shape and
encoding conventions as the classic Pima Indians diabetes table:
768 rows, eight numeric predictors plus a binary Outcome, class split
500/268, and physiologically impossible zeros standing in for missing
values in the five affected columns (Glucose 5, BloodPressure 35,
SkinThickness 227, Insulin 374, BMI 11).

Run from the repo root:

    python tools/make_pima_fixture.py

Rewrites src/modelsteer/fixtures/pima.csv in place.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

N_NEG = 500
N_POS = 268
ZERO_COUNTS = {
    "Glucose": 5,
    "BloodPressure": 35,
    "SkinThickness": 227,
    "Insulin": 374,
    "BMI": 11,
}
COLUMNS = [
    "Pregnancies", "Glucose", "BloodPressure", "SkinThickness",
    "Insulin", "BMI", "DiabetesPedigreeFunction", "Age", "Outcome",
]
SEED = 20240301


def _sample_class(gen: np.random.Generator, n: int, positive: bool) -> dict[str, np.ndarray]:
    c = 1.0 if positive else 0.0
    metabolic = gen.normal(0.0, 1.0, n)
    adiposity = 0.5 * metabolic + 0.87 * gen.normal(0.0, 1.0, n)
    noise = lambda: gen.normal(0.0, 1.0, n)  # noqa: E731

    glucose = np.clip(np.rint(110 + 32 * c + 22 * metabolic + 8 * noise()), 56, 199)
    insulin = np.clip(
        np.rint(np.exp(4.55 + 0.45 * c + 0.55 * metabolic + 0.35 * noise())), 15, 846
    )
    bmi = np.clip(np.round(30.8 + 4.3 * c + 5.2 * adiposity + 1.5 * noise(), 1), 18.2, 67.1)
    skin = np.clip(np.rint(27 + 5.5 * c + 6.5 * adiposity + 4 * noise()), 7, 99)
    bp = np.clip(np.rint(71 + 4 * c + 4.5 * adiposity + 9.5 * noise()), 24, 122)
    age = np.clip(np.rint(21 + gen.gamma(1.7, 6.2 + 2.6 * c, n)), 21, 81)
    pregnancies = np.clip(
        gen.poisson(1.6 + 1.1 * c + np.maximum(age - 24, 0) / 14.0), 0, 17
    )
    dpf = np.clip(np.round(np.exp(-1.02 + 0.22 * c + 0.55 * noise()), 3), 0.078, 2.42)

    return {
        "Pregnancies": pregnancies.astype(int),
        "Glucose": glucose.astype(int),
        "BloodPressure": bp.astype(int),
        "SkinThickness": skin.astype(int),
        "Insulin": insulin.astype(int),
        "BMI": bmi,
        "DiabetesPedigreeFunction": dpf,
        "Age": age.astype(int),
    }


def build_rows() -> list[list]:
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(SEED)))
    neg = _sample_class(gen, N_NEG, positive=False)
    pos = _sample_class(gen, N_POS, positive=True)

    columns: dict[str, np.ndarray] = {}
    for name in COLUMNS[:-1]:
        columns[name] = np.concatenate([neg[name], pos[name]]).astype(object)
    outcome = np.array([0] * N_NEG + [1] * N_POS, dtype=object)

    # zero-code "missing" cells in the physiological columns
    n = N_NEG + N_POS
    for name, count in ZERO_COUNTS.items():
        hit = gen.choice(n, size=count, replace=False)
        col = columns[name]
        col[hit] = 0 if name != "BMI" else 0.0

    order = gen.permutation(n)
    rows = []
    for i in order:
        row = [columns[name][i] for name in COLUMNS[:-1]] + [outcome[i]]
        rows.append(row)
    return rows


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "src" / "modelsteer" / "fixtures" / "pima.csv"
    rows = build_rows()
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow(row)
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
