"""Per-state relative differences, MRE, percentile bars, method comparison.

Two thresholds govern the denominator of the relative difference:

- relative_difference refuses references below 1e-6 outright; the
  quantity is undefined there (separable states).
- evaluate_method additionally excludes states whose reference GME is
  below a resolution threshold (default 0.05) and reports the count.
  Moment-based estimators carry an intrinsic resolution floor: even for
  an exactly coherent state, 1 - S(q_max) = N(1)/(N q_max + 1), which is
  0.12 at N=4, q_max=8. Dividing that floor by a reference of 1e-4 says
  nothing about estimator quality while dominating the mean, so the
  aggregate is restricted to states the estimators can resolve. The same
  exclusion applies to every method, keeping the comparison unbiased;
  pass exclude_below explicitly to change the population.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .accel import accel_estimate
from .errors import EmptyInputError, NearZeroReferenceError
from .mlp import MlpModel, forward_batch
from .moments import ratio_estimate

EXCLUSION_THRESHOLD = 1e-6
RESOLUTION_THRESHOLD = 0.05
PERCENTILE_LOW = 15.9
PERCENTILE_HIGH = 84.1


def relative_difference(gme_true: float, gme_pred: float) -> float:
    """(true - pred) / true; undefined for near-zero references."""
    if gme_true < EXCLUSION_THRESHOLD:
        raise NearZeroReferenceError(
            f"reference GME {gme_true!r} below exclusion threshold")
    return (gme_true - gme_pred) / gme_true


def mre(deltas) -> float:
    """Mean absolute relative difference."""
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.size == 0:
        raise EmptyInputError("no relative differences to average")
    return float(np.mean(np.abs(deltas)))


def percentile_bars(abs_deltas) -> tuple[float, float]:
    """15.9th and 84.1th percentiles of |delta|, linear interpolation."""
    abs_deltas = np.asarray(abs_deltas, dtype=np.float64)
    if abs_deltas.size == 0:
        raise EmptyInputError("no values for percentile bars")
    low, high = np.percentile(abs_deltas, [PERCENTILE_LOW, PERCENTILE_HIGH],
                              method="linear")
    return float(low), float(high)


@dataclass(frozen=True)
class EvalReport:
    """Aggregated accuracy of one method at one q_max."""

    method: str
    n_qubits: int
    q_max: int
    mre: float
    err_low: float
    err_high: float
    n_used: int
    n_excluded: int
    n_clamped: int = 0
    deltas: np.ndarray | None = field(default=None, repr=False)
    predictions: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.err_low > self.err_high + 1e-15:
            raise ValueError("percentile bars out of order")


def _predictors(method: str, q_max: int, models):
    if method == "ratio":
        return lambda rec: ratio_estimate(rec.moments.truncated(q_max))
    if method == "accel":
        return lambda rec: accel_estimate(rec.moments.truncated(q_max))
    if method == "ann":
        if models is None or q_max not in models:
            raise KeyError(f"no trained model for q_max={q_max}")
        model = models[q_max]

        def predict(rec, model=model):
            from .mlp import predict_gme
            return predict_gme(model, rec.moments)

        return predict
    raise ValueError(f"unknown method {method!r}")


def evaluate_method(test_records, method: str, q_max: int,
                    models: dict | None = None,
                    keep_deltas: bool = False,
                    exclude_below: float = RESOLUTION_THRESHOLD) -> EvalReport:
    """Evaluate one estimator on a test split.

    States with reference GME below exclude_below are counted in
    n_excluded and skipped; see the module docstring for why the
    default sits well above the 1e-6 definedness threshold.
    """
    if not test_records:
        raise EmptyInputError("empty test set")
    n_qubits = test_records[0].n_qubits
    deltas = []
    preds = []
    n_excluded = 0
    n_clamped = 0

    if method == "ann":
        # batch forward pass; clamping matches predict_gme
        if models is None or q_max not in models:
            raise KeyError(f"no trained model for q_max={q_max}")
        model = models[q_max]
        x = np.asarray([r.moments.ratios[:q_max - 1] for r in test_records])
        raw = forward_batch(model, x)
        hi = 1.0 - 1.0 / (n_qubits + 1)
        values = np.minimum(np.maximum(raw, 0.0), hi)
        n_clamped = int(np.sum(values != raw))
        estimates = values
    else:
        fn = _predictors(method, q_max, models)
        ests = [fn(rec) for rec in test_records]
        n_clamped = sum("clamped" in e.note for e in ests)
        estimates = np.array([e.value for e in ests])

    for rec, value in zip(test_records, estimates):
        preds.append((rec.id, rec.gme, float(value)))
        if rec.gme < exclude_below:
            n_excluded += 1
            continue
        deltas.append((rec.gme - value) / rec.gme)

    deltas = np.asarray(deltas)
    if deltas.size == 0:
        raise EmptyInputError("every test state fell below the exclusion threshold")
    low, high = percentile_bars(np.abs(deltas))
    return EvalReport(method=method, n_qubits=n_qubits, q_max=q_max,
                      mre=mre(deltas), err_low=low, err_high=high,
                      n_used=int(deltas.size), n_excluded=n_excluded,
                      n_clamped=n_clamped,
                      deltas=deltas if keep_deltas else None,
                      predictions=preds if keep_deltas else None)


def compare_methods(test_records, models: dict | None, q_max_values,
                    methods=("ratio", "accel", "ann"),
                    keep_deltas: bool = False,
                    exclude_below: float = RESOLUTION_THRESHOLD) -> list[EvalReport]:
    """One report per (method, q_max); the comparison table."""
    reports = []
    for q_max in q_max_values:
        for method in methods:
            reports.append(evaluate_method(test_records, method, q_max,
                                           models, keep_deltas=keep_deltas,
                                           exclude_below=exclude_below))
    return reports


def fit_inverse_qmax(q_values, mres) -> float:
    """Least-squares c for the trend MRE(q_max) ~ c / q_max."""
    q = np.asarray(q_values, dtype=np.float64)
    m = np.asarray(mres, dtype=np.float64)
    if q.size == 0:
        raise EmptyInputError("no points to fit")
    return float(np.sum(m / q) / np.sum(1.0 / q**2))


def write_report_csv(path, reports) -> None:
    lines = ["method,n_qubits,q_max,mre,err_low,err_high,n_used,n_excluded,n_clamped"]
    for r in reports:
        lines.append(f"{r.method},{r.n_qubits},{r.q_max},{r.mre!r},"
                     f"{r.err_low!r},{r.err_high!r},{r.n_used},"
                     f"{r.n_excluded},{r.n_clamped}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_predictions_csv(path, report: EvalReport) -> None:
    if report.predictions is None:
        raise ValueError("report was built without keep_deltas")
    lines = ["id,gme_true,gme_pred,delta"]
    for rec_id, true, pred in report.predictions:
        if true < EXCLUSION_THRESHOLD:
            lines.append(f"{rec_id},{true!r},{pred!r},")
        else:
            lines.append(f"{rec_id},{true!r},{pred!r},{(true - pred) / true!r}")
    Path(path).write_text("\n".join(lines) + "\n")
