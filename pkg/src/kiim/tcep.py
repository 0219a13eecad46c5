"""Cause-effect-pairs benchmark: directory ingestion and the accuracy protocol.

The directory layout is the published one: ``pair0001.txt`` ...
``pair0108.txt`` plus ``pairmeta.txt`` whose rows read

    id  cause_first_col  cause_last_col  effect_first_col  effect_last_col  weight

with 1-based column indices. Pairs whose cause or effect spans several
columns are excluded as multivariate, pairs with non-finite cells as
missing-valued, and pair 86 has no usable ground truth; the ten standard
exclusions leave 98 scored pairs. Each usable dataset is oriented so that
xs is the annotated cause, making XtoY the correct answer everywhere.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import ConfigurationError, IngestionError, NumericalError
from .pairs import Direction, PairedDataset, read_pair_file
from .scoring import Method, infer_direction

MULTIVARIATE_IDS = frozenset({52, 53, 54, 55, 71, 105})
MISSING_VALUE_IDS = frozenset({81, 82, 83})
NO_GROUND_TRUTH_IDS = frozenset({86})


@dataclass(frozen=True, eq=False)
class TcepPair:
    id: int
    dataset: PairedDataset | None
    ground_truth: Direction | None
    weight: float
    excluded: bool
    exclusion_reason: str | None = None


@dataclass(frozen=True)
class PairResult:
    """One (pair, method) evaluation; ``error`` set when the method failed."""

    pair_id: int
    method: Method
    score_xy: float | None
    score_yx: float | None
    direction: Direction | None
    correct: bool
    error: str | None = None


@dataclass(frozen=True)
class MethodAccuracy:
    method: Method
    evaluated: int
    correct: int
    accuracy: float
    weighted_accuracy: float


@dataclass(frozen=True)
class TcepReport:
    loaded: int
    excluded: int
    usable: int
    results: tuple[PairResult, ...]
    accuracies: tuple[MethodAccuracy, ...]


def _parse_meta(path: Path) -> dict[int, tuple[int, int, int, int, float]]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read metadata: {exc}", path=str(path)) from exc
    meta: dict[int, tuple[int, int, int, int, float]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) < 6:
            raise IngestionError("metadata row needs 6 fields", path=str(path), line=lineno)
        try:
            pid = int(tokens[0])
            spans = tuple(int(t) for t in tokens[1:5])
            weight = float(tokens[5])
        except ValueError as exc:
            raise IngestionError("non-numeric metadata field", path=str(path),
                                 line=lineno) from exc
        if weight <= 0:
            raise IngestionError("weight must be positive", path=str(path), line=lineno)
        meta[pid] = (*spans, weight)
    if not meta:
        raise IngestionError("metadata file has no rows", path=str(path))
    return meta


def load_tcep(directory) -> tuple[TcepPair, ...]:
    """Load every pair named in the metadata, sorted by id, with exclusions."""
    root = Path(directory)
    meta = _parse_meta(root / "pairmeta.txt")
    pairs = []
    for pid in sorted(meta):
        cause_first, cause_last, effect_first, effect_last, weight = meta[pid]
        data_path = root / f"pair{pid:04d}.txt"
        table = read_pair_file(data_path)
        reason = None
        if pid in MULTIVARIATE_IDS or cause_last > cause_first or effect_last > effect_first:
            reason = "multivariate"
        elif pid in NO_GROUND_TRUTH_IDS:
            reason = "no ground truth"
        elif table.shape[1] < max(cause_first, effect_first):
            raise IngestionError("metadata column exceeds table width", path=str(data_path))
        else:
            xs = table[:, cause_first - 1]
            ys = table[:, effect_first - 1]
            if pid in MISSING_VALUE_IDS or not (np.isfinite(xs).all() and np.isfinite(ys).all()):
                reason = "missing values"
        if reason is not None:
            pairs.append(TcepPair(id=pid, dataset=None, ground_truth=None, weight=weight,
                                  excluded=True, exclusion_reason=reason))
        else:
            dataset = PairedDataset(xs, ys, provenance=str(data_path),
                                    ground_truth=Direction.X_TO_Y)
            pairs.append(TcepPair(id=pid, dataset=dataset, ground_truth=Direction.X_TO_Y,
                                  weight=weight, excluded=False))
    return tuple(pairs)


def _evaluate_one(task) -> PairResult:
    pair_id, dataset, method, config = task
    try:
        decision = infer_direction(dataset, method, config)
    except (ValueError, ConfigurationError, NumericalError, FloatingPointError) as exc:
        return PairResult(pair_id=pair_id, method=method, score_xy=None, score_yx=None,
                          direction=None, correct=False, error=str(exc) or repr(exc))
    return PairResult(pair_id=pair_id, method=method,
                      score_xy=decision.score_xy.score, score_yx=decision.score_yx.score,
                      direction=decision.direction,
                      correct=decision.direction is Direction.X_TO_Y)


def evaluate_tcep(pairs, methods, config: RunConfig | None = None, seed: int = 0,
                  subsample_limit: int = 1000, jobs: int = 1) -> TcepReport:
    """Score every usable pair with every method and tally accuracies.

    Oversized pairs are subsampled to ``subsample_limit`` points with a
    generator seeded by (seed, pair id), so reports are reproducible.
    Undecided or errored evaluations count as incorrect; the weighted
    accuracy uses the metadata weights.
    """
    config = config or RunConfig()
    pairs = tuple(pairs)
    methods = tuple(Method(m) for m in methods)
    if not methods:
        raise ValueError("need at least one method")
    usable = [p for p in pairs if not p.excluded]
    if not usable:
        raise ValueError("no usable pairs to evaluate")
    tasks = []
    for pair in usable:
        dataset = pair.dataset
        if subsample_limit and dataset.n > subsample_limit:
            rng = np.random.default_rng([seed, pair.id])
            dataset = dataset.subsampled(subsample_limit, rng)
        for method in methods:
            tasks.append((pair.id, dataset, method, config))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_one, tasks, chunksize=1))
    else:
        results = [_evaluate_one(task) for task in tasks]
    weights = {p.id: p.weight for p in usable}
    accuracies = []
    for method in methods:
        rows = [r for r in results if r.method is method]
        correct = sum(r.correct for r in rows)
        total_weight = sum(weights[r.pair_id] for r in rows)
        hit_weight = sum(weights[r.pair_id] for r in rows if r.correct)
        accuracies.append(MethodAccuracy(method=method, evaluated=len(rows), correct=correct,
                                         accuracy=correct / len(rows),
                                         weighted_accuracy=hit_weight / total_weight))
    return TcepReport(loaded=len(pairs), excluded=sum(p.excluded for p in pairs),
                      usable=len(usable),
                      results=tuple(sorted(results, key=lambda r: (r.pair_id, r.method.value))),
                      accuracies=tuple(accuracies))
