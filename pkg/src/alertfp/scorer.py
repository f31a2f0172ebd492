"""Per-alert outlier scores against a frequent-pattern set, and the
ascending ranking that puts rare alerts first.

Two scores per alert: the simple score is the count of frequent patterns
contained in the alert's transaction; the full score is the sum of the
contained patterns' support ratios divided by the pattern-set size, so it
always lands in [0, 1]. Alerts containing many common patterns score
high and sink; alerts matching nothing float to the top for review.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import fsum
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .errors import AlertFpError, EmptyPatternSetError
from .miner import Minable, PatternSet, _as_transactions
from .model import AlertDataset, Item, Transaction

RANKED_MAGIC = "# alertfp-ranked v1"

#: Subset enumeration is skipped for transactions with more frequent items
#: than this, falling back to a scan over the pattern list.
_MAX_ENUM_ITEMS = 20


@dataclass(frozen=True)
class ScoreConfig:
    """metric picks the sort key ("simple" or "fpof"); top_p is the
    percentage of the ranking flagged as candidate true alerts."""

    metric: str = "simple"
    top_p: float = 100.0

    def __post_init__(self) -> None:
        if self.metric not in ("simple", "fpof"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if not 0 < self.top_p <= 100:
            raise ValueError("top_p must be in (0, 100]")


@dataclass(frozen=True)
class ScoredAlert:
    tid: int
    simple_fpof: int
    fpof: float
    rank: int


class PatternScorer:
    """Counts and weighs the frequent patterns contained in a transaction.

    Works from bare (itemset, support_count) pairs so a freshly mined
    pattern set and a loaded classifier model score identically. Per
    transaction it either enumerates subsets of the transaction's
    frequent items or scans the pattern list, whichever is cheaper; both
    routes produce bit-identical results (the ratio sum uses fsum, which
    is order-independent), and results are cached by frequent-item set.
    """

    def __init__(self, patterns: Iterable[tuple[Iterable[Item], int]], n: int):
        if n < 1:
            raise ValueError("dataset size must be >= 1")
        self.n = n
        self._item_ids: dict[Item, int] = {}
        id_sets: list[frozenset[int]] = []
        ratios: list[float] = []
        lookup: dict[frozenset[int], float] = {}
        for itemset, support_count in patterns:
            ids = frozenset(
                self._item_ids.setdefault(item, len(self._item_ids))
                for item in itemset
            )
            ratio = support_count / n
            id_sets.append(ids)
            ratios.append(ratio)
            lookup[ids] = ratio
        self._id_sets = id_sets
        self._ratios = ratios
        self._lookup = lookup
        self.count = len(id_sets)
        self._cache: dict[frozenset[int], tuple[int, float]] = {}

    @classmethod
    def from_pattern_set(cls, fps: PatternSet) -> "PatternScorer":
        return cls(((p.itemset, p.support_count) for p in fps), fps.n)

    def score(self, items: frozenset[Item]) -> tuple[int, float]:
        """Return (contained-pattern count, ratio sum) for one item set."""
        ids = frozenset(
            self._item_ids[item] for item in items if item in self._item_ids
        )
        cached = self._cache.get(ids)
        if cached is not None:
            return cached
        width = len(ids)
        if width <= _MAX_ENUM_ITEMS and (1 << width) <= max(64, 2 * self.count):
            hits = []
            ordered = sorted(ids)
            for size in range(1, width + 1):
                for combo in combinations(ordered, size):
                    ratio = self._lookup.get(frozenset(combo))
                    if ratio is not None:
                        hits.append(ratio)
        else:
            hits = [
                ratio
                for id_set, ratio in zip(self._id_sets, self._ratios)
                if id_set <= ids
            ]
        result = (len(hits), fsum(hits))
        self._cache[ids] = result
        return result


def simple_fpof(t: Transaction, fps: PatternSet) -> int:
    """Number of frequent patterns contained in the transaction."""
    return PatternScorer.from_pattern_set(fps).score(t.items)[0]


def fpof(t: Transaction, fps: PatternSet) -> float:
    """Sum of contained patterns' support ratios over the pattern count."""
    if fps.count == 0:
        raise EmptyPatternSetError("score is undefined over an empty pattern set")
    return PatternScorer.from_pattern_set(fps).score(t.items)[1] / fps.count


def rank(
    data: Minable,
    fps: PatternSet,
    config: ScoreConfig | None = None,
    workers: int = 1,
) -> list[ScoredAlert]:
    """Score every alert and sort ascending by the configured metric.

    Both scores are always populated. Ties break by ascending tid, so the
    output is fully determined by the scores and the input order, and it
    is identical for any worker count.
    """
    config = config or ScoreConfig()
    if fps.count == 0:
        raise EmptyPatternSetError("ranking is undefined over an empty pattern set")
    scorer = PatternScorer.from_pattern_set(fps)
    return rank_with_scorer(_as_transactions(data), scorer, config, workers)


def rank_with_scorer(
    transactions: Sequence[Transaction],
    scorer: PatternScorer,
    config: ScoreConfig,
    workers: int = 1,
) -> list[ScoredAlert]:
    if scorer.count == 0:
        raise EmptyPatternSetError("ranking is undefined over an empty pattern set")
    raw = _score_all(transactions, scorer, workers)
    if config.metric == "simple":
        raw.sort(key=lambda row: (row[1], row[0]))
    else:
        raw.sort(key=lambda row: (row[2], row[0]))
    return [
        ScoredAlert(tid, simple, total / scorer.count, position + 1)
        for position, (tid, simple, total) in enumerate(raw)
    ]


def _score_all(
    transactions: Sequence[Transaction], scorer: PatternScorer, workers: int
) -> list[tuple[int, int, float]]:
    def score_chunk(chunk: Sequence[Transaction]) -> list[tuple[int, int, float]]:
        out = []
        for t in chunk:
            simple, total = scorer.score(t.items)
            out.append((t.tid, simple, total))
        return out

    if workers <= 1 or len(transactions) < 2 * workers:
        return score_chunk(transactions)
    size = -(-len(transactions) // workers)
    chunks = [transactions[i : i + size] for i in range(0, len(transactions), size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(score_chunk, chunks)
    merged: list[tuple[int, int, float]] = []
    for part in parts:
        merged.extend(part)
    return merged


def top_candidates(ranked: Sequence[ScoredAlert], top_p: float) -> list[int]:
    """tids of the first ceil(n * top_p / 100) alerts: the candidate true
    alerts an analyst reviews first."""
    if not ranked:
        raise AlertFpError("cannot take candidates from an empty ranking")
    if not 0 < top_p <= 100:
        raise ValueError("top_p must be in (0, 100]")
    share = Fraction(str(top_p))
    keep = -((-len(ranked) * share.numerator) // (share.denominator * 100))
    return [sa.tid for sa in ranked[:keep]]


# ---------------------------------------------------------------------------
# Ranked output file
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankedRow:
    rank: int
    tid: int
    simple_fpof: int
    fpof: float
    original: str


@dataclass(frozen=True)
class RankedFile:
    n: int
    metric: str
    rows: tuple[RankedRow, ...]


Target = Union[str, Path, IO[str]]


def write_ranked(
    target: Target,
    ranked: Sequence[ScoredAlert],
    dataset: AlertDataset,
    metric: str,
    delimiter: str = "\t",
) -> None:
    """Write the ranked log: header, then one
    rank<TAB>tid<TAB>simple_fpof<TAB>fpof<TAB>original_record row per alert."""
    handle = None
    if isinstance(target, (str, Path)):
        handle = open(target, "w", encoding="utf-8", newline="")
        out = handle
    else:
        out = target
    try:
        out.write(f"{RANKED_MAGIC} n={dataset.n} metric={metric}\n")
        for sa in ranked:
            original = delimiter.join(dataset.alerts[sa.tid].values)
            out.write(f"{sa.rank}\t{sa.tid}\t{sa.simple_fpof}\t{sa.fpof:.6f}\t{original}\n")
    finally:
        if handle is not None:
            handle.close()


def read_ranked(source: Union[str, Path, IO[str]]) -> RankedFile:
    handle = None
    if isinstance(source, (str, Path)):
        handle = open(source, "r", encoding="utf-8", newline="")
        stream = handle
    else:
        stream = source
    try:
        header = stream.readline().rstrip("\n")
        if not header.startswith(RANKED_MAGIC):
            raise AlertFpError(f"not a ranked alert file: {header!r}")
        meta = dict(
            part.split("=", 1) for part in header[len(RANKED_MAGIC) :].split() if "=" in part
        )
        try:
            n = int(meta["n"])
            metric = meta["metric"]
        except (KeyError, ValueError):
            raise AlertFpError(f"malformed ranked-file header: {header!r}") from None
        rows = []
        for line_number, line in enumerate(stream, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 4)
            if len(parts) != 5:
                raise AlertFpError(f"ranked file line {line_number}: malformed row")
            rows.append(
                RankedRow(int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3]), parts[4])
            )
        return RankedFile(n, metric, tuple(rows))
    finally:
        if handle is not None:
            handle.close()
