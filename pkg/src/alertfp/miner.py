"""Level-wise frequent-itemset mining where every pattern keeps its tidlist.

The dataset is scanned exactly once to build the candidate 1-itemsets,
each with the full list of transactions containing it. From there the
classic join of two k-itemsets sharing a (k-1)-prefix produces each
(k+1)-candidate, whose tidlist is simply the intersection of its two
generators' tidlists; support falls out as the tidlist length, so no
further dataset scans are needed.

In flight, a tidlist is encoded as an int bitset (bit t set means
transaction t contains the itemset), which keeps the intersection a
single `&` and the memory footprint n/8 bytes per pattern even on
large logs. `FrequentPattern.tidlist` materializes the sorted tuple on
demand. `bits_of` / `tids_of` convert between the two forms.

`brute_force_mine` is an independent oracle: it enumerates the powerset
of every transaction and counts occurrences, sharing no code path with
the level-wise miner.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, groupby
from typing import Iterable, Sequence, Union

from .errors import (
    BruteForceGuardError,
    EmptyDatasetError,
    PatternExplosionError,
)
from .model import AlertDataset, Item, Transaction

Itemset = tuple[Item, ...]
Minable = Union[AlertDataset, Sequence[Transaction]]

DEFAULT_PATTERN_CAP = 5_000_000


def bits_of(tids: Iterable[int]) -> int:
    """Pack transaction ids into a bitset."""
    bits = 0
    for tid in tids:
        bits |= 1 << tid
    return bits


def tids_of(bits: int) -> tuple[int, ...]:
    """Unpack a bitset into the sorted transaction-id tuple."""
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


@dataclass(frozen=True)
class MiningConfig:
    """Mining parameters.

    minisupport is either an absolute count (int >= 1) or a ratio in
    (0, 1] that converts to ceil(ratio * n): half of 4 transactions means
    2, never 1. max_patterns guards against candidate explosion on low
    thresholds (None disables). emit_tidlists controls whether persisted
    models carry tidlists; mining itself always tracks them.
    """

    minisupport: int | float | Fraction = 2
    max_pattern_len: int | None = None
    emit_tidlists: bool = False
    max_patterns: int | None = DEFAULT_PATTERN_CAP

    def minisupport_abs(self, n: int) -> int:
        s = self.minisupport
        if isinstance(s, bool):
            raise ValueError("minisupport must be a count or a ratio")
        if isinstance(s, int):
            if s < 1:
                raise ValueError("absolute minisupport must be >= 1")
            return s
        ratio = s if isinstance(s, Fraction) else Fraction(str(s))
        if not 0 < ratio <= 1:
            raise ValueError("minisupport ratio must be in (0, 1]")
        return -((-n * ratio.numerator) // ratio.denominator)


@dataclass(frozen=True)
class FrequentPattern:
    """An itemset with the transactions it occurs in."""

    itemset: Itemset
    tid_bits: int = field(repr=False)
    support_count: int
    support_ratio: float

    @classmethod
    def from_bits(cls, itemset: Itemset, tid_bits: int, n: int) -> "FrequentPattern":
        count = tid_bits.bit_count()
        return cls(itemset, tid_bits, count, count / n)

    @classmethod
    def from_tids(cls, itemset: Itemset, tids: Iterable[int], n: int) -> "FrequentPattern":
        return cls.from_bits(itemset, bits_of(tids), n)

    @property
    def tidlist(self) -> tuple[int, ...]:
        return tids_of(self.tid_bits)

    def __len__(self) -> int:
        return len(self.itemset)


@dataclass(frozen=True)
class PatternSet:
    """All frequent patterns mined from one dataset, canonically ordered
    by (itemset length, itemset)."""

    patterns: tuple[FrequentPattern, ...]
    n: int
    minisupport_abs: int

    def __post_init__(self) -> None:
        if len({p.itemset for p in self.patterns}) != len(self.patterns):
            raise ValueError("duplicate itemsets in pattern set")

    @property
    def count(self) -> int:
        return len(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def _index(self) -> dict[frozenset[Item], FrequentPattern]:
        cached = self.__dict__.get("_by_itemset")
        if cached is None:
            cached = {frozenset(p.itemset): p for p in self.patterns}
            object.__setattr__(self, "_by_itemset", cached)
        return cached

    def get(self, itemset: Iterable[Item]) -> FrequentPattern | None:
        return self._index().get(frozenset(itemset))

    def support_of(self, itemset: Iterable[Item]) -> int:
        p = self.get(itemset)
        return 0 if p is None else p.support_count

    def as_dict(self) -> dict[Itemset, tuple[int, ...]]:
        """itemset -> tidlist mapping, mostly for assertions and debugging."""
        return {p.itemset: p.tidlist for p in self.patterns}


def _as_transactions(data: Minable) -> list[Transaction]:
    if isinstance(data, AlertDataset):
        txns = list(data.transactions())
    else:
        txns = list(data)
    for position, t in enumerate(txns):
        if t.tid != position:
            raise ValueError(
                f"transaction at position {position} carries tid {t.tid}; "
                "tids must be 0..n-1 in order"
            )
    return txns


def build_candidates_1(data: Minable) -> list[tuple[Item, tuple[int, ...]]]:
    """Single scan of the dataset yielding every distinct item with the
    complete, ascending tidlist of the transactions containing it."""
    occurrences: dict[Item, list[int]] = {}
    for t in _as_transactions(data):
        for item in t.items:
            occurrences.setdefault(item, []).append(t.tid)
    return sorted((item, tuple(tids)) for item, tids in occurrences.items())


def prune(candidates, minisupport_abs: int):
    """Drop candidates whose support is below the threshold. Entries are
    (key, tidlist) pairs; the tidlist may be a bitset or a sized
    collection."""
    if minisupport_abs < 1:
        raise ValueError("minisupport must be >= 1")
    return [
        (key, tids) for key, tids in candidates if _support(tids) >= minisupport_abs
    ]


def _support(tids) -> int:
    return tids.bit_count() if isinstance(tids, int) else len(tids)


def candidate_gen(
    frequent_k: Sequence[tuple[Itemset, int]], workers: int = 1
) -> list[tuple[Itemset, int]]:
    """Join frequent k-itemsets into (k+1)-candidates.

    Two k-itemsets sharing their first k-1 items combine; candidates with
    any infrequent k-subset are dropped; each survivor's tidlist bitset is
    the intersection of its generators'. Output order and content are
    independent of the worker count.
    """
    if not frequent_k:
        return []
    frequent_itemsets = {itemset for itemset, _ in frequent_k}
    entries = sorted(frequent_k, key=lambda e: e[0])
    groups = [
        list(group) for _, group in groupby(entries, key=lambda e: e[0][:-1])
    ]
    if workers <= 1 or len(groups) < 2 * workers:
        out: list[tuple[Itemset, int]] = []
        for members in groups:
            out.extend(_join_group(members, frequent_itemsets))
        return out
    chunks = [groups[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(lambda chunk: _join_chunk(chunk, frequent_itemsets), chunks)
        )
    # reassemble in original group order
    out = []
    indexed = [iter(part) for part in parts]
    for i in range(len(groups)):
        out.extend(next(indexed[i % workers]))
    return out


def _join_chunk(groups, frequent_itemsets):
    return [_join_group(members, frequent_itemsets) for members in groups]


def _join_group(members, frequent_itemsets) -> list[tuple[Itemset, int]]:
    out = []
    for i in range(len(members)):
        left_set, left_bits = members[i]
        for j in range(i + 1, len(members)):
            right_set, right_bits = members[j]
            candidate = left_set + (right_set[-1],)
            # generators cover two of the k-subsets; check the rest
            if all(
                candidate[:skip] + candidate[skip + 1 :] in frequent_itemsets
                for skip in range(len(candidate) - 2)
            ):
                out.append((candidate, left_bits & right_bits))
    return out


def mine(data: Minable, config: MiningConfig | None = None, workers: int = 1) -> PatternSet:
    """Mine every frequent itemset with its exact tidlist and support.

    Levels proceed candidate-1 scan, prune, join, prune, ... until a level
    comes up empty or max_pattern_len is reached. Output is canonical and
    bit-identical regardless of worker count. Raises PatternExplosionError
    when the running pattern count exceeds the configured cap.
    """
    config = config or MiningConfig()
    txns = _as_transactions(data)
    n = len(txns)
    if n == 0:
        raise EmptyDatasetError("cannot mine an empty dataset")
    s_abs = config.minisupport_abs(n)
    cap = config.max_patterns

    candidates_1 = build_candidates_1(txns)
    level: list[tuple[Itemset, int]] = [
        ((item,), bits_of(tids)) for item, tids in prune(candidates_1, s_abs)
    ]
    levels = [level]
    total = len(level)
    _check_cap(total, cap, 1)
    length = 1
    while level and (config.max_pattern_len is None or length < config.max_pattern_len):
        level = prune(candidate_gen(level, workers=workers), s_abs)
        length += 1
        total += len(level)
        _check_cap(total, cap, length)
        if level:
            levels.append(level)
    patterns = [
        FrequentPattern.from_bits(itemset, bits, n)
        for lvl in levels
        for itemset, bits in lvl
    ]
    patterns.sort(key=lambda p: (len(p.itemset), p.itemset))
    return PatternSet(tuple(patterns), n, s_abs)


def _check_cap(total: int, cap: int | None, level: int) -> None:
    if cap is not None and total > cap:
        raise PatternExplosionError(total, cap, level)


def brute_force_mine(
    data: Minable,
    config: MiningConfig | None = None,
    max_transaction_width: int = 20,
) -> PatternSet:
    """Exhaustive oracle: enumerate the powerset of each transaction and
    keep the itemsets occurring at least minisupport times.

    Exponential in transaction width, hence the guard; intended for tests
    and small spot checks only.
    """
    config = config or MiningConfig()
    txns = _as_transactions(data)
    n = len(txns)
    if n == 0:
        raise EmptyDatasetError("cannot mine an empty dataset")
    widest = max((len(t.items) for t in txns), default=0)
    if widest > max_transaction_width:
        raise BruteForceGuardError(
            f"transaction width {widest} exceeds the brute-force guard "
            f"of {max_transaction_width} items"
        )
    s_abs = config.minisupport_abs(n)
    occurrences: dict[frozenset[Item], list[int]] = {}
    for t in txns:
        members = sorted(t.items)
        for size in range(1, len(members) + 1):
            for combo in combinations(members, size):
                occurrences.setdefault(frozenset(combo), []).append(t.tid)
    patterns = [
        FrequentPattern.from_tids(tuple(sorted(itemset)), tids, n)
        for itemset, tids in occurrences.items()
        if len(tids) >= s_abs
    ]
    patterns.sort(key=lambda p: (len(p.itemset), p.itemset))
    return PatternSet(tuple(patterns), n, s_abs)
