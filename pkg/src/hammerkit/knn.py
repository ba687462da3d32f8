"""Modified k-nearest-neighbours premise ranking.

Statements are binary feature vectors, so squared Euclidean distance is
the size of the feature-set symmetric difference.  An inverted index maps
each feature to the statements having it; only statements sharing at
least one feature with the query are candidates.  Neighbours vote for
their recorded dependencies and for themselves, weighted by closeness,
and premises are ranked by total weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


@dataclass(frozen=True)
class Neighbor:
    id: object
    d2: int  # squared Euclidean distance = |features Δ query|
    weight: float


@dataclass
class FeatureIndex:
    """Inverted feature index over an allowed set of statements.

    Posting lists are kept in linear order so that distance ties resolve
    to the earlier statement deterministically.
    """

    postings: dict[str, list]
    features: dict
    position: dict
    dimension: int


def build_index(
    features: Mapping, order: Sequence
) -> FeatureIndex:
    """Index the statements in ``order`` (the allowed set) by their features."""
    position = {tid: i for i, tid in enumerate(order)}
    postings: dict[str, list] = {}
    kept = {}
    for tid in order:
        fs = frozenset(features[tid])
        kept[tid] = fs
        for f in fs:
            postings.setdefault(f, []).append(tid)
    return FeatureIndex(postings, kept, position, len(postings))


def k_nearest(index: FeatureIndex, query: Iterable[str], k: int) -> list[Neighbor]:
    """The k candidates closest to the query feature set.

    Candidates must share a feature with the query; ties in distance go to
    the statement earlier in the linear order.  Weight is 1 / (1 + d2).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    qs = frozenset(query)
    overlap: dict = {}
    for f in qs:
        for tid in index.postings.get(f, ()):
            overlap[tid] = overlap.get(tid, 0) + 1
    scored = sorted(
        (len(index.features[tid]) + len(qs) - 2 * c, index.position[tid], tid)
        for tid, c in overlap.items()
    )
    return [Neighbor(tid, d2, 1.0 / (1 + d2)) for d2, _, tid in scored[:k]]


def rank_premises(
    index: FeatureIndex,
    neighbors: Sequence[Neighbor],
    deps: Mapping,
    n_premises: int,
) -> list[tuple[object, float]]:
    """Premises ranked by summed neighbour weight.

    Each neighbour votes for its dependencies and for itself.  Output is
    sorted by relevance, ties by linear order, truncated to n_premises.
    """
    relevance: dict = {}
    for nb in neighbors:
        votes = set(deps.get(nb.id, ())) | {nb.id}
        for tid in votes:
            relevance[tid] = relevance.get(tid, 0.0) + nb.weight
    ranked = sorted(
        relevance.items(), key=lambda kv: (-kv[1], index.position[kv[0]])
    )
    return ranked[:n_premises]
