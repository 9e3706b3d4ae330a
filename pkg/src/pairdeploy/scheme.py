"""Offline pairing step of the random pairwise key predistribution scheme.

Each of n nodes is paired, before deployment, with k distinct other nodes
chosen uniformly at random; selections of different nodes are mutually
independent.  Every pairing (i -> j) installs one pairwise key, so node i
finally holds one key per node it selected plus one per node that selected
it: ring size = k + reverse_degree(i), and ring sizes over a table always
sum to 2*n*k.

Node ids are 1-based in every public surface (function arguments, key ids,
JSON dumps, edge lists); storage is 0-based contiguous arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable

import numpy as np

from . import sampling

__all__ = [
    "SchemeParams",
    "PairwiseKeyId",
    "KeyRing",
    "PairingTable",
    "generate_pairing",
    "derive_key_rings",
    "reverse_degree",
    "reverse_degrees",
    "ring_sizes",
    "phase_size",
    "table_to_json",
    "table_from_json",
    "table_from_lists",
]


@dataclass(frozen=True)
class SchemeParams:
    """Scheme size: n nodes, k selections per node (1 <= k <= n-1)."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need at least 2 nodes, got n={self.n}")
        if not 1 <= self.k <= self.n - 1:
            raise ValueError(f"need 1 <= k <= n-1, got k={self.k} with n={self.n}")


@dataclass(frozen=True, order=True)
class PairwiseKeyId:
    """Identity of the key installed for the pairing (initiator -> responder).

    slot is the 1-based position of responder in the initiator's selection
    list sorted by ascending node id; (initiator, slot) determines the key.
    """

    initiator: int
    responder: int
    slot: int


@dataclass(frozen=True)
class KeyRing:
    """All pairwise keys held by one node after the offline step."""

    owner: int
    keys: frozenset[PairwiseKeyId]

    @property
    def size(self) -> int:
        return len(self.keys)


@dataclass(frozen=True)
class PairingTable:
    """Selections of every node: row i-1 holds node i's k partners.

    partners is an (n, k) int64 array, 0-based ids, each row sorted
    ascending and never containing the row's own index.  seed/trial record
    how the table was generated (None for hand-built tables).
    """

    params: SchemeParams
    partners: np.ndarray = field(repr=False)
    seed: int | None = None
    trial: int | None = None

    def __post_init__(self) -> None:
        p = np.asarray(self.partners, dtype=np.int64)
        n, k = self.params.n, self.params.k
        if p.shape != (n, k):
            raise ValueError(f"partner array must be shape {(n, k)}, got {p.shape}")
        if k > 1 and not (p[:, 1:] > p[:, :-1]).all():
            raise ValueError("partner rows must be strictly ascending")
        if p.min() < 0 or p.max() >= n:
            raise ValueError("partner ids out of range")
        if (p == np.arange(n, dtype=np.int64)[:, None]).any():
            raise ValueError("a node may not select itself")
        p.flags.writeable = False
        object.__setattr__(self, "partners", p)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    def partners_of(self, node: int) -> tuple[int, ...]:
        """1-based ids selected by `node` (1-based), ascending."""
        _check_node(node, self.n)
        return tuple(int(j) + 1 for j in self.partners[node - 1])


def _check_node(node: int, n: int) -> None:
    if not 1 <= node <= n:
        raise ValueError(f"node id must be in 1..{n}, got {node}")


def generate_pairing(params: SchemeParams, seed: int, trial: int = 0) -> PairingTable:
    """Draw a pairing table; uniform per node, independent across nodes.

    Deterministic in (params, seed, trial) on every platform; see the
    sampling module for the stream layout.
    """
    block = sampling.sample_pairing_block(seed, trial, 1, params.n, params.k)
    return PairingTable(params, block[0], seed=seed, trial=trial)


def reverse_degrees(table: PairingTable) -> np.ndarray:
    """For every node, how many other nodes selected it (length-n array)."""
    return np.bincount(table.partners.ravel(), minlength=table.n)


def reverse_degree(table: PairingTable, node: int) -> int:
    """How many other nodes selected `node` (1-based)."""
    _check_node(node, table.n)
    return int(reverse_degrees(table)[node - 1])


def ring_sizes(table: PairingTable) -> np.ndarray:
    """Key ring size of every node: k + reverse degree (length-n array)."""
    return table.k + reverse_degrees(table)


def derive_key_rings(table: PairingTable) -> list[KeyRing]:
    """Materialize each node's key ring.

    Node i holds the key of every pairing it initiated and of every pairing
    that selected it.  Intended for small tables (tests, fixtures); census
    work should use ring_sizes.
    """
    n = table.n
    keys: list[set[PairwiseKeyId]] = [set() for _ in range(n)]
    for i0 in range(n):
        for slot, j0 in enumerate(table.partners[i0], start=1):
            key = PairwiseKeyId(i0 + 1, int(j0) + 1, slot)
            keys[i0].add(key)
            keys[int(j0)].add(key)
    return [KeyRing(i0 + 1, frozenset(ks)) for i0, ks in enumerate(keys)]


def phase_size(n: int, gamma: float) -> int:
    """Number of nodes deployed at fraction gamma: floor(gamma * n).

    gamma must lie in (0, 1] and the floor must be positive.  The floor is
    taken over the decimal value of gamma (via Fraction of its shortest
    repr), so e.g. gamma=0.3, n=10 gives 3 despite 0.3*10 = 2.999... in
    binary floating point.
    """
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    m = int(Fraction(str(gamma)) * n)
    if m < 1:
        raise ValueError(f"floor(gamma*n) must be >= 1, got 0 for gamma={gamma}, n={n}")
    return m


def table_to_json(table: PairingTable, fp: IO[str] | None = None) -> str | None:
    """Dump a table as JSON: {"n":..., "k":..., "seed":..., "gamma":[[...],...]}.

    gamma lists are 1-based selection lists in node order.  Writes to fp
    when given, else returns the string.
    """
    doc = {
        "n": table.n,
        "k": table.k,
        "seed": table.seed,
        "gamma": (table.partners + 1).tolist(),
    }
    text = json.dumps(doc)
    if fp is None:
        return text
    fp.write(text)
    return None


def table_from_json(source: str | IO[str]) -> PairingTable:
    """Rebuild a PairingTable from table_to_json output (validates fully)."""
    doc = json.loads(source if isinstance(source, str) else source.read())
    params = SchemeParams(int(doc["n"]), int(doc["k"]))
    rows = doc["gamma"]
    if len(rows) != params.n:
        raise ValueError(f"expected {params.n} selection lists, got {len(rows)}")
    partners = np.asarray(rows, dtype=np.int64) - 1
    seed = doc.get("seed")
    return PairingTable(params, partners, seed=None if seed is None else int(seed))


def table_from_lists(n: int, k: int, gamma_sets: Iterable[Iterable[int]]) -> PairingTable:
    """Build a table from 1-based selection lists (order within a row is free)."""
    rows = [sorted(int(j) - 1 for j in row) for row in gamma_sets]
    for row in rows:
        if len(set(row)) != len(row):
            raise ValueError("selection lists must not repeat ids")
    arr = np.asarray(rows, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("gamma_sets must be a list of equal-length id lists")
    return PairingTable(SchemeParams(n, k), arr)
