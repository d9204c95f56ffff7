"""Finite domains, real-valued concept classes, covers, and scalar utilities.

Everything downstream (learners, adversaries, samplers, reductions) works on
the types defined here.  All types are immutable after construction and all
operations are pure functions, so unrestricted parallel use is safe.

Conventions, fixed once for the whole package:

* interval balls around a point are open: ``B(r, y) = (y - r, y + r)``;
* function balls use strict inequality at every domain point;
* loss counts points with strictly ``|h(x) - c(x)| > r``.

Boundary ties are resolved by these rules everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainMismatch, NonIntegerReciprocal, OutOfRange

#: slack for "is 1/zeta an integer" checks; grid parameters are small rationals
_RECIP_TOL = 1e-9


def _grid_order(value: float, name: str = "zeta") -> int:
    """Return n = 1/value, or raise if 1/value is not an integer."""
    if not 0.0 < value <= 1.0:
        raise NonIntegerReciprocal(f"{name}={value!r} must lie in (0, 1]")
    recip = 1.0 / value
    n = round(recip)
    if n < 1 or abs(recip - n) > _RECIP_TOL:
        raise NonIntegerReciprocal(f"1/{name} = {recip!r} is not an integer")
    return n


@dataclass(frozen=True)
class DomainPoint:
    """A point of the finite input domain, addressed by index."""

    index: int
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if self.index < 0:
            raise OutOfRange(f"domain index must be nonnegative, got {self.index}")


def point_index(x: "DomainPoint | int") -> int:
    """Accept a DomainPoint or a raw index; return the index."""
    return x.index if isinstance(x, DomainPoint) else int(x)


@dataclass(frozen=True)
class Concept:
    """A function X -> [0,1], materialized as one value per domain point."""

    id: int
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for v in self.values:
            if not 0.0 <= v <= 1.0:
                raise OutOfRange(f"concept {self.id} has value {v} outside [0,1]")

    def __call__(self, x: "DomainPoint | int") -> float:
        return self.values[point_index(x)]


@dataclass(frozen=True)
class ConceptClass:
    """A nonempty, ordered list of concepts over a shared finite domain."""

    domain_size: int
    concepts: tuple[Concept, ...]
    point_labels: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "concepts", tuple(self.concepts))
        if self.domain_size < 1:
            raise OutOfRange("domain must have at least one point")
        if not self.concepts:
            raise OutOfRange("a concept class must be nonempty")
        ids = [c.id for c in self.concepts]
        if len(set(ids)) != len(ids):
            raise OutOfRange("concept ids must be distinct")
        for c in self.concepts:
            if len(c.values) != self.domain_size:
                raise DomainMismatch(
                    f"concept {c.id} has {len(c.values)} values, expected {self.domain_size}"
                )

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self):
        return iter(self.concepts)

    @cached_property
    def table(self) -> np.ndarray:
        """(n_concepts, domain_size) value matrix, read-only."""
        t = np.array([c.values for c in self.concepts], dtype=float)
        t.setflags(write=False)
        return t

    @cached_property
    def _row_of_id(self) -> dict[int, int]:
        return {c.id: row for row, c in enumerate(self.concepts)}

    def row_of(self, concept_id: int) -> int:
        return self._row_of_id[concept_id]

    def by_id(self, concept_id: int) -> Concept:
        return self.concepts[self._row_of_id[concept_id]]

    def ids(self) -> frozenset[int]:
        return frozenset(c.id for c in self.concepts)

    def points(self) -> list[DomainPoint]:
        labels = self.point_labels or (None,) * self.domain_size
        return [DomainPoint(i, labels[i]) for i in range(self.domain_size)]


@dataclass(frozen=True)
class Cover:
    """A partition of [0,1] into 1/zeta bins plus the interleaved super-bins.

    Bin midpoints sit at odd multiples of zeta/2; super-bin midpoints sit on
    the interior bin boundaries, so each super-bin (width 2*zeta) overlaps its
    two neighbours by one bin.  The interleaving is what guarantees that any
    ball of radius zeta/2 centred in the interior lies wholly inside a
    super-bin.
    """

    zeta: float
    bin_midpoints: tuple[float, ...]
    superbin_midpoints: tuple[float, ...]


def cover_new(zeta: float) -> Cover:
    """Build the zeta-cover of [0,1]; requires 1/zeta to be an integer."""
    n = _grid_order(zeta)
    bins = tuple((2 * k + 1) / (2 * n) for k in range(n))
    superbins = tuple(k / n for k in range(1, n))
    return Cover(zeta=1.0 / n, bin_midpoints=bins, superbin_midpoints=superbins)


@dataclass(frozen=True)
class LabeledExample:
    """A domain point together with the (possibly noisy) feedback value."""

    x: DomainPoint
    y: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.y <= 1.0:
            raise OutOfRange(f"feedback value {self.y} outside [0,1]")


@dataclass(frozen=True)
class Distribution:
    """A probability distribution over the domain points."""

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if any(v < 0 for v in self.p):
            raise OutOfRange("probabilities must be nonnegative")
        if abs(sum(self.p) - 1.0) > 1e-12:
            raise OutOfRange(f"probabilities sum to {sum(self.p)!r}, expected 1")

    @cached_property
    def _weights(self) -> np.ndarray:
        w = np.array(self.p, dtype=float)
        w.setflags(write=False)
        return w

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw `size` point indices i.i.d. from this distribution."""
        return rng.choice(len(self.p), size=size, p=self._weights)

    @staticmethod
    def uniform(n: int) -> "Distribution":
        return Distribution(tuple(1.0 / n for _ in range(n)))

    @staticmethod
    def point_mass(n: int, at: int) -> "Distribution":
        return Distribution(tuple(1.0 if i == at else 0.0 for i in range(n)))


def superbin_members(
    cls: ConceptClass,
    subset: Iterable[int],
    r: float,
    x: "DomainPoint | int",
    zeta: float,
) -> frozenset[int]:
    """Ids of subset concepts whose value at x lies in the open ball B(2*zeta, r).

    `r` is expected to be a super-bin midpoint of the 2*zeta cover, as used by
    the online learner's prediction rule.
    """
    xi = point_index(x)
    radius = 2.0 * zeta
    col = cls.table[:, xi]
    return frozenset(
        cid for cid in subset if abs(col[cls.row_of(cid)] - r) < radius
    )


def loss(h: Concept, c: Concept, r: float, d: Distribution) -> float:
    """Probability mass of {x : |h(x) - c(x)| > r} under d (strict inequality)."""
    if len(h.values) != len(c.values) or len(h.values) != len(d.p):
        raise DomainMismatch("loss requires h, c, and D over the same domain")
    if r < 0:
        raise OutOfRange("loss radius must be nonnegative")
    return float(
        sum(p for hv, cv, p in zip(h.values, c.values, d.p) if abs(hv - cv) > r)
    )


def function_ball(center: Concept, r: float, pool: Sequence[Concept]) -> frozenset[int]:
    """Ids of pool concepts within distance r of `center` at every point (strict)."""
    n = len(center.values)
    for f in pool:
        if len(f.values) != n:
            raise DomainMismatch("function_ball pool must share the center's domain")
    return frozenset(
        f.id
        for f in pool
        if all(abs(fv - cv) < r for fv, cv in zip(f.values, center.values))
    )


def binary_entropy(p: float) -> float:
    """Base-2 binary entropy with the continuity convention H(0) = H(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"binary_entropy needs p in [0,1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def round_to_grid(y: float, step: float) -> float:
    """Round y to the nearest bin midpoint of the step-cover; ties go lower."""
    if not 0.0 <= y <= 1.0:
        raise OutOfRange(f"round_to_grid needs y in [0,1], got {y}")
    n = _grid_order(step, "step")
    pos = y * n  # bin-unit coordinate; midpoints sit at k + 1/2
    k = math.floor(pos - 0.5)
    lo = max(k, 0)
    hi = min(k + 1, n - 1)
    mid_lo = (2 * lo + 1) / (2 * n)
    mid_hi = (2 * hi + 1) / (2 * n)
    # ties (equidistant up to float dust) go to the lower midpoint
    if abs(y - mid_hi) < abs(y - mid_lo) - 1e-12:
        return mid_hi
    return mid_lo


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def class_to_json(cls: ConceptClass) -> str:
    return json.dumps(
        {
            "domain_size": cls.domain_size,
            "concepts": [{"id": c.id, "values": list(c.values)} for c in cls.concepts],
        },
        sort_keys=True,
    )


def class_from_json(text: str) -> ConceptClass:
    data = json.loads(text)
    return ConceptClass(
        domain_size=int(data["domain_size"]),
        concepts=tuple(
            Concept(id=int(c["id"]), values=tuple(c["values"]))
            for c in data["concepts"]
        ),
    )


def distribution_to_json(d: Distribution) -> str:
    return json.dumps({"p": list(d.p)}, sort_keys=True)


def distribution_from_json(text: str) -> Distribution:
    return Distribution(tuple(json.loads(text)["p"]))
