"""Exact sequential fat-shattering dimension with witness trees.

The central recursion: a subset V has sfat(V) >= 1 + min(sfat(V_L), sfat(V_R))
whenever some point x and threshold a split it into nonempty
V_L = {f : f(x) <= a - zeta} and V_R = {f : f(x) >= a + zeta}; sfat(V) is the
best such value, or 0 when no admissible split exists.

Threshold search is finite: for a value v present at x, let w(v) be the
smallest value >= v + 2*zeta.  The candidate a = (v + w(v)) / 2 dominates every
admissible threshold whose low side tops out at v — its two sides are
supersets of that threshold's sides — so scanning one candidate per value is
complete.  (Scanning only consecutive value pairs is not: values packed less
than 2*zeta apart between a far pair would hide the split.)

Also here: the non-sequential fat-shattering dimension and a Littlestone
oracle, both by independent brute force, used to cross-check sfat.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .concepts import ConceptClass
from .errors import EmptySubset, InvalidTree, NotBoolean, OutOfRange, TooLarge

#: comparison slack so grid values sitting exactly on a margin boundary are
#: classified inclusively despite float rounding
_MARGIN_TOL = 1e-12

#: bitmask-based memoization supports at most this many concepts
MAX_CONCEPTS = 64


@dataclass(frozen=True)
class ShatterTree:
    """A complete binary witness tree for a shattering claim.

    Internal nodes carry a domain point index and threshold; every concept
    reachable through the left subtree stays at least the margin below the
    threshold at x, and through the right subtree at least the margin above.
    Leaves carry a witness concept id.
    """

    leaf: Optional[int] = None
    x: Optional[int] = None
    a: Optional[float] = None
    left: Optional["ShatterTree"] = None
    right: Optional["ShatterTree"] = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + self.left.depth()

    def node_at(self, path: str) -> "ShatterTree":
        """Follow a left/right bit string ('0' left, '1' right) from the root."""
        node = self
        for bit in path:
            node = node.right if bit == "1" else node.left
        return node

    def leaf_paths(self) -> list[tuple[str, int]]:
        """All (root-down bit path, leaf concept id) pairs, left-to-right."""
        if self.is_leaf:
            return [("", self.leaf)]
        out = [("0" + p, c) for p, c in self.left.leaf_paths()]
        out += [("1" + p, c) for p, c in self.right.leaf_paths()]
        return out


@dataclass(frozen=True)
class DimensionResult:
    dimension: int
    witness: ShatterTree


def sfat_empty_convention() -> int:
    """Sentinel dimension for an empty subset.

    Set below 0 (the dimension of every singleton) so that an empty super-bin
    can never tie with a populated one in the online learner's argmax.
    """
    return -1


class SfatCache:
    """Memoized sfat computation for one (class, margin) pair.

    The online learner queries the dimension of many overlapping surviving
    subsets of a fixed class at a fixed margin; this cache shares all their
    subproblems.  Subsets are bitmasks over concept rows.  A cache instance is
    confined to one game/sampler instance and is not thread-safe.
    """

    def __init__(self, cls: ConceptClass, zeta: float):
        if len(cls) > MAX_CONCEPTS:
            raise TooLarge(
                f"sfat memoization supports at most {MAX_CONCEPTS} concepts, got {len(cls)}"
            )
        if zeta <= 0:
            raise OutOfRange(f"margin must be positive, got {zeta}")
        self.cls = cls
        self.zeta = float(zeta)
        self._memo: dict[int, int] = {}
        # per point: concept rows sorted by value, and the sorted values
        table = cls.table
        self._sorted_rows = []
        self._sorted_vals = []
        for x in range(cls.domain_size):
            order = sorted(range(len(cls)), key=lambda r: (table[r, x], r))
            self._sorted_rows.append(order)
            self._sorted_vals.append([table[r, x] for r in order])

    def full_mask(self) -> int:
        return (1 << len(self.cls)) - 1

    def mask_of_ids(self, ids: Iterable[int]) -> int:
        mask = 0
        for cid in ids:
            mask |= 1 << self.cls.row_of(cid)
        return mask

    def ids_of_mask(self, mask: int) -> frozenset[int]:
        return frozenset(
            c.id for row, c in enumerate(self.cls.concepts) if mask >> row & 1
        )

    def _splits(self, mask: int, x: int):
        """Dominating (a, left_mask, right_mask) splits of `mask` at point x."""
        rows = []
        vals = []
        for r, v in zip(self._sorted_rows[x], self._sorted_vals[x]):
            if mask >> r & 1:
                rows.append(r)
                vals.append(v)
        # distinct values in ascending order
        distinct = []
        for v in vals:
            if not distinct or v > distinct[-1]:
                distinct.append(v)
        gap = 2.0 * self.zeta
        out = []
        seen = set()
        j = 0
        for v in distinct:
            while j < len(distinct) and distinct[j] < v + gap - _MARGIN_TOL:
                j += 1
            if j >= len(distinct):
                break
            a = (v + distinct[j]) / 2.0
            lo, hi = a - self.zeta + _MARGIN_TOL, a + self.zeta - _MARGIN_TOL
            lmask = rmask = 0
            for r, fv in zip(rows, vals):
                if fv <= lo:
                    lmask |= 1 << r
                elif fv >= hi:
                    rmask |= 1 << r
            if lmask and rmask and (lmask, rmask) not in seen:
                seen.add((lmask, rmask))
                out.append((a, lmask, rmask))
        return out

    def dimension_of_mask(self, mask: int) -> int:
        if mask == 0:
            raise EmptySubset("sfat of an empty subset is undefined; see sfat_empty_convention")
        cached = self._memo.get(mask)
        if cached is not None:
            return cached
        best = 0
        ub = mask.bit_count().bit_length() - 1  # floor(log2 |V|)
        if ub > 0:
            for x in range(self.cls.domain_size):
                for _, lmask, rmask in self._splits(mask, x):
                    cand = 1 + min(
                        self.dimension_of_mask(lmask), self.dimension_of_mask(rmask)
                    )
                    if cand > best:
                        best = cand
                        if best == ub:
                            break
                if best == ub:
                    break
        self._memo[mask] = best
        return best

    def score(self, mask: int) -> int:
        """Dimension with the empty-subset sentinel instead of an error."""
        return sfat_empty_convention() if mask == 0 else self.dimension_of_mask(mask)

    def witness_of_mask(self, mask: int) -> ShatterTree:
        """Extract the first witness tree in (domain order, ascending a) order."""
        d = self.dimension_of_mask(mask)
        return self._build(mask, d)

    def _build(self, mask: int, depth: int) -> ShatterTree:
        if depth == 0:
            row = (mask & -mask).bit_length() - 1
            return ShatterTree(leaf=self.cls.concepts[row].id)
        for x in range(self.cls.domain_size):
            for a, lmask, rmask in self._splits(mask, x):
                if (
                    self.dimension_of_mask(lmask) >= depth - 1
                    and self.dimension_of_mask(rmask) >= depth - 1
                ):
                    return ShatterTree(
                        x=x,
                        a=a,
                        left=self._build(lmask, depth - 1),
                        right=self._build(rmask, depth - 1),
                    )
        raise AssertionError("witness extraction disagreed with memoized dimension")


def sfat(
    cls: ConceptClass,
    subset: Optional[Iterable[int]],
    zeta: float,
    cache: Optional[SfatCache] = None,
) -> DimensionResult:
    """Exact sfat at margin zeta of `subset` (concept ids; None = whole class)."""
    cache = cache or SfatCache(cls, zeta)
    ids = cls.ids() if subset is None else frozenset(subset)
    if not ids:
        raise EmptySubset("sfat needs a nonempty subset")
    mask = cache.mask_of_ids(ids)
    d = cache.dimension_of_mask(mask)
    return DimensionResult(dimension=d, witness=cache.witness_of_mask(mask))


def validate_tree(
    cls: ConceptClass, tree: ShatterTree, zeta: float, tol: float = 1e-9
) -> None:
    """Check completeness and every leaf's margin constraints; raise InvalidTree."""
    paths = tree.leaf_paths()
    depth = tree.depth()
    for path, cid in paths:
        if len(path) != depth:
            raise InvalidTree("witness tree is not complete")
        f = cls.by_id(cid)
        node = tree
        for bit in path:
            v = f.values[node.x]
            if bit == "0":
                if not v <= node.a - zeta + tol:
                    raise InvalidTree(
                        f"leaf {cid}: value {v} at x={node.x} exceeds {node.a} - {zeta}"
                    )
                node = node.left
            else:
                if not v >= node.a + zeta - tol:
                    raise InvalidTree(
                        f"leaf {cid}: value {v} at x={node.x} is below {node.a} + {zeta}"
                    )
                node = node.right


def fat(cls: ConceptClass, gamma: float) -> int:
    """Non-sequential fat-shattering dimension by brute force (|X| <= 12)."""
    if cls.domain_size > 12:
        raise TooLarge("fat-shattering brute force is limited to 12 domain points")
    if gamma <= 0:
        raise OutOfRange(f"margin must be positive, got {gamma}")
    n = len(cls)
    table = cls.table
    gap = 2.0 * gamma

    def point_splits(x: int) -> list[tuple[int, int]]:
        vals = sorted(set(table[:, x]))
        out = []
        seen = set()
        j = 0
        for v in vals:
            while j < len(vals) and vals[j] < v + gap - _MARGIN_TOL:
                j += 1
            if j >= len(vals):
                break
            a = (v + vals[j]) / 2.0
            lo, hi = a - gamma + _MARGIN_TOL, a + gamma - _MARGIN_TOL
            lmask = rmask = 0
            for r in range(n):
                if table[r, x] <= lo:
                    lmask |= 1 << r
                elif table[r, x] >= hi:
                    rmask |= 1 << r
            if lmask and rmask and (lmask, rmask) not in seen:
                seen.add((lmask, rmask))
                out.append((lmask, rmask))
        return out

    splits = [point_splits(x) for x in range(cls.domain_size)]

    def shatters(points: tuple[int, ...]) -> bool:
        # cells = one concept mask per sign pattern over the points chosen so far;
        # a single (lmask, rmask) witness per point is shared by all cells
        def extend(cells: list[int], remaining: tuple[int, ...]) -> bool:
            if not remaining:
                return True
            x, rest = remaining[0], remaining[1:]
            need = 1 << len(rest)
            for lmask, rmask in splits[x]:
                nxt = []
                ok = True
                for cell in cells:
                    lo_cell, hi_cell = cell & lmask, cell & rmask
                    if lo_cell.bit_count() < need or hi_cell.bit_count() < need:
                        ok = False
                        break
                    nxt.append(lo_cell)
                    nxt.append(hi_cell)
                if ok and extend(nxt, rest):
                    return True
            return False

        return extend([(1 << n) - 1], points)

    upper = min(cls.domain_size, n.bit_length() - 1 if n > 1 else 0)
    for k in range(upper, 0, -1):
        if any(shatters(combo) for combo in combinations(range(cls.domain_size), k)):
            return k
    return 0


def ldim_oracle(cls: ConceptClass) -> int:
    """Littlestone dimension of a {0,1}-valued class, by direct recursion.

    Splits on exact label values with no margins; the independent cross-check
    for sfat on Boolean classes.
    """
    table = cls.table
    if not ((table == 0.0) | (table == 1.0)).all():
        raise NotBoolean("ldim_oracle needs all concept values in {0, 1}")
    if len(cls) > MAX_CONCEPTS:
        raise TooLarge(f"ldim memoization supports at most {MAX_CONCEPTS} concepts")
    n = len(cls)
    zero_masks = []
    one_masks = []
    for x in range(cls.domain_size):
        zm = om = 0
        for r in range(n):
            if table[r, x] == 0.0:
                zm |= 1 << r
            else:
                om |= 1 << r
        zero_masks.append(zm)
        one_masks.append(om)

    memo: dict[int, int] = {}

    def rec(mask: int) -> int:
        got = memo.get(mask)
        if got is not None:
            return got
        best = 0
        if mask.bit_count() > 1:
            for x in range(cls.domain_size):
                v0, v1 = mask & zero_masks[x], mask & one_masks[x]
                if v0 and v1:
                    best = max(best, 1 + min(rec(v0), rec(v1)))
        memo[mask] = best
        return best

    return rec((1 << n) - 1)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def tree_to_json(tree: ShatterTree) -> str:
    def enc(node: ShatterTree):
        if node.is_leaf:
            return {"leaf": node.leaf}
        return {
            "x": node.x,
            "a": node.a,
            "left": enc(node.left),
            "right": enc(node.right),
        }

    return json.dumps(enc(tree), sort_keys=True)


def tree_from_json(text: str) -> ShatterTree:
    def dec(obj) -> ShatterTree:
        if "leaf" in obj:
            return ShatterTree(leaf=int(obj["leaf"]))
        return ShatterTree(
            x=int(obj["x"]),
            a=float(obj["a"]),
            left=dec(obj["left"]),
            right=dec(obj["right"]),
        )

    return dec(json.loads(text))
