"""Robust online learning: the super-bin learner, adversaries, and games.

The learner (parameter zeta) keeps the set of concepts consistent with all
feedback so far.  To predict at x it scores every super-bin of the interleaved
2*zeta cover by the sfat dimension (at margin 2*zeta) of the surviving
concepts mapping into that bin, and answers the mean of the maximizing
midpoints; empty bins score -1 so they never tie with populated ones.  On
feedback c_hat it keeps exactly the concepts within the open zeta-ball of
c_hat.  With feedback accurate to zeta, rounds with |prediction - truth| >
5*zeta never exceed sfat at margin 2*zeta of the class.

A mistake-only variant (parameter epsilon) runs the same machinery at
zeta = epsilon/5 but updates only on rounds with |prediction - truth| >
epsilon; it drives the shadow-estimation stream.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .concepts import (
    Concept,
    ConceptClass,
    DomainPoint,
    cover_new,
    point_index,
    round_to_grid,
    _grid_order,
)
from .dimensions import SfatCache, ShatterTree
from .errors import (
    EmptySurvivingSet,
    InvalidFeedback,
    OutOfRange,
    TreeExhausted,
)
from .seeding import child_rng


def prediction_grid(zeta: float) -> tuple[float, ...]:
    """Super-bin midpoints used by the learner at accuracy zeta.

    These are the interleaved-cover midpoints of the 2*zeta cover: spacing
    2*zeta, super-bin width 4*zeta.  When 1/zeta is an odd integer the last
    midpoint of that construction does not land on the 2*zeta grid, so the
    grid is extended by one midpoint past 1 - 2*zeta; coverage of [0,1] by
    the super-bins and the 2*zeta spacing (all the mistake-bound proof needs)
    are preserved.
    """
    n = _grid_order(zeta)
    if n < 3:
        raise OutOfRange(
            f"zeta={zeta} leaves no super-bin midpoints; the learner needs zeta <= 1/3"
        )
    if n % 2 == 0:
        return cover_new(2.0 / n).superbin_midpoints
    count = math.ceil(n / 2) - 1
    return tuple(2 * k / n for k in range(1, count + 1))


def rsoa_predict(
    cls: ConceptClass,
    surviving: Iterable[int],
    x: "int | DomainPoint",
    zeta: float,
    cache: Optional[SfatCache] = None,
) -> float:
    """One prediction of the learner at accuracy zeta from a surviving set."""
    ids = frozenset(surviving)
    if not ids:
        raise EmptySurvivingSet("cannot predict from an empty surviving set")
    cache = cache or SfatCache(cls, 2.0 * zeta)
    mask = cache.mask_of_ids(ids)
    xi = point_index(x)
    grid = prediction_grid(zeta)
    radius = 2.0 * zeta
    col = cls.table[:, xi]
    best = None
    maximizers: list[float] = []
    for r in grid:
        sub = 0
        for row in range(len(cls)):
            if mask >> row & 1 and abs(col[row] - r) < radius:
                sub |= 1 << row
        score = cache.score(sub)
        if best is None or score > best:
            best = score
            maximizers = [r]
        elif score == best:
            maximizers.append(r)
    return sum(maximizers) / len(maximizers)


def rsoa_update(
    cls: ConceptClass,
    surviving: Iterable[int],
    x: "int | DomainPoint",
    feedback: float,
    zeta: float,
) -> frozenset[int]:
    """Concepts of `surviving` within the open zeta-ball of the feedback at x."""
    if not 0.0 <= feedback <= 1.0:
        raise OutOfRange(f"feedback {feedback} outside [0,1]")
    xi = point_index(x)
    col = cls.table[:, xi]
    return frozenset(
        cid for cid in surviving if abs(col[cls.row_of(cid)] - feedback) < zeta
    )


class RsoaState:
    """Mutable learner state: shared sfat cache plus precomputed bin masks.

    `strict=False` lets the surviving set go empty (needed inside the
    stability sampler, where deliberately invalid injected examples can wipe
    the set); the prediction then falls back to the all-bins tie, whose mean
    is the midpoint of the grid.
    """

    def __init__(self, cls: ConceptClass, zeta: float, strict: bool = True):
        self.cls = cls
        self.zeta = float(zeta)
        self.strict = strict
        self.cache = SfatCache(cls, 2.0 * self.zeta)
        self.grid = prediction_grid(self.zeta)
        n = len(cls)
        radius = 2.0 * self.zeta
        table = cls.table
        # bin membership masks depend only on (x, r): precompute once
        self.bin_masks = [
            [
                sum(
                    1 << row
                    for row in range(n)
                    if abs(table[row, x] - r) < radius
                )
                for r in self.grid
            ]
            for x in range(cls.domain_size)
        ]
        self.mask = self.cache.full_mask()

    @property
    def surviving_ids(self) -> frozenset[int]:
        return self.cache.ids_of_mask(self.mask)

    def size(self) -> int:
        return self.mask.bit_count()

    def predict_with_maximizers(self, xi: int) -> tuple[float, list[float]]:
        if self.mask == 0 and self.strict:
            raise EmptySurvivingSet("cannot predict from an empty surviving set")
        best = None
        maximizers: list[float] = []
        for r, bmask in zip(self.grid, self.bin_masks[xi]):
            score = self.cache.score(self.mask & bmask)
            if best is None or score > best:
                best = score
                maximizers = [r]
            elif score == best:
                maximizers.append(r)
        return sum(maximizers) / len(maximizers), maximizers

    def predict(self, xi: int) -> float:
        return self.predict_with_maximizers(xi)[0]

    def update(self, xi: int, feedback: float) -> None:
        if not 0.0 <= feedback <= 1.0:
            raise OutOfRange(f"feedback {feedback} outside [0,1]")
        col = self.cls.table[:, xi]
        new = 0
        m = self.mask
        while m:
            low = m & -m
            row = low.bit_length() - 1
            if abs(col[row] - feedback) < self.zeta:
                new |= low
            m ^= low
        if new == 0 and self.strict:
            raise InvalidFeedback(
                f"update at x={xi} with feedback {feedback} wiped the surviving set; "
                "valid feedback never eliminates the target"
            )
        self.mask = new

    def final_hypothesis(self) -> Concept:
        """The prediction rule over the whole domain, materialized (id -1)."""
        return Concept(
            id=-1, values=tuple(self.predict(x) for x in range(self.cls.domain_size))
        )


def run_rsoa_on_sample(
    cls: ConceptClass,
    examples: Sequence[tuple[int, float]],
    zeta: float,
    strict: bool = False,
    state: Optional[RsoaState] = None,
) -> Concept:
    """Feed (x, feedback) examples sequentially; return the final hypothesis."""
    st = state or RsoaState(cls, zeta, strict=strict)
    for xi, y in examples:
        st.update(xi, y)
    return st.final_hypothesis()


# ---------------------------------------------------------------------------
# Noise strategies and feedback modes
# ---------------------------------------------------------------------------

class NoiseStrategy:
    """Produces feedback c_hat from the true value; must stay within accuracy."""

    name = "noise"

    def apply(self, c_val: float, y_hat: float, zeta: float, rng: np.random.Generator) -> float:
        raise NotImplementedError


class ExactNoise(NoiseStrategy):
    name = "exact"

    def apply(self, c_val, y_hat, zeta, rng):
        return c_val


class RoundToGridNoise(NoiseStrategy):
    """Deterministic rounding to the step-grid midpoints (error <= step/2)."""

    def __init__(self, step: float):
        self.step = step
        self.name = f"round_to_grid({step})"

    def apply(self, c_val, y_hat, zeta, rng):
        return round_to_grid(c_val, self.step)


class UniformNoise(NoiseStrategy):
    name = "uniform_within"

    def apply(self, c_val, y_hat, zeta, rng):
        offset = rng.uniform(-zeta, zeta)
        if abs(offset) >= zeta:
            offset *= 1.0 - 1e-9
        return min(1.0, max(0.0, c_val + offset))


class ExtremeNoise(NoiseStrategy):
    """Push feedback (almost) the full accuracy budget away from the prediction.

    The offset stays a hair inside zeta: the learner's update ball is open, so
    feedback at exactly distance zeta would eliminate the target, which the
    strong-feedback protocol (strictly zeta-accurate feedback) rules out.
    """

    name = "adversarial_extreme"

    def apply(self, c_val, y_hat, zeta, rng):
        offset = zeta * (1.0 - 1e-9)
        pushed = c_val + offset if y_hat <= c_val else c_val - offset
        return min(1.0, max(0.0, pushed))


ALL_NOISE_STRATEGIES: tuple[Callable[[float], NoiseStrategy], ...] = (
    lambda zeta: ExactNoise(),
    lambda zeta: RoundToGridNoise(zeta),
    lambda zeta: UniformNoise(),
    lambda zeta: ExtremeNoise(),
)


@dataclass(frozen=True)
class StrongFeedback:
    """Feedback every round, accurate to zeta; mistakes are counted at 5*zeta."""

    zeta: float
    noise: NoiseStrategy

    @property
    def mistake_threshold(self) -> float:
        return 5.0 * self.zeta


@dataclass(frozen=True)
class MistakeOnly:
    """Feedback (accurate to epsilon/10) only on rounds with an epsilon-mistake."""

    epsilon: float

    @property
    def zeta(self) -> float:
        return self.epsilon / 5.0

    @property
    def mistake_threshold(self) -> float:
        return self.epsilon


# ---------------------------------------------------------------------------
# Adversaries
# ---------------------------------------------------------------------------

class Adversary:
    """Chooses the stream of domain points in a game."""

    def reset(self, rng: np.random.Generator) -> None:
        pass

    def next_point(self, t: int, rng: np.random.Generator) -> int:
        raise NotImplementedError


class RandomAdversary(Adversary):
    def __init__(self, domain_size: int):
        self.domain_size = domain_size

    def next_point(self, t, rng):
        return int(rng.integers(self.domain_size))


class CyclicAdversary(Adversary):
    def __init__(self, points: Sequence[int]):
        self.points = list(points)

    def next_point(self, t, rng):
        return self.points[t % len(self.points)]


class WeakTreeAdversary:
    """Walks a shattering tree, always claiming a mistake.

    At node (x, a): present x; if the learner predicts below a, claim the truth
    is above and descend right, else claim below and descend left.  At a leaf,
    commit to the leaf's witness concept — it certifies every claim made on
    the way down as a genuine zeta-mistake.
    """

    def __init__(self, witness: ShatterTree):
        self.root = witness
        self.node = witness
        self.committed: Optional[int] = witness.leaf if witness.is_leaf else None

    @property
    def depth(self) -> int:
        return self.root.depth()

    def next_point(self) -> int:
        if self.node.is_leaf:
            raise TreeExhausted("adversary has committed; no more points to present")
        return self.node.x

    def observe_prediction(self, y_hat: float) -> bool:
        """Record the claim, descend, and return the claimed direction (True=right)."""
        if self.node.is_leaf:
            raise TreeExhausted("adversary has committed; no more claims")
        go_right = y_hat < self.node.a
        self.node = self.node.right if go_right else self.node.left
        if self.node.is_leaf:
            self.committed = self.node.leaf
        return go_right


def weak_adversary_from_tree(witness: ShatterTree) -> WeakTreeAdversary:
    return WeakTreeAdversary(witness)


# ---------------------------------------------------------------------------
# Transcripts and game harnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Round:
    t: int
    x: int
    prediction: float
    feedback: Optional[float]
    mistake: bool
    v_before: int
    v_after: int


@dataclass
class Transcript:
    """Full audit record of one online game."""

    zeta: float
    mistake_threshold: float
    target_id: int
    rounds: list[Round] = field(default_factory=list)
    final_hypothesis: Optional[Concept] = None
    maximizer_spreads: list[float] = field(default_factory=list)

    @property
    def mistakes(self) -> int:
        return sum(1 for r in self.rounds if r.mistake)

    @property
    def updates(self) -> int:
        return sum(1 for r in self.rounds if r.v_after != r.v_before)

    def to_jsonl(self) -> str:
        lines = []
        for r in self.rounds:
            lines.append(
                json.dumps(
                    {
                        "t": r.t,
                        "x": r.x,
                        "prediction": r.prediction,
                        "feedback": r.feedback,
                        "mistake": r.mistake,
                        "v_before": r.v_before,
                        "v_after": r.v_after,
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["round", "x", "prediction", "feedback", "mistake", "V"])
            for r in self.rounds:
                w.writerow(
                    [r.t, r.x, r.prediction, r.feedback, r.mistake, r.v_after]
                )


def run_online_game(
    cls: ConceptClass,
    target_id: int,
    adversary: Adversary,
    mode: "StrongFeedback | MistakeOnly",
    T: int,
    seed: int,
) -> Transcript:
    """Play T rounds of the strong-feedback or mistake-only protocol.

    The harness validates the noise contract each round and treats an emptied
    surviving set as an InvalidFeedback fault — with in-contract feedback the
    target survives every update.
    """
    rng = child_rng(seed, 0)
    adversary.reset(rng)
    target = cls.by_id(target_id)
    zeta = mode.zeta
    state = RsoaState(cls, zeta, strict=True)
    tr = Transcript(
        zeta=zeta, mistake_threshold=mode.mistake_threshold, target_id=target_id
    )
    for t in range(T):
        xi = adversary.next_point(t, rng)
        v_before = state.size()
        y_hat, maxs = state.predict_with_maximizers(xi)
        tr.maximizer_spreads.append(max(maxs) - min(maxs))
        c_val = target.values[xi]
        mistake = abs(y_hat - c_val) > mode.mistake_threshold
        feedback: Optional[float] = None
        if isinstance(mode, StrongFeedback):
            feedback = mode.noise.apply(c_val, y_hat, zeta, rng)
            if abs(feedback - c_val) > zeta + 1e-12:
                raise InvalidFeedback(
                    f"noise {mode.noise.name} produced |c_hat - c| = "
                    f"{abs(feedback - c_val)} > zeta = {zeta}"
                )
            state.update(xi, feedback)
        elif mistake:
            feedback = round_to_grid(c_val, 2.0 * (mode.epsilon / 10.0))
            if abs(feedback - c_val) > mode.epsilon / 10.0 + 1e-12:
                raise InvalidFeedback("mistake-only feedback out of contract")
            state.update(xi, feedback)
        tr.rounds.append(
            Round(
                t=t,
                x=xi,
                prediction=y_hat,
                feedback=feedback,
                mistake=mistake,
                v_before=v_before,
                v_after=state.size(),
            )
        )
    tr.final_hypothesis = state.final_hypothesis()
    return tr


def rsoa_mistake_only_step(
    cls: ConceptClass,
    surviving: Iterable[int],
    x: "int | DomainPoint",
    epsilon: float,
    true_value: float,
    cache: Optional[SfatCache] = None,
) -> tuple[float, frozenset[int]]:
    """One round of the mistake-only learner; returns (prediction, new set).

    The surviving set changes only when |prediction - true_value| > epsilon,
    in which case the update uses grid-rounded feedback (error <= epsilon/10)
    and the open epsilon/5 ball.
    """
    ids = frozenset(surviving)
    zeta = epsilon / 5.0
    y_hat = rsoa_predict(cls, ids, x, zeta, cache=cache)
    if abs(y_hat - true_value) > epsilon:
        feedback = round_to_grid(true_value, 2.0 * (epsilon / 10.0))
        return y_hat, rsoa_update(cls, ids, x, feedback, zeta)
    return y_hat, ids


@dataclass(frozen=True)
class WeakForcingResult:
    claimed_mistakes: int
    committed_target: int
    all_claims_valid: bool
    rounds: tuple[tuple[int, float, bool], ...]  # (x, prediction, went_right)


def run_weak_forcing_game(
    cls: ConceptClass,
    adversary: WeakTreeAdversary,
    learner: Callable[[int], float],
    zeta: float,
) -> WeakForcingResult:
    """Drive any learner through the tree adversary; validate its claims.

    The adversary claims a mistake every round; after it commits, each claim is
    checked against the committed concept (predict-below-threshold rounds need
    the concept at least zeta above it, and symmetrically), so the count of
    claimed rounds is a certified lower bound on the learner's zeta-mistakes.
    """
    rounds = []
    while adversary.committed is None:
        xi = adversary.next_point()
        y_hat = learner(xi)
        went_right = adversary.observe_prediction(y_hat)
        rounds.append((xi, y_hat, went_right))
    target = cls.by_id(adversary.committed)
    valid = True
    for xi, y_hat, went_right in rounds:
        gap = target.values[xi] - y_hat if went_right else y_hat - target.values[xi]
        if gap < zeta - 1e-12:
            valid = False
    return WeakForcingResult(
        claimed_mistakes=len(rounds),
        committed_target=adversary.committed,
        all_claims_valid=valid,
        rounds=tuple(rounds),
    )


def rsoa_as_weak_learner(cls: ConceptClass, zeta: float) -> Callable[[int], float]:
    """The super-bin predictor on the full class; weak feedback is unusable
    for its ball update, so the set never shrinks."""
    state = RsoaState(cls, zeta, strict=True)
    return state.predict


# ---------------------------------------------------------------------------
# Shadow estimation stream and its sample-complexity calculator
# ---------------------------------------------------------------------------

def run_shadow_stream(
    cls: ConceptClass,
    target_id: int,
    measurement_order: Sequence[int],
    epsilon: float,
) -> tuple[Transcript, list[float]]:
    """Run the mistake-only learner over a stream of measurement indices.

    Returns the transcript plus the learner's estimate at every stream
    position.  Feedback (only on mistake rounds) is the true expectation
    rounded to the epsilon/5 grid, hence within epsilon/10.
    """
    adversary = CyclicAdversary(list(measurement_order))
    tr = run_online_game(
        cls,
        target_id,
        adversary,
        MistakeOnly(epsilon=epsilon),
        T=len(measurement_order),
        seed=0,
    )
    return tr, [r.prediction for r in tr.rounds]


def gentle_sample_complexity(
    sfat_dim: int, m: int, epsilon: float, alpha: float, delta: float
) -> int:
    """Copies needed for gentle shadow estimation of m measurements.

    ceil(C * sfat^2 * log2(m)^2 * ln(1/delta) / (eps^2 * min(alpha^2, eps^2)))
    with the declared constant C = 1.
    """
    if sfat_dim < 1:
        raise OutOfRange(f"sfat_dim must be positive, got {sfat_dim}")
    if m < 2:
        raise OutOfRange(f"m must be at least 2, got {m}")
    if not 0 < epsilon <= 1 or not 0 < alpha <= 1:
        raise OutOfRange("epsilon and alpha must lie in (0, 1]")
    if not 0 < delta < 1:
        raise OutOfRange(f"delta must lie in (0, 1), got {delta}")
    num = (sfat_dim**2) * (math.log2(m) ** 2) * math.log(1.0 / delta)
    den = epsilon**2 * min(alpha**2, epsilon**2)
    return math.ceil(num / den)
