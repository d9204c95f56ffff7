"""Batch experiment runner: one subcommand per experiment kind.

Usage: shatterlab <kind> <config.json> [--seed N] [--out DIR]

Kinds: dims, online, adversary, stability, privacy, comm, quantum, shadow.
Each run validates its config up front (exit 2 on bad config), executes, and
writes out/summary.json plus an optional out/detail.csv.  Identical config
and seed produce byte-identical summaries.  Experiment faults exit 1.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import classes as bundled
from .concepts import ConceptClass, Distribution, class_from_json
from .dimensions import sfat, tree_to_json
from .errors import ConfigError, ShatterlabError
from .online import (
    ExactNoise,
    ExtremeNoise,
    RandomAdversary,
    RoundToGridNoise,
    StrongFeedback,
    UniformNoise,
    run_online_game,
    run_shadow_stream,
    run_weak_forcing_game,
    rsoa_as_weak_learner,
    weak_adversary_from_tree,
)
from .privacy import discretize_hypotheses, dp_test, generic_private_learner
from .communication import (
    BaselineEvalProtocol,
    CorruptedEvalProtocol,
    all_instances,
    augindex_via_eval,
    cc_lower_bound,
)
from .quantum import (
    Ensemble,
    audenaert_bound,
    holevo_chi,
    materialize_concept_class,
    max_holevo,
    random_basis_measurements,
    random_density_matrix,
    state_from_json,
    measurement_from_json,
)
from .seeding import child_rng
from .stability import stability_experiment
from .concepts import LabeledExample, DomainPoint

SCHEMA_VERSION = 1

KINDS = (
    "dims",
    "online",
    "adversary",
    "stability",
    "privacy",
    "comm",
    "quantum",
    "shadow",
)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _zeta_of(cfg: dict, key: str = "zeta") -> float:
    _require(key in cfg, f"missing parameter {key!r}")
    z = float(cfg[key])
    _require(0 < z < 1, f"{key} must lie in (0, 1)")
    recip = 1.0 / z
    _require(abs(recip - round(recip)) < 1e-9, f"1/{key} = {recip} is not an integer")
    return z


def _load_class(cfg: dict, seed: int) -> ConceptClass:
    src = cfg.get("class")
    _require(isinstance(src, dict), "config needs a 'class' object")
    try:
        if "bundled" in src:
            return bundled.bundled_class(src["bundled"])
        if "inline" in src:
            return class_from_json(json.dumps(src["inline"]))
        if "generated" in src:
            g = src["generated"]
            return bundled.generate_class(
                int(g["domain_size"]),
                int(g["n_concepts"]),
                float(g.get("zeta", cfg.get("zeta", 0.25))),
                seed=int(g.get("seed", seed)),
                boolean=bool(g.get("boolean", False)),
            )
    except ConfigError:
        raise
    except ShatterlabError as exc:
        # bad class parameters are a config problem, not an experiment fault
        raise ConfigError(f"class: {exc}")
    raise ConfigError("class source must be 'bundled', 'inline', or 'generated'")


def _write_summary(out_dir: str, payload: dict) -> None:
    payload = dict(payload)
    payload["schema"] = SCHEMA_VERSION
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_detail(out_dir: str, header: list[str], rows: list[list]) -> None:
    with open(os.path.join(out_dir, "detail.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


_NOISES = {
    "exact": lambda zeta: ExactNoise(),
    "round_to_grid": lambda zeta: RoundToGridNoise(zeta),
    "uniform_within": lambda zeta: UniformNoise(),
    "adversarial_extreme": lambda zeta: ExtremeNoise(),
}


def run_dims(cfg: dict, seed: int, out_dir: str) -> None:
    zeta = _zeta_of(cfg)
    cls = _load_class(cfg, seed)
    result = sfat(cls, None, zeta)
    _write_summary(
        out_dir,
        {
            "kind": "dims",
            "seed": seed,
            "zeta": zeta,
            "n_concepts": len(cls),
            "sfat": result.dimension,
            "witness": json.loads(tree_to_json(result.witness)),
        },
    )


def run_online(cfg: dict, seed: int, out_dir: str) -> None:
    zeta = _zeta_of(cfg)
    T = int(cfg.get("T", 100))
    _require(T >= 1, "T must be at least 1")
    noise_name = cfg.get("noise", "exact")
    _require(noise_name in _NOISES, f"unknown noise {noise_name!r}")
    cls = _load_class(cfg, seed)
    target = int(cfg.get("target_id", cls.concepts[0].id))
    _require(target in cls.ids(), f"target_id {target} not in class")
    mode = StrongFeedback(zeta=zeta, noise=_NOISES[noise_name](zeta))
    tr = run_online_game(cls, target, RandomAdversary(cls.domain_size), mode, T, seed)
    bound = sfat(cls, None, 2 * zeta).dimension
    _write_summary(
        out_dir,
        {
            "kind": "online",
            "seed": seed,
            "zeta": zeta,
            "noise": noise_name,
            "rounds": T,
            "mistakes": tr.mistakes,
            "sfat_bound": bound,
            "within_bound": tr.mistakes <= bound,
        },
    )
    _write_detail(
        out_dir,
        ["round", "x", "prediction", "feedback", "mistake", "V"],
        [[r.t, r.x, r.prediction, r.feedback, r.mistake, r.v_after] for r in tr.rounds],
    )


def run_adversary(cfg: dict, seed: int, out_dir: str) -> None:
    zeta = _zeta_of(cfg)
    cls = _load_class(cfg, seed)
    result = sfat(cls, None, zeta)
    rows = []
    summary_losses = {}
    for name, learner in (
        ("rsoa", rsoa_as_weak_learner(cls, zeta)),
        ("constant_half", lambda x: 0.5),
    ):
        adv = weak_adversary_from_tree(result.witness)
        res = run_weak_forcing_game(cls, adv, learner, zeta)
        summary_losses[name] = {
            "claimed_mistakes": res.claimed_mistakes,
            "all_claims_valid": res.all_claims_valid,
            "committed_target": res.committed_target,
        }
        for xi, pred, right in res.rounds:
            rows.append([name, xi, pred, right])
    _write_summary(
        out_dir,
        {
            "kind": "adversary",
            "seed": seed,
            "zeta": zeta,
            "sfat": result.dimension,
            "learners": summary_losses,
        },
    )
    _write_detail(out_dir, ["learner", "x", "prediction", "went_right"], rows)


def run_stability(cfg: dict, seed: int, out_dir: str) -> None:
    zeta = _zeta_of(cfg)
    runs = int(cfg.get("runs", 200))
    alpha = float(cfg.get("alpha", 0.5))
    _require(runs >= 100, "runs must be at least 100")
    _require(alpha > 0, "alpha must be positive")
    cls = _load_class(cfg, seed)
    target = int(cfg.get("target_id", cls.concepts[0].id))
    _require(target in cls.ids(), f"target_id {target} not in class")
    dist = (
        Distribution(tuple(cfg["distribution"]))
        if "distribution" in cfg
        else Distribution.uniform(cls.domain_size)
    )
    report = stability_experiment(cls, target, dist, zeta, alpha, runs, seed)
    payload = json.loads(report.to_json())
    payload.update({"kind": "stability", "seed": seed})
    _write_summary(out_dir, payload)


def run_privacy(cfg: dict, seed: int, out_dir: str) -> None:
    zeta = _zeta_of(cfg)
    eps = float(cfg.get("epsilon", 1.0))
    trials = int(cfg.get("trials", 10_000))
    _require(eps > 0, "epsilon must be positive")
    _require(trials >= 10_000, "trials must be at least 10^4")
    domain_size = int(cfg.get("domain_size", 1))
    _require(1 <= domain_size <= 4, "domain_size must be in 1..4")
    coll = discretize_hypotheses(domain_size, zeta)
    x = DomainPoint(0)
    base = [LabeledExample(x, 0.1)] * int(cfg.get("m", 4))
    neighbor = list(base)
    neighbor[-1] = LabeledExample(x, 0.9)

    def learner(sample, rng):
        return generic_private_learner(coll, sample, eps, zeta, rng)

    report = dp_test(
        learner,
        tuple(base),
        tuple(neighbor),
        eps,
        float(cfg.get("delta", 0.0)),
        trials,
        seed,
    )
    _write_summary(
        out_dir,
        {
            "kind": "privacy",
            "seed": seed,
            "zeta": zeta,
            "epsilon": eps,
            "trials": trials,
            "verdict": report.verdict,
            "max_violation": report.max_violation,
            "hypotheses": len(coll),
        },
    )
    _write_detail(
        out_dir,
        ["event", "freq_s", "freq_s_prime", "slack"],
        [[e.event, e.freq_s, e.freq_s_prime, e.slack] for e in report.events],
    )


def run_comm(cfg: dict, seed: int, out_dir: str) -> None:
    zeta = _zeta_of(cfg)
    failure_rate = float(cfg.get("failure_rate", 0.0))
    cls = _load_class(cfg, seed)
    result = sfat(cls, None, zeta)
    d = min(result.dimension, int(cfg.get("depth", result.dimension)))
    _require(d >= 1, "class must have sfat >= 1 for a reduction experiment")
    base = BaselineEvalProtocol(cls, zeta)
    proto = CorruptedEvalProtocol(base, failure_rate) if failure_rate > 0 else base
    rng = child_rng(seed, 0xC0)
    rows = []
    successes = 0
    total = 0
    for inst in all_instances(d):
        run = augindex_via_eval(cls, result.witness, inst, proto, zeta, rng=rng)
        rows.append([inst.x, inst.i, run.bits_sent, run.success])
        successes += run.success
        total += 1
    _write_summary(
        out_dir,
        {
            "kind": "comm",
            "seed": seed,
            "zeta": zeta,
            "depth": d,
            "failure_rate": failure_rate,
            "instances": total,
            "success_rate": successes / total,
            "bits_per_run": proto.bits,
            "lower_bound_eps0": cc_lower_bound(result.dimension, 0.0),
        },
    )
    _write_detail(out_dir, ["x", "i", "bits", "success"], rows)


def _load_states(cfg: dict, seed: int):
    if "states_files" in cfg:
        states = []
        for path in cfg["states_files"]:
            with open(path) as fh:
                states.append(state_from_json(fh.read()))
        return states
    g = cfg.get("generated_states", {"dim": 2, "count": 2})
    dim = int(g.get("dim", 2))
    count = int(g.get("count", 2))
    _require(dim in (2, 4, 8, 16), "state dim must be a power of two in 2..16")
    _require(1 <= count <= 16, "state count must be in 1..16")
    rng = child_rng(seed, 0x57A7E5)
    return [random_density_matrix(dim, rng) for _ in range(count)]


def run_quantum(cfg: dict, seed: int, out_dir: str) -> None:
    states = _load_states(cfg, seed)
    ens = Ensemble.uniform(states)
    chi_uniform = holevo_chi(ens)
    chi_star, weights = max_holevo(states, tol=float(cfg.get("tol", 1e-6)))
    _write_summary(
        out_dir,
        {
            "kind": "quantum",
            "seed": seed,
            "n_states": len(states),
            "dim": states[0].dim,
            "chi_uniform": chi_uniform,
            "chi_star": chi_star,
            "weights": list(weights),
            "audenaert_bound": audenaert_bound(ens),
        },
    )


def run_shadow(cfg: dict, seed: int, out_dir: str) -> None:
    eps = float(cfg.get("epsilon", 0.5))
    _require(0 < eps < 1, "epsilon must lie in (0, 1)")
    recip = 5.0 / eps
    _require(abs(recip - round(recip)) < 1e-9, "5/epsilon must be an integer")
    states = _load_states(cfg, seed)
    n_meas = int(cfg.get("n_measurements", 4))
    _require(1 <= n_meas <= 16, "n_measurements must be in 1..16")
    rng = child_rng(seed, 0x5AD0)
    if "measurements_files" in cfg:
        meas = []
        for path in cfg["measurements_files"]:
            with open(path) as fh:
                meas.append(measurement_from_json(fh.read()))
    else:
        meas = random_basis_measurements(states[0].dim, rng, n_meas)
    cls = materialize_concept_class(states, meas)
    target = int(cfg.get("target_id", 0))
    _require(target in cls.ids(), "target_id out of range")
    repeats = int(cfg.get("stream_repeats", 2))
    order = list(range(len(meas))) * repeats
    tr, estimates = run_shadow_stream(cls, target, order, eps)
    bound = sfat(cls, None, 2 * eps / 5).dimension
    _write_summary(
        out_dir,
        {
            "kind": "shadow",
            "seed": seed,
            "epsilon": eps,
            "stream_length": len(order),
            "updates": tr.updates,
            "sfat_bound": bound,
            "within_bound": tr.updates <= bound,
            "mistakes": tr.mistakes,
        },
    )
    _write_detail(
        out_dir,
        ["position", "measurement", "estimate", "truth", "mistake"],
        [
            [i, r.x, est, cls.by_id(target).values[r.x], r.mistake]
            for i, (r, est) in enumerate(zip(tr.rounds, estimates))
        ],
    )


_RUNNERS = {
    "dims": run_dims,
    "online": run_online,
    "adversary": run_adversary,
    "stability": run_stability,
    "privacy": run_privacy,
    "comm": run_comm,
    "quantum": run_quantum,
    "shadow": run_shadow,
}


def main(argv: "list[str] | None" = None) -> int:
    parser = argparse.ArgumentParser(prog="shatterlab", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("config", help="path to the experiment config JSON")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default="out", help="output directory")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        seed = args.seed if args.seed is not None else cfg.get("seed")
        if seed is None:
            raise ConfigError("a seed is mandatory (config 'seed' or --seed)")
        _RUNNERS[args.kind](cfg, int(seed), args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ShatterlabError as exc:
        print(f"experiment fault: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
