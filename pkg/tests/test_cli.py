import json
import os

import pytest

from shatterlab.classes import generate_class
from shatterlab.cli import main
from shatterlab.errors import TooLarge


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_summary(out_dir):
    with open(os.path.join(out_dir, "summary.json")) as fh:
        return json.load(fh)


class TestGenerateClass:
    def test_singleton(self):
        cls = generate_class(1, 1, 1 / 4, seed=0)
        assert len(cls) == 1 and cls.domain_size == 1

    def test_deterministic(self):
        a = generate_class(4, 10, 1 / 4, seed=42)
        b = generate_class(4, 10, 1 / 4, seed=42)
        assert [c.values for c in a.concepts] == [c.values for c in b.concepts]

    def test_values_on_fine_grid(self):
        zeta = 1 / 4
        cls = generate_class(3, 12, zeta, seed=7)
        n = round(5 / zeta)
        mids = {(2 * k + 1) / (2 * n) for k in range(n)}
        for c in cls.concepts:
            assert all(v in mids for v in c.values)

    def test_guards(self):
        with pytest.raises(TooLarge):
            generate_class(9, 4, 1 / 4, seed=0)
        with pytest.raises(TooLarge):
            generate_class(2, 65, 1 / 4, seed=0)


class TestCliRuns:
    def test_dims_on_bundled_class(self, tmp_path):
        cfg = write_config(
            tmp_path, {"seed": 7, "zeta": 1 / 6, "class": {"bundled": "four_constants"}}
        )
        out = str(tmp_path / "out")
        assert main(["dims", cfg, "--out", out]) == 0
        summary = read_summary(out)
        assert summary["sfat"] == 2
        assert summary["schema"] == 1

    def test_online_singleton_no_mistakes(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "seed": 1,
                "zeta": 1 / 8,
                "T": 30,
                "class": {"inline": {"domain_size": 1, "concepts": [{"id": 0, "values": [0.5]}]}},
            },
        )
        out = str(tmp_path / "o")
        assert main(["online", cfg, "--out", out]) == 0
        summary = read_summary(out)
        assert summary["mistakes"] == 0
        assert summary["within_bound"]
        assert os.path.exists(os.path.join(out, "detail.csv"))

    def test_malformed_zeta_exits_2(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path, {"seed": 1, "zeta": 0.3, "class": {"bundled": "four_constants"}}
        )
        assert main(["dims", cfg, "--out", str(tmp_path / "x")]) == 2
        assert "zeta" in capsys.readouterr().err

    def test_missing_seed_exits_2(self, tmp_path):
        cfg = write_config(
            tmp_path, {"zeta": 0.25, "class": {"bundled": "four_constants"}}
        )
        assert main(["dims", cfg, "--out", str(tmp_path / "x")]) == 2

    def test_seed_flag_overrides(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "seed": 1,
                "zeta": 1 / 8,
                "T": 10,
                "class": {"generated": {"domain_size": 3, "n_concepts": 8, "zeta": 1 / 8, "seed": 5}},
            },
        )
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        assert main(["online", cfg, "--seed", "99", "--out", out1]) == 0
        assert main(["online", cfg, "--seed", "99", "--out", out2]) == 0
        assert read_summary(out1)["seed"] == 99

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "seed": 11,
                "zeta": 1 / 8,
                "T": 25,
                "noise": "uniform_within",
                "class": {"generated": {"domain_size": 4, "n_concepts": 12, "zeta": 1 / 8}},
            },
        )
        out1, out2 = str(tmp_path / "r1"), str(tmp_path / "r2")
        assert main(["online", cfg, "--out", out1]) == 0
        assert main(["online", cfg, "--out", out2]) == 0
        b1 = open(os.path.join(out1, "summary.json"), "rb").read()
        b2 = open(os.path.join(out2, "summary.json"), "rb").read()
        assert b1 == b2

    def test_adversary_run(self, tmp_path):
        cfg = write_config(
            tmp_path, {"seed": 3, "zeta": 1 / 6, "class": {"bundled": "four_constants"}}
        )
        out = str(tmp_path / "adv")
        assert main(["adversary", cfg, "--out", out]) == 0
        summary = read_summary(out)
        for learner in ("rsoa", "constant_half"):
            info = summary["learners"][learner]
            assert info["claimed_mistakes"] >= summary["sfat"]
            assert info["all_claims_valid"]

    def test_stability_run(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "seed": 5,
                "zeta": 1 / 4,
                "alpha": 0.5,
                "runs": 120,
                "class": {"bundled": "two_constants"},
            },
        )
        out = str(tmp_path / "st")
        assert main(["stability", cfg, "--out", out]) == 0
        summary = read_summary(out)
        assert summary["empirical_frequency"] >= summary["theoretical_floor"] - 0.2

    def test_privacy_run(self, tmp_path):
        cfg = write_config(
            tmp_path, {"seed": 9, "zeta": 1 / 2, "epsilon": 1.0, "trials": 10_000}
        )
        out = str(tmp_path / "pv")
        assert main(["privacy", cfg, "--out", out]) == 0
        assert read_summary(out)["verdict"] is True

    def test_comm_run(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "seed": 13,
                "zeta": 1 / 4,
                "class": {
                    "generated": {"domain_size": 3, "n_concepts": 8, "zeta": 1 / 4, "boolean": True}
                },
            },
        )
        out = str(tmp_path / "cm")
        rc = main(["comm", cfg, "--out", out])
        assert rc == 0
        summary = read_summary(out)
        assert summary["success_rate"] == 1.0

    def test_quantum_run(self, tmp_path):
        cfg = write_config(
            tmp_path, {"seed": 17, "generated_states": {"dim": 2, "count": 3}}
        )
        out = str(tmp_path / "qm")
        assert main(["quantum", cfg, "--out", out]) == 0
        summary = read_summary(out)
        assert summary["chi_star"] >= summary["chi_uniform"] - 1e-6
        assert summary["chi_uniform"] <= summary["audenaert_bound"] + 1e-9

    def test_shadow_run(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"seed": 19, "epsilon": 0.5, "generated_states": {"dim": 2, "count": 3}, "n_measurements": 4},
        )
        out = str(tmp_path / "sh")
        assert main(["shadow", cfg, "--out", out]) == 0
        summary = read_summary(out)
        assert summary["within_bound"]

    def test_quantum_from_state_files(self, tmp_path):
        import numpy as np

        from shatterlab.quantum import DensityMatrix, state_to_json

        paths = []
        for name, mat in (
            ("zero.json", [[1, 0], [0, 0]]),
            ("one.json", [[0, 0], [0, 1]]),
        ):
            p = tmp_path / name
            p.write_text(state_to_json(DensityMatrix(np.array(mat, dtype=complex))))
            paths.append(str(p))
        cfg = write_config(tmp_path, {"seed": 23, "states_files": paths})
        out = str(tmp_path / "qf")
        assert main(["quantum", cfg, "--out", out]) == 0
        summary = read_summary(out)
        assert summary["chi_star"] == pytest.approx(1.0, abs=1e-5)
        assert summary["chi_uniform"] == pytest.approx(1.0, abs=1e-9)

    def test_oversized_generated_class_exits_2(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "seed": 1,
                "zeta": 0.25,
                "class": {"generated": {"domain_size": 12, "n_concepts": 4, "zeta": 0.25}},
            },
        )
        assert main(["dims", cfg, "--out", str(tmp_path / "x")]) == 2

    def test_unreadable_config_exits_2(self, tmp_path):
        assert main(["dims", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
