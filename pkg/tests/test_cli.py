"""CLI subcommands: outputs, flags, and rerun determinism."""

import json

import pytest

from mqsynth.cli import main


class TestNeighbors:
    def test_prints_sorted_neighbors(self, capsys):
        assert main(["neighbors", "--k", "3", "good"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("good:")
        assert len(out.strip().splitlines()) == 1

    def test_writes_file(self, tmp_path, capsys):
        out_file = tmp_path / "nb.txt"
        main(["neighbors", "--k", "2", "--out", str(out_file), "film", "bad"])
        lines = out_file.read_text().splitlines()
        assert lines[0].startswith("film:") and lines[1].startswith("bad:")

    def test_custom_embeddings_flag(self, tmp_path, capsys):
        vec = tmp_path / "v.txt"
        vec.write_text("aa 1 0\nbb 0 1\ncc 1 1\n", encoding="utf-8")
        main(["neighbors", "--embeddings", str(vec), "--k", "2", "aa"])
        assert "cc" in capsys.readouterr().out


class TestSynth:
    def test_jsonl_contents_and_determinism(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        args = ["synth", "--pool-size", "8", "--seed", "21", "--method", "US-HC-MQ"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        records = [json.loads(l) for l in out1.read_text().splitlines()]
        assert len(records) == 8
        for rec in records:
            assert rec["chain"] and rec["heuristic_value"] is not None

    def test_stochastic_method(self, tmp_path, capsys):
        out = tmp_path / "s.jsonl"
        main(["synth", "--method", "S-MQ", "--pool-size", "4", "--out", str(out)])
        assert len(out.read_text().splitlines()) == 4


class TestExperimentCommands:
    def test_al_run_emits_deterministic_csv(self, tmp_path, capsys):
        args = ["al-run", "--method", "S-MQ", "--steps", "1", "--reps", "1",
                "--seed", "3"]
        out1, out2 = tmp_path / "m1.csv", tmp_path / "m2.csv"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        rows = out1.read_text().splitlines()
        assert rows[0] == "method,seed,step,n_labeled,accuracy"
        assert len(rows) == 3  # steps 0 and 1

    def test_label_switch_emits_companion(self, tmp_path, capsys):
        out = tmp_path / "exp2.csv"
        assert main([
            "label-switch", "--methods", "S-MQ", "--reps", "1",
            "--n-generate", "10", "--seed", "1", "--out", str(out),
        ]) == 0
        switch = (tmp_path / "exp2_switch.csv").read_text().splitlines()
        assert switch[0] == "method,seed,switch_rate"
        assert len(switch) == 2

    def test_unknown_switch_method_errors(self, tmp_path, capsys):
        code = main(["label-switch", "--methods", "NOPE", "--out",
                     str(tmp_path / "x.csv")])
        assert code == 2

    def test_oracle_report(self, capsys):
        assert main(["oracle-report"]) == 0
        out = capsys.readouterr().out
        assert "CV accuracy" in out


class TestParser:
    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            main([])

    def test_defaults_documented_in_flags(self):
        from mqsynth.cli import build_parser

        parser = build_parser()
        synth = next(
            a for a in parser._subparsers._group_actions[0].choices.values()
            if a.prog.endswith("synth")
        )
        defaults = {a.dest: a.default for a in synth._actions}
        assert defaults["pool_size"] == 20
        assert defaults["batch_size"] == 5
        assert defaults["core_size"] == 10
        assert defaults["k"] == 10
        assert defaults["depth_min"] == 1 and defaults["depth_max"] == 7
        assert defaults["beam_width"] == 3
