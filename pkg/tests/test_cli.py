"""End-to-end tests of the command-line interface, run in-process."""

import itertools
import json

import numpy as np
import pytest

from advclf.cli import ARCH_PRESETS, REFERENCE_ROWS, load_config_file, main


def run_cli(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def json_payload(stdout):
    """Parse the JSON object that ends the command output (tables may precede it)."""
    start = stdout.index("{")
    return json.loads(stdout[start:])


def small_train_args(**overrides):
    base = {
        "--synth": None,
        "--synth-n": "300",
        "--synth-ir": "4",
        "--batch-size": "8",
        "--pretrain-iters": "10",
        "--train-iters": "5",
        "--gen-arch": "4",
        "--seed": "0",
    }
    base.update(overrides)
    argv = ["train"]
    for key, value in base.items():
        argv.append(key)
        if value is not None:
            argv.append(value)
    return argv


def write_clique_edges(path, size=6):
    lines = []
    for block in (range(size), range(size, 2 * size)):
        lines.extend(f"{u} {v}" for u, v in itertools.combinations(block, 2))
    path.write_text("\n".join(lines) + "\n")


# --- argument handling ---


def test_no_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["train", "--nope"])
    assert exc.value.code == 2


def test_bad_arch_string_exits_2(capsys):
    # ConfigError subclasses ValueError, so argparse rejects the value itself
    with pytest.raises(SystemExit) as exc:
        main(["train", "--synth", "--gen-arch", "64,x"])
    assert exc.value.code == 2


def test_unknown_reference_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(small_train_args() + ["--reference", "bogus"])
    assert exc.value.code == 2


def test_train_requires_exactly_one_source(capsys, tmp_path):
    code, _, err = run_cli(capsys, ["train"])
    assert code == 2
    assert "--data or --synth" in err
    csv = tmp_path / "d.csv"
    csv.write_text("a,label\n1,0\n")
    code, _, err = run_cli(capsys, ["train", "--data", str(csv), "--synth"])
    assert code == 2
    assert "--data or --synth" in err


def test_train_missing_data_file_exits_1(capsys, tmp_path):
    code, _, err = run_cli(capsys, ["train", "--data", str(tmp_path / "absent.csv")])
    assert code == 1
    assert err.startswith("error:")


# --- train subcommand ---


def test_train_synth_report_shape(capsys):
    code, out, _ = run_cli(capsys, small_train_args())
    assert code == 0
    report = json_payload(out)
    assert set(report) == {
        "config", "data", "models", "trace_summary", "checkpoints", "wall_clock_sec",
    }
    assert set(report["models"]) == {
        "adversarial", "pretrain_baseline", "undersample_baseline", "oversample_baseline",
    }
    for entry in report["models"].values():
        assert set(entry) == {"validation", "test"}
        assert 0.0 <= entry["test"]["auc"] <= 1.0
    assert report["config"]["gen_arch"] == [4]
    assert report["config"]["source"]["synth_n"] == 300
    assert report["data"]["n_train"] == 180  # 60% of 300


def test_train_zero_adversarial_iters_matches_baseline(capsys):
    code, out, _ = run_cli(capsys, small_train_args(**{"--train-iters": "0"}))
    assert code == 0
    report = json_payload(out)
    assert report["models"]["adversarial"] == report["models"]["pretrain_baseline"]


def test_train_report_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(small_train_args(**{"--out-report": str(a)})) == 0
    assert main(small_train_args(**{"--out-report": str(b)})) == 0
    capsys.readouterr()
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("wall_clock_sec"), rb.pop("wall_clock_sec")
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)


def test_train_trace_csv(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    code, _, _ = run_cli(capsys, small_train_args(**{"--out-trace": str(trace)}))
    assert code == 0
    lines = trace.read_text().strip().splitlines()
    assert lines[0] == "iteration,phase,d_loss,g_loss,weight_entropy,weight_min,weight_max"
    phases = [line.split(",")[1] for line in lines[1:]]
    assert phases.count("pretrain") == 10
    assert phases.count("adversarial") == 5


def test_train_eval_every_checkpoints(capsys):
    code, out, _ = run_cli(capsys, small_train_args(**{"--eval-every": "2"}))
    assert code == 0
    report = json_payload(out)
    assert [c["iteration"] for c in report["checkpoints"]] == [2, 4]
    assert all(0.0 <= c["val_auc"] <= 1.0 for c in report["checkpoints"])


def test_train_reference_table(capsys):
    code, out, _ = run_cli(capsys, small_train_args() + ["--reference", "pen_digits"])
    assert code == 0
    assert "informational only" in out
    report = json_payload(out)
    assert report["reference_row"]["name"] == "pen_digits"
    assert report["reference_row"]["published"] == REFERENCE_ROWS["pen_digits"]


def test_train_on_csv_written_by_synth(capsys, tmp_path):
    csv = tmp_path / "data.csv"
    code, out, _ = run_cli(capsys, ["synth", "--n", "400", "--ir", "4", "--out", str(csv)])
    assert code == 0
    assert "positives=80 negatives=320" in out
    code, out, _ = run_cli(
        capsys,
        ["train", "--data", str(csv), "--batch-size", "8",
         "--pretrain-iters", "5", "--train-iters", "2", "--gen-arch", "4"],
    )
    assert code == 0
    report = json_payload(out)
    assert report["config"]["source"] == str(csv)
    assert report["data"]["n_features"] == 2


# --- config files ---


def test_config_file_and_cli_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nbatch-size = 8\ntrain-iters = 3\nlambda = 0.5\nsynth = yes\n"
                   "synth-n = 300\nsynth-ir = 4\ngen-arch = 4\npretrain-iters = 5\n")
    code, out, _ = run_cli(capsys, ["train", "--config", str(cfg), "--train-iters", "2"])
    assert code == 0
    report = json_payload(out)
    assert report["config"]["batch_size"] == 8  # from file
    assert report["config"]["train_iters"] == 2  # CLI wins
    assert report["config"]["lam"] == 0.5  # lambda alias normalized


def test_config_file_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus_key = 1\n")
    code, _, err = run_cli(capsys, ["train", "--config", str(cfg), "--synth"])
    assert code == 2
    assert "bogus_key" in err


def test_config_file_bad_value(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("batch-size = peanuts\n")
    code, _, err = run_cli(capsys, ["train", "--config", str(cfg), "--synth"])
    assert code == 2
    assert "batch_size" in err


def test_config_file_missing_or_malformed(tmp_path):
    from advclf.errors import ConfigError

    with pytest.raises(ConfigError, match="no such config"):
        load_config_file(tmp_path / "absent.cfg")
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    with pytest.raises(ConfigError, match="key=value"):
        load_config_file(bad)


# --- synth subcommand ---


def test_synth_requires_out(capsys):
    code, _, err = run_cli(capsys, ["synth", "--n", "100", "--ir", "4"])
    assert code == 2
    assert "--out" in err


def test_synth_benchmark_scale_counts(capsys, tmp_path):
    out_file = tmp_path / "big.csv"
    code, out, _ = run_cli(
        capsys, ["synth", "--n", "10992", "--ir", "9.4", "--out", str(out_file)]
    )
    assert code == 0
    assert "positives=1057 negatives=9935" in out


def test_synth_same_seed_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["synth", "--n", "200", "--ir", "4", "--seed", "9", "--out", str(a)]) == 0
    assert main(["synth", "--n", "200", "--ir", "4", "--seed", "9", "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_synth_invalid_spec_exits_2(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, ["synth", "--n", "10", "--ir", "100", "--out", str(tmp_path / "x.csv")]
    )
    assert code == 2
    assert "minority" in err


# --- theory subcommand ---


def test_theory_lambda_zero_recovers_target(capsys):
    code, out, _ = run_cli(capsys, ["theory", "--k", "3", "--lam", "0", "--p-plus", "0.7,0.2,0.1"])
    assert code == 0
    payload = json_payload(out)
    assert set(payload) == {"lambda", "k", "p_plus", "minimizer", "residual", "converged"}
    assert payload["converged"] is True
    assert payload["residual"] < 1e-4
    np.testing.assert_allclose(payload["minimizer"], [0.7, 0.2, 0.1], atol=1e-4)


def test_theory_uniform_default(capsys):
    code, out, _ = run_cli(capsys, ["theory", "--k", "4"])
    assert code == 0
    payload = json_payload(out)
    assert payload["p_plus"] == [0.25, 0.25, 0.25, 0.25]
    np.testing.assert_allclose(payload["minimizer"], [0.25] * 4, atol=1e-6)


def test_theory_lambda_alias(capsys):
    code, out, _ = run_cli(capsys, ["theory", "--k", "2", "--lambda", "0.3"])
    assert code == 0
    assert json_payload(out)["lambda"] == 0.3


def test_theory_random_p_plus_seeded(capsys):
    code, out1, _ = run_cli(capsys, ["theory", "--k", "3", "--p-plus", "random", "--seed", "3"])
    assert code == 0
    code, out2, _ = run_cli(capsys, ["theory", "--k", "3", "--p-plus", "random", "--seed", "3"])
    assert code == 0
    assert out1 == out2


@pytest.mark.parametrize(
    "argv",
    [
        ["theory", "--k", "1"],
        ["theory", "--k", "3", "--p-plus", "0.5,x,0.2"],
        ["theory", "--k", "3", "--p-plus", "0.5,0.5"],
        ["theory", "--k", "2", "--p-plus", "0.9,-0.1"],
        ["theory", "--k", "2", "--p-plus", "0.9,0.5"],
    ],
)
def test_theory_bad_inputs_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, argv)
    assert code == 2
    assert err.startswith("error:")


def test_theory_out_file(capsys, tmp_path):
    dest = tmp_path / "result.json"
    code, out, _ = run_cli(capsys, ["theory", "--k", "2", "--out", str(dest)])
    assert code == 0
    assert json.loads(dest.read_text()) == json_payload(out)


# --- graph subcommand ---


GRAPH_ARGS = [
    "--test-frac", "0.2", "--dim", "4", "--batch-size", "8",
    "--pretrain-iters", "30", "--train-iters", "5",
    "--eta-d", "0.5", "--eta-g", "0.001", "--gen-arch", "4", "--seed", "1",
]


def test_graph_requires_edges(capsys):
    code, _, err = run_cli(capsys, ["graph"])
    assert code == 2
    assert "--edges" in err


def test_graph_end_to_end(capsys, tmp_path):
    edges = tmp_path / "edges.txt"
    write_clique_edges(edges)
    emb_file = tmp_path / "emb.csv"
    code, out, _ = run_cli(
        capsys,
        ["graph", "--edges", str(edges), "--out-embeddings", str(emb_file)] + GRAPH_ARGS,
    )
    assert code == 0
    report = json_payload(out)
    assert report["graph"]["n_nodes"] == 12
    assert report["graph"]["n_edges"] == 30
    assert report["graph"]["n_test_edges"] == 6
    assert set(report["link_prediction"]) >= {"accuracy", "macro_f1", "auc"}
    assert report["config"]["dim"] == 4
    assert "node_classification" not in report
    assert len(emb_file.read_text().strip().splitlines()) == 12


def test_graph_with_labels_adds_section(capsys, tmp_path):
    edges = tmp_path / "edges.txt"
    write_clique_edges(edges)
    labels = tmp_path / "labels.txt"
    labels.write_text("".join(f"{i} {int(i >= 6)}\n" for i in range(12)))
    code, out, _ = run_cli(
        capsys,
        ["graph", "--edges", str(edges), "--labels", str(labels), "--label-shuffles", "3"]
        + GRAPH_ARGS,
    )
    assert code == 0
    report = json_payload(out)
    assert report["node_classification"]["n_shuffles"] == 3
    assert 0.0 <= report["node_classification"]["macro_f1_mean"] <= 1.0


def test_graph_report_deterministic(capsys, tmp_path):
    edges = tmp_path / "edges.txt"
    write_clique_edges(edges)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["graph", "--edges", str(edges), "--out-report", str(a)] + GRAPH_ARGS) == 0
    assert main(["graph", "--edges", str(edges), "--out-report", str(b)] + GRAPH_ARGS) == 0
    capsys.readouterr()
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("wall_clock_sec"), rb.pop("wall_clock_sec")
    assert ra == rb


def test_graph_missing_edges_file_exits_1(capsys, tmp_path):
    code, _, err = run_cli(capsys, ["graph", "--edges", str(tmp_path / "absent.txt")])
    assert code == 1
    assert "no such file" in err


# --- presets ---


def test_arch_presets_echoed(capsys):
    code, out, _ = run_cli(capsys, small_train_args(**{"--gen-arch": "deep"}))
    assert code == 0
    assert json_payload(out)["config"]["gen_arch"] == list(ARCH_PRESETS["deep"])
