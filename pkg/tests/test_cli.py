import json

import pytest

from fipp.cli import main
from fipp.embio import load_dictionary, load_embeddings, save_embeddings
from fipp.synthetic import rotated_pair


@pytest.fixture()
def fixture_pair(tmp_path):
    """Tiny aligned pair on disk: 100 words, d=10, exact rotation."""
    src, tgt = rotated_pair(n=100, d1=10, d2=10, seed=0)
    src_path = tmp_path / "src.vec"
    tgt_path = tmp_path / "tgt.vec"
    save_embeddings(src, src_path)
    save_embeddings(tgt, tgt_path)
    train_path = tmp_path / "train.tsv"
    with train_path.open("w") as fh:
        for i in range(30):
            fh.write(f"{src.vocab[i]}\t{tgt.vocab[i]}\n")
    test_path = tmp_path / "test.tsv"
    with test_path.open("w") as fh:
        for i in range(30, 80):
            fh.write(f"{src.vocab[i]}\t{tgt.vocab[i]}\n")
    test_tt_path = tmp_path / "test_tt.tsv"  # target-to-target identity pairs
    with test_tt_path.open("w") as fh:
        for i in range(30, 80):
            fh.write(f"{tgt.vocab[i]}\t{tgt.vocab[i]}\n")
    return {
        "src": src_path,
        "tgt": tgt_path,
        "train": train_path,
        "test": test_path,
        "test_tt": test_tt_path,
        "dir": tmp_path,
    }


def align_args(fx, out_dir, *extra):
    return [
        "align",
        "--src-emb", str(fx["src"]),
        "--tgt-emb", str(fx["tgt"]),
        "--train-dict", str(fx["train"]),
        "--out-dir", str(out_dir),
        *extra,
    ]


class TestAlignCommand:
    def test_smoke_writes_all_artifacts(self, fixture_pair, tmp_path, capsys):
        out_dir = tmp_path / "run"
        assert main(align_args(fixture_pair, out_dir)) == 0
        aligned = load_embeddings(out_dir / "aligned_src.vec")
        assert len(aligned) == 100 and aligned.dim == 10
        report = json.loads((out_dir / "run_report.json").read_text())
        assert report["data"]["seed_pairs"] == 30
        assert report["losses"]["total"] >= 0
        assert report["filter"]["nnz"] >= 1
        assert set(report["timing"]) >= {"preprocess", "gram", "gstar", "factor"}
        for stem in ("inner_products", "filter_stats", "spectrum"):
            assert (out_dir / f"{stem}.csv").exists()
            assert (out_dir / f"{stem}.png").exists()

    def test_missing_required_flag_exits_two(self, fixture_pair, tmp_path, capsys):
        argv = align_args(fixture_pair, tmp_path / "x")
        argv.remove("--train-dict")
        argv.remove(str(fixture_pair["train"]))
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2
        assert "--train-dict" in capsys.readouterr().err

    def test_unreadable_embedding_exits_two(self, fixture_pair, tmp_path, capsys):
        argv = align_args(fixture_pair, tmp_path / "x")
        argv[2] = str(tmp_path / "missing.vec")
        assert main(argv) == 2
        assert "error" in capsys.readouterr().err

    def test_procrustes_baseline_has_no_losses(self, fixture_pair, tmp_path):
        out_dir = tmp_path / "proc"
        code = main(align_args(fixture_pair, out_dir, "--method", "procrustes"))
        assert code == 0
        report = json.loads((out_dir / "run_report.json").read_text())
        assert report["losses"] is None
        assert report["filter"] is None
        assert report["config"]["method"] == "procrustes"

    def test_sgd_solver_writes_loss_trace(self, fixture_pair, tmp_path):
        out_dir = tmp_path / "sgd"
        code = main(
            align_args(fixture_pair, out_dir, "--solver", "sgd", "--sgd-epochs", "150")
        )
        assert code == 0
        assert (out_dir / "loss_trace.csv").exists()
        assert (out_dir / "loss_trace.png").exists()

    def test_reports_are_stable_apart_from_timing(self, fixture_pair, tmp_path):
        out_dir = tmp_path / "det"
        main(align_args(fixture_pair, out_dir, "--seed", "3"))
        first = json.loads((out_dir / "run_report.json").read_text())
        main(align_args(fixture_pair, out_dir, "--seed", "3"))
        second = json.loads((out_dir / "run_report.json").read_text())
        first.pop("timing")
        second.pop("timing")
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)

    def test_self_learning_flag(self, fixture_pair, tmp_path):
        out_dir = tmp_path / "sl"
        code = main(align_args(fixture_pair, out_dir, "--self-learning", "10"))
        assert code == 0
        report = json.loads((out_dir / "run_report.json").read_text())
        assert report["data"]["self_learning_added"] == 10
        assert report["data"]["seed_pairs"] == 40


class TestEvalCommand:
    def test_identity_evaluation_is_perfect(self, fixture_pair, tmp_path, capsys):
        out = tmp_path / "eval.json"
        code = main([
            "eval",
            "--src-emb", str(fixture_pair["tgt"]),
            "--tgt-emb", str(fixture_pair["tgt"]),
            "--test-dict", str(fixture_pair["test_tt"]),
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["report"]["map"] == 1.0
        assert payload["report"]["p_at_1"] == 1.0
        assert "MAP=1.0000" in capsys.readouterr().out

    def test_aligned_output_scores_high(self, fixture_pair, tmp_path):
        out_dir = tmp_path / "run"
        main(align_args(fixture_pair, out_dir))
        out = tmp_path / "eval.json"
        code = main([
            "eval",
            "--src-emb", str(out_dir / "aligned_src.vec"),
            "--tgt-emb", str(out_dir / "target_processed.vec"),
            "--test-dict", str(fixture_pair["test"]),
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["report"]["map"] >= 0.9

    def test_csls_metadata_recorded(self, fixture_pair, tmp_path):
        out = tmp_path / "eval.json"
        code = main([
            "eval",
            "--src-emb", str(fixture_pair["tgt"]),
            "--tgt-emb", str(fixture_pair["tgt"]),
            "--test-dict", str(fixture_pair["test_tt"]),
            "--retrieval", "csls",
            "--csls-k", "10",
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["report"]["retrieval"] == "csls"
        assert payload["report"]["csls_k"] == 10
        assert payload["config"]["retrieval"] == "csls"

    def test_unresolvable_test_dictionary_exits_two(self, fixture_pair, tmp_path, capsys):
        bogus = tmp_path / "bogus.tsv"
        bogus.write_text("jabber\twocky\n")
        code = main([
            "eval",
            "--src-emb", str(fixture_pair["tgt"]),
            "--tgt-emb", str(fixture_pair["tgt"]),
            "--test-dict", str(bogus),
            "--out", str(tmp_path / "eval.json"),
        ])
        assert code == 2


class TestSelflearnCommand:
    def test_writes_loadable_dictionary(self, fixture_pair, tmp_path):
        out_dict = tmp_path / "augmented.tsv"
        additions = tmp_path / "added.tsv"
        code = main([
            "selflearn",
            "--src-emb", str(fixture_pair["src"]),
            "--tgt-emb", str(fixture_pair["tgt"]),
            "--train-dict", str(fixture_pair["train"]),
            "--n-pairs", "15",
            "--out-dict", str(out_dict),
            "--additions", str(additions),
        ])
        assert code == 0
        src = load_embeddings(fixture_pair["src"])
        tgt = load_embeddings(fixture_pair["tgt"])
        merged = load_dictionary(out_dict, src, tgt)
        original = load_dictionary(fixture_pair["train"], src, tgt)
        assert merged.pairs[: len(original)] == original.pairs
        assert len(merged) == len(original) + 15
        lines = additions.read_text().strip().splitlines()
        assert lines[0].split("\t") == ["src_word", "tgt_word", "similarity"]
        assert len(lines) == 16
        for line in lines[1:]:
            fields = line.split("\t")
            assert len(fields) == 3
            float(fields[2])


class TestDiagCommand:
    def test_writes_figures_and_summary(self, fixture_pair, tmp_path):
        out_dir = tmp_path / "diag"
        code = main([
            "diag",
            "--src-emb", str(fixture_pair["src"]),
            "--tgt-emb", str(fixture_pair["tgt"]),
            "--train-dict", str(fixture_pair["train"]),
            "--out-dir", str(out_dir),
        ])
        assert code == 0
        for stem in ("inner_products", "filter_stats", "spectrum"):
            assert (out_dir / f"{stem}.csv").exists()
            assert (out_dir / f"{stem}.png").exists()
        summary = json.loads((out_dir / "diag_summary.json").read_text())
        assert len(summary["most_filtered"]) == 5
        assert len(summary["least_filtered"]) == 5
        assert summary["filter"]["nnz"] >= 1
        assert summary["losses"]["total"] >= 0


class TestBenchCommand:
    def test_small_synthetic_bench(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        code = main([
            "bench", "--c", "120", "--d", "12", "--n-vocab", "400",
            "--runs", "2", "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert set(payload["stages"]) == {
            "preprocess", "gram", "gstar", "factor", "rotate", "project"
        }
        for entry in payload["stages"].values():
            assert len(entry["runs"]) == 2
            assert entry["mean"] >= 0 and entry["stdev"] >= 0
        assert payload["machine"]["cpus"] >= 1
        assert "total" in capsys.readouterr().out
