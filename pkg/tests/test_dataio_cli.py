import json

import numpy as np
import pytest

from elball import cli, dataio
from elball.dataio import (
    Checkpoint,
    CheckpointError,
    DataError,
    build_dataset,
    export_2d,
    format_export_2d,
    load_checkpoint,
    read_pairs_tsv,
    save_checkpoint,
    split_pairs,
)
from elball.embeddings import EmbeddingSet, TOP_RADIUS
from elball.family import FAMILY_KB
from elball.normalizer import eliminate_abox, normalize
from elball.ontology import format_axiom, format_ontology, parse_ontology


def sample_embeddings(dim=2, n_classes=4, n_rels=1, seed=0):
    rng = np.random.default_rng(seed)
    e = EmbeddingSet(
        rng.normal(0, 1, (n_classes, dim)),
        rng.uniform(0, 1, n_classes),
        rng.normal(0, 1, (n_rels, dim)),
    )
    e.class_radii[e.top] = TOP_RADIUS
    return e


CLASS_NAMES = ["Top", "Bot", "A", "B"]
REL_NAMES = ["r"]


class TestCheckpoint:
    def test_round_trip_bitwise(self, tmp_path):
        e = sample_embeddings()
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, e, CLASS_NAMES, REL_NAMES, {"margin": -0.1, "seed": 7})
        first = path.read_bytes()
        ckpt = load_checkpoint(path)
        assert np.array_equal(ckpt.embeddings.class_centers, e.class_centers)
        assert np.array_equal(ckpt.embeddings.class_radii, e.class_radii)
        assert np.array_equal(ckpt.embeddings.rel_vectors, e.rel_vectors)
        assert ckpt.metadata["margin"] == -0.1
        path2 = tmp_path / "again.json"
        save_checkpoint(path2, ckpt.embeddings, ckpt.class_names, ckpt.relation_names,
                        {k: v for k, v in ckpt.metadata.items() if k != "dim"})
        assert path2.read_bytes() == first

    def test_top_and_bot_resolved(self, tmp_path):
        e = sample_embeddings()
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, e, CLASS_NAMES, REL_NAMES, {})
        ckpt = load_checkpoint(path)
        assert ckpt.embeddings.top == 0
        assert ckpt.embeddings.bot == 1

    def test_truncated_file(self, tmp_path):
        e = sample_embeddings()
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, e, CLASS_NAMES, REL_NAMES, {})
        path.write_bytes(path.read_bytes()[:40])
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_missing_key(self, tmp_path):
        path = tmp_path / "ckpt.json"
        path.write_text(json.dumps({"version": 1, "metadata": {}, "classes": {}}))
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "ckpt.json"
        path.write_text(
            json.dumps({"version": 99, "metadata": {}, "classes": {}, "relations": {}})
        )
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_dimension_mismatch(self, tmp_path):
        e = sample_embeddings(dim=50)
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, e, CLASS_NAMES, REL_NAMES, {})
        with pytest.raises(CheckpointError):
            load_checkpoint(path, expect_dim=2)
        assert load_checkpoint(path, expect_dim=50).embeddings.dim == 50

    def test_entity_index_resolves_braced_names(self, tmp_path):
        e = sample_embeddings()
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, e, ["Top", "Bot", "{P1}", "{P2}"], REL_NAMES, {})
        index = load_checkpoint(path).entity_index()
        assert index["P1"] == index["{P1}"] == 2


class TestTsvParsing:
    def test_pairs(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("# comment\nP1\tP2\t900\n\nP3\tP4\t699.5\n")
        assert read_pairs_tsv(path) == [("P1", "P2", 900.0), ("P3", "P4", 699.5)]

    def test_malformed_row_names_line(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("P1\tP2\t900\nP3 P4 800\n")
        with pytest.raises(DataError, match=":2:"):
            read_pairs_tsv(path)

    def test_non_numeric_confidence(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("P1\tP2\thigh\n")
        with pytest.raises(DataError, match="non-numeric"):
            read_pairs_tsv(path)


class TestSplit:
    PAIRS = [(f"P{i}", f"Q{i}") for i in range(10)]

    def test_sizes_8_1_1(self):
        train, valid, test = split_pairs(self.PAIRS, seed=0)
        assert (len(train), len(valid), len(test)) == (8, 1, 1)

    def test_partition(self):
        train, valid, test = split_pairs(self.PAIRS, seed=0)
        assert sorted(train + valid + test) == sorted(self.PAIRS)

    def test_deterministic(self):
        assert split_pairs(self.PAIRS, seed=3) == split_pairs(self.PAIRS, seed=3)

    def test_seed_sensitivity(self):
        assert split_pairs(self.PAIRS, seed=0) != split_pairs(self.PAIRS, seed=1)


class TestBuildDataset:
    def test_confidence_threshold(self):
        onto, split = build_dataset(
            [("P1", "P2", 699.0), ("P3", "P4", 700.0)], [], seed=0
        )
        triples = split.train + split.valid + split.test
        heads = {h for h, _, _ in triples}
        assert "P1" not in heads and "P3" in heads

    def test_reciprocal_pairs_deduplicated(self):
        _, split = build_dataset(
            [("P1", "P2", 900.0), ("P2", "P1", 900.0)], [], seed=0
        )
        assert len(split.train + split.valid + split.test) == 2  # one pair, two directions

    def test_symmetric_off(self):
        _, split = build_dataset(
            [("P1", "P2", 900.0)], [], seed=0, symmetric=False
        )
        assert split.train + split.valid + split.test == [("P1", "interacts", "P2")]

    def test_annotation_axiom_text(self):
        onto, _ = build_dataset([], [("P", "F"), ("P", "F")], seed=0)
        assert len(onto.axioms) == 1
        assert format_axiom(onto.axioms[0], onto) == "{P} < hasFunction some F"

    def test_only_train_interactions_become_axioms(self):
        rows = [(f"P{i}", f"Q{i}", 900.0) for i in range(10)]
        onto, split = build_dataset(rows, [], seed=0)
        texts = {format_axiom(a, onto) for a in onto.axioms}
        for h, r, t in split.train:
            assert f"{{{h}}} < {r} some {{{t}}}" in texts
        for h, r, t in split.test + split.valid:
            assert f"{{{h}}} < {r} some {{{t}}}" not in texts

    def test_round_trip_to_identical_theory(self):
        rows = [(f"P{i}", f"P{(i + 1) % 6}", 900.0) for i in range(6)]
        annots = [(f"P{i}", f"F{i % 2}") for i in range(6)]
        onto, _ = build_dataset(rows, annots, seed=1)
        theory = normalize(eliminate_abox(onto))
        reparsed = parse_ontology(format_ontology(onto))
        assert normalize(eliminate_abox(reparsed)) == theory


class TestExport2d:
    def test_header_and_rows(self, tmp_path):
        e = sample_embeddings()
        ckpt = Checkpoint(e, CLASS_NAMES, REL_NAMES, {"dim": 2})
        rows = export_2d(ckpt)
        assert [name for name, *_ in rows] == CLASS_NAMES
        text = format_export_2d(rows)
        lines = text.splitlines()
        assert lines[0] == "class\tx\ty\tr"
        assert len(lines) == 1 + len(CLASS_NAMES)

    def test_rejects_other_dims(self):
        ckpt = Checkpoint(sample_embeddings(dim=3), CLASS_NAMES, REL_NAMES, {})
        with pytest.raises(DataError):
            export_2d(ckpt)

    def test_values_round_trip_through_repr(self):
        e = sample_embeddings()
        ckpt = Checkpoint(e, CLASS_NAMES, REL_NAMES, {"dim": 2})
        line = format_export_2d(export_2d(ckpt)).splitlines()[4]
        name, x, y, r = line.split("\t")
        assert float(x) == e.class_centers[3][0]
        assert float(r) == e.class_radii[3]


# --- CLI end to end -------------------------------------------------------


@pytest.fixture
def family_file(tmp_path):
    path = tmp_path / "family.el"
    path.write_text(FAMILY_KB)
    return path


def write_interaction_files(tmp_path):
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text(
        "".join(f"P{i}\tP{(i + 1) % 10}\t900\n" for i in range(10))
        + "P0\tP5\t100\n"  # below threshold
    )
    annots = tmp_path / "annots.tsv"
    annots.write_text("".join(f"P{i}\tF{i % 2}\n" for i in range(10)))
    return pairs, annots


class TestCli:
    def test_normalize_sections(self, family_file, tmp_path, capsys):
        assert cli.main(["normalize", str(family_file)]) == 0
        out = capsys.readouterr().out
        for header in ("# NF1", "# NF2", "# NF3", "# NF4", "# Bot1", "# Bot2", "# Bot4"):
            assert header in out
        assert "Female and Male < Bot" in out

    def test_train_check_export(self, family_file, tmp_path):
        ckpt = tmp_path / "family.json"
        rc = cli.main(
            [
                "train", "--theory", str(family_file), "--dim", "2",
                "--margin", "0", "--epochs", "300", "--batch", "16",
                "--seed", "42", "--out", str(ckpt),
            ]
        )
        assert rc == 0 and ckpt.exists()
        meta = json.loads(ckpt.read_text())["metadata"]
        assert meta["dim"] == 2 and meta["seed"] == 42
        assert len(meta["loss_trace_tail"]) == 10

        # a loose tolerance passes, an impossibly tight one does not
        report_path = tmp_path / "report.json"
        assert cli.main(["check", str(family_file), str(ckpt), "--tol", "100",
                         "--out", str(report_path)]) == 0
        assert json.loads(report_path.read_text())["overall"] is True
        assert cli.main(["check", str(family_file), str(ckpt), "--tol", "1e-12"]) == 1

        out_path = tmp_path / "plot.tsv"
        assert cli.main(["export2d", str(ckpt), "--out", str(out_path)]) == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == "class\tx\ty\tr"
        assert len(lines) == 9  # header + 8 classes

    def test_ingest_train_evaluate(self, tmp_path):
        pairs, annots = write_interaction_files(tmp_path)
        data_dir = tmp_path / "data"
        rc = cli.main(
            [
                "ingest", "--pairs", str(pairs), "--annotations", str(annots),
                "--seed", "0", "--out-dir", str(data_dir),
            ]
        )
        assert rc == 0
        for name in ("ontology.el", "train.tsv", "valid.tsv", "test.tsv"):
            assert (data_dir / name).exists()
        split = dataio.read_split(data_dir)
        assert len(split.valid) >= 1 and len(split.test) >= 1

        ckpt = tmp_path / "ppi.json"
        rc = cli.main(
            [
                "train", "--theory", str(data_dir / "ontology.el"), "--dim", "4",
                "--margin", "-0.1", "--epochs", "50", "--batch", "8",
                "--seed", "0", "--out", str(ckpt),
            ]
        )
        assert rc == 0

        report_path = tmp_path / "eval.json"
        rc = cli.main(
            [
                "evaluate", "--ckpt", str(ckpt), "--split", str(data_dir),
                "--relation", "interacts", "--out", str(report_path),
            ]
        )
        assert rc == 0
        report = json.loads(report_path.read_text())
        assert set(report) >= {"Raw Hits@10", "Filtered AUC", "Queries"}
        assert report["Queries"] == len(split.test)

    def test_semsim_command(self, tmp_path):
        taxonomy = tmp_path / "tax.el"
        taxonomy.write_text("F0 < Function\nF1 < Function\n")
        annots = tmp_path / "annots.tsv"
        annots.write_text("P0\tF0\nP1\tF0\nP2\tF1\n")
        pairs = tmp_path / "pairs.tsv"
        pairs.write_text("P0\tP1\nP0\tP2\n")
        out = tmp_path / "scores.tsv"
        rc = cli.main(
            [
                "semsim", "--taxonomy", str(taxonomy), "--annotations", str(annots),
                "--pairs", str(pairs), "--measure", "lin", "--out", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        same = float(lines[0].split("\t")[2])
        diff = float(lines[1].split("\t")[2])
        assert same > diff  # shared annotation beats disjoint annotation

    def test_invalid_thread_env(self, monkeypatch, capsys):
        monkeypatch.setenv("ELBALL_THREADS", "zero")
        assert cli.main(["normalize", "whatever.el"]) == 2
        assert "ELBALL_THREADS" in capsys.readouterr().err

    def test_valid_thread_env(self, monkeypatch, family_file, capsys):
        monkeypatch.setenv("ELBALL_THREADS", "2")
        assert cli.main(["normalize", str(family_file)]) == 0
