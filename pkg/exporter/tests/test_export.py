"""Export pipeline: file layout, alignment arithmetic, consumer interop."""

import json

import numpy as np
import pytest

# Interop checks load exported files through the consumer package, which
# must be installed alongside this one.
from tcgat import generate_synthetic
from tcgat.corpus import dump_corpus
from tcgat.embfile import read_embeddings
from tcgat.encoder import ExternalEmbedding

from tcgat_exporter.align import AlignmentPolicy, sentence_pieces
from tcgat_exporter.encoder import HashEncoder
from tcgat_exporter.export import (ExportError, export, read_corpus,
                                   write_embedding_file)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def plain_record(sid, tokens):
    """A record that also satisfies the consumer's corpus validator."""
    return {"id": sid, "tokens": tokens, "tags": ["O"] * len(tokens),
            "temporal_relations": []}


class TestHashEncoder:
    def test_shape_and_determinism(self):
        enc = HashEncoder()
        pieces = ["[CLS]", "rain", "[SEP]"]
        a = enc.encode(pieces)
        b = enc.encode(pieces)
        assert a.shape == (3, 768)
        assert a.dtype == np.float32
        assert np.array_equal(a, b)

    def test_position_changes_the_vector(self):
        enc = HashEncoder()
        out = enc.encode(["rain", "rain"])
        assert not np.array_equal(out[0], out[1])


class TestReadCorpus:
    def test_order_and_fields(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [plain_record("b", ["x"]), plain_record("a", ["y", "z"])])
        assert read_corpus(path) == [("b", ["x"]), ("a", ["y", "z"])]

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "tokens": ["x"]}\n{oops\n', encoding="utf-8")
        with pytest.raises(ExportError, match="2: not valid JSON"):
            read_corpus(path)

    def test_non_object_record(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("[1, 2]\n", encoding="utf-8")
        with pytest.raises(ExportError, match="not an object"):
            read_corpus(path)

    def test_missing_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"tokens": ["x"]}])
        with pytest.raises(ExportError, match="missing or empty id"):
            read_corpus(path)

    def test_bad_tokens(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "a", "tokens": []}])
        with pytest.raises(ExportError, match="non-empty list of strings"):
            read_corpus(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [plain_record("a", ["x"]), plain_record("a", ["y"])])
        with pytest.raises(ExportError, match="duplicate sentence id 'a'"):
            read_corpus(path)


class TestWriter:
    def test_overlong_id_rejected(self, tmp_path):
        entry = ("x" * 70000, np.zeros((1, 4), dtype=np.float32))
        with pytest.raises(ExportError, match="longer than 65535"):
            write_embedding_file(tmp_path / "e.tcemb", [entry], 4)

    def test_too_many_vectors_rejected(self, tmp_path):
        entry = ("a", np.zeros((70000, 2), dtype=np.float32))
        with pytest.raises(ExportError, match="too many vectors"):
            write_embedding_file(tmp_path / "e.tcemb", [entry], 2)


class TestExport:
    def test_five_tokens_give_five_vectors_of_768(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_jsonl(corpus, [plain_record(
            "s-1", ["heavy", "rain", "caused", "severe", "floods"])])
        out = tmp_path / "e.tcemb"
        report = export(corpus, out)
        assert report.written == 1 and report.clean
        dim, table = read_embeddings(out)
        assert dim == 768
        assert table["s-1"].shape == (5, 768)

    def test_double_export_is_byte_identical(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        dump_corpus(generate_synthetic(12, seed=4), corpus)
        out_a = tmp_path / "a.tcemb"
        out_b = tmp_path / "b.tcemb"
        export(corpus, out_a)
        export(corpus, out_b)
        assert out_a.read_bytes() == out_b.read_bytes()
        assert (tmp_path / "a.tcemb.manifest.json").read_bytes() == \
               (tmp_path / "b.tcemb.manifest.json").read_bytes()

    def test_mean_subword_matches_manual_recomputation(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_jsonl(corpus, [plain_record("s-1", ["the", "inundation", "came"])])
        out = tmp_path / "e.tcemb"
        export(corpus, out, AlignmentPolicy("mean-subword"))

        enc = HashEncoder()
        pieces, spans = sentence_pieces(enc, ["the", "inundation", "came"])
        start, end = spans[1]
        assert end - start == 3
        sub = enc.encode([enc.bos] + pieces + [enc.eos])[1:-1]
        manual = (sub[start].astype(np.float64)
                  + sub[start + 1] + sub[start + 2]) / 3.0

        _, table = read_embeddings(out)
        assert np.abs(table["s-1"][1] - manual).max() < 1e-5

    def test_first_subword_keeps_leading_piece(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_jsonl(corpus, [plain_record("s-1", ["the", "inundation", "came"])])
        out = tmp_path / "e.tcemb"
        export(corpus, out, AlignmentPolicy("first-subword"))

        enc = HashEncoder()
        pieces, spans = sentence_pieces(enc, ["the", "inundation", "came"])
        sub = enc.encode([enc.bos] + pieces + [enc.eos])[1:-1]
        _, table = read_embeddings(out)
        assert np.array_equal(table["s-1"][1], sub[spans[1][0]])

    def test_policies_agree_on_vector_counts(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        dump_corpus(generate_synthetic(10, seed=6), corpus)
        out_mean = tmp_path / "m.tcemb"
        out_first = tmp_path / "f.tcemb"
        export(corpus, out_mean, AlignmentPolicy("mean-subword"))
        export(corpus, out_first, AlignmentPolicy("first-subword"))
        _, mean_table = read_embeddings(out_mean)
        _, first_table = read_embeddings(out_first)
        assert {k: v.shape for k, v in mean_table.items()} == \
               {k: v.shape for k, v in first_table.items()}

    def test_file_preserves_corpus_order(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        sentences = generate_synthetic(15, seed=2)
        dump_corpus(sentences, corpus)
        out = tmp_path / "e.tcemb"
        export(corpus, out)
        _, table = read_embeddings(out)
        assert list(table) == [s.id for s in sentences]

    def test_untokenizable_sentence_is_skipped_and_reported(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_jsonl(corpus, [
            plain_record("ok-1", ["rain", "fell"]),
            plain_record("long-1", ["x" * 300, "fell"]),
            plain_record("ok-2", ["floods", "followed"]),
        ])
        out = tmp_path / "e.tcemb"
        report = export(corpus, out)
        assert report.written == 2
        assert report.skipped == ["long-1"]
        assert not report.clean
        _, table = read_embeddings(out)
        assert list(table) == ["ok-1", "ok-2"]

    def test_empty_corpus_exports_empty_file(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        corpus.write_text("", encoding="utf-8")
        out = tmp_path / "e.tcemb"
        report = export(corpus, out)
        assert report.written == 0 and report.clean
        dim, table = read_embeddings(out)
        assert dim == 768 and table == {}

    def test_manifest_pins_model_revision_policy(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        write_jsonl(corpus, [plain_record("s-1", ["rain"])])
        out = tmp_path / "e.tcemb"
        report = export(corpus, out, AlignmentPolicy("first-subword"))
        manifest = json.loads((tmp_path / "e.tcemb.manifest.json").read_text())
        assert report.manifest_path == str(out) + ".manifest.json"
        assert manifest == {"model": "hash-sim-768", "revision": "1",
                            "policy": "first-subword"}


def test_exported_file_drives_consumer_training(tmp_path):
    from tcgat import TrainConfig, evaluate, train

    sentences = generate_synthetic(8, seed=3)
    corpus = tmp_path / "c.jsonl"
    dump_corpus(sentences, corpus)
    out = tmp_path / "e.tcemb"
    assert export(corpus, out).clean

    cfg = TrainConfig(seed=3, epochs=2, batch_size=8, embed_dim=12, hidden=6,
                      tgat_dim=4, tgat_heads=2, cgat_dim=4, cgat_heads=2,
                      fuse_dim=10, external_dim=768)
    result = train(cfg, sentences, embedding_path=str(out))
    report = evaluate(result.model, sentences, result.kg)
    assert len(result.loss_curve) == 2
    assert 0.0 <= report.macro_f1 <= 1.0


def test_round_trip_through_consumer_pipeline(record, tmp_path):
    sentences = generate_synthetic(30, seed=9)
    corpus = tmp_path / "c.jsonl"
    dump_corpus(sentences, corpus)
    out = tmp_path / "e.tcemb"
    report = export(corpus, out)

    dim, table = read_embeddings(out)
    counts_match = all(table[s.id].shape == (len(s), dim) for s in sentences)

    provider = ExternalEmbedding(out, expected_dim=768)
    worst_mean_err = 0.0
    enc = HashEncoder()
    for s in sentences:
        vectors = provider.embed(s).data
        pieces, spans = sentence_pieces(enc, s.tokens)
        sub = enc.encode([enc.bos] + pieces + [enc.eos])[1:-1]
        for k, (start, end) in enumerate(spans):
            manual = sub[start:end].astype(np.float64).mean(axis=0)
            worst_mean_err = max(worst_mean_err,
                                 float(np.abs(vectors[k] - manual).max()))

    ok = (report.written == len(sentences) and report.clean
          and dim == 768 and counts_match and worst_mean_err < 1e-5)
    record("exporter-round-trip", ok,
           f"{len(sentences)} sentences load through the consumer pipeline, "
           f"dim {dim}, counts match, worst mean-subword deviation "
           f"{worst_mean_err:.2e}")
