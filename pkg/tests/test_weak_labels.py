import json

import pytest

from diachron.patterns import detect_all, scan_corpus
from diachron.weak_labels import export_labels, generate_labels, import_labels

from conftest import docs_from_synth, make_spec
from diachron.synth import generate


@pytest.fixture(scope="module")
def labeled(small_synth_module):
    corpus, docs = small_synth_module
    return corpus, docs, generate_labels(docs, corpus.catalog)


@pytest.fixture(scope="module")
def small_synth_module():
    corpus = generate(make_spec(seed=101, n_texts=3, tokens_per_text=1500, n_features=6))
    return corpus, docs_from_synth(corpus)


class TestGenerateLabels:
    def test_matches_scan_exactly(self, labeled):
        corpus, docs, labels = labeled
        matches = scan_corpus(docs, corpus.catalog)
        assert len(labels.labels) == len(matches)
        for lbl, m in zip(labels.labels, matches):
            assert (lbl.text_id, lbl.word_index, lbl.feature_id, lbl.confidence) == (
                m.text_id,
                m.word_index,
                m.feature_id,
                m.confidence,
            )
            assert lbl.word == m.matched_surface

    def test_ordering(self, labeled):
        corpus, docs, labels = labeled
        chrono = {d.id: d.chrono_index for d in docs}
        fidx = {fid: i for i, fid in enumerate(corpus.catalog.feature_ids)}
        keys = [
            (chrono[l.text_id], l.word_index, fidx[l.feature_id]) for l in labels.labels
        ]
        assert keys == sorted(keys)

    def test_confidences_within_retained_band(self, labeled):
        _, _, labels = labeled
        assert labels.labels
        for lbl in labels.labels:
            assert 0.4 <= lbl.confidence <= 0.95

    def test_context_window_contains_word(self, labeled):
        _, _, labels = labeled
        for lbl in labels.labels[:200]:
            assert lbl.word in lbl.context.split()

    def test_single_example_confidence(self):
        # "a b c" with r="b", C+={"a"}: one label at confidence 0.8
        from diachron.patterns import FeatureCategory, FeaturePattern, PatternCatalog
        from test_patterns import doc_of

        catalog = PatternCatalog(
            version="t",
            patterns=[
                FeaturePattern("f", FeatureCategory.SYNTACTIC, "b", ("a",), ())
            ],
        )
        labels = generate_labels([doc_of("a b c")], catalog)
        assert [(l.word, l.confidence) for l in labels.labels] == [("b", 0.8)]
        assert labels.labels[0].context == "a b c"

    def test_empty_corpus(self, labeled):
        corpus, _, _ = labeled
        assert len(generate_labels([], corpus.catalog)) == 0

    def test_per_feature_counts_match_matrix(self, labeled):
        corpus, docs, labels = labeled
        matrix = detect_all(docs, corpus.catalog)
        counted: dict[tuple[str, str], int] = {}
        for lbl in labels.labels:
            key = (lbl.feature_id, lbl.text_id)
            counted[key] = counted.get(key, 0) + 1
        for i, fid in enumerate(matrix.features):
            for j, tid in enumerate(matrix.texts):
                assert counted.get((fid, tid), 0) == matrix.counts[i, j]

    def test_reproducible(self, labeled):
        corpus, docs, labels = labeled
        again = generate_labels(docs, corpus.catalog)
        assert again.labels == labels.labels
        assert again.corpus_hash == labels.corpus_hash


class TestExportImport:
    def test_round_trip_lossless(self, labeled, tmp_path):
        _, _, labels = labeled
        path = export_labels(labels, tmp_path / "labels.jsonl")
        loaded = import_labels(path)
        assert loaded.labels == labels.labels
        assert loaded.catalog_version == labels.catalog_version
        assert loaded.corpus_hash == labels.corpus_hash
        assert loaded.feature_ids == labels.feature_ids

    def test_one_line_per_label(self, labeled, tmp_path):
        _, _, labels = labeled
        path = export_labels(labels, tmp_path / "labels.jsonl")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == len(labels.labels)

    def test_multi_feature_word_keeps_distinct_lines(self, tmp_path):
        from diachron.patterns import FeatureCategory, FeaturePattern, PatternCatalog
        from test_patterns import doc_of

        catalog = PatternCatalog(
            version="t",
            patterns=[
                FeaturePattern("f1", FeatureCategory.LEXICAL, "b"),
                FeaturePattern("f2", FeatureCategory.LEXICAL, ".*b.*"),
            ],
        )
        labels = generate_labels([doc_of("a b c")], catalog)
        path = export_labels(labels, tmp_path / "labels.jsonl")
        recs = [json.loads(l) for l in path.read_text().splitlines()]
        assert {(r["word_index"], r["feature_id"]) for r in recs} == {(1, "f1"), (1, "f2")}

    def test_header_sidecar_maps_features(self, labeled, tmp_path):
        corpus, _, labels = labeled
        export_labels(labels, tmp_path / "labels.jsonl")
        header = json.loads(
            (tmp_path / "labels.jsonl.header.json").read_text(encoding="utf-8")
        )
        assert header["num_features"] == len(corpus.catalog.feature_ids)
        assert sorted(header["feature_index"].values()) == list(
            range(header["num_features"])
        )
        assert header["corpus_hash"] == labels.corpus_hash

    def test_export_is_byte_deterministic(self, labeled, tmp_path):
        _, docs, labels = labeled
        p1 = export_labels(labels, tmp_path / "a.jsonl")
        p2 = export_labels(labels, tmp_path / "b.jsonl")
        assert p1.read_bytes() == p2.read_bytes()
