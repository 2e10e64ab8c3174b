import json
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diachron.corpus import (
    PeriodId,
    corpus_summary,
    load_corpus,
    normalize,
    parse_manifest,
    read_manifest,
    tokenize,
)
from diachron.errors import ManifestError

from conftest import DATA_DIR

# Alphabet covering IAST diacritics, decomposed marks, avagraha and
# assorted separators; hypothesis also gets free rein over raw unicode.
IAST_ALPHABET = "abcdefghijklmnopqrstuvxyz āīūṛṝḷḹṃḥṅñṭḍṇśṣ'’̄́ण ।॥.,;:-–1234567890\n\t"


class TestNormalize:
    def test_lowercases_preserving_diacritics(self):
        assert normalize("Agním Īḷe") == "agním īḷe"

    def test_empty_identity(self):
        assert normalize("") == ""

    def test_composes_decomposed_macron(self):
        # U+0061 U+0304 must become the precomposed U+0101 (Unicode NFC
        # table value, frozen here rather than recomputed).
        assert normalize("ā") == "ā"
        assert normalize("Āgní") == "āgní"

    @given(st.text(alphabet=IAST_ALPHABET, max_size=60))
    def test_idempotent_on_iast(self, s):
        assert normalize(normalize(s)) == normalize(s)

    @given(st.text(max_size=40))
    @settings(max_examples=300)
    def test_idempotent_on_arbitrary_unicode(self, s):
        assert normalize(normalize(s)) == normalize(s)


class TestTokenize:
    def test_whitespace_words(self):
        toks = tokenize("agním īḷe puróhitaṃ")
        assert [t.surface for t in toks] == ["agním", "īḷe", "puróhitaṃ"]

    def test_danda_separates(self):
        toks = tokenize("tat tvam asi ॥")
        assert [t.surface for t in toks] == ["tat", "tvam", "asi"]

    def test_empty(self):
        assert tokenize("") == ()

    def test_digits_and_punctuation_separate(self):
        toks = tokenize("rv1.1.1 agním;soma–pávate")
        assert [t.surface for t in toks] == ["rv", "agním", "soma", "pávate"]

    def test_avagraha_is_word_internal(self):
        toks = tokenize("so'ham eti")
        assert [t.surface for t in toks] == ["so'ham", "eti"]

    def test_combining_marks_stay_in_token(self):
        # ṛ́ has no precomposed form; the mark must not split the word.
        word = "kṛ́ta"
        assert [t.surface for t in tokenize(word)] == [word]

    def test_hundred_word_text_matches_hand_count(self):
        # Independent oracle: split on the separator class directly.
        words = ["agním", "soma", "ṛtvíjam", "devāḥ", "satyám"] * 20
        seps = [" ", " । ", "\n", " ॥ ", ", ", " 42 ", "; "]
        pieces = []
        for i, w in enumerate(words):
            pieces.append(w)
            pieces.append(seps[i % len(seps)])
        text = normalize("".join(pieces))

        def oracle_count(s: str) -> int:
            segments = []
            cur = []
            for ch in s:
                cat = unicodedata.category(ch)[0]
                if cat in ("L", "M") or ch in "'’":
                    cur.append(ch)
                else:
                    segments.append("".join(cur))
                    cur = []
            segments.append("".join(cur))
            return sum(
                1
                for seg in segments
                if seg and any(unicodedata.category(c)[0] == "L" for c in seg)
            )

        assert oracle_count(text) == 100
        assert len(tokenize(text)) == 100

    def test_byte_spans_slice_back_to_surfaces(self):
        text = normalize("agním īḷe ॥ so'ham")
        data = text.encode("utf-8")
        for tok in tokenize(text):
            start, end = tok.byte_span
            assert data[start:end].decode("utf-8") == tok.surface

    def test_word_index_strictly_increasing(self):
        toks = tokenize(normalize("a b c d e"))
        assert [t.word_index for t in toks] == list(range(5))

    @given(
        st.text(alphabet=IAST_ALPHABET, max_size=80),
        st.text(alphabet=IAST_ALPHABET, max_size=80),
    )
    def test_concatenation_is_additive(self, a, b):
        joined = tokenize(a + " ॥ " + b)
        assert len(joined) == len(tokenize(a)) + len(tokenize(b))

    @given(st.text(alphabet=IAST_ALPHABET, max_size=120))
    def test_deterministic(self, s):
        assert tokenize(s) == tokenize(s)


def _write_manifest(tmp_path, entries):
    doc = {"entries": entries}
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def _entry(i, text_id, period="EarlyVedic", **kw):
    return {
        "id": text_id,
        "title": text_id,
        "period": period,
        "chrono_index": i,
        "file_path": f"{text_id}.txt",
        **kw,
    }


class TestLoadCorpus:
    def test_loads_in_chrono_order(self, tmp_path):
        lines = ["agním īḷe", "soma pávate", "tat tvam asi", "dharmaṃ cara"]
        entries = []
        for i, line in enumerate(lines):
            (tmp_path / f"t{i}.txt").write_text(line, encoding="utf-8")
            # scrambled manifest order; chrono_index must govern
            entries.append(_entry(len(lines) - 1 - i, f"t{i}"))
        docs = load_corpus(read_manifest(_write_manifest(tmp_path, entries)))
        assert [d.chrono_index for d in docs] == [0, 1, 2, 3]
        assert docs[0].id == "t3"
        assert docs[0].word_count == 2
        assert docs[-1].id == "t0"
        assert docs[-1].word_count == 2

    def test_duplicate_id_names_offender(self, tmp_path):
        entries = [_entry(0, "dup"), {**_entry(1, "dup"), "file_path": "other.txt"}]
        with pytest.raises(ManifestError, match="dup"):
            read_manifest(_write_manifest(tmp_path, entries))

    def test_missing_file_names_entry(self, tmp_path):
        path = _write_manifest(tmp_path, [_entry(0, "ghost")])
        with pytest.raises(ManifestError, match="ghost"):
            load_corpus(read_manifest(path))

    def test_invalid_period_names_entry(self, tmp_path):
        (tmp_path / "x.txt").write_text("a", encoding="utf-8")
        path = _write_manifest(tmp_path, [_entry(0, "x", period="MiddleVedic")])
        with pytest.raises(ManifestError, match="MiddleVedic"):
            read_manifest(path)

    def test_non_dense_chrono_index_rejected(self, tmp_path):
        entries = [_entry(0, "a"), _entry(2, "b")]
        with pytest.raises(ManifestError, match="chrono_index"):
            read_manifest(_write_manifest(tmp_path, entries))

    def test_invalid_utf8_reports_byte_offset(self, tmp_path):
        (tmp_path / "bad.txt").write_bytes(b"agn\xffim")
        path = _write_manifest(tmp_path, [_entry(0, "bad")])
        with pytest.raises(ManifestError, match="byte offset 3"):
            load_corpus(read_manifest(path))

    def test_word_count_drift_warns(self, tmp_path, caplog):
        (tmp_path / "w.txt").write_text("one two three four", encoding="utf-8")
        path = _write_manifest(
            tmp_path, [_entry(0, "w", expected_word_count=100)]
        )
        with caplog.at_level("WARNING"):
            docs = load_corpus(read_manifest(path))
        assert docs[0].word_count == 4
        assert any("expects 100" in r.message for r in caplog.records)

    def test_word_count_within_tolerance_is_silent(self, tmp_path, caplog):
        (tmp_path / "w.txt").write_text("a " * 1000, encoding="utf-8")
        path = _write_manifest(
            tmp_path, [_entry(0, "w", expected_word_count=1004)]
        )
        with caplog.at_level("WARNING"):
            load_corpus(read_manifest(path))
        assert not caplog.records

    def test_total_words_equal_sum_of_documents(self, tmp_path):
        for i in range(3):
            (tmp_path / f"t{i}.txt").write_text("word " * (10 + i), encoding="utf-8")
        path = _write_manifest(tmp_path, [_entry(i, f"t{i}") for i in range(3)])
        docs = load_corpus(read_manifest(path))
        summary = corpus_summary(docs)
        assert summary["words"] == sum(d.word_count for d in docs) == 33

    def test_template_manifest_parses(self):
        doc = json.loads(
            (DATA_DIR / "manifest_template.json").read_text(encoding="utf-8")
        )
        manifest = parse_manifest(doc, base_dir=DATA_DIR)
        assert len(manifest.entries) == 20
        by_period = {}
        for e in manifest.entries:
            by_period[e.period] = by_period.get(e.period, 0) + 1
        assert by_period == {
            PeriodId.EARLY_VEDIC: 6,
            PeriodId.LATE_VEDIC: 5,
            PeriodId.LATEST_VEDIC: 6,
            PeriodId.CLASSICAL: 3,
        }


class TestPeriodMetadata:
    def test_every_period_has_display_metadata(self):
        for p in PeriodId:
            assert p.display_name
            assert "-" in p.date_range
