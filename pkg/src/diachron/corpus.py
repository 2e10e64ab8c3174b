"""Corpus loading: normalization, tokenization, chronological ordering.

Texts are IAST-transliterated UTF-8. Normalization lowercases and
canonically composes (NFC) so that diacritics have a single encoding;
tokenization keeps euphonically joined words intact (no sandhi splitting).
"""

from __future__ import annotations

import enum
import json
import logging
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import ManifestError

logger = logging.getLogger(__name__)

# Tolerated relative drift between a manifest's expected word count and the
# tokenized count before a warning is emitted (editions differ slightly).
WORD_COUNT_TOLERANCE = 0.005


class PeriodId(enum.Enum):
    """Chronological stratum of a text."""

    EARLY_VEDIC = "EarlyVedic"
    LATE_VEDIC = "LateVedic"
    LATEST_VEDIC = "LatestVedic"
    CLASSICAL = "Classical"

    @property
    def display_name(self) -> str:
        return _PERIOD_META[self][0]

    @property
    def date_range(self) -> str:
        return _PERIOD_META[self][1]


_PERIOD_META = {
    PeriodId.EARLY_VEDIC: ("Samhitas", "1500-1000 BCE"),
    PeriodId.LATE_VEDIC: ("Brahmanas", "1000-700 BCE"),
    PeriodId.LATEST_VEDIC: ("Upanishads", "700-300 BCE"),
    PeriodId.CLASSICAL: ("Classical", "300 BCE-500 CE"),
}

# A token is a maximal run of letters and combining marks. The avagraha in
# both its Devanagari (U+093D, already a letter) and IAST apostrophe
# renderings marks elision inside a phonological word, so the apostrophes
# count as word characters too (runs without an actual letter are dropped).
# Everything else (punctuation, digits, danda marks, whitespace) separates.
# Python's \w misses combining marks, hence the category-based predicate.
_AVAGRAHA_CHARS = frozenset("'’")
_char_is_word: dict[str, bool] = {}


def _is_word_char(ch: str) -> bool:
    cached = _char_is_word.get(ch)
    if cached is None:
        cached = unicodedata.category(ch)[0] in ("L", "M") or ch in _AVAGRAHA_CHARS
        _char_is_word[ch] = cached
    return cached


@dataclass(frozen=True)
class Token:
    surface: str
    byte_span: tuple[int, int]
    word_index: int


@dataclass(frozen=True)
class TextDocument:
    id: str
    title: str
    period: PeriodId
    chrono_index: int
    raw: str
    tokens: tuple[Token, ...]

    @property
    def word_count(self) -> int:
        return len(self.tokens)

    @property
    def normalized(self) -> str:
        return normalize(self.raw)


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    title: str
    period: PeriodId
    chrono_index: int
    file_path: str
    expected_word_count: Optional[int] = None


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    base_dir: Path = field(default_factory=Path)

    def resolve(self, entry: ManifestEntry) -> Path:
        p = Path(entry.file_path)
        return p if p.is_absolute() else self.base_dir / p


def normalize(raw: str) -> str:
    """Lowercase and canonically compose (NFC) a text.

    Diacritics such as ṃ, ḷ, ā are preserved; decomposed letter+mark
    sequences collapse to their precomposed forms so regexes only ever
    see one encoding.
    """
    return unicodedata.normalize("NFC", raw.lower())


def tokenize(text: str) -> tuple[Token, ...]:
    """Split normalized text into word tokens with UTF-8 byte spans."""
    tokens: list[Token] = []
    run_start_byte = -1
    run_chars: list[str] = []
    run_has_letter = False
    byte_pos = 0

    def flush(end_byte: int) -> None:
        nonlocal run_start_byte, run_has_letter
        if run_chars and run_has_letter:
            tokens.append(
                Token(
                    surface="".join(run_chars),
                    byte_span=(run_start_byte, end_byte),
                    word_index=len(tokens),
                )
            )
        run_chars.clear()
        run_start_byte = -1
        run_has_letter = False

    for ch in text:
        width = len(ch.encode("utf-8"))
        if _is_word_char(ch):
            if not run_chars:
                run_start_byte = byte_pos
            run_chars.append(ch)
            if ch not in _AVAGRAHA_CHARS and unicodedata.category(ch)[0] == "L":
                run_has_letter = True
        else:
            flush(byte_pos)
        byte_pos += width
    flush(byte_pos)
    return tuple(tokens)


def _parse_period(value: str, entry_id: str) -> PeriodId:
    try:
        return PeriodId(value)
    except ValueError:
        valid = ", ".join(p.value for p in PeriodId)
        raise ManifestError(
            f"entry {entry_id!r}: unknown period {value!r} (expected one of {valid})"
        ) from None


def parse_manifest(doc: dict, base_dir: Path) -> CorpusManifest:
    """Validate a parsed manifest document."""
    if not isinstance(doc, dict) or "entries" not in doc:
        raise ManifestError("manifest must be an object with an 'entries' list")
    entries = []
    seen_ids: set[str] = set()
    for raw in doc["entries"]:
        missing = [k for k in ("id", "title", "period", "chrono_index", "file_path") if k not in raw]
        if missing:
            raise ManifestError(
                f"entry {raw.get('id', '<missing id>')!r}: missing fields {missing}"
            )
        entry_id = raw["id"]
        if entry_id in seen_ids:
            raise ManifestError(f"duplicate text id {entry_id!r}")
        seen_ids.add(entry_id)
        entries.append(
            ManifestEntry(
                id=entry_id,
                title=raw["title"],
                period=_parse_period(raw["period"], entry_id),
                chrono_index=int(raw["chrono_index"]),
                file_path=raw["file_path"],
                expected_word_count=raw.get("expected_word_count"),
            )
        )
    indices = sorted(e.chrono_index for e in entries)
    if indices != list(range(len(entries))):
        raise ManifestError(
            f"chrono_index values must be unique and dense 0..{len(entries) - 1}, got {indices}"
        )
    return CorpusManifest(entries=entries, base_dir=base_dir)


def read_manifest(path: str | Path) -> CorpusManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from None
    return parse_manifest(doc, base_dir=path.parent)


def load_document(entry: ManifestEntry, manifest: CorpusManifest) -> TextDocument:
    path = manifest.resolve(entry)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ManifestError(f"entry {entry.id!r}: file not found: {path}") from None
    try:
        raw = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ManifestError(
            f"entry {entry.id!r}: invalid UTF-8 at byte offset {exc.start} in {path}"
        ) from None
    tokens = tokenize(normalize(raw))
    doc = TextDocument(
        id=entry.id,
        title=entry.title,
        period=entry.period,
        chrono_index=entry.chrono_index,
        raw=raw,
        tokens=tokens,
    )
    if entry.expected_word_count:
        drift = abs(doc.word_count - entry.expected_word_count) / entry.expected_word_count
        if drift > WORD_COUNT_TOLERANCE:
            logger.warning(
                "text %s: tokenized %d words, manifest expects %d (%.2f%% off)",
                entry.id,
                doc.word_count,
                entry.expected_word_count,
                100 * drift,
            )
    return doc


def load_corpus(manifest: CorpusManifest) -> list[TextDocument]:
    """Load, normalize and tokenize all manifest entries in chrono order."""
    docs = [load_document(e, manifest) for e in manifest.entries]
    docs.sort(key=lambda d: d.chrono_index)
    return docs


def corpus_hash(docs: Iterable[TextDocument]) -> str:
    """Stable content hash over ids and normalized text, chrono order."""
    import hashlib

    h = hashlib.sha256()
    for doc in sorted(docs, key=lambda d: d.chrono_index):
        h.update(doc.id.encode("utf-8"))
        h.update(b"\x00")
        h.update(doc.normalized.encode("utf-8"))
        h.update(b"\x01")
    return h.hexdigest()


def corpus_summary(docs: Sequence[TextDocument]) -> dict:
    """Period-level composition summary (texts and word counts)."""
    by_period: dict[str, dict] = {}
    for p in PeriodId:
        rows = [d for d in docs if d.period is p]
        if rows:
            by_period[p.value] = {
                "display_name": p.display_name,
                "date_range": p.date_range,
                "texts": len(rows),
                "words": sum(d.word_count for d in rows),
            }
    return {
        "texts": len(docs),
        "words": sum(d.word_count for d in docs),
        "periods": by_period,
        "documents": [
            {
                "id": d.id,
                "title": d.title,
                "period": d.period.value,
                "chrono_index": d.chrono_index,
                "words": d.word_count,
            }
            for d in docs
        ],
    }
